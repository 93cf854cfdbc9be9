#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "datadesc/dataset.hpp"
#include "datadesc/llm.hpp"
#include "datadesc/templates.hpp"

namespace datadesc {

struct SemanticColumnProfile {
    struct Temporal {
        bool is_temporal = false;
        std::string resolution;
        friend bool operator==(const Temporal&, const Temporal&) = default;
    };
    struct Spatial {
        bool is_spatial = false;
        std::string resolution;
        friend bool operator==(const Spatial&, const Spatial&) = default;
    };

    std::string column_name;
    Temporal temporal;
    Spatial spatial;
    std::string entity_type;
    std::string data_format;
    std::string domain_specific_types;
    std::string usage_context;

    friend bool operator==(const SemanticColumnProfile&, const SemanticColumnProfile&) = default;
};

struct SemanticSummary {
    std::vector<SemanticColumnProfile> profiles;
    std::vector<std::string> column_summaries;
    std::string combined;
    std::vector<std::string> warnings;
};

struct DatasetTopic {
    std::string topic;
};

enum class ExecMode { Sequential, Concurrent, Grouped };

std::string_view to_string(ExecMode mode) noexcept;
/// Accepts seq|sequential, mt|concurrent, gp|grouped.
ExecMode exec_mode_from_string(std::string_view name);

struct ExecConfig {
    ExecMode mode = ExecMode::Sequential;
    std::size_t workers = 64;
    std::size_t batch_size = 8;
};

/// Splits the semantic prompt into the part shared by every column (sent as
/// system instructions) and the per-column payload (sent as the user
/// prompt). Grouped mode sends the shared part once and concatenates the
/// payloads of a batch.
class SemanticPromptBuilder {
public:
    virtual ~SemanticPromptBuilder() = default;
    virtual std::string instructions() const = 0;
    virtual std::string column_payload(const std::string& column_name,
                                       const std::vector<std::string>& sample_values) const = 0;
    virtual std::string repair_instruction() const = 0;
};

class TemplateSemanticPromptBuilder final : public SemanticPromptBuilder {
public:
    explicit TemplateSemanticPromptBuilder(PromptTemplates templates = PromptTemplates::builtin());

    std::string instructions() const override;
    std::string column_payload(const std::string& column_name,
                               const std::vector<std::string>& sample_values) const override;
    std::string repair_instruction() const override;

private:
    PromptTemplates templates_;
};

struct SemanticOptions {
    ExecConfig exec;
    std::size_t value_sample_size = kDefaultValueSampleSize;
    std::uint64_t seed = 0;
    int json_retries = 3;
    std::shared_ptr<const SemanticPromptBuilder> prompts;  // defaults to the built-in templates
    std::string dataset_id;
};

/// Converts one JSON object from the model into a profile. Accepts the
/// template's key names, "Yes"/"No"/"true" style booleans and lists for text
/// categories; a resolution given for a false flag is dropped. Throws
/// SemanticParseError when the value is not an object.
SemanticColumnProfile semantic_profile_from_json(const std::string& column_name, const nlohmann::json& object);
nlohmann::json semantic_profile_to_json(const SemanticColumnProfile& profile);

/// Strict JSON parse of a model reply; a surrounding markdown code fence is
/// tolerated. Throws SemanticParseError.
nlohmann::json parse_model_json(const std::string& reply);

/// Prompts for one column, retrying with the repair instruction up to
/// options.json_retries times when the reply is not a valid profile.
SemanticColumnProfile profile_column(const std::string& column_name, const std::vector<std::string>& sample_values,
                                     const Gateway& gateway, const SemanticOptions& options = {},
                                     std::size_t item = 0);

/// "**Year**: Represents temporal entity. Contains temporal data
/// (resolution: Year). Domain-specific type: general. Function/Usage
/// Context: Aggregation Key." Empty categories drop their sentence.
std::string serialize_column_profile(const SemanticColumnProfile& profile);

/// Profiles every column in the configured execution mode. A column that
/// keeps failing degrades to an empty profile plus a warning. Given a
/// response source that depends only on the column, all modes return the
/// same summary.
SemanticSummary profile_dataset(const TableHandle& table, const Gateway& gateway, const SemanticOptions& options = {});

nlohmann::json semantic_summary_to_json(const SemanticSummary& summary);

/// Strips quotes and punctuation and keeps at most three words.
std::string normalize_topic(std::string_view raw);

/// Header plus sampled rows, one comma-joined line each.
std::string render_row_sample(const TableHandle& table, const RowSample& sample);

struct TopicOptions {
    PromptTemplates templates = PromptTemplates::builtin();
    std::string dataset_id;
};

/// Falls back to the first three words of the title when the provider
/// fails; the warning is appended to `warnings` when given.
DatasetTopic generate_topic(const std::string& title, const std::optional<std::string>& original_description,
                            const std::string& dataset_sample, const Gateway& gateway,
                            const TopicOptions& options = {}, std::vector<std::string>* warnings = nullptr);

/// Builds the filled topic prompt (exposed for template-fidelity tests).
std::string build_topic_prompt(const PromptTemplates& templates, const std::string& title,
                               const std::optional<std::string>& original_description,
                               const std::string& dataset_sample);

}  // namespace datadesc
