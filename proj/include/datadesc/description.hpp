#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "datadesc/content_profile.hpp"
#include "datadesc/dataset.hpp"
#include "datadesc/llm.hpp"
#include "datadesc/semantic_profile.hpp"
#include "datadesc/templates.hpp"

namespace datadesc {

/// Inputs of the description prompts. The optional parts are present iff
/// the semantic profiler ran.
struct GenerationContext {
    std::string d_sample;
    std::string d_profile;
    std::optional<std::string> d_semantic;
    std::optional<std::string> d_topic;
};

enum class DescriptionMode { UFD, SFD };

std::string_view to_string(DescriptionMode mode) noexcept;
DescriptionMode description_mode_from_string(std::string_view name);

struct DescriptionConfig {
    bool sp_enabled = true;
    bool sfd_enabled = true;
    ExecMode exec_mode = ExecMode::Sequential;
    std::string model;
};

nlohmann::json description_config_to_json(const DescriptionConfig& config);

struct DescriptionRecord {
    std::string dataset_id;
    DescriptionMode mode = DescriptionMode::UFD;
    DescriptionConfig config;
    std::string text;
    std::string prompt;
    /// For SFD records: the UFD text the expansion was built from.
    std::optional<std::string> initial_description;
    std::size_t input_tokens = 0;
    std::size_t output_tokens = 0;
    double latency_ms = 0;
    std::size_t calls = 0;
    std::vector<std::string> warnings;
};

/// One line of the descriptions JSON-lines output:
/// {"dataset_id","mode","config","text","tokens_in","tokens_out"}.
nlohmann::json description_record_to_jsonl(const DescriptionRecord& record);
/// Full artifact form, including the filled prompt.
nlohmann::json description_record_to_json(const DescriptionRecord& record);

struct GenerationOptions {
    PromptTemplates templates = PromptTemplates::builtin();
    std::string dataset_id;
    DescriptionConfig config;
};

std::string build_ufd_prompt(const GenerationContext& context, const PromptTemplates& templates);
std::string build_sfd_prompt(const std::string& topic, const std::string& initial_description,
                             const PromptTemplates& templates);

/// Throws GenerationError when the provider fails after its retries.
DescriptionRecord generate_ufd(const GenerationContext& context, const Gateway& gateway,
                               const GenerationOptions& options = {});

/// Section headers recognised in search-focused descriptions. "Key Themes or
/// Topics" and "Related Topics" count as the same section.
std::size_t count_sfd_sections(const std::string& text);
bool sfd_structure_ok(const std::string& text);

/// Re-prompts once with a structure reminder when the reply lacks the
/// required sections, then accepts it with a warning.
DescriptionRecord generate_sfd(const DatasetTopic& topic, const std::string& initial_description,
                               const Gateway& gateway, const GenerationOptions& options = {});

struct PipelineFlags {
    bool sp = true;
    bool sfd = true;
    ExecConfig exec;
};

struct PipelineOptions {
    PipelineFlags flags;
    std::size_t sample_size = kDefaultRowSampleSize;
    std::size_t value_sample_size = kDefaultValueSampleSize;
    std::uint64_t seed = 0;
    int json_retries = 3;
    std::size_t profile_workers = 1;
    PromptTemplates templates = PromptTemplates::builtin();
    /// Overrides the semantic prompt split; defaults to `templates`.
    std::shared_ptr<const SemanticPromptBuilder> semantic_prompts;
    /// When set, intermediate artifacts go to <artifacts_dir>/<dataset_id>/.
    std::optional<std::filesystem::path> artifacts_dir;
};

struct PipelineResult {
    std::string dataset_id;
    std::vector<DescriptionRecord> records;
    ContentProfile content_profile;
    GenerationContext context;
    std::optional<SemanticSummary> semantic;
    std::optional<DatasetTopic> topic;
    std::vector<std::string> warnings;
    /// Stage failures that cost this dataset a record (UFD or SFD).
    std::vector<std::string> errors;
};

/// content profile -> [semantic profile + topic] -> UFD -> [SFD].
///
/// Completions issued: sp * (column groups + 1) + 1 + sfd, plus logged
/// retries. Without the semantic profiler an SFD run takes its topic from
/// the title (no completion).
PipelineResult run_pipeline(const TableHandle& table, const Gateway& gateway, const PipelineOptions& options = {});

/// Short content address for a configuration, used to name run
/// directories so ablations and execution modes coexist.
std::string config_key(const DescriptionConfig& config, const PipelineOptions& options);

}  // namespace datadesc
