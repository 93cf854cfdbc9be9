#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "datadesc/description.hpp"
#include "datadesc/run_config.hpp"

namespace datadesc {

enum ExitCode : int { kExitOk = 0, kExitFatal = 1, kExitPartial = 2 };

/// Command-line values that override the config file.
struct CommonOverrides {
    std::optional<std::filesystem::path> config;
    std::optional<std::string> exec;
    std::optional<std::size_t> workers;
    std::optional<std::size_t> batch_size;
    bool no_sp = false;
    bool no_sfd = false;
    std::optional<std::size_t> sample_size;
    std::optional<std::uint64_t> seed;
    std::optional<std::vector<std::size_t>> ks;
    std::optional<std::size_t> jobs;
    std::optional<std::filesystem::path> output_dir;
    std::optional<std::filesystem::path> manifest;
    std::optional<std::filesystem::path> benchmark_dir;
};

RunConfig resolve_run_config(const CommonOverrides& overrides);

struct ProfileArgs {
    std::filesystem::path csv;
    std::string title;
    bool json = false;
    std::optional<std::filesystem::path> output;
    std::size_t workers = 1;
};

struct DescribeArgs {
    CommonOverrides common;
};

/// Which description of a dataset to use when a file holds several.
enum class ModeSelection { Auto, UFD, SFD, All };
ModeSelection mode_selection_from_string(std::string_view name);

struct IndexArgs {
    CommonOverrides common;
    std::filesystem::path descriptions;
    ModeSelection mode = ModeSelection::Auto;
    std::filesystem::path output;
};

struct SearchArgs {
    std::filesystem::path index;
    std::string query;
    std::size_t top = 10;
};

struct EvalRetrievalArgs {
    CommonOverrides common;
    std::optional<std::filesystem::path> descriptions;
    bool original = false;
    ModeSelection mode = ModeSelection::Auto;
    std::optional<std::string> method_label;
    std::optional<std::filesystem::path> results;
    bool prepend_title = false;
    bool linear_gain = false;
};

struct EvalQualityArgs {
    CommonOverrides common;
    std::vector<std::filesystem::path> descriptions;
    std::vector<std::string> method_labels;
    ModeSelection mode = ModeSelection::All;
    bool include_original = false;
    bool reference = true;
    bool pointwise = true;
    bool pairwise = true;
    bool percent = false;
};

struct BenchStatsArgs {
    std::vector<std::filesystem::path> benchmarks;
    bool shapes = false;
};

struct CostReportArgs {
    std::filesystem::path run_dir;
};

int cmd_profile(const ProfileArgs& args, std::ostream& out, std::ostream& err);
int cmd_describe(const DescribeArgs& args, std::ostream& out, std::ostream& err);
int cmd_index(const IndexArgs& args, std::ostream& out, std::ostream& err);
int cmd_search(const SearchArgs& args, std::ostream& out, std::ostream& err);
int cmd_eval_retrieval(const EvalRetrievalArgs& args, std::ostream& out, std::ostream& err);
int cmd_eval_quality(const EvalQualityArgs& args, std::ostream& out, std::ostream& err);
int cmd_bench_stats(const BenchStatsArgs& args, std::ostream& out, std::ostream& err);
int cmd_cost_report(const CostReportArgs& args, std::ostream& out, std::ostream& err);

struct DescriptionLine {
    std::string dataset_id;
    DescriptionMode mode = DescriptionMode::UFD;
    std::string text;
    std::size_t tokens_in = 0;
    std::size_t tokens_out = 0;
    nlohmann::json config;
};

std::vector<DescriptionLine> read_descriptions(const std::filesystem::path& path);

/// dataset_id -> text for one selection; Auto prefers SFD over UFD.
std::map<std::string, std::string> select_descriptions(const std::vector<DescriptionLine>& lines, ModeSelection mode);

struct DescribeRun {
    std::filesystem::path run_dir;
    std::vector<DescriptionRecord> records;
    std::vector<nlohmann::json> errors;
    int exit_code = kExitOk;
};

/// Library form of `describe`: runs the pipeline over the manifest and
/// writes descriptions.jsonl, errors.jsonl, events.jsonl, config.json and
/// per-dataset artifacts under <output_dir>/<config key>/.
DescribeRun run_describe(const RunConfig& config, const Gateway& gateway, std::ostream& err,
                         std::shared_ptr<const SemanticPromptBuilder> semantic_prompts = nullptr);

struct StageCost {
    std::size_t calls = 0;
    std::size_t input_tokens = 0;
    std::size_t output_tokens = 0;
    double latency_ms = 0;
};

struct RunCost {
    std::filesystem::path run_dir;
    std::string exec_mode;
    std::map<std::string, StageCost> by_stage;
    std::map<std::string, StageCost> by_dataset;
    /// Semantic-profile input tokens per dataset.
    std::map<std::string, std::size_t> semantic_input_tokens;
};

/// Reads every <dataset>/cost.csv below `dir`, grouped by run directory.
std::vector<RunCost> collect_costs(const std::filesystem::path& dir);
std::string render_cost_report(const std::vector<RunCost>& runs);

}  // namespace datadesc
