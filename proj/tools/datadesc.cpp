#include <iostream>

#include <CLI11.hpp>

#include "datadesc/commands.hpp"
#include "datadesc/error.hpp"

namespace {

using namespace datadesc;

void add_common(CLI::App* cmd, CommonOverrides& o) {
    cmd->add_option("--config", o.config, "Run config (JSON)")->check(CLI::ExistingFile);
    cmd->add_option("--exec", o.exec, "Semantic profiling mode")->check(CLI::IsMember({"seq", "mt", "gp"}));
    cmd->add_option("--workers", o.workers, "Worker threads for mt mode");
    cmd->add_option("--batch-size", o.batch_size, "Columns per prompt in gp mode");
    cmd->add_flag("--no-sp", o.no_sp, "Disable the semantic profiler and topic");
    cmd->add_flag("--no-sfd", o.no_sfd, "Disable search-focused descriptions");
    cmd->add_option("--sample-size", o.sample_size, "Rows in the dataset sample");
    cmd->add_option("--seed", o.seed, "Sampling seed");
    cmd->add_option("--ks", o.ks, "NDCG cutoffs, ascending")->delimiter(',');
    cmd->add_option("--jobs", o.jobs, "Datasets processed in parallel");
    cmd->add_option("--output-dir", o.output_dir, "Output directory");
    cmd->add_option("--manifest", o.manifest, "Corpus manifest (JSON lines)");
    cmd->add_option("--benchmark", o.benchmark_dir, "Benchmark directory");
}

ModeSelection parse_mode(const std::string& text) { return mode_selection_from_string(text); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dataset description generation and evaluation"};
    app.require_subcommand(1);

    ProfileArgs profile;
    auto* profile_cmd = app.add_subcommand("profile", "Print the content profile of a CSV file");
    profile_cmd->add_option("csv", profile.csv, "CSV file")->required()->check(CLI::ExistingFile);
    profile_cmd->add_option("--title", profile.title, "Dataset title");
    profile_cmd->add_flag("--json", profile.json, "Emit JSON instead of the text summary");
    profile_cmd->add_option("--output", profile.output, "Write to a file");
    profile_cmd->add_option("--workers", profile.workers, "Column profiling threads");

    DescribeArgs describe;
    auto* describe_cmd = app.add_subcommand("describe", "Generate descriptions for a corpus");
    add_common(describe_cmd, describe.common);

    IndexArgs index;
    std::string index_mode = "auto";
    auto* index_cmd = app.add_subcommand("index", "Build a BM25 index over descriptions");
    add_common(index_cmd, index.common);
    index_cmd->add_option("--descriptions", index.descriptions, "descriptions.jsonl")->required();
    index_cmd->add_option("--mode", index_mode, "auto, UFD or SFD");
    index_cmd->add_option("--output", index.output, "Index file (JSON)")->required();

    SearchArgs search;
    auto* search_cmd = app.add_subcommand("search", "Query a BM25 index");
    search_cmd->add_option("--index", search.index, "Index file")->required()->check(CLI::ExistingFile);
    search_cmd->add_option("query", search.query, "Keyword query")->required();
    search_cmd->add_option("--top", search.top, "Results to print");

    EvalRetrievalArgs retrieval;
    std::string retrieval_mode = "auto";
    auto* retrieval_cmd = app.add_subcommand("eval-retrieval", "Mean NDCG@k of descriptions on a benchmark");
    add_common(retrieval_cmd, retrieval.common);
    retrieval_cmd->add_option("--descriptions", retrieval.descriptions, "descriptions.jsonl");
    retrieval_cmd->add_flag("--original", retrieval.original, "Use the benchmark's original descriptions");
    retrieval_cmd->add_option("--mode", retrieval_mode, "auto, UFD or SFD");
    retrieval_cmd->add_option("--method-label", retrieval.method_label, "Method name in the results CSV");
    retrieval_cmd->add_option("--results", retrieval.results, "Results CSV to update");
    retrieval_cmd->add_flag("--prepend-title", retrieval.prepend_title, "Index title + description");
    retrieval_cmd->add_flag("--linear-gain", retrieval.linear_gain, "Use linear instead of exponential gain");

    EvalQualityArgs quality;
    std::string quality_mode = "all";
    bool no_reference = false;
    bool no_pointwise = false;
    bool no_pairwise = false;
    auto* quality_cmd = app.add_subcommand("eval-quality", "Reference metrics and LLM judging");
    add_common(quality_cmd, quality.common);
    quality_cmd->add_option("--descriptions", quality.descriptions, "descriptions.jsonl (repeatable)")->required();
    quality_cmd->add_option("--method-label", quality.method_labels, "Label per descriptions file (repeatable)");
    quality_cmd->add_option("--mode", quality_mode, "all, auto, UFD or SFD");
    quality_cmd->add_flag("--include-original", quality.include_original, "Judge original descriptions too");
    quality_cmd->add_flag("--no-reference", no_reference, "Skip METEOR/ROUGE");
    quality_cmd->add_flag("--no-pointwise", no_pointwise, "Skip pointwise judging");
    quality_cmd->add_flag("--no-pairwise", no_pairwise, "Skip pairwise judging");
    quality_cmd->add_flag("--percent", quality.percent, "Show reference metrics on a 0-100 scale");

    BenchStatsArgs stats;
    auto* stats_cmd = app.add_subcommand("bench-stats", "Benchmark statistics");
    stats_cmd->add_option("benchmarks", stats.benchmarks, "Benchmark directories")->required();
    stats_cmd->add_flag("--shapes", stats.shapes, "Also read every table for rows/columns");

    CostReportArgs cost;
    auto* cost_cmd = app.add_subcommand("cost-report", "Per-stage token and latency summary");
    cost_cmd->add_option("run_dir", cost.run_dir, "Run directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitFatal;
    }

    try {
        if (*profile_cmd) return cmd_profile(profile, std::cout, std::cerr);
        if (*describe_cmd) return cmd_describe(describe, std::cout, std::cerr);
        if (*index_cmd) {
            index.mode = parse_mode(index_mode);
            return cmd_index(index, std::cout, std::cerr);
        }
        if (*search_cmd) return cmd_search(search, std::cout, std::cerr);
        if (*retrieval_cmd) {
            retrieval.mode = parse_mode(retrieval_mode);
            return cmd_eval_retrieval(retrieval, std::cout, std::cerr);
        }
        if (*quality_cmd) {
            quality.mode = parse_mode(quality_mode);
            quality.reference = !no_reference;
            quality.pointwise = !no_pointwise;
            quality.pairwise = !no_pairwise;
            return cmd_eval_quality(quality, std::cout, std::cerr);
        }
        if (*stats_cmd) return cmd_bench_stats(stats, std::cout, std::cerr);
        if (*cost_cmd) return cmd_cost_report(cost, std::cout, std::cerr);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFatal;
    }
    return kExitFatal;
}
