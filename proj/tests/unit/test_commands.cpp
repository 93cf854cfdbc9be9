#include <doctest.h>

#include <cstdlib>
#include <sstream>

#include "datadesc/commands.hpp"
#include "datadesc/error.hpp"
#include "datadesc/mock_provider.hpp"
#include "datadesc/util.hpp"
#include "test_support.hpp"

using namespace datadesc;

namespace {

std::filesystem::path mock_config() { return testing::fixtures() / "configs" / "mock_full.json"; }

CommonOverrides overrides_for(const std::filesystem::path& out) {
    CommonOverrides o;
    o.config = mock_config();
    o.output_dir = out;
    return o;
}

std::filesystem::path only_run_dir(const std::filesystem::path& out) {
    std::vector<std::filesystem::path> dirs;
    for (const auto& entry : std::filesystem::directory_iterator(out)) {
        if (entry.is_directory()) dirs.push_back(entry.path());
    }
    REQUIRE(dirs.size() == 1);
    return dirs.front();
}

}  // namespace

TEST_CASE("environment interpolation") {
    ::setenv("DATADESC_UNIT_VALUE", "secret", 1);
    CHECK(interpolate_env("key=${DATADESC_UNIT_VALUE}") == "key=secret");
    CHECK(interpolate_env("literal $${HOME}") == "literal ${HOME}");
    ::unsetenv("DATADESC_UNIT_UNSET");
    CHECK_THROWS_AS(interpolate_env("${DATADESC_UNIT_UNSET}"), ConfigError);
}

TEST_CASE("run config loading resolves paths and validates") {
    const auto config = load_run_config(mock_config());
    CHECK(config.provider.kind == ProviderConfig::Kind::Mock);
    CHECK(config.exec.mode == ExecMode::Concurrent);
    CHECK(config.seed == 7);
    REQUIRE(config.corpus_manifest);
    CHECK(std::filesystem::exists(*config.corpus_manifest));
    CHECK(config.ks == std::vector<std::size_t>{5, 10, 15, 20});

    auto bad = config;
    bad.ks = {10, 5};
    CHECK_THROWS_AS(validate(bad), ConfigError);
    bad = config;
    bad.exec.batch_size = 0;
    CHECK_THROWS_AS(validate(bad), ConfigError);
    bad = config;
    bad.sample_size = 0;
    CHECK_THROWS_AS(validate(bad), ConfigError);

    const auto again = run_config_from_json(run_config_to_json(config));
    CHECK(run_config_to_json(again) == run_config_to_json(config));
}

TEST_CASE("command-line overrides win over the file") {
    CommonOverrides o;
    o.config = mock_config();
    o.exec = "gp";
    o.batch_size = 2;
    o.no_sfd = true;
    o.ks = std::vector<std::size_t>{1, 3};
    const auto config = resolve_run_config(o);
    CHECK(config.exec.mode == ExecMode::Grouped);
    CHECK(config.exec.batch_size == 2);
    CHECK_FALSE(config.sfd);
    CHECK(config.sp);
    CHECK(config.ks == std::vector<std::size_t>{1, 3});
}

TEST_CASE("describe over the mock corpus") {
    testing::ScratchDir dir("datadesc-describe");
    DescribeArgs args{overrides_for(dir.path())};
    std::ostringstream out, err;
    REQUIRE(cmd_describe(args, out, err) == kExitOk);
    const auto run = only_run_dir(dir.path());
    const auto lines = read_descriptions(run / "descriptions.jsonl");
    CHECK(lines.size() == 6);
    CHECK(lines[0].dataset_id == "health_insurance");
    CHECK(lines[0].mode == DescriptionMode::UFD);
    CHECK(lines[1].mode == DescriptionMode::SFD);
    CHECK(std::filesystem::exists(run / "config.json"));
    CHECK(read_file(run / "errors.jsonl").empty());
    const auto auto_pick = select_descriptions(lines, ModeSelection::Auto);
    CHECK(auto_pick.size() == 3);
    CHECK(auto_pick.at("wind_measurements").find("Dataset Overview") != std::string::npos);
    CHECK(select_descriptions(lines, ModeSelection::UFD).at("wind_measurements").find("Dataset Overview") ==
          std::string::npos);
}

TEST_CASE("describe runs are reproducible across job counts") {
    testing::ScratchDir a("datadesc-det-a"), b("datadesc-det-b");
    auto config_a = resolve_run_config(overrides_for(a.path()));
    auto config_b = resolve_run_config(overrides_for(b.path()));
    config_b.jobs = 3;
    std::ostringstream err;
    const auto run_a = run_describe(config_a, make_gateway(config_a.provider), err);
    const auto run_b = run_describe(config_b, make_gateway(config_b.provider), err);
    CHECK(run_a.run_dir.filename() == run_b.run_dir.filename());
    CHECK(read_file(run_a.run_dir / "descriptions.jsonl") == read_file(run_b.run_dir / "descriptions.jsonl"));
    for (const char* id : {"health_insurance", "wind_measurements", "regional_climate"}) {
        CHECK(read_file(run_a.run_dir / id / "cost.csv") == read_file(run_b.run_dir / id / "cost.csv"));
    }
}

TEST_CASE("describe reports partial failure") {
    testing::ScratchDir dir("datadesc-partial");
    auto config = resolve_run_config(overrides_for(dir.path()));
    auto provider = std::make_shared<MockProvider>(MockProvider::Responder([](const CompletionRequest& r) -> ProviderReply {
        if (r.tag == Stage::Ufd && r.dataset_id == "regional_climate") throw TransportError("down");
        if (r.tag == Stage::SemanticProfile) return {"{\"Entity Type\": \"Thing\"}", {}, {}, {}};
        return {"Dataset Overview:\nx\nKey Themes or Topics:\nApplications and Use Cases:\n", {}, {}, {}};
    }));
    RetryPolicy policy;
    policy.max_retries = 0;
    policy.sleep = [](std::chrono::milliseconds) {};
    config.exec.mode = ExecMode::Sequential;
    std::ostringstream err;
    const auto run = run_describe(config, Gateway(provider, policy), err);
    CHECK(run.exit_code == kExitPartial);
    CHECK(run.records.size() == 4);
    CHECK(run.errors.size() == 1);
    CHECK(read_file(run.run_dir / "errors.jsonl").find("regional_climate") != std::string::npos);
}

TEST_CASE("remote provider without a key is a fatal config error") {
    ::unsetenv("DATADESC_TEST_MISSING_KEY");
    testing::ScratchDir dir("datadesc-remote");
    DescribeArgs args;
    args.common.config = testing::fixtures() / "configs" / "remote_missing_key.json";
    args.common.output_dir = dir.path();
    std::ostringstream out, err;
    CHECK(cmd_describe(args, out, err) == kExitFatal);
    CHECK(err.str().find("DATADESC_TEST_MISSING_KEY") != std::string::npos);
}

TEST_CASE("profile command writes the golden summary") {
    ProfileArgs args;
    args.csv = testing::fixtures() / "corpus" / "health_insurance.csv";
    std::ostringstream out, err;
    REQUIRE(cmd_profile(args, out, err) == kExitOk);
    CHECK(out.str() == read_file(testing::fixtures() / "golden" / "health_insurance_summary.txt"));
    args.json = true;
    std::ostringstream json_out;
    REQUIRE(cmd_profile(args, json_out, err) == kExitOk);
    CHECK(nlohmann::json::parse(json_out.str())["row_count"] == 790);
}

TEST_CASE("index and search round trip") {
    testing::ScratchDir dir("datadesc-index");
    const auto index_path = dir.path() / "index.json";
    IndexArgs index;
    index.descriptions = testing::fixtures() / "benchmark" / "toy" / "descriptions.jsonl";
    index.output = index_path;
    std::ostringstream out, err;
    REQUIRE(cmd_index(index, out, err) == kExitOk);
    SearchArgs search{index_path, "taxi fares", 2};
    std::ostringstream results;
    REQUIRE(cmd_search(search, results, err) == kExitOk);
    CHECK(results.str().find("t_taxi") < results.str().find('\n'));
}

TEST_CASE("retrieval evaluation writes and merges the results csv") {
    testing::ScratchDir dir("datadesc-eval");
    EvalRetrievalArgs args;
    args.common.benchmark_dir = testing::fixtures() / "benchmark" / "toy";
    args.common.output_dir = dir.path();
    args.original = true;
    std::ostringstream out, err;
    REQUIRE(cmd_eval_retrieval(args, out, err) == kExitOk);

    EvalRetrievalArgs second = args;
    second.original = false;
    second.descriptions = testing::fixtures() / "benchmark" / "toy" / "descriptions.jsonl";
    second.method_label = "toy";
    REQUIRE(cmd_eval_retrieval(second, out, err) == kExitOk);
    REQUIRE(cmd_eval_retrieval(args, out, err) == kExitOk);

    const auto csv = read_file(dir.path() / "retrieval_results.csv");
    CHECK(csv.find("Original,20,1.000000") != std::string::npos);
    CHECK(csv.find("toy,5,1.000000") != std::string::npos);
    std::size_t lines = 0;
    for (char c : csv) lines += c == '\n';
    CHECK(lines == 1 + 2 * 4);
}

TEST_CASE("eval-retrieval without a benchmark fails") {
    EvalRetrievalArgs args;
    args.original = true;
    std::ostringstream out, err;
    CHECK(cmd_eval_retrieval(args, out, err) == kExitFatal);
}

TEST_CASE("bench-stats on the toy benchmark") {
    BenchStatsArgs args{{testing::fixtures() / "benchmark" / "toy"}, false};
    std::ostringstream out, err;
    REQUIRE(cmd_bench_stats(args, out, err) == kExitOk);
    CHECK(out.str().find("toy") != std::string::npos);
    CHECK(out.str().find('4') != std::string::npos);
}

TEST_CASE("quality evaluation with the mock judge") {
    testing::ScratchDir dir("datadesc-quality");
    DescribeArgs describe{overrides_for(dir.path() / "runs")};
    std::ostringstream out, err;
    REQUIRE(cmd_describe(describe, out, err) == kExitOk);
    const auto run = only_run_dir(dir.path() / "runs");

    EvalQualityArgs args;
    args.common = overrides_for(dir.path());
    args.descriptions = {run / "descriptions.jsonl"};
    args.method_labels = {"mock"};
    args.include_original = true;
    const int code = cmd_eval_quality(args, out, err);
    CHECK(code != kExitFatal);
    CHECK(std::filesystem::exists(dir.path() / "quality" / "reference_scores.csv"));
    CHECK(std::filesystem::exists(dir.path() / "quality" / "pointwise.csv"));
    CHECK(std::filesystem::exists(dir.path() / "quality" / "win_rates.csv"));
    const auto refs = read_file(dir.path() / "quality" / "reference_scores.csv");
    CHECK(refs.find("mock-UFD") != std::string::npos);
    CHECK(refs.find("mock-SFD") != std::string::npos);
}

TEST_CASE("cost report compares grouped and per-column runs") {
    testing::ScratchDir dir("datadesc-cost");
    std::ostringstream out, err;
    for (const char* mode : {"mt", "gp"}) {
        DescribeArgs args{overrides_for(dir.path())};
        args.common.exec = mode;
        REQUIRE(cmd_describe(args, out, err) == kExitOk);
    }
    const auto runs = collect_costs(dir.path());
    REQUIRE(runs.size() == 2);
    std::map<std::string, const RunCost*> by_mode;
    for (const auto& r : runs) by_mode[r.exec_mode] = &r;
    REQUIRE(by_mode.count("gp") == 1);
    REQUIRE(by_mode.count("mt") == 1);
    for (const auto& [id, tokens] : by_mode["gp"]->semantic_input_tokens) {
        CAPTURE(id);
        CHECK(tokens < by_mode["mt"]->semantic_input_tokens.at(id));
    }
    CostReportArgs report{dir.path()};
    std::ostringstream text;
    REQUIRE(cmd_cost_report(report, text, err) == kExitOk);
    CHECK(text.str().find("[grouped < per-column]") != std::string::npos);
}

TEST_CASE("cost report on an empty directory fails") {
    testing::ScratchDir dir("datadesc-cost-empty");
    std::ostringstream out, err;
    CHECK(cmd_cost_report({dir.path()}, out, err) != kExitOk);
    CHECK(cmd_cost_report({dir.path() / "missing"}, out, err) != kExitOk);
}
