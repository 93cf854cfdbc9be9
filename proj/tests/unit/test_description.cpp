#include <doctest.h>

#include "datadesc/description.hpp"
#include "datadesc/error.hpp"
#include "datadesc/mock_provider.hpp"
#include "datadesc/util.hpp"
#include "test_support.hpp"

using namespace datadesc;

namespace {

RetryPolicy no_sleep(int retries = 3) {
    RetryPolicy policy;
    policy.max_retries = retries;
    policy.sleep = [](std::chrono::milliseconds) {};
    return policy;
}

Gateway corpus_gateway() {
    return Gateway(std::make_shared<MockProvider>(MockScript::load(testing::fixtures() / "mock" / "corpus_mock.json")),
                   no_sleep());
}

TableHandle wind_table() {
    return ingest_csv(testing::fixtures() / "corpus" / "wind_measurements.csv", "wind_measurements",
                      "Wind Measurements 2003",
                      std::string("Ten-minute wind speed and direction readings from a meteorological mast."));
}

const char* kGoodSfd =
    "Dataset Overview:\nx\n\nKey Themes or Topics:\n- a\n\nApplications and Use Cases:\n- b\n\n"
    "Concepts and Synonyms:\n- c\n";

}  // namespace

TEST_CASE("ufd prompt includes optional sections only when present") {
    const auto templates = PromptTemplates::builtin();
    GenerationContext ctx{"a,b\n1,2", "Number of Rows: 1\n", std::nullopt, std::nullopt};
    const auto bare = build_ufd_prompt(ctx, templates);
    CHECK(bare.find("a,b\n1,2") != std::string::npos);
    CHECK(bare.find("Number of Rows: 1") != std::string::npos);
    CHECK(bare.find("semantic profile") == std::string::npos);
    CHECK(bare.find("dataset topic") == std::string::npos);
    CHECK(bare.find('{') == std::string::npos);

    ctx.d_semantic = "**a**: Represents count.";
    ctx.d_topic = "Counting Things";
    const auto full = build_ufd_prompt(ctx, templates);
    CHECK(full.find("semantic profile of the dataset columns is as follows: **a**: Represents count.") !=
          std::string::npos);
    CHECK(full.find("the dataset topic is: Counting Things") != std::string::npos);
}

TEST_CASE("sfd prompt fills topic, initial description and structure") {
    const auto templates = PromptTemplates::builtin();
    const auto prompt = build_sfd_prompt("Wind Data", "Initial text.", templates);
    CHECK(prompt.find("about the topic Wind Data") != std::string::npos);
    CHECK(prompt.find("initial description: Initial text.") != std::string::npos);
    CHECK(prompt.find("Dataset Overview:") != std::string::npos);
    CHECK(prompt.find("{Template}") == std::string::npos);
}

TEST_CASE("sfd structure check") {
    CHECK(count_sfd_sections(kGoodSfd) == 3);
    CHECK(sfd_structure_ok(kGoodSfd));
    CHECK(count_sfd_sections("dataset overview: ... related topics: ... key themes or topics:") == 1);
    CHECK_FALSE(sfd_structure_ok("Key Themes or Topics:\nApplications and Use Cases:\nConcepts and Synonyms:\n"));
    CHECK_FALSE(sfd_structure_ok("Dataset Overview:\nplain text"));
}

TEST_CASE("sfd re-prompts once and then accepts with a warning") {
    std::vector<std::string> prompts;
    std::mutex m;
    auto provider = std::make_shared<MockProvider>(MockProvider::Responder([&](const CompletionRequest& r) {
        std::lock_guard lock(m);
        prompts.push_back(r.user_prompt);
        return ProviderReply{"unstructured words", {}, {}, {}};
    }));
    Gateway gateway(provider, no_sleep());
    const auto record = generate_sfd({"Topic"}, "init", gateway);
    CHECK(prompts.size() == 2);
    CHECK(prompts[1].find(PromptTemplates::builtin().get("sfd_reminder").substr(0, 30)) != std::string::npos);
    CHECK(record.warnings.size() == 1);
    CHECK(record.calls == 2);
    CHECK(record.mode == DescriptionMode::SFD);
    CHECK(record.initial_description == "init");
}

TEST_CASE("sfd accepts a structured reply at once") {
    auto provider = std::make_shared<MockProvider>(
        MockProvider::Responder([](const CompletionRequest&) { return ProviderReply{kGoodSfd, {}, {}, {}}; }));
    Gateway gateway(provider, no_sleep());
    const auto record = generate_sfd({"Topic"}, "init", gateway);
    CHECK(record.calls == 1);
    CHECK(record.warnings.empty());
}

TEST_CASE("ufd failure surfaces as GenerationError") {
    auto provider = std::make_shared<MockProvider>(MockProvider::Responder(
        [](const CompletionRequest&) -> ProviderReply { throw TransportError("down"); }));
    Gateway gateway(provider, no_sleep(0));
    CHECK_THROWS_AS(generate_ufd({"s", "p", std::nullopt, std::nullopt}, gateway), GenerationError);
}

TEST_CASE("pipeline call counts follow the configuration") {
    const auto table = wind_table();
    struct Case {
        bool sp, sfd;
        ExecMode mode;
        std::size_t expected_calls, expected_records;
    };
    // Four columns: per-column modes issue 4 semantic calls, grouped(8) one.
    const std::vector<Case> cases{{false, false, ExecMode::Concurrent, 1, 1}, {true, false, ExecMode::Concurrent, 6, 1},
                                  {false, true, ExecMode::Concurrent, 2, 2},  {true, true, ExecMode::Concurrent, 7, 2},
                                  {true, true, ExecMode::Grouped, 4, 2},      {true, true, ExecMode::Sequential, 7, 2}};
    for (const auto& c : cases) {
        CAPTURE(c.sp);
        CAPTURE(c.sfd);
        auto gateway = corpus_gateway();
        PipelineOptions options;
        options.flags.sp = c.sp;
        options.flags.sfd = c.sfd;
        options.flags.exec.mode = c.mode;
        options.seed = 7;
        const auto result = run_pipeline(table, gateway, options);
        CHECK(gateway.ledger().total().calls == c.expected_calls);
        CHECK(result.records.size() == c.expected_records);
        CHECK(result.errors.empty());
        CHECK(result.semantic.has_value() == c.sp);
        CHECK(result.context.d_semantic.has_value() == c.sp);
        CHECK(result.context.d_topic.has_value() == c.sp);
        if (c.sfd) {
            const auto& sfd_prompt = result.records.back().prompt;
            const std::string topic = c.sp ? "Wind Measurements" : "Wind Measurements 2003";
            CHECK(sfd_prompt.find("about the topic " + topic + ",") != std::string::npos);
        }
        if (c.sp) {
            REQUIRE(result.topic);
            CHECK(result.topic->topic == "Wind Measurements");
        }
    }
}

TEST_CASE("pipeline writes per-dataset artifacts") {
    testing::ScratchDir dir("datadesc-pipeline");
    auto gateway = corpus_gateway();
    PipelineOptions options;
    options.artifacts_dir = dir.path();
    const auto result = run_pipeline(wind_table(), gateway, options);
    REQUIRE(result.records.size() == 2);
    const auto base = dir.path() / "wind_measurements";
    for (const char* name : {"content_profile.json", "content_summary.txt", "semantic_summary.json", "topic.json",
                             "ufd.json", "sfd.json", "warnings.json", "cost.csv"}) {
        CAPTURE(name);
        CHECK(std::filesystem::exists(base / name));
    }
    CHECK(read_file(base / "content_summary.txt") ==
          read_file(testing::fixtures() / "golden" / "wind_measurements_summary.txt"));
    const auto ufd = nlohmann::json::parse(read_file(base / "ufd.json"));
    CHECK(ufd["text"].get<std::string>().find("wind speed and direction measurements") != std::string::npos);
    const auto sfd = nlohmann::json::parse(read_file(base / "sfd.json"));
    CHECK(sfd["initial_description"] == ufd["text"]);
}

TEST_CASE("a failing ufd stage costs the dataset its records") {
    auto provider = std::make_shared<MockProvider>(MockProvider::Responder([](const CompletionRequest& r) -> ProviderReply {
        if (r.tag == Stage::Ufd) throw TransportError("down");
        return ProviderReply{"Topic Words", {}, {}, {}};
    }));
    Gateway gateway(provider, no_sleep(0));
    PipelineOptions options;
    options.flags.sp = false;
    const auto result = run_pipeline(ingest_csv_text("a\n1\n", "t", "T"), gateway, options);
    CHECK(result.records.empty());
    CHECK(result.errors.size() == 1);
    CHECK(gateway.events().count("dataset_failed") == 1);
}

TEST_CASE("jsonl record shape") {
    DescriptionRecord record;
    record.dataset_id = "d";
    record.mode = DescriptionMode::SFD;
    record.text = "t";
    record.input_tokens = 3;
    record.output_tokens = 4;
    const auto j = description_record_to_jsonl(record);
    CHECK(j["dataset_id"] == "d");
    CHECK(j["mode"] == "SFD");
    CHECK(j["text"] == "t");
    CHECK(j["tokens_in"] == 3);
    CHECK(j["tokens_out"] == 4);
    CHECK(j.contains("config"));
    CHECK(description_mode_from_string("UFD") == DescriptionMode::UFD);
}

TEST_CASE("config keys separate ablations and execution modes") {
    PipelineOptions options;
    DescriptionConfig full{true, true, ExecMode::Sequential, "m"};
    DescriptionConfig nosp{false, true, ExecMode::Sequential, "m"};
    DescriptionConfig grouped{true, true, ExecMode::Grouped, "m"};
    const auto a = config_key(full, options);
    CHECK(a == config_key(full, options));
    CHECK(a != config_key(nosp, options));
    CHECK(a != config_key(grouped, options));
    options.seed = 99;
    CHECK(a != config_key(full, options));
}
