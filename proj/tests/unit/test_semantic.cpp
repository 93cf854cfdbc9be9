#include <doctest.h>

#include "datadesc/error.hpp"
#include "datadesc/mock_provider.hpp"
#include "datadesc/semantic_profile.hpp"
#include "test_support.hpp"

using namespace datadesc;

namespace {

RetryPolicy no_sleep() {
    RetryPolicy policy;
    policy.sleep = [](std::chrono::milliseconds) {};
    return policy;
}

Gateway corpus_gateway() {
    return Gateway(std::make_shared<MockProvider>(MockScript::load(testing::fixtures() / "mock" / "corpus_mock.json")),
                   no_sleep());
}

TableHandle health_table() {
    return ingest_csv(testing::fixtures() / "corpus" / "health_insurance.csv", "health_insurance",
                      "Health Insurance Dataset");
}

}  // namespace

TEST_CASE("serialization of a temporal aggregation-key column") {
    SemanticColumnProfile p;
    p.column_name = "Year";
    p.temporal = {true, "Year"};
    p.entity_type = "Temporal Entity";
    p.data_format = "YYYY";
    p.domain_specific_types = "General";
    p.usage_context = "Aggregation Key";
    CHECK(serialize_column_profile(p) ==
          "**Year**: Represents temporal entity. Contains temporal data (resolution: Year). "
          "Domain-specific type: general. Function/Usage Context: Aggregation Key.");
}

TEST_CASE("empty categories drop their sentences") {
    SemanticColumnProfile p;
    p.column_name = "x";
    CHECK(serialize_column_profile(p) == "**x**:");
    p.spatial = {true, ""};
    CHECK(serialize_column_profile(p) == "**x**: Contains spatial data.");
}

TEST_CASE("model json parsing tolerates fences and rejects garbage") {
    CHECK(parse_model_json("```json\n{\"a\": 1}\n```")["a"] == 1);
    CHECK(parse_model_json("  [1, 2] ").size() == 2);
    CHECK_THROWS_AS(parse_model_json("not json"), SemanticParseError);
}

TEST_CASE("profile parsing accepts loose key spellings and drops stray resolutions") {
    const auto j = nlohmann::json::parse(R"({
        "temporal": {"isTemporal": "No", "resolution": "Day"},
        "Spatial": {"isSpatial": "yes", "resolution": "City"},
        "entity type": ["Place", "Name"],
        "Function/Usage Context": "Identifier"
    })");
    const auto p = semantic_profile_from_json("loc", j);
    CHECK_FALSE(p.temporal.is_temporal);
    CHECK(p.temporal.resolution.empty());
    CHECK(p.spatial.is_spatial);
    CHECK(p.spatial.resolution == "City");
    CHECK(p.entity_type.find("Place") != std::string::npos);
    CHECK(p.usage_context == "Identifier");
    CHECK_THROWS_AS(semantic_profile_from_json("x", nlohmann::json::array()), SemanticParseError);
    CHECK(semantic_profile_from_json("loc", semantic_profile_to_json(p)) == p);
}

TEST_CASE("invalid replies are repaired up to json_retries times") {
    std::atomic<int> calls{0};
    auto provider = std::make_shared<MockProvider>(MockProvider::Responder([&](const CompletionRequest& r) {
        if (calls++ == 0) return ProviderReply{"sorry, no json", {}, {}, {}};
        CHECK(r.user_prompt.find("Column name: c") != std::string::npos);
        return ProviderReply{R"({"Entity Type": "Count"})", {}, {}, {}};
    }));
    Gateway gateway(provider, no_sleep());
    const auto p = profile_column("c", {"1", "2"}, gateway);
    CHECK(p.entity_type == "Count");
    CHECK(calls == 2);
    CHECK(gateway.events().count("semantic_parse_retry") == 1);
}

TEST_CASE("a column that never parses degrades with a warning") {
    auto provider = std::make_shared<MockProvider>(
        MockProvider::Responder([](const CompletionRequest&) { return ProviderReply{"nope", {}, {}, {}}; }));
    Gateway gateway(provider, no_sleep());
    const auto table = ingest_csv_text("a,b\n1,2\n", "t", "T");
    SemanticOptions options;
    options.json_retries = 1;
    const auto summary = profile_dataset(table, gateway, options);
    CHECK(summary.profiles.size() == 2);
    CHECK(summary.warnings.size() == 2);
    CHECK(summary.column_summaries[0] == "**a**:");
    CHECK(gateway.ledger().total().calls == 4);
}

TEST_CASE("execution modes agree on the six-column fixture") {
    const auto table = health_table();
    std::vector<std::string> combined;
    std::vector<std::size_t> calls;
    for (auto mode : {ExecMode::Sequential, ExecMode::Concurrent, ExecMode::Grouped}) {
        auto gateway = corpus_gateway();
        SemanticOptions options;
        options.exec.mode = mode;
        options.exec.workers = 64;
        options.exec.batch_size = 8;
        options.seed = 3;
        options.dataset_id = "health_insurance";
        combined.push_back(profile_dataset(table, gateway, options).combined);
        calls.push_back(gateway.events().count("completion", Stage::SemanticProfile));
    }
    CHECK(combined[0] == combined[1]);
    CHECK(combined[0] == combined[2]);
    CHECK(calls == std::vector<std::size_t>{6, 6, 1});
    CHECK(combined[0].rfind("**Year**: Represents temporal entity.", 0) == 0);
}

TEST_CASE("grouped mode splits into batches") {
    const auto table = health_table();
    auto gateway = corpus_gateway();
    SemanticOptions options;
    options.exec.mode = ExecMode::Grouped;
    options.exec.batch_size = 4;
    profile_dataset(table, gateway, options);
    CHECK(gateway.events().count("completion", Stage::SemanticProfile) == 2);
}

TEST_CASE("exec mode names") {
    CHECK(exec_mode_from_string("seq") == ExecMode::Sequential);
    CHECK(exec_mode_from_string("mt") == ExecMode::Concurrent);
    CHECK(exec_mode_from_string("grouped") == ExecMode::Grouped);
    CHECK_THROWS(exec_mode_from_string("fast"));
}

TEST_CASE("topic normalisation") {
    CHECK(normalize_topic("\"Wind Measurements\"") == "Wind Measurements");
    CHECK(normalize_topic("Topic: \"Wind Measurements\"") == "Wind Measurements");
    CHECK(normalize_topic("\n  Health Insurance Finance Data.\nmore") == "Health Insurance Finance");
    CHECK(normalize_topic("!!!") == "");
}

TEST_CASE("topic falls back to the title when the provider fails") {
    auto provider = std::make_shared<MockProvider>(MockProvider::Responder(
        [](const CompletionRequest&) -> ProviderReply { throw TransportError("down"); }));
    RetryPolicy policy = no_sleep();
    policy.max_retries = 0;
    Gateway gateway(provider, policy);
    std::vector<std::string> warnings;
    const auto topic = generate_topic("Global Shipping Routes Index", std::nullopt, "a,b", gateway, {}, &warnings);
    CHECK(topic.topic == "Global Shipping Routes");
    CHECK(warnings.size() == 1);
}

TEST_CASE("topic prompt includes the original description only when present") {
    const auto templates = PromptTemplates::builtin();
    const auto with = build_topic_prompt(templates, "T", std::string("orig"), "s");
    const auto without = build_topic_prompt(templates, "T", std::nullopt, "s");
    CHECK(with.find("Original Description: orig") != std::string::npos);
    CHECK(without.find("Original Description") == std::string::npos);
    CHECK(without.find("- Title: T") != std::string::npos);
}
