#include <doctest.h>

#include <atomic>

#include "datadesc/error.hpp"
#include "datadesc/llm.hpp"
#include "datadesc/mock_provider.hpp"
#include "datadesc/templates.hpp"
#include "datadesc/util.hpp"

using namespace datadesc;

namespace {

RetryPolicy no_sleep(int retries = 3) {
    RetryPolicy policy;
    policy.max_retries = retries;
    policy.sleep = [](std::chrono::milliseconds) {};
    return policy;
}

CompletionRequest request(std::string prompt, Stage tag = Stage::Ufd, std::string dataset = "d", std::size_t item = 0) {
    CompletionRequest r;
    r.user_prompt = std::move(prompt);
    r.tag = tag;
    r.dataset_id = std::move(dataset);
    r.item = item;
    return r;
}

}  // namespace

TEST_CASE("approximate tokenizer is ceil(chars / 4) over code points") {
    ApproximateTokenizer t;
    CHECK(t.count("") == 0);
    CHECK(t.count("abc") == 1);
    CHECK(t.count("abcd") == 1);
    CHECK(t.count("abcde") == 2);
    CHECK(t.count("\xC3\xA9\xC3\xA9\xC3\xA9\xC3\xA9") == 1);
}

TEST_CASE("gateway counts tokens on both sides when the provider is silent") {
    auto provider = std::make_shared<MockProvider>(
        MockProvider::Responder([](const CompletionRequest&) { return ProviderReply{"12345678", {}, {}, {}}; }));
    Gateway gateway(provider, no_sleep());
    auto r = request("abcdefgh");
    r.system_instructions = "abcd";
    const auto result = gateway.complete(r);
    CHECK(result.input_tokens == 3);
    CHECK(result.output_tokens == 2);
    CHECK(gateway.ledger().total().calls == 1);
    CHECK(gateway.events().count("completion", Stage::Ufd) == 1);
}

TEST_CASE("gateway prefers provider-reported usage") {
    auto provider = std::make_shared<MockProvider>(
        MockProvider::Responder([](const CompletionRequest&) { return ProviderReply{"x", 11, 22, 5.0}; }));
    Gateway gateway(provider, no_sleep());
    const auto result = gateway.complete(request("prompt"));
    CHECK(result.input_tokens == 11);
    CHECK(result.output_tokens == 22);
}

TEST_CASE("gateway retries transport errors with exponential backoff") {
    std::atomic<int> calls{0};
    auto provider = std::make_shared<MockProvider>(MockProvider::Responder([&](const CompletionRequest&) {
        if (calls++ < 2) throw TransportError("boom");
        return ProviderReply{"ok", {}, {}, {}};
    }));
    std::vector<long> sleeps;
    RetryPolicy policy;
    policy.max_retries = 3;
    policy.backoff_base = std::chrono::milliseconds(100);
    policy.sleep = [&](std::chrono::milliseconds d) { sleeps.push_back(static_cast<long>(d.count())); };
    Gateway gateway(provider, policy);
    const auto result = gateway.complete(request("p"));
    CHECK(result.text == "ok");
    CHECK(result.attempts == 3);
    CHECK(sleeps == std::vector<long>{100, 200});
    CHECK(gateway.events().count("completion_attempt_failed") == 2);
}

TEST_CASE("gateway gives up after max_retries + 1 attempts") {
    std::atomic<int> calls{0};
    auto provider = std::make_shared<MockProvider>(MockProvider::Responder([&](const CompletionRequest&) -> ProviderReply {
        ++calls;
        throw TransportError("down");
    }));
    Gateway gateway(provider, no_sleep(3));
    CHECK_THROWS_AS(gateway.complete(request("p")), ProviderUnavailable);
    CHECK(calls == 4);
    CHECK(gateway.events().count("completion_failed") == 1);
    CHECK(gateway.ledger().total().calls == 0);
}

TEST_CASE("cost ledger keeps a canonical order regardless of append order") {
    CostLedger a, b;
    const std::vector<CostEntry> entries{
        {Stage::Ufd, "y", 0, 0, 5, 1, 0}, {Stage::SemanticProfile, "x", 1, 0, 3, 1, 0},
        {Stage::SemanticProfile, "x", 0, 0, 2, 1, 0}, {Stage::Topic, "x", 0, 0, 4, 1, 0}};
    for (const auto& e : entries) a.append(e);
    for (auto it = entries.rbegin(); it != entries.rend(); ++it) b.append(*it);
    CHECK(a.to_csv() == b.to_csv());
    const auto ordered = a.entries();
    CHECK(ordered[0].dataset_id == "x");
    CHECK(ordered[0].tag == Stage::SemanticProfile);
    CHECK(ordered[0].item == 0);
    CHECK(ordered[3].dataset_id == "y");
    CHECK(a.slice("x").total().input_tokens == 9);
    CHECK(a.totals_by_stage().at(Stage::SemanticProfile).calls == 2);
    CHECK(a.to_csv().rfind("tag,input_tokens,output_tokens,latency_ms\n", 0) == 0);
}

TEST_CASE("stage names round-trip") {
    for (auto stage : {Stage::SemanticProfile, Stage::Topic, Stage::Ufd, Stage::Sfd, Stage::JudgePointwise,
                       Stage::JudgePairwise}) {
        CHECK(stage_from_string(to_string(stage)) == stage);
    }
    CHECK_THROWS(stage_from_string("nope"));
}

TEST_CASE("mock script rules match by tag, substring and prompt hash") {
    const auto script = MockScript::from_json(nlohmann::json::parse(R"({
        "responses": [
            {"tag": "topic", "contains": "wind", "text": "Wind Data"},
            {"tag": "ufd", "prompt_hash": ")" + stable_hash_hex("exact prompt") + R"(", "texts": ["first", "second"]},
            {"tag": "sfd", "fail_times": 1, "text": "after failure"}
        ],
        "fallback": {"default": "fallback {prompt_hash}"}
    })"));
    auto provider = std::make_shared<MockProvider>(script);
    Gateway gateway(provider, no_sleep());
    CHECK(gateway.complete(request("about wind", Stage::Topic)).text == "Wind Data");
    CHECK(gateway.complete(request("exact prompt")).text == "first");
    CHECK(gateway.complete(request("exact prompt")).text == "second");
    CHECK(gateway.complete(request("exact prompt")).text == "second");
    const auto sfd = gateway.complete(request("anything", Stage::Sfd));
    CHECK(sfd.text == "after failure");
    CHECK(sfd.attempts == 2);
    CHECK(gateway.complete(request("other")).text == "fallback " + stable_hash_hex("other"));
}

TEST_CASE("mock answers semantic prompts per column") {
    const auto script = MockScript::from_json(nlohmann::json::parse(R"({
        "semantic_columns": {"a": {"Entity Type": "A"}, "b": {"Entity Type": "B"}}
    })"));
    auto provider = std::make_shared<MockProvider>(script);
    Gateway gateway(provider, no_sleep());
    const auto one = nlohmann::json::parse(
        gateway.complete(request("- Column name: a\n- Sample values: 1\n", Stage::SemanticProfile)).text);
    CHECK(one.is_object());
    CHECK(one["Entity Type"] == "A");
    const auto two = nlohmann::json::parse(
        gateway.complete(request("- Column name: b\n- Sample values: 1\n- Column name: a\n- Sample values: 2\n",
                                 Stage::SemanticProfile))
            .text);
    REQUIRE(two.is_array());
    CHECK(two[0]["Entity Type"] == "B");
    CHECK(two[1]["Entity Type"] == "A");
    CHECK(mock_prompt_columns("- Column name: x\nfoo\n- Column name: y z\n") == std::vector<std::string>{"x", "y z"});
}

TEST_CASE("remote provider requires its credential before any traffic") {
    ProviderConfig config;
    config.kind = ProviderConfig::Kind::Remote;
    config.endpoint = "https://llm.invalid/v1/chat/completions";
    config.credential_env = "DATADESC_UNIT_SURELY_UNSET_KEY";
    CHECK_THROWS_AS(make_provider(config), ConfigError);
}

TEST_CASE("template rendering") {
    const TemplateVars vars{{"a", "1"}, {"b", std::nullopt}, {"c", "{a}"}};
    CHECK(render_template("x={a}", vars) == "x=1");
    CHECK(render_template("{?a}has {a}{/a}{?b}has b{/b}.", vars) == "has 1.");
    CHECK(render_template("[{b}]", vars) == "[]");
    CHECK(render_template("{c}", vars) == "{a}");
    CHECK(render_template("{\"json\": 1} {unknown}", vars) == "{\"json\": 1} {unknown}");
    CHECK(template_placeholders("{x} {?y}{z}{/y} {x}") == std::vector<std::string>{"x", "y", "z"});
}

TEST_CASE("builtin templates can be overridden from a directory") {
    const auto builtin = PromptTemplates::builtin();
    for (const char* name : {"ufd", "sfd", "topic", "judge_pointwise", "judge_pairwise", "semantic_instructions"}) {
        CHECK_FALSE(builtin.get(name).empty());
    }
    const auto from_dir = PromptTemplates::from_directory(DATADESC_TEMPLATES_DIR);
    CHECK(from_dir.get("ufd") == builtin.get("ufd"));
}
