#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "datadesc/llm.hpp"

namespace datadesc {

/// Canned responses for offline runs, loaded from JSON:
///
///   {
///     "latency_ms": 0,
///     "responses": [
///       {"tag": "topic", "contains": "Health", "text": "Health Insurance Finance"},
///       {"tag": "ufd", "prompt_hash": "9f0c...", "texts": ["not json", "{...}"]},
///       {"tag": "ufd", "fail_times": 2, "text": "..."}
///     ],
///     "semantic_columns": {"Year": {"Temporal": {...}, ...}},
///     "fallback": {"ufd": "Description {prompt_hash}.", "default": "..."}
///   }
///
/// A rule matches when its optional tag, prompt_hash (stable_hash_hex of
/// the user prompt) and contains (substring of the user prompt) all match.
/// "texts" are returned in call order, the last one repeating; "fail_times"
/// makes the first N calls fail with a transport error. Semantic-profile
/// prompts without a matching rule are answered per column from
/// "semantic_columns", as an array when the prompt lists several columns.
struct MockRule {
    std::optional<Stage> tag;
    std::optional<std::string> prompt_hash;
    std::optional<std::string> contains;
    std::vector<std::string> texts;
    std::size_t fail_times = 0;
};

struct MockScript {
    double latency_ms = 0;
    std::vector<MockRule> rules;
    std::map<std::string, nlohmann::json> semantic_columns;
    std::map<std::string, std::string> fallback;  // keyed by stage tag or "default"

    static MockScript from_json(const nlohmann::json& j);
    static MockScript load(const std::filesystem::path& path);
};

class MockProvider final : public Provider {
public:
    using Responder = std::function<ProviderReply(const CompletionRequest&)>;

    explicit MockProvider(MockScript script, std::string model = "mock");
    /// Fully programmable mock; the responder may throw TransportError.
    explicit MockProvider(Responder responder, std::string model = "mock");

    ProviderReply send(const CompletionRequest& request) override;
    std::string model_name() const override { return model_; }

    std::size_t calls() const;

private:
    std::string respond_from_script(const CompletionRequest& request);

    std::optional<MockScript> script_;
    Responder responder_;
    std::string model_;
    mutable std::mutex mutex_;
    std::vector<std::size_t> rule_calls_;
    std::size_t calls_ = 0;
};

/// Column names listed in a semantic-profile prompt ("- Column name: X").
std::vector<std::string> mock_prompt_columns(const std::string& prompt);

}  // namespace datadesc
