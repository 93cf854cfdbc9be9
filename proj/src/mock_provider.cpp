#include "datadesc/mock_provider.hpp"

#include <fmt/format.h>

#include "datadesc/error.hpp"
#include "datadesc/templates.hpp"
#include "datadesc/util.hpp"

namespace datadesc {

namespace {

const nlohmann::json& empty_semantic_object() {
    static const nlohmann::json object = nlohmann::json::parse(R"({
        "Temporal": {"isTemporal": false, "resolution": ""},
        "Spatial": {"isSpatial": false, "resolution": ""},
        "Entity Type": "",
        "Data Format": "",
        "Domain-Specific Types": "",
        "Function/Usage Context": ""})");
    return object;
}

const std::map<std::string, std::string>& default_fallbacks() {
    static const std::map<std::string, std::string> table{
        {"topic", "General Dataset"},
        {"ufd", "This dataset is summarised by a mock description generated for prompt {prompt_hash}."},
        {"sfd",
         "Dataset Overview: Mock expansion for prompt {prompt_hash}.\n"
         "Key Themes or Topics:\n- mock theme\n"
         "Applications and Use Cases:\n- mock application\n"
         "Concepts and Synonyms:\n- mock concept\n"
         "Keywords and Themes:\n- mock keyword\n"
         "Additional Context:\n- mock context"},
        {"judge-pointwise", "Completeness: 5, Conciseness: 5, Readability: 5"},
        {"judge-pairwise", "Completeness: A, Conciseness: A, Readability: A"},
        {"default", "mock response {prompt_hash}"},
    };
    return table;
}

}  // namespace

std::vector<std::string> mock_prompt_columns(const std::string& prompt) {
    static constexpr std::string_view kMarker = "- Column name: ";
    std::vector<std::string> names;
    for (const auto& line : split(prompt, '\n')) {
        const auto pos = line.find(kMarker);
        if (pos != std::string::npos) names.push_back(line.substr(pos + kMarker.size()));
    }
    return names;
}

MockScript MockScript::from_json(const nlohmann::json& j) {
    MockScript script;
    try {
        script.latency_ms = j.value("latency_ms", 0.0);
        const auto responses = j.value("responses", nlohmann::json::array());
        for (const auto& r : responses) {
            MockRule rule;
            if (r.contains("tag")) rule.tag = stage_from_string(r.at("tag").get<std::string>());
            if (r.contains("prompt_hash")) rule.prompt_hash = r.at("prompt_hash").get<std::string>();
            if (r.contains("contains")) rule.contains = r.at("contains").get<std::string>();
            if (r.contains("texts")) rule.texts = r.at("texts").get<std::vector<std::string>>();
            if (r.contains("text")) rule.texts.push_back(r.at("text").get<std::string>());
            rule.fail_times = r.value("fail_times", std::size_t{0});
            if (rule.texts.empty()) throw ConfigError("mock rule without text");
            script.rules.push_back(std::move(rule));
        }
        const auto columns = j.value("semantic_columns", nlohmann::json::object());
        for (const auto& [name, object] : columns.items()) {
            script.semantic_columns[name] = object;
        }
        const auto fallback = j.value("fallback", nlohmann::json::object());
        for (const auto& [tag, text] : fallback.items()) {
            script.fallback[tag] = text.get<std::string>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("mock script: ") + e.what());
    }
    return script;
}

MockScript MockScript::load(const std::filesystem::path& path) {
    try {
        return from_json(nlohmann::json::parse(read_file(path)));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(fmt::format("mock script {}: {}", path.string(), e.what()));
    } catch (const IoError& e) {
        throw ConfigError(e.what());
    }
}

MockProvider::MockProvider(MockScript script, std::string model)
    : script_(std::move(script)), model_(std::move(model)) {
    rule_calls_.assign(script_->rules.size(), 0);
}

MockProvider::MockProvider(Responder responder, std::string model)
    : responder_(std::move(responder)), model_(std::move(model)) {}

std::size_t MockProvider::calls() const {
    std::lock_guard lock(mutex_);
    return calls_;
}

ProviderReply MockProvider::send(const CompletionRequest& request) {
    {
        std::lock_guard lock(mutex_);
        ++calls_;
    }
    if (responder_) return responder_(request);
    ProviderReply reply;
    reply.text = respond_from_script(request);
    reply.latency_ms = script_->latency_ms;
    return reply;
}

std::string MockProvider::respond_from_script(const CompletionRequest& request) {
    const auto& script = *script_;
    const auto hash = stable_hash_hex(request.user_prompt);
    for (std::size_t i = 0; i < script.rules.size(); ++i) {
        const auto& rule = script.rules[i];
        if (rule.tag && *rule.tag != request.tag) continue;
        if (rule.prompt_hash && *rule.prompt_hash != hash) continue;
        if (rule.contains && request.user_prompt.find(*rule.contains) == std::string::npos) continue;
        std::size_t call = 0;
        {
            std::lock_guard lock(mutex_);
            call = rule_calls_[i]++;
        }
        if (call < rule.fail_times) throw TransportError(fmt::format("scripted failure {} of {}", call + 1, rule.fail_times));
        const auto index = std::min(call - rule.fail_times, rule.texts.size() - 1);
        return rule.texts[index];
    }

    if (request.tag == Stage::SemanticProfile) {
        const auto columns = mock_prompt_columns(request.user_prompt);
        auto object_for = [&](const std::string& name) {
            auto it = script.semantic_columns.find(name);
            return it != script.semantic_columns.end() ? it->second : empty_semantic_object();
        };
        if (columns.size() == 1) return object_for(columns.front()).dump();
        if (columns.size() > 1) {
            auto array = nlohmann::json::array();
            for (const auto& name : columns) array.push_back(object_for(name));
            return array.dump();
        }
    }

    const std::string tag(to_string(request.tag));
    std::string text;
    if (auto it = script.fallback.find(tag); it != script.fallback.end()) {
        text = it->second;
    } else if (auto it2 = script.fallback.find("default"); it2 != script.fallback.end()) {
        text = it2->second;
    } else if (auto it3 = default_fallbacks().find(tag); it3 != default_fallbacks().end()) {
        text = it3->second;
    } else {
        text = default_fallbacks().at("default");
    }
    return render_template(text, {{"prompt_hash", hash}, {"tag", tag}});
}

}  // namespace datadesc
