#include "datadesc/llm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <thread>

#include <fmt/format.h>

#include "datadesc/error.hpp"
#include "datadesc/mock_provider.hpp"
#include "datadesc/remote_provider.hpp"
#include "datadesc/util.hpp"

namespace datadesc {

std::string_view to_string(Stage stage) noexcept {
    switch (stage) {
        case Stage::ContentProfileNone: return "content-profile-none";
        case Stage::SemanticProfile: return "semantic-profile";
        case Stage::Topic: return "topic";
        case Stage::Ufd: return "ufd";
        case Stage::Sfd: return "sfd";
        case Stage::JudgePointwise: return "judge-pointwise";
        case Stage::JudgePairwise: return "judge-pairwise";
    }
    return "ufd";
}

Stage stage_from_string(std::string_view name) {
    for (auto s : {Stage::ContentProfileNone, Stage::SemanticProfile, Stage::Topic, Stage::Ufd, Stage::Sfd,
                   Stage::JudgePointwise, Stage::JudgePairwise}) {
        if (to_string(s) == name) return s;
    }
    throw ConfigError(fmt::format("unknown stage tag '{}'", name));
}

std::size_t ApproximateTokenizer::count(std::string_view text) const {
    std::size_t chars = 0;
    for (unsigned char c : text) {
        if ((c & 0xC0) != 0x80) ++chars;
    }
    return (chars + 3) / 4;
}

std::size_t count_tokens(std::string_view text) { return ApproximateTokenizer{}.count(text); }

CostTotals& CostTotals::operator+=(const CostTotals& other) {
    calls += other.calls;
    input_tokens += other.input_tokens;
    output_tokens += other.output_tokens;
    latency_ms += other.latency_ms;
    return *this;
}

namespace {

CostTotals totals_of(const CostEntry& e) { return {1, e.input_tokens, e.output_tokens, e.latency_ms}; }

auto canonical_key(const CostEntry& e) { return std::tie(e.dataset_id, e.tag, e.item, e.sequence); }

}  // namespace

CostLedger::CostLedger(const CostLedger& other) {
    std::lock_guard lock(other.mutex_);
    entries_ = other.entries_;
    next_sequence_ = other.next_sequence_;
}

CostLedger& CostLedger::operator=(const CostLedger& other) {
    if (this == &other) return *this;
    std::scoped_lock lock(mutex_, other.mutex_);
    entries_ = other.entries_;
    next_sequence_ = other.next_sequence_;
    return *this;
}

void CostLedger::append(CostEntry entry) {
    std::lock_guard lock(mutex_);
    entry.sequence = next_sequence_[{entry.dataset_id, entry.tag, entry.item}]++;
    auto pos = std::upper_bound(entries_.begin(), entries_.end(), entry,
                                [](const CostEntry& a, const CostEntry& b) { return canonical_key(a) < canonical_key(b); });
    entries_.insert(pos, std::move(entry));
}

std::vector<CostEntry> CostLedger::entries() const {
    std::lock_guard lock(mutex_);
    return entries_;
}

std::map<Stage, CostTotals> CostLedger::totals_by_stage() const {
    std::lock_guard lock(mutex_);
    std::map<Stage, CostTotals> totals;
    for (const auto& e : entries_) totals[e.tag] += totals_of(e);
    return totals;
}

CostTotals CostLedger::total() const {
    std::lock_guard lock(mutex_);
    CostTotals t;
    for (const auto& e : entries_) t += totals_of(e);
    return t;
}

CostLedger CostLedger::slice(std::string_view dataset_id) const {
    std::lock_guard lock(mutex_);
    CostLedger out;
    for (const auto& e : entries_) {
        if (e.dataset_id != dataset_id) continue;
        out.entries_.push_back(e);
        auto& next = out.next_sequence_[{e.dataset_id, e.tag, e.item}];
        next = std::max(next, e.sequence + 1);
    }
    return out;
}

std::string CostLedger::to_csv() const {
    std::lock_guard lock(mutex_);
    std::string out = "tag,input_tokens,output_tokens,latency_ms\n";
    for (const auto& e : entries_) {
        out += fmt::format("{},{},{},{}\n", to_string(e.tag), e.input_tokens, e.output_tokens,
                           format_float(e.latency_ms));
    }
    return out;
}

void CostLedger::clear() {
    std::lock_guard lock(mutex_);
    entries_.clear();
    next_sequence_.clear();
}

void EventLog::record(nlohmann::json event) {
    std::lock_guard lock(mutex_);
    events_.push_back(std::move(event));
}

std::vector<nlohmann::json> EventLog::events() const {
    std::lock_guard lock(mutex_);
    return events_;
}

std::size_t EventLog::count(std::string_view event, std::optional<Stage> tag) const {
    std::lock_guard lock(mutex_);
    return static_cast<std::size_t>(std::count_if(events_.begin(), events_.end(), [&](const nlohmann::json& e) {
        if (e.value("event", std::string{}) != event) return false;
        return !tag || e.value("tag", std::string{}) == to_string(*tag);
    }));
}

std::string EventLog::to_jsonl() const {
    std::lock_guard lock(mutex_);
    std::string out;
    for (const auto& e : events_) out += e.dump() + "\n";
    return out;
}

void EventLog::clear() {
    std::lock_guard lock(mutex_);
    events_.clear();
}

Gateway::Gateway(std::shared_ptr<Provider> provider, RetryPolicy retry, std::shared_ptr<const Tokenizer> tokenizer)
    : provider_(std::move(provider)),
      retry_(std::move(retry)),
      tokenizer_(tokenizer ? std::move(tokenizer) : std::make_shared<ApproximateTokenizer>()),
      ledger_(std::make_shared<CostLedger>()),
      events_(std::make_shared<EventLog>()) {
    if (!provider_) throw ConfigError("gateway needs a provider");
    if (!retry_.sleep) retry_.sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

CompletionResult Gateway::complete(const CompletionRequest& request) const {
    if (request.user_prompt.empty()) throw ContractViolation("completion request with empty user prompt");
    const int max_attempts = 1 + std::max(0, retry_.max_retries);
    std::string last_cause;
    for (int attempt = 1; attempt <= max_attempts; ++attempt) {
        const auto started = std::chrono::steady_clock::now();
        try {
            auto reply = provider_->send(request);
            if (trim(reply.text).empty()) throw TransportError("empty response");
            const double wall_ms =
                std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();

            CompletionResult result;
            result.attempts = attempt;
            result.input_tokens = reply.input_tokens.value_or(tokenizer_->count(request.system_instructions) +
                                                              tokenizer_->count(request.user_prompt));
            result.output_tokens = reply.output_tokens.value_or(tokenizer_->count(reply.text));
            result.latency_ms = reply.latency_ms.value_or(wall_ms);
            result.text = std::move(reply.text);

            ledger_->append({request.tag, request.dataset_id, request.item, 0, result.input_tokens,
                             result.output_tokens, result.latency_ms});
            events_->record({{"event", "completion"},
                             {"tag", to_string(request.tag)},
                             {"dataset_id", request.dataset_id},
                             {"item", request.item},
                             {"attempts", attempt},
                             {"input_tokens", result.input_tokens},
                             {"output_tokens", result.output_tokens}});
            return result;
        } catch (const TransportError& e) {
            last_cause = e.what();
            events_->record({{"event", "completion_attempt_failed"},
                             {"tag", to_string(request.tag)},
                             {"dataset_id", request.dataset_id},
                             {"item", request.item},
                             {"attempt", attempt},
                             {"cause", last_cause}});
            if (attempt < max_attempts) retry_.sleep(retry_.backoff_base * (1LL << (attempt - 1)));
        }
    }
    events_->record({{"event", "completion_failed"},
                     {"tag", to_string(request.tag)},
                     {"dataset_id", request.dataset_id},
                     {"item", request.item},
                     {"cause", last_cause}});
    throw ProviderUnavailable(fmt::format("{} completion failed after {} attempts", to_string(request.tag),
                                          max_attempts),
                              last_cause);
}

ProviderConfig provider_config_from_json(const nlohmann::json& j, const std::string& base_dir) {
    ProviderConfig c;
    try {
        const auto kind = j.value("kind", std::string{"mock"});
        if (kind == "remote") {
            c.kind = ProviderConfig::Kind::Remote;
        } else if (kind == "mock") {
            c.kind = ProviderConfig::Kind::Mock;
        } else {
            throw ConfigError(fmt::format("provider kind must be remote or mock, got '{}'", kind));
        }
        c.endpoint = j.value("endpoint", c.endpoint);
        c.model = j.value("model", c.kind == ProviderConfig::Kind::Mock ? std::string{"mock"} : std::string{});
        c.credential_env = j.value("credential_env", c.credential_env);
        c.temperature = j.value("temperature", c.temperature);
        c.max_retries = j.value("max_retries", c.max_retries);
        c.backoff_base_ms = j.value("backoff_base_ms", c.backoff_base_ms);
        c.timeout_s = j.value("timeout_s", c.timeout_s);
        c.max_output_tokens = j.value("max_output_tokens", c.max_output_tokens);
        c.mock_script = j.value("mock_script", c.mock_script);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("provider config: ") + e.what());
    }
    if (c.temperature < 0.0 || c.temperature > 2.0) throw ConfigError("temperature must lie in [0, 2]");
    if (c.max_retries < 0) throw ConfigError("max_retries must be >= 0");
    if (!c.mock_script.empty() && !base_dir.empty() && std::filesystem::path(c.mock_script).is_relative()) {
        c.mock_script = (std::filesystem::path(base_dir) / c.mock_script).string();
    }
    if (c.kind == ProviderConfig::Kind::Remote && (c.endpoint.empty() || c.model.empty())) {
        throw ConfigError("remote provider needs endpoint and model");
    }
    return c;
}

nlohmann::json provider_config_to_json(const ProviderConfig& c) {
    return {{"kind", c.kind == ProviderConfig::Kind::Remote ? "remote" : "mock"},
            {"endpoint", c.endpoint},
            {"model", c.model},
            {"credential_env", c.credential_env},
            {"temperature", c.temperature},
            {"max_retries", c.max_retries},
            {"backoff_base_ms", c.backoff_base_ms},
            {"timeout_s", c.timeout_s},
            {"max_output_tokens", c.max_output_tokens},
            {"mock_script", c.mock_script}};
}

std::shared_ptr<Provider> make_provider(const ProviderConfig& config) {
    if (config.kind == ProviderConfig::Kind::Mock) {
        if (config.mock_script.empty()) return std::make_shared<MockProvider>(MockScript{}, config.model);
        return std::make_shared<MockProvider>(MockScript::load(config.mock_script), config.model);
    }
    if (config.credential_env.empty()) throw ConfigError("remote provider needs credential_env");
    const char* credential = std::getenv(config.credential_env.c_str());
    if (credential == nullptr || *credential == '\0') {
        throw ConfigError(fmt::format("credential environment variable {} is not set", config.credential_env));
    }
    RemoteProvider::Options options;
    options.endpoint = config.endpoint;
    options.model = config.model;
    options.api_key = credential;
    options.timeout = std::chrono::seconds(config.timeout_s);
    return std::make_shared<RemoteProvider>(std::move(options));
}

Gateway make_gateway(const ProviderConfig& config) {
    RetryPolicy retry;
    retry.max_retries = config.max_retries;
    retry.backoff_base = std::chrono::milliseconds(config.backoff_base_ms);
    Gateway gateway(make_provider(config), std::move(retry));
    gateway.set_default_temperature(config.temperature);
    return gateway;
}

}  // namespace datadesc
