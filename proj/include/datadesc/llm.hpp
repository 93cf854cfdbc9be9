#pragma once

#include <chrono>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <json.hpp>

namespace datadesc {

/// Closed set of pipeline stages a completion can be attributed to. The
/// declaration order is the order stages appear in cost exports.
enum class Stage {
    ContentProfileNone,
    SemanticProfile,
    Topic,
    Ufd,
    Sfd,
    JudgePointwise,
    JudgePairwise,
};

std::string_view to_string(Stage stage) noexcept;
Stage stage_from_string(std::string_view name);

struct CompletionRequest {
    std::string system_instructions;
    std::string user_prompt;
    double temperature = 0.0;
    std::size_t max_output_tokens = 1024;
    Stage tag = Stage::Ufd;
    // Attribution for the cost ledger and event log.
    std::string dataset_id;
    std::size_t item = 0;
};

struct CompletionResult {
    std::string text;
    std::size_t input_tokens = 0;
    std::size_t output_tokens = 0;
    double latency_ms = 0;
    int attempts = 1;
};

class Tokenizer {
public:
    virtual ~Tokenizer() = default;
    virtual std::size_t count(std::string_view text) const = 0;
};

/// ceil(characters / 4), counting UTF-8 code points.
class ApproximateTokenizer final : public Tokenizer {
public:
    std::size_t count(std::string_view text) const override;
};

std::size_t count_tokens(std::string_view text);

/// What one provider attempt returns. Usage fields are empty when the
/// provider does not report them.
struct ProviderReply {
    std::string text;
    std::optional<std::size_t> input_tokens;
    std::optional<std::size_t> output_tokens;
    std::optional<double> latency_ms;
};

/// One LLM backend. `send` performs a single attempt and throws
/// TransportError on a retryable failure. Implementations must be safe to
/// call from several threads.
class Provider {
public:
    virtual ~Provider() = default;
    virtual ProviderReply send(const CompletionRequest& request) = 0;
    virtual std::string model_name() const = 0;
};

struct CostEntry {
    Stage tag = Stage::Ufd;
    std::string dataset_id;
    std::size_t item = 0;
    std::size_t sequence = 0;  // call number within (dataset_id, tag, item)
    std::size_t input_tokens = 0;
    std::size_t output_tokens = 0;
    double latency_ms = 0;
};

struct CostTotals {
    std::size_t calls = 0;
    std::size_t input_tokens = 0;
    std::size_t output_tokens = 0;
    double latency_ms = 0;

    CostTotals& operator+=(const CostTotals& other);
    friend bool operator==(const CostTotals&, const CostTotals&) = default;
};

/// Thread-safe record of every completion. Entries are kept in a canonical
/// order (dataset, stage, item, sequence) so exports do not depend on the
/// interleaving of concurrent calls.
class CostLedger {
public:
    CostLedger() = default;
    CostLedger(const CostLedger& other);
    CostLedger& operator=(const CostLedger& other);

    void append(CostEntry entry);
    std::vector<CostEntry> entries() const;
    std::map<Stage, CostTotals> totals_by_stage() const;
    CostTotals total() const;
    CostLedger slice(std::string_view dataset_id) const;
    /// tag,input_tokens,output_tokens,latency_ms
    std::string to_csv() const;
    void clear();

private:
    mutable std::mutex mutex_;
    std::vector<CostEntry> entries_;
    std::map<std::tuple<std::string, Stage, std::size_t>, std::size_t> next_sequence_;
};

/// Structured JSON-lines event log. Thread-safe.
class EventLog {
public:
    void record(nlohmann::json event);
    std::vector<nlohmann::json> events() const;
    /// Number of events with the given "event" name and, if set, "tag".
    std::size_t count(std::string_view event, std::optional<Stage> tag = std::nullopt) const;
    std::string to_jsonl() const;
    void clear();

private:
    mutable std::mutex mutex_;
    std::vector<nlohmann::json> events_;
};

struct RetryPolicy {
    int max_retries = 3;
    std::chrono::milliseconds backoff_base{500};
    /// Replaceable so tests need not sleep.
    std::function<void(std::chrono::milliseconds)> sleep;
};

/// The single chat-completion entry point used by every stage: retries with
/// exponential backoff (base * 2^retry), token accounting, ledger and
/// event-log bookkeeping. Safe for concurrent use.
class Gateway {
public:
    explicit Gateway(std::shared_ptr<Provider> provider, RetryPolicy retry = {},
                     std::shared_ptr<const Tokenizer> tokenizer = nullptr);

    CompletionResult complete(const CompletionRequest& request) const;

    std::string model_name() const { return provider_->model_name(); }
    double default_temperature() const { return temperature_; }
    void set_default_temperature(double t) { temperature_ = t; }

    const Tokenizer& tokenizer() const { return *tokenizer_; }
    CostLedger& ledger() const { return *ledger_; }
    EventLog& events() const { return *events_; }
    void set_ledger(std::shared_ptr<CostLedger> ledger) { ledger_ = std::move(ledger); }
    void set_events(std::shared_ptr<EventLog> events) { events_ = std::move(events); }

private:
    std::shared_ptr<Provider> provider_;
    RetryPolicy retry_;
    std::shared_ptr<const Tokenizer> tokenizer_;
    std::shared_ptr<CostLedger> ledger_;
    std::shared_ptr<EventLog> events_;
    double temperature_ = 0.0;
};

struct ProviderConfig {
    enum class Kind { Remote, Mock };
    Kind kind = Kind::Mock;
    std::string endpoint;
    std::string model = "mock";
    std::string credential_env;
    double temperature = 0.0;
    int max_retries = 3;
    int backoff_base_ms = 500;
    int timeout_s = 120;
    std::size_t max_output_tokens = 1024;
    std::string mock_script;
};

/// Reads the provider section of a run config. Relative mock_script paths
/// resolve against `base_dir`.
ProviderConfig provider_config_from_json(const nlohmann::json& j, const std::string& base_dir = {});
nlohmann::json provider_config_to_json(const ProviderConfig& config);

/// Builds the configured provider. Remote providers resolve their
/// credential here and throw ConfigError when it is missing, before any
/// network traffic.
std::shared_ptr<Provider> make_provider(const ProviderConfig& config);

Gateway make_gateway(const ProviderConfig& config);

}  // namespace datadesc
