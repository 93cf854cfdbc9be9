#pragma once

#include <chrono>
#include <string>

#include <json.hpp>

#include "datadesc/llm.hpp"

namespace datadesc {

/// Chat-completion JSON body: model, system + user messages, temperature,
/// max_tokens. The system message is omitted when empty.
nlohmann::json build_chat_request(const CompletionRequest& request, const std::string& model);

/// Reads choices[0].message.content and, when present, usage.prompt_tokens
/// and usage.completion_tokens. Throws TransportError on a malformed body.
ProviderReply parse_chat_response(const std::string& body);

/// HTTP(S) chat-completion backend for hosted models speaking the common
/// chat-completions wire shape. One `send` is one POST; 429 and 5xx replies
/// and network failures surface as TransportError so the gateway retries.
class RemoteProvider final : public Provider {
public:
    struct Options {
        std::string endpoint;  // full URL, e.g. https://host/v1/chat/completions
        std::string model;
        std::string api_key;
        std::chrono::seconds timeout{120};
    };

    explicit RemoteProvider(Options options);

    ProviderReply send(const CompletionRequest& request) override;
    std::string model_name() const override { return options_.model; }

private:
    Options options_;
    std::string scheme_host_port_;
    std::string path_;
};

}  // namespace datadesc
