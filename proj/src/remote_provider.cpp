#include "datadesc/remote_provider.hpp"

#include <httplib.h>

#include <fmt/format.h>

#include "datadesc/error.hpp"

namespace datadesc {

nlohmann::json build_chat_request(const CompletionRequest& request, const std::string& model) {
    auto messages = nlohmann::json::array();
    if (!request.system_instructions.empty()) {
        messages.push_back({{"role", "system"}, {"content", request.system_instructions}});
    }
    messages.push_back({{"role", "user"}, {"content", request.user_prompt}});
    return {{"model", model},
            {"messages", messages},
            {"temperature", request.temperature},
            {"max_tokens", request.max_output_tokens}};
}

ProviderReply parse_chat_response(const std::string& body) {
    ProviderReply reply;
    try {
        const auto j = nlohmann::json::parse(body);
        const auto& content = j.at("choices").at(0).at("message").at("content");
        reply.text = content.is_null() ? std::string{} : content.get<std::string>();
        if (auto usage = j.find("usage"); usage != j.end() && usage->is_object()) {
            if (usage->contains("prompt_tokens")) reply.input_tokens = usage->at("prompt_tokens").get<std::size_t>();
            if (usage->contains("completion_tokens")) {
                reply.output_tokens = usage->at("completion_tokens").get<std::size_t>();
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw TransportError(std::string("malformed chat response: ") + e.what());
    }
    return reply;
}

RemoteProvider::RemoteProvider(Options options) : options_(std::move(options)) {
    const auto scheme_end = options_.endpoint.find("://");
    if (scheme_end == std::string::npos) throw ConfigError("endpoint must be an absolute URL: " + options_.endpoint);
    const auto path_start = options_.endpoint.find('/', scheme_end + 3);
    scheme_host_port_ = options_.endpoint.substr(0, path_start);
    path_ = path_start == std::string::npos ? "/" : options_.endpoint.substr(path_start);
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
    if (options_.endpoint.rfind("https://", 0) == 0) {
        throw ConfigError("this build has no HTTPS support; use an http:// endpoint");
    }
#endif
}

ProviderReply RemoteProvider::send(const CompletionRequest& request) {
    httplib::Client client(scheme_host_port_);
    client.set_connection_timeout(options_.timeout);
    client.set_read_timeout(options_.timeout);
    client.set_write_timeout(options_.timeout);
    httplib::Headers headers;
    if (!options_.api_key.empty()) headers.emplace("Authorization", "Bearer " + options_.api_key);

    const auto body = build_chat_request(request, options_.model).dump();
    auto response = client.Post(path_, headers, body, "application/json");
    if (!response) throw TransportError("http error: " + httplib::to_string(response.error()));
    if (response->status == 429 || response->status >= 500) {
        throw TransportError(fmt::format("http status {}", response->status));
    }
    if (response->status != 200) {
        throw ProviderUnavailable(fmt::format("http status {}", response->status), response->body);
    }
    return parse_chat_response(response->body);
}

}  // namespace datadesc
