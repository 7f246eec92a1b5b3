#include "gabm/errors.hpp"
#include "gabm/llm.hpp"

#include <httplib.h>
#include <json.hpp>

#include <thread>

namespace gabm {

using nlohmann::json;

std::string chat_request_body(const CompletionRequest& req) {
    json body = {
        {"model", req.model_id},
        {"temperature", req.temperature},
        {"max_tokens", req.max_reply_tokens},
        {"messages", json::array({{{"role", "user"}, {"content", req.prompt}}})},
    };
    return body.dump();
}

std::string extract_reply(std::string_view response_body) {
    auto body = json::parse(response_body, nullptr, false);
    if (body.is_discarded()) throw TransportError("completion response is not JSON");
    try {
        return body.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception& e) {
        throw TransportError(std::string("completion response lacks choices[0].message.content: ") + e.what());
    }
}

LiveCompleter::LiveCompleter(std::string endpoint_url, std::string api_key, RetryPolicy policy, Sleeper sleeper)
    : api_key_(std::move(api_key)), policy_(std::move(policy)), sleeper_(std::move(sleeper)) {
    if (policy_.max_attempts < 1) throw ConfigError("retry policy needs at least one attempt");
    auto scheme_end = endpoint_url.find("://");
    if (scheme_end == std::string::npos) throw ConfigError("endpoint URL needs a scheme: " + endpoint_url);
    auto path_start = endpoint_url.find('/', scheme_end + 3);
    scheme_host_port_ = endpoint_url.substr(0, path_start);
    path_ = path_start == std::string::npos ? std::string() : endpoint_url.substr(path_start);
    while (!path_.empty() && path_.back() == '/') path_.pop_back();
    if (!path_.ends_with("/chat/completions")) path_ += "/chat/completions";
    if (!sleeper_) sleeper_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

std::string LiveCompleter::complete(const CompletionRequest& req) {
    httplib::Client client(scheme_host_port_);
    client.set_connection_timeout(std::chrono::seconds(30));
    client.set_read_timeout(std::chrono::seconds(120));
    httplib::Headers headers = {{"Authorization", "Bearer " + api_key_}};
    const auto body = chat_request_body(req);

    std::string last_failure;
    for (int attempt = 1; attempt <= policy_.max_attempts; ++attempt) {
        auto res = client.Post(path_, headers, body, "application/json");
        if (res && res->status == 200) return extract_reply(res->body);
        if (res && (res->status == 401 || res->status == 403)) {
            throw AuthError("endpoint rejected credentials with status " + std::to_string(res->status));
        }
        if (res && !policy_.retryable_statuses.contains(res->status)) {
            throw TransportError("endpoint returned status " + std::to_string(res->status));
        }
        last_failure = res ? "status " + std::to_string(res->status) : httplib::to_string(res.error());
        if (attempt < policy_.max_attempts) sleeper_(policy_.delay(attempt));
    }
    throw TransportError("gave up after " + std::to_string(policy_.max_attempts) + " attempts (" + last_failure + ")");
}

} // namespace gabm
