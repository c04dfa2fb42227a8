#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdlib>

#include "hep/error.hpp"
#include "hep/llm_backend.hpp"

namespace hep {

namespace {

struct Endpoint {
    std::string base;  // scheme://host[:port]
    std::string path;  // prefix, no trailing slash
};

Endpoint split_endpoint(const std::string& url) {
    const auto scheme = url.find("://");
    if (scheme == std::string::npos) throw ConfigError("endpoint must start with http:// or https://");
    const auto slash = url.find('/', scheme + 3);
    Endpoint e;
    e.base = url.substr(0, slash);
    e.path = slash == std::string::npos ? "" : url.substr(slash);
    while (!e.path.empty() && e.path.back() == '/') e.path.pop_back();
    return e;
}

}  // namespace

std::string chat_request_body(const MessageList& messages, const std::string& model) {
    nlohmann::json j;
    j["model"] = model;
    j["messages"] = nlohmann::json::array();
    for (const auto& m : messages) j["messages"].push_back({{"role", to_string(m.role)}, {"content", m.content}});
    return j.dump();
}

ParsedCompletion parse_chat_response(std::string_view body) {
    try {
        const auto j = nlohmann::json::parse(body);
        ParsedCompletion p;
        p.content = j.at("choices").at(0).at("message").at("content").get<std::string>();
        if (j.contains("usage") && j["usage"].is_object()) {
            const auto& u = j["usage"];
            if (u.contains("prompt_tokens")) p.prompt_tokens = u["prompt_tokens"].get<int>();
            if (u.contains("completion_tokens")) p.completion_tokens = u["completion_tokens"].get<int>();
        }
        return p;
    } catch (const nlohmann::json::exception& e) {
        throw BackendUnavailable(std::string("unexpected response shape: ") + e.what());
    }
}

LiveBackend::LiveBackend(BackendConfig config) : config_(std::move(config)) {
    split_endpoint(config_.endpoint);
    if (config_.timeout_s <= 0) throw ConfigError("timeout_s must be positive");
    if (config_.retries < 0) throw ConfigError("retries must be >= 0");
}

ChatResult LiveBackend::chat(const MessageList& messages) {
    const Endpoint ep = split_endpoint(config_.endpoint);
    const std::string body = chat_request_body(messages, config_.model);

    httplib::Headers headers;
    if (const char* token = std::getenv(config_.auth_env.c_str()); token && *token) {
        headers.emplace("Authorization", std::string("Bearer ") + token);
    }

    const auto timeout = std::chrono::duration<double>(config_.timeout_s);
    const auto timeout_us = std::chrono::duration_cast<std::chrono::microseconds>(timeout);
    const auto started = std::chrono::steady_clock::now();
    std::string last_error = "no attempt made";
    bool last_was_timeout = false;

    for (int attempt = 0; attempt <= config_.retries; ++attempt) {
        httplib::Client client(ep.base);
        client.set_connection_timeout(timeout_us);
        client.set_read_timeout(timeout_us);
        client.set_write_timeout(timeout_us);

        const auto t0 = std::chrono::steady_clock::now();
        auto res = client.Post(ep.path + "/chat/completions", headers, body, "application/json");
        const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        if (!res) {
            last_was_timeout = res.error() == httplib::Error::ConnectionTimeout || elapsed >= config_.timeout_s;
            last_error = httplib::to_string(res.error());
            continue;
        }
        if (res->status >= 500 || res->status == 429) {
            last_was_timeout = false;
            last_error = "HTTP " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200) throw BackendUnavailable("HTTP " + std::to_string(res->status));

        ParsedCompletion p = parse_chat_response(res->body);
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        const int prompt = p.prompt_tokens.value_or(estimate_prompt_tokens(messages));
        const int output = p.completion_tokens.value_or(estimate_tokens(p.content));
        return {std::move(p.content), make_meter(prompt, output, wall)};
    }
    if (last_was_timeout) throw Timeout(last_error);
    throw BackendUnavailable(last_error);
}

}  // namespace hep
