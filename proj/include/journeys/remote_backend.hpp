#pragma once

#include <sstream>
#include <string>
#include <utility>

#include <httplib.h>
#include <json.hpp>

#include "journeys/error.hpp"
#include "journeys/naming.hpp"

namespace journeys {

struct RemoteConfig {
    std::string endpoint;  // http://host[:port]/path
    std::string auth_token;  // sent as a bearer token when non-empty
    int max_tokens = 64;
    double temperature = 0.0;
    int timeout_seconds = 30;
};

/// First line of a completion, trimmed and cut to `max_tokens`
/// whitespace-separated tokens.
inline std::string clean_completion(const std::string& text, std::size_t max_tokens) {
    const std::string line = text.substr(0, text.find('\n'));
    std::istringstream in(line);
    std::string out;
    std::size_t n = 0;
    for (std::string tok; n < max_tokens && in >> tok; ++n) {
        if (!out.empty()) out += ' ';
        out += tok;
    }
    return out;
}

/// Text-completion client: POST {prompt, max_tokens, temperature}, expects
/// {text}. Failures raise BackendError; there is no fallback.
class RemoteBackend : public NamingBackend {
public:
    explicit RemoteBackend(RemoteConfig cfg) : cfg_(std::move(cfg)) {
        const std::string scheme = "http://";
        if (cfg_.endpoint.rfind(scheme, 0) != 0) {
            throw InvalidArgument("remote backend: endpoint must start with http:// (got '" +
                                  cfg_.endpoint + "')");
        }
        const auto rest = cfg_.endpoint.substr(scheme.size());
        const auto slash = rest.find('/');
        host_ = scheme + rest.substr(0, slash);
        path_ = slash == std::string::npos ? "/" : rest.substr(slash);
        if (rest.substr(0, slash).empty()) throw InvalidArgument("remote backend: endpoint has no host");
    }

    std::string tag() const override { return "remote"; }

    std::string generate(const NamingRequest&, const std::string& prompt) override {
        httplib::Client client(host_);
        client.set_connection_timeout(cfg_.timeout_seconds, 0);
        client.set_read_timeout(cfg_.timeout_seconds, 0);
        httplib::Headers headers;
        if (!cfg_.auth_token.empty()) headers.emplace("Authorization", "Bearer " + cfg_.auth_token);

        const nlohmann::json body = {
            {"prompt", prompt}, {"max_tokens", cfg_.max_tokens}, {"temperature", cfg_.temperature}};
        auto res = client.Post(path_, headers, body.dump(), "application/json");
        if (!res) {
            throw BackendError("remote backend: transport failure (" + httplib::to_string(res.error()) + ")", 0);
        }
        if (res->status < 200 || res->status >= 300) {
            throw BackendError("remote backend: HTTP " + std::to_string(res->status), res->status);
        }
        nlohmann::json reply;
        try {
            reply = nlohmann::json::parse(res->body);
        } catch (const nlohmann::json::exception& e) {
            throw BackendError(std::string("remote backend: malformed reply: ") + e.what(), res->status);
        }
        if (!reply.is_object() || !reply.contains("text") || !reply["text"].is_string()) {
            throw BackendError("remote backend: reply lacks a string 'text' field", res->status);
        }
        return clean_completion(reply["text"].get<std::string>(), static_cast<std::size_t>(cfg_.max_tokens));
    }

private:
    RemoteConfig cfg_;
    std::string host_;
    std::string path_;
};

}  // namespace journeys
