#pragma once

#include <json.hpp>

#include <chrono>
#include <optional>
#include <string>

namespace verifai {

/// Connection settings shared by the OpenAI-compatible backend adapters.
struct HttpBackendConfig {
    /// Full endpoint URL, e.g. http://localhost:8000/v1/chat/completions
    std::string url;
    std::string model;
    /// Name of the environment variable holding a bearer token; empty for none.
    std::string api_key_env;
    std::chrono::milliseconds timeout{60000};

    friend bool operator==(const HttpBackendConfig&, const HttpBackendConfig&) = default;
};

struct ParsedUrl {
    std::string scheme_host_port;  // "http://host:port"
    std::string path;              // "/v1/embeddings"
};

/// Throws invalid_input unless the URL is http(s)://host[:port][/path].
ParsedUrl parse_url(const std::string& url);

/// POSTs a JSON body and returns the parsed JSON response. Transport
/// failures, non-2xx statuses and unparseable bodies raise BackendError
/// tagged with `backend` (with a Retry-After hint when the server sent one).
nlohmann::json post_json(const std::string& backend, const HttpBackendConfig& config, const nlohmann::json& body);

/// True when the endpoint's host answers any HTTP request within the timeout.
bool probe_endpoint(const HttpBackendConfig& config);

std::optional<std::string> read_env(const std::string& name);

} // namespace verifai
