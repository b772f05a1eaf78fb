#include "verifai/http_client.hpp"

#include "verifai/error.hpp"

#include <httplib.h>

#include <cstdlib>

namespace verifai {
namespace {

httplib::Client make_client(const ParsedUrl& url, std::chrono::milliseconds timeout) {
    httplib::Client client(url.scheme_host_port);
    const auto secs = static_cast<time_t>(timeout.count() / 1000);
    const auto usecs = static_cast<time_t>((timeout.count() % 1000) * 1000);
    client.set_connection_timeout(secs, usecs);
    client.set_read_timeout(secs, usecs);
    client.set_write_timeout(secs, usecs);
    return client;
}

} // namespace

ParsedUrl parse_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw_invalid("backend url '" + url + "' has no scheme");
    }
    const auto scheme = url.substr(0, scheme_end);
    if (scheme != "http" && scheme != "https") {
        throw_invalid("backend url '" + url + "' must use http or https");
    }
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
    if (scheme == "https") {
        throw_invalid("https backends need a TLS-enabled build");
    }
#endif
    const auto host_begin = scheme_end + 3;
    const auto path_begin = url.find('/', host_begin);
    ParsedUrl out;
    out.scheme_host_port = url.substr(0, path_begin);
    out.path = path_begin == std::string::npos ? "/" : url.substr(path_begin);
    if (out.scheme_host_port.size() <= host_begin) {
        throw_invalid("backend url '" + url + "' has no host");
    }
    return out;
}

std::optional<std::string> read_env(const std::string& name) {
    if (name.empty()) {
        return std::nullopt;
    }
    const char* v = std::getenv(name.c_str());
    if (v == nullptr) {
        return std::nullopt;
    }
    return std::string(v);
}

nlohmann::json post_json(const std::string& backend, const HttpBackendConfig& config, const nlohmann::json& body) {
    const auto url = parse_url(config.url);
    auto client = make_client(url, config.timeout);
    httplib::Headers headers;
    if (auto key = read_env(config.api_key_env)) {
        headers.emplace("Authorization", "Bearer " + *key);
    }
    auto res = client.Post(url.path, headers, body.dump(), "application/json");
    if (!res) {
        throw BackendError(backend, "request to " + config.url + " failed: " + httplib::to_string(res.error()));
    }
    if (res->status < 200 || res->status >= 300) {
        std::optional<int> retry_after;
        if (res->has_header("Retry-After")) {
            try {
                retry_after = std::stoi(res->get_header_value("Retry-After"));
            } catch (const std::exception&) {
                retry_after.reset();
            }
        }
        throw BackendError(backend, "HTTP " + std::to_string(res->status) + " from " + config.url, res->status,
                           retry_after);
    }
    try {
        return nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception& e) {
        throw BackendError(backend, std::string("unparseable response body: ") + e.what(), res->status);
    }
}

bool probe_endpoint(const HttpBackendConfig& config) {
    try {
        const auto url = parse_url(config.url);
        auto client = make_client(url, std::min(config.timeout, std::chrono::milliseconds(2000)));
        auto res = client.Get("/");
        return static_cast<bool>(res);
    } catch (const std::exception&) {
        return false;
    }
}

} // namespace verifai
