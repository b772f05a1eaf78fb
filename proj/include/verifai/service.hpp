#pragma once

#include "verifai/config.hpp"
#include "verifai/index_bundle.hpp"
#include "verifai/pipeline.hpp"

#include <json.hpp>

#include <map>
#include <memory>
#include <optional>
#include <string>

namespace verifai {

struct HttpResult {
    int status = 200;
    nlohmann::json body;
};

/// Request handlers over an immutable index. Handlers never throw; failures
/// become 4xx/5xx results with {"error", "backend"?} bodies.
class Service {
public:
    /// `index` may be null, in which case index-backed endpoints answer 503.
    Service(ServiceConfig config, std::shared_ptr<const IndexBundle> index, Backends backends);

    HttpResult search(const std::string& request_body) const;
    HttpResult answer(const std::string& request_body) const;
    HttpResult document(const std::string& doc_id) const;
    HttpResult health() const;

    const ServiceConfig& config() const noexcept { return config_; }
    bool has_index() const noexcept { return index_ != nullptr; }

private:
    ServiceConfig config_;
    std::shared_ptr<const IndexBundle> index_;
    Backends backends_;
    std::unique_ptr<BoundedGenerationBackend> generation_;
    std::unique_ptr<BoundedNliBackend> nli_;
    std::unique_ptr<Pipeline> pipeline_;
};

/// HTTP front end for a Service: POST /api/search, POST /api/answer,
/// GET /api/document/{id}, GET /healthz, with CORS headers when configured.
class HttpServer {
public:
    explicit HttpServer(const Service& service);
    ~HttpServer();
    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    /// Binds host:port (port 0 picks a free one) and returns the bound port.
    int bind(const std::string& host, int port);
    /// Blocks until stop() is called.
    bool listen_after_bind();
    void stop();
    bool is_running() const;
    void wait_until_ready() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace verifai
