#include "verifai/service.hpp"

#include "verifai/error.hpp"
#include "verifai/json_io.hpp"

#include <httplib.h>

namespace verifai {

namespace {

HttpResult error_result(int status, const std::string& message, const std::string& backend = {}) {
    nlohmann::json body{{"error", message}};
    if (!backend.empty()) {
        body["backend"] = backend;
    }
    return {status, std::move(body)};
}

int status_for(const Error& e) {
    switch (e.kind()) {
    case ErrorKind::invalid_input: return 400;
    case ErrorKind::not_found: return 404;
    case ErrorKind::backend: return 502;
    case ErrorKind::corrupt:
    case ErrorKind::internal: return 500;
    }
    return 500;
}

struct QueryRequest {
    std::string query;
    std::size_t k = 10;
    double alpha = 0.7;
    bool verify = true;
};

QueryRequest parse_query_request(const std::string& body, const ServiceConfig& config) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception&) {
        throw_invalid("request body is not valid JSON");
    }
    if (!j.is_object()) {
        throw_invalid("request body must be a JSON object");
    }
    QueryRequest r;
    r.k = config.k;
    r.alpha = config.alpha;
    auto q = j.find("query");
    if (q == j.end() || !q->is_string() || is_blank(q->get<std::string>())) {
        throw_invalid("query must be a non-empty string");
    }
    r.query = q->get<std::string>();
    if (auto k = j.find("k"); k != j.end() && !k->is_null()) {
        if (!k->is_number_integer() || k->get<long long>() < 1 || k->get<long long>() > 1000) {
            throw_invalid("k must be an integer in [1, 1000]");
        }
        r.k = k->get<std::size_t>();
    }
    if (auto a = j.find("alpha"); a != j.end() && !a->is_null()) {
        if (!a->is_number() || a->get<double>() < 0.0 || a->get<double>() > 1.0) {
            throw_invalid("alpha must be a number in [0, 1]");
        }
        r.alpha = a->get<double>();
    }
    if (auto v = j.find("verify"); v != j.end() && !v->is_null()) {
        if (!v->is_boolean()) {
            throw_invalid("verify must be a boolean");
        }
        r.verify = v->get<bool>();
    }
    return r;
}

HybridOptions retrieval_options(const QueryRequest& r, const ServiceConfig& config) {
    HybridOptions o;
    o.k = r.k;
    o.pool = std::max(config.pool, r.k);
    o.weights = FusionWeights::lexical_share(r.alpha);
    return o;
}

template <typename F>
HttpResult guarded(F&& body) {
    try {
        return body();
    } catch (const BackendError& e) {
        return error_result(502, e.what(), e.backend());
    } catch (const Error& e) {
        return error_result(status_for(e), e.what());
    } catch (const std::exception& e) {
        return error_result(500, e.what());
    }
}

} // namespace

Service::Service(ServiceConfig config, std::shared_ptr<const IndexBundle> index, Backends backends)
    : config_(std::move(config)), index_(std::move(index)), backends_(std::move(backends)) {
    if (backends_.generation) {
        generation_ = std::make_unique<BoundedGenerationBackend>(*backends_.generation, config_.generation_in_flight);
    }
    if (backends_.nli) {
        nli_ = std::make_unique<BoundedNliBackend>(*backends_.nli, config_.nli_in_flight);
    }
    if (index_ && backends_.embedder) {
        pipeline_ = std::make_unique<Pipeline>(*index_, *backends_.embedder, generation_.get(), nli_.get());
    }
}

HttpResult Service::search(const std::string& request_body) const {
    return guarded([&] {
        if (!pipeline_) {
            return error_result(503, "no index loaded");
        }
        const auto req = parse_query_request(request_body, config_);
        auto outcome = pipeline_->search(req.query, retrieval_options(req, config_));
        return HttpResult{200, {{"hits", hits_to_json(outcome.hits, index_->store())}, {"notices", outcome.notices}}};
    });
}

HttpResult Service::answer(const std::string& request_body) const {
    return guarded([&] {
        if (!pipeline_) {
            return error_result(503, "no index loaded");
        }
        const auto req = parse_query_request(request_body, config_);
        AnswerOptions options;
        options.retrieval = retrieval_options(req, config_);
        options.verify = req.verify;
        options.verification.max_in_flight = config_.nli_in_flight;
        auto response = pipeline_->answer(req.query, options);
        return HttpResult{200, to_json(response, index_->store())};
    });
}

HttpResult Service::document(const std::string& doc_id) const {
    return guarded([&] {
        if (!index_) {
            return error_result(503, "no index loaded");
        }
        if (!is_valid_doc_id(doc_id)) {
            return error_result(400, "document id must be decimal digits");
        }
        const auto* doc = index_->store().find(doc_id);
        if (doc == nullptr) {
            return error_result(404, "unknown document " + doc_id);
        }
        return HttpResult{200, document_to_json(*doc)};
    });
}

HttpResult Service::health() const {
    const auto generation = backends_.generation ? probe_backend(backends_.generation_spec) : "unconfigured";
    const auto nli = backends_.nli ? probe_backend(backends_.nli_spec) : "unconfigured";
    const auto embedding = backends_.embedder ? probe_backend(backends_.embedding_spec) : "unconfigured";
    const bool degraded = !index_ || generation == "unreachable" || nli == "unreachable" || embedding == "unreachable";
    return {200,
            {{"status", degraded ? "degraded" : "ok"},
             {"index_docs", index_ ? index_->store().size() : 0},
             {"backends", {{"generation", generation}, {"nli", nli}, {"embedding", embedding}}}}};
}

struct HttpServer::Impl {
    const Service* service;
    httplib::Server server;
};

namespace {

void reply(httplib::Response& res, const HttpResult& r) {
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json; charset=utf-8");
}

} // namespace

HttpServer::HttpServer(const Service& service) : impl_(std::make_unique<Impl>()) {
    impl_->service = &service;
    auto& svr = impl_->server;
    const auto threads = service.config().server_threads;
    svr.new_task_queue = [threads] { return new httplib::ThreadPool(threads); };

    const auto origin = service.config().cors_origin;
    if (!origin.empty()) {
        svr.set_default_headers({
            {"Access-Control-Allow-Origin", origin},
            {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
            {"Access-Control-Allow-Headers", "Content-Type"},
        });
        svr.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
    }

    const Service* s = &service;
    svr.Post("/api/search", [s](const httplib::Request& req, httplib::Response& res) { reply(res, s->search(req.body)); });
    svr.Post("/api/answer", [s](const httplib::Request& req, httplib::Response& res) { reply(res, s->answer(req.body)); });
    svr.Get(R"(/api/document/([^/]+))", [s](const httplib::Request& req, httplib::Response& res) {
        reply(res, s->document(req.matches[1].str()));
    });
    svr.Get("/healthz", [s](const httplib::Request&, httplib::Response& res) { reply(res, s->health()); });
    svr.set_error_handler([](const httplib::Request&, httplib::Response& res) {
        if (res.body.empty()) {
            reply(res, error_result(res.status, httplib::status_message(res.status)));
        }
    });
}

HttpServer::~HttpServer() {
    stop();
}

int HttpServer::bind(const std::string& host, int port) {
    int bound = port == 0 ? impl_->server.bind_to_any_port(host) : (impl_->server.bind_to_port(host, port) ? port : -1);
    if (bound < 0) {
        throw Error(ErrorKind::invalid_input, "cannot bind " + host + ":" + std::to_string(port));
    }
    return bound;
}

bool HttpServer::listen_after_bind() {
    return impl_->server.listen_after_bind();
}

void HttpServer::stop() {
    if (impl_) {
        impl_->server.stop();
    }
}

bool HttpServer::is_running() const {
    return impl_->server.is_running();
}

void HttpServer::wait_until_ready() const {
    impl_->server.wait_until_ready();
}

} // namespace verifai
