#include "verifai/config.hpp"

#include "verifai/error.hpp"

#include <charconv>
#include <fstream>
#include <set>

namespace verifai {

namespace {

const std::set<std::string> kGenerationKinds{"stub", "openai", "none"};
const std::set<std::string> kNliKinds{"stub", "classifier", "chat", "none"};
const std::set<std::string> kEmbeddingKinds{"index", "hash", "http"};

void apply_backend(BackendSpec& spec, const nlohmann::json& j, const std::string& where) {
    if (j.is_string()) {
        spec.kind = j.get<std::string>();
        return;
    }
    if (!j.is_object()) {
        throw_invalid(where + " must be a string or an object");
    }
    for (const auto& [key, value] : j.items()) {
        if (key == "kind") {
            spec.kind = value.get<std::string>();
        } else if (key == "url") {
            spec.http.url = value.get<std::string>();
        } else if (key == "model") {
            spec.http.model = value.get<std::string>();
        } else if (key == "api_key_env") {
            spec.http.api_key_env = value.get<std::string>();
        } else if (key == "timeout_ms") {
            spec.http.timeout = std::chrono::milliseconds(value.get<long>());
        } else {
            throw_invalid("unknown config key " + where + "." + key);
        }
    }
}

nlohmann::json backend_json(const BackendSpec& s) {
    return {{"kind", s.kind},
            {"url", s.http.url},
            {"model", s.http.model},
            {"api_key_env", s.http.api_key_env},
            {"timeout_ms", s.http.timeout.count()}};
}

bool uses_http(const std::string& kind) {
    return kind == "openai" || kind == "classifier" || kind == "chat" || kind == "http";
}

void check_backend(const BackendSpec& spec, const std::set<std::string>& kinds, const std::string& role,
                   const EnvLookup& env) {
    if (kinds.count(spec.kind) == 0) {
        std::string allowed;
        for (const auto& k : kinds) {
            allowed += (allowed.empty() ? "" : ", ") + k;
        }
        throw_invalid(role + " backend '" + spec.kind + "' is not one of: " + allowed);
    }
    if (!uses_http(spec.kind)) {
        return;
    }
    parse_url(spec.http.url);
    if (!spec.http.api_key_env.empty() && !env(spec.http.api_key_env)) {
        throw_invalid(role + " backend needs environment variable " + spec.http.api_key_env);
    }
}

} // namespace

void apply_config_json(ServiceConfig& c, const nlohmann::json& j) {
    if (!j.is_object()) {
        throw_invalid("config must be a JSON object");
    }
    try {
        for (const auto& [key, value] : j.items()) {
            if (key == "index_dir") {
                c.index_dir = value.get<std::string>();
            } else if (key == "host") {
                c.host = value.get<std::string>();
            } else if (key == "port") {
                c.port = value.get<int>();
            } else if (key == "alpha") {
                c.alpha = value.get<double>();
            } else if (key == "k") {
                c.k = value.get<std::size_t>();
            } else if (key == "pool") {
                c.pool = value.get<std::size_t>();
            } else if (key == "generation") {
                apply_backend(c.generation, value, key);
            } else if (key == "nli") {
                apply_backend(c.nli, value, key);
            } else if (key == "embedding") {
                apply_backend(c.embedding, value, key);
            } else if (key == "generation_in_flight") {
                c.generation_in_flight = value.get<std::size_t>();
            } else if (key == "nli_in_flight") {
                c.nli_in_flight = value.get<std::size_t>();
            } else if (key == "server_threads") {
                c.server_threads = value.get<std::size_t>();
            } else if (key == "cors_origin") {
                c.cors_origin = value.get<std::string>();
            } else {
                throw_invalid("unknown config key " + key);
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw_invalid(std::string("config value has the wrong type: ") + e.what());
    }
}

nlohmann::json config_to_json(const ServiceConfig& c) {
    return {
        {"index_dir", c.index_dir.string()},
        {"host", c.host},
        {"port", c.port},
        {"alpha", c.alpha},
        {"k", c.k},
        {"pool", c.pool},
        {"generation", backend_json(c.generation)},
        {"nli", backend_json(c.nli)},
        {"embedding", backend_json(c.embedding)},
        {"generation_in_flight", c.generation_in_flight},
        {"nli_in_flight", c.nli_in_flight},
        {"server_threads", c.server_threads},
        {"cors_origin", c.cors_origin},
    };
}

ServiceConfig resolve_config(const ConfigOverrides& cli, const EnvLookup& env) {
    ServiceConfig c;
    std::optional<std::filesystem::path> file = cli.config_file;
    if (!file) {
        if (auto v = env("VERIFAI_CONFIG"); v && !v->empty()) {
            file = *v;
        }
    }
    if (file) {
        std::ifstream in(*file);
        if (!in) {
            throw_invalid("cannot open config file " + file->string());
        }
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception& e) {
            throw_invalid("config file " + file->string() + ": " + e.what());
        }
        apply_config_json(c, j);
    }
    if (auto v = env("VERIFAI_PORT"); v && !v->empty()) {
        int port = 0;
        auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), port);
        if (ec != std::errc() || ptr != v->data() + v->size()) {
            throw_invalid("VERIFAI_PORT is not an integer: " + *v);
        }
        c.port = port;
    }
    if (cli.index_dir) c.index_dir = *cli.index_dir;
    if (cli.host) c.host = *cli.host;
    if (cli.port) c.port = *cli.port;
    if (cli.alpha) c.alpha = *cli.alpha;
    if (cli.k) c.k = *cli.k;
    if (cli.pool) c.pool = *cli.pool;
    if (cli.generation) c.generation.kind = *cli.generation;
    if (cli.nli) c.nli.kind = *cli.nli;
    return c;
}

void validate_config(const ServiceConfig& c, const EnvLookup& env) {
    if (!(c.alpha >= 0.0 && c.alpha <= 1.0)) {
        throw_invalid("alpha must lie in [0, 1], got " + std::to_string(c.alpha));
    }
    if (c.port < 1 || c.port > 65535) {
        throw_invalid("port must lie in [1, 65535], got " + std::to_string(c.port));
    }
    if (c.k < 1) {
        throw_invalid("k must be >= 1");
    }
    if (c.pool < c.k) {
        throw_invalid("pool (" + std::to_string(c.pool) + ") must be >= k (" + std::to_string(c.k) + ")");
    }
    if (c.generation_in_flight < 1 || c.nli_in_flight < 1 || c.server_threads < 1) {
        throw_invalid("concurrency limits must be >= 1");
    }
    check_backend(c.generation, kGenerationKinds, "generation", env);
    check_backend(c.nli, kNliKinds, "nli", env);
    check_backend(c.embedding, kEmbeddingKinds, "embedding", env);
}

Backends make_backends(const ServiceConfig& c, const IndexBundle* index) {
    Backends b;
    b.generation_spec = c.generation;
    b.nli_spec = c.nli;
    b.embedding_spec = c.embedding;

    if (c.generation.kind == "stub") {
        b.generation = std::make_unique<StubGenerationBackend>();
    } else if (c.generation.kind == "openai") {
        b.generation = std::make_unique<HttpChatBackend>(c.generation.http, "generation");
    }

    if (c.nli.kind == "stub") {
        b.nli = std::make_unique<StubNliBackend>();
    } else if (c.nli.kind == "classifier") {
        b.nli = std::make_unique<HttpClassifierNliBackend>(c.nli.http);
    } else if (c.nli.kind == "chat") {
        b.nli_chat = std::make_unique<HttpChatBackend>(c.nli.http, "nli", false);
        b.nli = std::make_unique<ChatNliBackend>(*b.nli_chat);
    }

    EmbedderSpec spec = index != nullptr ? index->options().embedder : EmbedderSpec{};
    const AnalyzerConfig analyzer = index != nullptr ? index->options().analyzer : AnalyzerConfig{};
    if (c.embedding.kind == "hash") {
        spec.kind = "hash";
    } else if (c.embedding.kind == "http") {
        spec.kind = "http";
        spec.http = c.embedding.http;
    }
    b.embedding_spec.kind = spec.kind;
    if (spec.kind == "http") {
        b.embedding_spec.http = spec.http;
    }
    b.embedder = make_embedder(spec, analyzer);
    return b;
}

std::string probe_backend(const BackendSpec& spec) {
    if (spec.kind.empty() || spec.kind == "none") {
        return "unconfigured";
    }
    if (!uses_http(spec.kind)) {
        return "ok";
    }
    try {
        return probe_endpoint(spec.http) ? "ok" : "unreachable";
    } catch (const std::exception&) {
        return "unreachable";
    }
}

} // namespace verifai
