#pragma once

#include "verifai/embedder.hpp"
#include "verifai/generation.hpp"
#include "verifai/http_client.hpp"
#include "verifai/index_bundle.hpp"
#include "verifai/verification.hpp"

#include <json.hpp>

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>

namespace verifai {

/// kind: generation stub|openai|none, nli stub|classifier|chat|none,
/// embedding index|hash|http ("index" rebuilds whatever the manifest names).
struct BackendSpec {
    std::string kind;
    HttpBackendConfig http;

    friend bool operator==(const BackendSpec&, const BackendSpec&) = default;
};

struct ServiceConfig {
    std::filesystem::path index_dir = "index";
    std::string host = "127.0.0.1";
    int port = 8080;
    double alpha = 0.7;
    std::size_t k = 10;
    std::size_t pool = 100;
    BackendSpec generation{"stub", {}};
    BackendSpec nli{"stub", {}};
    BackendSpec embedding{"index", {}};
    /// Global caps on concurrent backend calls across requests.
    std::size_t generation_in_flight = 4;
    std::size_t nli_in_flight = 8;
    std::size_t server_threads = 8;
    /// Access-Control-Allow-Origin value; empty disables CORS headers.
    std::string cors_origin = "*";

    friend bool operator==(const ServiceConfig&, const ServiceConfig&) = default;
};

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

/// Flags given on the command line; unset fields fall through.
struct ConfigOverrides {
    std::optional<std::filesystem::path> config_file;
    std::optional<std::filesystem::path> index_dir;
    std::optional<std::string> host;
    std::optional<int> port;
    std::optional<double> alpha;
    std::optional<std::size_t> k;
    std::optional<std::size_t> pool;
    std::optional<std::string> generation;
    std::optional<std::string> nli;
};

/// Applies the keys present in a JSON config object. Unknown keys are rejected.
void apply_config_json(ServiceConfig& config, const nlohmann::json& j);
nlohmann::json config_to_json(const ServiceConfig& config);

/// CLI flag > environment (VERIFAI_CONFIG, VERIFAI_PORT) > config file > default.
/// Does not validate; call validate_config afterwards.
ServiceConfig resolve_config(const ConfigOverrides& cli, const EnvLookup& env = read_env);

/// alpha in [0,1], port in [1,65535], k >= 1, pool >= k, known backend kinds,
/// and every api_key_env of an enabled HTTP backend present in the environment.
void validate_config(const ServiceConfig& config, const EnvLookup& env = read_env);

/// Constructed backends. `nli` may point into `nli_chat` for the chat adapter.
struct Backends {
    std::unique_ptr<GenerationBackend> generation;
    std::unique_ptr<GenerationBackend> nli_chat;
    std::unique_ptr<NliBackend> nli;
    std::unique_ptr<Embedder> embedder;
    BackendSpec generation_spec;
    BackendSpec nli_spec;
    BackendSpec embedding_spec;
};

/// The embedder follows the index manifest unless the config names another one.
Backends make_backends(const ServiceConfig& config, const IndexBundle* index);

/// "ok", "unconfigured" or "unreachable". Stub and hash backends are always ok.
std::string probe_backend(const BackendSpec& spec);

} // namespace verifai
