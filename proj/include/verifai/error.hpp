#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace verifai {

enum class ErrorKind {
    invalid_input,  // caller supplied something unusable
    not_found,
    corrupt,        // persisted data failed validation
    backend,        // remote model endpoint failed
    internal,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Failure of a remote backend (generation, nli, embedding).
class BackendError : public Error {
public:
    BackendError(std::string backend, const std::string& message, int http_status = 0,
                 std::optional<int> retry_after_seconds = std::nullopt)
        : Error(ErrorKind::backend, backend + ": " + message),
          backend_(std::move(backend)),
          http_status_(http_status),
          retry_after_(retry_after_seconds) {}

    const std::string& backend() const noexcept { return backend_; }
    /// 0 when the request never produced an HTTP response.
    int http_status() const noexcept { return http_status_; }
    std::optional<int> retry_after_seconds() const noexcept { return retry_after_; }

private:
    std::string backend_;
    int http_status_;
    std::optional<int> retry_after_;
};

[[noreturn]] void throw_invalid(const std::string& message);

} // namespace verifai
