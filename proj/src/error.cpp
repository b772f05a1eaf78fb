#include "verifai/error.hpp"

namespace verifai {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::invalid_input: return "invalid_input";
    case ErrorKind::not_found: return "not_found";
    case ErrorKind::corrupt: return "corrupt";
    case ErrorKind::backend: return "backend";
    case ErrorKind::internal: return "internal";
    }
    return "unknown";
}

void throw_invalid(const std::string& message) {
    throw Error(ErrorKind::invalid_input, message);
}

} // namespace verifai
