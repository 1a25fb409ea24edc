#pragma once

#include <stdexcept>
#include <string>

namespace vostrack {

enum class ErrorCode {
    io,
    parse,
    config,
    input,
    spec,
    malformed_rle,
    dimension_mismatch,
    missing_frame,
    empty_pool,
    size_limit,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, std::string message)
        : std::runtime_error(std::move(message)), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace vostrack
