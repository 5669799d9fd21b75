#pragma once

#include <stdexcept>
#include <string>

namespace ctxlens {

/// Machine-parsable error categories. The CLI prints them as a
/// single-line prefix: `error: E_PARSE: ...`.
enum class ErrorCode {
    io,
    parse,
    format,
    args,
    unknown_word,
    range,
    state,
    stage,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

} // namespace ctxlens
