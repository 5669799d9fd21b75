#include "ctxlens/error.hpp"

namespace ctxlens {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::io: return "E_IO";
        case ErrorCode::parse: return "E_PARSE";
        case ErrorCode::format: return "E_FORMAT";
        case ErrorCode::args: return "E_ARGS";
        case ErrorCode::unknown_word: return "E_UNKNOWN_WORD";
        case ErrorCode::range: return "E_RANGE";
        case ErrorCode::state: return "E_STATE";
        case ErrorCode::stage: return "E_STAGE";
    }
    return "E_UNKNOWN";
}

} // namespace ctxlens
