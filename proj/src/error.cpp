#include "ivridge/error.hpp"

namespace ivridge {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::domain: return "domain error";
    case ErrorCode::contract: return "contract error";
    case ErrorCode::singularity: return "singularity";
    case ErrorCode::solver: return "solver error";
    case ErrorCode::degenerate_signal: return "degenerate signal";
    case ErrorCode::unsupported: return "unsupported";
    case ErrorCode::config: return "configuration error";
    case ErrorCode::io: return "i/o error";
  }
  return "unknown error";
}

}  // namespace ivridge
