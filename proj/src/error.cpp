#include "memdecay/error.hpp"

namespace memdecay {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::parameter_domain: return "parameter-domain";
    case ErrorKind::admissibility: return "admissibility";
    case ErrorKind::tail_undefined: return "tail-undefined";
    case ErrorKind::cfl_violation: return "cfl-violation";
    case ErrorKind::instability: return "instability";
    case ErrorKind::unsupported_oracle: return "unsupported-oracle";
    case ErrorKind::family_undefined: return "family-undefined";
    case ErrorKind::improved_bound_unavailable: return "improved-bound-unavailable";
    case ErrorKind::domain: return "domain";
    case ErrorKind::fit_domain: return "fit-domain";
    case ErrorKind::config: return "config";
    case ErrorKind::io: return "io";
    case ErrorKind::internal: return "internal";
  }
  return "unknown";
}

}  // namespace memdecay
