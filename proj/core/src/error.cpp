#include "mars/error.hpp"

namespace mars {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_config: return "invalid_config";
    case ErrorCode::domain: return "domain";
    case ErrorCode::dimension: return "dimension";
    case ErrorCode::convergence: return "convergence";
    case ErrorCode::consistency: return "consistency";
    case ErrorCode::conjugate_pairing: return "conjugate_pairing";
    case ErrorCode::fingerprint_mismatch: return "fingerprint_mismatch";
    case ErrorCode::out_of_range: return "out_of_range";
    case ErrorCode::insufficient_data: return "insufficient_data";
    case ErrorCode::normalization: return "normalization";
    case ErrorCode::io: return "io";
    case ErrorCode::format: return "format";
  }
  return "unknown";
}

}  // namespace mars
