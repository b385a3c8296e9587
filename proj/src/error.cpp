#include "ccesnet/error.hpp"

namespace ccesnet {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::io: return "io";
    case ErrorCode::parse: return "parse";
    case ErrorCode::dimension_mismatch: return "dimension_mismatch";
    case ErrorCode::negative_value: return "negative_value";
    case ErrorCode::nonpositive_price: return "nonpositive_price";
    case ErrorCode::balance_violation: return "balance_violation";
    case ErrorCode::zero_column: return "zero_column";
    case ErrorCode::undefined_linearity: return "undefined_linearity";
    case ErrorCode::too_large: return "too_large";
    case ErrorCode::degenerate_share: return "degenerate_share";
    case ErrorCode::calibration_failure: return "calibration_failure";
    case ErrorCode::nonconvergence: return "nonconvergence";
    case ErrorCode::productivity_infeasible: return "productivity_infeasible";
  }
  return "unknown";
}

}  // namespace ccesnet
