#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ccesnet {

enum class ErrorCode {
  invalid_argument = 10,
  io = 11,
  parse = 12,
  dimension_mismatch = 20,
  negative_value = 21,
  nonpositive_price = 22,
  balance_violation = 23,
  zero_column = 24,
  undefined_linearity = 30,
  too_large = 31,
  degenerate_share = 40,
  calibration_failure = 41,
  nonconvergence = 50,
  productivity_infeasible = 60,
};

const char* to_string(ErrorCode code);

using ErrorContext = std::vector<std::pair<std::string, std::string>>;

// Every library failure is reported through this type so the CLI can map it
// to an exit code and a machine-readable record.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string module, const std::string& message,
        ErrorContext context = {})
      : std::runtime_error(message),
        code_(code),
        module_(std::move(module)),
        context_(std::move(context)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& module() const noexcept { return module_; }
  const ErrorContext& context() const noexcept { return context_; }

 private:
  ErrorCode code_;
  std::string module_;
  ErrorContext context_;
};

}  // namespace ccesnet
