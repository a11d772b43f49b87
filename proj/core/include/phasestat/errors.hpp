#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace phasestat {

enum class ErrorCode {
  too_few_observations,
  degenerate_covariance,
  zero_residual_variance,
  singular_within_scatter,
  too_few_groups,
  label_mismatch,
  design_mismatch,
  empty_unit,
  domain_error,
  invalid_graph,
  invalid_spec,
  non_integer_cycles,
  frequency_not_resolvable,
  parse_error,
  io_error,
};

std::string_view to_string(ErrorCode code) noexcept;

/// True for errors raised because the data do not satisfy a test's
/// statistical preconditions (as opposed to malformed input).
bool is_statistical(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace phasestat
