#include "phasestat/errors.hpp"

namespace phasestat {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::too_few_observations: return "TooFewObservations";
    case ErrorCode::degenerate_covariance: return "DegenerateCovariance";
    case ErrorCode::zero_residual_variance: return "ZeroResidualVariance";
    case ErrorCode::singular_within_scatter: return "SingularWithinScatter";
    case ErrorCode::too_few_groups: return "TooFewGroups";
    case ErrorCode::label_mismatch: return "LabelMismatch";
    case ErrorCode::design_mismatch: return "DesignMismatch";
    case ErrorCode::empty_unit: return "EmptyUnit";
    case ErrorCode::domain_error: return "DomainError";
    case ErrorCode::invalid_graph: return "InvalidGraph";
    case ErrorCode::invalid_spec: return "InvalidSpec";
    case ErrorCode::non_integer_cycles: return "NonIntegerCycles";
    case ErrorCode::frequency_not_resolvable: return "FrequencyNotResolvable";
    case ErrorCode::parse_error: return "ParseError";
    case ErrorCode::io_error: return "IoError";
  }
  return "Unknown";
}

bool is_statistical(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::too_few_observations:
    case ErrorCode::degenerate_covariance:
    case ErrorCode::zero_residual_variance:
    case ErrorCode::singular_within_scatter:
    case ErrorCode::too_few_groups:
    case ErrorCode::empty_unit:
      return true;
    default:
      return false;
  }
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace phasestat
