#pragma once

// Amplitude summaries of a coherent (complex) mean with error bounds.

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "phasestat/sample.hpp"

namespace phasestat {

enum class AmplitudeMethod { ellipse_se, bootstrap };

std::string_view to_string(AmplitudeMethod method) noexcept;

struct AmplitudeSummary {
  double mean_amplitude{0.0};
  /// arg of the mean, in (-pi, pi].
  double mean_phase{0.0};
  double error_low{0.0};
  double error_high{0.0};
  /// Ellipse method only: the origin lies inside the error ellipse, so
  /// error_low was set to 0.
  bool origin_inside{false};
  AmplitudeMethod method{AmplitudeMethod::ellipse_se};
  double level{0.68};

  bool operator==(const AmplitudeSummary&) const = default;
};

/// Nearest and farthest distance from the origin to the standard-error
/// ellipse of the mean (covariance / N, radius sqrt(chi2_2 quantile(level))).
/// Throws TooFewObservations (N < 3) or DegenerateCovariance.
AmplitudeSummary amp_errors_ellipse(const ComplexSample& sample, double level);

/// Percentile bootstrap of the resampled mean amplitude. Resample indices
/// depend only on (seed, N, replicate), never on the data.
AmplitudeSummary amp_ci_bootstrap(const ComplexSample& sample, double level,
                                  std::size_t n_boot = 10000, std::uint64_t seed = 0);

/// The resampled mean amplitudes behind amp_ci_bootstrap, in replicate order.
std::vector<double> bootstrap_amplitudes(const ComplexSample& sample, std::size_t n_boot,
                                         std::uint64_t seed);

/// Linear-interpolation quantile (type 7) of sorted data.
double quantile_sorted(const std::vector<double>& sorted, double p);

}  // namespace phasestat
