#include "phasestat/amplitude.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>

#include "phasestat/distributions.hpp"
#include "phasestat/errors.hpp"
#include "phasestat/random.hpp"

namespace phasestat {

namespace {

constexpr int kCoarseAngles = 64;
constexpr int kRestarts = 3;
constexpr double kAngleTol = 1e-10;

void check_level(double level) {
  if (!(level > 0.0 && level < 1.0)) {
    throw Error(ErrorCode::domain_error, "confidence level must lie in (0, 1)");
  }
}

double golden_section_min(const std::function<double(double)>& f, double lo, double hi) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = f(c);
  double fd = f(d);
  while (hi - lo > kAngleTol) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = f(d);
    }
  }
  return 0.5 * (lo + hi);
}

// Minimum of a 2*pi-periodic function: coarse scan, then golden-section
// refinement around the best few grid points.
double periodic_min(const std::function<double(double)>& f) {
  const double step = 2.0 * std::numbers::pi / kCoarseAngles;
  std::array<std::pair<double, int>, kCoarseAngles> grid{};
  for (int i = 0; i < kCoarseAngles; ++i) grid[i] = {f(i * step), i};
  std::partial_sort(grid.begin(), grid.begin() + kRestarts, grid.end());
  double best = grid[0].first;
  for (int r = 0; r < kRestarts; ++r) {
    const double centre = grid[r].second * step;
    const double t = golden_section_min(f, centre - step, centre + step);
    best = std::min({best, f(t)});
  }
  return best;
}

}  // namespace

std::string_view to_string(AmplitudeMethod method) noexcept {
  return method == AmplitudeMethod::ellipse_se ? "ellipse_se" : "bootstrap";
}

AmplitudeSummary amp_errors_ellipse(const ComplexSample& sample, double level) {
  check_level(level);
  if (sample.size() < 3) {
    throw Error(ErrorCode::too_few_observations, "ellipse error bars need N >= 3");
  }
  const CovarianceSummary cs = covariance_summary(sample);
  if (cs.degenerate) {
    throw Error(ErrorCode::degenerate_covariance, "ellipse error bars: covariance is singular");
  }
  const double n = static_cast<double>(sample.size());
  const double k2 = chi2_2df_quantile(level);
  const double k = std::sqrt(k2);
  const double a = k * std::sqrt(cs.lambda_max / n);
  const double b = k * std::sqrt(cs.lambda_min / n);
  const Vec2 u = cs.eigenvectors[0];
  const Vec2 v = cs.eigenvectors[1];
  const double mx = cs.mean.real();
  const double my = cs.mean.imag();

  const auto dist2 = [&](double t) {
    const double c = std::cos(t);
    const double s = std::sin(t);
    const double x = mx + a * c * u.x + b * s * v.x;
    const double y = my + a * c * u.y + b * s * v.y;
    return x * x + y * y;
  };

  AmplitudeSummary out;
  out.method = AmplitudeMethod::ellipse_se;
  out.level = level;
  out.mean_amplitude = std::abs(cs.mean);
  out.mean_phase = std::arg(cs.mean);
  const SymMat2 se_cov = (1.0 / n) * cs.cov;
  out.origin_inside = se_cov.inverse_quadratic(cs.mean) <= k2;
  out.error_low = out.origin_inside ? 0.0 : std::sqrt(periodic_min(dist2));
  out.error_high = std::sqrt(-periodic_min([&](double t) { return -dist2(t); }));
  return out;
}

std::vector<double> bootstrap_amplitudes(const ComplexSample& sample, std::size_t n_boot,
                                         std::uint64_t seed) {
  const std::size_t n = sample.size();
  if (n < 2) throw Error(ErrorCode::too_few_observations, "bootstrap needs N >= 2");
  if (n_boot < 1) throw Error(ErrorCode::domain_error, "n_boot must be >= 1");
  std::vector<double> amps;
  amps.reserve(n_boot);
  for (std::size_t r = 0; r < n_boot; ++r) {
    Rng rng = Rng::substream(seed, {static_cast<std::uint64_t>(r)});
    ComplexObservation sum{0.0, 0.0};
    for (std::size_t j = 0; j < n; ++j) sum += sample[rng.below(n)];
    amps.push_back(std::abs(sum / static_cast<double>(n)));
  }
  return amps;
}

double quantile_sorted(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) throw Error(ErrorCode::domain_error, "quantile of empty data");
  const double h = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

AmplitudeSummary amp_ci_bootstrap(const ComplexSample& sample, double level, std::size_t n_boot,
                                  std::uint64_t seed) {
  check_level(level);
  std::vector<double> amps = bootstrap_amplitudes(sample, n_boot, seed);
  std::sort(amps.begin(), amps.end());
  AmplitudeSummary out;
  out.method = AmplitudeMethod::bootstrap;
  out.level = level;
  const ComplexObservation m = sample.mean();
  out.mean_amplitude = std::abs(m);
  out.mean_phase = std::arg(m);
  out.error_low = quantile_sorted(amps, 0.5 * (1.0 - level));
  out.error_high = quantile_sorted(amps, 0.5 * (1.0 + level));
  return out;
}

}  // namespace phasestat
