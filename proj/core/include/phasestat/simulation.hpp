#pragma once

// Seeded Monte Carlo engine for rejection rates, condition-index
// distributions, amplitude skew and outlier sensitivity.
//
// Every replicate draws from Rng::substream(seed, {cell, replicate}), so
// results do not depend on thread count or evaluation order.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace phasestat {

enum class SimTest { t2, t2circ, anova2circ, manova, ci_test };

std::string_view to_string(SimTest test) noexcept;
std::optional<SimTest> sim_test_from_string(std::string_view text) noexcept;

/// Bivariate normal generator. Each group is N(mu, Sigma) with
/// Sigma = [[1, r sqrt(v)], [r sqrt(v), v]]; the effect d is added to the
/// first axis of group 0 (of the only group when k = 1).
struct GeneratorSpec {
  double d{0.0};
  double r{0.0};
  double variance_ratio{1.0};
  int n{10};
  int k{1};
  /// Replace the last observation of group 0 with a point at this population
  /// Mahalanobis distance from its mean, at a uniform random angle.
  /// A distance of 0 plants nothing.
  std::optional<double> outlier_distance;

  bool operator==(const GeneratorSpec&) const = default;
};

struct SimulationSpec {
  GeneratorSpec generator;
  SimTest test{SimTest::t2circ};
  double alpha{0.05};
  std::size_t n_reps{10000};
  std::uint64_t seed{0};
  /// Worker threads; 0 picks the hardware concurrency. Results are identical
  /// for every value.
  unsigned threads{1};

  /// Throws InvalidSpec.
  void validate() const;
};

struct RateRow {
  SimTest test{SimTest::t2circ};
  GeneratorSpec generator;
  double alpha{0.05};
  std::size_t n_reps{0};
  std::size_t rejections{0};
  /// Replicates where the test could not be computed (counted as
  /// non-rejections).
  std::size_t failures{0};
  double rate{0.0};
  double se{0.0};

  bool operator==(const RateRow&) const = default;
};

/// A plain table of numbers and labels, emitted as CSV or JSON.
struct Table {
  /// monostate is an empty CSV field and a JSON null.
  using Cell = std::variant<std::monostate, double, std::string>;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  std::string to_csv() const;
  std::string to_json() const;
  bool operator==(const Table&) const = default;
};

struct RateTable {
  std::vector<RateRow> rows;

  Table table() const;
  std::string to_csv() const { return table().to_csv(); }
  std::string to_json() const { return table().to_json(); }
  bool operator==(const RateTable&) const = default;
};

/// One cell. `cell_index` selects the random stream; cells that share an
/// index see identical data regardless of the test applied.
RateRow simulate_cell(const SimulationSpec& spec, std::uint64_t cell_index = 0);
RateTable simulate_rates(const SimulationSpec& spec, std::uint64_t cell_index = 0);

/// Cartesian grid over (d, n, r, v) for each listed test. Cells are indexed
/// in d-major order; every test sees the same data in a given cell.
struct SimulationGrid {
  std::vector<double> d{0.0};
  std::vector<int> n{10};
  std::vector<double> r{0.0};
  std::vector<double> v{1.0};
  std::vector<SimTest> tests{SimTest::t2circ};
  int k{1};
  std::optional<double> outlier_distance;
  double alpha{0.05};
  std::size_t n_reps{10000};
  std::uint64_t seed{0};
  unsigned threads{1};
};

RateTable simulate_grid(const SimulationGrid& grid);

/// Condition indices of n_reps spherical standard-normal samples of size n.
struct CiDistribution {
  int n{0};
  /// Sorted ascending.
  std::vector<double> values;

  double quantile(double p) const;
  double cdf(double x) const;
};

CiDistribution simulate_ci_distribution(int n, std::size_t n_reps, std::uint64_t seed);

struct AmplitudeSkew {
  std::vector<double> amplitudes;
  double mean{0.0};
  double sd{0.0};
  /// Moment coefficient of skewness g1.
  double skewness{0.0};
};

/// Amplitudes of single unit-variance isotropic draws with mean (d, 0).
AmplitudeSkew simulate_amplitude_skew(double d, std::size_t n_reps, std::uint64_t seed);

/// Condition-index test rejection rate for spherical null samples of size n
/// with one planted outlier at Mahalanobis distance outlier_d.
RateRow simulate_outlier_effect(int n, double outlier_d, std::size_t n_reps, std::uint64_t seed,
                                double alpha = 0.05);

/// Named figure reproductions: fig2, fig3, fig4a, fig4b, fig5, fig6, fig7.
std::vector<std::string> figure_names();
Table run_figure(std::string_view name, std::size_t n_reps, std::uint64_t seed,
                 unsigned threads = 1);

}  // namespace phasestat
