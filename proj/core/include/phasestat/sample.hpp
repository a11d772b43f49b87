#pragma once

// Core value types: complex Fourier observations, per-condition samples,
// grouped designs and the 2x2 covariance summary shared by every test.

#include <array>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace phasestat {

/// One (real, imaginary) Fourier component.
using ComplexObservation = std::complex<double>;

/// Symmetric 2x2 matrix [[xx, xy], [xy, yy]] over (re, im).
struct SymMat2 {
  double xx{0.0};
  double xy{0.0};
  double yy{0.0};

  double trace() const noexcept { return xx + yy; }
  double det() const noexcept { return xx * yy - xy * xy; }
  /// v' M^-1 v. Caller guarantees det() != 0.
  double inverse_quadratic(ComplexObservation v) const noexcept;

  friend SymMat2 operator+(const SymMat2& a, const SymMat2& b) noexcept {
    return {a.xx + b.xx, a.xy + b.xy, a.yy + b.yy};
  }
  friend SymMat2 operator*(double s, const SymMat2& m) noexcept {
    return {s * m.xx, s * m.xy, s * m.yy};
  }
  bool operator==(const SymMat2&) const = default;
};

/// Outer product v v'.
SymMat2 outer(ComplexObservation v) noexcept;

struct Vec2 {
  double x{0.0};
  double y{0.0};
  bool operator==(const Vec2&) const = default;
};

struct Eigen2 {
  double lambda_max{0.0};
  double lambda_min{0.0};
  Vec2 v_max;  // unit eigenvector for lambda_max
  Vec2 v_min;
};

/// Closed-form eigendecomposition of a symmetric 2x2 matrix.
Eigen2 eigen_decompose(const SymMat2& m) noexcept;

/// An ordered set of observations for one condition.
///
/// Observations must be finite. Unit labels are optional; when present there
/// is exactly one per observation.
class ComplexSample {
 public:
  ComplexSample() = default;
  explicit ComplexSample(std::vector<ComplexObservation> observations,
                         std::string condition_label = {},
                         std::vector<std::string> unit_labels = {});
  ComplexSample(std::initializer_list<ComplexObservation> observations)
      : ComplexSample(std::vector<ComplexObservation>(observations)) {}

  std::span<const ComplexObservation> observations() const noexcept { return observations_; }
  const std::string& condition_label() const noexcept { return condition_label_; }
  const std::vector<std::string>& unit_labels() const noexcept { return unit_labels_; }
  bool has_unit_labels() const noexcept { return !unit_labels_.empty(); }
  std::size_t size() const noexcept { return observations_.size(); }
  bool empty() const noexcept { return observations_.empty(); }
  const ComplexObservation& operator[](std::size_t i) const { return observations_[i]; }

  ComplexObservation mean() const;

  /// Copy with every observation transformed as a*x + b.
  ComplexSample transformed(ComplexObservation a, ComplexObservation b) const;
  /// Copy keeping only the observations whose index is in `keep` (sorted).
  ComplexSample subset(std::span<const std::size_t> keep) const;

  bool operator==(const ComplexSample&) const = default;

 private:
  std::vector<ComplexObservation> observations_;
  std::string condition_label_;
  std::vector<std::string> unit_labels_;
};

/// Mean, N-1 covariance and bounding-ellipse eigenstructure of a sample.
struct CovarianceSummary {
  ComplexObservation mean;
  SymMat2 cov;
  double lambda_max{0.0};
  double lambda_min{0.0};
  std::array<Vec2, 2> eigenvectors{};
  /// sqrt(lambda_max / lambda_min); +infinity when degenerate.
  double condition_index{1.0};
  bool degenerate{false};

  bool operator==(const CovarianceSummary&) const = default;
};

/// Relative eigenvalue floor below which a covariance is degenerate.
inline constexpr double kDegenerateRelTol = 1e-12;

/// Throws TooFewObservations when N < 2.
CovarianceSummary covariance_summary(const ComplexSample& sample);

/// Per-unit complex (vector) mean across repetitions. Each input sample holds
/// the repetitions of one unit; the output has one observation per unit and
/// carries each unit's first unit label when every input is labelled.
/// Throws EmptyUnit.
ComplexSample coherent_mean(std::span<const ComplexSample> samples_per_unit);

/// Sum over j of |x_j - mean|^2.
double residual_sum_of_squares(const ComplexSample& sample);

enum class Design {
  one_sample,
  two_sample_independent,
  paired,
  oneway_independent,
  oneway_repeated,
};

std::string_view to_string(Design design) noexcept;
std::optional<Design> design_from_string(std::string_view text) noexcept;
bool is_unit_matched(Design design) noexcept;

/// A validated set of condition samples with a design.
///
/// For paired and oneway_repeated designs every sample is reordered so that
/// unit labels line up with the first sample's order.
class GroupedDataset {
 public:
  /// Throws DesignMismatch or LabelMismatch.
  GroupedDataset(std::vector<ComplexSample> samples, Design design,
                 ComplexObservation mu = {0.0, 0.0});

  const std::vector<ComplexSample>& samples() const noexcept { return samples_; }
  Design design() const noexcept { return design_; }
  ComplexObservation mu() const noexcept { return mu_; }
  std::size_t group_count() const noexcept { return samples_.size(); }

  bool operator==(const GroupedDataset&) const = default;

 private:
  std::vector<ComplexSample> samples_;
  Design design_;
  ComplexObservation mu_;
};

/// Reorder `b` so that its unit labels follow `a`. Unlabelled pairs of equal
/// size align by position. Throws LabelMismatch.
ComplexSample align_to(const ComplexSample& a, const ComplexSample& b);

}  // namespace phasestat
