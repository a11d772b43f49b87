#include "phasestat/sample.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "phasestat/errors.hpp"

namespace phasestat {

double SymMat2::inverse_quadratic(ComplexObservation v) const noexcept {
  const double a = v.real();
  const double b = v.imag();
  return (yy * a * a - 2.0 * xy * a * b + xx * b * b) / det();
}

SymMat2 outer(ComplexObservation v) noexcept {
  return {v.real() * v.real(), v.real() * v.imag(), v.imag() * v.imag()};
}

Eigen2 eigen_decompose(const SymMat2& m) noexcept {
  const double half_trace = 0.5 * (m.xx + m.yy);
  const double half_diff = 0.5 * (m.xx - m.yy);
  const double radius = std::hypot(half_diff, m.xy);

  Eigen2 out;
  out.lambda_max = half_trace + radius;
  // det / lambda_max avoids cancellation when the ellipse is very thin.
  out.lambda_min = out.lambda_max > 0.0 ? m.det() / out.lambda_max : half_trace - radius;
  const double theta = 0.5 * std::atan2(2.0 * m.xy, m.xx - m.yy);
  out.v_max = {std::cos(theta), std::sin(theta)};
  out.v_min = {-std::sin(theta), std::cos(theta)};
  return out;
}

ComplexSample::ComplexSample(std::vector<ComplexObservation> observations,
                             std::string condition_label,
                             std::vector<std::string> unit_labels)
    : observations_(std::move(observations)),
      condition_label_(std::move(condition_label)),
      unit_labels_(std::move(unit_labels)) {
  for (std::size_t i = 0; i < observations_.size(); ++i) {
    if (!std::isfinite(observations_[i].real()) || !std::isfinite(observations_[i].imag())) {
      throw Error(ErrorCode::domain_error,
                  "observation " + std::to_string(i) + " in condition '" + condition_label_ +
                      "' is not finite");
    }
  }
  if (!unit_labels_.empty() && unit_labels_.size() != observations_.size()) {
    throw Error(ErrorCode::label_mismatch,
                "condition '" + condition_label_ + "' has " + std::to_string(unit_labels_.size()) +
                    " unit labels for " + std::to_string(observations_.size()) + " observations");
  }
}

ComplexObservation ComplexSample::mean() const {
  if (observations_.empty()) {
    throw Error(ErrorCode::too_few_observations, "mean of an empty sample");
  }
  ComplexObservation sum{0.0, 0.0};
  for (const auto& x : observations_) sum += x;
  return sum / static_cast<double>(observations_.size());
}

ComplexSample ComplexSample::transformed(ComplexObservation a, ComplexObservation b) const {
  std::vector<ComplexObservation> out;
  out.reserve(observations_.size());
  for (const auto& x : observations_) out.push_back(a * x + b);
  return ComplexSample(std::move(out), condition_label_, unit_labels_);
}

ComplexSample ComplexSample::subset(std::span<const std::size_t> keep) const {
  std::vector<ComplexObservation> obs;
  std::vector<std::string> labels;
  obs.reserve(keep.size());
  for (std::size_t i : keep) {
    obs.push_back(observations_.at(i));
    if (has_unit_labels()) labels.push_back(unit_labels_[i]);
  }
  return ComplexSample(std::move(obs), condition_label_, std::move(labels));
}

CovarianceSummary covariance_summary(const ComplexSample& sample) {
  const std::size_t n = sample.size();
  if (n < 2) {
    throw Error(ErrorCode::too_few_observations,
                "covariance needs N >= 2, condition '" + sample.condition_label() + "' has " +
                    std::to_string(n));
  }
  CovarianceSummary s;
  s.mean = sample.mean();
  SymMat2 scatter;
  for (const auto& x : sample.observations()) scatter = scatter + outer(x - s.mean);
  s.cov = (1.0 / static_cast<double>(n - 1)) * scatter;

  const Eigen2 eig = eigen_decompose(s.cov);
  s.lambda_max = eig.lambda_max;
  s.lambda_min = std::max(eig.lambda_min, 0.0);
  s.eigenvectors = {eig.v_max, eig.v_min};
  const double floor = kDegenerateRelTol * s.cov.trace();
  s.degenerate = !(s.lambda_min > floor);
  s.condition_index = s.degenerate ? std::numeric_limits<double>::infinity()
                                   : std::sqrt(s.lambda_max / s.lambda_min);
  return s;
}

double residual_sum_of_squares(const ComplexSample& sample) {
  const ComplexObservation m = sample.mean();
  double ss = 0.0;
  for (const auto& x : sample.observations()) ss += std::norm(x - m);
  return ss;
}

ComplexSample coherent_mean(std::span<const ComplexSample> samples_per_unit) {
  std::vector<ComplexObservation> means;
  std::vector<std::string> labels;
  means.reserve(samples_per_unit.size());
  bool labelled = !samples_per_unit.empty();
  for (std::size_t u = 0; u < samples_per_unit.size(); ++u) {
    const auto& unit = samples_per_unit[u];
    if (unit.empty()) {
      throw Error(ErrorCode::empty_unit, "unit " + std::to_string(u) + " has no observations");
    }
    means.push_back(unit.mean());
    labelled = labelled && unit.has_unit_labels();
    if (labelled) labels.push_back(unit.unit_labels().front());
  }
  if (!labelled) labels.clear();
  std::string condition = samples_per_unit.empty() ? std::string{}
                                                   : samples_per_unit.front().condition_label();
  return ComplexSample(std::move(means), std::move(condition), std::move(labels));
}

std::string_view to_string(Design design) noexcept {
  switch (design) {
    case Design::one_sample: return "one_sample";
    case Design::two_sample_independent: return "two_sample_independent";
    case Design::paired: return "paired";
    case Design::oneway_independent: return "oneway_independent";
    case Design::oneway_repeated: return "oneway_repeated";
  }
  return "unknown";
}

std::optional<Design> design_from_string(std::string_view text) noexcept {
  for (Design d : {Design::one_sample, Design::two_sample_independent, Design::paired,
                   Design::oneway_independent, Design::oneway_repeated}) {
    if (text == to_string(d)) return d;
  }
  if (text == "two_sample") return Design::two_sample_independent;
  if (text == "oneway") return Design::oneway_independent;
  if (text == "repeated") return Design::oneway_repeated;
  return std::nullopt;
}

bool is_unit_matched(Design design) noexcept {
  return design == Design::paired || design == Design::oneway_repeated;
}

ComplexSample align_to(const ComplexSample& a, const ComplexSample& b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::label_mismatch,
                "conditions '" + a.condition_label() + "' and '" + b.condition_label() +
                    "' have different numbers of units");
  }
  if (!a.has_unit_labels() && !b.has_unit_labels()) return b;
  if (a.has_unit_labels() != b.has_unit_labels()) {
    throw Error(ErrorCode::label_mismatch, "only one of the matched conditions carries unit labels");
  }
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (!index.emplace(b.unit_labels()[i], i).second) {
      throw Error(ErrorCode::label_mismatch, "duplicate unit label '" + b.unit_labels()[i] +
                                                 "' in condition '" + b.condition_label() + "'");
    }
  }
  std::vector<std::size_t> order;
  order.reserve(a.size());
  for (const auto& label : a.unit_labels()) {
    auto it = index.find(label);
    if (it == index.end()) {
      throw Error(ErrorCode::label_mismatch, "unit '" + label + "' missing from condition '" +
                                                 b.condition_label() + "'");
    }
    order.push_back(it->second);
  }
  std::vector<ComplexObservation> obs;
  obs.reserve(order.size());
  for (std::size_t i : order) obs.push_back(b[i]);
  return ComplexSample(std::move(obs), b.condition_label(), a.unit_labels());
}

GroupedDataset::GroupedDataset(std::vector<ComplexSample> samples, Design design,
                               ComplexObservation mu)
    : samples_(std::move(samples)), design_(design), mu_(mu) {
  const std::size_t k = samples_.size();
  bool ok = false;
  switch (design_) {
    case Design::one_sample: ok = (k == 1); break;
    case Design::two_sample_independent:
    case Design::paired: ok = (k == 2); break;
    case Design::oneway_independent:
    case Design::oneway_repeated: ok = (k >= 2); break;
  }
  if (!ok) {
    throw Error(ErrorCode::design_mismatch, "design " + std::string(to_string(design_)) +
                                                " cannot hold " + std::to_string(k) + " conditions");
  }
  if (!std::isfinite(mu_.real()) || !std::isfinite(mu_.imag())) {
    throw Error(ErrorCode::domain_error, "comparison point mu is not finite");
  }
  if (is_unit_matched(design_)) {
    for (std::size_t g = 1; g < k; ++g) samples_[g] = align_to(samples_[0], samples_[g]);
  }
}

}  // namespace phasestat
