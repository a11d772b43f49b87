#include "phasestat/outliers.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "phasestat/errors.hpp"

namespace phasestat {

namespace {

std::string unit_key(const ComplexSample& s, std::size_t i) {
  return s.has_unit_labels() ? s.unit_labels()[i] : "#" + std::to_string(i);
}

}  // namespace

OutlierReport mahalanobis_distances(const ComplexSample& sample, double threshold) {
  if (!(threshold > 0.0)) throw Error(ErrorCode::domain_error, "outlier threshold must be > 0");
  if (sample.size() < 3) {
    throw Error(ErrorCode::too_few_observations,
                "Mahalanobis distances need N >= 3, condition '" + sample.condition_label() +
                    "' has " + std::to_string(sample.size()));
  }
  const CovarianceSummary cs = covariance_summary(sample);
  if (cs.degenerate) {
    throw Error(ErrorCode::degenerate_covariance,
                "Mahalanobis distances: covariance of condition '" + sample.condition_label() +
                    "' is singular");
  }
  OutlierReport report;
  report.condition = sample.condition_label();
  report.threshold = threshold;
  report.distances.reserve(sample.size());
  for (std::size_t j = 0; j < sample.size(); ++j) {
    const double d2 = cs.cov.inverse_quadratic(sample[j] - cs.mean);
    const double d = std::sqrt(std::max(d2, 0.0));
    report.distances.push_back(d);
    if (d > threshold) report.flagged.push_back(j);
  }
  return report;
}

OutlierScreening exclude_outliers(const GroupedDataset& dataset, double threshold) {
  const auto& samples = dataset.samples();
  std::vector<OutlierReport> reports;
  std::vector<std::string> warnings;
  reports.reserve(samples.size());
  for (const auto& s : samples) {
    try {
      reports.push_back(mahalanobis_distances(s, threshold));
    } catch (const Error& e) {
      if (!is_statistical(e.code())) throw;
      OutlierReport skipped;
      skipped.condition = s.condition_label();
      skipped.threshold = threshold;
      reports.push_back(std::move(skipped));
      warnings.push_back("outlier screening skipped for condition '" + s.condition_label() +
                         "': " + e.what());
    }
  }

  std::vector<ComplexSample> kept;
  kept.reserve(samples.size());
  std::size_t removed = 0;
  std::vector<std::string> excluded;

  if (is_unit_matched(dataset.design())) {
    std::set<std::size_t> drop;
    for (const auto& r : reports) drop.insert(r.flagged.begin(), r.flagged.end());
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < samples.front().size(); ++i) {
      if (drop.count(i) == 0) {
        keep.push_back(i);
      } else {
        excluded.push_back(unit_key(samples.front(), i));
      }
    }
    for (const auto& s : samples) {
      kept.push_back(s.subset(keep));
      removed += s.size() - keep.size();
    }
    for (auto& r : reports) {
      for (std::size_t i : r.flagged) r.excluded_units.push_back(unit_key(samples.front(), i));
    }
  } else {
    for (std::size_t g = 0; g < samples.size(); ++g) {
      const auto& s = samples[g];
      std::vector<std::size_t> keep;
      const auto& flagged = reports[g].flagged;
      for (std::size_t i = 0; i < s.size(); ++i) {
        if (!std::binary_search(flagged.begin(), flagged.end(), i)) keep.push_back(i);
      }
      for (std::size_t i : flagged) {
        reports[g].excluded_units.push_back(unit_key(s, i));
        excluded.push_back(unit_key(s, i));
      }
      removed += flagged.size();
      kept.push_back(s.subset(keep));
    }
  }

  for (const auto& s : kept) {
    if (s.empty()) warnings.push_back("condition '" + s.condition_label() + "' is empty after outlier exclusion");
  }
  return OutlierScreening{GroupedDataset(std::move(kept), dataset.design(), dataset.mu()),
                          std::move(reports), std::move(excluded), removed, std::move(warnings)};
}

double pairwise_mahalanobis(const ComplexSample& a, const ComplexSample& b) {
  if (a.size() < 3 || b.size() < 3) {
    throw Error(ErrorCode::too_few_observations, "pairwise Mahalanobis distance needs N >= 3 per group");
  }
  const ComplexObservation ma = a.mean();
  const ComplexObservation mb = b.mean();
  SymMat2 scatter;
  for (const auto& x : a.observations()) scatter = scatter + outer(x - ma);
  for (const auto& x : b.observations()) scatter = scatter + outer(x - mb);
  const SymMat2 pooled = (1.0 / static_cast<double>(a.size() + b.size() - 2)) * scatter;
  const ComplexObservation diff = ma - mb;

  const Eigen2 eig = eigen_decompose(pooled);
  if (eig.lambda_min > kDegenerateRelTol * pooled.trace()) {
    return std::sqrt(std::max(pooled.inverse_quadratic(diff), 0.0));
  }
  if (!(eig.lambda_max > 0.0)) {
    throw Error(ErrorCode::degenerate_covariance, "pairwise Mahalanobis: pooled covariance is zero");
  }
  // Rank one: defined only when the means differ along the spread axis.
  const double along = diff.real() * eig.v_max.x + diff.imag() * eig.v_max.y;
  const double across = diff.real() * eig.v_min.x + diff.imag() * eig.v_min.y;
  if (std::fabs(across) > 1e-9 * std::max(std::abs(diff), std::sqrt(eig.lambda_max))) {
    throw Error(ErrorCode::degenerate_covariance,
                "pairwise Mahalanobis: means differ along a zero-variance axis");
  }
  return std::fabs(along) / std::sqrt(eig.lambda_max);
}

double mahalanobis_from_point(const ComplexSample& sample, ComplexObservation mu) {
  if (sample.size() < 3) {
    throw Error(ErrorCode::too_few_observations, "Mahalanobis distance needs N >= 3");
  }
  const CovarianceSummary cs = covariance_summary(sample);
  if (cs.degenerate) {
    throw Error(ErrorCode::degenerate_covariance, "Mahalanobis distance: covariance is singular");
  }
  return std::sqrt(std::max(cs.cov.inverse_quadratic(cs.mean - mu), 0.0));
}

}  // namespace phasestat
