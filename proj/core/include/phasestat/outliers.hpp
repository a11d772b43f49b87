#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "phasestat/sample.hpp"

namespace phasestat {

inline constexpr double kDefaultOutlierThreshold = 3.0;

struct OutlierReport {
  std::string condition;
  /// Mahalanobis distance D (not D^2) of each observation from the mean.
  std::vector<double> distances;
  /// Indices with D > threshold.
  std::vector<std::size_t> flagged;
  double threshold{kDefaultOutlierThreshold};
  std::vector<std::string> excluded_units;

  bool operator==(const OutlierReport&) const = default;
};

/// D_j = sqrt((x_j - mean)' C^-1 (x_j - mean)) with the N-1 covariance.
/// Throws TooFewObservations (N < 3) or DegenerateCovariance.
OutlierReport mahalanobis_distances(const ComplexSample& sample,
                                    double threshold = kDefaultOutlierThreshold);

struct OutlierScreening {
  GroupedDataset dataset;
  std::vector<OutlierReport> per_condition;
  /// Units removed from every condition (unit-matched designs only).
  std::vector<std::string> excluded_units;
  std::size_t removed_observations{0};
  std::vector<std::string> warnings;
};

/// Single-pass screening: distances are computed once per condition with
/// every point included. Unit-matched designs drop a unit from all
/// conditions when any of its observations is flagged; independent designs
/// drop individual observations.
OutlierScreening exclude_outliers(const GroupedDataset& dataset,
                                  double threshold = kDefaultOutlierThreshold);

/// Distance between two group means scaled by the (N-1)-weighted pooled
/// covariance; a bivariate analogue of Cohen's d. When the pooled
/// covariance is rank one and the mean difference lies along its
/// non-degenerate axis, the univariate effect size on that axis is returned.
double pairwise_mahalanobis(const ComplexSample& a, const ComplexSample& b);

/// Mahalanobis distance of the sample mean from mu using the sample
/// covariance (one-sample effect size).
double mahalanobis_from_point(const ComplexSample& sample, ComplexObservation mu);

}  // namespace phasestat
