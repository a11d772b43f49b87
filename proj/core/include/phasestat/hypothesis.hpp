#pragma once

// Multivariate tests on complex Fourier components.
//
// Every F-based result reports p = P(F > f_value) for its degrees of freedom.
// Tests that need an invertible covariance throw DegenerateCovariance rather
// than falling back to a pseudo-inverse.

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "phasestat/distributions.hpp"
#include "phasestat/sample.hpp"

namespace phasestat {

enum class Statistic { t2, t2circ, anova2circ, manova_pillai, ci_test };

std::string_view to_string(Statistic statistic) noexcept;
std::optional<Statistic> statistic_from_string(std::string_view text) noexcept;

struct TestResult {
  Statistic statistic_name{Statistic::t2};
  double statistic{0.0};
  /// Absent for the condition-index test, which is not F-distributed.
  std::optional<double> f_value;
  std::optional<FParams> df;
  double p_value{1.0};
  /// Pairwise Mahalanobis D when attached by the caller.
  std::optional<double> effect_size;
  std::vector<std::size_t> n_per_group;

  bool operator==(const TestResult&) const = default;
};

TestResult t2_one_sample(const ComplexSample& sample, ComplexObservation mu = {0.0, 0.0});
TestResult t2circ_one_sample(const ComplexSample& sample, ComplexObservation mu = {0.0, 0.0});

TestResult t2_two_sample(const ComplexSample& a, const ComplexSample& b);
TestResult t2circ_two_sample(const ComplexSample& a, const ComplexSample& b);

/// Unit-wise differences a - b after aligning b to a's unit labels.
ComplexSample paired_differences(const ComplexSample& a, const ComplexSample& b);

/// One-sample tests of the paired differences against the origin.
TestResult t2_paired(const ComplexSample& a, const ComplexSample& b);
TestResult t2circ_paired(const ComplexSample& a, const ComplexSample& b);

/// Condition-index test of the equal-variance, zero-correlation assumption.
/// p is the upper tail of the modified density at n = N.
TestResult ci_test(const ComplexSample& sample);

TestResult anova2circ_independent(std::span<const ComplexSample> groups);
/// Groups must share unit labels (or be position-aligned when unlabelled).
TestResult anova2circ_repeated(std::span<const ComplexSample> groups);

/// One-way MANOVA on (re, im) using Pillai's trace and its F approximation.
TestResult manova_oneway(std::span<const ComplexSample> groups);

}  // namespace phasestat
