#pragma once

// Special functions and reference distributions: the regularized incomplete
// beta function, the F distribution, and the two condition-index densities
// for bivariate samples.

#include <functional>

namespace phasestat {

/// Regularized incomplete beta I_x(a, b), a, b > 0, x in [0, 1].
/// Continued-fraction evaluation (modified Lentz).
double incomplete_beta(double a, double b, double x);

struct FParams {
  int df1{1};
  int df2{1};
  bool operator==(const FParams&) const = default;
};

/// P(F <= x). Throws DomainError for x < 0 or df < 1.
double f_cdf(double x, FParams params);
/// Upper tail P(F > x), computed directly so small p-values keep precision.
double f_sf(double x, FParams params);
/// Inverse of f_cdf for p in [0, 1).
double f_quantile(double p, FParams params);

enum class CiDensityVariant {
  /// (N-1) 2^(N-1) (x^2-1) / (x^2+1)^N x^(N-2)
  edelman,
  /// (N-2) 2^(N-2) (x^2-1) / (x^2+1)^(N-1) x^(N-3); tracks simulated
  /// condition indices of N-point centred samples.
  modified,
};

struct ConditionIndexDensity {
  int n{3};
  CiDensityVariant variant{CiDensityVariant::modified};
};

/// Density of the condition index at x >= 1.
double ci_pdf(double x, ConditionIndexDensity density);
/// Integral of ci_pdf over [1, x]; x may be +infinity.
double ci_cdf(double x, ConditionIndexDensity density);
/// Integral of ci_pdf over [x, infinity).
double ci_sf(double x, ConditionIndexDensity density);
/// Smallest x with ci_cdf(x) = p, p in [0, 1).
double ci_quantile(double p, ConditionIndexDensity density);

/// Quantile of the chi-square distribution with two degrees of freedom.
double chi2_2df_quantile(double p);

/// Adaptive Gauss-Kronrod (7/15) integration of f over [a, b] to the given
/// absolute tolerance.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double abs_tol = 1e-13);

}  // namespace phasestat
