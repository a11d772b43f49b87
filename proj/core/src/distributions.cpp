#include "phasestat/distributions.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "phasestat/errors.hpp"

namespace phasestat {

namespace {

constexpr double kBetaRelTol = 1e-15;
constexpr int kBetaMaxIter = 500;
constexpr double kTiny = 1e-300;

// Continued fraction for I_x(a, b), valid for x < (a + 1) / (a + b + 2).
double beta_continued_fraction(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kBetaMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kBetaRelTol) break;
  }
  return h;
}

void check_f_params(FParams params) {
  if (params.df1 < 1 || params.df2 < 1) {
    throw Error(ErrorCode::domain_error, "F degrees of freedom must be >= 1, got (" +
                                             std::to_string(params.df1) + ", " +
                                             std::to_string(params.df2) + ")");
  }
}

void check_density(ConditionIndexDensity density) {
  const int min_n = density.variant == CiDensityVariant::modified ? 3 : 2;
  if (density.n < min_n) {
    throw Error(ErrorCode::domain_error,
                "condition-index density needs n >= " + std::to_string(min_n));
  }
}

// Both densities share the form c (x^2-1) x^(e-1) / (x^2+1)^e with
// c = (e-1) 2^(e-1): e = N for the Edelman form, N - 1 for the modified one.
int density_exponent(ConditionIndexDensity density) {
  return density.variant == CiDensityVariant::edelman ? density.n : density.n - 1;
}

double pdf_unchecked(double x, int e) {
  if (x <= 1.0 || !std::isfinite(x)) return 0.0;
  const double log_pdf = std::log(static_cast<double>(e - 1)) + (e - 1) * std::log(2.0) +
                         std::log((x - 1.0) * (x + 1.0)) - e * std::log1p(x * x) +
                         (e - 2) * std::log(x);
  return std::exp(log_pdf);
}

// Substituting x = 1/t maps [1, inf) onto (0, 1]; the transformed integrand
// pdf(1/t) / t^2 is smooth and vanishes at both ends.
double tail_integrand(double t, int e) {
  if (t <= 0.0) return 0.0;
  return pdf_unchecked(1.0 / t, e) / (t * t);
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0) || !(x >= 0.0 && x <= 1.0)) {
    throw Error(ErrorCode::domain_error, "incomplete_beta argument out of range");
  }
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_continued_fraction(a, b, x) / a;
  }
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double f_cdf(double x, FParams params) {
  check_f_params(params);
  if (!(x >= 0.0)) throw Error(ErrorCode::domain_error, "f_cdf requires x >= 0");
  if (std::isinf(x)) return 1.0;
  const double d1x = params.df1 * x;
  return incomplete_beta(0.5 * params.df1, 0.5 * params.df2, d1x / (d1x + params.df2));
}

double f_sf(double x, FParams params) {
  check_f_params(params);
  if (!(x >= 0.0)) throw Error(ErrorCode::domain_error, "f_sf requires x >= 0");
  if (std::isinf(x)) return 0.0;
  const double d1x = params.df1 * x;
  return incomplete_beta(0.5 * params.df2, 0.5 * params.df1, params.df2 / (d1x + params.df2));
}

double f_quantile(double p, FParams params) {
  check_f_params(params);
  if (!(p >= 0.0 && p < 1.0)) throw Error(ErrorCode::domain_error, "f_quantile requires p in [0, 1)");
  if (p == 0.0) return 0.0;
  double lo = 0.0;
  double hi = 1.0;
  while (f_cdf(hi, params) < p) {
    lo = hi;
    hi *= 2.0;
  }
  for (int i = 0; i < 200 && hi - lo > 1e-13 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f_cdf(mid, params) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double abs_tol) {
  static constexpr std::array<double, 8> xgk = {
      0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
      0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
      0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
      0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
  static constexpr std::array<double, 8> wgk = {
      0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
      0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
      0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
      0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
  static constexpr std::array<double, 4> wg = {
      0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
      0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

  struct Piece {
    double lo;
    double hi;
    int depth;
  };
  const double total_width = b - a;
  if (total_width == 0.0) return 0.0;

  double result = 0.0;
  std::array<Piece, 128> stack{};
  std::size_t top = 0;
  stack[top++] = {a, b, 0};
  while (top > 0) {
    const Piece piece = stack[--top];
    const double centre = 0.5 * (piece.lo + piece.hi);
    const double half = 0.5 * (piece.hi - piece.lo);
    const double fc = f(centre);
    double kronrod = wgk[7] * fc;
    double gauss = wg[3] * fc;
    for (int j = 0; j < 7; ++j) {
      const double dx = half * xgk[j];
      const double sum = f(centre - dx) + f(centre + dx);
      kronrod += wgk[j] * sum;
      if (j % 2 == 1) gauss += wg[j / 2] * sum;
    }
    kronrod *= half;
    gauss *= half;
    const double err = std::fabs(kronrod - gauss);
    const double budget = abs_tol * (piece.hi - piece.lo) / total_width;
    if (err <= budget || piece.depth >= 60 || top + 2 > stack.size()) {
      result += kronrod;
    } else {
      stack[top++] = {piece.lo, centre, piece.depth + 1};
      stack[top++] = {centre, piece.hi, piece.depth + 1};
    }
  }
  return result;
}

double ci_pdf(double x, ConditionIndexDensity density) {
  check_density(density);
  if (!(x >= 1.0)) throw Error(ErrorCode::domain_error, "ci_pdf requires x >= 1");
  return pdf_unchecked(x, density_exponent(density));
}

double ci_cdf(double x, ConditionIndexDensity density) {
  check_density(density);
  if (!(x >= 1.0)) throw Error(ErrorCode::domain_error, "ci_cdf requires x >= 1");
  if (x == 1.0) return 0.0;
  const int e = density_exponent(density);
  const double t_lo = std::isinf(x) ? 0.0 : 1.0 / x;
  const double v = integrate_adaptive([e](double t) { return tail_integrand(t, e); }, t_lo, 1.0);
  return std::min(std::max(v, 0.0), 1.0);
}

double ci_sf(double x, ConditionIndexDensity density) {
  check_density(density);
  if (!(x >= 1.0)) throw Error(ErrorCode::domain_error, "ci_sf requires x >= 1");
  if (std::isinf(x)) return 0.0;
  const int e = density_exponent(density);
  const double v =
      integrate_adaptive([e](double t) { return tail_integrand(t, e); }, 0.0, 1.0 / x);
  return std::min(std::max(v, 0.0), 1.0);
}

double ci_quantile(double p, ConditionIndexDensity density) {
  check_density(density);
  if (!(p >= 0.0 && p < 1.0)) throw Error(ErrorCode::domain_error, "ci_quantile requires p in [0, 1)");
  if (p == 0.0) return 1.0;
  double lo = 1.0;
  double hi = 2.0;
  while (ci_cdf(hi, density) <= p) {
    lo = hi;
    hi *= 2.0;
  }
  while (hi - lo > 1e-12 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (ci_cdf(mid, density) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double chi2_2df_quantile(double p) {
  if (!(p >= 0.0 && p < 1.0)) throw Error(ErrorCode::domain_error, "chi-square quantile requires p in [0, 1)");
  return -2.0 * std::log1p(-p);
}

}  // namespace phasestat
