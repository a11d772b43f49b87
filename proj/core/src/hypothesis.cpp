#include "phasestat/hypothesis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

#include "phasestat/errors.hpp"

namespace phasestat {

namespace {

void require_size(const ComplexSample& s, std::size_t min_n, std::string_view what) {
  if (s.size() < min_n) {
    throw Error(ErrorCode::too_few_observations,
                std::string(what) + " needs N >= " + std::to_string(min_n) + ", condition '" +
                    s.condition_label() + "' has " + std::to_string(s.size()));
  }
}

void require_invertible(const SymMat2& m, std::string_view what) {
  const Eigen2 eig = eigen_decompose(m);
  if (!(eig.lambda_min > kDegenerateRelTol * m.trace())) {
    throw Error(ErrorCode::degenerate_covariance,
                std::string(what) + ": covariance is singular (observations are collinear)");
  }
}

SymMat2 scatter_matrix(const ComplexSample& s, ComplexObservation mean) {
  SymMat2 out;
  for (const auto& x : s.observations()) out = out + outer(x - mean);
  return out;
}

void require_residual_variance(double ss, double scale, std::string_view what) {
  if (!(ss > 1e-24 * scale) || ss == 0.0) {
    throw Error(ErrorCode::zero_residual_variance,
                std::string(what) + ": all observations coincide with their mean");
  }
}

double sum_sq_magnitude(const ComplexSample& s) {
  double total = 0.0;
  for (const auto& x : s.observations()) total += std::norm(x);
  return total;
}

TestResult f_result(Statistic name, double statistic, double f, FParams df,
                    std::vector<std::size_t> n_per_group) {
  TestResult r;
  r.statistic_name = name;
  r.statistic = statistic;
  r.f_value = f;
  r.df = df;
  r.p_value = f_sf(f, df);
  r.n_per_group = std::move(n_per_group);
  return r;
}

int as_int(std::size_t v) { return static_cast<int>(v); }

void require_groups(std::span<const ComplexSample> groups) {
  if (groups.size() < 2) {
    throw Error(ErrorCode::too_few_groups,
                "need at least 2 groups, got " + std::to_string(groups.size()));
  }
}

}  // namespace

std::string_view to_string(Statistic statistic) noexcept {
  switch (statistic) {
    case Statistic::t2: return "T2";
    case Statistic::t2circ: return "T2circ";
    case Statistic::anova2circ: return "ANOVA2circ";
    case Statistic::manova_pillai: return "MANOVA_pillai";
    case Statistic::ci_test: return "CI_test";
  }
  return "unknown";
}

std::optional<Statistic> statistic_from_string(std::string_view text) noexcept {
  for (Statistic s : {Statistic::t2, Statistic::t2circ, Statistic::anova2circ,
                      Statistic::manova_pillai, Statistic::ci_test}) {
    if (text == to_string(s)) return s;
  }
  if (text == "t2") return Statistic::t2;
  if (text == "t2circ") return Statistic::t2circ;
  if (text == "anova2circ") return Statistic::anova2circ;
  if (text == "manova" || text == "MANOVA") return Statistic::manova_pillai;
  if (text == "ci" || text == "ci_test") return Statistic::ci_test;
  return std::nullopt;
}

TestResult t2_one_sample(const ComplexSample& sample, ComplexObservation mu) {
  require_size(sample, 3, "T2");
  const CovarianceSummary cs = covariance_summary(sample);
  require_invertible(cs.cov, "T2");
  const std::size_t n = sample.size();
  const double nd = static_cast<double>(n);
  const double t2 = nd * cs.cov.inverse_quadratic(cs.mean - mu);
  const double f = (nd - 2.0) / (2.0 * (nd - 1.0)) * t2;
  return f_result(Statistic::t2, t2, f, {2, as_int(n) - 2}, {n});
}

TestResult t2circ_one_sample(const ComplexSample& sample, ComplexObservation mu) {
  require_size(sample, 2, "T2circ");
  const std::size_t n = sample.size();
  const double nd = static_cast<double>(n);
  const ComplexObservation mean = sample.mean();
  const double ss = residual_sum_of_squares(sample);
  require_residual_variance(ss, sum_sq_magnitude(sample), "T2circ");
  const double t2c = (nd - 1.0) * std::norm(mean - mu) / ss;
  return f_result(Statistic::t2circ, t2c, nd * t2c, {2, 2 * as_int(n) - 2}, {n});
}

TestResult t2_two_sample(const ComplexSample& a, const ComplexSample& b) {
  require_size(a, 3, "two-sample T2");
  require_size(b, 3, "two-sample T2");
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const ComplexObservation ma = a.mean();
  const ComplexObservation mb = b.mean();
  const SymMat2 pooled =
      (1.0 / (na + nb - 2.0)) * (scatter_matrix(a, ma) + scatter_matrix(b, mb));
  require_invertible(pooled, "two-sample T2");
  const double t2 = na * nb / (na + nb) * pooled.inverse_quadratic(ma - mb);
  const double f = (na + nb - 3.0) / (2.0 * (na + nb - 2.0)) * t2;
  return f_result(Statistic::t2, t2, f, {2, as_int(a.size() + b.size()) - 3},
                  {a.size(), b.size()});
}

TestResult t2circ_two_sample(const ComplexSample& a, const ComplexSample& b) {
  require_size(a, 2, "two-sample T2circ");
  require_size(b, 2, "two-sample T2circ");
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double ss = residual_sum_of_squares(a) + residual_sum_of_squares(b);
  require_residual_variance(ss, sum_sq_magnitude(a) + sum_sq_magnitude(b), "two-sample T2circ");
  const double t2c = (na + nb - 2.0) * std::norm(a.mean() - b.mean()) / ss;
  const double f = na * nb / (na + nb) * t2c;
  return f_result(Statistic::t2circ, t2c, f, {2, 2 * (as_int(a.size() + b.size()) - 2)},
                  {a.size(), b.size()});
}

ComplexSample paired_differences(const ComplexSample& a, const ComplexSample& b) {
  const ComplexSample aligned = align_to(a, b);
  std::vector<ComplexObservation> diff;
  diff.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) diff.push_back(a[i] - aligned[i]);
  return ComplexSample(std::move(diff), a.condition_label() + "-" + b.condition_label(),
                       a.unit_labels());
}

TestResult t2_paired(const ComplexSample& a, const ComplexSample& b) {
  TestResult r = t2_one_sample(paired_differences(a, b));
  r.n_per_group = {a.size(), b.size()};
  return r;
}

TestResult t2circ_paired(const ComplexSample& a, const ComplexSample& b) {
  TestResult r = t2circ_one_sample(paired_differences(a, b));
  r.n_per_group = {a.size(), b.size()};
  return r;
}

TestResult ci_test(const ComplexSample& sample) {
  require_size(sample, 3, "condition-index test");
  const CovarianceSummary cs = covariance_summary(sample);
  if (cs.degenerate) {
    throw Error(ErrorCode::degenerate_covariance,
                "condition-index test: covariance of condition '" + sample.condition_label() +
                    "' is singular");
  }
  TestResult r;
  r.statistic_name = Statistic::ci_test;
  r.statistic = cs.condition_index;
  r.p_value = ci_sf(cs.condition_index, {as_int(sample.size()), CiDensityVariant::modified});
  r.n_per_group = {sample.size()};
  return r;
}

TestResult anova2circ_independent(std::span<const ComplexSample> groups) {
  require_groups(groups);
  std::size_t total = 0;
  ComplexObservation grand_sum{0.0, 0.0};
  double scale = 0.0;
  std::vector<std::size_t> sizes;
  for (const auto& g : groups) {
    require_size(g, 2, "ANOVA2circ");
    total += g.size();
    for (const auto& x : g.observations()) grand_sum += x;
    scale += sum_sq_magnitude(g);
    sizes.push_back(g.size());
  }
  const ComplexObservation grand = grand_sum / static_cast<double>(total);
  double ss_model = 0.0;
  double ss_resid = 0.0;
  for (const auto& g : groups) {
    ss_model += static_cast<double>(g.size()) * std::norm(g.mean() - grand);
    ss_resid += residual_sum_of_squares(g);
  }
  require_residual_variance(ss_resid, scale, "ANOVA2circ");
  const int k = as_int(groups.size());
  const FParams df{2 * (k - 1), 2 * (as_int(total) - k)};
  const double f = (ss_model / df.df1) / (ss_resid / df.df2);
  return f_result(Statistic::anova2circ, f, f, df, std::move(sizes));
}

TestResult anova2circ_repeated(std::span<const ComplexSample> groups) {
  require_groups(groups);
  std::vector<ComplexSample> aligned;
  aligned.reserve(groups.size());
  aligned.push_back(groups[0]);
  for (std::size_t g = 1; g < groups.size(); ++g) aligned.push_back(align_to(groups[0], groups[g]));
  for (const auto& g : aligned) require_size(g, 2, "repeated-measures ANOVA2circ");

  const std::size_t n = aligned[0].size();
  const std::size_t k = aligned.size();
  std::vector<ComplexObservation> cond_means(k);
  std::vector<ComplexObservation> unit_means(n, {0.0, 0.0});
  ComplexObservation grand{0.0, 0.0};
  double scale = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    cond_means[c] = aligned[c].mean();
    grand += cond_means[c];
    scale += sum_sq_magnitude(aligned[c]);
    for (std::size_t i = 0; i < n; ++i) unit_means[i] += aligned[c][i];
  }
  grand /= static_cast<double>(k);
  for (auto& m : unit_means) m /= static_cast<double>(k);

  double ss_model = 0.0;
  double ss_resid = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    ss_model += static_cast<double>(n) * std::norm(cond_means[c] - grand);
    for (std::size_t i = 0; i < n; ++i) {
      ss_resid += std::norm(aligned[c][i] - cond_means[c] - unit_means[i] + grand);
    }
  }
  require_residual_variance(ss_resid, scale, "repeated-measures ANOVA2circ");
  const FParams df{2 * (as_int(k) - 1), 2 * (as_int(n) - 1) * (as_int(k) - 1)};
  const double f = (ss_model / df.df1) / (ss_resid / df.df2);
  return f_result(Statistic::anova2circ, f, f, df, std::vector<std::size_t>(k, n));
}

TestResult manova_oneway(std::span<const ComplexSample> groups) {
  require_groups(groups);
  std::size_t total = 0;
  ComplexObservation grand_sum{0.0, 0.0};
  std::vector<std::size_t> sizes;
  for (const auto& g : groups) {
    require_size(g, 1, "MANOVA");
    total += g.size();
    for (const auto& x : g.observations()) grand_sum += x;
    sizes.push_back(g.size());
  }
  const int k = as_int(groups.size());
  if (as_int(total) <= k + 2) {
    throw Error(ErrorCode::too_few_observations,
                "MANOVA needs total N > k + 2, got N = " + std::to_string(total));
  }
  const ComplexObservation grand = grand_sum / static_cast<double>(total);
  SymMat2 hyp;
  SymMat2 err;
  for (const auto& g : groups) {
    const ComplexObservation m = g.mean();
    hyp = hyp + static_cast<double>(g.size()) * outer(m - grand);
    err = err + scatter_matrix(g, m);
  }
  const Eigen2 e_eig = eigen_decompose(err);
  if (!(e_eig.lambda_min > kDegenerateRelTol * err.trace())) {
    throw Error(ErrorCode::singular_within_scatter, "MANOVA: within-group scatter is singular");
  }
  // Pillai's trace tr(H (H + E)^-1) for 2x2 matrices via the adjugate.
  const SymMat2 t = hyp + err;
  const double pillai =
      (hyp.xx * t.yy - 2.0 * hyp.xy * t.xy + hyp.yy * t.xx) / t.det();

  constexpr int p = 2;
  const int q = k - 1;
  const int s = std::min(p, q);
  const FParams df{s * (std::abs(p - q) + s), s * (as_int(total) - k - 2 + s)};
  double f = std::numeric_limits<double>::infinity();
  if (pillai < s) {
    f = (static_cast<double>(df.df2) / df.df1) * pillai / (s - pillai);
  }
  return f_result(Statistic::manova_pillai, pillai, std::max(f, 0.0), df, std::move(sizes));
}

}  // namespace phasestat
