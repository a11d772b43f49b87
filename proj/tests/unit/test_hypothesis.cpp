#include <gtest/gtest.h>

#include <boost/math/distributions/fisher_f.hpp>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "phasestat/errors.hpp"
#include "phasestat/hypothesis.hpp"

using namespace phasestat;

namespace {

ComplexSample sample_of(const std::vector<oracle::Point>& pts, std::string label = {}) {
  return ComplexSample(pts, std::move(label));
}

void expect_p_consistent(const TestResult& r) {
  ASSERT_TRUE(r.f_value && r.df);
  EXPECT_GE(*r.f_value, 0.0);
  EXPECT_GE(r.df->df1, 1);
  EXPECT_GE(r.df->df2, 1);
  EXPECT_GE(r.p_value, 0.0);
  EXPECT_LE(r.p_value, 1.0);
  EXPECT_NEAR(r.p_value, 1.0 - f_cdf(*r.f_value, *r.df), 1e-12);
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an exception";
  return ErrorCode::io_error;
}

}  // namespace

TEST(T2OneSample, MeanAtMuGivesZero) {
  const ComplexSample s({{1, 0}, {-1, 0}, {0, 1}, {0, -1}});
  const auto r = t2_one_sample(s, {0, 0});
  EXPECT_EQ(r.statistic_name, Statistic::t2);
  EXPECT_NEAR(r.statistic, 0.0, 1e-15);
  EXPECT_NEAR(r.p_value, 1.0, 1e-12);
  EXPECT_EQ(r.df, (FParams{2, 2}));
}

TEST(T2OneSample, MatchesOracleAndFScaling) {
  std::mt19937_64 gen(21);
  for (int trial = 0; trial < 30; ++trial) {
    const auto pts = oracle::random_points(gen, 10);
    const oracle::Point mu{0.3, -0.2};
    const auto r = t2_one_sample(sample_of(pts), mu);
    EXPECT_LT(oracle::rel_diff(r.statistic, oracle::hotelling_t2(pts, mu)), 1e-10);
    EXPECT_NEAR(*r.f_value, 8.0 / 18.0 * r.statistic, 1e-12 * r.statistic);
    EXPECT_EQ(r.df, (FParams{2, 8}));
    expect_p_consistent(r);
  }
}

TEST(T2OneSample, TranslationInvariant) {
  std::mt19937_64 gen(22);
  const auto s = sample_of(oracle::random_points(gen, 8));
  const ComplexObservation c{4.0, -7.0};
  const auto a = t2_one_sample(s, {0.5, 0.5});
  const auto b = t2_one_sample(s.transformed({1, 0}, c), ComplexObservation{0.5, 0.5} + c);
  EXPECT_NEAR(a.statistic, b.statistic, 1e-9 * a.statistic);
}

TEST(T2OneSample, Preconditions) {
  EXPECT_EQ(code_of([] { t2_one_sample(ComplexSample({{1, 0}, {2, 0}})); }), ErrorCode::too_few_observations);
  EXPECT_EQ(code_of([] { t2_one_sample(ComplexSample({{1, 1}, {2, 2}, {3, 3}})); }),
            ErrorCode::degenerate_covariance);
}

TEST(T2circOneSample, HandExample) {
  const ComplexSample s({{2, 0}, {2, 1}, {3, 0}, {3, 1}});
  const auto r = t2circ_one_sample(s, {0, 0});
  EXPECT_NEAR(r.statistic, 9.75, 1e-12);
  EXPECT_NEAR(*r.f_value, 39.0, 1e-12);
  EXPECT_EQ(r.df, (FParams{2, 6}));
  expect_p_consistent(r);
}

TEST(T2circOneSample, MeanAtMuAndZeroResidual) {
  const ComplexSample s({{1, 0}, {-1, 0}, {0, 1}, {0, -1}});
  EXPECT_NEAR(t2circ_one_sample(s).p_value, 1.0, 1e-12);
  EXPECT_EQ(code_of([] { t2circ_one_sample(ComplexSample({{1, 2}, {1, 2}})); }),
            ErrorCode::zero_residual_variance);
  EXPECT_EQ(code_of([] { t2circ_one_sample(ComplexSample({{1, 2}})); }), ErrorCode::too_few_observations);
}

TEST(T2circOneSample, MouseScaleRelation) {
  // T2circ = 1.39 at N = 6 corresponds to F = N * T2circ on (2, 10).
  const double f = 6 * 1.39;
  EXPECT_NEAR(f, 8.34, 1e-12);
  EXPECT_NEAR(f_sf(f, {2, 10}), 0.007, 0.001);
}

TEST(TwoSample, IdenticalSamplesGiveZero) {
  std::mt19937_64 gen(23);
  const auto s = sample_of(oracle::random_points(gen, 7));
  EXPECT_NEAR(t2_two_sample(s, s).statistic, 0.0, 1e-20);
  EXPECT_NEAR(t2_two_sample(s, s).p_value, 1.0, 1e-12);
  EXPECT_NEAR(t2circ_two_sample(s, s).statistic, 0.0, 1e-20);
  EXPECT_NEAR(t2circ_two_sample(s, s).p_value, 1.0, 1e-12);
}

TEST(TwoSample, DegreesOfFreedom) {
  std::mt19937_64 gen(24);
  const auto a = sample_of(oracle::random_points(gen, 10));
  const auto b = sample_of(oracle::random_points(gen, 10));
  EXPECT_EQ(t2circ_two_sample(a, b).df, (FParams{2, 36}));
  EXPECT_EQ(t2_two_sample(a, b).df, (FParams{2, 17}));
  const auto c = sample_of(oracle::random_points(gen, 6));
  EXPECT_EQ(t2circ_two_sample(a, c).df, (FParams{2, 28}));
  expect_p_consistent(t2circ_two_sample(a, c));
  expect_p_consistent(t2_two_sample(a, c));
}

TEST(TwoSample, T2MatchesPooledOracle) {
  std::mt19937_64 gen(25);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = oracle::random_points(gen, 7);
    const auto b = oracle::random_points(gen, 9);
    const auto ca = oracle::covariance(a);
    const auto cb = oracle::covariance(b);
    const oracle::Cov2 pooled{(6 * ca.xx + 8 * cb.xx) / 14, (6 * ca.xy + 8 * cb.xy) / 14,
                              (6 * ca.yy + 8 * cb.yy) / 14};
    const auto d = oracle::mean_of(a) - oracle::mean_of(b);
    const double ref = static_cast<double>(63.0L / 16.0L * oracle::inverse_form(pooled, d.real(), d.imag()));
    EXPECT_LT(oracle::rel_diff(t2_two_sample(sample_of(a), sample_of(b)).statistic, ref), 1e-10);
  }
}

TEST(Paired, EqualsOneSampleOnDifferences) {
  std::mt19937_64 gen(26);
  const auto a = oracle::random_points(gen, 6);
  auto b = oracle::random_points(gen, 6);
  std::vector<oracle::Point> diff;
  for (std::size_t i = 0; i < a.size(); ++i) diff.push_back(a[i] - b[i]);
  const auto p = t2circ_paired(sample_of(a), sample_of(b));
  const auto o = t2circ_one_sample(sample_of(diff));
  EXPECT_NEAR(p.statistic, o.statistic, 1e-12 * o.statistic);
  EXPECT_EQ(p.df, (FParams{2, 10}));
  EXPECT_NEAR(*p.f_value, 6 * p.statistic, 1e-12 * p.statistic);
  const auto swapped = t2circ_paired(sample_of(b), sample_of(a));
  EXPECT_NEAR(swapped.statistic, p.statistic, 1e-12 * p.statistic);
  EXPECT_NEAR(swapped.p_value, p.p_value, 1e-12);
  EXPECT_NEAR(t2_paired(sample_of(a), sample_of(b)).statistic, t2_one_sample(sample_of(diff)).statistic,
              1e-9);
  EXPECT_EQ(code_of([&] { t2circ_paired(sample_of(a), sample_of(a)); }), ErrorCode::zero_residual_variance);
}

TEST(Paired, AlignsByLabelAndRejectsMismatch) {
  const ComplexSample a({{1, 0}, {2, 1}, {4, 0}}, "a", {"x", "y", "z"});
  const ComplexSample b({{0, 1}, {1, 1}, {3, 3}}, "b", {"z", "x", "y"});
  const ComplexSample b_ordered({{1, 1}, {3, 3}, {0, 1}}, "b", {"x", "y", "z"});
  EXPECT_NEAR(t2circ_paired(a, b).statistic, t2circ_paired(a, b_ordered).statistic, 1e-15);
  const ComplexSample bad({{1, 1}, {3, 3}, {0, 1}}, "b", {"x", "y", "w"});
  EXPECT_EQ(code_of([&] { t2circ_paired(a, bad); }), ErrorCode::label_mismatch);
}

TEST(CiTest, CrossPatternAndPreconditions) {
  const auto r = ci_test(ComplexSample({{1, 0}, {-1, 0}, {0, 1}, {0, -1}}));
  EXPECT_NEAR(r.statistic, 1.0, 1e-12);
  EXPECT_NEAR(r.p_value, 1.0, 1e-9);
  EXPECT_FALSE(r.f_value.has_value());
  EXPECT_EQ(code_of([] { ci_test(ComplexSample({{1, 0}, {2, 0}})); }), ErrorCode::too_few_observations);
  EXPECT_EQ(code_of([] { ci_test(ComplexSample({{1, 1}, {2, 2}, {3, 3}})); }),
            ErrorCode::degenerate_covariance);
}

TEST(CiTest, PValueUsesModifiedDensityAtN) {
  std::mt19937_64 gen(27);
  for (int n : {4, 6, 12}) {
    const auto pts = oracle::random_points(gen, n, 0.5, 2.0);
    const auto r = ci_test(sample_of(pts));
    EXPECT_NEAR(r.p_value, 1.0 - oracle::ci_cdf_modified(r.statistic, n), 1e-10);
  }
  // Values reported for a six-animal sample.
  EXPECT_NEAR(1.0 - oracle::ci_cdf_modified(1.59, 6), 0.66, 0.01);
  EXPECT_NEAR(1.0 - oracle::ci_cdf_modified(1.69, 6), 0.59, 0.01);
}

TEST(Anova2circ, IdenticalGroupsAndDf) {
  std::mt19937_64 gen(28);
  const auto s = sample_of(oracle::random_points(gen, 5));
  const std::vector<ComplexSample> same{s, s, s};
  const auto r = anova2circ_independent(same);
  EXPECT_NEAR(r.statistic, 0.0, 1e-20);
  EXPECT_NEAR(r.p_value, 1.0, 1e-12);
  EXPECT_EQ(r.df, (FParams{4, 24}));
  // Identical repeated conditions leave no within-unit residual at all.
  EXPECT_EQ(code_of([&] { anova2circ_repeated(same); }), ErrorCode::zero_residual_variance);
  const std::vector<ComplexSample> distinct{s, sample_of(oracle::random_points(gen, 5)),
                                            sample_of(oracle::random_points(gen, 5))};
  EXPECT_EQ(anova2circ_repeated(distinct).df, (FParams{4, 16}));
}

TEST(Anova2circ, MatchesTermByTermOracle) {
  std::mt19937_64 gen(29);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::vector<oracle::Point>> groups{oracle::random_points(gen, 5),
                                                   oracle::random_points(gen, 7),
                                                   oracle::random_points(gen, 4)};
    std::vector<ComplexSample> samples;
    for (const auto& g : groups) samples.push_back(sample_of(g));
    const auto r = anova2circ_independent(samples);
    EXPECT_LT(oracle::rel_diff(*r.f_value, oracle::anova2circ_f(groups)), 1e-10);
    EXPECT_EQ(r.df, (FParams{4, 26}));
    expect_p_consistent(r);
  }
}

TEST(Anova2circ, RepeatedWithTwoConditionsMatchesPaired) {
  std::mt19937_64 gen(30);
  for (int trial = 0; trial < 10; ++trial) {
    const auto a = sample_of(oracle::random_points(gen, 9));
    const auto b = sample_of(oracle::random_points(gen, 9));
    const std::vector<ComplexSample> groups{a, b};
    EXPECT_NEAR(anova2circ_repeated(groups).p_value, t2circ_paired(a, b).p_value, 1e-9);
  }
}

TEST(Anova2circ, RepeatedDfForSevenConditions) {
  std::mt19937_64 gen(31);
  std::vector<ComplexSample> groups;
  for (int c = 0; c < 7; ++c) groups.push_back(sample_of(oracle::random_points(gen, 89)));
  EXPECT_EQ(anova2circ_repeated(groups).df, (FParams{12, 1056}));
}

TEST(Anova2circ, Preconditions) {
  const ComplexSample s({{1, 0}, {2, 0}});
  const std::vector<ComplexSample> one{s};
  EXPECT_EQ(code_of([&] { anova2circ_independent(one); }), ErrorCode::too_few_groups);
  const std::vector<ComplexSample> small{s, ComplexSample({{1, 1}})};
  EXPECT_EQ(code_of([&] { anova2circ_independent(small); }), ErrorCode::too_few_observations);
  const std::vector<ComplexSample> mismatched{ComplexSample({{1, 0}, {2, 0}}, "a", {"x", "y"}),
                                              ComplexSample({{1, 0}, {2, 0}}, "b", {"x", "z"})};
  EXPECT_EQ(code_of([&] { anova2circ_repeated(mismatched); }), ErrorCode::label_mismatch);
}

TEST(Manova, TwoGroupsMatchHotelling) {
  std::mt19937_64 gen(32);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = sample_of(oracle::random_points(gen, 8));
    const auto b = sample_of(oracle::random_points(gen, 11));
    const std::vector<ComplexSample> groups{a, b};
    EXPECT_NEAR(manova_oneway(groups).p_value, t2_two_sample(a, b).p_value, 1e-9);
  }
}

TEST(Manova, IdenticalGroupsAndDf) {
  std::mt19937_64 gen(33);
  const auto s = sample_of(oracle::random_points(gen, 6));
  const std::vector<ComplexSample> same{s, s, s};
  const auto r = manova_oneway(same);
  EXPECT_NEAR(r.statistic, 0.0, 1e-15);
  EXPECT_NEAR(r.p_value, 1.0, 1e-9);
  // p = 2, q = 2, s = 2: df1 = 4, df2 = 2 (18 - 3 - 2 + 2) = 30.
  EXPECT_EQ(r.df, (FParams{4, 30}));
  expect_p_consistent(r);
}

TEST(Manova, Preconditions) {
  const std::vector<ComplexSample> tiny{ComplexSample({{1, 0}, {2, 1}}), ComplexSample({{0, 1}, {3, 0}})};
  EXPECT_EQ(code_of([&] { manova_oneway(tiny); }), ErrorCode::too_few_observations);
  const std::vector<ComplexSample> line{ComplexSample({{1, 1}, {2, 2}, {3, 3}}),
                                        ComplexSample({{4, 4}, {5, 5}, {7, 7}})};
  EXPECT_EQ(code_of([&] { manova_oneway(line); }), ErrorCode::singular_within_scatter);
}

TEST(Sphericity, T2AndT2circAgreeForLargeSphericalSamples) {
  std::mt19937_64 gen(34);
  std::normal_distribution<double> z;
  std::vector<oracle::Point> pts;
  for (int j = 0; j < 5000; ++j) {
    const double re = z(gen) + 0.05;
    pts.emplace_back(re, z(gen));
  }
  // With spherical scatter both F statistics estimate N |mean|^2 / (2 sigma^2).
  const auto s = sample_of(pts);
  EXPECT_LT(oracle::rel_diff(*t2_one_sample(s).f_value, *t2circ_one_sample(s).f_value), 0.05);
}

TEST(Statistic, Names) {
  EXPECT_EQ(to_string(Statistic::t2circ), "T2circ");
  EXPECT_EQ(statistic_from_string("MANOVA_pillai"), Statistic::manova_pillai);
  EXPECT_EQ(statistic_from_string("anova2circ"), Statistic::anova2circ);
  EXPECT_FALSE(statistic_from_string("Z").has_value());
}
