#include <gtest/gtest.h>

#include <json.hpp>

#include <cmath>
#include <limits>
#include <random>

#include "fixtures.hpp"
#include "phasestat/errors.hpp"
#include "phasestat/report.hpp"

using namespace phasestat;

namespace {

AnalysisReport human_report(PosthocMode mode) {
  const auto built = fixture::load("human.csv", Design::oneway_repeated);
  AnalysisOptions opts;
  opts.n_boot = 300;
  opts.seed = 5;
  opts.posthoc = mode;
  return analyze(built.dataset, opts, "feedface");
}

}  // namespace

TEST(ReportJson, RoundTripsEveryField) {
  const auto report = human_report(PosthocMode::baseline);
  ASSERT_TRUE(report.posthoc);
  ASSERT_FALSE(report.outliers.excluded_units.empty());
  const std::string text = to_json(report);
  const AnalysisReport back = report_from_json(text);
  EXPECT_EQ(back, report);
  EXPECT_EQ(to_json(back), text);
}

TEST(ReportJson, MouseRoundTripWithoutPosthoc) {
  const auto built = fixture::load("mouse.csv", Design::paired);
  AnalysisOptions opts;
  opts.n_boot = 100;
  const auto report = analyze(built.dataset, opts, "00");
  EXPECT_FALSE(report.posthoc);
  const auto j = nlohmann::json::parse(to_json(report));
  EXPECT_FALSE(j.contains("posthoc"));
  EXPECT_EQ(report_from_json(to_json(report)), report);
}

TEST(ReportJson, LayoutConventions) {
  const auto report = human_report(PosthocMode::all_pairs);
  const auto j = nlohmann::json::parse(to_json(report));
  EXPECT_EQ(j.at("design"), "oneway_repeated");
  EXPECT_EQ(j.at("mu"), nlohmann::json::array({0.0, 0.0}));
  EXPECT_EQ(j.at("retained"), 89);
  EXPECT_EQ(j.at("flowchart").at("leaf"), "ANOVA2circ_repeated");
  EXPECT_EQ(j.at("provenance").at("input_sha256"), "feedface");
  EXPECT_EQ(j.at("provenance").at("seed"), 5);
  const auto& cond = j.at("conditions").at(0);
  EXPECT_EQ(cond.at("covariance").at("mean").size(), 2u);
  EXPECT_EQ(cond.at("covariance").at("cov").size(), 3u);
  EXPECT_EQ(j.at("posthoc").at("comparisons"), 21);
  EXPECT_EQ(j.at("posthoc").at("mode"), "all");
}

TEST(ReportJson, InfiniteValuesBecomeNullAndReadBackAsInfinity) {
  AnalysisReport r;
  r.main_test.statistic_name = Statistic::t2circ;
  r.main_test.statistic = std::numeric_limits<double>::infinity();
  r.main_test.f_value = std::numeric_limits<double>::infinity();
  r.main_test.df = FParams{2, 10};
  r.main_test.p_value = 0.0;
  ConditionSummary c;
  c.condition = "x";
  c.n = 3;
  c.covariance.condition_index = std::numeric_limits<double>::infinity();
  c.covariance.degenerate = true;
  r.conditions.push_back(c);
  const std::string text = to_json(r);
  const auto j = nlohmann::json::parse(text);
  EXPECT_TRUE(j.at("main_test").at("statistic").is_null());
  EXPECT_TRUE(j.at("conditions").at(0).at("covariance").at("condition_index").is_null());
  EXPECT_FALSE(j.at("conditions").at(0).contains("ci_test"));
  EXPECT_EQ(report_from_json(text), r);
}

TEST(ReportJson, MalformedInputIsParseError) {
  for (const char* bad : {"", "{", "[]", "{\"design\": \"nonsense\"}", "{\"design\": 3}"}) {
    try {
      report_from_json(bad);
      ADD_FAILURE() << "accepted: " << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::parse_error) << bad;
    }
  }
}

TEST(ReportText, MentionsLeafStatisticsAndPosthoc) {
  const auto report = human_report(PosthocMode::baseline);
  const std::string text = to_text(report);
  EXPECT_NE(text.find("ANOVA2circ_repeated"), std::string::npos);
  EXPECT_NE(text.find("F(12,1056) = 38.90"), std::string::npos);
  EXPECT_NE(text.find("0.05/6"), std::string::npos);
  EXPECT_NE(text.find("0% vs 64%"), std::string::npos);
  EXPECT_NE(text.find("retained: 89"), std::string::npos);
}

TEST(ClusterReport, JsonAndText) {
  ClusterResult r;
  r.clusters = {{0, 1}, {3}};
  r.cluster_masses = {12.5, 4.0};
  r.null_distribution = {1.0, 2.0, 13.0};
  r.corrected_p = {0.5, 1.0};
  r.node_f = {6.0, 6.5, 0.1, 4.0};
  r.node_p = {0.01, 0.009, 0.9, 0.04};
  const auto j = nlohmann::json::parse(to_json(r));
  EXPECT_EQ(j.at("clusters").size(), 2u);
  EXPECT_EQ(j.at("clusters").at(0).at("nodes"), nlohmann::json::array({0, 1}));
  EXPECT_DOUBLE_EQ(j.at("clusters").at(0).at("mass").get<double>(), 12.5);
  EXPECT_DOUBLE_EQ(j.at("clusters").at(0).at("p_corrected").get<double>(), 0.5);
  EXPECT_EQ(j.at("n_perm"), 3);
  const std::string text = to_text(r);
  EXPECT_NE(text.find("mass 12.500"), std::string::npos);
}
