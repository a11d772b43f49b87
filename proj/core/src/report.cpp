#include "phasestat/report.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "phasestat/errors.hpp"

namespace phasestat {

namespace {

using Json = nlohmann::ordered_json;

constexpr double kInf = std::numeric_limits<double>::infinity();

Json number(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

double read_number(const Json& j) {
  if (j.is_null()) return kInf;
  return j.get<double>();
}

Json complex_json(ComplexObservation z) { return Json::array({z.real(), z.imag()}); }
ComplexObservation read_complex(const Json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

template <typename T, typename F>
void put_optional(Json& obj, const char* key, const std::optional<T>& value, F&& convert) {
  if (value) obj[key] = convert(*value);
}

Json test_json(const TestResult& r) {
  Json j;
  j["statistic_name"] = std::string(to_string(r.statistic_name));
  j["statistic"] = number(r.statistic);
  put_optional(j, "f_value", r.f_value, number);
  put_optional(j, "df", r.df, [](FParams df) { return Json::array({df.df1, df.df2}); });
  j["p_value"] = number(r.p_value);
  put_optional(j, "effect_size", r.effect_size, number);
  j["n_per_group"] = r.n_per_group;
  return j;
}

TestResult read_test(const Json& j) {
  TestResult r;
  const auto name = statistic_from_string(j.at("statistic_name").get<std::string>());
  if (!name) throw Error(ErrorCode::parse_error, "unknown statistic name");
  r.statistic_name = *name;
  r.statistic = read_number(j.at("statistic"));
  if (j.contains("f_value")) r.f_value = read_number(j.at("f_value"));
  if (j.contains("df")) r.df = FParams{j.at("df").at(0).get<int>(), j.at("df").at(1).get<int>()};
  r.p_value = read_number(j.at("p_value"));
  if (j.contains("effect_size")) r.effect_size = read_number(j.at("effect_size"));
  r.n_per_group = j.at("n_per_group").get<std::vector<std::size_t>>();
  return r;
}

Json covariance_json(const CovarianceSummary& c) {
  Json j;
  j["mean"] = complex_json(c.mean);
  j["cov"] = Json::array({c.cov.xx, c.cov.xy, c.cov.yy});
  j["lambda_max"] = number(c.lambda_max);
  j["lambda_min"] = number(c.lambda_min);
  j["eigenvectors"] = Json::array({Json::array({c.eigenvectors[0].x, c.eigenvectors[0].y}),
                                   Json::array({c.eigenvectors[1].x, c.eigenvectors[1].y})});
  j["condition_index"] = number(c.condition_index);
  j["degenerate"] = c.degenerate;
  return j;
}

CovarianceSummary read_covariance(const Json& j) {
  CovarianceSummary c;
  c.mean = read_complex(j.at("mean"));
  c.cov = {j.at("cov").at(0).get<double>(), j.at("cov").at(1).get<double>(),
           j.at("cov").at(2).get<double>()};
  c.lambda_max = read_number(j.at("lambda_max"));
  c.lambda_min = read_number(j.at("lambda_min"));
  for (std::size_t i = 0; i < 2; ++i) {
    c.eigenvectors[i] = {j.at("eigenvectors").at(i).at(0).get<double>(),
                         j.at("eigenvectors").at(i).at(1).get<double>()};
  }
  c.condition_index = read_number(j.at("condition_index"));
  c.degenerate = j.at("degenerate").get<bool>();
  return c;
}

Json amplitude_json(const AmplitudeSummary& a) {
  Json j;
  j["method"] = std::string(to_string(a.method));
  j["level"] = a.level;
  j["mean_amplitude"] = number(a.mean_amplitude);
  j["mean_phase"] = number(a.mean_phase);
  j["error_low"] = number(a.error_low);
  j["error_high"] = number(a.error_high);
  j["origin_inside"] = a.origin_inside;
  return j;
}

AmplitudeSummary read_amplitude(const Json& j) {
  AmplitudeSummary a;
  const auto method = j.at("method").get<std::string>();
  if (method == "ellipse_se") {
    a.method = AmplitudeMethod::ellipse_se;
  } else if (method == "bootstrap") {
    a.method = AmplitudeMethod::bootstrap;
  } else {
    throw Error(ErrorCode::parse_error, "unknown amplitude method '" + method + "'");
  }
  a.level = j.at("level").get<double>();
  a.mean_amplitude = read_number(j.at("mean_amplitude"));
  a.mean_phase = read_number(j.at("mean_phase"));
  a.error_low = read_number(j.at("error_low"));
  a.error_high = read_number(j.at("error_high"));
  a.origin_inside = j.at("origin_inside").get<bool>();
  return a;
}

Json outlier_report_json(const OutlierReport& r) {
  Json j;
  j["condition"] = r.condition;
  j["threshold"] = r.threshold;
  Json distances = Json::array();
  for (double d : r.distances) distances.push_back(number(d));
  j["distances"] = std::move(distances);
  j["flagged"] = r.flagged;
  j["excluded_units"] = r.excluded_units;
  return j;
}

OutlierReport read_outlier_report(const Json& j) {
  OutlierReport r;
  r.condition = j.at("condition").get<std::string>();
  r.threshold = j.at("threshold").get<double>();
  for (const auto& d : j.at("distances")) r.distances.push_back(read_number(d));
  r.flagged = j.at("flagged").get<std::vector<std::size_t>>();
  r.excluded_units = j.at("excluded_units").get<std::vector<std::string>>();
  return r;
}

std::string fixed(double x, int digits) {
  if (!std::isfinite(x)) return x > 0 ? "inf" : "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

std::string p_text(double p) {
  if (p < 0.001) return "p < 0.001";
  return "p = " + fixed(p, 3);
}

std::string test_text(const TestResult& r) {
  std::string s = std::string(to_string(r.statistic_name)) + " = " + fixed(r.statistic, 3);
  if (r.f_value && r.df) {
    s += ", F(" + std::to_string(r.df->df1) + "," + std::to_string(r.df->df2) +
         ") = " + fixed(*r.f_value, 2);
  }
  s += ", " + p_text(r.p_value);
  if (r.effect_size) s += ", D = " + fixed(*r.effect_size, 2);
  return s;
}

}  // namespace

std::string to_json(const AnalysisReport& report) {
  Json j;
  j["provenance"] = {{"input_sha256", report.provenance.input_sha256},
                     {"seed", report.provenance.seed},
                     {"tool_version", report.provenance.tool_version}};
  j["design"] = std::string(to_string(report.design));
  j["alpha"] = report.alpha;
  j["mu"] = complex_json(report.mu);
  j["retained"] = report.retained;

  Json outliers;
  outliers["enabled"] = report.outliers.enabled;
  outliers["threshold"] = report.outliers.threshold;
  outliers["per_condition"] = Json::array();
  for (const auto& r : report.outliers.per_condition) {
    outliers["per_condition"].push_back(outlier_report_json(r));
  }
  outliers["excluded_units"] = report.outliers.excluded_units;
  outliers["removed_observations"] = report.outliers.removed_observations;
  j["outliers"] = std::move(outliers);

  j["conditions"] = Json::array();
  for (const auto& c : report.conditions) {
    Json cj;
    cj["condition"] = c.condition;
    cj["n"] = c.n;
    cj["covariance"] = covariance_json(c.covariance);
    put_optional(cj, "ci_test", c.ci_test, test_json);
    put_optional(cj, "amplitude_ellipse", c.amplitude_ellipse, amplitude_json);
    put_optional(cj, "amplitude_bootstrap", c.amplitude_bootstrap, amplitude_json);
    j["conditions"].push_back(std::move(cj));
  }

  j["flowchart"] = {{"leaf", std::string(to_string(report.leaf))},
                    {"branch", is_circular_branch(report.leaf) ? "circular" : "covariance"},
                    {"rationale", report.rationale}};
  j["main_test"] = test_json(report.main_test);
  j["significant"] = report.significant;
  if (report.posthoc) {
    const auto& p = *report.posthoc;
    Json pj;
    pj["mode"] = std::string(to_string(p.mode));
    pj["comparisons"] = p.comparisons;
    pj["alpha_adjusted"] = p.alpha_adjusted;
    pj["tests"] = Json::array();
    for (const auto& t : p.tests) {
      pj["tests"].push_back({{"condition_a", t.condition_a},
                             {"condition_b", t.condition_b},
                             {"result", test_json(t.result)},
                             {"significant", t.significant}});
    }
    j["posthoc"] = std::move(pj);
  }
  j["warnings"] = report.warnings;
  return j.dump(2) + "\n";
}

AnalysisReport report_from_json(std::string_view text) {
  try {
    const Json j = Json::parse(text);
    AnalysisReport r;
    const auto& prov = j.at("provenance");
    r.provenance = {prov.at("input_sha256").get<std::string>(), prov.at("seed").get<std::uint64_t>(),
                    prov.at("tool_version").get<std::string>()};
    const auto design = design_from_string(j.at("design").get<std::string>());
    if (!design) throw Error(ErrorCode::parse_error, "unknown design");
    r.design = *design;
    r.alpha = j.at("alpha").get<double>();
    r.mu = read_complex(j.at("mu"));
    r.retained = j.at("retained").get<std::size_t>();

    const auto& o = j.at("outliers");
    r.outliers.enabled = o.at("enabled").get<bool>();
    r.outliers.threshold = o.at("threshold").get<double>();
    for (const auto& pc : o.at("per_condition")) r.outliers.per_condition.push_back(read_outlier_report(pc));
    r.outliers.excluded_units = o.at("excluded_units").get<std::vector<std::string>>();
    r.outliers.removed_observations = o.at("removed_observations").get<std::size_t>();

    for (const auto& cj : j.at("conditions")) {
      ConditionSummary c;
      c.condition = cj.at("condition").get<std::string>();
      c.n = cj.at("n").get<std::size_t>();
      c.covariance = read_covariance(cj.at("covariance"));
      if (cj.contains("ci_test")) c.ci_test = read_test(cj.at("ci_test"));
      if (cj.contains("amplitude_ellipse")) c.amplitude_ellipse = read_amplitude(cj.at("amplitude_ellipse"));
      if (cj.contains("amplitude_bootstrap")) {
        c.amplitude_bootstrap = read_amplitude(cj.at("amplitude_bootstrap"));
      }
      r.conditions.push_back(std::move(c));
    }

    const auto leaf = flowchart_leaf_from_string(j.at("flowchart").at("leaf").get<std::string>());
    if (!leaf) throw Error(ErrorCode::parse_error, "unknown flowchart leaf");
    r.leaf = *leaf;
    r.rationale = j.at("flowchart").at("rationale").get<std::string>();
    r.main_test = read_test(j.at("main_test"));
    r.significant = j.at("significant").get<bool>();
    if (j.contains("posthoc")) {
      const auto& pj = j.at("posthoc");
      PosthocSummary p;
      const auto mode = posthoc_mode_from_string(pj.at("mode").get<std::string>());
      if (!mode) throw Error(ErrorCode::parse_error, "unknown post-hoc mode");
      p.mode = *mode;
      p.comparisons = pj.at("comparisons").get<std::size_t>();
      p.alpha_adjusted = pj.at("alpha_adjusted").get<double>();
      for (const auto& t : pj.at("tests")) {
        p.tests.push_back({t.at("condition_a").get<std::string>(), t.at("condition_b").get<std::string>(),
                           read_test(t.at("result")), t.at("significant").get<bool>()});
      }
      r.posthoc = std::move(p);
    }
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    return r;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::parse_error, std::string("malformed report JSON: ") + e.what());
  }
}

std::string to_text(const AnalysisReport& report) {
  std::ostringstream out;
  out << "design: " << to_string(report.design) << ", alpha = " << report.alpha << "\n";
  if (report.outliers.enabled) {
    out << "outlier screening (D > " << report.outliers.threshold << "): "
        << report.outliers.removed_observations << " observations removed";
    if (!report.outliers.excluded_units.empty()) {
      out << ", excluded units:";
      for (const auto& u : report.outliers.excluded_units) out << ' ' << u;
    }
    out << "\n";
  } else {
    out << "outlier screening disabled\n";
  }
  out << "retained: " << report.retained << "\n\n";
  out << "conditions:\n";
  for (const auto& c : report.conditions) {
    out << "  " << c.condition << " (N = " << c.n << "): mean = (" << fixed(c.covariance.mean.real(), 4)
        << ", " << fixed(c.covariance.mean.imag(), 4) << ")";
    if (c.ci_test) out << ", CI = " << fixed(c.ci_test->statistic, 2) << ", " << p_text(c.ci_test->p_value);
    out << "\n";
    if (c.amplitude_ellipse) {
      const auto& a = *c.amplitude_ellipse;
      out << "    amplitude " << fixed(a.mean_amplitude, 4) << ", phase " << fixed(a.mean_phase, 3)
          << " rad, SE ellipse [" << fixed(a.error_low, 4) << ", " << fixed(a.error_high, 4) << "]";
      if (a.origin_inside) out << " (origin inside)";
      out << "\n";
    }
    if (c.amplitude_bootstrap) {
      const auto& a = *c.amplitude_bootstrap;
      out << "    bootstrap " << fixed(100.0 * a.level, 0) << "% CI [" << fixed(a.error_low, 4) << ", "
          << fixed(a.error_high, 4) << "]\n";
    }
  }
  out << "\nflowchart: " << report.rationale << "\n";
  out << "result: " << test_text(report.main_test) << (report.significant ? " (significant)" : "")
      << "\n";
  if (report.posthoc) {
    const auto& p = *report.posthoc;
    out << "\npost-hoc (" << to_string(p.mode) << ", Bonferroni alpha = " << report.alpha << "/"
        << p.comparisons << " = " << fixed(p.alpha_adjusted, 4) << "):\n";
    for (const auto& t : p.tests) {
      out << "  " << t.condition_a << " vs " << t.condition_b << ": " << test_text(t.result)
          << (t.significant ? " *" : "") << "\n";
    }
  }
  for (const auto& w : report.warnings) out << "warning: " << w << "\n";
  out << "\ninput sha256 " << report.provenance.input_sha256 << ", seed " << report.provenance.seed
      << ", version " << report.provenance.tool_version << "\n";
  return out.str();
}

std::string to_json(const ClusterResult& result) {
  Json j;
  j["alpha_cluster"] = result.alpha_cluster;
  j["clusters"] = Json::array();
  for (std::size_t c = 0; c < result.clusters.size(); ++c) {
    j["clusters"].push_back({{"nodes", result.clusters[c]},
                             {"mass", number(result.cluster_masses[c])},
                             {"p_corrected", number(result.corrected_p[c])}});
  }
  Json nodes = Json::array();
  for (std::size_t i = 0; i < result.node_f.size(); ++i) {
    nodes.push_back({{"node", i}, {"f", number(result.node_f[i])}, {"p", number(result.node_p[i])}});
  }
  j["nodes"] = std::move(nodes);
  j["n_perm"] = result.null_distribution.size();
  Json null_dist = Json::array();
  for (double m : result.null_distribution) null_dist.push_back(number(m));
  j["null_distribution"] = std::move(null_dist);
  return j.dump(2) + "\n";
}

std::string to_text(const ClusterResult& result) {
  std::ostringstream out;
  out << result.clusters.size() << " cluster(s), " << result.null_distribution.size()
      << " permutations\n";
  for (std::size_t c = 0; c < result.clusters.size(); ++c) {
    out << "  cluster " << c << ": nodes";
    for (std::size_t n : result.clusters[c]) out << ' ' << n;
    out << ", mass " << fixed(result.cluster_masses[c], 3) << ", corrected p = "
        << fixed(result.corrected_p[c], 4)
        << (result.corrected_p[c] < result.alpha_cluster ? " *" : "") << "\n";
  }
  return out.str();
}

}  // namespace phasestat
