#include "phasestat/flowchart.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "phasestat/errors.hpp"

#ifndef PHASESTAT_VERSION
#define PHASESTAT_VERSION "0.0.0"
#endif

namespace phasestat {

namespace {

constexpr double kEllipseLevel = 0.68;
constexpr double kBootstrapLevel = 0.95;

std::string fmt(const char* pattern, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, value);
  return buf;
}

TestResult run_leaf(FlowchartLeaf leaf, const GroupedDataset& data) {
  const auto& s = data.samples();
  switch (leaf) {
    case FlowchartLeaf::t2circ_one_sample: return t2circ_one_sample(s[0], data.mu());
    case FlowchartLeaf::t2_one_sample: return t2_one_sample(s[0], data.mu());
    case FlowchartLeaf::t2circ_paired: return t2circ_paired(s[0], s[1]);
    case FlowchartLeaf::t2_paired: return t2_paired(s[0], s[1]);
    case FlowchartLeaf::t2circ_two_sample: return t2circ_two_sample(s[0], s[1]);
    case FlowchartLeaf::t2_two_sample: return t2_two_sample(s[0], s[1]);
    case FlowchartLeaf::anova2circ_independent: return anova2circ_independent(s);
    case FlowchartLeaf::anova2circ_repeated: return anova2circ_repeated(s);
    case FlowchartLeaf::manova_oneway: return manova_oneway(s);
  }
  throw Error(ErrorCode::design_mismatch, "unknown flowchart leaf");
}

TestResult pairwise_test(bool circular, bool paired, const ComplexSample& a, const ComplexSample& b) {
  if (paired) return circular ? t2circ_paired(a, b) : t2_paired(a, b);
  return circular ? t2circ_two_sample(a, b) : t2_two_sample(a, b);
}

void attach_effect_size(TestResult& result, const ComplexSample& a, const ComplexSample& b,
                        std::vector<std::string>& warnings) {
  try {
    result.effect_size = pairwise_mahalanobis(a, b);
  } catch (const Error& e) {
    if (!is_statistical(e.code())) throw;
    warnings.push_back("effect size for '" + a.condition_label() + "' vs '" + b.condition_label() +
                       "' unavailable: " + e.what());
  }
}

ConditionSummary summarize_condition(const ComplexSample& s, std::size_t index,
                                     const AnalysisOptions& options,
                                     std::vector<std::string>& warnings) {
  ConditionSummary c;
  c.condition = s.condition_label();
  c.n = s.size();
  c.covariance = covariance_summary(s);
  c.ci_test = ci_test(s);
  try {
    c.amplitude_ellipse = amp_errors_ellipse(s, kEllipseLevel);
  } catch (const Error& e) {
    if (!is_statistical(e.code())) throw;
    warnings.push_back("ellipse error bars for '" + c.condition + "' unavailable: " + e.what());
  }
  if (options.n_boot > 0) {
    c.amplitude_bootstrap = amp_ci_bootstrap(s, kBootstrapLevel, options.n_boot, options.seed + index);
  }
  return c;
}

std::string describe_design(Design design) {
  switch (design) {
    case Design::one_sample: return "one-sample design";
    case Design::two_sample_independent: return "two independent groups";
    case Design::paired: return "paired design";
    case Design::oneway_independent: return "more than two independent groups";
    case Design::oneway_repeated: return "more than two repeated conditions";
  }
  return "design";
}

}  // namespace

std::string_view to_string(FlowchartLeaf leaf) noexcept {
  switch (leaf) {
    case FlowchartLeaf::t2circ_one_sample: return "T2circ_one_sample";
    case FlowchartLeaf::t2_one_sample: return "T2_one_sample";
    case FlowchartLeaf::t2circ_paired: return "T2circ_paired";
    case FlowchartLeaf::t2_paired: return "T2_paired";
    case FlowchartLeaf::t2circ_two_sample: return "T2circ_two_sample";
    case FlowchartLeaf::t2_two_sample: return "T2_two_sample";
    case FlowchartLeaf::anova2circ_independent: return "ANOVA2circ_independent";
    case FlowchartLeaf::anova2circ_repeated: return "ANOVA2circ_repeated";
    case FlowchartLeaf::manova_oneway: return "MANOVA_oneway";
  }
  return "unknown";
}

std::optional<FlowchartLeaf> flowchart_leaf_from_string(std::string_view text) noexcept {
  for (int i = 0; i <= static_cast<int>(FlowchartLeaf::manova_oneway); ++i) {
    const auto leaf = static_cast<FlowchartLeaf>(i);
    if (to_string(leaf) == text) return leaf;
  }
  return std::nullopt;
}

bool is_circular_branch(FlowchartLeaf leaf) noexcept {
  switch (leaf) {
    case FlowchartLeaf::t2circ_one_sample:
    case FlowchartLeaf::t2circ_paired:
    case FlowchartLeaf::t2circ_two_sample:
    case FlowchartLeaf::anova2circ_independent:
    case FlowchartLeaf::anova2circ_repeated:
      return true;
    default:
      return false;
  }
}

FlowchartLeaf choose_leaf(Design design, bool any_ci_significant) noexcept {
  const bool circ = !any_ci_significant;
  switch (design) {
    case Design::one_sample:
      return circ ? FlowchartLeaf::t2circ_one_sample : FlowchartLeaf::t2_one_sample;
    case Design::paired:
      return circ ? FlowchartLeaf::t2circ_paired : FlowchartLeaf::t2_paired;
    case Design::two_sample_independent:
      return circ ? FlowchartLeaf::t2circ_two_sample : FlowchartLeaf::t2_two_sample;
    case Design::oneway_independent:
      return circ ? FlowchartLeaf::anova2circ_independent : FlowchartLeaf::manova_oneway;
    case Design::oneway_repeated:
      return circ ? FlowchartLeaf::anova2circ_repeated : FlowchartLeaf::manova_oneway;
  }
  return FlowchartLeaf::manova_oneway;
}

std::string_view to_string(PosthocMode mode) noexcept {
  return mode == PosthocMode::all_pairs ? "all" : "baseline";
}

std::optional<PosthocMode> posthoc_mode_from_string(std::string_view text) noexcept {
  if (text == "all" || text == "all_pairs") return PosthocMode::all_pairs;
  if (text == "baseline") return PosthocMode::baseline;
  return std::nullopt;
}

std::string_view tool_version() noexcept { return PHASESTAT_VERSION; }

AnalysisReport run_flowchart(const GroupedDataset& dataset, const AnalysisOptions& options) {
  if (!(options.alpha > 0.0 && options.alpha < 1.0)) {
    throw Error(ErrorCode::domain_error, "alpha must lie in (0, 1)");
  }
  const auto& samples = dataset.samples();
  AnalysisReport report;
  report.design = dataset.design();
  report.alpha = options.alpha;
  report.mu = dataset.mu();
  report.provenance = {{}, options.seed, std::string(tool_version())};
  if (is_unit_matched(dataset.design())) {
    report.retained = samples.front().size();
  } else {
    for (const auto& s : samples) report.retained += s.size();
  }

  double largest_ci = 0.0;
  double smallest_p = 1.0;
  std::string worst_condition;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    ConditionSummary c = summarize_condition(samples[i], i, options, report.warnings);
    if (c.ci_test->statistic > largest_ci) largest_ci = c.ci_test->statistic;
    if (c.ci_test->p_value < smallest_p || worst_condition.empty()) {
      smallest_p = std::min(smallest_p, c.ci_test->p_value);
      worst_condition = c.condition;
    }
    report.conditions.push_back(std::move(c));
  }
  const bool any_significant = smallest_p < options.alpha;
  report.leaf = choose_leaf(dataset.design(), any_significant);

  report.rationale =
      (any_significant
           ? "condition-index test significant for '" + worst_condition + "' (p = " +
                 fmt("%.3g", smallest_p) + " < alpha " + fmt("%.3g", options.alpha) + ")"
           : "no condition-index test significant (largest CI = " + fmt("%.3f", largest_ci) +
                 ", smallest p = " + fmt("%.3g", smallest_p) + ")") +
      "; " + describe_design(dataset.design()) + " -> " + std::string(to_string(report.leaf));

  report.main_test = run_leaf(report.leaf, dataset);
  report.significant = report.main_test.p_value < options.alpha;

  switch (dataset.design()) {
    case Design::one_sample:
      try {
        report.main_test.effect_size = mahalanobis_from_point(samples[0], dataset.mu());
      } catch (const Error& e) {
        if (!is_statistical(e.code())) throw;
        report.warnings.push_back(std::string("effect size unavailable: ") + e.what());
      }
      break;
    case Design::paired:
    case Design::two_sample_independent:
      attach_effect_size(report.main_test, samples[0], samples[1], report.warnings);
      break;
    default:
      break;
  }

  if (samples.size() > 2 && report.significant) {
    PosthocSummary post;
    post.mode = options.posthoc;
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t a = 0; a < samples.size(); ++a) {
      for (std::size_t b = a + 1; b < samples.size(); ++b) {
        if (options.posthoc == PosthocMode::baseline && a != 0) continue;
        pairs.emplace_back(a, b);
      }
    }
    post.comparisons = pairs.size();
    post.alpha_adjusted = options.alpha / static_cast<double>(pairs.size());
    const bool circular = is_circular_branch(report.leaf);
    const bool paired = is_unit_matched(dataset.design());
    for (auto [a, b] : pairs) {
      PosthocComparison cmp;
      cmp.condition_a = samples[a].condition_label();
      cmp.condition_b = samples[b].condition_label();
      cmp.result = pairwise_test(circular, paired, samples[a], samples[b]);
      cmp.significant = cmp.result.p_value < post.alpha_adjusted;
      attach_effect_size(cmp.result, samples[a], samples[b], report.warnings);
      post.tests.push_back(std::move(cmp));
    }
    report.posthoc = std::move(post);
  }
  return report;
}

AnalysisReport analyze(const GroupedDataset& dataset, const AnalysisOptions& options,
                       std::string input_sha256) {
  OutlierSummary outliers;
  outliers.enabled = options.outlier_screen;
  outliers.threshold = options.threshold;
  std::vector<std::string> warnings;
  AnalysisReport report;
  if (options.outlier_screen) {
    OutlierScreening screened = exclude_outliers(dataset, options.threshold);
    outliers.per_condition = std::move(screened.per_condition);
    outliers.excluded_units = std::move(screened.excluded_units);
    outliers.removed_observations = screened.removed_observations;
    warnings = std::move(screened.warnings);
    report = run_flowchart(screened.dataset, options);
  } else {
    report = run_flowchart(dataset, options);
  }
  report.outliers = std::move(outliers);
  warnings.insert(warnings.end(), report.warnings.begin(), report.warnings.end());
  report.warnings = std::move(warnings);
  report.provenance.input_sha256 = std::move(input_sha256);
  return report;
}

}  // namespace phasestat
