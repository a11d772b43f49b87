#pragma once

// The analysis decision procedure: screen outliers, test every condition's
// condition index, then pick the circular or the covariance-aware branch.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "phasestat/amplitude.hpp"
#include "phasestat/hypothesis.hpp"
#include "phasestat/outliers.hpp"
#include "phasestat/sample.hpp"

namespace phasestat {

enum class FlowchartLeaf {
  t2circ_one_sample,
  t2_one_sample,
  t2circ_paired,
  t2_paired,
  t2circ_two_sample,
  t2_two_sample,
  anova2circ_independent,
  anova2circ_repeated,
  manova_oneway,
};

std::string_view to_string(FlowchartLeaf leaf) noexcept;
std::optional<FlowchartLeaf> flowchart_leaf_from_string(std::string_view text) noexcept;
/// True for leaves reached when no condition index was significant.
bool is_circular_branch(FlowchartLeaf leaf) noexcept;

/// The leaf is a pure function of the design and whether any condition's
/// condition-index test rejected.
FlowchartLeaf choose_leaf(Design design, bool any_ci_significant) noexcept;

enum class PosthocMode {
  all_pairs,
  /// Every condition against the first one.
  baseline,
};

std::string_view to_string(PosthocMode mode) noexcept;
std::optional<PosthocMode> posthoc_mode_from_string(std::string_view text) noexcept;

struct AnalysisOptions {
  double alpha{0.05};
  bool outlier_screen{true};
  double threshold{kDefaultOutlierThreshold};
  std::uint64_t seed{0};
  PosthocMode posthoc{PosthocMode::all_pairs};
  std::size_t n_boot{10000};
};

struct ConditionSummary {
  std::string condition;
  std::size_t n{0};
  CovarianceSummary covariance;
  std::optional<TestResult> ci_test;
  std::optional<AmplitudeSummary> amplitude_ellipse;
  std::optional<AmplitudeSummary> amplitude_bootstrap;

  bool operator==(const ConditionSummary&) const = default;
};

struct PosthocComparison {
  std::string condition_a;
  std::string condition_b;
  TestResult result;
  bool significant{false};

  bool operator==(const PosthocComparison&) const = default;
};

struct PosthocSummary {
  PosthocMode mode{PosthocMode::all_pairs};
  std::size_t comparisons{0};
  /// Bonferroni level alpha / comparisons.
  double alpha_adjusted{0.05};
  std::vector<PosthocComparison> tests;

  bool operator==(const PosthocSummary&) const = default;
};

struct OutlierSummary {
  bool enabled{false};
  double threshold{kDefaultOutlierThreshold};
  std::vector<OutlierReport> per_condition;
  std::vector<std::string> excluded_units;
  std::size_t removed_observations{0};

  bool operator==(const OutlierSummary&) const = default;
};

struct Provenance {
  std::string input_sha256;
  std::uint64_t seed{0};
  std::string tool_version;

  bool operator==(const Provenance&) const = default;
};

struct AnalysisReport {
  Design design{Design::one_sample};
  double alpha{0.05};
  ComplexObservation mu{0.0, 0.0};
  /// Units (unit-matched designs) or observations retained for testing.
  std::size_t retained{0};
  OutlierSummary outliers;
  std::vector<ConditionSummary> conditions;
  FlowchartLeaf leaf{FlowchartLeaf::t2circ_one_sample};
  std::string rationale;
  TestResult main_test;
  bool significant{false};
  std::optional<PosthocSummary> posthoc;
  std::vector<std::string> warnings;
  Provenance provenance;

  bool operator==(const AnalysisReport&) const = default;
};

/// Library version string.
std::string_view tool_version() noexcept;

/// Runs the decision procedure on an already screened dataset.
AnalysisReport run_flowchart(const GroupedDataset& dataset, const AnalysisOptions& options);

/// Outlier screening (unless disabled) followed by run_flowchart.
AnalysisReport analyze(const GroupedDataset& dataset, const AnalysisOptions& options,
                       std::string input_sha256 = {});

}  // namespace phasestat
