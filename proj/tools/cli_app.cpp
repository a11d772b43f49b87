#include "cli_app.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include "phasestat/cluster.hpp"
#include "phasestat/errors.hpp"
#include "phasestat/flowchart.hpp"
#include "phasestat/ingest.hpp"
#include "phasestat/report.hpp"
#include "phasestat/simulation.hpp"

namespace phasestat::cli {

namespace {

ComplexObservation parse_mu(const std::string& text) {
  const auto comma = text.find(',');
  try {
    if (comma == std::string::npos) throw std::invalid_argument(text);
    std::size_t used_re = 0;
    std::size_t used_im = 0;
    const double re = std::stod(text.substr(0, comma), &used_re);
    const std::string im_text = text.substr(comma + 1);
    const double im = std::stod(im_text, &used_im);
    if (used_re != comma || used_im != im_text.size()) throw std::invalid_argument(text);
    return {re, im};
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::parse_error, "--mu expects 're,im', got '" + text + "'");
  }
}

// Infers the design from the grouping when none is given.
Design infer_design(const ComponentTable& table) {
  std::vector<std::string> conditions;
  std::map<std::string, std::set<std::string>> units;
  for (const auto& row : table.rows) {
    if (!units.count(row.condition)) conditions.push_back(row.condition);
    units[row.condition].insert(row.unit);
  }
  if (conditions.size() <= 1) return Design::one_sample;
  bool matched = true;
  for (const auto& c : conditions) matched = matched && units[c] == units[conditions.front()];
  if (conditions.size() == 2) return matched ? Design::paired : Design::two_sample_independent;
  return matched ? Design::oneway_repeated : Design::oneway_independent;
}

Design parse_design(const std::string& text) {
  const auto design = design_from_string(text);
  if (!design) throw Error(ErrorCode::parse_error, "unknown design '" + text + "'");
  return *design;
}

ComponentTable load_components(const std::string& text, std::optional<double> sample_rate,
                               std::optional<double> target_frequency) {
  if (detect_input_kind(text) == InputKind::time_series) {
    return extract_components(parse_timeseries_csv(text), sample_rate, target_frequency);
  }
  return parse_components_csv(text);
}

void write_output(const std::string& content, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << content;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorCode::io_error, "cannot write '" + path + "'");
  file << content;
  if (!file) throw Error(ErrorCode::io_error, "failed writing '" + path + "'");
}

std::string render(const Table& table, const std::string& format) {
  return format == "json" ? table.to_json() : table.to_csv();
}

SimTest parse_sim_test(const std::string& text) {
  const auto test = sim_test_from_string(text);
  if (!test) throw Error(ErrorCode::invalid_spec, "unknown test '" + text + "'");
  return *test;
}

template <typename T>
std::vector<T> json_list(const nlohmann::json& j, const char* key, std::vector<T> fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (v.is_array()) return v.get<std::vector<T>>();
  return {v.get<T>()};
}

SimulationGrid grid_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    SimulationGrid g;
    const auto& gen = j.contains("generator") ? j.at("generator") : j;
    g.d = json_list<double>(gen, "d", g.d);
    g.n = json_list<int>(gen, "n", g.n);
    g.r = json_list<double>(gen, "r", g.r);
    g.v = json_list<double>(gen, "v", json_list<double>(gen, "variance_ratio", g.v));
    g.k = gen.value("k", g.k);
    if (gen.contains("outlier_distance") && !gen.at("outlier_distance").is_null()) {
      g.outlier_distance = gen.at("outlier_distance").get<double>();
    }
    const auto names = json_list<std::string>(j, "tests", json_list<std::string>(j, "test", {"t2circ"}));
    g.tests.clear();
    for (const auto& name : names) g.tests.push_back(parse_sim_test(name));
    g.alpha = j.value("alpha", g.alpha);
    g.n_reps = j.value("n_reps", g.n_reps);
    g.seed = j.value("seed", g.seed);
    return g;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse_error, std::string("malformed simulation spec: ") + e.what());
  }
}

struct AnalyzeArgs {
  std::string file;
  std::string design;
  std::string mu{"0,0"};
  double alpha{0.05};
  bool no_outlier_screen{false};
  double threshold{kDefaultOutlierThreshold};
  std::uint64_t seed{0};
  std::string format{"json"};
  std::string posthoc{"all"};
  std::size_t n_boot{10000};
  std::optional<double> sample_rate;
  std::optional<double> target_frequency;
  std::string out;
};

int do_analyze(const AnalyzeArgs& a, std::ostream& out, std::ostream& err) {
  const std::string text = read_text_file(a.file);
  const ComponentTable table = load_components(text, a.sample_rate, a.target_frequency);
  const Design design = a.design.empty() ? infer_design(table) : parse_design(a.design);
  const BuiltDataset built = build_dataset(table, design, parse_mu(a.mu));
  AnalysisOptions options;
  options.alpha = a.alpha;
  options.outlier_screen = !a.no_outlier_screen;
  options.threshold = a.threshold;
  options.seed = a.seed;
  options.n_boot = a.n_boot;
  const auto mode = posthoc_mode_from_string(a.posthoc);
  if (!mode) throw Error(ErrorCode::parse_error, "--posthoc expects 'all' or 'baseline'");
  options.posthoc = *mode;
  AnalysisReport report = analyze(built.dataset, options, sha256_hex(text));
  report.warnings.insert(report.warnings.begin(), built.warnings.begin(), built.warnings.end());
  for (const auto& w : report.warnings) err << "warning: " << w << "\n";
  write_output(a.format == "text" ? to_text(report) : to_json(report), a.out, out);
  return kExitOk;
}

struct SimulateArgs {
  std::string target;
  std::optional<std::size_t> reps;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format{"csv"};
  unsigned threads{1};
};

int do_simulate(const SimulateArgs& a, std::ostream& out) {
  const auto names = figure_names();
  Table table;
  if (std::find(names.begin(), names.end(), a.target) != names.end()) {
    table = run_figure(a.target, a.reps.value_or(10000), a.seed.value_or(0), a.threads);
  } else {
    SimulationGrid grid = grid_from_json(read_text_file(a.target));
    if (a.reps) grid.n_reps = *a.reps;
    if (a.seed) grid.seed = *a.seed;
    grid.threads = a.threads;
    table = simulate_grid(grid).table();
  }
  write_output(render(table, a.format), a.out, out);
  return kExitOk;
}

struct PowerArgs {
  std::vector<std::string> tests{"t2", "t2circ"};
  std::vector<double> d{0.0, 0.25, 0.5, 1.0, 2.0};
  std::vector<int> n{8, 16, 32, 64};
  std::vector<double> r{0.0};
  std::vector<double> v{1.0};
  int k{1};
  double alpha{0.05};
  std::size_t reps{10000};
  std::uint64_t seed{0};
  std::string format{"csv"};
  std::string out;
  unsigned threads{1};
};

int do_power(const PowerArgs& a, std::ostream& out) {
  SimulationGrid grid;
  grid.d = a.d;
  grid.n = a.n;
  grid.r = a.r;
  grid.v = a.v;
  grid.k = a.k;
  grid.alpha = a.alpha;
  grid.n_reps = a.reps;
  grid.seed = a.seed;
  grid.threads = a.threads;
  grid.tests.clear();
  for (const auto& t : a.tests) grid.tests.push_back(parse_sim_test(t));
  write_output(render(simulate_grid(grid).table(), a.format), a.out, out);
  return kExitOk;
}

struct ClusterArgs {
  std::vector<std::string> nodes;
  std::string edges;
  std::string design;
  std::string mu{"0,0"};
  std::string test{"t2circ"};
  std::size_t perms{1000};
  std::uint64_t seed{0};
  double alpha_forming{0.05};
  std::string format{"json"};
  std::string out;
};

int do_cluster(const ClusterArgs& a, std::ostream& out) {
  std::vector<GroupedDataset> datasets;
  datasets.reserve(a.nodes.size());
  const ComplexObservation mu = parse_mu(a.mu);
  for (const auto& path : a.nodes) {
    const ComponentTable table = parse_components_csv(read_text_file(path));
    const Design design = a.design.empty() ? infer_design(table) : parse_design(a.design);
    datasets.push_back(build_dataset(table, design, mu).dataset);
  }
  std::istringstream edges(read_text_file(a.edges));
  const AdjacencyGraph graph = read_edge_list(edges, datasets.size());
  ClusterOptions options;
  if (a.test == "t2") {
    options.test = ClusterTest::t2;
  } else if (a.test == "t2circ") {
    options.test = ClusterTest::t2circ;
  } else {
    throw Error(ErrorCode::parse_error, "--test expects 't2' or 't2circ'");
  }
  options.alpha_forming = a.alpha_forming;
  options.n_perm = a.perms;
  options.seed = a.seed;
  const ClusterResult result = cluster_correct(datasets, graph, options);
  write_output(a.format == "text" ? to_text(result) : to_json(result), a.out, out);
  return kExitOk;
}

struct ExtractArgs {
  std::string file;
  std::optional<double> sample_rate;
  std::optional<double> target_frequency;
  std::string out;
};

int do_extract(const ExtractArgs& a, std::ostream& out) {
  const TimeSeriesTable series = parse_timeseries_csv(read_text_file(a.file));
  const ComponentTable components = extract_components(series, a.sample_rate, a.target_frequency);
  std::ostringstream buf;
  write_components_csv(buf, components);
  write_output(buf.str(), a.out, out);
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Statistics for complex-valued steady-state responses", "phasestat"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(tool_version()));

  AnalyzeArgs analyze_args;
  auto* analyze_cmd = app.add_subcommand("analyze", "Run the full analysis on a CSV file");
  analyze_cmd->add_option("file", analyze_args.file, "Components or time-series CSV")->required();
  analyze_cmd->add_option("--design", analyze_args.design,
                          "one_sample, two_sample, paired, oneway, repeated (default: inferred)");
  analyze_cmd->add_option("--mu", analyze_args.mu, "One-sample null mean as 're,im'");
  analyze_cmd->add_option("--alpha", analyze_args.alpha, "Significance level")->check(CLI::Range(0.0, 1.0));
  analyze_cmd->add_flag("--no-outlier-screen", analyze_args.no_outlier_screen, "Skip Mahalanobis screening");
  analyze_cmd->add_option("--threshold", analyze_args.threshold, "Outlier distance threshold");
  analyze_cmd->add_option("--seed", analyze_args.seed, "Bootstrap seed");
  analyze_cmd->add_option("--format", analyze_args.format, "json or text")
      ->check(CLI::IsMember({"json", "text"}));
  analyze_cmd->add_option("--posthoc", analyze_args.posthoc, "all or baseline")
      ->check(CLI::IsMember({"all", "baseline"}));
  analyze_cmd->add_option("--n-boot", analyze_args.n_boot, "Bootstrap replicates (0 disables)");
  analyze_cmd->add_option("--sample-rate", analyze_args.sample_rate, "Time-series sample rate (Hz)");
  analyze_cmd->add_option("--target-frequency", analyze_args.target_frequency, "Frequency to extract (Hz)");
  analyze_cmd->add_option("--out", analyze_args.out, "Output file (default: stdout)");

  SimulateArgs simulate_args;
  auto* simulate_cmd = app.add_subcommand("simulate", "Reproduce a simulation figure or run a spec file");
  simulate_cmd->add_option("target", simulate_args.target, "fig2, fig3, fig4a, fig4b, fig5, fig6, fig7 or a JSON spec")
      ->required();
  simulate_cmd->add_option("--reps", simulate_args.reps, "Replicates per cell");
  simulate_cmd->add_option("--seed", simulate_args.seed, "Random seed");
  simulate_cmd->add_option("--out", simulate_args.out, "Output file (default: stdout)");
  simulate_cmd->add_option("--format", simulate_args.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  simulate_cmd->add_option("--threads", simulate_args.threads, "Worker threads (0 = all cores)");

  ClusterArgs cluster_args;
  auto* cluster_cmd = app.add_subcommand("cluster", "Permutation cluster correction across nodes");
  cluster_cmd->add_option("nodes", cluster_args.nodes, "One components CSV per node, in node order")->required();
  cluster_cmd->add_option("--edges", cluster_args.edges, "Edge list, one 'i j' pair per line")->required();
  cluster_cmd->add_option("--design", cluster_args.design, "one_sample, paired or two_sample");
  cluster_cmd->add_option("--mu", cluster_args.mu, "One-sample null mean as 're,im'");
  cluster_cmd->add_option("--test", cluster_args.test, "t2 or t2circ");
  cluster_cmd->add_option("--perms", cluster_args.perms, "Number of permutations");
  cluster_cmd->add_option("--seed", cluster_args.seed, "Random seed");
  cluster_cmd->add_option("--alpha-forming", cluster_args.alpha_forming, "Cluster-forming threshold");
  cluster_cmd->add_option("--format", cluster_args.format, "json or text")->check(CLI::IsMember({"json", "text"}));
  cluster_cmd->add_option("--out", cluster_args.out, "Output file (default: stdout)");

  ExtractArgs extract_args;
  auto* extract_cmd = app.add_subcommand("extract", "Convert a time-series CSV into a components CSV");
  extract_cmd->add_option("file", extract_args.file, "Time-series CSV")->required();
  extract_cmd->add_option("--sample-rate", extract_args.sample_rate, "Sample rate (Hz)");
  extract_cmd->add_option("--target-frequency", extract_args.target_frequency, "Frequency to extract (Hz)");
  extract_cmd->add_option("--out", extract_args.out, "Output file (default: stdout)");

  PowerArgs power_args;
  auto* power_cmd = app.add_subcommand("power", "Rejection rates over effect size and sample size");
  power_cmd->add_option("--test", power_args.tests, "Tests to compare")->delimiter(',');
  power_cmd->add_option("--d", power_args.d, "Effect sizes")->delimiter(',');
  power_cmd->add_option("--n", power_args.n, "Group sizes")->delimiter(',');
  power_cmd->add_option("--r", power_args.r, "Correlations")->delimiter(',');
  power_cmd->add_option("--v", power_args.v, "Variance ratios")->delimiter(',');
  power_cmd->add_option("--k", power_args.k, "Number of groups");
  power_cmd->add_option("--alpha", power_args.alpha, "Significance level");
  power_cmd->add_option("--reps", power_args.reps, "Replicates per cell");
  power_cmd->add_option("--seed", power_args.seed, "Random seed");
  power_cmd->add_option("--format", power_args.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  power_cmd->add_option("--out", power_args.out, "Output file (default: stdout)");
  power_cmd->add_option("--threads", power_args.threads, "Worker threads (0 = all cores)");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (*analyze_cmd) return do_analyze(analyze_args, out, err);
    if (*simulate_cmd) return do_simulate(simulate_args, out);
    if (*cluster_cmd) return do_cluster(cluster_args, out);
    if (*extract_cmd) return do_extract(extract_args, out);
    if (*power_cmd) return do_power(power_args, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return is_statistical(e.code()) ? kExitStatistical : kExitInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}

}  // namespace phasestat::cli
