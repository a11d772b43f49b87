#include "phasestat/simulation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "phasestat/amplitude.hpp"
#include "phasestat/distributions.hpp"
#include "phasestat/errors.hpp"
#include "phasestat/hypothesis.hpp"
#include "phasestat/random.hpp"
#include "phasestat/sample.hpp"

namespace phasestat {

namespace {

void invalid(const std::string& message) { throw Error(ErrorCode::invalid_spec, message); }

unsigned resolve_threads(unsigned threads) {
  if (threads != 0) return threads;
  return std::max(1u, std::thread::hardware_concurrency());
}

// Runs body(begin, end, slot) over contiguous chunks of [0, count).
template <typename Body>
void parallel_chunks(std::size_t count, unsigned threads, Body&& body) {
  threads = static_cast<unsigned>(std::min<std::size_t>(resolve_threads(threads), std::max<std::size_t>(count, 1)));
  if (threads <= 1) {
    body(std::size_t{0}, count, 0u);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  const std::size_t chunk = (count + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t begin = std::min(count, t * chunk);
    const std::size_t end = std::min(count, begin + chunk);
    pool.emplace_back([&body, begin, end, t] { body(begin, end, t); });
  }
  for (auto& th : pool) th.join();
}

struct Cholesky {
  double l11{1.0};
  double l21{0.0};
  double l22{1.0};
};

Cholesky cholesky_of(const GeneratorSpec& g) {
  const double sv = std::sqrt(g.variance_ratio);
  return {1.0, g.r * sv, sv * std::sqrt(1.0 - g.r * g.r)};
}

std::vector<ComplexSample> draw_groups(const GeneratorSpec& g, Rng& rng) {
  const Cholesky c = cholesky_of(g);
  std::vector<ComplexSample> groups;
  groups.reserve(static_cast<std::size_t>(g.k));
  for (int grp = 0; grp < g.k; ++grp) {
    const double shift = grp == 0 ? g.d : 0.0;
    std::vector<ComplexObservation> obs(static_cast<std::size_t>(g.n));
    for (auto& x : obs) {
      const double z1 = rng.normal();
      const double z2 = rng.normal();
      x = {c.l11 * z1 + shift, c.l21 * z1 + c.l22 * z2};
    }
    if (grp == 0 && g.outlier_distance && *g.outlier_distance > 0.0) {
      const double theta = 2.0 * std::numbers::pi * rng.uniform();
      const double u1 = *g.outlier_distance * std::cos(theta);
      const double u2 = *g.outlier_distance * std::sin(theta);
      obs.back() = {c.l11 * u1 + shift, c.l21 * u1 + c.l22 * u2};
    }
    groups.emplace_back(std::move(obs));
  }
  return groups;
}

double p_value_for(SimTest test, const std::vector<ComplexSample>& groups) {
  switch (test) {
    case SimTest::t2:
      return groups.size() == 1 ? t2_one_sample(groups[0]).p_value
                                : t2_two_sample(groups[0], groups[1]).p_value;
    case SimTest::t2circ:
      return groups.size() == 1 ? t2circ_one_sample(groups[0]).p_value
                                : t2circ_two_sample(groups[0], groups[1]).p_value;
    case SimTest::anova2circ:
      return anova2circ_independent(groups).p_value;
    case SimTest::manova:
      return manova_oneway(groups).p_value;
    case SimTest::ci_test:
      return ci_test(groups[0]).p_value;
  }
  return 1.0;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string csv_field(const Table::Cell& cell) {
  if (std::holds_alternative<std::monostate>(cell)) return {};
  if (const double* d = std::get_if<double>(&cell)) return format_double(*d);
  const std::string& s = std::get<std::string>(cell);
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char ch : s) {
    if (ch == '"') quoted += '"';
    quoted += ch;
  }
  return quoted + "\"";
}

}  // namespace

std::string_view to_string(SimTest test) noexcept {
  switch (test) {
    case SimTest::t2: return "T2";
    case SimTest::t2circ: return "T2circ";
    case SimTest::anova2circ: return "ANOVA2circ";
    case SimTest::manova: return "MANOVA";
    case SimTest::ci_test: return "CI_test";
  }
  return "?";
}

std::optional<SimTest> sim_test_from_string(std::string_view text) noexcept {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  if (lower == "t2") return SimTest::t2;
  if (lower == "t2circ") return SimTest::t2circ;
  if (lower == "anova2circ" || lower == "anova") return SimTest::anova2circ;
  if (lower == "manova" || lower == "manova_pillai") return SimTest::manova;
  if (lower == "ci_test" || lower == "ci") return SimTest::ci_test;
  return std::nullopt;
}

void SimulationSpec::validate() const {
  const GeneratorSpec& g = generator;
  if (!std::isfinite(g.d)) invalid("effect size d must be finite");
  if (!(std::fabs(g.r) < 1.0)) invalid("correlation r must satisfy |r| < 1");
  if (!(g.variance_ratio > 0.0) || !std::isfinite(g.variance_ratio)) invalid("variance ratio must be > 0");
  if (g.n < 2) invalid("group size n must be >= 2");
  if (g.k < 1) invalid("group count k must be >= 1");
  if (g.outlier_distance && !(*g.outlier_distance >= 0.0 && std::isfinite(*g.outlier_distance))) {
    invalid("outlier distance must be finite and >= 0");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) invalid("alpha must lie in (0, 1)");
  if (n_reps < 1) invalid("n_reps must be >= 1");
  switch (test) {
    case SimTest::t2:
      if (g.k > 2) invalid("T2 simulates one or two groups");
      if (g.k == 1 && g.n < 3) invalid("one-sample T2 needs n >= 3");
      break;
    case SimTest::t2circ:
      if (g.k > 2) invalid("T2circ simulates one or two groups");
      break;
    case SimTest::anova2circ:
      if (g.k < 2) invalid("ANOVA2circ needs k >= 2");
      break;
    case SimTest::manova:
      if (g.k < 2) invalid("MANOVA needs k >= 2");
      if (g.n * g.k <= g.k + 2) invalid("MANOVA needs n * k > k + 2");
      break;
    case SimTest::ci_test:
      if (g.k != 1) invalid("the condition-index test simulates one group");
      if (g.n < 3) invalid("the condition-index test needs n >= 3");
      break;
  }
}

RateRow simulate_cell(const SimulationSpec& spec, std::uint64_t cell_index) {
  spec.validate();
  const unsigned threads = resolve_threads(spec.threads);
  std::vector<std::size_t> rejections(threads, 0);
  std::vector<std::size_t> failures(threads, 0);
  parallel_chunks(spec.n_reps, threads, [&](std::size_t begin, std::size_t end, unsigned slot) {
    for (std::size_t rep = begin; rep < end; ++rep) {
      Rng rng = Rng::substream(spec.seed, {cell_index, static_cast<std::uint64_t>(rep)});
      const auto groups = draw_groups(spec.generator, rng);
      try {
        if (p_value_for(spec.test, groups) < spec.alpha) ++rejections[slot];
      } catch (const Error& e) {
        if (!is_statistical(e.code())) throw;
        ++failures[slot];
      }
    }
  });
  RateRow row;
  row.test = spec.test;
  row.generator = spec.generator;
  row.alpha = spec.alpha;
  row.n_reps = spec.n_reps;
  for (std::size_t c : rejections) row.rejections += c;
  for (std::size_t c : failures) row.failures += c;
  row.rate = static_cast<double>(row.rejections) / static_cast<double>(row.n_reps);
  row.se = std::sqrt(row.rate * (1.0 - row.rate) / static_cast<double>(row.n_reps));
  return row;
}

RateTable simulate_rates(const SimulationSpec& spec, std::uint64_t cell_index) {
  return RateTable{{simulate_cell(spec, cell_index)}};
}

RateTable simulate_grid(const SimulationGrid& grid) {
  if (grid.tests.empty()) invalid("simulation grid lists no tests");
  RateTable table;
  std::uint64_t cell = 0;
  for (double d : grid.d) {
    for (int n : grid.n) {
      for (double r : grid.r) {
        for (double v : grid.v) {
          for (SimTest test : grid.tests) {
            SimulationSpec spec;
            spec.generator = {d, r, v, n, grid.k, grid.outlier_distance};
            spec.test = test;
            spec.alpha = grid.alpha;
            spec.n_reps = grid.n_reps;
            spec.seed = grid.seed;
            spec.threads = grid.threads;
            table.rows.push_back(simulate_cell(spec, cell));
          }
          ++cell;
        }
      }
    }
  }
  return table;
}

Table RateTable::table() const {
  Table t;
  t.columns = {"test", "d",      "r",      "v",  "n",        "k",    "outlier_distance",
               "alpha", "n_reps", "rejections", "failures", "rate", "se"};
  for (const auto& row : rows) {
    const GeneratorSpec& g = row.generator;
    Table::Cell outlier = std::monostate{};
    if (g.outlier_distance) outlier = *g.outlier_distance;
    t.rows.push_back({std::string(to_string(row.test)), g.d, g.r, g.variance_ratio,
                      static_cast<double>(g.n), static_cast<double>(g.k), outlier, row.alpha,
                      static_cast<double>(row.n_reps), static_cast<double>(row.rejections),
                      static_cast<double>(row.failures), row.rate, row.se});
  }
  return t;
}

std::string Table::to_csv() const {
  std::ostringstream out;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    out << (i ? "," : "") << csv_field(columns[i]);
  }
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_field(row[i]);
    out << '\n';
  }
  return out.str();
}

std::string Table::to_json() const {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& row : rows) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < columns.size() && i < row.size(); ++i) {
      const Cell& cell = row[i];
      if (const double* d = std::get_if<double>(&cell)) {
        obj[columns[i]] = std::isfinite(*d) ? nlohmann::ordered_json(*d) : nlohmann::ordered_json();
      } else if (const std::string* s = std::get_if<std::string>(&cell)) {
        obj[columns[i]] = *s;
      } else {
        obj[columns[i]] = nullptr;
      }
    }
    arr.push_back(std::move(obj));
  }
  return arr.dump(2) + "\n";
}

double CiDistribution::quantile(double p) const {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::domain_error, "quantile level must lie in [0, 1]");
  return quantile_sorted(values, p);
}

double CiDistribution::cdf(double x) const {
  if (values.empty()) return 0.0;
  const auto it = std::upper_bound(values.begin(), values.end(), x);
  return static_cast<double>(it - values.begin()) / static_cast<double>(values.size());
}

CiDistribution simulate_ci_distribution(int n, std::size_t n_reps, std::uint64_t seed) {
  if (n < 3) invalid("condition-index simulation needs n >= 3");
  if (n_reps < 1) invalid("n_reps must be >= 1");
  CiDistribution dist;
  dist.n = n;
  dist.values.reserve(n_reps);
  std::vector<ComplexObservation> obs(static_cast<std::size_t>(n));
  for (std::size_t rep = 0; rep < n_reps; ++rep) {
    Rng rng = Rng::substream(seed, {static_cast<std::uint64_t>(rep)});
    for (auto& x : obs) {
      const double re = rng.normal();
      x = {re, rng.normal()};
    }
    dist.values.push_back(covariance_summary(ComplexSample(obs)).condition_index);
  }
  std::sort(dist.values.begin(), dist.values.end());
  return dist;
}

AmplitudeSkew simulate_amplitude_skew(double d, std::size_t n_reps, std::uint64_t seed) {
  if (!(d >= 0.0) || !std::isfinite(d)) invalid("effect size d must be finite and >= 0");
  if (n_reps < 3) invalid("amplitude skew needs n_reps >= 3");
  AmplitudeSkew out;
  out.amplitudes.reserve(n_reps);
  for (std::size_t rep = 0; rep < n_reps; ++rep) {
    Rng rng = Rng::substream(seed, {static_cast<std::uint64_t>(rep)});
    const double re = rng.normal() + d;
    out.amplitudes.push_back(std::hypot(re, rng.normal()));
  }
  const double n = static_cast<double>(n_reps);
  double sum = 0.0;
  for (double a : out.amplitudes) sum += a;
  out.mean = sum / n;
  double m2 = 0.0;
  double m3 = 0.0;
  for (double a : out.amplitudes) {
    const double dev = a - out.mean;
    m2 += dev * dev;
    m3 += dev * dev * dev;
  }
  m2 /= n;
  m3 /= n;
  out.sd = std::sqrt(m2 * n / (n - 1.0));
  out.skewness = m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
  return out;
}

RateRow simulate_outlier_effect(int n, double outlier_d, std::size_t n_reps, std::uint64_t seed,
                                double alpha) {
  if (n < 4) invalid("outlier simulation needs n >= 4");
  SimulationSpec spec;
  spec.generator.n = n;
  spec.generator.outlier_distance = outlier_d;
  spec.test = SimTest::ci_test;
  spec.alpha = alpha;
  spec.n_reps = n_reps;
  spec.seed = seed;
  return simulate_cell(spec);
}

std::vector<std::string> figure_names() {
  return {"fig2", "fig3", "fig4a", "fig4b", "fig5", "fig6", "fig7"};
}

Table run_figure(std::string_view name, std::size_t n_reps, std::uint64_t seed, unsigned threads) {
  const std::vector<double> d_axis{0.0, 0.25, 0.5, 1.0, 2.0, 4.0};
  const std::vector<int> n_axis{4, 8, 16, 32, 64};

  const auto base_grid = [&] {
    SimulationGrid g;
    g.n_reps = n_reps;
    g.seed = seed;
    g.threads = threads;
    return g;
  };
  const auto append = [](RateTable& into, const RateTable& more) {
    into.rows.insert(into.rows.end(), more.rows.begin(), more.rows.end());
  };

  if (name == "fig2") {
    Table t;
    t.columns = {"d", "mean_amplitude", "sd_amplitude", "skewness"};
    std::uint64_t cell = 0;
    for (double d : {0.0, 0.5, 1.0, 2.0, 3.0, 4.0}) {
      const AmplitudeSkew s = simulate_amplitude_skew(d, n_reps, seed + cell++);
      t.rows.push_back({d, s.mean, s.sd, s.skewness});
    }
    return t;
  }
  if (name == "fig3" || name == "fig7") {
    SimulationGrid g = base_grid();
    g.d = d_axis;
    g.n = n_axis;
    if (name == "fig3") {
      g.tests = {SimTest::t2, SimTest::t2circ};
    } else {
      g.k = 3;
      g.tests = {SimTest::anova2circ, SimTest::manova};
    }
    return simulate_grid(g).table();
  }
  if (name == "fig4a" || name == "fig4b") {
    SimulationGrid one = base_grid();
    if (name == "fig4a") {
      one.r = {-0.9, -0.6, -0.3, 0.0, 0.3, 0.6, 0.9};
    } else {
      one.v = {0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0};
    }
    one.tests = {SimTest::t2, SimTest::t2circ};
    SimulationGrid three = one;
    three.k = 3;
    three.tests = {SimTest::anova2circ, SimTest::manova};
    RateTable table = simulate_grid(one);
    append(table, simulate_grid(three));
    return table.table();
  }
  if (name == "fig5") {
    Table t;
    t.columns = {"n", "p", "empirical", "modified", "edelman"};
    for (int n : n_axis) {
      const CiDistribution dist = simulate_ci_distribution(n, n_reps, seed);
      for (double p : {0.5, 0.9, 0.95, 0.99}) {
        t.rows.push_back({static_cast<double>(n), p, dist.quantile(p),
                          ci_quantile(p, {n, CiDensityVariant::modified}),
                          ci_quantile(p, {n, CiDensityVariant::edelman})});
      }
    }
    return t;
  }
  if (name == "fig6") {
    RateTable table;
    for (int n : {8, 16, 32}) {
      for (double dist : {0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0}) {
        SimulationSpec spec;
        spec.generator.n = n;
        spec.generator.outlier_distance = dist;
        spec.test = SimTest::ci_test;
        spec.n_reps = n_reps;
        spec.seed = seed;
        spec.threads = threads;
        table.rows.push_back(simulate_cell(spec));
      }
    }
    return table.table();
  }
  invalid("unknown figure '" + std::string(name) + "'");
  return {};
}

}  // namespace phasestat
