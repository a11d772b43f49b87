// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli_app.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "phasestat/amplitude.hpp"
#include "phasestat/distributions.hpp"
#include "phasestat/flowchart.hpp"
#include "phasestat/hypothesis.hpp"
#include "phasestat/outliers.hpp"
#include "phasestat/simulation.hpp"

using namespace phasestat;

namespace {

constexpr std::uint64_t kSeed = 1;
constexpr std::size_t kReps = 10000;

struct Verdict {
  bool pass{true};
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[fail] ";
    }
    detail << what << "; ";
  }
};

std::string num(double x, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

RateRow rate(SimTest test, double d, int n, int k, double r = 0.0, double v = 1.0, std::size_t reps = kReps,
             std::uint64_t cell = 0) {
  SimulationSpec spec;
  spec.generator.d = d;
  spec.generator.n = n;
  spec.generator.k = k;
  spec.generator.r = r;
  spec.generator.variance_ratio = v;
  spec.test = test;
  spec.n_reps = reps;
  spec.seed = kSeed;
  return simulate_cell(spec, cell);
}

bool within(double x, double centre, double tol) { return std::fabs(x - centre) <= tol; }

// 1. Null rejection rates at the calibration midpoint.
void calibration(Verdict& v) {
  struct Family {
    SimTest test;
    int k;
  };
  for (const Family f : {Family{SimTest::t2, 1}, Family{SimTest::t2circ, 1}, Family{SimTest::anova2circ, 3},
                         Family{SimTest::manova, 3}}) {
    const auto t0 = std::chrono::steady_clock::now();
    const RateRow row = rate(f.test, 0.0, 10, f.k);
    const double secs = seconds_since(t0);
    v.require(within(row.rate, 0.05, 0.007),
              std::string(to_string(f.test)) + " rate " + num(row.rate) + " (se " + num(row.se) + ")");
    v.require(secs < 60.0, std::string(to_string(f.test)) + " took " + num(secs, 2) + " s");
  }
}

// 2. Correlated or unequal-variance components inflate T2circ but not T2.
void violation(Verdict& v) {
  const RateRow circ_r = rate(SimTest::t2circ, 0.0, 10, 1, 0.9, 1.0);
  const RateRow t2_r = rate(SimTest::t2, 0.0, 10, 1, 0.9, 1.0);
  const RateRow circ_v = rate(SimTest::t2circ, 0.0, 10, 1, 0.0, 8.0);
  const RateRow t2_v = rate(SimTest::t2, 0.0, 10, 1, 0.0, 8.0);
  const bool ok_r = circ_r.rate >= 0.08 && within(t2_r.rate, 0.05, 0.007);
  const bool ok_v = circ_v.rate >= 0.08 && within(t2_v.rate, 0.05, 0.007);
  v.detail << "r=0.9: T2circ " << num(circ_r.rate) << ", T2 " << num(t2_r.rate) << (ok_r ? " ok" : " no")
           << "; v=8: T2circ " << num(circ_v.rate) << ", T2 " << num(t2_v.rate) << (ok_v ? " ok" : " no")
           << "; ";
  v.require(ok_r || ok_v, "inflation shown under at least one violation");
}

// 3. Power ordering for the circular tests against their covariance-aware counterparts.
void power_ordering(Verdict& v) {
  struct Pair {
    SimTest circ;
    SimTest full;
    int k;
  };
  for (const Pair p : {Pair{SimTest::t2circ, SimTest::t2, 1}, Pair{SimTest::anova2circ, SimTest::manova, 3}}) {
    const std::string label = std::string(to_string(p.circ)) + "-" + std::string(to_string(p.full));
    auto diff = [&](double d, int n) {
      return rate(p.circ, d, n, p.k).rate - rate(p.full, d, n, p.k).rate;
    };
    const double a = diff(1.0, 8);
    const double b = diff(0.5, 16);
    const double c = diff(1.0, 64);
    v.require(a >= 0.02, label + " at (1, 8) " + num(a));
    v.require(b >= 0.02, label + " at (0.5, 16) " + num(b));
    v.require(c <= 0.01, label + " at (1, 64) " + num(c));
  }
}

// 4. Simulated condition-index quantiles against the two densities.
void ci_density(Verdict& v) {
  const CiDistribution sim4 = simulate_ci_distribution(4, 100000, kSeed);
  const double empirical = sim4.quantile(0.95);
  const double modified = ci_quantile(0.95, {4, CiDensityVariant::modified});
  const double edelman = ci_quantile(0.95, {4, CiDensityVariant::edelman});
  const double rel = std::fabs(modified - empirical) / empirical;
  v.require(rel <= 0.02, "N=4 empirical " + num(empirical) + " vs modified " + num(modified) + " (" +
                             num(100 * rel, 2) + "%)");
  v.require(std::fabs(edelman - empirical) > std::fabs(modified - empirical),
            "Edelman threshold " + num(edelman) + " farther");
  const double m64 = ci_quantile(0.95, {64, CiDensityVariant::modified});
  const double e64 = ci_quantile(0.95, {64, CiDensityVariant::edelman});
  const double rel64 = std::fabs(m64 - e64) / m64;
  v.require(rel64 <= 0.02, "N=64 thresholds " + num(m64) + " / " + num(e64) + " (" + num(100 * rel64, 2) + "%)");
}

// 5. Condition-index test sensitivity to a single planted outlier.
void outlier_heuristic(Verdict& v) {
  std::vector<double> rates;
  for (double d : {1.0, 3.0, 5.0}) rates.push_back(simulate_outlier_effect(16, d, kReps, kSeed).rate);
  v.require(within(rates[0], 0.05, 0.015), "D=1 rate " + num(rates[0]));
  v.require(rates[2] > 0.10, "D=5 rate " + num(rates[2]));
  v.require(rates[0] <= rates[1] && rates[1] <= rates[2], "D=3 rate " + num(rates[1]) + ", monotone");
}

std::string env_or(const char* name, const std::string& fallback) {
  const char* value = std::getenv(name);
  return value && *value ? value : fallback;
}

struct CliRun {
  int code;
  std::string out;
};

CliRun cli(std::vector<std::string> args) {
  args.insert(args.begin(), "phasestat");
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str()};
}

// 6. Worked analyses: real data when provided, otherwise the checked-in fixtures and goldens.
void reanalyses(Verdict& v) {
  const std::string mouse_path = env_or("PHASESTAT_MOUSE_CSV", fixture::data_path("mouse.csv"));
  const std::string human_path = env_or("PHASESTAT_HUMAN_CSV", fixture::data_path("human.csv"));
  const bool real_data = mouse_path != fixture::data_path("mouse.csv");
  v.detail << (real_data ? "external data; " : "synthetic fixtures; ");

  auto load = [](const std::string& path, Design design) {
    return build_dataset(parse_components_csv(read_text_file(path)), design).dataset;
  };
  const AnalysisReport mouse = analyze(load(mouse_path, Design::paired), AnalysisOptions{});
  const TestResult& m = mouse.main_test;
  v.require(mouse.leaf == FlowchartLeaf::t2circ_paired, "mouse leaf " + std::string(to_string(mouse.leaf)));
  v.require(within(m.statistic, 1.39, 0.01), "mouse T2circ " + num(m.statistic, 3));
  v.require(m.f_value && within(*m.f_value, 8.32, 0.05), "F(2,10) " + num(m.f_value.value_or(NAN), 2));
  v.require(m.df == FParams{2, 10}, "df (2,10)");
  v.require(within(m.p_value, 0.007, 0.001), "p " + num(m.p_value));
  v.require(m.effect_size && within(*m.effect_size, 2.14, 0.02), "D " + num(m.effect_size.value_or(NAN), 3));
  const double ci[2] = {1.59, 1.69};
  const double cp[2] = {0.66, 0.59};
  for (int c = 0; c < 2; ++c) {
    const auto& t = *mouse.conditions[c].ci_test;
    v.require(within(t.statistic, ci[c], 0.02) && within(t.p_value, cp[c], 0.02),
              "mouse CI " + num(t.statistic, 2) + " p " + num(t.p_value, 3));
  }

  AnalysisOptions opts;
  opts.posthoc = PosthocMode::baseline;
  const AnalysisReport human = analyze(load(human_path, Design::oneway_repeated), opts);
  v.require(human.retained == 89, "human retained " + std::to_string(human.retained));
  v.require(human.main_test.df == FParams{12, 1056} && within(*human.main_test.f_value, 38.9, 0.2),
            "F(12,1056) " + num(*human.main_test.f_value, 2));
  const std::vector<std::pair<std::string, double>> expected{{"8%", 0.32}, {"16%", 0.28}, {"32%", 0.10}, {"64%", 0.40}};
  for (const auto& [cond, value] : expected) {
    bool found = false;
    if (human.posthoc) {
      for (const auto& cmp : human.posthoc->tests) {
        if (cmp.condition_b != cond) continue;
        found = true;
        v.require(cmp.significant && within(cmp.result.statistic, value, 0.01),
                  cond + " T2circ " + num(cmp.result.statistic, 3));
      }
    }
    if (!found) v.require(false, cond + " contrast missing");
  }

  if (!real_data) {
    const auto golden_mouse = cli({"analyze", mouse_path});
    v.require(golden_mouse.code == 0 &&
                  golden_mouse.out == read_text_file(fixture::golden_path("mouse_report.json")),
              "mouse golden");
    const auto golden_human = cli({"analyze", human_path, "--posthoc", "baseline"});
    v.require(golden_human.code == 0 &&
                  golden_human.out == read_text_file(fixture::golden_path("human_report.json")),
              "human golden");
  }
}

// 7. Library statistics against brute-force implementations.
void oracle_equivalence(Verdict& v) {
  std::mt19937_64 gen(kSeed);
  std::uniform_int_distribution<std::size_t> size(3, 12);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst[6] = {0, 0, 0, 0, 0, 0};
  for (int i = 0; i < 100; ++i) {
    const auto xs = oracle::random_points(gen, size(gen), 0.6 * u(gen), 1.5 + u(gen));
    const oracle::Point mu{u(gen), u(gen)};
    const ComplexSample s(xs);
    worst[0] = std::max(worst[0], oracle::rel_diff(t2_one_sample(s, mu).statistic, oracle::hotelling_t2(xs, mu)));
    worst[1] = std::max(worst[1], oracle::rel_diff(t2circ_one_sample(s, mu).statistic, oracle::t2circ(xs, mu)));

    std::vector<std::vector<oracle::Point>> groups(2 + i % 3);
    std::vector<ComplexSample> samples;
    for (auto& g : groups) {
      g = oracle::random_points(gen, size(gen));
      samples.emplace_back(g);
    }
    worst[2] = std::max(worst[2], oracle::rel_diff(*anova2circ_independent(samples).f_value,
                                                   oracle::anova2circ_f(groups)));

    const auto d = mahalanobis_distances(s).distances;
    const auto dref = oracle::mahalanobis(xs);
    for (std::size_t j = 0; j < d.size(); ++j) worst[3] = std::max(worst[3], oracle::rel_diff(d[j], dref[j]));

    const double level = 0.68;
    const auto e = amp_errors_ellipse(s, level);
    const auto eref = oracle::ellipse_scan_zoom(xs, level);
    worst[4] = std::max(worst[4], oracle::rel_diff(e.error_high, eref.farthest));
    if (!e.origin_inside) worst[5] = std::max(worst[5], oracle::rel_diff(e.error_low, eref.nearest));
  }
  const char* names[6] = {"T2", "T2circ", "ANOVA2circ", "Mahalanobis", "ellipse high", "ellipse low"};
  for (int i = 0; i < 6; ++i) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.1e", worst[i]);
    v.require(worst[i] <= 1e-8, std::string(names[i]) + " max rel " + buf);
  }
}

// 8. Structural identities over randomised inputs.
void identities(Verdict& v) {
  std::mt19937_64 gen(kSeed + 1);
  std::uniform_int_distribution<std::size_t> size(4, 30);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::size_t violations = 0;
  auto check = [&](bool ok) { violations += ok ? 0 : 1; };
  auto close = [](double a, double b) { return oracle::rel_diff(a, b) < 1e-9; };
  for (int i = 0; i < 200; ++i) {
    const std::size_t n = size(gen);
    const int ni = static_cast<int>(n);
    const ComplexSample a(oracle::random_points(gen, n));
    const ComplexSample b(oracle::random_points(gen, n));
    const ComplexSample c(oracle::random_points(gen, n));

    const auto t2 = t2_one_sample(a);
    check(t2.df == FParams{2, ni - 2});
    check(close(*t2.f_value, (n - 2.0) / (2.0 * (n - 1.0)) * t2.statistic));
    const auto circ = t2circ_one_sample(a);
    check(circ.df == FParams{2, 2 * ni - 2});
    check(close(*circ.f_value, n * circ.statistic));
    const auto paired = t2circ_paired(a, b);
    check(close(*paired.f_value, n * paired.statistic));

    const std::vector<ComplexSample> g{a, b, c};
    check(anova2circ_independent(g).df == FParams{4, 2 * (3 * ni - 3)});
    check(anova2circ_repeated(g).df == FParams{4, 2 * (ni - 1) * 2});

    double sum = 0.0;
    for (double d : mahalanobis_distances(a).distances) sum += d * d;
    check(std::fabs(sum - 2.0 * (n - 1.0)) < 1e-9 * n);

    const ComplexObservation rot = std::polar(std::exp(2 * u(gen)), 3 * u(gen));
    const ComplexObservation shift{u(gen), u(gen)};
    auto map = [&](const ComplexSample& x) { return x.transformed(rot, shift); };
    check(close(t2circ_one_sample(map(a), shift).statistic, t2circ_one_sample(a).statistic));
    check(close(t2_one_sample(map(a), shift).statistic, t2.statistic));
    check(close(ci_test(map(a)).statistic, ci_test(a).statistic));
    const std::vector<ComplexSample> gm{map(a), map(b), map(c)};
    check(close(*anova2circ_independent(gm).f_value, *anova2circ_independent(g).f_value));
    check(close(*manova_oneway(gm).f_value, *manova_oneway(g).f_value));
  }
  v.require(violations == 0, "200 random inputs, " + std::to_string(violations) + " violations");
}

// 9. Seeded commands reproduce byte-identical output.
void determinism(Verdict& v) {
  const std::vector<std::vector<std::string>> commands{
      {"analyze", fixture::data_path("mouse.csv"), "--seed", "3"},
      {"analyze", fixture::data_path("human.csv"), "--posthoc", "baseline", "--format", "text"},
      {"simulate", "fig3", "--reps", "500", "--seed", "1"},
      {"simulate", "fig5", "--reps", "500", "--seed", "1", "--format", "json"},
      {"power", "--d", "0,0.5", "--n", "8,16", "--reps", "500", "--seed", "1"},
  };
  for (const auto& cmd : commands) {
    const auto first = cli(cmd);
    const auto second = cli(cmd);
    v.require(first.code == 0 && first.out == second.out && !first.out.empty(), cmd[0] + " " + cmd[1]);
  }

  // Cluster correction over a four-node chain written to a scratch directory.
  const auto dir = std::filesystem::temp_directory_path() / "phasestat_acceptance_cluster";
  std::filesystem::create_directories(dir);
  std::mt19937_64 gen(kSeed);
  std::normal_distribution<double> z;
  std::vector<std::string> cluster_cmd{"cluster"};
  for (int node = 0; node < 4; ++node) {
    const auto path = (dir / ("node" + std::to_string(node) + ".csv")).string();
    std::ofstream csv(path);
    csv << "unit,condition,re,im\n";
    for (int i = 0; i < 10; ++i) csv << "s" << i << ",c," << z(gen) + (node < 2 ? 1.0 : 0.0) << "," << z(gen) << "\n";
    cluster_cmd.push_back(path);
  }
  const auto edges = (dir / "edges.txt").string();
  std::ofstream(edges) << "0 1\n1 2\n2 3\n";
  for (const char* a : {"--edges", edges.c_str(), "--perms", "500", "--seed", "1"}) cluster_cmd.emplace_back(a);
  const auto c1 = cli(cluster_cmd);
  v.require(c1.code == 0 && c1.out == cli(cluster_cmd).out, "cluster");
  std::filesystem::remove_all(dir);

  auto threaded = std::vector<std::string>{"simulate", "fig7", "--reps", "300", "--seed", "1", "--threads", "1"};
  const auto one = cli(threaded);
  threaded.back() = "4";
  v.require(one.out == cli(threaded).out, "fig7 identical with 1 and 4 threads");
}

}  // namespace

int main() {
  const std::vector<std::pair<int, std::function<void(Verdict&)>>> criteria{
      {1, calibration}, {2, violation},          {3, power_ordering}, {4, ci_density}, {5, outlier_heuristic},
      {6, reanalyses},  {7, oracle_equivalence}, {8, identities},     {9, determinism},
  };
  int failures = 0;
  for (const auto& [id, fn] : criteria) {
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      fn(v);
    } catch (const std::exception& e) {
      v.require(false, std::string("exception: ") + e.what());
    }
    failures += v.pass ? 0 : 1;
    std::printf("criterion %d: %s  (%.1f s) %s\n", id, v.pass ? "PASS" : "FAIL", seconds_since(t0),
                v.detail.str().c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
