#include "phasestat/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <sstream>
#include <string>

#include "phasestat/distributions.hpp"
#include "phasestat/errors.hpp"
#include "phasestat/hypothesis.hpp"
#include "phasestat/random.hpp"

namespace phasestat {

namespace {

using Obs = ComplexObservation;

// Fast F kernels for the permutation loop. They mirror the library tests
// and return 0 where the corresponding test would throw.
double f_one_sample(std::span<const Obs> d, ClusterTest test) {
  const double n = static_cast<double>(d.size());
  Obs mean{0.0, 0.0};
  for (const auto& x : d) mean += x;
  mean /= n;
  if (test == ClusterTest::t2circ) {
    double ss = 0.0;
    for (const auto& x : d) ss += std::norm(x - mean);
    return ss > 0.0 ? n * (n - 1.0) * std::norm(mean) / ss : 0.0;
  }
  SymMat2 scatter;
  for (const auto& x : d) scatter = scatter + outer(x - mean);
  const SymMat2 cov = (1.0 / (n - 1.0)) * scatter;
  if (!(cov.det() > 0.0)) return 0.0;
  const double t2 = n * cov.inverse_quadratic(mean);
  return (n - 2.0) / (2.0 * (n - 1.0)) * t2;
}

double f_two_sample(std::span<const Obs> a, std::span<const Obs> b, ClusterTest test) {
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  Obs ma{0.0, 0.0};
  Obs mb{0.0, 0.0};
  for (const auto& x : a) ma += x;
  for (const auto& x : b) mb += x;
  ma /= na;
  mb /= nb;
  const double h = na * nb / (na + nb);
  if (test == ClusterTest::t2circ) {
    double ss = 0.0;
    for (const auto& x : a) ss += std::norm(x - ma);
    for (const auto& x : b) ss += std::norm(x - mb);
    return ss > 0.0 ? h * (na + nb - 2.0) * std::norm(ma - mb) / ss : 0.0;
  }
  SymMat2 scatter;
  for (const auto& x : a) scatter = scatter + outer(x - ma);
  for (const auto& x : b) scatter = scatter + outer(x - mb);
  const SymMat2 pooled = (1.0 / (na + nb - 2.0)) * scatter;
  if (!(pooled.det() > 0.0)) return 0.0;
  const double t2 = h * pooled.inverse_quadratic(ma - mb);
  return (na + nb - 3.0) / (2.0 * (na + nb - 2.0)) * t2;
}

struct NodeData {
  std::vector<Obs> values;  // deviations/differences, or pooled a-then-b
};

double max_mass(const std::vector<double>& f, double f_crit,
                const std::vector<std::vector<std::size_t>>& nbrs) {
  std::vector<bool> mask(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) mask[i] = f[i] > f_crit;
  double best = 0.0;
  for (const auto& c : connected_components(nbrs, mask)) {
    double m = 0.0;
    for (std::size_t i : c) m += f[i];
    best = std::max(best, m);
  }
  return best;
}

}  // namespace

void AdjacencyGraph::validate() const {
  for (const auto& [i, j] : edges) {
    if (i >= node_count || j >= node_count) {
      throw Error(ErrorCode::invalid_graph, "edge (" + std::to_string(i) + ", " + std::to_string(j) +
                                                ") references a node >= " + std::to_string(node_count));
    }
    if (i == j) throw Error(ErrorCode::invalid_graph, "self-loop on node " + std::to_string(i));
  }
}

std::vector<std::vector<std::size_t>> AdjacencyGraph::neighbours() const {
  validate();
  std::vector<std::vector<std::size_t>> out(node_count);
  for (const auto& [i, j] : edges) {
    out[i].push_back(j);
    out[j].push_back(i);
  }
  for (auto& v : out) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
  return out;
}

AdjacencyGraph read_edge_list(std::istream& in, std::size_t node_count) {
  AdjacencyGraph g;
  g.node_count = node_count;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ss(line);
    long long i = -1;
    long long j = -1;
    std::string rest;
    if (!(ss >> i >> j) || (ss >> rest) || i < 0 || j < 0) {
      throw Error(ErrorCode::invalid_graph,
                  "line " + std::to_string(line_no) + ": expected two non-negative node indices");
    }
    g.edges.emplace_back(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  }
  g.validate();
  return g;
}

std::vector<std::vector<std::size_t>> connected_components(
    const std::vector<std::vector<std::size_t>>& neighbours, const std::vector<bool>& mask) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<bool> seen(mask.size(), false);
  std::vector<std::size_t> queue;
  for (std::size_t start = 0; start < mask.size(); ++start) {
    if (!mask[start] || seen[start]) continue;
    std::vector<std::size_t> comp;
    queue.assign(1, start);
    seen[start] = true;
    while (!queue.empty()) {
      const std::size_t v = queue.back();
      queue.pop_back();
      comp.push_back(v);
      for (std::size_t w : neighbours[v]) {
        if (mask[w] && !seen[w]) {
          seen[w] = true;
          queue.push_back(w);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    out.push_back(std::move(comp));
  }
  return out;
}

ClusterResult cluster_correct(std::span<const GroupedDataset> nodes, const AdjacencyGraph& graph,
                              const ClusterOptions& options) {
  if (graph.node_count != nodes.size()) {
    throw Error(ErrorCode::invalid_graph, "graph has " + std::to_string(graph.node_count) +
                                              " nodes but " + std::to_string(nodes.size()) +
                                              " datasets were supplied");
  }
  if (nodes.empty()) throw Error(ErrorCode::design_mismatch, "no node datasets supplied");
  if (!(options.alpha_forming > 0.0 && options.alpha_forming < 1.0)) {
    throw Error(ErrorCode::domain_error, "alpha_forming must lie in (0, 1)");
  }
  if (options.n_perm < 1) throw Error(ErrorCode::domain_error, "n_perm must be >= 1");
  const auto nbrs = graph.neighbours();

  const Design design = nodes[0].design();
  if (design != Design::one_sample && design != Design::paired &&
      design != Design::two_sample_independent) {
    throw Error(ErrorCode::design_mismatch,
                "cluster correction supports one_sample, paired and two_sample_independent designs");
  }
  std::vector<std::size_t> sizes;
  for (const auto& s : nodes[0].samples()) sizes.push_back(s.size());
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    std::vector<std::size_t> si;
    for (const auto& s : nodes[i].samples()) si.push_back(s.size());
    if (nodes[i].design() != design || si != sizes) {
      throw Error(ErrorCode::design_mismatch,
                  "node " + std::to_string(i) + " differs in design or group sizes from node 0");
    }
  }

  const bool two_sample = design == Design::two_sample_independent;
  const std::size_t n_a = sizes[0];
  std::vector<NodeData> data(nodes.size());
  ClusterResult result;
  result.alpha_cluster = options.alpha_forming;
  result.node_f.resize(nodes.size());
  result.node_p.resize(nodes.size());
  FParams df{};
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& ds = nodes[i];
    TestResult tr;
    if (design == Design::one_sample) {
      const auto& s = ds.samples()[0];
      tr = options.test == ClusterTest::t2 ? t2_one_sample(s, ds.mu()) : t2circ_one_sample(s, ds.mu());
      for (const auto& x : s.observations()) data[i].values.push_back(x - ds.mu());
    } else if (design == Design::paired) {
      const auto& a = ds.samples()[0];
      const auto& b = ds.samples()[1];
      tr = options.test == ClusterTest::t2 ? t2_paired(a, b) : t2circ_paired(a, b);
      for (std::size_t j = 0; j < a.size(); ++j) data[i].values.push_back(a[j] - b[j]);
    } else {
      const auto& a = ds.samples()[0];
      const auto& b = ds.samples()[1];
      tr = options.test == ClusterTest::t2 ? t2_two_sample(a, b) : t2circ_two_sample(a, b);
      data[i].values.assign(a.observations().begin(), a.observations().end());
      data[i].values.insert(data[i].values.end(), b.observations().begin(), b.observations().end());
    }
    result.node_f[i] = *tr.f_value;
    result.node_p[i] = tr.p_value;
    df = *tr.df;
  }

  const double f_crit = f_quantile(1.0 - options.alpha_forming, df);
  std::vector<bool> mask(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) mask[i] = result.node_f[i] > f_crit;
  result.clusters = connected_components(nbrs, mask);
  for (const auto& c : result.clusters) {
    double m = 0.0;
    for (std::size_t i : c) m += result.node_f[i];
    result.cluster_masses.push_back(m);
  }

  const std::size_t n_units = data[0].values.size();
  std::vector<Obs> work(n_units);
  std::vector<double> perm_f(nodes.size());
  std::vector<std::size_t> order(n_units);
  std::vector<double> signs(n_units);
  result.null_distribution.reserve(options.n_perm);
  for (std::size_t p = 0; p < options.n_perm; ++p) {
    Rng rng = Rng::substream(options.seed, {static_cast<std::uint64_t>(p)});
    if (two_sample) {
      for (std::size_t j = 0; j < n_units; ++j) order[j] = j;
      for (std::size_t j = n_units; j > 1; --j) std::swap(order[j - 1], order[rng.below(j)]);
    } else {
      for (auto& s : signs) s = (rng() >> 63) != 0 ? -1.0 : 1.0;
    }
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const auto& v = data[i].values;
      if (two_sample) {
        for (std::size_t j = 0; j < n_units; ++j) work[j] = v[order[j]];
        perm_f[i] = f_two_sample(std::span<const Obs>(work).first(n_a),
                                 std::span<const Obs>(work).subspan(n_a), options.test);
      } else {
        for (std::size_t j = 0; j < n_units; ++j) work[j] = signs[j] * v[j];
        perm_f[i] = f_one_sample(work, options.test);
      }
    }
    result.null_distribution.push_back(max_mass(perm_f, f_crit, nbrs));
  }
  std::sort(result.null_distribution.begin(), result.null_distribution.end());

  const double denom = static_cast<double>(options.n_perm) + 1.0;
  for (double mass : result.cluster_masses) {
    const auto it = std::lower_bound(result.null_distribution.begin(),
                                     result.null_distribution.end(), mass);
    const auto at_least = static_cast<double>(result.null_distribution.end() - it);
    result.corrected_p.push_back((1.0 + at_least) / denom);
  }
  return result;
}

}  // namespace phasestat
