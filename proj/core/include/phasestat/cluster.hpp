#pragma once

// Permutation cluster correction for mass bivariate tests over a set of
// adjacent nodes (sensors, timepoints or frequencies).

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "phasestat/sample.hpp"

namespace phasestat {

struct AdjacencyGraph {
  std::size_t node_count{0};
  /// Undirected pairs, 0-based.
  std::vector<std::pair<std::size_t, std::size_t>> edges;

  /// Throws InvalidGraph for out-of-range indices or self-loops.
  void validate() const;
  std::vector<std::vector<std::size_t>> neighbours() const;
};

/// Reads one "i j" pair per line. Blank lines and lines starting with '#'
/// are ignored. Throws InvalidGraph with the offending line number.
AdjacencyGraph read_edge_list(std::istream& in, std::size_t node_count);

enum class ClusterTest { t2, t2circ };

struct ClusterOptions {
  ClusterTest test{ClusterTest::t2circ};
  double alpha_forming{0.05};
  std::size_t n_perm{1000};
  std::uint64_t seed{0};
};

struct ClusterResult {
  /// Node indices of each supra-threshold connected component.
  std::vector<std::vector<std::size_t>> clusters;
  /// Sum of node F values per cluster.
  std::vector<double> cluster_masses;
  /// Largest cluster mass of each permutation, sorted ascending.
  std::vector<double> null_distribution;
  /// (1 + #{null >= mass}) / (1 + n_perm).
  std::vector<double> corrected_p;
  double alpha_cluster{0.05};
  std::vector<double> node_f;
  std::vector<double> node_p;

  bool operator==(const ClusterResult&) const = default;
};

/// Every node must carry a dataset with the same design (one_sample, paired
/// or two_sample_independent) and the same group sizes. One-sample and
/// paired nulls flip the sign of each unit's deviation from mu (or its
/// paired difference); independent two-sample nulls shuffle group labels.
/// The same permutation is applied to every node.
ClusterResult cluster_correct(std::span<const GroupedDataset> nodes, const AdjacencyGraph& graph,
                              const ClusterOptions& options);

/// Connected components of the nodes flagged in `mask`, each sorted, in
/// order of their smallest node.
std::vector<std::vector<std::size_t>> connected_components(
    const std::vector<std::vector<std::size_t>>& neighbours, const std::vector<bool>& mask);

}  // namespace phasestat
