#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "dagcn/types.hpp"

namespace dagcn {

/// Distribution of sampled edge weights.
struct WeightLaw {
  enum class Kind { kUnit, kUniformSigned };
  Kind kind = Kind::kUniformSigned;
  double lo = 0.2;  // magnitude bounds for kUniformSigned
  double hi = 0.5;

  static WeightLaw unit() { return {Kind::kUnit, 1.0, 1.0}; }
  static WeightLaw uniform_signed(double lo, double hi) {
    return {Kind::kUniformSigned, lo, hi};
  }
};

/// Directed acyclic graph held in topological storage order.
///
/// adj(i, j) != 0 iff there is an edge j -> i; the matrix is strictly lower
/// triangular in storage order and the diagonal is zero. `order` maps storage
/// index -> node label of whatever adjacency the graph was built from
/// (identity for sampled graphs).
struct Dag {
  int n = 0;
  Mat adj;
  std::vector<int> order;

  bool has_edge(int dst, int src) const { return adj(dst, src) != 0.0; }
  int edge_count() const;
  /// Adjacency re-indexed by the labels in `order`.
  Mat original_adjacency() const;
};

struct NodePermutation {
  std::vector<int> perm;  // bijection on {0..n-1}

  NodePermutation inverse() const;
};

/// Erdos-Renyi DAG: every storage pair (i, j) with j < i carries an edge
/// independently with probability p. Storage order is the topological order.
Dag sample_er_dag(int n, double p, const WeightLaw& law, std::uint64_t seed);

/// Topologically sorts an arbitrary square adjacency (zero diagonal) into a
/// Dag, recording the permutation. Ties break toward the lowest input label.
/// Throws AcyclicityError naming one cycle edge when no order exists.
Dag validate_dag(const Mat& adjacency);

/// Relabels nodes through `perm` and re-validates into storage order.
Dag permute(const Dag& dag, const NodePermutation& perm);

// Plain-text edge list: header `n <N>`, then one `src dst weight` line per
// edge in original labels, full decimal precision.
void save_dag(const Dag& dag, std::ostream& out);
Dag load_dag(std::istream& in);

}  // namespace dagcn
