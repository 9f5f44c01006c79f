#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "dagcn/closure.hpp"
#include "dagcn/dag.hpp"
#include "dagcn/signal.hpp"
#include "dagcn/types.hpp"

namespace dagcn {

/// Node subset U with the predecessor indicators of each member.
///
/// masks is N x |U| with masks(i, u) = 1 iff node i precedes nodes[u] in the
/// DAG partial order (reflexive). `transposed` selects the reverse-order shift
/// T_k^T instead of T_k in every apply path.
struct CausalShiftSet {
  std::vector<int> nodes;
  Mat masks;
  bool transposed = false;

  int size() const { return static_cast<int>(nodes.size()); }
  /// Position of node k within U; throws ParamError when absent.
  int index_of(int k) const;
};

/// Shift-invariant DAG filter sum_{k in U} h_k T_k.
struct DagFilter {
  CausalShiftSet shifts;
  Vec coeffs;
};

/// Builds predecessor indicators by reverse reachability from each node of U.
CausalShiftSet predecessor_masks(const Dag& dag, std::vector<int> nodes, bool transposed = false);

/// U drawn uniformly without replacement; count = 0 selects every node.
CausalShiftSet random_shift_set(const Dag& dag, int count, std::uint64_t seed,
                                bool transposed = false);

/// T_k x = W (d_k o ((I-A) x)); the transposed flag yields
/// T_k^T x = (I-A)^T (d_k o (W^T x)). T_k is never materialized.
SignalBatch apply_shift(const ClosurePair& closure, const CausalShiftSet& shifts, int k,
                        const SignalBatch& x);

/// H x = sum_k h_k T_k x evaluated in one spectral pass through the
/// aggregated diagonal sum_k h_k d_k.
SignalBatch apply_filter(const DagFilter& filter, const ClosurePair& closure,
                         const SignalBatch& x);

/// Causes c = (I-A) x; simultaneously the spectral coefficients of x.
SignalBatch fourier(const ClosurePair& closure, const SignalBatch& x);
/// x = W c.
SignalBatch inverse_fourier(const ClosurePair& closure, const SignalBatch& c);

/// diag(sum_k h_k D_k) = masks * h.
Vec frequency_response(const DagFilter& filter);

// `k h_k` text pairs, one per line.
void save_filter(const DagFilter& filter, std::ostream& out);

}  // namespace dagcn
