#include "dagcn/shifts.hpp"

#include <algorithm>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "dagcn/rng.hpp"

namespace dagcn {

int CausalShiftSet::index_of(int k) const {
  auto it = std::find(nodes.begin(), nodes.end(), k);
  if (it == nodes.end()) {
    std::ostringstream msg;
    msg << "CausalShiftSet: node " << k << " is not in U";
    throw ParamError(msg.str());
  }
  return static_cast<int>(it - nodes.begin());
}

CausalShiftSet predecessor_masks(const Dag& dag, std::vector<int> nodes, bool transposed) {
  if (nodes.empty()) throw ParamError("predecessor_masks: U must be nonempty");
  for (int k : nodes) {
    if (k < 0 || k >= dag.n) throw ParamError("predecessor_masks: node id out of range");
  }

  // Predecessor lists: preds[i] = {j : edge j -> i}.
  std::vector<std::vector<int>> preds(dag.n);
  for (int i = 0; i < dag.n; ++i) {
    for (int j = 0; j < i; ++j) {
      if (dag.adj(i, j) != 0.0) preds[i].push_back(j);
    }
  }

  CausalShiftSet set;
  set.nodes = std::move(nodes);
  set.transposed = transposed;
  set.masks = Mat::Zero(dag.n, set.size());

  std::vector<char> visited(dag.n);
  std::vector<int> stack;
  for (int u = 0; u < set.size(); ++u) {
    std::fill(visited.begin(), visited.end(), 0);
    stack.assign(1, set.nodes[u]);
    visited[set.nodes[u]] = 1;
    while (!stack.empty()) {
      const int cur = stack.back();
      stack.pop_back();
      set.masks(cur, u) = 1.0;
      for (int j : preds[cur]) {
        if (!visited[j]) {
          visited[j] = 1;
          stack.push_back(j);
        }
      }
    }
  }
  return set;
}

CausalShiftSet random_shift_set(const Dag& dag, int count, std::uint64_t seed, bool transposed) {
  if (count < 0 || count > dag.n) throw ParamError("random_shift_set: count out of range");
  std::vector<int> nodes;
  if (count == 0) {
    nodes.resize(dag.n);
    for (int i = 0; i < dag.n; ++i) nodes[i] = i;
  } else {
    auto rng = make_rng(seed, /*salt=*/0x736869ULL);
    nodes = sample_without_replacement(dag.n, count, rng);
  }
  return predecessor_masks(dag, std::move(nodes), transposed);
}

namespace {

void check_nodes(const ClosurePair& closure, const SignalBatch& x, const char* where) {
  if (x.nodes() != closure.nodes()) {
    std::ostringstream msg;
    msg << where << ": signal has " << x.nodes() << " nodes, closure has " << closure.nodes();
    throw ShapeError(msg.str());
  }
}

// Shared kernel: post * (diag(scale) * (pre * x)) with pre/post chosen by the
// direction flag.
Mat masked_pass(const ClosurePair& closure, const Vec& scale, bool transposed, const Mat& x) {
  if (!transposed) {
    Mat y = closure.apply_winv(x);
    y = scale.asDiagonal() * y;
    return closure.apply_w(y);
  }
  Mat y = closure.apply_w_t(x);
  y = scale.asDiagonal() * y;
  return closure.apply_winv_t(y);
}

}  // namespace

SignalBatch apply_shift(const ClosurePair& closure, const CausalShiftSet& shifts, int k,
                        const SignalBatch& x) {
  check_nodes(closure, x, "apply_shift");
  const int u = shifts.index_of(k);
  const Vec mask = shifts.masks.col(u);
  return SignalBatch::wrap(masked_pass(closure, mask, shifts.transposed, x.data()),
                           x.samples(), x.features());
}

SignalBatch apply_filter(const DagFilter& filter, const ClosurePair& closure,
                         const SignalBatch& x) {
  check_nodes(closure, x, "apply_filter");
  if (filter.coeffs.size() != filter.shifts.size()) {
    throw ShapeError("apply_filter: coefficient count does not match |U|");
  }
  const Vec response = filter.shifts.masks * filter.coeffs;
  return SignalBatch::wrap(masked_pass(closure, response, filter.shifts.transposed, x.data()),
                           x.samples(), x.features());
}

SignalBatch fourier(const ClosurePair& closure, const SignalBatch& x) {
  check_nodes(closure, x, "fourier");
  return SignalBatch::wrap(closure.apply_winv(x.data()), x.samples(), x.features());
}

SignalBatch inverse_fourier(const ClosurePair& closure, const SignalBatch& c) {
  check_nodes(closure, c, "inverse_fourier");
  return SignalBatch::wrap(closure.apply_w(c.data()), c.samples(), c.features());
}

Vec frequency_response(const DagFilter& filter) {
  if (filter.coeffs.size() != filter.shifts.size()) {
    throw ShapeError("frequency_response: coefficient count does not match |U|");
  }
  return filter.shifts.masks * filter.coeffs;
}

void save_filter(const DagFilter& filter, std::ostream& out) {
  out << std::setprecision(17);
  for (int u = 0; u < filter.shifts.size(); ++u) {
    out << filter.shifts.nodes[u] << " " << filter.coeffs[u] << "\n";
  }
}

}  // namespace dagcn
