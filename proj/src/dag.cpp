#include "dagcn/dag.hpp"

#include <algorithm>
#include <iomanip>
#include <istream>
#include <ostream>
#include <queue>
#include <sstream>
#include <string>

#include "dagcn/rng.hpp"

namespace dagcn {

std::vector<int> sample_without_replacement(int n, int count, std::mt19937_64& rng) {
  if (count < 0 || count > n) {
    throw ParamError("sample_without_replacement: count out of range");
  }
  std::vector<int> pool(n);
  for (int i = 0; i < n; ++i) pool[i] = i;
  for (int i = 0; i < count; ++i) {
    std::uniform_int_distribution<int> pick(i, n - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  pool.resize(count);
  std::sort(pool.begin(), pool.end());
  return pool;
}

int Dag::edge_count() const {
  int count = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < i; ++j) {
      if (adj(i, j) != 0.0) ++count;
    }
  }
  return count;
}

Mat Dag::original_adjacency() const {
  Mat out = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (adj(i, j) != 0.0) out(order[i], order[j]) = adj(i, j);
    }
  }
  return out;
}

NodePermutation NodePermutation::inverse() const {
  NodePermutation inv;
  inv.perm.resize(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) inv.perm[perm[i]] = static_cast<int>(i);
  return inv;
}

Dag sample_er_dag(int n, double p, const WeightLaw& law, std::uint64_t seed) {
  if (n < 1) throw ParamError("sample_er_dag: node count must be >= 1");
  if (!(p >= 0.0 && p <= 1.0)) throw ParamError("sample_er_dag: edge probability must lie in [0, 1]");

  std::mt19937_64 rng = make_rng(seed, /*salt=*/0x6461675fULL);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  Dag dag;
  dag.n = n;
  dag.adj = Mat::Zero(n, n);
  dag.order.resize(n);
  for (int i = 0; i < n; ++i) dag.order[i] = i;

  for (int i = 1; i < n; ++i) {
    for (int j = 0; j < i; ++j) {
      if (unif(rng) >= p) continue;
      double w = 1.0;
      if (law.kind == WeightLaw::Kind::kUniformSigned) {
        double mag = law.lo + (law.hi - law.lo) * unif(rng);
        double sign = unif(rng) < 0.5 ? -1.0 : 1.0;
        w = sign * mag;
      }
      dag.adj(i, j) = w;
    }
  }
  return dag;
}

namespace {

// Walks predecessors inside the Kahn-irreducible remainder until a node
// repeats, then reports the closing edge of the cycle.
[[noreturn]] void report_cycle(const Mat& a, const std::vector<char>& remaining) {
  const int n = static_cast<int>(a.rows());
  int start = -1;
  for (int i = 0; i < n; ++i) {
    if (remaining[i]) {
      start = i;
      break;
    }
  }
  std::vector<int> seen_at(n, -1);
  std::vector<int> path;
  int cur = start;
  while (seen_at[cur] < 0) {
    seen_at[cur] = static_cast<int>(path.size());
    path.push_back(cur);
    int pred = -1;
    for (int j = 0; j < n; ++j) {
      if (remaining[j] && a(cur, j) != 0.0) {
        pred = j;
        break;
      }
    }
    cur = pred;  // every remaining node keeps a remaining predecessor
  }
  // cur repeats; the edge cur -> path.back() closes a cycle.
  std::ostringstream msg;
  msg << "validate_dag: input contains a cycle through edge " << cur << " -> " << path.back();
  throw AcyclicityError(msg.str());
}

}  // namespace

Dag validate_dag(const Mat& adjacency) {
  const int n = static_cast<int>(adjacency.rows());
  if (n < 1 || adjacency.cols() != n) {
    throw ParamError("validate_dag: adjacency must be a non-empty square matrix");
  }
  for (int i = 0; i < n; ++i) {
    if (adjacency(i, i) != 0.0) {
      std::ostringstream msg;
      msg << "validate_dag: input contains a cycle through edge " << i << " -> " << i;
      throw AcyclicityError(msg.str());
    }
  }

  std::vector<int> in_degree(n, 0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (adjacency(i, j) != 0.0) ++in_degree[i];
    }
  }

  std::priority_queue<int, std::vector<int>, std::greater<int>> ready;
  for (int i = 0; i < n; ++i) {
    if (in_degree[i] == 0) ready.push(i);
  }

  std::vector<int> order;
  order.reserve(n);
  std::vector<char> remaining(n, 1);
  while (!ready.empty()) {
    const int u = ready.top();
    ready.pop();
    remaining[u] = 0;
    order.push_back(u);
    for (int i = 0; i < n; ++i) {
      if (adjacency(i, u) != 0.0 && remaining[i]) {
        if (--in_degree[i] == 0) ready.push(i);
      }
    }
  }
  if (static_cast<int>(order.size()) != n) report_cycle(adjacency, remaining);

  std::vector<int> position(n);
  for (int s = 0; s < n; ++s) position[order[s]] = s;

  Dag dag;
  dag.n = n;
  dag.order = std::move(order);
  dag.adj = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (adjacency(i, j) != 0.0) dag.adj(position[i], position[j]) = adjacency(i, j);
    }
  }
  return dag;
}

Dag permute(const Dag& dag, const NodePermutation& perm) {
  if (static_cast<int>(perm.perm.size()) != dag.n) {
    throw ParamError("permute: permutation size does not match node count");
  }
  std::vector<char> hit(dag.n, 0);
  for (int v : perm.perm) {
    if (v < 0 || v >= dag.n || hit[v]) throw ParamError("permute: not a bijection on the node set");
    hit[v] = 1;
  }

  const Mat labeled = dag.original_adjacency();
  Mat relabeled = Mat::Zero(dag.n, dag.n);
  for (int i = 0; i < dag.n; ++i) {
    for (int j = 0; j < dag.n; ++j) {
      if (labeled(i, j) != 0.0) relabeled(perm.perm[i], perm.perm[j]) = labeled(i, j);
    }
  }
  return validate_dag(relabeled);
}

void save_dag(const Dag& dag, std::ostream& out) {
  out << "n " << dag.n << "\n";
  out << std::setprecision(17);
  for (int i = 0; i < dag.n; ++i) {
    for (int j = 0; j < i; ++j) {
      if (dag.adj(i, j) != 0.0) {
        out << dag.order[j] << " " << dag.order[i] << " " << dag.adj(i, j) << "\n";
      }
    }
  }
}

Dag load_dag(std::istream& in) {
  std::string tag;
  int n = 0;
  if (!(in >> tag >> n) || tag != "n") throw IoError("load_dag: expected header line `n <N>`");
  if (n < 1) throw IoError("load_dag: node count must be >= 1");
  Mat a = Mat::Zero(n, n);
  int src = 0, dst = 0;
  double w = 0.0;
  while (in >> src >> dst >> w) {
    if (src < 0 || src >= n || dst < 0 || dst >= n) throw IoError("load_dag: edge endpoint out of range");
    a(dst, src) = w;
  }
  return validate_dag(a);
}

}  // namespace dagcn
