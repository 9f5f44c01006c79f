#pragma once

#include <Eigen/SparseCore>

#include "dagcn/dag.hpp"
#include "dagcn/types.hpp"

namespace dagcn {

using SpMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Weighted transitive closure W = (I - A)^{-1} together with its exact
/// inverse I - A. Both are unit lower triangular; W(i, j) != 0 only if j is a
/// predecessor of i.
///
/// Storage is dense up to `dense_threshold` nodes and sparse above it; all
/// products go through the apply_* methods so callers never branch.
class ClosurePair {
 public:
  static constexpr int kDefaultDenseThreshold = 2000;

  int nodes() const { return n_; }
  bool is_dense() const { return dense_; }

  // W x, (I - A) x, and their transposes.
  Mat apply_w(const Mat& x) const;
  Mat apply_winv(const Mat& x) const;
  Mat apply_w_t(const Mat& x) const;
  Mat apply_winv_t(const Mat& x) const;

  /// Materialized copies; intended for oracles and small-N diagnostics.
  Mat w_dense() const;
  Mat winv_dense() const;

 private:
  friend ClosurePair transitive_closure(const Dag& dag, int dense_threshold);

  int n_ = 0;
  bool dense_ = true;
  Mat w_, winv_;
  SpMat w_sp_, winv_sp_;
};

/// Solves (I - A) W = I by forward substitution; exact in N triangular steps.
ClosurePair transitive_closure(const Dag& dag,
                               int dense_threshold = ClosurePair::kDefaultDenseThreshold);

}  // namespace dagcn
