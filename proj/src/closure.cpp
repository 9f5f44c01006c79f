#include "dagcn/closure.hpp"

#include <vector>

namespace dagcn {

Mat ClosurePair::apply_w(const Mat& x) const {
  if (x.rows() != n_) throw ShapeError("ClosurePair::apply_w: row count mismatch");
  if (dense_) return w_.triangularView<Eigen::Lower>() * x;
  return w_sp_ * x;
}

Mat ClosurePair::apply_winv(const Mat& x) const {
  if (x.rows() != n_) throw ShapeError("ClosurePair::apply_winv: row count mismatch");
  if (dense_) return winv_.triangularView<Eigen::Lower>() * x;
  return winv_sp_ * x;
}

Mat ClosurePair::apply_w_t(const Mat& x) const {
  if (x.rows() != n_) throw ShapeError("ClosurePair::apply_w_t: row count mismatch");
  if (dense_) return w_.transpose().triangularView<Eigen::Upper>() * x;
  return w_sp_.transpose() * x;
}

Mat ClosurePair::apply_winv_t(const Mat& x) const {
  if (x.rows() != n_) throw ShapeError("ClosurePair::apply_winv_t: row count mismatch");
  if (dense_) return winv_.transpose().triangularView<Eigen::Upper>() * x;
  return winv_sp_.transpose() * x;
}

Mat ClosurePair::w_dense() const {
  if (dense_) return w_;
  return Mat(w_sp_);
}

Mat ClosurePair::winv_dense() const {
  if (dense_) return winv_;
  return Mat(winv_sp_);
}

ClosurePair transitive_closure(const Dag& dag, int dense_threshold) {
  ClosurePair c;
  c.n_ = dag.n;
  c.dense_ = dag.n <= dense_threshold;

  if (c.dense_) {
    c.winv_ = Mat::Identity(dag.n, dag.n) - dag.adj;
    c.w_ = Mat::Identity(dag.n, dag.n);
    // W.row(i) = e_i + sum_{j<i} A(i,j) W.row(j); rows resolve in storage order.
    for (int i = 1; i < dag.n; ++i) {
      for (int j = 0; j < i; ++j) {
        const double a = dag.adj(i, j);
        if (a != 0.0) c.w_.row(i).head(i) += a * c.w_.row(j).head(i);
      }
    }
    return c;
  }

  std::vector<Eigen::Triplet<double>> winv_trip, w_trip;
  std::vector<double> scratch(dag.n, 0.0);
  // Sparse rows of W built with a dense scratch accumulator per row.
  std::vector<std::vector<std::pair<int, double>>> w_rows(dag.n);
  for (int i = 0; i < dag.n; ++i) {
    winv_trip.emplace_back(i, i, 1.0);
    std::vector<int> touched;
    scratch[i] = 1.0;
    touched.push_back(i);
    for (int j = 0; j < i; ++j) {
      const double a = dag.adj(i, j);
      if (a == 0.0) continue;
      winv_trip.emplace_back(i, j, -a);
      for (const auto& [col, val] : w_rows[j]) {
        if (scratch[col] == 0.0) touched.push_back(col);
        scratch[col] += a * val;
      }
    }
    auto& row = w_rows[i];
    row.reserve(touched.size());
    for (int col : touched) {
      if (scratch[col] != 0.0) row.emplace_back(col, scratch[col]);
      scratch[col] = 0.0;
    }
    for (const auto& [col, val] : row) w_trip.emplace_back(i, col, val);
  }

  c.w_sp_.resize(dag.n, dag.n);
  c.w_sp_.setFromTriplets(w_trip.begin(), w_trip.end());
  c.winv_sp_.resize(dag.n, dag.n);
  c.winv_sp_.setFromTriplets(winv_trip.begin(), winv_trip.end());
  return c;
}

}  // namespace dagcn
