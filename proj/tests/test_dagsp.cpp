#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "dagcn/closure.hpp"
#include "dagcn/dag.hpp"
#include "dagcn/rng.hpp"
#include "dagcn/shifts.hpp"
#include "dagcn/signal.hpp"

using namespace dagcn;

namespace {

Dag chain3() {
  Mat a = Mat::Zero(3, 3);
  a(1, 0) = 1.0;
  a(2, 1) = 1.0;
  return validate_dag(a);
}

SignalBatch random_batch(int samples, int nodes, int features, std::uint64_t seed) {
  std::mt19937_64 rng = make_rng(seed, 1);
  std::normal_distribution<double> normal(0.0, 1.0);
  SignalBatch b(samples, nodes, features);
  for (int i = 0; i < nodes; ++i) {
    for (long c = 0; c < b.data().cols(); ++c) b.data()(i, c) = normal(rng);
  }
  return b;
}

double rel_err(const Mat& got, const Mat& want) {
  const double denom = std::max(want.norm(), 1e-30);
  return (got - want).norm() / denom;
}

// Materialized T_k (or T_k^T); reference path for the lazy implementation.
Mat dense_shift(const ClosurePair& closure, const CausalShiftSet& shifts, int k) {
  const Mat w = closure.w_dense();
  const Mat winv = closure.winv_dense();
  const Vec d = shifts.masks.col(shifts.index_of(k));
  Mat t = w * d.asDiagonal() * winv;
  if (shifts.transposed) t = Mat(t.transpose());
  return t;
}

}  // namespace

TEST_CASE("transitive closure of an edgeless graph is the identity") {
  const Dag dag = sample_er_dag(6, 0.0, WeightLaw::unit(), 1);
  const ClosurePair c = transitive_closure(dag);
  CHECK(c.w_dense() == Mat::Identity(6, 6));
  CHECK(c.winv_dense() == Mat::Identity(6, 6));
}

TEST_CASE("closure of the unit chain counts paths") {
  const ClosurePair c = transitive_closure(chain3());
  Mat want(3, 3);
  want << 1, 0, 0, 1, 1, 0, 1, 1, 1;
  CHECK(c.w_dense() == want);
}

TEST_CASE("closure equals the Neumann series on random graphs") {
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL, 4ULL}) {
    const Dag dag = sample_er_dag(20, 0.3, WeightLaw::uniform_signed(0.2, 0.5), seed);
    const ClosurePair c = transitive_closure(dag);
    Mat series = Mat::Identity(20, 20);
    Mat power = Mat::Identity(20, 20);
    for (int r = 1; r < 20; ++r) {
      power = dag.adj * power;
      series += power;
    }
    CHECK(rel_err(c.w_dense(), series) < 1e-10);
  }
}

TEST_CASE("w and winv are exact inverses") {
  const Dag dag = sample_er_dag(25, 0.25, WeightLaw::uniform_signed(0.2, 0.5), 5);
  const ClosurePair c = transitive_closure(dag);
  const Mat id = Mat::Identity(25, 25);
  CHECK((c.w_dense() * c.winv_dense() - id).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((c.winv_dense() * c.w_dense() - id).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("sparse storage matches the dense closure") {
  const Dag dag = sample_er_dag(30, 0.2, WeightLaw::uniform_signed(0.2, 0.5), 9);
  const ClosurePair dense = transitive_closure(dag);
  const ClosurePair sparse = transitive_closure(dag, /*dense_threshold=*/0);
  CHECK(!sparse.is_dense());
  CHECK(rel_err(sparse.w_dense(), dense.w_dense()) < 1e-14);
  const SignalBatch x = random_batch(3, 30, 2, 11);
  CHECK(rel_err(sparse.apply_w(x.data()), dense.apply_w(x.data())) < 1e-14);
  CHECK(rel_err(sparse.apply_w_t(x.data()), dense.apply_w_t(x.data())) < 1e-14);
  CHECK(rel_err(sparse.apply_winv_t(x.data()), dense.apply_winv_t(x.data())) < 1e-14);
}

TEST_CASE("predecessor mask of an isolated node is reflexive only") {
  const Dag dag = sample_er_dag(6, 0.0, WeightLaw::unit(), 1);
  const CausalShiftSet set = predecessor_masks(dag, {3});
  Vec want = Vec::Zero(6);
  want[3] = 1.0;
  CHECK(set.masks.col(0) == want);
}

TEST_CASE("predecessor mask on the chain follows the partial order") {
  const CausalShiftSet set = predecessor_masks(chain3(), {1});
  Vec want(3);
  want << 1, 1, 0;
  CHECK(set.masks.col(0) == want);
}

TEST_CASE("mask pattern matches the closure row pattern") {
  // Unit weights keep W entries positive, so no accidental cancellation.
  for (std::uint64_t seed : {3ULL, 8ULL}) {
    const Dag dag = sample_er_dag(15, 0.3, WeightLaw::unit(), seed);
    const ClosurePair c = transitive_closure(dag);
    const Mat w = c.w_dense();
    std::vector<int> all(15);
    for (int i = 0; i < 15; ++i) all[i] = i;
    const CausalShiftSet set = predecessor_masks(dag, all);
    for (int k = 0; k < 15; ++k) {
      for (int i = 0; i < 15; ++i) {
        const bool reach = w(k, i) != 0.0 || i == k;
        CHECK(set.masks(i, k) == (reach ? 1.0 : 0.0));
      }
    }
  }
}

TEST_CASE("masks are downward closed") {
  const Dag dag = sample_er_dag(20, 0.3, WeightLaw::uniform_signed(0.2, 0.5), 13);
  const CausalShiftSet set = random_shift_set(dag, 8, 5);
  for (int u = 0; u < set.size(); ++u) {
    CHECK(set.masks(set.nodes[u], u) == 1.0);
    for (int i = 0; i < dag.n; ++i) {
      if (set.masks(i, u) != 1.0) continue;
      for (int j = 0; j < i; ++j) {
        if (dag.adj(i, j) != 0.0) CHECK(set.masks(j, u) == 1.0);
      }
    }
  }
}

TEST_CASE("predecessor_masks validates its arguments") {
  const Dag dag = chain3();
  CHECK_THROWS_AS(predecessor_masks(dag, {}), ParamError);
  CHECK_THROWS_AS(predecessor_masks(dag, {5}), ParamError);
}

TEST_CASE("shift on the chain keeps common-predecessor causes") {
  const Dag dag = chain3();
  const ClosurePair c = transitive_closure(dag);
  const CausalShiftSet set = predecessor_masks(dag, {1});
  SignalBatch x(1, 3, 1);
  x(0, 0, 0) = 2.0;
  x(0, 1, 0) = -3.0;
  x(0, 2, 0) = 7.0;
  const SignalBatch y = apply_shift(c, set, 1, x);
  CHECK(y(0, 0, 0) == doctest::Approx(2.0));
  CHECK(y(0, 1, 0) == doctest::Approx(-3.0));
  CHECK(y(0, 2, 0) == doctest::Approx(-3.0));
}

TEST_CASE("shift on an edgeless graph keeps only the reflexive cause") {
  const Dag dag = sample_er_dag(5, 0.0, WeightLaw::unit(), 1);
  const ClosurePair c = transitive_closure(dag);
  const CausalShiftSet set = predecessor_masks(dag, {2});
  const SignalBatch x = random_batch(4, 5, 1, 3);
  const SignalBatch y = apply_shift(c, set, 2, x);
  for (int m = 0; m < 4; ++m) {
    for (int i = 0; i < 5; ++i) {
      const double want = i == 2 ? x(m, 2, 0) : 0.0;
      CHECK(y(m, i, 0) == doctest::Approx(want));
    }
  }
}

TEST_CASE("shift at a node preceded by every node is the identity") {
  const Dag dag = sample_er_dag(6, 1.0, WeightLaw::uniform_signed(0.2, 0.5), 2);
  const ClosurePair c = transitive_closure(dag);
  const CausalShiftSet set = predecessor_masks(dag, {5});
  const SignalBatch x = random_batch(3, 6, 2, 4);
  const SignalBatch y = apply_shift(c, set, 5, x);
  CHECK(rel_err(y.data(), x.data()) < 1e-12);
}

TEST_CASE("lazy shifts match the dense operator in both directions") {
  for (bool transposed : {false, true}) {
    const Dag dag = sample_er_dag(12, 0.35, WeightLaw::uniform_signed(0.2, 0.5), 17);
    const ClosurePair c = transitive_closure(dag);
    const CausalShiftSet set = random_shift_set(dag, 6, 23, transposed);
    const SignalBatch x = random_batch(5, 12, 3, 29);
    for (int k : set.nodes) {
      const Mat t = dense_shift(c, set, k);
      CHECK(rel_err(apply_shift(c, set, k, x).data(), t * x.data()) < 1e-9);
    }
  }
}

TEST_CASE("apply_shift rejects foreign nodes and shape mismatches") {
  const Dag dag = chain3();
  const ClosurePair c = transitive_closure(dag);
  const CausalShiftSet set = predecessor_masks(dag, {1});
  const SignalBatch x = random_batch(2, 3, 1, 1);
  CHECK_THROWS_AS(apply_shift(c, set, 2, x), ParamError);
  const SignalBatch wrong = random_batch(2, 4, 1, 1);
  CHECK_THROWS_AS(apply_shift(c, set, 2, wrong), Error);
}

TEST_CASE("a one-hot filter reduces to the single shift") {
  const Dag dag = sample_er_dag(10, 0.4, WeightLaw::uniform_signed(0.2, 0.5), 31);
  const ClosurePair c = transitive_closure(dag);
  DagFilter f;
  f.shifts = random_shift_set(dag, 4, 37);
  f.coeffs = Vec::Zero(4);
  f.coeffs[2] = 1.0;
  const SignalBatch x = random_batch(3, 10, 2, 41);
  const SignalBatch via_filter = apply_filter(f, c, x);
  const SignalBatch via_shift = apply_shift(c, f.shifts, f.shifts.nodes[2], x);
  CHECK(rel_err(via_filter.data(), via_shift.data()) < 1e-12);
}

TEST_CASE("all-ones filter over an edgeless graph is the identity") {
  const Dag dag = sample_er_dag(7, 0.0, WeightLaw::unit(), 1);
  const ClosurePair c = transitive_closure(dag);
  DagFilter f;
  f.shifts = random_shift_set(dag, 0, 0);  // every node
  f.coeffs = Vec::Ones(7);
  const SignalBatch x = random_batch(3, 7, 1, 43);
  CHECK(rel_err(apply_filter(f, c, x).data(), x.data()) < 1e-12);
}

TEST_CASE("filter matches brute-force summation of dense shifts") {
  for (bool transposed : {false, true}) {
    const Dag dag = sample_er_dag(10, 0.4, WeightLaw::uniform_signed(0.2, 0.5), 47);
    const ClosurePair c = transitive_closure(dag);
    DagFilter f;
    f.shifts = random_shift_set(dag, 5, 53, transposed);
    std::mt19937_64 rng = make_rng(59, 0);
    std::normal_distribution<double> normal(0.0, 1.0);
    f.coeffs = Vec::NullaryExpr(5, [&](Eigen::Index) { return normal(rng); });
    const SignalBatch x = random_batch(4, 10, 2, 61);
    Mat want = Mat::Zero(10, x.data().cols());
    for (int u = 0; u < 5; ++u) {
      want += f.coeffs[u] * (dense_shift(c, f.shifts, f.shifts.nodes[u]) * x.data());
    }
    CHECK(rel_err(apply_filter(f, c, x).data(), want) < 1e-9);
  }
}

TEST_CASE("fourier and inverse_fourier are mutual inverses") {
  const Dag dag = sample_er_dag(14, 0.3, WeightLaw::uniform_signed(0.2, 0.5), 67);
  const ClosurePair c = transitive_closure(dag);
  const SignalBatch x = random_batch(5, 14, 2, 71);
  const SignalBatch back = inverse_fourier(c, fourier(c, x));
  CHECK(rel_err(back.data(), x.data()) < 1e-10);
}

TEST_CASE("fourier on an edgeless graph is the identity") {
  const Dag dag = sample_er_dag(5, 0.0, WeightLaw::unit(), 1);
  const ClosurePair c = transitive_closure(dag);
  const SignalBatch x = random_batch(2, 5, 1, 73);
  CHECK(fourier(c, x).data() == x.data());
}

TEST_CASE("causes of the constant chain signal live at the root") {
  const ClosurePair c = transitive_closure(chain3());
  SignalBatch x(1, 3, 1);
  x(0, 0, 0) = 1.0;
  x(0, 1, 0) = 1.0;
  x(0, 2, 0) = 1.0;
  const SignalBatch cs = fourier(c, x);
  CHECK(cs(0, 0, 0) == doctest::Approx(1.0));
  CHECK(cs(0, 1, 0) == doctest::Approx(0.0));
  CHECK(cs(0, 2, 0) == doctest::Approx(0.0));
}

TEST_CASE("frequency response of a one-hot filter is the mask") {
  const Dag dag = chain3();
  DagFilter f;
  f.shifts = predecessor_masks(dag, {1});
  f.coeffs = Vec::Ones(1);
  const Vec resp = frequency_response(f);
  CHECK(resp[0] == 1.0);
  CHECK(resp[1] == 1.0);
  CHECK(resp[2] == 0.0);
}

TEST_CASE("frequency response over an edgeless graph returns the coefficients") {
  const Dag dag = sample_er_dag(6, 0.0, WeightLaw::unit(), 1);
  DagFilter f;
  f.shifts = random_shift_set(dag, 0, 0);
  f.coeffs = Vec::LinSpaced(6, -1.0, 2.0);
  CHECK((frequency_response(f) - f.coeffs).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("dense conjugation diagonalizes the filter") {
  const Dag dag = sample_er_dag(10, 0.4, WeightLaw::uniform_signed(0.2, 0.5), 79);
  const ClosurePair c = transitive_closure(dag);
  DagFilter f;
  f.shifts = random_shift_set(dag, 6, 83);
  std::mt19937_64 rng = make_rng(89, 0);
  std::normal_distribution<double> normal(0.0, 1.0);
  f.coeffs = Vec::NullaryExpr(6, [&](Eigen::Index) { return normal(rng); });

  Mat h = Mat::Zero(10, 10);
  for (int u = 0; u < 6; ++u) {
    h += f.coeffs[u] * dense_shift(c, f.shifts, f.shifts.nodes[u]);
  }
  const Mat conj = c.winv_dense() * h * c.w_dense();
  const Vec resp = frequency_response(f);
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 10; ++j) {
      if (i == j) {
        CHECK(conj(i, i) == doctest::Approx(resp[i]).epsilon(1e-9));
      } else {
        CHECK(std::abs(conj(i, j)) < 1e-10);
      }
    }
  }
}

TEST_CASE("shifts are idempotent and commute") {
  const Dag dag = sample_er_dag(15, 0.3, WeightLaw::uniform_signed(0.2, 0.5), 97);
  const ClosurePair c = transitive_closure(dag);
  const CausalShiftSet set = random_shift_set(dag, 5, 101);
  const SignalBatch x = random_batch(4, 15, 2, 103);
  const double xnorm = x.data().norm();
  for (int k : set.nodes) {
    const SignalBatch once = apply_shift(c, set, k, x);
    const SignalBatch twice = apply_shift(c, set, k, once);
    CHECK((twice.data() - once.data()).norm() <= 1e-9 * xnorm);
  }
  // Pairwise commutation and the meet identity T_k T_l = W (d_k o d_l) (I-A).
  for (int a = 0; a < set.size(); ++a) {
    for (int b = a + 1; b < set.size(); ++b) {
      const int k = set.nodes[a], l = set.nodes[b];
      const Mat kl = apply_shift(c, set, k, apply_shift(c, set, l, x)).data();
      const Mat lk = apply_shift(c, set, l, apply_shift(c, set, k, x)).data();
      CHECK(rel_err(kl, lk) < 1e-9);
      const Vec meet = set.masks.col(a).cwiseProduct(set.masks.col(b));
      const Mat via_meet = c.apply_w(Mat(meet.asDiagonal() * c.apply_winv(x.data())));
      CHECK(rel_err(kl, via_meet) < 1e-9);
    }
  }
}

TEST_CASE("filters are linear and shift invariant") {
  const Dag dag = sample_er_dag(12, 0.35, WeightLaw::uniform_signed(0.2, 0.5), 107);
  const ClosurePair c = transitive_closure(dag);
  const CausalShiftSet set = random_shift_set(dag, 5, 109);
  std::mt19937_64 rng = make_rng(113, 0);
  std::normal_distribution<double> normal(0.0, 1.0);
  DagFilter f, g;
  f.shifts = set;
  g.shifts = set;
  f.coeffs = Vec::NullaryExpr(5, [&](Eigen::Index) { return normal(rng); });
  g.coeffs = Vec::NullaryExpr(5, [&](Eigen::Index) { return normal(rng); });
  const SignalBatch x = random_batch(3, 12, 2, 127);

  DagFilter combo;
  combo.shifts = set;
  combo.coeffs = 0.7 * f.coeffs - 1.3 * g.coeffs;
  const Mat want = 0.7 * apply_filter(f, c, x).data() - 1.3 * apply_filter(g, c, x).data();
  CHECK(rel_err(apply_filter(combo, c, x).data(), want) < 1e-10);

  for (int k : set.nodes) {
    const Mat hs = apply_filter(f, c, apply_shift(c, set, k, x)).data();
    const Mat sh = apply_shift(c, set, k, apply_filter(f, c, x)).data();
    CHECK(rel_err(hs, sh) < 1e-9);
  }
}

TEST_CASE("filter serialization lists node and coefficient pairs") {
  DagFilter f;
  f.shifts = predecessor_masks(chain3(), {0, 2});
  f.coeffs = Vec(2);
  f.coeffs << 0.5, -1.25;
  std::stringstream out;
  save_filter(f, out);
  CHECK(out.str() == "0 0.5\n2 -1.25\n");
}
