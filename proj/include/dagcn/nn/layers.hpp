#pragma once

#include <memory>
#include <string>
#include <vector>

#include "dagcn/closure.hpp"
#include "dagcn/nn/param.hpp"
#include "dagcn/shifts.hpp"
#include "dagcn/types.hpp"

namespace dagcn::nn {

/// Differentiable node-batch transform. Inputs and outputs are N x (M*F)
/// matrices; forward caches whatever backward needs, backward accumulates
/// parameter gradients and returns the input gradient.
class Layer {
 public:
  virtual ~Layer() = default;
  virtual Mat forward(const Mat& x) = 0;
  virtual Mat backward(const Mat& grad_out) = 0;
  virtual void collect_params(std::vector<ParamTensor*>& out) { (void)out; }
  virtual std::string summary() const = 0;
};

/// Convolution with a bank of causal-shift filters:
/// Z = Post(sum_k D_k Pre(X) Theta_k), where (Pre, Post) = (I-A, W) for the
/// forward direction and (W^T, (I-A)^T) when the shift set is transposed.
///
/// The per-node coefficient sums S_i = sum_{k: i<=k} Theta_k are formed once
/// per pass, so the cost per sample is independent of |U|.
class DagConvLayer final : public Layer {
 public:
  DagConvLayer(std::shared_ptr<const ClosurePair> closure,
               std::shared_ptr<const CausalShiftSet> shifts, int in_features, int out_features,
               std::uint64_t init_seed);

  Mat forward(const Mat& x) override;
  Mat backward(const Mat& grad_out) override;
  void collect_params(std::vector<ParamTensor*>& out) override {
    out.push_back(&theta_);
    out.push_back(&bias_);
  }
  std::string summary() const override;

  int in_features() const { return in_features_; }
  int out_features() const { return out_features_; }
  /// Bank as a |U| x (F_in*F_out) row-major matrix; row k is Theta_k.
  ParamTensor& theta() { return theta_; }
  const CausalShiftSet& shifts() const { return *shifts_; }

 private:
  Mat pre(const Mat& x) const;
  Mat post(const Mat& x) const;
  Mat pre_adjoint(const Mat& x) const;
  Mat post_adjoint(const Mat& x) const;

  std::shared_ptr<const ClosurePair> closure_;
  std::shared_ptr<const CausalShiftSet> shifts_;
  int in_features_;
  int out_features_;
  ParamTensor theta_;
  ParamTensor bias_;   // per output feature, zero-initialized
  Mat cached_pre_;     // Pre(X) from the last forward
  Mat cached_coeff_;   // masks * theta, N x (F_in*F_out)
};

/// Polynomial graph convolution Z = sum_{r<R} S^r X Theta_r with an arbitrary
/// dense shift matrix S. Powers are applied iteratively and recomputed in the
/// backward pass instead of being cached.
class PolyConvLayer final : public Layer {
 public:
  PolyConvLayer(Mat shift, int order, int in_features, int out_features, std::uint64_t init_seed);

  Mat forward(const Mat& x) override;
  Mat backward(const Mat& grad_out) override;
  void collect_params(std::vector<ParamTensor*>& out) override {
    out.push_back(&theta_);
    out.push_back(&bias_);
  }
  std::string summary() const override;

  int in_features() const { return in_features_; }
  int out_features() const { return out_features_; }
  ParamTensor& theta() { return theta_; }

 private:
  ConstMatMap theta_block(int r) const;

  Mat shift_;
  int order_;
  int in_features_;
  int out_features_;
  ParamTensor theta_;  // order x (F_in*F_out)
  ParamTensor bias_;   // per output feature, zero-initialized
  Mat cached_input_;
};

/// Affine map on the node dimension, Z = W X + b 1^T; graph-free (MLP block).
/// Only defined for single-feature signals.
class NodeDenseLayer final : public Layer {
 public:
  NodeDenseLayer(int in_nodes, int out_nodes, std::uint64_t init_seed);

  Mat forward(const Mat& x) override;
  Mat backward(const Mat& grad_out) override;
  void collect_params(std::vector<ParamTensor*>& out) override {
    out.push_back(&weight_);
    out.push_back(&bias_);
  }
  std::string summary() const override;

 private:
  ParamTensor weight_;  // out_nodes x in_nodes
  ParamTensor bias_;    // out_nodes x 1
  Mat cached_input_;
};

class ReluLayer final : public Layer {
 public:
  Mat forward(const Mat& x) override;
  Mat backward(const Mat& grad_out) override;
  std::string summary() const override { return "relu"; }

 private:
  Mat gate_;
};

/// Node-shared linear scorer restricted to a candidate set: each candidate
/// node's F features map to one logit, so class c is candidate c.
class Readout {
 public:
  Readout() = default;
  Readout(std::vector<int> candidates, int features, std::uint64_t init_seed);

  /// x: N x (M*F) -> logits M x C.
  Mat forward(const Mat& x);
  /// dlogits: M x C -> dx: N x (M*F).
  Mat backward(const Mat& dlogits);
  void collect_params(std::vector<ParamTensor*>& out) {
    out.push_back(&weight_);
    out.push_back(&bias_);
  }

  const std::vector<int>& candidates() const { return candidates_; }
  int features() const { return features_; }

 private:
  std::vector<int> candidates_;
  int features_ = 0;
  int input_nodes_ = 0;
  ParamTensor weight_;  // F x 1
  ParamTensor bias_;    // 1 x 1
  Mat cached_rows_;     // C x (M*F), candidate rows of the last input
};

/// Uniform(-a, a) fill with a = 1/sqrt(fan_in); sum over |U| shifts or R
/// powers multiplies the effective fan-in accordingly.
void init_uniform(Mat& m, double bound, std::uint64_t seed);

}  // namespace dagcn::nn
