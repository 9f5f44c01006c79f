#pragma once

#include <iosfwd>
#include <memory>

#include "dagcn/closure.hpp"
#include "dagcn/dag.hpp"
#include "dagcn/nn/model.hpp"
#include "dagcn/shifts.hpp"
#include "dagcn/signal.hpp"

namespace dagcn::models {

enum class Activation { kIdentity, kRelu };

/// Builds the architecture described by `spec` over the given graph.
/// Regressors end in a linear layer; classifiers end in ReLU plus a readout
/// over spec.candidates.
nn::Model build_model(const nn::ModelSpec& spec, const Dag& dag,
                      std::shared_ptr<const ClosurePair> closure);

/// One convolution with a bank of causal-shift filters:
/// sigma(sum_{k in U} T_k X Theta_k). bank is |U| x (F_in*F_out) row-major.
SignalBatch dcn_layer(const SignalBatch& x, const Mat& bank, const CausalShiftSet& shifts,
                      const ClosurePair& closure, Activation act);

/// Single-filter special case: sigma(sum_k h_k T_k x).
SignalBatch dag_perceptron(const SignalBatch& x, const Vec& coeffs, const CausalShiftSet& shifts,
                           const ClosurePair& closure, Activation act);

/// Polynomial convolution sigma(sum_{r<R} S^r X Theta_r); S is any graph
/// shift (adjacency, normalized adjacency, or a transpose thereof).
SignalBatch fb_gcnn_layer(const SignalBatch& x, const std::vector<Mat>& thetas, const Mat& gso,
                          Activation act);

/// Shared per-node linear scorer restricted to `candidates`; logits M x C.
Mat source_readout(const SignalBatch& x, const std::vector<int>& candidates, const Vec& weight,
                   double bias);

/// Row-normalized A + I (degrees use absolute weights); GCN-style operator.
Mat normalized_adjacency(const Dag& dag);

// Versioned text checkpoint: architecture spec plus parameter values in
// row-major decimal; round-trips exactly at 17 significant digits.
void save_checkpoint(nn::Model& model, std::ostream& out);
nn::Model load_checkpoint(std::istream& in, const Dag& dag,
                          std::shared_ptr<const ClosurePair> closure);

}  // namespace dagcn::models
