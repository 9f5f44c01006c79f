#pragma once

#include <cstdint>
#include <vector>

#include "dagcn/nn/loss.hpp"
#include "dagcn/nn/model.hpp"

namespace dagcn::nn {

/// Supervised batch: node inputs plus either regression targets (N x M) or
/// per-sample class labels.
struct Batch {
  Mat inputs;  // N x (M*F)
  int features = 1;
  Mat targets;
  std::vector<int> labels;

  int samples() const { return static_cast<int>(inputs.cols()) / features; }
};

struct TrainConfig {
  double lr = 5e-3;
  int max_epochs = 100;
  int patience = 25;   // epochs without validation improvement before stopping
  int batch_size = 0;  // 0 = full batch
  LossKind loss = LossKind::kMse;
  std::uint64_t seed = 0;
};

struct TrainHistory {
  std::vector<double> train_loss;
  std::vector<double> val_loss;
  int best_epoch = -1;
  double best_val = 0.0;
  double seconds = 0.0;
};

/// One optimization step's worth of work: zeroes gradients, runs the forward
/// pass, evaluates the loss (batch mean) and backpropagates into every
/// parameter. Throws NumericError on a non-finite loss.
double forward_backward(Model& model, const Batch& batch, LossKind loss);

/// Forward-only loss evaluation.
double evaluate_loss(Model& model, const Batch& batch, LossKind loss);

/// Adam epochs with validation tracking; restores the best-validation
/// parameters before returning. Divergence aborts with the epoch index.
TrainHistory train(Model& model, const Batch& train_set, const Batch& val_set,
                   const TrainConfig& config);

/// Column gather of selected samples (and their targets/labels).
Batch gather(const Batch& batch, const std::vector<int>& indices);

}  // namespace dagcn::nn
