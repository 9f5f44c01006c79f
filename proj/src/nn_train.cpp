#include "dagcn/nn/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "dagcn/nn/adam.hpp"
#include "dagcn/rng.hpp"

namespace dagcn::nn {

namespace {

void check_finite(double loss, int epoch, const char* phase) {
  if (std::isfinite(loss)) return;
  std::ostringstream msg;
  msg << "training diverged: non-finite " << phase << " loss at epoch " << epoch;
  throw NumericError(msg.str());
}

}  // namespace

double forward_backward(Model& model, const Batch& batch, LossKind loss) {
  model.zero_grads();
  if (loss == LossKind::kMse) {
    const Mat pred = model.forward_nodes(batch.inputs);
    Mat grad;
    const double value = mse(pred, batch.targets, &grad);
    model.backward_nodes(grad);
    return value;
  }
  const Mat logits = model.forward_logits(batch.inputs);
  Mat grad;
  const double value = cross_entropy(logits, batch.labels, &grad);
  model.backward_logits(grad);
  return value;
}

double evaluate_loss(Model& model, const Batch& batch, LossKind loss) {
  if (loss == LossKind::kMse) {
    return mse(model.forward_nodes(batch.inputs), batch.targets);
  }
  return cross_entropy(model.forward_logits(batch.inputs), batch.labels);
}

Batch gather(const Batch& batch, const std::vector<int>& indices) {
  Batch out;
  out.features = batch.features;
  const int f = batch.features;
  out.inputs.resize(batch.inputs.rows(), static_cast<long>(indices.size()) * f);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    out.inputs.block(0, static_cast<long>(i) * f, batch.inputs.rows(), f) =
        batch.inputs.block(0, static_cast<long>(indices[i]) * f, batch.inputs.rows(), f);
  }
  if (batch.targets.size() > 0) {
    out.targets.resize(batch.targets.rows(), static_cast<long>(indices.size()));
    for (std::size_t i = 0; i < indices.size(); ++i) {
      out.targets.col(static_cast<long>(i)) = batch.targets.col(indices[i]);
    }
  }
  if (!batch.labels.empty()) {
    out.labels.reserve(indices.size());
    for (int idx : indices) out.labels.push_back(batch.labels[idx]);
  }
  return out;
}

TrainHistory train(Model& model, const Batch& train_set, const Batch& val_set,
                   const TrainConfig& config) {
  if (!(config.lr > 0.0)) throw ParamError("train: learning rate must be positive");
  if (config.max_epochs < 1) throw ParamError("train: max_epochs must be >= 1");
  if (config.patience > config.max_epochs) {
    throw ParamError("train: patience must not exceed max_epochs");
  }

  const auto t0 = std::chrono::steady_clock::now();
  auto params = model.params();
  Adam optimizer(params);

  TrainHistory history;
  history.best_val = std::numeric_limits<double>::infinity();
  std::vector<Mat> best_values = model.parameter_values();
  int epochs_since_best = 0;

  std::vector<int> indices(train_set.samples());
  std::iota(indices.begin(), indices.end(), 0);
  std::mt19937_64 shuffle_rng = make_rng(config.seed, /*salt=*/0x7472ULL);

  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    double epoch_loss = 0.0;
    if (config.batch_size <= 0 || config.batch_size >= train_set.samples()) {
      epoch_loss = forward_backward(model, train_set, config.loss);
      check_finite(epoch_loss, epoch, "training");
      optimizer.step(params, config.lr);
    } else {
      std::shuffle(indices.begin(), indices.end(), shuffle_rng);
      int covered = 0;
      while (covered < train_set.samples()) {
        const int take = std::min(config.batch_size, train_set.samples() - covered);
        const std::vector<int> chunk(indices.begin() + covered, indices.begin() + covered + take);
        const Batch mini = gather(train_set, chunk);
        const double loss = forward_backward(model, mini, config.loss);
        check_finite(loss, epoch, "training");
        optimizer.step(params, config.lr);
        epoch_loss += loss * take;
        covered += take;
      }
      epoch_loss /= train_set.samples();
    }

    const double val_loss = evaluate_loss(model, val_set, config.loss);
    check_finite(val_loss, epoch, "validation");
    history.train_loss.push_back(epoch_loss);
    history.val_loss.push_back(val_loss);

    if (val_loss < history.best_val) {
      history.best_val = val_loss;
      history.best_epoch = epoch;
      best_values = model.parameter_values();
      epochs_since_best = 0;
    } else if (++epochs_since_best >= config.patience && config.patience > 0) {
      break;
    }
  }

  model.set_parameter_values(best_values);
  history.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return history;
}

}  // namespace dagcn::nn
