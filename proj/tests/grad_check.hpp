#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "dagcn/nn/train.hpp"
#include "dagcn/rng.hpp"

namespace dagcn::testing {

struct GradCheckResult {
  double max_rel_err = 0.0;
  int probes = 0;
};

// Central finite differences against the analytic backward pass on randomly
// probed parameter coordinates. Independent of the backward implementation:
// only evaluate_loss (forward) drives the numeric side.
//
// Parameters are first jittered to a generic point: with zero-initialized
// biases, dead relu units can sit exactly on the kink, where the loss is not
// differentiable and central differences straddle the corner.
inline GradCheckResult check_gradients(nn::Model& model, const nn::Batch& batch,
                                       nn::LossKind loss, int probes, std::uint64_t seed,
                                       double eps = 1e-5) {
  {
    std::mt19937_64 jitter_rng = make_rng(seed, 0x6a69ULL);
    std::uniform_real_distribution<double> jitter(-0.05, 0.05);
    for (nn::ParamTensor* p : model.params()) {
      for (long r = 0; r < p->value.rows(); ++r) {
        for (long c = 0; c < p->value.cols(); ++c) p->value(r, c) += jitter(jitter_rng);
      }
    }
  }
  nn::forward_backward(model, batch, loss);
  auto params = model.params();
  std::vector<Mat> analytic;
  analytic.reserve(params.size());
  for (const auto* p : params) analytic.push_back(p->grad);

  std::mt19937_64 rng = make_rng(seed, 0xfdULL);
  GradCheckResult result;
  result.probes = probes;
  for (int t = 0; t < probes; ++t) {
    const int pi = std::uniform_int_distribution<int>(0, static_cast<int>(params.size()) - 1)(rng);
    Mat& value = params[pi]->value;
    const int r = std::uniform_int_distribution<int>(0, static_cast<int>(value.rows()) - 1)(rng);
    const int c = std::uniform_int_distribution<int>(0, static_cast<int>(value.cols()) - 1)(rng);

    const double original = value(r, c);
    value(r, c) = original + eps;
    const double loss_plus = nn::evaluate_loss(model, batch, loss);
    value(r, c) = original - eps;
    const double loss_minus = nn::evaluate_loss(model, batch, loss);
    value(r, c) = original;

    const double numeric = (loss_plus - loss_minus) / (2.0 * eps);
    const double a = analytic[pi](r, c);
    const double denom = std::max({std::abs(a), std::abs(numeric), 1e-6});
    result.max_rel_err = std::max(result.max_rel_err, std::abs(a - numeric) / denom);
  }
  return result;
}

}  // namespace dagcn::testing
