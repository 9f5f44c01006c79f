#pragma once

#include <vector>

#include "dagcn/types.hpp"

namespace dagcn::nn {

enum class LossKind { kMse, kCrossEntropy };

/// Mean squared error over all entries; grad (optional) receives dL/dpred.
double mse(const Mat& pred, const Mat& target, Mat* grad = nullptr);

/// Softmax cross-entropy over logits (M x C), fused log-sum-exp; stays finite
/// for logit magnitudes up to around 1e3. Loss is the batch mean.
double cross_entropy(const Mat& logits, const std::vector<int>& labels, Mat* grad = nullptr);

}  // namespace dagcn::nn
