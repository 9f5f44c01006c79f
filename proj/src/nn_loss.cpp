#include "dagcn/nn/loss.hpp"

#include <cmath>

namespace dagcn::nn {

double mse(const Mat& pred, const Mat& target, Mat* grad) {
  if (pred.rows() != target.rows() || pred.cols() != target.cols()) {
    throw ShapeError("mse: prediction and target shapes differ");
  }
  const double size = static_cast<double>(pred.size());
  const Mat diff = pred - target;
  if (grad != nullptr) *grad = (2.0 / size) * diff;
  return diff.squaredNorm() / size;
}

double cross_entropy(const Mat& logits, const std::vector<int>& labels, Mat* grad) {
  const int samples = static_cast<int>(logits.rows());
  const int classes = static_cast<int>(logits.cols());
  if (static_cast<int>(labels.size()) != samples) {
    throw ShapeError("cross_entropy: label count does not match logit rows");
  }

  double loss = 0.0;
  if (grad != nullptr) grad->resize(samples, classes);
  for (int m = 0; m < samples; ++m) {
    const int label = labels[m];
    if (label < 0 || label >= classes) throw ParamError("cross_entropy: label out of range");
    const double peak = logits.row(m).maxCoeff();
    double denom = 0.0;
    for (int c = 0; c < classes; ++c) denom += std::exp(logits(m, c) - peak);
    const double lse = peak + std::log(denom);
    loss += lse - logits(m, label);
    if (grad != nullptr) {
      for (int c = 0; c < classes; ++c) {
        (*grad)(m, c) = std::exp(logits(m, c) - lse) / samples;
      }
      (*grad)(m, label) -= 1.0 / samples;
    }
  }
  return loss / samples;
}

}  // namespace dagcn::nn
