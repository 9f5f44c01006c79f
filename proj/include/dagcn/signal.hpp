#pragma once

#include <optional>

#include "dagcn/types.hpp"

namespace dagcn {

/// Batch of node signals: M samples with F features over N nodes.
///
/// Stored as one row-major N x (M*F) matrix; row i holds sample-major feature
/// blocks [x_0(i, :) | x_1(i, :) | ...], so a row doubles as a contiguous
/// (M x F) view and the whole buffer as an (N*M x F) view.
class SignalBatch {
 public:
  SignalBatch() = default;
  SignalBatch(int samples, int nodes, int features)
      : samples_(samples), features_(features), data_(Mat::Zero(nodes, samples * features)) {
    if (samples < 1 || nodes < 1 || features < 1) {
      throw ParamError("SignalBatch: all dimensions must be >= 1");
    }
  }

  static SignalBatch wrap(Mat data, int samples, int features) {
    if (samples < 1 || features < 1 || data.cols() != static_cast<long>(samples) * features) {
      throw ShapeError("SignalBatch::wrap: data columns must equal samples * features");
    }
    SignalBatch b;
    b.samples_ = samples;
    b.features_ = features;
    b.data_ = std::move(data);
    return b;
  }

  int samples() const { return samples_; }
  int nodes() const { return static_cast<int>(data_.rows()); }
  int features() const { return features_; }

  Mat& data() { return data_; }
  const Mat& data() const { return data_; }

  double operator()(int sample, int node, int feature) const {
    return data_(node, sample * features_ + feature);
  }
  double& operator()(int sample, int node, int feature) {
    return data_(node, sample * features_ + feature);
  }

  /// N x F block of one sample.
  Eigen::Block<const Mat> sample(int m) const {
    return data_.block(0, m * features_, data_.rows(), features_);
  }

  /// Observed-node indicator; empty means fully observed.
  std::optional<BoolArray> mask;

 private:
  int samples_ = 0;
  int features_ = 0;
  Mat data_;
};

}  // namespace dagcn
