#pragma once

#include <vector>

#include "dagcn/nn/param.hpp"

namespace dagcn::nn {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// First/second-moment update with bias correction; deterministic given
/// identical parameter and gradient sequences.
class Adam {
 public:
  explicit Adam(const std::vector<ParamTensor*>& params, AdamConfig config = {});

  void step(const std::vector<ParamTensor*>& params, double lr);

 private:
  AdamConfig config_;
  long t_ = 0;
  std::vector<Mat> first_;
  std::vector<Mat> second_;
};

}  // namespace dagcn::nn
