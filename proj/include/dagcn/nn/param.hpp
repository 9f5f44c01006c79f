#pragma once

#include <string>

#include "dagcn/types.hpp"

namespace dagcn::nn {

/// Learnable tensor with its gradient accumulator.
struct ParamTensor {
  std::string name;
  Mat value;
  Mat grad;

  ParamTensor() = default;
  ParamTensor(std::string name_, int rows, int cols)
      : name(std::move(name_)), value(Mat::Zero(rows, cols)), grad(Mat::Zero(rows, cols)) {}

  void zero_grad() { grad.setZero(); }
  long size() const { return value.size(); }
};

}  // namespace dagcn::nn
