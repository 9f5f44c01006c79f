#include "dagcn/nn/adam.hpp"

#include <cmath>

namespace dagcn::nn {

Adam::Adam(const std::vector<ParamTensor*>& params, AdamConfig config) : config_(config) {
  first_.reserve(params.size());
  second_.reserve(params.size());
  for (const ParamTensor* p : params) {
    first_.push_back(Mat::Zero(p->value.rows(), p->value.cols()));
    second_.push_back(Mat::Zero(p->value.rows(), p->value.cols()));
  }
}

void Adam::step(const std::vector<ParamTensor*>& params, double lr) {
  if (params.size() != first_.size()) throw ShapeError("Adam::step: parameter list changed");
  ++t_;
  const double bias1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
  const double bias2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    ParamTensor& p = *params[i];
    first_[i] = config_.beta1 * first_[i] + (1.0 - config_.beta1) * p.grad;
    second_[i].array() =
        config_.beta2 * second_[i].array() + (1.0 - config_.beta2) * p.grad.array().square();
    p.value.array() -= lr * (first_[i].array() / bias1) /
                       ((second_[i].array() / bias2).sqrt() + config_.eps);
  }
}

}  // namespace dagcn::nn
