#include "dagcn/nn/model.hpp"

#include <sstream>

namespace dagcn::nn {

std::vector<ParamTensor*> Model::params() {
  std::vector<ParamTensor*> out;
  for (auto& layer : layers) layer->collect_params(out);
  if (readout.has_value()) readout->collect_params(out);
  return out;
}

void Model::zero_grads() {
  for (ParamTensor* p : params()) p->zero_grad();
}

Mat Model::forward_nodes(const Mat& x) {
  Mat cur = x;
  for (auto& layer : layers) cur = layer->forward(cur);
  return cur;
}

Mat Model::forward_logits(const Mat& x) {
  if (!readout.has_value()) throw ParamError("Model::forward_logits: model has no readout");
  return readout->forward(forward_nodes(x));
}

void Model::backward_nodes(const Mat& grad) {
  Mat cur = grad;
  for (auto it = layers.rbegin(); it != layers.rend(); ++it) cur = (*it)->backward(cur);
}

void Model::backward_logits(const Mat& dlogits) {
  if (!readout.has_value()) throw ParamError("Model::backward_logits: model has no readout");
  backward_nodes(readout->backward(dlogits));
}

std::vector<Mat> Model::parameter_values() {
  std::vector<Mat> out;
  for (ParamTensor* p : params()) out.push_back(p->value);
  return out;
}

void Model::set_parameter_values(const std::vector<Mat>& values) {
  auto ps = params();
  if (ps.size() != values.size()) throw ShapeError("Model::set_parameter_values: count mismatch");
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (ps[i]->value.rows() != values[i].rows() || ps[i]->value.cols() != values[i].cols()) {
      throw ShapeError("Model::set_parameter_values: shape mismatch");
    }
    ps[i]->value = values[i];
  }
}

std::string Model::summary() const {
  std::ostringstream out;
  out << spec.kind << (spec.transposed ? "-t" : "") << ":";
  for (const auto& layer : layers) out << " " << layer->summary();
  if (readout.has_value()) {
    out << " readout(" << readout->features() << "->1, classes=" << readout->candidates().size()
        << ")";
  }
  return out.str();
}

}  // namespace dagcn::nn
