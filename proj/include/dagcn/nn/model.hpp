#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dagcn/nn/layers.hpp"

namespace dagcn::nn {

/// Architecture description; enough to rebuild a model given the graph.
struct ModelSpec {
  std::string kind = "dcn";  // dcn | fb-gcnn | gcn | mlp
  int in_features = 1;
  int hidden = 32;
  int conv_layers = 2;
  int out_features = 1;
  int fb_order = 5;          // R for fb-gcnn / gcn
  int mlp_hidden = 64;
  bool transposed = false;
  bool classifier = false;
  std::vector<int> shift_nodes;  // dcn: U in storage ids; empty = every node
  std::vector<int> candidates;   // classifier readout support
  std::uint64_t init_seed = 0;
};

/// Layer stack with an optional classification readout.
class Model {
 public:
  ModelSpec spec;
  std::vector<std::unique_ptr<Layer>> layers;
  std::optional<Readout> readout;

  std::vector<ParamTensor*> params();
  void zero_grads();

  /// Runs the layer stack; output is N x (M * F_last).
  Mat forward_nodes(const Mat& x);
  /// Layer stack plus readout; output is logits M x C.
  Mat forward_logits(const Mat& x);

  void backward_nodes(const Mat& grad);
  void backward_logits(const Mat& dlogits);

  /// Copies of all parameter values, for snapshot/restore.
  std::vector<Mat> parameter_values();
  void set_parameter_values(const std::vector<Mat>& values);

  std::string summary() const;
};

}  // namespace dagcn::nn
