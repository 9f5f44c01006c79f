#include "dagcn/models/build.hpp"

#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "dagcn/rng.hpp"

namespace dagcn::models {

using nn::Model;
using nn::ModelSpec;

Mat normalized_adjacency(const Dag& dag) {
  Mat s = dag.adj + Mat::Identity(dag.n, dag.n);
  for (int i = 0; i < dag.n; ++i) {
    const double degree = s.row(i).cwiseAbs().sum();
    s.row(i) /= degree;
  }
  return s;
}

namespace {

Mat direction_resolved(const Mat& op, bool transposed) {
  return transposed ? Mat(op.transpose()) : op;
}

void add_graph_stack(Model& model, const ModelSpec& spec, const Dag& dag,
                     std::shared_ptr<const ClosurePair> closure) {
  std::shared_ptr<const CausalShiftSet> shifts;
  Mat poly_op;
  if (spec.kind == "dcn") {
    std::vector<int> nodes = spec.shift_nodes;
    if (nodes.empty()) {
      nodes.resize(dag.n);
      for (int i = 0; i < dag.n; ++i) nodes[i] = i;
    }
    shifts = std::make_shared<const CausalShiftSet>(
        predecessor_masks(dag, std::move(nodes), spec.transposed));
  } else if (spec.kind == "fb-gcnn") {
    poly_op = direction_resolved(dag.adj, spec.transposed);
  } else if (spec.kind == "gcn") {
    poly_op = direction_resolved(normalized_adjacency(dag), spec.transposed);
  } else {
    throw ParamError("build_model: unknown graph model kind '" + spec.kind + "'");
  }
  const int order = spec.kind == "gcn" ? 2 : spec.fb_order;

  for (int layer = 0; layer < spec.conv_layers; ++layer) {
    const bool last = layer == spec.conv_layers - 1;
    const int f_in = layer == 0 ? spec.in_features : spec.hidden;
    const int f_out = (last && !spec.classifier) ? spec.out_features : spec.hidden;
    const std::uint64_t seed = mix_seed(spec.init_seed, static_cast<std::uint64_t>(layer));
    if (spec.kind == "dcn") {
      model.layers.push_back(
          std::make_unique<nn::DagConvLayer>(closure, shifts, f_in, f_out, seed));
    } else {
      model.layers.push_back(
          std::make_unique<nn::PolyConvLayer>(poly_op, order, f_in, f_out, seed));
    }
    if (!last || spec.classifier) model.layers.push_back(std::make_unique<nn::ReluLayer>());
  }
}

void add_mlp_stack(Model& model, const ModelSpec& spec, const Dag& dag) {
  if (spec.in_features != 1) throw ParamError("build_model: mlp expects single-feature inputs");
  model.layers.push_back(std::make_unique<nn::NodeDenseLayer>(dag.n, spec.mlp_hidden,
                                                              mix_seed(spec.init_seed, 0)));
  model.layers.push_back(std::make_unique<nn::ReluLayer>());
  model.layers.push_back(std::make_unique<nn::NodeDenseLayer>(spec.mlp_hidden, dag.n,
                                                              mix_seed(spec.init_seed, 1)));
  if (spec.classifier) model.layers.push_back(std::make_unique<nn::ReluLayer>());
}

}  // namespace

Model build_model(const ModelSpec& spec, const Dag& dag,
                  std::shared_ptr<const ClosurePair> closure) {
  if (spec.conv_layers < 1) throw ParamError("build_model: conv_layers must be >= 1");
  Model model;
  model.spec = spec;
  if (spec.kind == "mlp") {
    add_mlp_stack(model, spec, dag);
  } else {
    add_graph_stack(model, spec, dag, std::move(closure));
  }
  if (spec.classifier) {
    if (spec.candidates.empty()) throw ParamError("build_model: classifier needs candidates");
    const int readout_features = spec.kind == "mlp" ? 1 : spec.hidden;
    model.readout.emplace(spec.candidates, readout_features,
                          mix_seed(spec.init_seed, 0x7265ULL));
  }
  return model;
}

namespace {

SignalBatch apply_activation(SignalBatch batch, Activation act) {
  if (act == Activation::kRelu) batch.data() = batch.data().cwiseMax(0.0);
  return batch;
}

template <typename T>
std::shared_ptr<const T> borrow(const T& ref) {
  return std::shared_ptr<const T>(&ref, [](const T*) {});
}

}  // namespace

SignalBatch dcn_layer(const SignalBatch& x, const Mat& bank, const CausalShiftSet& shifts,
                      const ClosurePair& closure, Activation act) {
  if (bank.rows() != shifts.size()) throw ShapeError("dcn_layer: bank rows must equal |U|");
  if (bank.cols() % x.features() != 0) {
    throw ShapeError("dcn_layer: bank columns not divisible by input features");
  }
  const int f_out = static_cast<int>(bank.cols()) / x.features();
  nn::DagConvLayer layer(borrow(closure), borrow(shifts), x.features(), f_out, 0);
  layer.theta().value = bank;
  return apply_activation(SignalBatch::wrap(layer.forward(x.data()), x.samples(), f_out), act);
}

SignalBatch dag_perceptron(const SignalBatch& x, const Vec& coeffs, const CausalShiftSet& shifts,
                           const ClosurePair& closure, Activation act) {
  if (x.features() != 1) throw ShapeError("dag_perceptron: expects single-feature signals");
  Mat bank(coeffs.size(), 1);
  bank.col(0) = coeffs;
  return dcn_layer(x, bank, shifts, closure, act);
}

SignalBatch fb_gcnn_layer(const SignalBatch& x, const std::vector<Mat>& thetas, const Mat& gso,
                          Activation act) {
  if (thetas.empty()) throw ParamError("fb_gcnn_layer: need at least one coefficient matrix");
  const int f_in = static_cast<int>(thetas.front().rows());
  const int f_out = static_cast<int>(thetas.front().cols());
  if (f_in != x.features()) throw ShapeError("fb_gcnn_layer: coefficient rows must match features");
  nn::PolyConvLayer layer(gso, static_cast<int>(thetas.size()), f_in, f_out, 0);
  for (std::size_t r = 0; r < thetas.size(); ++r) {
    if (thetas[r].rows() != f_in || thetas[r].cols() != f_out) {
      throw ShapeError("fb_gcnn_layer: inconsistent coefficient shapes");
    }
    MatMap(layer.theta().value.row(static_cast<long>(r)).data(), f_in, f_out) = thetas[r];
  }
  return apply_activation(SignalBatch::wrap(layer.forward(x.data()), x.samples(), f_out), act);
}

Mat source_readout(const SignalBatch& x, const std::vector<int>& candidates, const Vec& weight,
                   double bias) {
  if (candidates.empty()) throw ParamError("source_readout: candidate set must be nonempty");
  if (weight.size() != x.features()) {
    throw ShapeError("source_readout: weight length must match features");
  }
  nn::Readout readout(candidates, x.features(), 0);
  std::vector<nn::ParamTensor*> ps;
  readout.collect_params(ps);
  ps[0]->value.col(0) = weight;
  ps[1]->value(0, 0) = bias;
  return readout.forward(x.data());
}

namespace {

void write_int_list(std::ostream& out, const char* tag, const std::vector<int>& values) {
  out << tag << " " << values.size();
  for (int v : values) out << " " << v;
  out << "\n";
}

std::vector<int> read_int_list(std::istream& in, const char* tag) {
  std::string got;
  std::size_t count = 0;
  if (!(in >> got >> count) || got != tag) {
    throw IoError(std::string("checkpoint: expected list tag '") + tag + "'");
  }
  std::vector<int> values(count);
  for (auto& v : values) {
    if (!(in >> v)) throw IoError("checkpoint: truncated int list");
  }
  return values;
}

}  // namespace

void save_checkpoint(Model& model, std::ostream& out) {
  const ModelSpec& spec = model.spec;
  out << "dagcn-model v1\n";
  out << "kind " << spec.kind << "\n";
  out << "in_features " << spec.in_features << "\n";
  out << "hidden " << spec.hidden << "\n";
  out << "conv_layers " << spec.conv_layers << "\n";
  out << "out_features " << spec.out_features << "\n";
  out << "fb_order " << spec.fb_order << "\n";
  out << "mlp_hidden " << spec.mlp_hidden << "\n";
  out << "transposed " << (spec.transposed ? 1 : 0) << "\n";
  out << "classifier " << (spec.classifier ? 1 : 0) << "\n";
  out << "init_seed " << spec.init_seed << "\n";
  write_int_list(out, "shift_nodes", spec.shift_nodes);
  write_int_list(out, "candidates", spec.candidates);

  const auto params = model.params();
  out << "params " << params.size() << "\n";
  out << std::setprecision(17);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const Mat& value = params[i]->value;
    out << "param " << i << " " << value.rows() << " " << value.cols() << "\n";
    for (long r = 0; r < value.rows(); ++r) {
      for (long c = 0; c < value.cols(); ++c) {
        out << value(r, c) << (c + 1 == value.cols() ? "" : " ");
      }
      out << "\n";
    }
  }
  out << "end\n";
}

Model load_checkpoint(std::istream& in, const Dag& dag,
                      std::shared_ptr<const ClosurePair> closure) {
  std::string magic, version;
  if (!(in >> magic >> version) || magic != "dagcn-model" || version != "v1") {
    throw IoError("checkpoint: bad header");
  }

  ModelSpec spec;
  auto read_field = [&in](const char* tag, auto& value) {
    std::string got;
    if (!(in >> got >> value) || got != tag) {
      throw IoError(std::string("checkpoint: expected field '") + tag + "'");
    }
  };
  int transposed = 0, classifier = 0;
  read_field("kind", spec.kind);
  read_field("in_features", spec.in_features);
  read_field("hidden", spec.hidden);
  read_field("conv_layers", spec.conv_layers);
  read_field("out_features", spec.out_features);
  read_field("fb_order", spec.fb_order);
  read_field("mlp_hidden", spec.mlp_hidden);
  read_field("transposed", transposed);
  read_field("classifier", classifier);
  read_field("init_seed", spec.init_seed);
  spec.transposed = transposed != 0;
  spec.classifier = classifier != 0;
  spec.shift_nodes = read_int_list(in, "shift_nodes");
  spec.candidates = read_int_list(in, "candidates");

  Model model = build_model(spec, dag, std::move(closure));

  std::string tag;
  std::size_t count = 0;
  if (!(in >> tag >> count) || tag != "params") throw IoError("checkpoint: expected params count");
  auto params = model.params();
  if (count != params.size()) throw IoError("checkpoint: parameter count mismatch");
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t index = 0;
    long rows = 0, cols = 0;
    if (!(in >> tag >> index >> rows >> cols) || tag != "param" || index != i) {
      throw IoError("checkpoint: malformed param header");
    }
    Mat& value = params[i]->value;
    if (rows != value.rows() || cols != value.cols()) {
      throw IoError("checkpoint: parameter shape mismatch");
    }
    for (long r = 0; r < rows; ++r) {
      for (long c = 0; c < cols; ++c) {
        if (!(in >> value(r, c))) throw IoError("checkpoint: truncated parameter data");
      }
    }
  }
  if (!(in >> tag) || tag != "end") throw IoError("checkpoint: missing end marker");
  return model;
}

}  // namespace dagcn::models
