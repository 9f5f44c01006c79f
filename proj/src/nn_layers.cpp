#include "dagcn/nn/layers.hpp"

#include <cmath>
#include <sstream>

#include "dagcn/rng.hpp"

namespace dagcn::nn {

void init_uniform(Mat& m, double bound, std::uint64_t seed) {
  std::mt19937_64 rng = make_rng(seed, /*salt=*/0x696e6974ULL);
  std::uniform_real_distribution<double> unif(-bound, bound);
  for (long i = 0; i < m.rows(); ++i) {
    for (long j = 0; j < m.cols(); ++j) m(i, j) = unif(rng);
  }
}

namespace {

int infer_samples(const Mat& x, int features, const char* where) {
  if (features < 1 || x.cols() % features != 0) {
    std::ostringstream msg;
    msg << where << ": " << x.cols() << " columns not divisible by " << features << " features";
    throw ShapeError(msg.str());
  }
  return static_cast<int>(x.cols()) / features;
}

// Whole-batch feature mixing: view N x (M*F_in) as (N*M) x F_in and multiply
// by theta (F_in x F_out) in one product.
Mat feature_map(const Mat& x, const Mat& theta) {
  const long f_in = theta.rows();
  const long f_out = theta.cols();
  const long rows = x.rows() * (x.cols() / f_in);
  ConstMatMap flat(x.data(), rows, f_in);
  Mat out(x.rows(), (x.cols() / f_in) * f_out);
  MatMap(out.data(), rows, f_out).noalias() = flat * theta;
  return out;
}

}  // namespace

DagConvLayer::DagConvLayer(std::shared_ptr<const ClosurePair> closure,
                           std::shared_ptr<const CausalShiftSet> shifts, int in_features,
                           int out_features, std::uint64_t init_seed)
    : closure_(std::move(closure)),
      shifts_(std::move(shifts)),
      in_features_(in_features),
      out_features_(out_features),
      theta_("theta", shifts_->size(), in_features * out_features),
      bias_("bias", 1, out_features) {
  if (in_features < 1 || out_features < 1) {
    throw ParamError("DagConvLayer: feature counts must be >= 1");
  }
  const double bound = 1.0 / std::sqrt(static_cast<double>(shifts_->size()) * in_features);
  init_uniform(theta_.value, bound, init_seed);
}

Mat DagConvLayer::pre(const Mat& x) const {
  return shifts_->transposed ? closure_->apply_w_t(x) : closure_->apply_winv(x);
}
Mat DagConvLayer::post(const Mat& x) const {
  return shifts_->transposed ? closure_->apply_winv_t(x) : closure_->apply_w(x);
}
Mat DagConvLayer::post_adjoint(const Mat& x) const {
  return shifts_->transposed ? closure_->apply_winv(x) : closure_->apply_w_t(x);
}
Mat DagConvLayer::pre_adjoint(const Mat& x) const {
  return shifts_->transposed ? closure_->apply_w(x) : closure_->apply_winv_t(x);
}

Mat DagConvLayer::forward(const Mat& x) {
  const int samples = infer_samples(x, in_features_, "DagConvLayer::forward");
  const int n = static_cast<int>(x.rows());
  if (n != closure_->nodes()) throw ShapeError("DagConvLayer::forward: node count mismatch");

  cached_pre_ = pre(x);
  cached_coeff_.noalias() = shifts_->masks * theta_.value;

  Mat mixed(n, static_cast<long>(samples) * out_features_);
  for (int i = 0; i < n; ++i) {
    ConstMatMap yi(cached_pre_.row(i).data(), samples, in_features_);
    ConstMatMap si(cached_coeff_.row(i).data(), in_features_, out_features_);
    MatMap(mixed.row(i).data(), samples, out_features_).noalias() = yi * si;
  }
  Mat out = post(mixed);
  MatMap(out.data(), static_cast<long>(n) * samples, out_features_).rowwise() +=
      bias_.value.row(0);
  return out;
}

Mat DagConvLayer::backward(const Mat& grad_out) {
  const int samples = infer_samples(grad_out, out_features_, "DagConvLayer::backward");
  const int n = static_cast<int>(grad_out.rows());

  bias_.grad.row(0).noalias() +=
      ConstMatMap(grad_out.data(), static_cast<long>(n) * samples, out_features_)
          .colwise()
          .sum();
  const Mat p = post_adjoint(grad_out);
  Mat contrib(n, static_cast<long>(in_features_) * out_features_);
  Mat dpre(n, static_cast<long>(samples) * in_features_);
  for (int i = 0; i < n; ++i) {
    ConstMatMap yi(cached_pre_.row(i).data(), samples, in_features_);
    ConstMatMap pi(p.row(i).data(), samples, out_features_);
    ConstMatMap si(cached_coeff_.row(i).data(), in_features_, out_features_);
    MatMap(contrib.row(i).data(), in_features_, out_features_).noalias() = yi.transpose() * pi;
    MatMap(dpre.row(i).data(), samples, in_features_).noalias() = pi * si.transpose();
  }
  theta_.grad.noalias() += shifts_->masks.transpose() * contrib;
  return pre_adjoint(dpre);
}

std::string DagConvLayer::summary() const {
  std::ostringstream out;
  out << "dagconv(" << in_features_ << "->" << out_features_ << ", |U|=" << shifts_->size()
      << (shifts_->transposed ? ", transposed" : "") << ")";
  return out.str();
}

PolyConvLayer::PolyConvLayer(Mat shift, int order, int in_features, int out_features,
                             std::uint64_t init_seed)
    : shift_(std::move(shift)),
      order_(order),
      in_features_(in_features),
      out_features_(out_features),
      theta_("theta", order, in_features * out_features),
      bias_("bias", 1, out_features) {
  if (order < 1) throw ParamError("PolyConvLayer: order must be >= 1");
  if (in_features < 1 || out_features < 1) {
    throw ParamError("PolyConvLayer: feature counts must be >= 1");
  }
  const double bound = 1.0 / std::sqrt(static_cast<double>(order) * in_features);
  init_uniform(theta_.value, bound, init_seed);
}

Mat PolyConvLayer::forward(const Mat& x) {
  infer_samples(x, in_features_, "PolyConvLayer::forward");
  if (x.rows() != shift_.rows()) throw ShapeError("PolyConvLayer::forward: node count mismatch");
  cached_input_ = x;

  Mat out = feature_map(x, theta_block(0));
  Mat cur;
  for (int r = 1; r < order_; ++r) {
    cur = r == 1 ? Mat(shift_ * x) : Mat(shift_ * cur);
    out += feature_map(cur, theta_block(r));
  }
  MatMap(out.data(), out.size() / out_features_, out_features_).rowwise() += bias_.value.row(0);
  return out;
}

Mat PolyConvLayer::backward(const Mat& grad_out) {
  const int samples = infer_samples(grad_out, out_features_, "PolyConvLayer::backward");
  const long flat_rows = grad_out.rows() * static_cast<long>(samples);
  ConstMatMap g_flat(grad_out.data(), flat_rows, out_features_);
  bias_.grad.row(0).noalias() += g_flat.colwise().sum();

  // dTheta_r = (S^r X)^T G; powers recomputed rather than cached.
  Mat cur = cached_input_;
  for (int r = 0; r < order_; ++r) {
    ConstMatMap x_flat(cur.data(), flat_rows, in_features_);
    MatMap(theta_.grad.row(r).data(), in_features_, out_features_).noalias() +=
        x_flat.transpose() * g_flat;
    if (r + 1 < order_) cur = shift_ * cur;
  }

  // dX = sum_r (S^T)^r (G Theta_r^T), evaluated Horner style.
  Mat acc = feature_map(grad_out, Mat(theta_block(order_ - 1).transpose()));
  for (int r = order_ - 2; r >= 0; --r) {
    acc = shift_.transpose() * acc;
    acc += feature_map(grad_out, Mat(theta_block(r).transpose()));
  }
  return acc;
}

ConstMatMap PolyConvLayer::theta_block(int r) const {
  return ConstMatMap(theta_.value.row(r).data(), in_features_, out_features_);
}

std::string PolyConvLayer::summary() const {
  std::ostringstream out;
  out << "polyconv(" << in_features_ << "->" << out_features_ << ", R=" << order_ << ")";
  return out.str();
}

NodeDenseLayer::NodeDenseLayer(int in_nodes, int out_nodes, std::uint64_t init_seed)
    : weight_("weight", out_nodes, in_nodes), bias_("bias", out_nodes, 1) {
  if (in_nodes < 1 || out_nodes < 1) throw ParamError("NodeDenseLayer: sizes must be >= 1");
  init_uniform(weight_.value, 1.0 / std::sqrt(static_cast<double>(in_nodes)), init_seed);
}

Mat NodeDenseLayer::forward(const Mat& x) {
  if (x.rows() != weight_.value.cols()) {
    throw ShapeError("NodeDenseLayer::forward: node count mismatch");
  }
  cached_input_ = x;
  Mat out = weight_.value * x;
  out.colwise() += bias_.value.col(0);
  return out;
}

Mat NodeDenseLayer::backward(const Mat& grad_out) {
  weight_.grad.noalias() += grad_out * cached_input_.transpose();
  bias_.grad.col(0).noalias() += grad_out.rowwise().sum();
  return weight_.value.transpose() * grad_out;
}

std::string NodeDenseLayer::summary() const {
  std::ostringstream out;
  out << "nodedense(" << weight_.value.cols() << "->" << weight_.value.rows() << ")";
  return out.str();
}

Mat ReluLayer::forward(const Mat& x) {
  gate_ = (x.array() > 0.0).cast<double>().matrix();
  return x.cwiseMax(0.0);
}

Mat ReluLayer::backward(const Mat& grad_out) {
  return grad_out.cwiseProduct(gate_);
}

Readout::Readout(std::vector<int> candidates, int features, std::uint64_t init_seed)
    : candidates_(std::move(candidates)),
      features_(features),
      weight_("readout_weight", features, 1),
      bias_("readout_bias", 1, 1) {
  if (candidates_.empty()) throw ParamError("Readout: candidate set must be nonempty");
  if (features < 1) throw ParamError("Readout: features must be >= 1");
  init_uniform(weight_.value, 1.0 / std::sqrt(static_cast<double>(features)), init_seed);
}

Mat Readout::forward(const Mat& x) {
  const int samples = infer_samples(x, features_, "Readout::forward");
  input_nodes_ = static_cast<int>(x.rows());
  const int classes = static_cast<int>(candidates_.size());
  cached_rows_.resize(classes, x.cols());
  Mat logits(samples, classes);
  for (int c = 0; c < classes; ++c) {
    const int node = candidates_[c];
    if (node < 0 || node >= input_nodes_) throw ParamError("Readout: candidate out of range");
    cached_rows_.row(c) = x.row(node);
    ConstMatMap xi(cached_rows_.row(c).data(), samples, features_);
    logits.col(c) = xi * weight_.value.col(0);
    logits.col(c).array() += bias_.value(0, 0);
  }
  return logits;
}

Mat Readout::backward(const Mat& dlogits) {
  const int samples = static_cast<int>(dlogits.rows());
  const int classes = static_cast<int>(candidates_.size());
  Mat dx = Mat::Zero(input_nodes_, static_cast<long>(samples) * features_);
  for (int c = 0; c < classes; ++c) {
    ConstMatMap xi(cached_rows_.row(c).data(), samples, features_);
    weight_.grad.col(0).noalias() += xi.transpose() * dlogits.col(c);
    MatMap dxi(dx.row(candidates_[c]).data(), samples, features_);
    dxi.noalias() += dlogits.col(c) * weight_.value.col(0).transpose();
  }
  bias_.grad(0, 0) += dlogits.sum();
  return dx;
}

}  // namespace dagcn::nn
