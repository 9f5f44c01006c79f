#include "dagcn/models/ls.hpp"

#include <Eigen/Dense>
#include <sstream>

#include "dagcn/signal.hpp"

namespace dagcn::models {

LsFilterFit ls_fit(const ClosurePair& closure, const CausalShiftSet& support, const Mat& inputs,
                   const Mat& targets, double ridge) {
  const int n = static_cast<int>(inputs.rows());
  const int m = static_cast<int>(inputs.cols());
  if (targets.rows() != n || targets.cols() != m) {
    throw ShapeError("ls_fit: inputs and targets must share the N x M shape");
  }
  if (ridge < 0.0) throw ParamError("ls_fit: ridge must be nonnegative");
  const int k = support.size();
  if (m < k) {
    std::ostringstream msg;
    msg << "ls_fit: need at least |support|=" << k << " samples, got " << m;
    throw ParamError(msg.str());
  }

  // One shift application per support node; each flattened N*M product is a
  // regressor column.
  const Mat spectral = support.transposed ? closure.apply_w_t(inputs) : closure.apply_winv(inputs);
  Eigen::MatrixXd regressors(static_cast<long>(n) * m, k);
  for (int u = 0; u < k; ++u) {
    const Vec mask = support.masks.col(u);
    const Mat masked = mask.asDiagonal() * spectral;
    const Mat column = support.transposed ? closure.apply_winv_t(masked) : closure.apply_w(masked);
    regressors.col(u) = Eigen::Map<const Eigen::VectorXd>(column.data(), column.size());
  }
  const Eigen::Map<const Eigen::VectorXd> target_vec(targets.data(), targets.size());

  Eigen::MatrixXd normal = regressors.transpose() * regressors;
  if (ridge == 0.0) {
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(normal);
    if (qr.rank() < k) {
      throw NumericError("ls_fit: rank-deficient normal matrix; retry with ridge > 0");
    }
  } else {
    normal.diagonal().array() += ridge;
  }
  const Eigen::VectorXd rhs = regressors.transpose() * target_vec;
  const Eigen::VectorXd solution = normal.ldlt().solve(rhs);

  LsFilterFit fit;
  fit.ridge = ridge;
  fit.filter.shifts = support;
  fit.filter.coeffs = solution;
  return fit;
}

Mat ls_predict(const LsFilterFit& fit, const ClosurePair& closure, const Mat& inputs) {
  const SignalBatch x = SignalBatch::wrap(inputs, static_cast<int>(inputs.cols()), 1);
  return apply_filter(fit.filter, closure, x).data();
}

}  // namespace dagcn::models
