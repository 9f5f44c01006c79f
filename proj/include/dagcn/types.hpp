#pragma once

#include <Eigen/Core>
#include <stdexcept>

namespace dagcn {

// Row-major throughout: a batch stores one node per row, so each row can be
// remapped as contiguous per-sample feature blocks without copying.
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vec = Eigen::VectorXd;
using BoolArray = Eigen::Array<bool, Eigen::Dynamic, 1>;

using MatMap = Eigen::Map<Mat>;
using ConstMatMap = Eigen::Map<const Mat>;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// Invalid argument or configuration value.
struct ParamError : Error {
  using Error::Error;
};
// Incompatible tensor/matrix dimensions.
struct ShapeError : Error {
  using Error::Error;
};
// Input graph admits no topological order.
struct AcyclicityError : Error {
  using Error::Error;
};
// Divergence, singular systems, degenerate metrics.
struct NumericError : Error {
  using Error::Error;
};
struct IoError : Error {
  using Error::Error;
};

}  // namespace dagcn
