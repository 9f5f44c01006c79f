#pragma once

#include "dagcn/closure.hpp"
#include "dagcn/shifts.hpp"
#include "dagcn/types.hpp"

namespace dagcn::models {

/// Least-squares estimate of filter coefficients over a fixed shift support.
struct LsFilterFit {
  DagFilter filter;
  double ridge = 0.0;
};

/// Stacks the regressor columns T_k x_m over all samples and solves the
/// (optionally ridge-regularized) normal equations. With ridge = 0 a
/// rank-deficient normal matrix raises NumericError suggesting ridge > 0.
/// inputs and targets are N x M single-feature batches.
LsFilterFit ls_fit(const ClosurePair& closure, const CausalShiftSet& support, const Mat& inputs,
                   const Mat& targets, double ridge = 0.0);

/// Applies the fitted filter.
Mat ls_predict(const LsFilterFit& fit, const ClosurePair& closure, const Mat& inputs);

}  // namespace dagcn::models
