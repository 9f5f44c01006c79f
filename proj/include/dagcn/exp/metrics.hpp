#pragma once

#include <vector>

#include "dagcn/types.hpp"

namespace dagcn::exp {

/// Mean over samples (columns) of ||y - yhat||^2 / ||y||^2 against the clean
/// targets. A zero-norm target column raises NumericError naming the sample.
double nmse(const Mat& predictions, const Mat& clean_targets);

/// Fraction of argmax hits; ties break toward the lowest candidate index.
double accuracy(const Mat& logits, const std::vector<int>& labels);

struct SummaryStats {
  int count = 0;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation
  double q25 = 0.0;
  double median = 0.0;
  double q75 = 0.0;
};

/// Mean, sample stddev and linearly interpolated quartiles.
SummaryStats summarize(std::vector<double> values);

}  // namespace dagcn::exp
