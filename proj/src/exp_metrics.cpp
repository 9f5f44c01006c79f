#include "dagcn/exp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dagcn::exp {

double nmse(const Mat& predictions, const Mat& clean_targets) {
  if (predictions.rows() != clean_targets.rows() || predictions.cols() != clean_targets.cols()) {
    throw ShapeError("nmse: prediction and target shapes differ");
  }
  const int samples = static_cast<int>(clean_targets.cols());
  if (samples < 1) throw ParamError("nmse: need at least one sample");
  double total = 0.0;
  for (int m = 0; m < samples; ++m) {
    const double denom = clean_targets.col(m).squaredNorm();
    if (denom == 0.0) {
      std::ostringstream msg;
      msg << "nmse: target sample " << m << " has zero norm";
      throw NumericError(msg.str());
    }
    total += (predictions.col(m) - clean_targets.col(m)).squaredNorm() / denom;
  }
  return total / samples;
}

double accuracy(const Mat& logits, const std::vector<int>& labels) {
  if (static_cast<int>(labels.size()) != logits.rows()) {
    throw ShapeError("accuracy: label count does not match logit rows");
  }
  const int classes = static_cast<int>(logits.cols());
  int hits = 0;
  for (long m = 0; m < logits.rows(); ++m) {
    int best = 0;
    for (int c = 1; c < classes; ++c) {
      if (logits(m, c) > logits(m, best)) best = c;  // ties keep the lower index
    }
    if (best == labels[m]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(logits.rows());
}

namespace {

double quantile_sorted(const std::vector<double>& sorted, double p) {
  const std::size_t n = sorted.size();
  if (n == 1) return sorted[0];
  const double h = p * static_cast<double>(n - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, n - 1);
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

SummaryStats summarize(std::vector<double> values) {
  SummaryStats stats;
  stats.count = static_cast<int>(values.size());
  if (values.empty()) return stats;

  double sum = 0.0;
  for (double v : values) sum += v;
  stats.mean = sum / stats.count;

  if (stats.count > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - stats.mean) * (v - stats.mean);
    stats.stddev = std::sqrt(ss / (stats.count - 1));
  }

  std::sort(values.begin(), values.end());
  stats.q25 = quantile_sorted(values, 0.25);
  stats.median = quantile_sorted(values, 0.5);
  stats.q75 = quantile_sorted(values, 0.75);
  return stats;
}

}  // namespace dagcn::exp
