#pragma once

#include <limits>
#include <string>
#include <vector>

#include "dagcn/exp/config.hpp"
#include "dagcn/exp/metrics.hpp"
#include "dagcn/nn/train.hpp"
#include "dagcn/synth/tasks.hpp"

namespace dagcn::exp {

struct RealizationResult {
  int realization = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  double metric = std::numeric_limits<double>::quiet_NaN();
  double train_seconds = std::numeric_limits<double>::quiet_NaN();
};

/// Per-realization metrics for one (task, model, sweep point) cell.
struct MetricReport {
  std::string task;
  std::string model;
  std::string metric_name;  // nmse | accuracy
  std::string sweep_param;  // empty outside sweeps
  double sweep_value = std::numeric_limits<double>::quiet_NaN();
  std::vector<RealizationResult> rows;

  std::vector<double> ok_values() const;
  std::vector<double> ok_seconds() const;
  SummaryStats stats() const { return summarize(ok_values()); }
};

/// One realization end to end: sample the graph, generate the task, train the
/// model (or fit LS), evaluate on the test split. Deterministic in
/// (config, realization). Throws on failure.
RealizationResult run_realization(const ExperimentConfig& config, int realization);

/// Every realization of one configuration; failures become error rows and are
/// excluded from aggregates. Writes <task>_<model>_{raw,summary}.csv under
/// config.out_dir.
MetricReport run_experiment(const ExperimentConfig& config, bool verbose = true);

/// Grid sweep: one raw/summary CSV pair per method covering all grid points.
std::vector<MetricReport> run_sweep(const ExperimentConfig& base, const std::string& sweep_param,
                                    const std::vector<double>& grid,
                                    const std::vector<std::string>& methods, bool verbose = true);

// Shared plumbing (also used by the CLI subcommands).
nn::ModelSpec spec_from_config(const ExperimentConfig& config, int n, std::uint64_t seed);
nn::Batch diffusion_batch(const synth::DiffusionTask& task, const std::vector<int>& idx);
nn::Batch source_batch(const synth::SourceIdTask& task, const std::vector<int>& idx);
double evaluate_diffusion(nn::Model& model, const synth::DiffusionTask& task);
double evaluate_source_id(nn::Model& model, const synth::SourceIdTask& task);
WeightLaw weight_law_from(const ExperimentConfig& config);
std::string sanitize_filename(std::string name);

}  // namespace dagcn::exp
