#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <vector>

#include "dagcn/closure.hpp"
#include "dagcn/dag.hpp"
#include "dagcn/shifts.hpp"

namespace dagcn::synth {

struct SplitIdx {
  std::vector<int> train, val, test;
};

/// Disjoint, exhaustive, seeded shuffle split.
SplitIdx split_indices(int total, double train_frac, double val_frac, double test_frac,
                       std::uint64_t seed);

/// Network-diffusion regression task: y = H x with a ground-truth DAG filter,
/// dense standard-normal inputs on the first source nodes, and noisy observed
/// copies of both inputs and outputs.
struct DiffusionTask {
  Dag dag;
  std::shared_ptr<const ClosurePair> closure;
  DagFilter gt_filter;
  Mat x_clean, x_obs;  // N x M
  Mat y_clean, y_obs;  // N x M
  SplitIdx split;
  double noise_power = 0.0;
  int n_source_nodes = 0;
  double input_density = 1.0;
  std::uint64_t seed = 0;
};

struct DiffusionParams {
  int samples = 2000;
  int n_source_nodes = 20;
  double input_density = 0.25;  // per-sample activation probability of each source node
  double noise_power = 0.05;
  int gt_num_shifts = 25;      // |U| of the ground-truth filter
  bool per_signal_noise = true;  // sigma^2 tied to each signal's own power
  double train_frac = 0.7, val_frac = 0.2, test_frac = 0.1;
};

DiffusionTask gen_diffusion(Dag dag, const DiffusionParams& params, std::uint64_t seed);

/// Source-identification classification task: diffuse a unit impulse from a
/// candidate node, then mask the outputs at every candidate (unobserved) node.
struct SourceIdTask {
  Dag dag;
  std::shared_ptr<const ClosurePair> closure;
  DagFilter gt_filter;
  std::vector<int> candidates;  // unobserved set; class c <-> candidates[c]
  Mat y_clean, y_masked;        // N x M
  std::vector<int> labels;      // index into candidates
  SplitIdx split;
  std::uint64_t seed = 0;
};

struct SourceIdParams {
  int samples = 2000;
  std::vector<int> candidates;       // used when unobserved_fraction == 0
  double unobserved_fraction = 0.0;  // > 0: random subset of that size instead
  int gt_num_shifts = 25;
  double train_frac = 0.7, val_frac = 0.2, test_frac = 0.1;
};

SourceIdTask gen_source_id(Dag dag, const SourceIdParams& params, std::uint64_t seed);

/// {0, 1, ..., count-1}; the paper-style default candidate set.
std::vector<int> first_nodes(int count);

// Text archive: manifest plus decimal tensor dump; reloads bit-exactly.
void save_diffusion(const DiffusionTask& task, std::ostream& out);
DiffusionTask load_diffusion(std::istream& in);
void save_source_id(const SourceIdTask& task, std::ostream& out);
SourceIdTask load_source_id(std::istream& in);

}  // namespace dagcn::synth
