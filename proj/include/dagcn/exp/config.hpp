#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace dagcn::exp {

/// Flat experiment configuration; serializes to `key = value` lines and back
/// losslessly. Unknown keys are rejected on parse.
struct ExperimentConfig {
  std::string task = "diffusion";  // diffusion | source-id
  std::string model = "dcn";       // dcn[-<count>][-t] | ls | fb-gcnn[-t] | gcn[-t] | mlp

  // Graph.
  int n = 100;
  double p = 0.2;
  std::string weight_law = "uniform";  // uniform | unit
  double weight_lo = 0.2;
  double weight_hi = 0.5;
  int dense_threshold = 2000;

  // Dataset.
  int m = 2000;
  double noise = 0.05;
  int n_source_nodes = 20;
  double input_density = 0.25;  // diffusion: per-sample source activation probability
  int gt_num_shifts = 25;
  double unobserved_fraction = 0.0;  // source-id sweep; 0 = first-20 candidates
  bool per_signal_noise = true;
  double train_frac = 0.7;
  double val_frac = 0.2;
  double test_frac = 0.1;

  // Model and training.
  int hidden = 32;
  int conv_layers = 2;
  int fb_order = 5;
  int mlp_hidden = 64;
  double lr = 5e-3;
  int max_epochs = 100;
  int patience = 25;
  int batch_size = 0;  // 0 = full batch
  double ridge = 0.0;
  bool ls_all_nodes = false;  // LS support: true regresses over every shift

  // Orchestration.
  int realizations = 25;
  std::uint64_t base_seed = 1;
  int workers = 0;  // 0 = hardware concurrency
  std::string out_dir = "results";

  std::vector<std::pair<std::string, std::string>> to_key_values() const;
  void set(const std::string& key, const std::string& value);
  void validate() const;  // throws ParamError on inconsistent values
};

void save_config(const ExperimentConfig& config, std::ostream& out);
ExperimentConfig load_config(std::istream& in);

/// Parsed model identifier: family plus DCN truncation and direction.
struct MethodId {
  std::string family;  // dcn | ls | fb-gcnn | gcn | mlp
  int num_shifts = 0;  // dcn only; 0 = all nodes
  bool transposed = false;
};

/// "dcn-30-t" -> {dcn, 30, true}; "fb-gcnn-t" -> {fb-gcnn, 0, true}.
MethodId parse_method(const std::string& name);

}  // namespace dagcn::exp
