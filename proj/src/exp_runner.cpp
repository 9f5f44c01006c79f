#include "dagcn/exp/runner.hpp"

#include <atomic>
#include <cctype>
#include <chrono>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <thread>

#include "dagcn/exp/csv.hpp"
#include "dagcn/models/build.hpp"
#include "dagcn/models/ls.hpp"
#include "dagcn/rng.hpp"

namespace dagcn::exp {

namespace {

constexpr std::uint64_t kInitSalt = 0x6d6f64ULL;
constexpr std::uint64_t kSubsetSalt = 0x737562ULL;
constexpr std::uint64_t kTrainSalt = 0x747261ULL;

}  // namespace

std::vector<double> MetricReport::ok_values() const {
  std::vector<double> out;
  for (const auto& row : rows) {
    if (row.ok) out.push_back(row.metric);
  }
  return out;
}

std::vector<double> MetricReport::ok_seconds() const {
  std::vector<double> out;
  for (const auto& row : rows) {
    if (row.ok) out.push_back(row.train_seconds);
  }
  return out;
}

WeightLaw weight_law_from(const ExperimentConfig& config) {
  if (config.weight_law == "unit") return WeightLaw::unit();
  return WeightLaw::uniform_signed(config.weight_lo, config.weight_hi);
}

std::string sanitize_filename(std::string name) {
  for (char& c : name) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '.') c = '_';
  }
  return name;
}

nn::ModelSpec spec_from_config(const ExperimentConfig& config, int n, std::uint64_t seed) {
  const MethodId id = parse_method(config.model);
  if (id.family == "ls") throw ParamError("spec_from_config: ls is not a network model");

  nn::ModelSpec spec;
  spec.kind = id.family;
  spec.in_features = 1;
  spec.hidden = config.hidden;
  spec.conv_layers = config.conv_layers;
  spec.out_features = 1;
  spec.fb_order = config.fb_order;
  spec.mlp_hidden = config.mlp_hidden;
  spec.transposed = id.transposed;
  spec.init_seed = mix_seed(seed, kInitSalt);
  if (id.family == "dcn" && id.num_shifts > 0) {
    if (id.num_shifts > n) throw ParamError("spec_from_config: |U| exceeds node count");
    auto rng = make_rng(seed, kSubsetSalt);
    spec.shift_nodes = sample_without_replacement(n, id.num_shifts, rng);
  }
  return spec;
}

nn::Batch diffusion_batch(const synth::DiffusionTask& task, const std::vector<int>& idx) {
  nn::Batch all;
  all.features = 1;
  all.inputs = task.x_obs;
  all.targets = task.y_obs;
  return nn::gather(all, idx);
}

nn::Batch source_batch(const synth::SourceIdTask& task, const std::vector<int>& idx) {
  nn::Batch all;
  all.features = 1;
  all.inputs = task.y_masked;
  all.labels = task.labels;
  return nn::gather(all, idx);
}

double evaluate_diffusion(nn::Model& model, const synth::DiffusionTask& task) {
  nn::Batch test = diffusion_batch(task, task.split.test);
  nn::Batch clean;
  clean.features = 1;
  clean.inputs = task.x_clean;
  clean.targets = task.y_clean;
  const nn::Batch clean_test = nn::gather(clean, task.split.test);
  const Mat pred = model.forward_nodes(test.inputs);
  return nmse(pred, clean_test.targets);
}

double evaluate_source_id(nn::Model& model, const synth::SourceIdTask& task) {
  const nn::Batch test = source_batch(task, task.split.test);
  const Mat logits = model.forward_logits(test.inputs);
  return accuracy(logits, test.labels);
}

namespace {

RealizationResult run_diffusion_realization(const ExperimentConfig& config, int realization) {
  RealizationResult result;
  result.realization = realization;
  result.seed = config.base_seed + static_cast<std::uint64_t>(realization);

  Dag dag = sample_er_dag(config.n, config.p, weight_law_from(config), result.seed);
  synth::DiffusionParams params;
  params.samples = config.m;
  params.n_source_nodes = config.n_source_nodes;
  params.input_density = config.input_density;
  params.noise_power = config.noise;
  params.gt_num_shifts = config.gt_num_shifts;
  params.per_signal_noise = config.per_signal_noise;
  params.train_frac = config.train_frac;
  params.val_frac = config.val_frac;
  params.test_frac = config.test_frac;
  const synth::DiffusionTask task = gen_diffusion(std::move(dag), params, result.seed);

  const MethodId id = parse_method(config.model);
  if (id.family == "ls") {
    CausalShiftSet support = task.gt_filter.shifts;  // oracle support by default
    double ridge = config.ridge;
    if (config.ls_all_nodes) {
      support = random_shift_set(task.dag, 0, 0, id.transposed);
      if (ridge <= 0.0) ridge = 1e-6;
    } else if (id.transposed) {
      support.transposed = true;
    }
    const nn::Batch train_set = diffusion_batch(task, task.split.train);
    const auto t0 = std::chrono::steady_clock::now();
    const models::LsFilterFit fit =
        models::ls_fit(*task.closure, support, train_set.inputs, train_set.targets, ridge);
    result.train_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    nn::Batch clean;
    clean.features = 1;
    clean.inputs = task.x_clean;
    clean.targets = task.y_clean;
    const nn::Batch clean_test = nn::gather(clean, task.split.test);
    const nn::Batch test = diffusion_batch(task, task.split.test);
    const Mat pred = models::ls_predict(fit, *task.closure, test.inputs);
    result.metric = nmse(pred, clean_test.targets);
    result.ok = true;
    return result;
  }

  nn::Model model = models::build_model(spec_from_config(config, task.dag.n, result.seed),
                                        task.dag, task.closure);
  nn::TrainConfig train_config;
  train_config.lr = config.lr;
  train_config.max_epochs = config.max_epochs;
  train_config.patience = config.patience;
  train_config.batch_size = config.batch_size;
  train_config.loss = nn::LossKind::kMse;
  train_config.seed = mix_seed(result.seed, kTrainSalt);
  const nn::TrainHistory history = nn::train(model, diffusion_batch(task, task.split.train),
                                             diffusion_batch(task, task.split.val), train_config);
  result.train_seconds = history.seconds;
  result.metric = evaluate_diffusion(model, task);
  result.ok = true;
  return result;
}

RealizationResult run_source_id_realization(const ExperimentConfig& config, int realization) {
  RealizationResult result;
  result.realization = realization;
  result.seed = config.base_seed + static_cast<std::uint64_t>(realization);

  const MethodId id = parse_method(config.model);
  if (id.family == "ls") {
    throw ParamError("run_realization: ls is not available for source-id");
  }

  Dag dag = sample_er_dag(config.n, config.p, weight_law_from(config), result.seed);
  synth::SourceIdParams params;
  params.samples = config.m;
  params.gt_num_shifts = config.gt_num_shifts;
  params.unobserved_fraction = config.unobserved_fraction;
  if (config.unobserved_fraction == 0.0) {
    params.candidates = synth::first_nodes(std::min(config.n_source_nodes, config.n - 1));
  }
  params.train_frac = config.train_frac;
  params.val_frac = config.val_frac;
  params.test_frac = config.test_frac;
  const synth::SourceIdTask task = gen_source_id(std::move(dag), params, result.seed);

  nn::ModelSpec spec = spec_from_config(config, task.dag.n, result.seed);
  spec.classifier = true;
  spec.candidates = task.candidates;
  nn::Model model = models::build_model(spec, task.dag, task.closure);

  nn::TrainConfig train_config;
  train_config.lr = config.lr;
  train_config.max_epochs = config.max_epochs;
  train_config.patience = config.patience;
  train_config.batch_size = config.batch_size;
  train_config.loss = nn::LossKind::kCrossEntropy;
  train_config.seed = mix_seed(result.seed, kTrainSalt);
  const nn::TrainHistory history = nn::train(model, source_batch(task, task.split.train),
                                             source_batch(task, task.split.val), train_config);
  result.train_seconds = history.seconds;
  result.metric = evaluate_source_id(model, task);
  result.ok = true;
  return result;
}

RealizationResult safe_run(const ExperimentConfig& config, int realization) {
  try {
    return run_realization(config, realization);
  } catch (const std::exception& e) {
    RealizationResult result;
    result.realization = realization;
    result.seed = config.base_seed + static_cast<std::uint64_t>(realization);
    result.ok = false;
    result.error = e.what();
    return result;
  }
}

std::vector<RealizationResult> run_all(const ExperimentConfig& config, bool verbose) {
  const int total = config.realizations;
  int workers = config.workers > 0 ? config.workers
                                   : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min(workers, total));

  std::vector<RealizationResult> rows(total);
  std::mutex log_mutex;
  auto log_row = [&](const RealizationResult& row) {
    if (!verbose) return;
    std::lock_guard<std::mutex> lock(log_mutex);
    std::cerr << "[dagcn] " << config.task << " " << config.model << " r=" << row.realization + 1
              << "/" << total;
    if (row.ok) {
      std::cerr << " metric=" << row.metric << " (" << row.train_seconds << "s)\n";
    } else {
      std::cerr << " FAILED: " << row.error << "\n";
    }
  };

  if (workers == 1) {
    for (int r = 0; r < total; ++r) {
      rows[r] = safe_run(config, r);
      log_row(rows[r]);
    }
    return rows;
  }

  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (int r = next.fetch_add(1); r < total; r = next.fetch_add(1)) {
        rows[r] = safe_run(config, r);
        log_row(rows[r]);
      }
    });
  }
  for (auto& t : pool) t.join();
  return rows;
}

const std::vector<std::string> kRawHeader = {"realization", "seed",          "sweep_param",
                                             "sweep_value", "metric_name",   "metric",
                                             "train_seconds", "status",      "note"};
const std::vector<std::string> kSummaryHeader = {
    "task",   "model", "sweep_param", "sweep_value",        "metric_name", "realizations", "ok",
    "mean",   "stddev", "q25",        "median",             "q75",         "mean_train_seconds"};

void write_raw_rows(CsvWriter& writer, const MetricReport& report) {
  for (const auto& row : report.rows) {
    writer.row({std::to_string(row.realization), std::to_string(row.seed), report.sweep_param,
                report.sweep_param.empty() ? "" : CsvWriter::num(report.sweep_value),
                report.metric_name, CsvWriter::num(row.metric), CsvWriter::num(row.train_seconds),
                row.ok ? "ok" : "error", CsvWriter::sanitize(row.error)});
  }
}

void write_summary_row(CsvWriter& writer, const MetricReport& report) {
  const SummaryStats stats = report.stats();
  const SummaryStats time_stats = summarize(report.ok_seconds());
  if (stats.count == 0) {
    std::cerr << "[dagcn] warning: no successful realizations for " << report.task << "/"
              << report.model << "\n";
  }
  writer.row({report.task, report.model, report.sweep_param,
              report.sweep_param.empty() ? "" : CsvWriter::num(report.sweep_value),
              report.metric_name, std::to_string(report.rows.size()),
              std::to_string(stats.count), CsvWriter::num(stats.mean),
              CsvWriter::num(stats.stddev), CsvWriter::num(stats.q25),
              CsvWriter::num(stats.median), CsvWriter::num(stats.q75),
              CsvWriter::num(time_stats.mean)});
}

MetricReport run_point(const ExperimentConfig& config, const std::string& sweep_param,
                       double sweep_value, bool verbose) {
  config.validate();
  MetricReport report;
  report.task = config.task;
  report.model = config.model;
  report.metric_name = config.task == "diffusion" ? "nmse" : "accuracy";
  report.sweep_param = sweep_param;
  report.sweep_value = sweep_value;
  report.rows = run_all(config, verbose);
  return report;
}

}  // namespace

RealizationResult run_realization(const ExperimentConfig& config, int realization) {
  if (realization < 0 || realization >= config.realizations) {
    throw ParamError("run_realization: realization index out of range");
  }
  if (config.task == "diffusion") return run_diffusion_realization(config, realization);
  if (config.task == "source-id") return run_source_id_realization(config, realization);
  throw ParamError("run_realization: unknown task '" + config.task + "'");
}

MetricReport run_experiment(const ExperimentConfig& config, bool verbose) {
  std::filesystem::create_directories(config.out_dir);
  MetricReport report = run_point(config, "", 0.0, verbose);

  const std::string base =
      config.out_dir + "/" + sanitize_filename(config.task + "_" + config.model);
  CsvWriter raw(base + "_raw.csv");
  raw.row(kRawHeader);
  write_raw_rows(raw, report);
  CsvWriter summary(base + "_summary.csv");
  summary.row(kSummaryHeader);
  write_summary_row(summary, report);
  return report;
}

std::vector<MetricReport> run_sweep(const ExperimentConfig& base, const std::string& sweep_param,
                                    const std::vector<double>& grid,
                                    const std::vector<std::string>& methods, bool verbose) {
  if (grid.empty() || methods.empty()) throw ParamError("run_sweep: empty grid or method list");
  std::filesystem::create_directories(base.out_dir);

  std::vector<MetricReport> reports;
  for (const std::string& method : methods) {
    const std::string stem =
        base.out_dir + "/" + sanitize_filename(sweep_param + "_" + method);
    CsvWriter raw(stem + "_raw.csv");
    raw.row(kRawHeader);
    CsvWriter summary(stem + "_summary.csv");
    summary.row(kSummaryHeader);

    for (double value : grid) {
      ExperimentConfig config = base;
      config.model = method;
      config.set(sweep_param, CsvWriter::num(value));
      MetricReport report = run_point(config, sweep_param, value, verbose);
      write_raw_rows(raw, report);
      write_summary_row(summary, report);
      reports.push_back(std::move(report));
    }
  }
  return reports;
}

}  // namespace dagcn::exp
