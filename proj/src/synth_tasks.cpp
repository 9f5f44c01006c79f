#include "dagcn/synth/tasks.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "dagcn/rng.hpp"
#include "dagcn/signal.hpp"

namespace dagcn::synth {

namespace {

constexpr std::uint64_t kFilterSalt = 1;
constexpr std::uint64_t kInputSalt = 2;
constexpr std::uint64_t kNoiseSalt = 3;
constexpr std::uint64_t kSplitSalt = 4;
constexpr std::uint64_t kCandidateSalt = 5;

DagFilter random_filter(const Dag& dag, int num_shifts, std::uint64_t seed) {
  if (num_shifts < 1 || num_shifts > dag.n) {
    throw ParamError("random_filter: shift count out of range");
  }
  std::mt19937_64 rng = make_rng(seed, kFilterSalt);
  DagFilter filter;
  filter.shifts = predecessor_masks(dag, sample_without_replacement(dag.n, num_shifts, rng));
  std::normal_distribution<double> normal(0.0, 1.0);
  filter.coeffs = Vec::NullaryExpr(num_shifts, [&](Eigen::Index) { return normal(rng); });
  filter.coeffs /= filter.coeffs.norm();  // fixes the output scale across realizations
  return filter;
}

// s + sigma * eps with sigma^2 = power * ||s||^2 / N, per column or globally.
Mat add_noise(const Mat& clean, double power, bool per_signal, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const int n = static_cast<int>(clean.rows());
  const int m = static_cast<int>(clean.cols());
  Mat noisy(n, m);
  double global_sigma = 0.0;
  if (!per_signal) {
    global_sigma = std::sqrt(power * clean.squaredNorm() / (static_cast<double>(m) * n));
  }
  for (int j = 0; j < m; ++j) {
    const double sigma =
        per_signal ? std::sqrt(power * clean.col(j).squaredNorm() / n) : global_sigma;
    for (int i = 0; i < n; ++i) noisy(i, j) = clean(i, j) + sigma * normal(rng);
  }
  return noisy;
}

}  // namespace

std::vector<int> first_nodes(int count) {
  std::vector<int> nodes(count);
  std::iota(nodes.begin(), nodes.end(), 0);
  return nodes;
}

SplitIdx split_indices(int total, double train_frac, double val_frac, double test_frac,
                       std::uint64_t seed) {
  if (total < 1) throw ParamError("split_indices: total must be >= 1");
  if (std::abs(train_frac + val_frac + test_frac - 1.0) > 1e-9) {
    throw ParamError("split_indices: fractions must sum to 1");
  }
  std::vector<int> order(total);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng = make_rng(seed, kSplitSalt);
  std::shuffle(order.begin(), order.end(), rng);

  const int n_train = static_cast<int>(std::llround(train_frac * total));
  const int n_val = static_cast<int>(std::llround(val_frac * total));
  SplitIdx split;
  split.train.assign(order.begin(), order.begin() + n_train);
  split.val.assign(order.begin() + n_train, order.begin() + n_train + n_val);
  split.test.assign(order.begin() + n_train + n_val, order.end());
  return split;
}

DiffusionTask gen_diffusion(Dag dag, const DiffusionParams& params, std::uint64_t seed) {
  if (params.samples < 10) throw ParamError("gen_diffusion: need at least 10 samples");
  if (params.n_source_nodes < 1 || params.n_source_nodes > dag.n) {
    throw ParamError("gen_diffusion: source node count out of range");
  }
  if (params.noise_power < 0.0) throw ParamError("gen_diffusion: noise power must be >= 0");
  if (!(params.input_density > 0.0 && params.input_density <= 1.0)) {
    throw ParamError("gen_diffusion: input density must lie in (0, 1]");
  }

  DiffusionTask task;
  task.seed = seed;
  task.noise_power = params.noise_power;
  task.n_source_nodes = params.n_source_nodes;
  task.input_density = params.input_density;
  task.dag = std::move(dag);
  task.closure = std::make_shared<const ClosurePair>(transitive_closure(task.dag));
  task.gt_filter = random_filter(task.dag, params.gt_num_shifts, seed);

  const int n = task.dag.n;
  const int m = params.samples;
  std::mt19937_64 input_rng = make_rng(seed, kInputSalt);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::uniform_int_distribution<int> any_source(0, params.n_source_nodes - 1);
  task.x_clean = Mat::Zero(n, m);
  for (int j = 0; j < m; ++j) {
    // Sparse support within the first source nodes; every sample keeps at
    // least one active node so signals never vanish.
    bool active = false;
    for (int i = 0; i < params.n_source_nodes; ++i) {
      if (params.input_density >= 1.0 || unif(input_rng) < params.input_density) {
        task.x_clean(i, j) = normal(input_rng);
        active = true;
      }
    }
    if (!active) task.x_clean(any_source(input_rng), j) = normal(input_rng);
  }

  const SignalBatch x_batch = SignalBatch::wrap(task.x_clean, m, 1);
  task.y_clean = apply_filter(task.gt_filter, *task.closure, x_batch).data();

  std::mt19937_64 noise_rng = make_rng(seed, kNoiseSalt);
  task.x_obs = add_noise(task.x_clean, params.noise_power, params.per_signal_noise, noise_rng);
  task.y_obs = add_noise(task.y_clean, params.noise_power, params.per_signal_noise, noise_rng);

  task.split = split_indices(m, params.train_frac, params.val_frac, params.test_frac, seed);
  return task;
}

SourceIdTask gen_source_id(Dag dag, const SourceIdParams& params, std::uint64_t seed) {
  if (params.samples < 10) throw ParamError("gen_source_id: need at least 10 samples");

  SourceIdTask task;
  task.seed = seed;
  task.dag = std::move(dag);
  task.closure = std::make_shared<const ClosurePair>(transitive_closure(task.dag));
  task.gt_filter = random_filter(task.dag, params.gt_num_shifts, seed);
  const int n = task.dag.n;

  if (params.unobserved_fraction > 0.0) {
    const int count = static_cast<int>(std::llround(params.unobserved_fraction * n));
    if (count < 1) throw ParamError("gen_source_id: unobserved fraction selects no nodes");
    if (count >= n) throw ParamError("gen_source_id: candidate set exhausts the graph");
    std::mt19937_64 rng = make_rng(seed, kCandidateSalt);
    task.candidates = sample_without_replacement(n, count, rng);
  } else {
    task.candidates = params.candidates;
  }
  if (task.candidates.empty()) throw ParamError("gen_source_id: candidate set must be nonempty");
  if (static_cast<int>(task.candidates.size()) >= n) {
    throw ParamError("gen_source_id: candidate set exhausts the graph");
  }
  for (int c : task.candidates) {
    if (c < 0 || c >= n) throw ParamError("gen_source_id: candidate out of range");
  }

  // Diffused unit impulses from each candidate, computed once.
  const int classes = static_cast<int>(task.candidates.size());
  Mat impulses = Mat::Zero(n, classes);
  for (int c = 0; c < classes; ++c) impulses(task.candidates[c], c) = 1.0;
  const Mat responses =
      apply_filter(task.gt_filter, *task.closure, SignalBatch::wrap(impulses, classes, 1)).data();

  const int m = params.samples;
  std::mt19937_64 label_rng = make_rng(seed, kInputSalt);
  std::uniform_int_distribution<int> pick(0, classes - 1);
  task.labels.resize(m);
  task.y_clean.resize(n, m);
  for (int j = 0; j < m; ++j) {
    task.labels[j] = pick(label_rng);
    task.y_clean.col(j) = responses.col(task.labels[j]);
  }

  task.y_masked = task.y_clean;
  for (int c : task.candidates) task.y_masked.row(c).setZero();

  task.split = split_indices(m, params.train_frac, params.val_frac, params.test_frac, seed);
  return task;
}

namespace {

void write_dag_block(std::ostream& out, const Dag& dag) {
  out << "dag " << dag.n << " " << dag.edge_count() << "\n";
  for (int i = 0; i < dag.n; ++i) {
    for (int j = 0; j < i; ++j) {
      if (dag.adj(i, j) != 0.0) {
        out << dag.order[j] << " " << dag.order[i] << " " << dag.adj(i, j) << "\n";
      }
    }
  }
}

Dag read_dag_block(std::istream& in) {
  std::string tag;
  int n = 0, edges = 0;
  if (!(in >> tag >> n >> edges) || tag != "dag") throw IoError("dataset: expected dag block");
  Mat a = Mat::Zero(n, n);
  for (int e = 0; e < edges; ++e) {
    int src = 0, dst = 0;
    double w = 0.0;
    if (!(in >> src >> dst >> w)) throw IoError("dataset: truncated dag block");
    a(dst, src) = w;
  }
  return validate_dag(a);
}

void write_tensor(std::ostream& out, const char* name, const Mat& tensor) {
  out << "tensor " << name << " " << tensor.rows() << " " << tensor.cols() << "\n";
  for (long i = 0; i < tensor.rows(); ++i) {
    for (long j = 0; j < tensor.cols(); ++j) {
      out << tensor(i, j) << (j + 1 == tensor.cols() ? "" : " ");
    }
    out << "\n";
  }
}

Mat read_tensor(std::istream& in, const char* name) {
  std::string tag, got;
  long rows = 0, cols = 0;
  if (!(in >> tag >> got >> rows >> cols) || tag != "tensor" || got != name) {
    throw IoError(std::string("dataset: expected tensor ") + name);
  }
  Mat tensor(rows, cols);
  for (long i = 0; i < rows; ++i) {
    for (long j = 0; j < cols; ++j) {
      if (!(in >> tensor(i, j))) throw IoError("dataset: truncated tensor");
    }
  }
  return tensor;
}

void write_int_block(std::ostream& out, const char* name, const std::vector<int>& values) {
  out << name << " " << values.size();
  for (int v : values) out << " " << v;
  out << "\n";
}

std::vector<int> read_int_block(std::istream& in, const char* name) {
  std::string tag;
  std::size_t count = 0;
  if (!(in >> tag >> count) || tag != name) {
    throw IoError(std::string("dataset: expected block ") + name);
  }
  std::vector<int> values(count);
  for (auto& v : values) {
    if (!(in >> v)) throw IoError("dataset: truncated int block");
  }
  return values;
}

void write_filter_block(std::ostream& out, const DagFilter& filter) {
  write_int_block(out, "gt_shifts", filter.shifts.nodes);
  out << "gt_coeffs " << filter.coeffs.size();
  for (long i = 0; i < filter.coeffs.size(); ++i) out << " " << filter.coeffs[i];
  out << "\n";
}

DagFilter read_filter_block(std::istream& in, const Dag& dag) {
  DagFilter filter;
  filter.shifts = predecessor_masks(dag, read_int_block(in, "gt_shifts"));
  std::string tag;
  long count = 0;
  if (!(in >> tag >> count) || tag != "gt_coeffs") throw IoError("dataset: expected gt_coeffs");
  filter.coeffs.resize(count);
  for (long i = 0; i < count; ++i) {
    if (!(in >> filter.coeffs[i])) throw IoError("dataset: truncated gt_coeffs");
  }
  return filter;
}

void expect_end(std::istream& in) {
  std::string tag;
  if (!(in >> tag) || tag != "end") throw IoError("dataset: missing end marker");
}

}  // namespace

void save_diffusion(const DiffusionTask& task, std::ostream& out) {
  out << std::setprecision(17);
  out << "dagcn-dataset v1\n";
  out << "task diffusion\n";
  out << "seed " << task.seed << "\n";
  out << "noise_power " << task.noise_power << "\n";
  out << "n_source_nodes " << task.n_source_nodes << "\n";
  out << "input_density " << task.input_density << "\n";
  write_dag_block(out, task.dag);
  write_filter_block(out, task.gt_filter);
  write_tensor(out, "x_clean", task.x_clean);
  write_tensor(out, "x_obs", task.x_obs);
  write_tensor(out, "y_clean", task.y_clean);
  write_tensor(out, "y_obs", task.y_obs);
  write_int_block(out, "split_train", task.split.train);
  write_int_block(out, "split_val", task.split.val);
  write_int_block(out, "split_test", task.split.test);
  out << "end\n";
}

namespace {

void read_dataset_header(std::istream& in, const char* want_task) {
  std::string magic, version, tag, task_name;
  if (!(in >> magic >> version) || magic != "dagcn-dataset" || version != "v1") {
    throw IoError("dataset: bad header");
  }
  if (!(in >> tag >> task_name) || tag != "task" || task_name != want_task) {
    throw IoError(std::string("dataset: expected task ") + want_task);
  }
}

}  // namespace

DiffusionTask load_diffusion(std::istream& in) {
  read_dataset_header(in, "diffusion");
  DiffusionTask task;
  std::string tag;
  if (!(in >> tag >> task.seed) || tag != "seed") throw IoError("dataset: expected seed");
  if (!(in >> tag >> task.noise_power) || tag != "noise_power") {
    throw IoError("dataset: expected noise_power");
  }
  if (!(in >> tag >> task.n_source_nodes) || tag != "n_source_nodes") {
    throw IoError("dataset: expected n_source_nodes");
  }
  if (!(in >> tag >> task.input_density) || tag != "input_density") {
    throw IoError("dataset: expected input_density");
  }
  task.dag = read_dag_block(in);
  task.closure = std::make_shared<const ClosurePair>(transitive_closure(task.dag));
  task.gt_filter = read_filter_block(in, task.dag);
  task.x_clean = read_tensor(in, "x_clean");
  task.x_obs = read_tensor(in, "x_obs");
  task.y_clean = read_tensor(in, "y_clean");
  task.y_obs = read_tensor(in, "y_obs");
  task.split.train = read_int_block(in, "split_train");
  task.split.val = read_int_block(in, "split_val");
  task.split.test = read_int_block(in, "split_test");
  expect_end(in);
  return task;
}

void save_source_id(const SourceIdTask& task, std::ostream& out) {
  out << std::setprecision(17);
  out << "dagcn-dataset v1\n";
  out << "task source-id\n";
  out << "seed " << task.seed << "\n";
  write_dag_block(out, task.dag);
  write_filter_block(out, task.gt_filter);
  write_int_block(out, "candidates", task.candidates);
  write_int_block(out, "labels", task.labels);
  write_tensor(out, "y_clean", task.y_clean);
  write_tensor(out, "y_masked", task.y_masked);
  write_int_block(out, "split_train", task.split.train);
  write_int_block(out, "split_val", task.split.val);
  write_int_block(out, "split_test", task.split.test);
  out << "end\n";
}

SourceIdTask load_source_id(std::istream& in) {
  read_dataset_header(in, "source-id");
  SourceIdTask task;
  std::string tag;
  if (!(in >> tag >> task.seed) || tag != "seed") throw IoError("dataset: expected seed");
  task.dag = read_dag_block(in);
  task.closure = std::make_shared<const ClosurePair>(transitive_closure(task.dag));
  task.gt_filter = read_filter_block(in, task.dag);
  task.candidates = read_int_block(in, "candidates");
  task.labels = read_int_block(in, "labels");
  task.y_clean = read_tensor(in, "y_clean");
  task.y_masked = read_tensor(in, "y_masked");
  task.split.train = read_int_block(in, "split_train");
  task.split.val = read_int_block(in, "split_val");
  task.split.test = read_int_block(in, "split_test");
  expect_end(in);
  return task;
}

}  // namespace dagcn::synth
