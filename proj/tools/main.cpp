// dagcn: DAG convolutional network experiments.
//
// Subcommands:
//   show-config        print the effective configuration
//   gen-graph          sample a random DAG and write its edge list
//   gen-data           generate a synthetic task and archive it
//   train              train one model on an archived task, save a checkpoint
//   eval               evaluate a checkpoint on an archived task
//   table1             per-method aggregate metrics for one or both tasks
//   sweep-noise        diffusion NMSE across noise powers
//   sweep-unobserved   source-id accuracy across unobserved-node fractions
//   sweep-density      source-id accuracy across edge probabilities
//
// Any ExperimentConfig key is available both as a --flag and through
// --config <file> (flags win). Seeds make every run reproducible.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "dagcn/exp/csv.hpp"
#include "dagcn/exp/runner.hpp"
#include "dagcn/models/build.hpp"
#include "dagcn/models/ls.hpp"
#include "dagcn/rng.hpp"

using namespace dagcn;
using exp::ExperimentConfig;

namespace {

void add_config_options(CLI::App* cmd, ExperimentConfig& config) {
  cmd->set_config("--config", "", "Read options from a key = value file");
  cmd->add_option("--task", config.task, "diffusion | source-id");
  cmd->add_option("--model", config.model, "dcn[-<count>][-t] | ls | fb-gcnn[-t] | gcn[-t] | mlp");
  cmd->add_option("--n", config.n, "Node count");
  cmd->add_option("--p", config.p, "Edge probability");
  cmd->add_option("--weight_law", config.weight_law, "uniform | unit");
  cmd->add_option("--weight_lo", config.weight_lo, "Weight magnitude lower bound");
  cmd->add_option("--weight_hi", config.weight_hi, "Weight magnitude upper bound");
  cmd->add_option("--dense_threshold", config.dense_threshold,
                  "Max node count for dense closure storage");
  cmd->add_option("--m", config.m, "Sample count");
  cmd->add_option("--noise", config.noise, "Normalized observation noise power");
  cmd->add_option("--n_source_nodes", config.n_source_nodes, "Input support / candidate count");
  cmd->add_option("--input_density", config.input_density,
                  "Diffusion: per-sample source activation probability");
  cmd->add_option("--gt_num_shifts", config.gt_num_shifts, "Ground-truth filter |U|");
  cmd->add_option("--unobserved_fraction", config.unobserved_fraction,
                  "Source-id: random unobserved fraction (0 = first nodes)");
  cmd->add_option("--per_signal_noise", config.per_signal_noise,
                  "Tie noise power to each signal (else global average)");
  cmd->add_option("--train_frac", config.train_frac, "Training fraction");
  cmd->add_option("--val_frac", config.val_frac, "Validation fraction");
  cmd->add_option("--test_frac", config.test_frac, "Test fraction");
  cmd->add_option("--hidden", config.hidden, "Hidden feature width");
  cmd->add_option("--conv_layers", config.conv_layers, "Convolutional layer count");
  cmd->add_option("--fb_order", config.fb_order, "FB-GCNN filter order R");
  cmd->add_option("--mlp_hidden", config.mlp_hidden, "MLP hidden width");
  cmd->add_option("--lr", config.lr, "Adam learning rate");
  cmd->add_option("--max_epochs", config.max_epochs, "Epoch budget");
  cmd->add_option("--patience", config.patience, "Early-stopping patience");
  cmd->add_option("--batch_size", config.batch_size, "Minibatch size (0 = full batch)");
  cmd->add_option("--ridge", config.ridge, "LS ridge coefficient");
  cmd->add_option("--ls_all_nodes", config.ls_all_nodes, "LS regresses over every shift");
  cmd->add_option("--realizations", config.realizations, "Independent realizations");
  cmd->add_option("--base_seed", config.base_seed, "Base RNG seed");
  cmd->add_option("--workers", config.workers, "Worker threads (0 = hardware)");
  cmd->add_option("--out_dir", config.out_dir, "CSV output directory");
}

void print_report_line(const exp::MetricReport& report) {
  const exp::SummaryStats stats = report.stats();
  const exp::SummaryStats seconds = exp::summarize(report.ok_seconds());
  std::cout << report.task << "  " << report.model;
  if (!report.sweep_param.empty()) {
    std::cout << "  " << report.sweep_param << "=" << report.sweep_value;
  }
  std::cout << "  " << report.metric_name << " = " << stats.mean << " +- " << stats.stddev
            << "  (" << stats.count << "/" << report.rows.size() << " ok, "
            << seconds.mean << " s/train)\n";
}

std::vector<std::string> default_methods(const std::string& task) {
  if (task == "diffusion") return {"dcn", "dcn-10", "ls"};
  return {"dcn-t", "dcn-30-t", "dcn"};
}

int run_table(ExperimentConfig config, std::vector<std::string> methods) {
  if (methods.empty()) methods = default_methods(config.task);
  std::vector<exp::MetricReport> reports;
  for (const std::string& method : methods) {
    ExperimentConfig method_config = config;
    method_config.model = method;
    reports.push_back(exp::run_experiment(method_config));
  }
  std::cout << "\n== " << config.task << " ==\n";
  for (const auto& report : reports) print_report_line(report);
  return 0;
}

// Dataset archives are self-describing; peek at the task line.
std::string archive_task(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset " + path);
  std::string magic, version, tag, task;
  if (!(in >> magic >> version >> tag >> task) || tag != "task") {
    throw IoError("not a dagcn dataset: " + path);
  }
  return task;
}

int run_train(const ExperimentConfig& config, const std::string& data_path,
              const std::string& ckpt_path) {
  const std::string task = archive_task(data_path);
  std::ifstream in(data_path);
  nn::TrainConfig train_config;
  train_config.lr = config.lr;
  train_config.max_epochs = config.max_epochs;
  train_config.patience = config.patience;
  train_config.batch_size = config.batch_size;
  train_config.seed = mix_seed(config.base_seed, 0x747261ULL);

  if (task == "diffusion") {
    const synth::DiffusionTask data = synth::load_diffusion(in);
    nn::Model model = models::build_model(
        exp::spec_from_config(config, data.dag.n, config.base_seed), data.dag, data.closure);
    train_config.loss = nn::LossKind::kMse;
    const nn::TrainHistory history =
        nn::train(model, exp::diffusion_batch(data, data.split.train),
                  exp::diffusion_batch(data, data.split.val), train_config);
    std::cout << "epochs " << history.train_loss.size() << "  best_val " << history.best_val
              << "  seconds " << history.seconds << "\n";
    std::cout << "test nmse " << exp::evaluate_diffusion(model, data) << "\n";
    if (!ckpt_path.empty()) {
      std::ofstream out(ckpt_path);
      if (!out) throw IoError("cannot write checkpoint " + ckpt_path);
      models::save_checkpoint(model, out);
    }
    return 0;
  }

  const synth::SourceIdTask data = synth::load_source_id(in);
  nn::ModelSpec spec = exp::spec_from_config(config, data.dag.n, config.base_seed);
  spec.classifier = true;
  spec.candidates = data.candidates;
  nn::Model model = models::build_model(spec, data.dag, data.closure);
  train_config.loss = nn::LossKind::kCrossEntropy;
  const nn::TrainHistory history =
      nn::train(model, exp::source_batch(data, data.split.train),
                exp::source_batch(data, data.split.val), train_config);
  std::cout << "epochs " << history.train_loss.size() << "  best_val " << history.best_val
            << "  seconds " << history.seconds << "\n";
  std::cout << "test accuracy " << exp::evaluate_source_id(model, data) << "\n";
  if (!ckpt_path.empty()) {
    std::ofstream out(ckpt_path);
    if (!out) throw IoError("cannot write checkpoint " + ckpt_path);
    models::save_checkpoint(model, out);
  }
  return 0;
}

int run_eval(const std::string& data_path, const std::string& ckpt_path) {
  const std::string task = archive_task(data_path);
  std::ifstream data_in(data_path);
  std::ifstream ckpt_in(ckpt_path);
  if (!ckpt_in) throw IoError("cannot open checkpoint " + ckpt_path);

  if (task == "diffusion") {
    const synth::DiffusionTask data = synth::load_diffusion(data_in);
    nn::Model model = models::load_checkpoint(ckpt_in, data.dag, data.closure);
    std::cout << "test nmse " << exp::evaluate_diffusion(model, data) << "\n";
    return 0;
  }
  const synth::SourceIdTask data = synth::load_source_id(data_in);
  nn::Model model = models::load_checkpoint(ckpt_in, data.dag, data.closure);
  std::cout << "test accuracy " << exp::evaluate_source_id(model, data) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DAG convolutional network experiments"};
  app.require_subcommand(1);

  ExperimentConfig config;
  std::string out_path, data_path, ckpt_path;
  std::vector<std::string> methods;
  std::vector<double> grid;

  CLI::App* show = app.add_subcommand("show-config", "Print the effective configuration");
  add_config_options(show, config);

  CLI::App* gen_graph = app.add_subcommand("gen-graph", "Sample a DAG and write its edge list");
  add_config_options(gen_graph, config);
  gen_graph->add_option("--out", out_path, "Edge-list path")->required();

  CLI::App* gen_data = app.add_subcommand("gen-data", "Generate and archive a synthetic task");
  add_config_options(gen_data, config);
  gen_data->add_option("--out", out_path, "Dataset archive path")->required();

  CLI::App* train_cmd = app.add_subcommand("train", "Train one model on an archived task");
  add_config_options(train_cmd, config);
  train_cmd->add_option("--data", data_path, "Dataset archive path")->required();
  train_cmd->add_option("--out", ckpt_path, "Checkpoint path");

  CLI::App* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint on an archived task");
  eval_cmd->add_option("--data", data_path, "Dataset archive path")->required();
  eval_cmd->add_option("--ckpt", ckpt_path, "Checkpoint path")->required();

  CLI::App* table = app.add_subcommand("table1", "Aggregate metrics per method");
  add_config_options(table, config);
  table->add_option("--methods", methods, "Methods to run")->delimiter(',');
  bool both_tasks = false;
  table->add_flag("--both", both_tasks, "Run the diffusion and source-id method sets");

  CLI::App* sweep_noise = app.add_subcommand("sweep-noise", "Diffusion NMSE vs noise power");
  add_config_options(sweep_noise, config);
  sweep_noise->add_option("--methods", methods, "Methods to sweep")->delimiter(',');
  sweep_noise->add_option("--grid", grid, "Noise powers")->delimiter(',');

  CLI::App* sweep_unobs =
      app.add_subcommand("sweep-unobserved", "Source-id accuracy vs unobserved fraction");
  add_config_options(sweep_unobs, config);
  sweep_unobs->add_option("--methods", methods, "Methods to sweep")->delimiter(',');
  sweep_unobs->add_option("--grid", grid, "Unobserved fractions")->delimiter(',');

  CLI::App* sweep_density =
      app.add_subcommand("sweep-density", "Source-id accuracy vs edge probability");
  add_config_options(sweep_density, config);
  sweep_density->add_option("--methods", methods, "Methods to sweep")->delimiter(',');
  sweep_density->add_option("--grid", grid, "Edge probabilities")->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  try {
    if (show->parsed()) {
      exp::save_config(config, std::cout);
      return 0;
    }
    if (gen_graph->parsed()) {
      const Dag dag =
          sample_er_dag(config.n, config.p, exp::weight_law_from(config), config.base_seed);
      std::ofstream out(out_path);
      if (!out) throw IoError("cannot write " + out_path);
      save_dag(dag, out);
      std::cout << "wrote " << out_path << " (" << dag.n << " nodes, " << dag.edge_count()
                << " edges)\n";
      return 0;
    }
    if (gen_data->parsed()) {
      config.validate();
      Dag dag = sample_er_dag(config.n, config.p, exp::weight_law_from(config), config.base_seed);
      std::ofstream out(out_path);
      if (!out) throw IoError("cannot write " + out_path);
      if (config.task == "diffusion") {
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
        synth::save_diffusion(synth::gen_diffusion(std::move(dag), params, config.base_seed), out);
      } else {
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
        synth::save_source_id(synth::gen_source_id(std::move(dag), params, config.base_seed), out);
      }
      std::cout << "wrote " << out_path << "\n";
      return 0;
    }
    if (train_cmd->parsed()) return run_train(config, data_path, ckpt_path);
    if (eval_cmd->parsed()) return run_eval(data_path, ckpt_path);
    if (table->parsed()) {
      if (both_tasks) {
        ExperimentConfig diffusion = config;
        diffusion.task = "diffusion";
        run_table(diffusion, methods);
        ExperimentConfig source = config;
        source.task = "source-id";
        return run_table(source, methods);
      }
      return run_table(config, methods);
    }
    if (sweep_noise->parsed()) {
      config.task = "diffusion";
      if (grid.empty()) grid = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
      if (methods.empty()) methods = {"dcn", "ls"};
      for (const auto& report : exp::run_sweep(config, "noise", grid, methods)) {
        print_report_line(report);
      }
      return 0;
    }
    if (sweep_unobs->parsed()) {
      config.task = "source-id";
      if (grid.empty()) grid = {0.1, 0.3, 0.5, 0.7, 0.9};
      if (methods.empty()) methods = {"dcn-t", "dcn-30-t", "dcn-20-t", "dcn-10-t"};
      for (const auto& report :
           exp::run_sweep(config, "unobserved_fraction", grid, methods)) {
        print_report_line(report);
      }
      return 0;
    }
    if (sweep_density->parsed()) {
      config.task = "source-id";
      if (grid.empty()) grid = {0.1, 0.3, 0.5, 0.7};
      if (methods.empty()) methods = {"dcn-t", "fb-gcnn-t"};
      for (const auto& report : exp::run_sweep(config, "p", grid, methods)) {
        print_report_line(report);
      }
      return 0;
    }
  } catch (const ParamError& e) {
    std::cerr << "parameter error: " << e.what() << "\n";
    return 2;
  } catch (const ShapeError& e) {
    std::cerr << "shape error: " << e.what() << "\n";
    return 2;
  } catch (const AcyclicityError& e) {
    std::cerr << "acyclicity error: " << e.what() << "\n";
    return 3;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 4;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 5;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
