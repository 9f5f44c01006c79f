#include "dagcn/exp/config.hpp"

#include <algorithm>
#include <cctype>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "dagcn/types.hpp"

namespace dagcn::exp {

namespace {

std::string fmt_double(double v) {
  std::ostringstream out;
  out << std::setprecision(17) << v;
  return out.str();
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ParamError("config: bad numeric value for '" + key + "': " + value);
  }
}

long long parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ParamError("config: bad integer value for '" + key + "': " + value);
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "1" || value == "true") return true;
  if (value == "0" || value == "false") return false;
  throw ParamError("config: bad boolean value for '" + key + "': " + value);
}

std::string trim(const std::string& s) {
  std::size_t begin = 0, end = s.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
  return s.substr(begin, end - begin);
}

}  // namespace

std::vector<std::pair<std::string, std::string>> ExperimentConfig::to_key_values() const {
  return {
      {"task", task},
      {"model", model},
      {"n", std::to_string(n)},
      {"p", fmt_double(p)},
      {"weight_law", weight_law},
      {"weight_lo", fmt_double(weight_lo)},
      {"weight_hi", fmt_double(weight_hi)},
      {"dense_threshold", std::to_string(dense_threshold)},
      {"m", std::to_string(m)},
      {"noise", fmt_double(noise)},
      {"n_source_nodes", std::to_string(n_source_nodes)},
      {"input_density", fmt_double(input_density)},
      {"gt_num_shifts", std::to_string(gt_num_shifts)},
      {"unobserved_fraction", fmt_double(unobserved_fraction)},
      {"per_signal_noise", per_signal_noise ? "1" : "0"},
      {"train_frac", fmt_double(train_frac)},
      {"val_frac", fmt_double(val_frac)},
      {"test_frac", fmt_double(test_frac)},
      {"hidden", std::to_string(hidden)},
      {"conv_layers", std::to_string(conv_layers)},
      {"fb_order", std::to_string(fb_order)},
      {"mlp_hidden", std::to_string(mlp_hidden)},
      {"lr", fmt_double(lr)},
      {"max_epochs", std::to_string(max_epochs)},
      {"patience", std::to_string(patience)},
      {"batch_size", std::to_string(batch_size)},
      {"ridge", fmt_double(ridge)},
      {"ls_all_nodes", ls_all_nodes ? "1" : "0"},
      {"realizations", std::to_string(realizations)},
      {"base_seed", std::to_string(base_seed)},
      {"workers", std::to_string(workers)},
      {"out_dir", out_dir},
  };
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  if (key == "task") task = value;
  else if (key == "model") model = value;
  else if (key == "n") n = static_cast<int>(parse_int(key, value));
  else if (key == "p") p = parse_double(key, value);
  else if (key == "weight_law") weight_law = value;
  else if (key == "weight_lo") weight_lo = parse_double(key, value);
  else if (key == "weight_hi") weight_hi = parse_double(key, value);
  else if (key == "dense_threshold") dense_threshold = static_cast<int>(parse_int(key, value));
  else if (key == "m") m = static_cast<int>(parse_int(key, value));
  else if (key == "noise") noise = parse_double(key, value);
  else if (key == "n_source_nodes") n_source_nodes = static_cast<int>(parse_int(key, value));
  else if (key == "input_density") input_density = parse_double(key, value);
  else if (key == "gt_num_shifts") gt_num_shifts = static_cast<int>(parse_int(key, value));
  else if (key == "unobserved_fraction") unobserved_fraction = parse_double(key, value);
  else if (key == "per_signal_noise") per_signal_noise = parse_bool(key, value);
  else if (key == "train_frac") train_frac = parse_double(key, value);
  else if (key == "val_frac") val_frac = parse_double(key, value);
  else if (key == "test_frac") test_frac = parse_double(key, value);
  else if (key == "hidden") hidden = static_cast<int>(parse_int(key, value));
  else if (key == "conv_layers") conv_layers = static_cast<int>(parse_int(key, value));
  else if (key == "fb_order") fb_order = static_cast<int>(parse_int(key, value));
  else if (key == "mlp_hidden") mlp_hidden = static_cast<int>(parse_int(key, value));
  else if (key == "lr") lr = parse_double(key, value);
  else if (key == "max_epochs") max_epochs = static_cast<int>(parse_int(key, value));
  else if (key == "patience") patience = static_cast<int>(parse_int(key, value));
  else if (key == "batch_size") batch_size = static_cast<int>(parse_int(key, value));
  else if (key == "ridge") ridge = parse_double(key, value);
  else if (key == "ls_all_nodes") ls_all_nodes = parse_bool(key, value);
  else if (key == "realizations") realizations = static_cast<int>(parse_int(key, value));
  else if (key == "base_seed") base_seed = static_cast<std::uint64_t>(parse_int(key, value));
  else if (key == "workers") workers = static_cast<int>(parse_int(key, value));
  else if (key == "out_dir") out_dir = value;
  else throw ParamError("config: unknown key '" + key + "'");
}

void ExperimentConfig::validate() const {
  if (task != "diffusion" && task != "source-id") {
    throw ParamError("config: task must be diffusion or source-id");
  }
  parse_method(model);
  if (n < 1) throw ParamError("config: n must be >= 1");
  if (p < 0.0 || p > 1.0) throw ParamError("config: p must lie in [0, 1]");
  if (weight_law != "uniform" && weight_law != "unit") {
    throw ParamError("config: weight_law must be uniform or unit");
  }
  if (m < 10) throw ParamError("config: m must be >= 10");
  if (noise < 0.0) throw ParamError("config: noise must be >= 0");
  if (realizations < 1) throw ParamError("config: realizations must be >= 1");
  if (!(lr > 0.0)) throw ParamError("config: lr must be positive");
  if (patience > max_epochs) throw ParamError("config: patience must not exceed max_epochs");
  if (!(input_density > 0.0 && input_density <= 1.0)) {
    throw ParamError("config: input_density must lie in (0, 1]");
  }
  if (gt_num_shifts < 1 || gt_num_shifts > n) {
    throw ParamError("config: gt_num_shifts out of range");
  }
  if (unobserved_fraction < 0.0 || unobserved_fraction >= 1.0) {
    if (unobserved_fraction != 0.0) {
      throw ParamError("config: unobserved_fraction must lie in (0, 1) or be 0");
    }
  }
}

void save_config(const ExperimentConfig& config, std::ostream& out) {
  out << "# dagcn experiment configuration\n";
  for (const auto& [key, value] : config.to_key_values()) {
    out << key << " = " << value << "\n";
  }
}

ExperimentConfig load_config(std::istream& in) {
  ExperimentConfig config;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos) {
      std::ostringstream msg;
      msg << "config: line " << line_no << " is not `key = value`";
      throw ParamError(msg.str());
    }
    config.set(trim(stripped.substr(0, eq)), trim(stripped.substr(eq + 1)));
  }
  return config;
}

MethodId parse_method(const std::string& name) {
  MethodId id;
  std::string base = name;
  if (base.size() > 2 && base.compare(base.size() - 2, 2, "-t") == 0) {
    id.transposed = true;
    base = base.substr(0, base.size() - 2);
  }
  if (base == "ls" || base == "fb-gcnn" || base == "gcn" || base == "mlp" || base == "dcn") {
    id.family = base;
    return id;
  }
  if (base.rfind("dcn-", 0) == 0) {
    const std::string count = base.substr(4);
    if (!count.empty() && std::all_of(count.begin(), count.end(), [](unsigned char c) {
          return std::isdigit(c);
        })) {
      id.family = "dcn";
      id.num_shifts = std::stoi(count);
      if (id.num_shifts < 1) throw ParamError("parse_method: shift count must be >= 1");
      return id;
    }
  }
  throw ParamError("parse_method: unknown model '" + name + "'");
}

}  // namespace dagcn::exp
