#include "tslto_cli/run_config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace tslto::cli {

namespace {

std::string fmt(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

template <class T>
std::string fmt_list(const T& values) {
  std::string out;
  for (const auto& v : values) {
    if (!out.empty()) out += ',';
    out += fmt(static_cast<double>(v));
  }
  return out;
}

std::string trim(std::string_view s) {
  auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<KeyInfo> build_keys() {
  const SolverConfig solver;
  const SyntheticSpec data;
  const RankCriterion rank;
  const ScaleTransform scale;
  return {
      {"seed", "0", "random seed for data generation"},
      {"out", "out", "output directory"},
      // synthetic data
      {"dims", fmt_list(data.dims), "tensor dimensions D1,D2,D3"},
      {"core_ranks", fmt_list(data.core_ranks), "Tucker ranks of the generated low-rank part"},
      {"core_low", fmt(data.core_low), "lower bound of the uniform core entries"},
      {"core_high", fmt(data.core_high), "upper bound of the uniform core entries"},
      {"distinctive_rows", std::to_string(data.distinctive_rows),
       "rows redrawn in each generated factor"},
      {"block_count", std::to_string(data.blocks.count), "number of anomaly blocks"},
      {"block_rows", std::to_string(data.blocks.rows), "rows per anomaly block"},
      {"block_cols", std::to_string(data.blocks.cols), "mode-1 unfolding columns per block"},
      {"anomaly_mean", fmt(data.blocks.mean), "mean of anomaly values"},
      {"anomaly_variance", fmt(data.blocks.variance), "variance of anomaly values"},
      {"missing_rate", fmt(data.missing_rate), "fraction of entries hidden from the solver"},
      // solver
      {"beta", fmt(solver.beta), "weight of the Tucker fit"},
      {"lambda", fmt_list(solver.lambda), "group sparsity weights on factor differences"},
      {"mu1", fmt(solver.mu1), "sparsity weight on the anomaly tensor"},
      {"mu2", fmt(solver.mu2), "sparsity weight on anomaly block differences"},
      {"alpha", fmt_list(solver.alpha), "initial penalties for factor differences"},
      {"gamma", fmt(solver.gamma), "initial penalty for anomaly differences"},
      {"s", fmt(solver.s), "initial penalty for the X = L + R split"},
      {"growth", fmt(solver.growth), "per-iteration penalty growth factor"},
      {"penalty_cap", fmt(solver.penalty_cap), "upper bound for every penalty"},
      {"epsilon", fmt(solver.epsilon), "relative-change convergence tolerance"},
      {"ranks", fmt_list(solver.ranks), "Tucker ranks used by the solver"},
      {"max_outer", std::to_string(solver.max_outer), "outer iteration limit"},
      {"max_inner", std::to_string(solver.max_inner), "Stiefel iteration limit per factor"},
      {"prox_lambda0", fmt(solver.prox_lambda0), "initial anomaly step (0 selects 1/s)"},
      {"prox_rho", fmt(solver.prox_rho), "backtracking factor of the anomaly step"},
      // inputs
      {"data_dir", "", "directory written by `generate`; supplies default input paths"},
      {"observed", "", "observed tensor (default data_dir/observed.tsr3)"},
      {"mask", "", "observation mask (default data_dir/observed_mask.tsr3)"},
      {"truth", "", "complete tensor (default data_dir/full.tsr3)"},
      {"anomaly_truth", "", "true anomaly mask (default data_dir/anomaly_mask.tsr3)"},
      {"result_dir", "", "directory written by `solve`; supplies default estimate paths"},
      {"recovered", "", "recovered tensor (default result_dir/recovered.tsr3)"},
      {"anomaly", "", "estimated anomaly tensor (default result_dir/anomaly.tsr3)"},
      // evaluation
      {"scope", "missing", "imputation scope: missing | all | non-anomalous"},
      {"detection", "entry", "detection counting: entry | block"},
      {"threshold", "0", "|R| above this counts as detected"},
      // preprocessing
      {"op", "select-rank", "preprocess operation: select-rank | smooth | scale | revert | ingest"},
      {"input", "", "input tensor for `preprocess`"},
      {"theta", fmt(rank.theta), "energy fraction for rank selection"},
      {"smooth_ranks", "", "ranks for smoothing (empty selects them from theta)"},
      {"scale_shift", fmt(scale.shift), "shift subtracted before scaling"},
      {"scale_core", fmt(scale.core_scale), "multiplier applied to the core"},
      {"scale_ranks", fmt_list(scale.ranks), "Tucker ranks of the scale transform"},
      // ablation and grid search
      {"variants", "a,b,c,d,e,f,g,full", "ablation variants to run"},
      {"grid_x", "beta", "first grid key"},
      {"grid_x_values", "", "comma-separated values of the first grid key"},
      {"grid_y", "lambda", "second grid key (empty for a 1-D grid)"},
      {"grid_y_values", "", "comma-separated values of the second grid key"},
      {"grid_missing_rates", "0.3", "missing rates crossed with the grid"},
      {"grid_cap", "1000", "maximum number of grid cells"},
      {"jobs", "1", "concurrent grid cells (TSLTO_JOBS sets the default)"},
  };
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* want) {
  throw UsageError("config key '" + key + "': expected " + want + ", got '" + value + "'");
}

double parse_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) bad_value(key, text, "a number");
  return v;
}

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> out;
  if (trim(text).empty()) return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

}  // namespace

const std::vector<KeyInfo>& config_keys() {
  static const std::vector<KeyInfo> keys = build_keys();
  return keys;
}

bool is_config_key(const std::string& name) {
  const auto& keys = config_keys();
  return std::any_of(keys.begin(), keys.end(), [&](const KeyInfo& k) { return k.name == name; });
}

RunConfig::RunConfig() {
  for (const KeyInfo& k : config_keys()) values_[k.name] = k.default_value;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  if (!is_config_key(key)) throw UsageError("unknown config key '" + key + "'");
  values_[key] = trim(value);
}

void RunConfig::merge_text(std::istream& in, const std::string& source) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError(source + ":" + std::to_string(lineno) + ": expected key=value");
    }
    const std::string key = trim(std::string_view(line).substr(0, eq));
    if (!is_config_key(key)) {
      throw UsageError(source + ":" + std::to_string(lineno) + ": unknown config key '" + key +
                       "'");
    }
    values_[key] = trim(std::string_view(line).substr(eq + 1));
  }
}

void RunConfig::merge_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file " + path.string());
  merge_text(in, path.string());
}

const std::string& RunConfig::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw std::logic_error("unregistered config key '" + key + "'");
  return it->second;
}

double RunConfig::get_double(const std::string& key) const { return parse_double(key, get(key)); }

long long RunConfig::get_int(const std::string& key) const {
  const std::string& text = get(key);
  long long v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    bad_value(key, text, "an integer");
  }
  return v;
}

bool RunConfig::get_bool(const std::string& key) const {
  std::string t = get(key);
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "1" || t == "true" || t == "yes" || t == "on") return true;
  if (t == "0" || t == "false" || t == "no" || t == "off") return false;
  bad_value(key, get(key), "a boolean");
}

std::vector<std::string> RunConfig::get_strings(const std::string& key) const {
  return split_commas(get(key));
}

std::vector<double> RunConfig::get_doubles(const std::string& key) const {
  std::vector<double> out;
  for (const std::string& item : split_commas(get(key))) out.push_back(parse_double(key, item));
  return out;
}

std::array<double, 3> RunConfig::get_triple(const std::string& key) const {
  const std::vector<double> v = get_doubles(key);
  if (v.size() == 1) return {v[0], v[0], v[0]};
  if (v.size() != 3) bad_value(key, get(key), "one or three comma-separated numbers");
  return {v[0], v[1], v[2]};
}

std::array<Index, 3> RunConfig::get_index_triple(const std::string& key) const {
  const std::array<double, 3> v = get_triple(key);
  std::array<Index, 3> out{};
  for (int i = 0; i < 3; ++i) {
    if (v[i] != static_cast<double>(static_cast<Index>(v[i]))) {
      bad_value(key, get(key), "integers");
    }
    out[i] = static_cast<Index>(v[i]);
  }
  return out;
}

std::filesystem::path RunConfig::get_path(const std::string& key) const { return get(key); }

SolverConfig RunConfig::solver_config() const {
  SolverConfig c;
  c.beta = get_double("beta");
  c.lambda = get_triple("lambda");
  c.mu1 = get_double("mu1");
  c.mu2 = get_double("mu2");
  c.alpha = get_triple("alpha");
  c.gamma = get_double("gamma");
  c.s = get_double("s");
  c.growth = get_double("growth");
  c.penalty_cap = get_double("penalty_cap");
  c.epsilon = get_double("epsilon");
  c.ranks = get_index_triple("ranks");
  c.max_outer = static_cast<int>(get_int("max_outer"));
  c.max_inner = static_cast<int>(get_int("max_inner"));
  c.prox_lambda0 = get_double("prox_lambda0");
  c.prox_rho = get_double("prox_rho");
  c.seed = static_cast<std::uint64_t>(get_int("seed"));
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return c;
}

SyntheticSpec RunConfig::synthetic_spec() const {
  SyntheticSpec s;
  s.dims = get_index_triple("dims");
  s.core_ranks = get_index_triple("core_ranks");
  s.core_low = get_double("core_low");
  s.core_high = get_double("core_high");
  s.distinctive_rows = static_cast<Index>(get_int("distinctive_rows"));
  s.blocks.count = static_cast<Index>(get_int("block_count"));
  s.blocks.rows = static_cast<Index>(get_int("block_rows"));
  s.blocks.cols = static_cast<Index>(get_int("block_cols"));
  s.blocks.mean = get_double("anomaly_mean");
  s.blocks.variance = get_double("anomaly_variance");
  s.missing_rate = get_double("missing_rate");
  const long long seed = get_int("seed");
  if (seed < 0) bad_value("seed", get("seed"), "a non-negative integer");
  s.seed = static_cast<std::uint64_t>(seed);
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return s;
}

EvalScope RunConfig::scope() const {
  try {
    return parse_scope(get("scope"));
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

DetectionRule RunConfig::detection_rule() const {
  DetectionRule rule;
  try {
    rule.mode = parse_detection_mode(get("detection"));
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  rule.threshold = get_double("threshold");
  if (!(rule.threshold >= 0.0)) bad_value("threshold", get("threshold"), "a value >= 0");
  return rule;
}

void RunConfig::write(std::ostream& out) const {
  for (const KeyInfo& k : config_keys()) out << k.name << '=' << get(k.name) << '\n';
}

void RunConfig::write(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write(out);
}

}  // namespace tslto::cli
