#include "tslto_cli/commands.hpp"

#include "tslto/io.hpp"

#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace tslto::cli {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

fs::path prepare_out(const RunConfig& cfg) {
  fs::path out = cfg.get_path("out");
  if (out.empty()) throw UsageError("config key 'out' must not be empty");
  fs::create_directories(out);
  cfg.write(out / "config.resolved");
  return out;
}

fs::path input_path(const RunConfig& cfg, const std::string& key, const std::string& dir_key,
                    const char* file_name) {
  if (!cfg.get(key).empty()) return cfg.get_path(key);
  if (!cfg.get(dir_key).empty()) return cfg.get_path(dir_key) / file_name;
  throw UsageError("set '" + key + "' or '" + dir_key + "'");
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += (c == '\n') ? ' ' : c;
  }
  return out + '"';
}

std::string optional_number(const std::optional<double>& v) {
  return v ? format_number(*v) : std::string();
}

void write_trace(const fs::path& path, const std::vector<IterationRecord>& trace) {
  std::ofstream out = open_output(path);
  out << "iter,objective,change_recovered,change_core,change_lowrank,change_anomaly,"
         "residual_factor1,residual_factor2,residual_factor3,residual_anomaly_diff,"
         "residual_split,s,prox_step\n";
  for (const IterationRecord& r : trace) {
    out << r.iter << ',' << format_number(r.objective) << ',' << format_number(r.changes.recovered)
        << ',' << format_number(r.changes.core) << ',' << format_number(r.changes.lowrank) << ','
        << format_number(r.changes.anomaly);
    for (double f : r.residuals.factor_diff) out << ',' << format_number(f);
    out << ',' << format_number(r.residuals.anomaly_diff) << ','
        << format_number(r.residuals.split) << ',' << format_number(r.s) << ','
        << format_number(r.prox_step) << '\n';
  }
}

void log_evaluation(std::ostream& log, const Evaluation& e) {
  const auto& m = e.imputation;
  const auto& d = e.detection;
  log << "  precision " << d.precision << "  recall " << d.recall << "  F1 " << d.f1 << '\n'
      << "  RMSE " << m.rmse << "  MAE " << m.mae << "  MAPE "
      << (m.mape ? format_number(*m.mape) + "%" : std::string("n/a")) << "  (" << m.count
      << " entries)\n";
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::string metrics_csv_header() {
  return "scope,count,rmse,mae,mape,mape_skipped,detection,threshold,precision,recall,f1,tp,fp,fn";
}

std::string metrics_csv_row(const Evaluation& e, EvalScope scope, const DetectionRule& rule) {
  const auto& m = e.imputation;
  const auto& d = e.detection;
  std::ostringstream row;
  row << to_string(scope) << ',' << m.count << ',' << format_number(m.rmse) << ','
      << format_number(m.mae) << ',' << optional_number(m.mape) << ',' << m.mape_skipped << ','
      << to_string(rule.mode) << ',' << format_number(rule.threshold) << ','
      << format_number(d.precision) << ',' << format_number(d.recall) << ','
      << format_number(d.f1) << ',' << d.tp << ',' << d.fp << ',' << d.fn;
  return row.str();
}

Evaluation evaluate(const Tensor3& truth, const ObservationMask& anomaly_truth,
                    const ObservationMask& omega, const Tensor3& recovered,
                    const Tensor3& anomaly, EvalScope scope, const DetectionRule& rule) {
  return {imputation_metrics(truth, recovered, scope, omega, &anomaly_truth),
          detection_metrics(anomaly_truth, anomaly, rule)};
}

PipelineResult solve_and_evaluate(const SyntheticInstance& instance, const SolverConfig& solver,
                                  EvalScope scope, const DetectionRule& rule) {
  const Tensor3 observed = project_observed(instance.full, instance.observed);
  SolveResult r = tslto::solve(observed, instance.observed, solver);
  PipelineResult out;
  out.evaluation = evaluate(instance.full, instance.anomaly_truth, instance.observed, r.recovered,
                            r.anomaly, scope, rule);
  out.iterations = r.iterations;
  out.converged = r.converged;
  return out;
}

const std::vector<AblationVariant>& ablation_variants() {
  static const std::vector<AblationVariant> variants{
      {"a", "without group sparsity on factor differences", true, false, false},
      {"b", "without sparsity on the anomaly tensor", false, true, false},
      {"c", "without sparsity on anomaly block differences", false, false, true},
      {"d", "without group sparsity and anomaly sparsity", true, true, false},
      {"e", "without group sparsity and block-difference sparsity", true, false, true},
      {"f", "without anomaly sparsity and block-difference sparsity", false, true, true},
      {"g", "without any regulariser", true, true, true},
      {"full", "complete model", false, false, false},
  };
  return variants;
}

std::optional<AblationVariant> find_variant(const std::string& label) {
  for (const AblationVariant& v : ablation_variants()) {
    if (v.label == label) return v;
  }
  return std::nullopt;
}

SolverConfig apply_variant(SolverConfig cfg, const AblationVariant& variant) {
  if (variant.drop_group) cfg.lambda = {0.0, 0.0, 0.0};
  if (variant.drop_sparsity) cfg.mu1 = 0.0;
  if (variant.drop_block_sparsity) cfg.mu2 = 0.0;
  return cfg;
}

void cmd_generate(const RunConfig& cfg, std::ostream& log) {
  const SyntheticSpec spec = cfg.synthetic_spec();
  const fs::path out = prepare_out(cfg);
  const SyntheticInstance inst = generate(spec);
  write_instance(out, inst, spec);
  const SparsityReport rep = sparsity_report(inst);
  log << "generated " << spec.dims[0] << 'x' << spec.dims[1] << 'x' << spec.dims[2]
      << " tensor in " << out.string() << ": anomaly ratio " << rep.anomaly_fraction
      << ", observed " << rep.observed_fraction << '\n';
}

void cmd_solve(const RunConfig& cfg, std::ostream& log) {
  const SolverConfig solver = cfg.solver_config();
  const fs::path observed_path = input_path(cfg, "observed", "data_dir", "observed.tsr3");
  const fs::path mask_path = input_path(cfg, "mask", "data_dir", "observed_mask.tsr3");
  const Tensor3 observed = read_tensor(observed_path);
  const ObservationMask omega = read_mask(mask_path);
  const fs::path out = prepare_out(cfg);

  const auto start = Clock::now();
  SolveOptions opts;
  opts.record_trace = true;
  SolveResult r = tslto::solve(observed, omega, solver, opts);
  const double elapsed = seconds_since(start);

  write_tsr3(out / "recovered.tsr3", r.recovered);
  write_tsr3(out / "lowrank.tsr3", r.lowrank);
  write_tsr3(out / "anomaly.tsr3", r.anomaly);
  write_trace(out / "trace.csv", r.trace);
  std::ofstream summary = open_output(out / "summary.txt");
  summary << "iterations=" << r.iterations << "\nconverged=" << (r.converged ? 1 : 0)
          << "\nanomaly_nonzeros=" << l0_count(r.anomaly)
          << "\nresidual_split=" << format_number(r.final_residuals.split)
          << "\nresidual_anomaly_diff=" << format_number(r.final_residuals.anomaly_diff) << '\n';
  log << (r.converged ? "converged" : "stopped") << " after " << r.iterations
      << " iterations in " << std::fixed << std::setprecision(1) << elapsed << " s; "
      << std::defaultfloat << l0_count(r.anomaly) << " anomalous entries; outputs in "
      << out.string() << '\n';
}

void cmd_evaluate(const RunConfig& cfg, std::ostream& log) {
  const EvalScope scope = cfg.scope();
  const DetectionRule rule = cfg.detection_rule();
  const Tensor3 truth = read_tensor(input_path(cfg, "truth", "data_dir", "full.tsr3"));
  const ObservationMask anomaly_truth =
      read_mask(input_path(cfg, "anomaly_truth", "data_dir", "anomaly_mask.tsr3"));
  const Tensor3 recovered = read_tensor(input_path(cfg, "recovered", "result_dir", "recovered.tsr3"));
  const Tensor3 anomaly = read_tensor(input_path(cfg, "anomaly", "result_dir", "anomaly.tsr3"));
  ObservationMask omega = ObservationMask::full(truth.dims());
  if (scope == EvalScope::kMissing) {
    omega = read_mask(input_path(cfg, "mask", "data_dir", "observed_mask.tsr3"));
  }
  const fs::path out = prepare_out(cfg);
  const Evaluation e = evaluate(truth, anomaly_truth, omega, recovered, anomaly, scope, rule);
  std::ofstream csv = open_output(out / "metrics.csv");
  csv << metrics_csv_header() << '\n' << metrics_csv_row(e, scope, rule) << '\n';
  log << "scope " << to_string(scope) << ", detection " << to_string(rule.mode) << '\n';
  log_evaluation(log, e);
}

void cmd_preprocess(const RunConfig& cfg, std::ostream& log) {
  const std::string op = cfg.get("op");
  if (cfg.get("input").empty()) throw UsageError("set 'input'");
  RankCriterion criterion{cfg.get_double("theta")};
  ScaleTransform transform{cfg.get_double("scale_shift"), cfg.get_double("scale_core"),
                           cfg.get_index_triple("scale_ranks")};
  try {
    criterion.validate();
    transform.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (op != "select-rank" && op != "smooth" && op != "scale" && op != "revert" &&
      op != "ingest") {
    throw UsageError("unknown preprocess op '" + op + "'");
  }
  const Tensor3 input = read_tensor(cfg.get_path("input"));
  const fs::path out = prepare_out(cfg);

  auto write_ranks = [&](const Ranks& r) {
    std::ofstream f = open_output(out / "ranks.txt");
    f << r[0] << ',' << r[1] << ',' << r[2] << '\n';
    log << "ranks " << r[0] << ',' << r[1] << ',' << r[2] << '\n';
  };

  if (op == "select-rank") {
    write_ranks(select_rank(input, criterion));
  } else if (op == "smooth") {
    const Ranks ranks = cfg.get("smooth_ranks").empty() ? select_rank(input, criterion)
                                                        : cfg.get_index_triple("smooth_ranks");
    write_ranks(ranks);
    write_tsr3(out / "smoothed.tsr3", tucker_smooth(input, ranks));
  } else if (op == "scale") {
    write_tsr3(out / "scaled.tsr3", scale_transform(input, transform));
  } else if (op == "revert") {
    write_tsr3(out / "reverted.tsr3", scale_revert(input, transform));
  } else {
    IngestedData data = ingest_zero_as_missing(input);
    write_tsr3(out / "observed.tsr3", data.values);
    write_mask(out / "observed_mask.tsr3", data.observed);
    log << data.observed.count() << " of " << data.observed.size() << " entries observed\n";
  }
  log << op << " written to " << out.string() << '\n';
}

void cmd_ablate(const RunConfig& cfg, std::ostream& log) {
  std::vector<AblationVariant> variants;
  for (const std::string& label : cfg.get_strings("variants")) {
    auto v = find_variant(label);
    if (!v) throw UsageError("unknown ablation variant '" + label + "'");
    variants.push_back(*v);
  }
  if (variants.empty()) throw UsageError("'variants' is empty");
  const SolverConfig base = cfg.solver_config();
  const SyntheticSpec spec = cfg.synthetic_spec();
  const EvalScope scope = cfg.scope();
  const DetectionRule rule = cfg.detection_rule();
  const fs::path out = prepare_out(cfg);
  const SyntheticInstance inst = generate(spec);

  std::ofstream csv = open_output(out / "ablation.csv");
  csv << "variant,description,iterations,converged," << metrics_csv_header() << '\n';
  for (const AblationVariant& v : variants) {
    const auto start = Clock::now();
    const PipelineResult r = solve_and_evaluate(inst, apply_variant(base, v), scope, rule);
    csv << v.label << ',' << csv_field(v.description) << ',' << r.iterations << ','
        << (r.converged ? 1 : 0) << ',' << metrics_csv_row(r.evaluation, scope, rule) << '\n';
    csv.flush();
    log << "variant " << v.label << " (" << v.description << "): " << r.iterations
        << " iterations, " << std::fixed << std::setprecision(1) << seconds_since(start)
        << " s\n" << std::defaultfloat;
    log_evaluation(log, r.evaluation);
  }
}

void cmd_grid(const RunConfig& cfg, std::ostream& log) {
  const std::string x_key = cfg.get("grid_x");
  const std::string y_key = cfg.get("grid_y");
  const std::vector<std::string> x_values = cfg.get_strings("grid_x_values");
  std::vector<std::string> y_values = cfg.get_strings("grid_y_values");
  const std::vector<std::string> rates = cfg.get_strings("grid_missing_rates");
  for (const std::string& key : {x_key, y_key}) {
    if (key.empty()) continue;
    if (!is_config_key(key)) throw UsageError("grid key '" + key + "' is not a config key");
    if (key == "missing_rate" || key == "seed" || key == "out") {
      throw UsageError("grid key '" + key + "' is managed by the grid itself");
    }
  }
  if (x_key.empty() || x_values.empty()) throw UsageError("grid needs grid_x and grid_x_values");
  if (y_key.empty() != y_values.empty()) {
    throw UsageError("set both grid_y and grid_y_values, or neither");
  }
  if (y_key.empty()) y_values = {""};
  if (rates.empty()) throw UsageError("'grid_missing_rates' is empty");
  const long long cap = cfg.get_int("grid_cap");
  const long long jobs = cfg.get_int("jobs");
  if (jobs < 1) throw UsageError("'jobs' must be >= 1");
  const std::size_t cells = x_values.size() * y_values.size() * rates.size();
  if (static_cast<long long>(cells) > cap) {
    throw UsageError("grid has " + std::to_string(cells) + " cells, above grid_cap " +
                     std::to_string(cap));
  }

  // Validate every cell's configuration before starting any solve.
  const std::uint64_t base_seed = static_cast<std::uint64_t>(cfg.get_int("seed"));
  std::vector<RunConfig> cell_cfgs;
  const fs::path out = prepare_out(cfg);
  for (const std::string& rate : rates) {
    for (const std::string& yv : y_values) {
      for (const std::string& xv : x_values) {
        RunConfig c = cfg;
        const std::size_t index = cell_cfgs.size();
        c.set(x_key, xv);
        if (!y_key.empty()) c.set(y_key, yv);
        c.set("missing_rate", rate);
        c.set("seed", std::to_string(base_seed ^ index));
        std::ostringstream dir;
        dir << "cell_" << std::setw(4) << std::setfill('0') << index;
        c.set("out", (out / dir.str()).string());
        c.solver_config();
        c.synthetic_spec();
        cell_cfgs.push_back(std::move(c));
      }
    }
  }

  struct CellOutcome {
    std::optional<PipelineResult> result;
    std::string error;
  };
  std::vector<CellOutcome> outcomes(cells);
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  const EvalScope scope = cfg.scope();
  const DetectionRule rule = cfg.detection_rule();

  auto worker = [&] {
    for (std::size_t i = next++; i < cells; i = next++) {
      const RunConfig& c = cell_cfgs[i];
      try {
        const fs::path cell_dir = prepare_out(c);
        const SyntheticInstance inst = generate(c.synthetic_spec());
        PipelineResult r = solve_and_evaluate(inst, c.solver_config(), scope, rule);
        std::ofstream csv = open_output(cell_dir / "metrics.csv");
        csv << "iterations,converged," << metrics_csv_header() << '\n'
            << r.iterations << ',' << (r.converged ? 1 : 0) << ','
            << metrics_csv_row(r.evaluation, scope, rule) << '\n';
        outcomes[i].result = r;
      } catch (const std::exception& e) {
        outcomes[i].error = e.what();
      }
      std::lock_guard lock(log_mutex);
      log << "cell " << i + 1 << '/' << cells
          << (outcomes[i].result ? " done" : " failed: " + outcomes[i].error) << '\n';
    }
  };
  std::vector<std::thread> pool;
  const std::size_t n_threads = std::min<std::size_t>(static_cast<std::size_t>(jobs), cells);
  for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  std::ofstream csv = open_output(out / "grid.csv");
  csv << "cell,x_key,x_value,y_key,y_value,missing_rate,seed,metric,value,status\n";
  for (std::size_t i = 0; i < cells; ++i) {
    const RunConfig& c = cell_cfgs[i];
    const std::string prefix = std::to_string(i) + ',' + x_key + ',' + c.get(x_key) + ',' +
                               y_key + ',' + (y_key.empty() ? "" : c.get(y_key)) + ',' +
                               c.get("missing_rate") + ',' + c.get("seed") + ',';
    const CellOutcome& o = outcomes[i];
    if (!o.result) {
      csv << prefix << "error,nan," << csv_field("error: " + o.error) << '\n';
      continue;
    }
    const Evaluation& e = o.result->evaluation;
    const std::vector<std::pair<const char*, std::optional<double>>> rows{
        {"precision", e.detection.precision},
        {"recall", e.detection.recall},
        {"f1", e.detection.f1},
        {"mape", e.imputation.mape},
        {"rmse", e.imputation.rmse},
        {"mae", e.imputation.mae},
        {"iterations", static_cast<double>(o.result->iterations)},
        {"converged", o.result->converged ? 1.0 : 0.0},
    };
    for (const auto& [metric, value] : rows) {
      csv << prefix << metric << ',' << (value ? format_number(*value) : "nan") << ",ok\n";
    }
  }
  log << "grid of " << cells << " cells written to " << (out / "grid.csv").string() << '\n';
}

}  // namespace tslto::cli
