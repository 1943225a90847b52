#include "tslto/io.hpp"
#include "tslto_cli/app.hpp"
#include "tslto_cli/commands.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace tslto;
using namespace tslto::cli;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  explicit TempDir(const std::string& name)
      : path_(fs::temp_directory_path() / ("tslto_cli_" + name)) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  args.insert(args.begin(), "tslto");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) out.push_back(line);
  return out;
}

// A small problem that solves in well under a second.
std::vector<std::string> small_data_flags() {
  return {"--dims", "12,10,8", "--core_ranks", "2,2,2", "--block_count", "3",
          "--block_rows", "2", "--block_cols", "6", "--ranks", "2,2,2",
          "--max_outer", "60"};
}

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

TEST(RunConfig, DefaultsMirrorLibraryDefaults) {
  RunConfig cfg;
  const SolverConfig s = cfg.solver_config();
  const SolverConfig ref;
  EXPECT_EQ(s.beta, ref.beta);
  EXPECT_EQ(s.lambda, ref.lambda);
  EXPECT_EQ(s.growth, ref.growth);
  EXPECT_EQ(s.s, ref.s);
  EXPECT_EQ(s.ranks, ref.ranks);
  const SyntheticSpec d = cfg.synthetic_spec();
  EXPECT_EQ(d.dims, SyntheticSpec{}.dims);
  EXPECT_EQ(d.blocks.cols, 125);
}

TEST(RunConfig, ParsesFileWithCommentsAndRejectsUnknownKeys) {
  RunConfig cfg;
  std::istringstream text("# header\n beta = 300 \n\nlambda=1,2,3 # inline\n");
  cfg.merge_text(text, "test");
  EXPECT_EQ(cfg.get_double("beta"), 300.0);
  EXPECT_EQ(cfg.get_triple("lambda"), (std::array<double, 3>{1, 2, 3}));
  std::istringstream bad("betta=1\n");
  EXPECT_THROW(cfg.merge_text(bad, "test"), UsageError);
  std::istringstream no_eq("beta 1\n");
  EXPECT_THROW(cfg.merge_text(no_eq, "test"), UsageError);
  EXPECT_THROW(cfg.set("nope", "1"), UsageError);
}

TEST(RunConfig, ScalarBroadcastsAndBadValuesAreUsageErrors) {
  RunConfig cfg;
  cfg.set("alpha", "50");
  EXPECT_EQ(cfg.solver_config().alpha, (std::array<double, 3>{50, 50, 50}));
  cfg.set("alpha", "1,2");
  EXPECT_THROW(cfg.solver_config(), UsageError);
  cfg = RunConfig{};
  cfg.set("growth", "0.5");
  EXPECT_THROW(cfg.solver_config(), UsageError);
  cfg = RunConfig{};
  cfg.set("beta", "abc");
  EXPECT_THROW(cfg.solver_config(), UsageError);
  cfg = RunConfig{};
  cfg.set("scope", "everything");
  EXPECT_THROW(cfg.scope(), UsageError);
}

TEST(RunConfig, ResolvedOutputRoundTrips) {
  RunConfig cfg;
  cfg.set("mu2", "60");
  cfg.set("grid_y_values", "1,2");
  std::stringstream buf;
  cfg.write(buf);
  RunConfig back;
  back.merge_text(buf, "resolved");
  EXPECT_EQ(back, cfg);
  EXPECT_EQ(lines(buf.str()).size(), config_keys().size());
}

TEST(Cli, UsageErrorsExitWithOne) {
  EXPECT_EQ(run({}).code, kExitUsage);
  EXPECT_EQ(run({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(run({"solve", "--not_a_key", "1"}).code, kExitUsage);
  EXPECT_EQ(run({"solve", "--beta", "-3", "--data_dir", "x"}).code, kExitUsage);
  EXPECT_EQ(run({"solve", "--config", "/nonexistent/run.cfg"}).code, kExitUsage);
  EXPECT_EQ(run({"--help"}).code, kExitOk);
}

TEST(Cli, MissingInputIsRuntimeError) {
  TempDir dir("missing");
  CliRun r = run({"solve", "--data_dir", (dir.path() / "nothing").string(), "--out",
                  (dir.path() / "o").string()});
  EXPECT_EQ(r.code, kExitRuntime);
  EXPECT_NE(r.err.find("error"), std::string::npos);
}

TEST(Cli, GenerateWritesInstanceAndResolvedConfig) {
  TempDir dir("generate");
  const fs::path out = dir.path() / "data";
  CliRun r = run({"generate", "--seed", "3", "--out", out.string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const std::string manifest = slurp(out / "manifest.txt");
  EXPECT_NE(manifest.find("anomaly_ratio=0.1\n"), std::string::npos) << manifest;
  EXPECT_TRUE(fs::exists(out / "observed_mask.tsr3"));
  // missing_rate defaults to 0, so every entry is observed.
  EXPECT_EQ(read_mask(out / "observed_mask.tsr3").count(), 50 * 50 * 50);
  RunConfig resolved;
  resolved.merge_file(out / "config.resolved");
  EXPECT_EQ(resolved.get("seed"), "3");
}

TEST(Cli, ConfigFileThenFlagsPrecedence) {
  TempDir dir("precedence");
  {
    std::ofstream f(dir.path() / "run.cfg");
    f << "seed=11\nmissing_rate=0.2\n";
  }
  const fs::path out = dir.path() / "data";
  CliRun r = run(concat({"generate", "--config", (dir.path() / "run.cfg").string(), "--seed",
                         "12", "--out", out.string()},
                        small_data_flags()));
  ASSERT_EQ(r.code, kExitOk) << r.err;
  RunConfig resolved;
  resolved.merge_file(out / "config.resolved");
  EXPECT_EQ(resolved.get("seed"), "12");
  EXPECT_EQ(resolved.get("missing_rate"), "0.2");
}

TEST(Cli, SolveEvaluatePipeline) {
  TempDir dir("pipeline");
  const std::string data = (dir.path() / "data").string();
  const std::string res = (dir.path() / "res").string();
  const std::string ev = (dir.path() / "eval").string();
  ASSERT_EQ(run(concat({"generate", "--missing_rate", "0.2", "--out", data}, small_data_flags()))
                .code,
            kExitOk);
  CliRun s = run(concat({"solve", "--data_dir", data, "--out", res, "--epsilon", "1000"},
                        small_data_flags()));
  ASSERT_EQ(s.code, kExitOk) << s.err;
  EXPECT_NE(slurp(fs::path(res) / "summary.txt").find("iterations=2\nconverged=1\n"),
            std::string::npos);
  const auto trace = lines(slurp(fs::path(res) / "trace.csv"));
  ASSERT_EQ(trace.size(), 3u);
  EXPECT_EQ(trace[0].substr(0, 15), "iter,objective,");
  for (const char* f : {"recovered.tsr3", "lowrank.tsr3", "anomaly.tsr3", "config.resolved"}) {
    EXPECT_TRUE(fs::exists(fs::path(res) / f)) << f;
  }
  CliRun e = run({"evaluate", "--data_dir", data, "--result_dir", res, "--out", ev});
  ASSERT_EQ(e.code, kExitOk) << e.err;
  const auto rows = lines(slurp(fs::path(ev) / "metrics.csv"));
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0], metrics_csv_header());
  EXPECT_EQ(rows[1].substr(0, 8), "missing,");
}

TEST(Cli, EvaluatingTheTruthGivesZeroErrors) {
  TempDir dir("truth");
  const std::string data = (dir.path() / "data").string();
  ASSERT_EQ(run(concat({"generate", "--missing_rate", "0.3", "--out", data}, small_data_flags()))
                .code,
            kExitOk);
  CliRun e = run({"evaluate", "--data_dir", data, "--recovered", data + "/full.tsr3",
                  "--anomaly", data + "/anomaly.tsr3", "--out", (dir.path() / "ev").string()});
  ASSERT_EQ(e.code, kExitOk) << e.err;
  const auto rows = lines(slurp(dir.path() / "ev" / "metrics.csv"));
  ASSERT_EQ(rows.size(), 2u);
  std::stringstream row(rows[1]);
  std::vector<std::string> fields;
  std::string f;
  while (std::getline(row, f, ',')) fields.push_back(f);
  ASSERT_EQ(fields.size(), 14u);
  EXPECT_EQ(fields[2], "0");  // rmse
  EXPECT_EQ(fields[3], "0");  // mae
  EXPECT_EQ(fields[4], "0");  // mape
  EXPECT_EQ(fields[10], "1");  // f1
}

TEST(Cli, PreprocessOperations) {
  TempDir dir("preprocess");
  Tensor3 x({6, 5, 4});
  for (Index i = 0; i < x.size(); ++i) x[i] = (i % 7 == 0) ? 0.0 : 1.0 + 0.01 * double(i);
  write_tsr3(dir.path() / "x.tsr3", x);
  const std::string in = (dir.path() / "x.tsr3").string();
  const fs::path out = dir.path() / "o";
  ASSERT_EQ(run({"preprocess", "--op", "select-rank", "--input", in, "--out", out.string()}).code,
            kExitOk);
  EXPECT_TRUE(fs::exists(out / "ranks.txt"));
  ASSERT_EQ(run({"preprocess", "--op", "smooth", "--smooth_ranks", "2,2,2", "--input", in,
                 "--out", out.string()})
                .code,
            kExitOk);
  EXPECT_EQ(read_tsr3(out / "smoothed.tsr3").dims(), x.dims());
  ASSERT_EQ(run({"preprocess", "--op", "ingest", "--input", in, "--out", out.string()}).code,
            kExitOk);
  EXPECT_EQ(read_mask(out / "observed_mask.tsr3"), ObservationMask::from_nonzeros(x));
  ASSERT_EQ(run({"preprocess", "--op", "scale", "--scale_ranks", "2,2,2", "--input", in, "--out",
                 out.string()})
                .code,
            kExitOk);
  EXPECT_EQ(run({"preprocess", "--op", "bogus", "--input", in, "--out", out.string()}).code,
            kExitUsage);
}

TEST(Ablation, VariantLabelsFollowTheRegulariserSubsets) {
  const auto& v = ablation_variants();
  ASSERT_EQ(v.size(), 8u);
  const std::string labels = "abcdefg";
  const bool expected[7][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 0},
                               {1, 0, 1}, {0, 1, 1}, {1, 1, 1}};
  for (int i = 0; i < 7; ++i) {
    EXPECT_EQ(v[i].label, std::string(1, labels[i]));
    EXPECT_EQ(v[i].drop_group, expected[i][0]);
    EXPECT_EQ(v[i].drop_sparsity, expected[i][1]);
    EXPECT_EQ(v[i].drop_block_sparsity, expected[i][2]);
  }
  SolverConfig g = apply_variant(SolverConfig{}, v[6]);
  EXPECT_EQ(g.lambda, (std::array<double, 3>{0, 0, 0}));
  EXPECT_EQ(g.mu1, 0.0);
  EXPECT_EQ(g.mu2, 0.0);
  EXPECT_EQ(g.beta, SolverConfig{}.beta);
}

TEST(Ablation, FullRowMatchesSolveThenEvaluate) {
  TempDir dir("ablate");
  const std::string data = (dir.path() / "data").string();
  const std::vector<std::string> common =
      concat({"--missing_rate", "0.2", "--seed", "5"}, small_data_flags());
  ASSERT_EQ(run(concat({"generate", "--out", data}, common)).code, kExitOk);
  ASSERT_EQ(run(concat({"solve", "--data_dir", data, "--out", (dir.path() / "r").string()},
                       common))
                .code,
            kExitOk);
  ASSERT_EQ(run({"evaluate", "--data_dir", data, "--result_dir", (dir.path() / "r").string(),
                 "--out", (dir.path() / "e").string()})
                .code,
            kExitOk);
  CliRun a = run(concat({"ablate", "--variants", "g,full", "--out", (dir.path() / "a").string()},
                        common));
  ASSERT_EQ(a.code, kExitOk) << a.err;
  const auto ablation = lines(slurp(dir.path() / "a" / "ablation.csv"));
  ASSERT_EQ(ablation.size(), 3u);
  EXPECT_EQ(ablation[1].substr(0, 2), "g,");
  const std::string metrics_row = lines(slurp(dir.path() / "e" / "metrics.csv"))[1];
  EXPECT_EQ(ablation[2].substr(ablation[2].size() - metrics_row.size()), metrics_row);
  EXPECT_EQ(run({"ablate", "--variants", "z"}).code, kExitUsage);
}

TEST(Grid, SingleCellMatchesSingleRun) {
  TempDir dir("grid1");
  const std::vector<std::string> common = small_data_flags();
  CliRun g = run(concat({"grid", "--grid_x", "beta", "--grid_x_values", "300", "--grid_y", "",
                         "--grid_missing_rates", "0.2", "--seed", "7", "--out",
                         (dir.path() / "g").string()},
                        common));
  ASSERT_EQ(g.code, kExitOk) << g.err;
  // Cell 0 uses seed 7 XOR 0.
  const std::string data = (dir.path() / "d").string();
  const std::vector<std::string> cell =
      concat({"--missing_rate", "0.2", "--seed", "7", "--beta", "300"}, common);
  ASSERT_EQ(run(concat({"generate", "--out", data}, cell)).code, kExitOk);
  ASSERT_EQ(run(concat({"solve", "--data_dir", data, "--out", (dir.path() / "r").string()}, cell))
                .code,
            kExitOk);
  ASSERT_EQ(run({"evaluate", "--data_dir", data, "--result_dir", (dir.path() / "r").string(),
                 "--out", (dir.path() / "e").string()})
                .code,
            kExitOk);
  const std::string single = lines(slurp(dir.path() / "e" / "metrics.csv"))[1];
  const std::string from_grid = lines(slurp(dir.path() / "g" / "cell_0000" / "metrics.csv"))[1];
  EXPECT_EQ(from_grid.substr(from_grid.size() - single.size()), single);
  const auto rows = lines(slurp(dir.path() / "g" / "grid.csv"));
  ASSERT_EQ(rows.size(), 1u + 8u);
  EXPECT_EQ(rows[0], "cell,x_key,x_value,y_key,y_value,missing_rate,seed,metric,value,status");
}

TEST(Grid, CellsAreSeededAndFailuresAreIsolated) {
  TempDir dir("grid2");
  // ranks 20 exceed the 12x10x8 tensor only in modes 2 and 3 of the second
  // x value, so that cell fails while the others complete.
  CliRun g = run(concat({"grid", "--grid_x", "ranks", "--grid_x_values", "2,11", "--grid_y",
                         "mu2", "--grid_y_values", "10,20", "--grid_missing_rates", "0.2",
                         "--seed", "5", "--jobs", "2", "--out", (dir.path() / "g").string()},
                        small_data_flags()));
  ASSERT_EQ(g.code, kExitOk) << g.err;
  const auto rows = lines(slurp(dir.path() / "g" / "grid.csv"));
  int errors = 0, ok = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].find(",error,nan,") != std::string::npos) ++errors;
    if (rows[i].ends_with(",ok")) ++ok;
  }
  EXPECT_EQ(errors, 2);
  EXPECT_EQ(ok, 2 * 8);
  // Seeds are base XOR cell index: 5^0, 5^1, 5^2, 5^3.
  EXPECT_NE(rows[1].find(",0.2,5,"), std::string::npos);
  EXPECT_NE(rows.back().find(",0.2,6,"), std::string::npos);
}

TEST(Grid, CapIsEnforced) {
  EXPECT_EQ(run({"grid", "--grid_x", "beta", "--grid_x_values", "1,2,3", "--grid_y", "mu2",
                 "--grid_y_values", "1,2", "--grid_cap", "5"})
                .code,
            kExitUsage);
  EXPECT_EQ(run({"grid", "--grid_x", "seed", "--grid_x_values", "1"}).code, kExitUsage);
}
