#include "tslto_cli/app.hpp"

#include "tslto_cli/commands.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <functional>
#include <map>
#include <ostream>

namespace tslto::cli {

namespace {

using Command = std::function<void(const RunConfig&, std::ostream&)>;

struct Subcommand {
  const char* name;
  const char* help;
  Command run;
};

const std::vector<Subcommand>& subcommands() {
  static const std::vector<Subcommand> list{
      {"generate", "write a synthetic instance", cmd_generate},
      {"solve", "recover the low-rank and anomaly parts of an observed tensor", cmd_solve},
      {"evaluate", "score a solve against ground truth", cmd_evaluate},
      {"preprocess", "rank selection, smoothing, scaling and zero-as-missing ingest",
       cmd_preprocess},
      {"ablate", "solve with subsets of the regularisers removed", cmd_ablate},
      {"grid", "grid search over two config keys and missing rates", cmd_grid},
  };
  return list;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sparse low-rank Tucker completion and anomaly detection"};
  app.require_subcommand(1);

  struct Parsed {
    CLI::App* app = nullptr;
    std::string config_file;
    std::map<std::string, std::string> flags;
  };
  std::vector<Parsed> parsed(subcommands().size());
  for (std::size_t i = 0; i < subcommands().size(); ++i) {
    const Subcommand& sc = subcommands()[i];
    Parsed& p = parsed[i];
    p.app = app.add_subcommand(sc.name, sc.help);
    p.app->add_option("--config", p.config_file, "key=value file applied before flags");
    for (const KeyInfo& key : config_keys()) {
      std::string help = key.help;
      if (!key.default_value.empty()) help += " [" + key.default_value + "]";
      p.app->add_option("--" + key.name, p.flags[key.name], help);
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  for (std::size_t i = 0; i < parsed.size(); ++i) {
    Parsed& p = parsed[i];
    if (!p.app->parsed()) continue;
    try {
      RunConfig cfg;
      if (const char* jobs = std::getenv("TSLTO_JOBS"); jobs != nullptr && *jobs != '\0') {
        cfg.set("jobs", jobs);
      }
      if (!p.config_file.empty()) cfg.merge_file(p.config_file);
      for (const KeyInfo& key : config_keys()) {
        if (p.app->count("--" + key.name) > 0) cfg.set(key.name, p.flags[key.name]);
      }
      subcommands()[i].run(cfg, out);
      return kExitOk;
    } catch (const UsageError& e) {
      err << "usage error: " << e.what() << '\n';
      return kExitUsage;
    } catch (const std::exception& e) {
      err << "error: " << e.what() << '\n';
      return kExitRuntime;
    }
  }
  return kExitUsage;
}

}  // namespace tslto::cli
