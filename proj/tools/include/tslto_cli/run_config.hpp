#pragma once

// Flat key=value run configuration shared by every subcommand.
//
// Values resolve in three layers: built-in defaults, then an optional config
// file, then command-line flags (each key has a flag of the same name). The
// resolved set is written next to every output as `config.resolved`, which
// can be fed back through --config to reproduce a run.

#include "tslto/datagen.hpp"
#include "tslto/metrics.hpp"
#include "tslto/preprocess.hpp"
#include "tslto/solver.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace tslto::cli {

/// Bad key, bad value or bad command line. Maps to exit code 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct KeyInfo {
  std::string name;
  std::string default_value;
  std::string help;
};

/// Every recognised key in the order it is written to config.resolved.
const std::vector<KeyInfo>& config_keys();
bool is_config_key(const std::string& name);

class RunConfig {
 public:
  /// All keys at their defaults.
  RunConfig();

  /// Parses `key = value` lines; '#' starts a comment, blank lines are
  /// ignored. Unknown keys and malformed lines raise UsageError.
  void merge_text(std::istream& in, const std::string& source);
  void merge_file(const std::filesystem::path& path);
  void set(const std::string& key, const std::string& value);

  const std::string& get(const std::string& key) const;
  double get_double(const std::string& key) const;
  long long get_int(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::vector<double> get_doubles(const std::string& key) const;
  std::vector<std::string> get_strings(const std::string& key) const;
  /// A scalar is broadcast to all three modes.
  std::array<double, 3> get_triple(const std::string& key) const;
  std::array<Index, 3> get_index_triple(const std::string& key) const;
  std::filesystem::path get_path(const std::string& key) const;

  SolverConfig solver_config() const;
  SyntheticSpec synthetic_spec() const;
  EvalScope scope() const;
  DetectionRule detection_rule() const;

  /// One `key=value` line per key, in config_keys() order.
  void write(std::ostream& out) const;
  void write(const std::filesystem::path& path) const;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace tslto::cli
