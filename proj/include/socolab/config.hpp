#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "socolab/harness.hpp"

namespace socolab {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// TOML-style [section] tables with scalar and flat-array values; enough for
// one experiment file, with line numbers kept for error messages.
struct TomlValue {
  enum class Kind { number, string, boolean, number_array, string_array };
  Kind kind = Kind::number;
  double number = 0.0;
  bool boolean = false;
  std::string str;
  std::vector<double> numbers;
  std::vector<std::string> strings;
  int line = 0;
};

using TomlTable = std::map<std::string, std::map<std::string, TomlValue>>;

TomlTable parse_toml(const std::string& text);

struct ExperimentConfig {
  EnvSpec env;
  std::vector<AgentKind> agents;
  AgentParams params;       // shared across agents; horizon/eta_bar filled per run
  std::vector<int> T_list;  // one entry for `run`, several for `sweep`
  int runs = 1;
  std::uint64_t master_seed = 0;
  std::vector<double> c1_grid;  // tune-c1 only
  std::string output_directory = "out";
  std::vector<std::string> formats{"csv", "svg"};

  // Canonical serialization: parsing it back yields the same config, and its
  // hash identifies the experiment.
  std::string to_toml() const;
};

// Accepts an experiment file or a manifest (JSON with an embedded resolved
// config).  Throws ConfigError with a line-anchored message on bad input.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& text);

std::uint64_t fnv1a64(const std::string& text);
std::string config_hash(const ExperimentConfig& cfg);

}  // namespace socolab
