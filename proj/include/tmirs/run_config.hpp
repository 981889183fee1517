#pragma once

// Experiment configuration file: JSON with top-level `seed`, `threads` and
// nested `system`, `grid`, `training`, `sweep` and `oracle` objects. Missing
// fields keep the single-user 6x6 defaults; unknown fields are errors.

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "tmirs/gflownet.hpp"
#include "tmirs/oracle.hpp"
#include "tmirs/simulator.hpp"

namespace tmirs {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct SweepSettings {
  SweepGrid grid;
  std::uint64_t ofdm_symbols = 1024;
};

struct OracleSettings {
  std::uint64_t samples = 100000;
  double l1_threshold = 0.1;
  double logz_threshold = 0.1;
  double max_terminals = kMaxEnumeratedTerminals;
};

struct RunConfig {
  SystemConfig system;
  DiscretizationGrid grid;
  TrainSettings training;
  SweepSettings sweep;
  OracleSettings oracle;
  unsigned threads = 1;

  std::uint64_t seed() const { return training.seed; }
  // Throws ConfigError naming the field.
  void validate() const;
};

RunConfig parse_run_config(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);
nlohmann::json to_json(const RunConfig& cfg);

// Hex FNV-1a 64 of the canonical JSON form.
std::string config_digest(const RunConfig& cfg);

SinrMode parse_sinr_mode(const std::string& s);
std::string to_string(SinrMode m);
ParamMode parse_param_mode(const std::string& s);
std::string to_string(ParamMode m);

}  // namespace tmirs
