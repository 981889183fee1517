#pragma once

// Command implementations behind the `tmirs` executable. Every command is a
// deterministic function of its config and seed; outputs are CSV.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tmirs/checkpoint.hpp"
#include "tmirs/oracle.hpp"
#include "tmirs/run_config.hpp"

namespace tmirs::app {

enum ExitCode : int { kOk = 0, kValidation = 1, kNumericalAbort = 2, kThresholdFailure = 3 };

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<SinrMode> sinr_mode;
  std::optional<double> epsilon;
  std::optional<std::uint64_t> budget;
};

// Loads path (or the 6x6 single-user defaults when empty), applies overrides, validates.
RunConfig resolve_config(const std::filesystem::path& path, const Overrides& overrides = {});
void apply_overrides(RunConfig& cfg, const Overrides& overrides);

Problem make_problem(const RunConfig& cfg);

struct TrainOutputs {
  std::filesystem::path checkpoint;
  std::filesystem::path report;
  std::filesystem::path manifest;
  TrainReport train_report;
};

// Writes checkpoint.bin, train_report.csv and manifest.json into out_dir.
TrainOutputs cmd_train(const RunConfig& cfg, const std::filesystem::path& out_dir, std::ostream* log = nullptr);

nlohmann::json checkpoint_metadata(const RunConfig& cfg, std::uint64_t episodes);
// Run configuration stored in a checkpoint's metadata.
RunConfig checkpoint_config(const Checkpoint& ck);

// Configs file: `sample,reward,m,n,c_phase,tau_on,dtau`, one row per element.
struct ConfigRecord {
  TmIrsConfig config;
  double reward = 0.0;
};
void write_configs_csv(std::ostream& out, const std::vector<ConfigRecord>& records);
std::vector<ConfigRecord> read_configs_csv(std::istream& in);
std::vector<ConfigRecord> read_configs_csv(const std::filesystem::path& path);

std::vector<ConfigRecord> cmd_sample(const std::filesystem::path& checkpoint, std::size_t count, std::uint64_t seed,
                                     const std::filesystem::path& out_csv);

struct HeatmapOptions {
  std::optional<std::uint64_t> schedule_block;  // switch configs every N OFDM symbols
  std::optional<double> slice_phi;              // restrict to one phi
  std::size_t index = 0;                        // config used without a schedule
  std::optional<std::filesystem::path> plot_csv;  // ser + 1e-4 export
};

// Parses `phi=<deg>`.
double parse_slice(const std::string& text);

SerMap run_heatmap(const RunConfig& cfg, const std::vector<TmIrsConfig>& configs, const HeatmapOptions& options);
SerMap cmd_heatmap(const RunConfig& cfg, const std::filesystem::path& configs_csv, const HeatmapOptions& options,
                   const std::filesystem::path& out_csv);

struct OracleCheck {
  DistributionDistance distance;
  double logz = 0.0;
  bool pass = false;
};

OracleCheck cmd_oracle_check(const RunConfig& cfg, const std::filesystem::path& checkpoint,
                             const std::filesystem::path& out_csv);
void write_oracle_csv(std::ostream& out, const OracleCheck& check);

// Full-on steered configuration (dtau = 1, tau_on = 0, steering phases
// toward the first user) plus `random_count` uniform grid configurations.
std::vector<ConfigRecord> baseline_configs(const RunConfig& cfg, std::size_t random_count);
void cmd_baseline(const RunConfig& cfg, std::size_t random_count, const std::filesystem::path& out_dir,
                  const HeatmapOptions& options = {});

}  // namespace tmirs::app
