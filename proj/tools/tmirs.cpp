// tmirs: train, sample and evaluate TM-IRS configurations from the shell.
//
// Every flag can also be given through an environment variable named
// TMIRS_<FLAG>, e.g. TMIRS_SEED or TMIRS_SINR_MODE; the command line wins.

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "tmirs/app.hpp"

namespace fs = std::filesystem;
using namespace tmirs;

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<std::string> sinr_mode;
  std::optional<double> epsilon;
  std::optional<std::uint64_t> budget;
  std::string out;
};

void add_common(CLI::App* cmd, Common& c, const std::string& default_out) {
  c.out = default_out;
  cmd->add_option("--config", c.config, "JSON run configuration (6x6 single-user defaults when omitted)")->envname("TMIRS_CONFIG");
  cmd->add_option("--seed", c.seed, "Master seed")->envname("TMIRS_SEED");
  cmd->add_option("--threads", c.threads, "Worker thread cap")->envname("TMIRS_THREADS");
  cmd->add_option("--sinr-mode", c.sinr_mode, "consistent|literal")->envname("TMIRS_SINR_MODE");
  cmd->add_option("--epsilon", c.epsilon, "Exploration rate during training")->envname("TMIRS_EPSILON");
  cmd->add_option("--budget", c.budget, "Training trajectories")->envname("TMIRS_BUDGET");
  cmd->add_option("--out", c.out, "Output path")->envname("TMIRS_OUT");
}

RunConfig load(const Common& c) {
  app::Overrides o;
  o.seed = c.seed;
  o.threads = c.threads;
  if (c.sinr_mode) o.sinr_mode = parse_sinr_mode(*c.sinr_mode);
  o.epsilon = c.epsilon;
  o.budget = c.budget;
  return app::resolve_config(c.config, o);
}

struct HeatmapFlags {
  std::optional<std::uint64_t> schedule;
  std::optional<std::string> slice;
  std::size_t index = 0;
  std::optional<std::string> plot;
};

void add_heatmap_flags(CLI::App* cmd, HeatmapFlags& h) {
  cmd->add_option("--schedule", h.schedule, "Switch configs every N OFDM symbols")->envname("TMIRS_SCHEDULE");
  cmd->add_option("--slice", h.slice, "Restrict to one elevation cut, phi=<deg>")->envname("TMIRS_SLICE");
  cmd->add_option("--index", h.index, "Config row used without a schedule")->envname("TMIRS_INDEX");
  cmd->add_option("--plot", h.plot, "Also write ser+1e-4 for log plots")->envname("TMIRS_PLOT");
}

app::HeatmapOptions heatmap_options(const HeatmapFlags& h) {
  app::HeatmapOptions o;
  o.schedule_block = h.schedule;
  if (h.slice) o.slice_phi = app::parse_slice(*h.slice);
  o.index = h.index;
  if (h.plot) o.plot_csv = fs::path(*h.plot);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"Time-modulated IRS configuration sampler"};
  cli.set_version_flag("--version", TMIRS_VERSION_STRING);
  cli.require_subcommand(1);

  Common train_c, sample_c, heat_c, oracle_c, base_c;
  HeatmapFlags heat_h, base_h;
  std::string checkpoint, configs;
  std::size_t count = 4, random_count = 0;

  auto* train = cli.add_subcommand("train", "Train the sampler; writes checkpoint, report and manifest");
  add_common(train, train_c, "run");

  auto* sample = cli.add_subcommand("sample", "Draw configurations from a checkpoint");
  add_common(sample, sample_c, "configs.csv");
  sample->add_option("--checkpoint", checkpoint, "Checkpoint file")->required()->envname("TMIRS_CHECKPOINT");
  sample->add_option("--count", count, "Number of configurations")->envname("TMIRS_COUNT");

  auto* heatmap = cli.add_subcommand("heatmap", "SER over directions for sampled configurations");
  add_common(heatmap, heat_c, "heatmap.csv");
  heatmap->add_option("--configs", configs, "Configs CSV from `sample`")->required()->envname("TMIRS_CONFIGS");
  add_heatmap_flags(heatmap, heat_h);

  auto* oracle = cli.add_subcommand("oracle-check", "Compare sampler against exhaustive enumeration");
  add_common(oracle, oracle_c, "oracle.csv");
  oracle->add_option("--checkpoint", checkpoint, "Checkpoint file")->required()->envname("TMIRS_CHECKPOINT");

  auto* baseline = cli.add_subcommand("baseline", "Full-on steered and random reference configurations");
  add_common(baseline, base_c, "baseline");
  baseline->add_option("--random", random_count, "Uniform random grid configurations")->envname("TMIRS_RANDOM");
  add_heatmap_flags(baseline, base_h);

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = cli.exit(e);
    return rc == 0 ? app::kOk : app::kValidation;
  }

  try {
    if (*train) {
      const RunConfig cfg = load(train_c);
      const auto outs = app::cmd_train(cfg, train_c.out, &std::cerr);
      std::cout << outs.checkpoint.string() << '\n';
    } else if (*sample) {
      if (sample_c.seed == std::nullopt && !sample_c.config.empty()) sample_c.seed = load(sample_c).seed();
      app::cmd_sample(checkpoint, count, sample_c.seed.value_or(1), sample_c.out);
    } else if (*heatmap) {
      app::cmd_heatmap(load(heat_c), configs, heatmap_options(heat_h), heat_c.out);
    } else if (*oracle) {
      const auto check = app::cmd_oracle_check(load(oracle_c), checkpoint, oracle_c.out);
      std::printf("l1 %.6g  logz_error %.6g  %s\n", check.distance.l1, check.distance.logz_error,
                  check.pass ? "pass" : "FAIL");
      if (!check.pass) return app::kThresholdFailure;
    } else if (*baseline) {
      app::cmd_baseline(load(base_c), random_count, base_c.out, heatmap_options(base_h));
    }
  } catch (const NumericalAbort& e) {
    std::cerr << "numerical abort: " << e.what() << " (state dumped to " << e.dump_path.string() << ")\n";
    return app::kNumericalAbort;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return app::kValidation;
  } catch (const std::length_error& e) {
    std::cerr << "refused: " << e.what() << '\n';
    return app::kValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return app::kValidation;
  }
  return app::kOk;
}
