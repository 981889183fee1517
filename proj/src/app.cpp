#include "tmirs/app.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#ifndef TMIRS_VERSION
#define TMIRS_VERSION "unknown"
#endif

namespace tmirs::app {

namespace fs = std::filesystem;
using nlohmann::json;

void apply_overrides(RunConfig& cfg, const Overrides& o) {
  if (o.seed) cfg.training.seed = *o.seed;
  if (o.threads) cfg.threads = *o.threads;
  if (o.sinr_mode) cfg.system.sinr_mode = *o.sinr_mode;
  if (o.epsilon) cfg.training.policy.epsilon = *o.epsilon;
  if (o.budget) cfg.training.budget = *o.budget;
}

RunConfig resolve_config(const fs::path& path, const Overrides& overrides) {
  RunConfig cfg = path.empty() ? RunConfig{} : load_run_config(path);
  apply_overrides(cfg, overrides);
  cfg.validate();
  return cfg;
}

Problem make_problem(const RunConfig& cfg) { return Problem(cfg.system, cfg.grid); }

namespace {

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return out;
}

}  // namespace

json checkpoint_metadata(const RunConfig& cfg, std::uint64_t episodes) {
  return {{"format", "tmirs-policy"},
          {"code_version", TMIRS_VERSION},
          {"config", to_json(cfg)},
          {"config_digest", config_digest(cfg)},
          {"grid", {{"q1", cfg.grid.q1}, {"q2", cfg.grid.q2}, {"q3", cfg.grid.q3}}},
          {"mode", to_string(cfg.grid.mode)},
          {"seed", cfg.seed()},
          {"episodes", episodes}};
}

RunConfig checkpoint_config(const Checkpoint& ck) {
  if (!ck.metadata.contains("config")) throw std::runtime_error("checkpoint metadata lacks the run configuration");
  return parse_run_config(ck.metadata.at("config"));
}

TrainOutputs cmd_train(const RunConfig& cfg, const fs::path& out_dir, std::ostream* log) {
  cfg.validate();
  fs::create_directories(out_dir);
  const Problem problem = make_problem(cfg);
  TrainSettings settings = cfg.training;
  settings.dump_path = out_dir / "abort_dump.json";

  auto hook = [&](const nn::PolicyParams& params, std::uint64_t episodes) {
    save_checkpoint(out_dir / ("checkpoint_" + std::to_string(episodes) + ".bin"), params,
                    checkpoint_metadata(cfg, episodes));
    if (log) *log << "episode " << episodes << "  logz " << params.logz << '\n';
  };
  TrainResult result = train(problem, settings, hook);
  result.report.config_digest = config_digest(cfg);

  TrainOutputs outs{out_dir / "checkpoint.bin", out_dir / "train_report.csv", out_dir / "manifest.json",
                    std::move(result.report)};
  save_checkpoint(outs.checkpoint, result.params, checkpoint_metadata(cfg, outs.train_report.episodes));
  {
    auto out = open_out(outs.report);
    write_train_csv(out, outs.train_report);
  }
  const json manifest{{"command", "train"},
                      {"seed", cfg.seed()},
                      {"config_digest", outs.train_report.config_digest},
                      {"code_version", TMIRS_VERSION},
                      {"wall_clock_s", outs.train_report.wall_clock_s},
                      {"episodes", outs.train_report.episodes},
                      {"checkpoint", outs.checkpoint.filename().string()},
                      {"report", outs.report.filename().string()}};
  open_out(outs.manifest) << manifest.dump(2) << '\n';
  if (log)
    *log << "trained " << outs.train_report.episodes << " episodes in " << outs.train_report.wall_clock_s
         << " s, logz " << result.params.logz << '\n';
  return outs;
}

void write_configs_csv(std::ostream& out, const std::vector<ConfigRecord>& records) {
  out << "sample,reward,m,n,c_phase,tau_on,dtau\n";
  char buf[256];
  for (std::size_t s = 0; s < records.size(); ++s) {
    const auto& c = records[s].config;
    for (int m = 0; m < c.mx; ++m) {
      for (int n = 0; n < c.mz; ++n) {
        const int e = c.index(m, n);
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%d,%d,%.17g,%.17g,%.17g\n", s, records[s].reward, m, n, c.c_phase[e],
                      c.tau_on[e], c.dtau[e]);
        out << buf;
      }
    }
  }
}

std::vector<ConfigRecord> read_configs_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "sample,reward,m,n,c_phase,tau_on,dtau")
    throw std::invalid_argument("configs file: unexpected header");

  struct Row {
    int m, n;
    double c, tau, dtau;
  };
  std::map<std::size_t, std::pair<double, std::vector<Row>>> groups;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 7) throw std::invalid_argument("configs file line " + std::to_string(lineno) + ": expected 7 fields");
    try {
      auto& g = groups[std::stoul(f[0])];
      g.first = std::stod(f[1]);
      g.second.push_back({std::stoi(f[2]), std::stoi(f[3]), std::stod(f[4]), std::stod(f[5]), std::stod(f[6])});
    } catch (const std::logic_error&) {
      throw std::invalid_argument("configs file line " + std::to_string(lineno) + ": malformed number");
    }
  }

  std::vector<ConfigRecord> out;
  for (auto& [sample, g] : groups) {
    int mx = 0, mz = 0;
    for (const auto& r : g.second) {
      mx = std::max(mx, r.m + 1);
      mz = std::max(mz, r.n + 1);
    }
    if (g.second.size() != static_cast<std::size_t>(mx * mz))
      throw std::invalid_argument("configs file: sample " + std::to_string(sample) + " does not cover a full array");
    TmIrsConfig c(mx, mz);
    for (const auto& r : g.second) {
      if (r.m < 0 || r.n < 0) throw std::invalid_argument("configs file: negative element index");
      const int e = c.index(r.m, r.n);
      c.c_phase[e] = r.c;
      c.tau_on[e] = r.tau;
      c.dtau[e] = r.dtau;
    }
    c.validate();
    out.push_back({std::move(c), g.first});
  }
  return out;
}

std::vector<ConfigRecord> read_configs_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open configs file " + path.string());
  return read_configs_csv(in);
}

std::vector<ConfigRecord> cmd_sample(const fs::path& checkpoint, std::size_t count, std::uint64_t seed,
                                     const fs::path& out_csv) {
  const Checkpoint ck = load_checkpoint(checkpoint);
  const RunConfig cfg = checkpoint_config(ck);
  const Problem problem = make_problem(cfg);
  Rng rng = make_stream(seed, {2});
  std::vector<ConfigRecord> records;
  for (auto& s : sample_configs(ck.params, problem, count, rng)) records.push_back({std::move(s.config), s.reward});
  auto out = open_out(out_csv);
  write_configs_csv(out, records);
  return records;
}

double parse_slice(const std::string& text) {
  const std::string prefix = "phi=";
  if (text.rfind(prefix, 0) != 0) throw ConfigError("--slice: expected phi=<degrees>, got '" + text + "'");
  try {
    std::size_t used = 0;
    const double v = std::stod(text.substr(prefix.size()), &used);
    if (used != text.size() - prefix.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::logic_error&) {
    throw ConfigError("--slice: cannot parse angle in '" + text + "'");
  }
}

SerMap run_heatmap(const RunConfig& cfg, const std::vector<TmIrsConfig>& configs, const HeatmapOptions& options) {
  if (configs.empty()) throw std::invalid_argument("heatmap needs at least one configuration");
  SweepGrid grid = cfg.sweep.grid;
  if (options.slice_phi) grid.phi_min = grid.phi_max = *options.slice_phi;
  Schedule schedule;
  if (options.schedule_block) {
    schedule = make_cyclic_schedule(configs, *options.schedule_block, cfg.sweep.ofdm_symbols);
  } else {
    if (options.index >= configs.size())
      throw std::invalid_argument("--index " + std::to_string(options.index) + " is out of range");
    schedule.push_back({configs[options.index], cfg.sweep.ofdm_symbols});
  }
  return sweep_heatmap(schedule, cfg.system, grid, cfg.seed(), cfg.threads);
}

SerMap cmd_heatmap(const RunConfig& cfg, const fs::path& configs_csv, const HeatmapOptions& options,
                   const fs::path& out_csv) {
  std::vector<TmIrsConfig> configs;
  for (auto& r : read_configs_csv(configs_csv)) configs.push_back(std::move(r.config));
  SerMap map = run_heatmap(cfg, configs, options);
  {
    auto out = open_out(out_csv);
    write_ser_csv(out, map);
  }
  if (options.plot_csv) {
    auto out = open_out(*options.plot_csv);
    write_ser_plot_csv(out, map);
  }
  return map;
}

void write_oracle_csv(std::ostream& out, const OracleCheck& check) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%llu,%d\n", check.distance.l1, check.distance.logz_error,
                check.logz, check.distance.log_partition, static_cast<unsigned long long>(check.distance.samples),
                check.pass ? 1 : 0);
  out << "l1,logz_error,logz,ln_z,samples,pass\n" << buf;
}

OracleCheck cmd_oracle_check(const RunConfig& cfg, const fs::path& checkpoint, const fs::path& out_csv) {
  const Checkpoint ck = load_checkpoint(checkpoint);
  const Problem problem = make_problem(cfg);
  if (ck.params.input_size() != problem.mdp.state_size())
    throw ConfigError("checkpoint network does not match the configured MDP state size");
  const auto terminals = enumerate_terminals(problem, EnumerationOrder::last_fastest, cfg.oracle.max_terminals);
  Rng rng = make_stream(cfg.seed(), {3});
  OracleCheck check;
  check.distance = distribution_distance(ck.params, problem, terminals, cfg.oracle.samples, rng);
  check.logz = ck.params.logz;
  check.pass = check.distance.l1 <= cfg.oracle.l1_threshold && check.distance.logz_error <= cfg.oracle.logz_threshold;
  auto out = open_out(out_csv);
  write_oracle_csv(out, check);
  return check;
}

std::vector<ConfigRecord> baseline_configs(const RunConfig& cfg, std::size_t random_count) {
  SystemConfig steer_sys = cfg.system;
  steer_sys.users = {cfg.system.users.front()};
  steer_sys.xi = {cfg.system.xi.front()};

  TmIrsConfig steered(cfg.system.mx, cfg.system.mz);
  steered.c_phase = steering_phases(steer_sys);
  std::fill(steered.dtau.begin(), steered.dtau.end(), 1.0);
  std::vector<ConfigRecord> records{{steered, reward(steered, cfg.system, cfg.grid.mode)}};

  const Problem problem = make_problem(cfg);
  const Mdp& mdp = problem.mdp;
  Rng rng = make_stream(cfg.seed(), {4});
  for (std::size_t i = 0; i < random_count; ++i) {
    std::vector<int> levels(static_cast<std::size_t>(mdp.sub_blocks()));
    for (int sb = 0; sb < mdp.sub_blocks(); ++sb) {
      const int q = mdp.levels(mdp.kinds()[static_cast<std::size_t>(sb % mdp.kinds_per_element())]);
      levels[static_cast<std::size_t>(sb)] = static_cast<int>(uniform01(rng) * q);
    }
    TmIrsConfig c = problem.decode(mdp.from_levels(levels));
    const double r = problem.reward(c);
    records.push_back({std::move(c), r});
  }
  return records;
}

void cmd_baseline(const RunConfig& cfg, std::size_t random_count, const fs::path& out_dir,
                  const HeatmapOptions& options) {
  const auto records = baseline_configs(cfg, random_count);
  {
    auto out = open_out(out_dir / "baseline_configs.csv");
    write_configs_csv(out, records);
  }
  HeatmapOptions opts = options;
  opts.schedule_block.reset();
  opts.index = 0;
  std::vector<TmIrsConfig> configs{records.front().config};
  const SerMap map = run_heatmap(cfg, configs, opts);
  auto out = open_out(out_dir / "baseline_heatmap.csv");
  write_ser_csv(out, map);
  if (opts.plot_csv) {
    auto plot = open_out(*opts.plot_csv);
    write_ser_plot_csv(plot, map);
  }
}

}  // namespace tmirs::app
