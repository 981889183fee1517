#include "tmirs/run_config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "tmirs/checkpoint.hpp"

namespace tmirs {

using nlohmann::json;

SinrMode parse_sinr_mode(const std::string& s) {
  if (s == "consistent") return SinrMode::consistent;
  if (s == "literal") return SinrMode::literal;
  throw ConfigError("sinr mode must be 'consistent' or 'literal', got '" + s + "'");
}

std::string to_string(SinrMode m) { return m == SinrMode::consistent ? "consistent" : "literal"; }

ParamMode parse_param_mode(const std::string& s) {
  if (s == "full") return ParamMode::full;
  if (s == "fixed_steering") return ParamMode::fixed_steering;
  throw ConfigError("grid mode must be 'full' or 'fixed_steering', got '" + s + "'");
}

std::string to_string(ParamMode m) { return m == ParamMode::full ? "full" : "fixed_steering"; }

namespace {

// Reads known keys of one JSON object and rejects the rest.
class Fields {
 public:
  Fields(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_, "expected an object");
  }

  [[noreturn]] static void fail(const std::string& path, const std::string& what) {
    throw ConfigError(path + ": " + what);
  }

  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json* find(const std::string& key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void number(const std::string& key, double& dst) {
    if (const json* v = find(key)) {
      if (!v->is_number()) fail(at(key), "expected a number");
      dst = v->get<double>();
      if (!std::isfinite(dst)) fail(at(key), "must be finite");
    }
  }

  template <typename Int>
  void integer(const std::string& key, Int& dst) {
    if (const json* v = find(key)) {
      if (!v->is_number()) fail(at(key), "expected an integer");
      const double x = v->get<double>();
      if (x != std::floor(x)) fail(at(key), "expected an integer");
      if constexpr (std::is_unsigned_v<Int>) {
        if (x < 0) fail(at(key), "must be non-negative");
      }
      dst = v->is_number_float() ? static_cast<Int>(x) : v->get<Int>();
    }
  }

  void boolean(const std::string& key, bool& dst) {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) fail(at(key), "expected true or false");
      dst = v->get<bool>();
    }
  }

  bool string(const std::string& key, std::string& dst) {
    if (const json* v = find(key)) {
      if (!v->is_string()) fail(at(key), "expected a string");
      dst = v->get<std::string>();
      return true;
    }
    return false;
  }

  void finish() const {
    for (const auto& [key, value] : j_.items())
      if (!seen_.contains(key)) fail(at(key), "unknown field");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

Direction parse_direction(const json& j, const std::string& path, double* xi) {
  Fields f(j, path);
  Direction d;
  f.number("theta", d.theta_deg);
  f.number("phi", d.phi_deg);
  if (xi) f.number("xi", *xi);
  f.finish();
  return d;
}

void parse_system(const json& j, SystemConfig& sys) {
  Fields f(j, "system");
  f.integer("mx", sys.mx);
  f.integer("mz", sys.mz);
  f.integer("n_tx", sys.n_tx);
  f.integer("k_sub", sys.k_sub);
  if (const json* t = f.find("transmitter")) sys.transmitter = parse_direction(*t, "system.transmitter", nullptr);
  f.number("theta_irs", sys.theta_irs_deg);
  if (const json* users = f.find("users")) {
    if (!users->is_array()) Fields::fail("system.users", "expected an array");
    sys.users.clear();
    sys.xi.clear();
    for (std::size_t u = 0; u < users->size(); ++u) {
      double xi = kPi / 5.0;
      sys.users.push_back(parse_direction((*users)[u], "system.users[" + std::to_string(u) + "]", &xi));
      sys.xi.push_back(xi);
    }
  }
  f.number("snr_db", sys.snr_db);
  std::string mode;
  if (f.string("sinr_mode", mode)) {
    try {
      sys.sinr_mode = parse_sinr_mode(mode);
    } catch (const ConfigError& e) {
      Fields::fail("system.sinr_mode", e.what());
    }
  }
  f.number("carrier_hz", sys.carrier_hz);
  f.number("subcarrier_spacing_hz", sys.subcarrier_spacing_hz);
  f.number("symbol_duration_s", sys.symbol_duration_s);
  f.finish();
}

void parse_grid(const json& j, DiscretizationGrid& grid) {
  Fields f(j, "grid");
  f.integer("q1", grid.q1);
  f.integer("q2", grid.q2);
  f.integer("q3", grid.q3);
  std::string mode;
  if (f.string("mode", mode)) {
    try {
      grid.mode = parse_param_mode(mode);
    } catch (const ConfigError& e) {
      Fields::fail("grid.mode", e.what());
    }
  }
  f.finish();
}

void parse_training(const json& j, TrainSettings& t) {
  Fields f(j, "training");
  f.integer("budget", t.budget);
  f.integer("batch_size", t.batch_size);
  if (const json* h = f.find("hidden")) {
    if (!h->is_array() || h->empty()) Fields::fail("training.hidden", "expected a non-empty array of widths");
    t.hidden.clear();
    for (std::size_t i = 0; i < h->size(); ++i) {
      if (!(*h)[i].is_number_integer()) Fields::fail("training.hidden[" + std::to_string(i) + "]", "expected an integer");
      t.hidden.push_back((*h)[i].get<int>());
    }
  }
  if (const json* s = f.find("lr_schedule")) {
    if (!s->is_array() || s->empty()) Fields::fail("training.lr_schedule", "expected a non-empty array");
    t.schedule.pieces.clear();
    for (std::size_t i = 0; i < s->size(); ++i) {
      Fields piece((*s)[i], "training.lr_schedule[" + std::to_string(i) + "]");
      std::uint64_t until = 0;
      double lr = 0.0;
      piece.integer("until", until);
      piece.number("lr", lr);
      piece.finish();
      t.schedule.pieces.emplace_back(until, lr);
    }
  }
  if (const json* a = f.find("adam")) {
    Fields adam(*a, "training.adam");
    adam.number("beta1", t.adam.beta1);
    adam.number("beta2", t.adam.beta2);
    adam.number("epsilon", t.adam.epsilon);
    adam.finish();
  }
  f.number("logz_lr_scale", t.adam.logz_lr_scale);
  f.number("epsilon", t.policy.epsilon);
  f.boolean("uniform_backward", t.policy.uniform_backward);
  f.number("reward_floor", t.reward_floor);
  f.integer("report_stride", t.report_stride);
  f.integer("checkpoint_every", t.checkpoint_every);
  f.finish();
}

void parse_sweep(const json& j, SweepSettings& s) {
  Fields f(j, "sweep");
  f.number("theta_min", s.grid.theta_min);
  f.number("theta_max", s.grid.theta_max);
  f.number("theta_step", s.grid.theta_step);
  f.number("phi_min", s.grid.phi_min);
  f.number("phi_max", s.grid.phi_max);
  f.number("phi_step", s.grid.phi_step);
  f.integer("ofdm_symbols", s.ofdm_symbols);
  f.finish();
}

void parse_oracle(const json& j, OracleSettings& o) {
  Fields f(j, "oracle");
  f.integer("samples", o.samples);
  f.number("l1_threshold", o.l1_threshold);
  f.number("logz_threshold", o.logz_threshold);
  f.number("max_terminals", o.max_terminals);
  f.finish();
}

}  // namespace

void RunConfig::validate() const {
  try {
    system.validate();
    grid.validate();
    sweep.grid.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (grid.mode == ParamMode::fixed_steering && system.users.size() != 1)
    throw ConfigError("grid.mode: fixed_steering requires exactly one user");
  if (training.batch_size < 1) throw ConfigError("training.batch_size: must be >= 1");
  for (std::size_t i = 0; i < training.hidden.size(); ++i)
    if (training.hidden[i] < 1) throw ConfigError("training.hidden[" + std::to_string(i) + "]: must be >= 1");
  for (std::size_t i = 0; i < training.schedule.pieces.size(); ++i)
    if (!(training.schedule.pieces[i].second > 0.0))
      throw ConfigError("training.lr_schedule[" + std::to_string(i) + "].lr: must be > 0");
  if (!(training.adam.logz_lr_scale > 0.0)) throw ConfigError("training.logz_lr_scale: must be > 0");
  if (!(training.policy.epsilon >= 0.0 && training.policy.epsilon <= 1.0))
    throw ConfigError("training.epsilon: must lie in [0, 1]");
  if (!(training.reward_floor > 0.0)) throw ConfigError("training.reward_floor: must be > 0");
  if (training.report_stride < 1) throw ConfigError("training.report_stride: must be >= 1");
  if (sweep.ofdm_symbols < 1) throw ConfigError("sweep.ofdm_symbols: must be >= 1");
  if (oracle.samples < 1) throw ConfigError("oracle.samples: must be >= 1");
  if (threads < 1) throw ConfigError("threads: must be >= 1");
}

RunConfig parse_run_config(const json& j) {
  RunConfig cfg;
  Fields f(j, "");
  f.integer("seed", cfg.training.seed);
  f.integer("threads", cfg.threads);
  if (const json* v = f.find("system")) parse_system(*v, cfg.system);
  if (const json* v = f.find("grid")) parse_grid(*v, cfg.grid);
  if (const json* v = f.find("training")) parse_training(*v, cfg.training);
  if (const json* v = f.find("sweep")) parse_sweep(*v, cfg.sweep);
  if (const json* v = f.find("oracle")) parse_oracle(*v, cfg.oracle);
  f.finish();
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open config file");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_run_config(j);
}

json to_json(const RunConfig& cfg) {
  const auto& s = cfg.system;
  json users = json::array();
  for (std::size_t u = 0; u < s.users.size(); ++u)
    users.push_back({{"theta", s.users[u].theta_deg}, {"phi", s.users[u].phi_deg}, {"xi", s.xi[u]}});
  json schedule = json::array();
  for (const auto& [until, lr] : cfg.training.schedule.pieces) schedule.push_back({{"until", until}, {"lr", lr}});
  const auto& t = cfg.training;
  const auto& g = cfg.sweep.grid;
  return {
      {"seed", t.seed},
      {"threads", cfg.threads},
      {"system",
       {{"mx", s.mx},
        {"mz", s.mz},
        {"n_tx", s.n_tx},
        {"k_sub", s.k_sub},
        {"transmitter", {{"theta", s.transmitter.theta_deg}, {"phi", s.transmitter.phi_deg}}},
        {"theta_irs", s.theta_irs_deg},
        {"users", users},
        {"snr_db", s.snr_db},
        {"sinr_mode", to_string(s.sinr_mode)},
        {"carrier_hz", s.carrier_hz},
        {"subcarrier_spacing_hz", s.subcarrier_spacing_hz},
        {"symbol_duration_s", s.symbol_duration_s}}},
      {"grid", {{"q1", cfg.grid.q1}, {"q2", cfg.grid.q2}, {"q3", cfg.grid.q3}, {"mode", to_string(cfg.grid.mode)}}},
      {"training",
       {{"budget", t.budget},
        {"batch_size", t.batch_size},
        {"hidden", t.hidden},
        {"lr_schedule", schedule},
        {"adam", {{"beta1", t.adam.beta1}, {"beta2", t.adam.beta2}, {"epsilon", t.adam.epsilon}}},
        {"logz_lr_scale", t.adam.logz_lr_scale},
        {"epsilon", t.policy.epsilon},
        {"uniform_backward", t.policy.uniform_backward},
        {"reward_floor", t.reward_floor},
        {"report_stride", t.report_stride},
        {"checkpoint_every", t.checkpoint_every}}},
      {"sweep",
       {{"theta_min", g.theta_min},
        {"theta_max", g.theta_max},
        {"theta_step", g.theta_step},
        {"phi_min", g.phi_min},
        {"phi_max", g.phi_max},
        {"phi_step", g.phi_step},
        {"ofdm_symbols", cfg.sweep.ofdm_symbols}}},
      {"oracle",
       {{"samples", cfg.oracle.samples},
        {"l1_threshold", cfg.oracle.l1_threshold},
        {"logz_threshold", cfg.oracle.logz_threshold},
        {"max_terminals", cfg.oracle.max_terminals}}},
  };
}

std::string config_digest(const RunConfig& cfg) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(to_json(cfg).dump())));
  return buf;
}

}  // namespace tmirs
