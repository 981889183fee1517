#include "tmirs/simulator.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace tmirs {

Constellation Constellation::qpsk() {
  const double a = 1.0 / std::sqrt(2.0);
  return {"QPSK", {{a, a}, {a, -a}, {-a, a}, {-a, -a}}, 2};
}

int Constellation::nearest(cplx y) const {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double d = std::norm(y - points[i]);
    if (d < best_d) {  // strict: ties go to the lower index
      best_d = d;
      best = static_cast<int>(i);
    }
  }
  return best;
}

std::vector<cplx> receive_subcarriers(std::span<const cplx> symbols, const HarmonicTable& table,
                                      double eta, double sigma2, Rng& rng) {
  const int k = table.k_sub;
  if (table.coeffs.size() != static_cast<std::size_t>(2 * k - 1))
    throw std::invalid_argument("harmonic table length must be 2K-1");
  if (symbols.size() != static_cast<std::size_t>(k))
    throw std::invalid_argument("symbol count must equal the subcarrier count");
  if (!(sigma2 >= 0.0)) throw std::invalid_argument("noise variance must be non-negative");

  const double gain = std::sqrt(eta);
  std::vector<cplx> y(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    cplx acc{0.0, 0.0};
    for (int kk = 0; kk < k; ++kk) acc += symbols[static_cast<std::size_t>(kk)] * table.at(i - kk);
    y[static_cast<std::size_t>(i)] = gain * acc;
  }
  if (sigma2 > 0.0) {
    std::normal_distribution<double> noise(0.0, std::sqrt(sigma2 / 2.0));
    for (auto& v : y) {
      const double re = noise(rng);
      const double im = noise(rng);
      v += cplx{re, im};
    }
  }
  return y;
}

std::vector<int> detect(std::span<const cplx> received, const HarmonicTable& table, double eta,
                        const Constellation& constellation) {
  const double scale = 1.0 / (std::sqrt(eta) * std::max(std::abs(table.v0()), kAgcFloor));
  std::vector<int> out(received.size());
  for (std::size_t i = 0; i < received.size(); ++i) out[i] = constellation.nearest(received[i] * scale);
  return out;
}

SerCount count_symbol_errors(const HarmonicTable& table, const SystemConfig& sys,
                             std::uint64_t n_ofdm_symbols, Rng& rng,
                             const Constellation& constellation) {
  const auto k = static_cast<std::size_t>(table.k_sub);
  const double eta = sys.eta();
  const double sigma2 = sys.noise_variance();
  std::uniform_int_distribution<int> pick(0, static_cast<int>(constellation.size()) - 1);

  SerCount count;
  std::vector<int> sent(k);
  std::vector<cplx> symbols(k);
  for (std::uint64_t s = 0; s < n_ofdm_symbols; ++s) {
    for (std::size_t i = 0; i < k; ++i) {
      sent[i] = pick(rng);
      symbols[i] = constellation.points[static_cast<std::size_t>(sent[i])];
    }
    const auto y = receive_subcarriers(symbols, table, eta, sigma2, rng);
    const auto decided = detect(y, table, eta, constellation);
    for (std::size_t i = 0; i < k; ++i) count.errors += decided[i] != sent[i] ? 1 : 0;
    count.trials += k;
  }
  return count;
}

double estimate_ser(const TmIrsConfig& cfg, const SystemConfig& sys, Direction dir,
                    std::uint64_t n_ofdm_symbols, Rng& rng) {
  if (n_ofdm_symbols == 0) throw std::invalid_argument("at least one OFDM symbol is required");
  return count_symbol_errors(harmonic_table(cfg, sys, dir), sys, n_ofdm_symbols, rng).ser();
}

double qpsk_ser_awgn(double gamma) {
  const double q = 0.5 * std::erfc(std::sqrt(gamma) / std::sqrt(2.0));
  return 1.0 - (1.0 - q) * (1.0 - q);
}

namespace {

std::vector<double> axis(double lo, double hi, double step) {
  const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = lo + static_cast<double>(i) * step;
  return v;
}

}  // namespace

void SweepGrid::validate() const {
  for (double x : {theta_min, theta_max, theta_step, phi_min, phi_max, phi_step})
    if (!std::isfinite(x)) throw std::invalid_argument("sweep: bounds must be finite");
  if (!(theta_step > 0.0)) throw std::invalid_argument("sweep.theta_step: must be > 0");
  if (!(phi_step > 0.0)) throw std::invalid_argument("sweep.phi_step: must be > 0");
  if (theta_max < theta_min) throw std::invalid_argument("sweep.theta_max: must be >= theta_min");
  if (phi_max < phi_min) throw std::invalid_argument("sweep.phi_max: must be >= phi_min");
}

std::vector<double> SweepGrid::thetas() const { return axis(theta_min, theta_max, theta_step); }
std::vector<double> SweepGrid::phis() const { return axis(phi_min, phi_max, phi_step); }

Schedule make_cyclic_schedule(const std::vector<TmIrsConfig>& configs, std::uint64_t block_symbols,
                              std::uint64_t total_symbols) {
  if (configs.empty()) throw std::invalid_argument("schedule needs at least one configuration");
  if (block_symbols == 0) throw std::invalid_argument("schedule block must be at least one symbol");
  Schedule schedule;
  std::uint64_t sent = 0;
  for (std::size_t i = 0; sent < total_symbols; ++i) {
    const std::uint64_t n = std::min(block_symbols, total_symbols - sent);
    schedule.push_back({configs[i % configs.size()], n});
    sent += n;
  }
  return schedule;
}

Rng cell_stream(std::uint64_t seed, std::uint64_t cell, std::uint64_t position) {
  return make_stream(seed, {cell, position});
}

SerMap sweep_heatmap(const Schedule& schedule, const SystemConfig& sys, const SweepGrid& grid,
                     std::uint64_t seed, unsigned threads) {
  if (schedule.empty()) throw std::invalid_argument("schedule must not be empty");
  grid.validate();

  const auto thetas = grid.thetas();
  const auto phis = grid.phis();
  SerMap map{grid, std::vector<SerCell>(thetas.size() * phis.size()), seed};

  auto run_cell = [&](std::size_t cell) {
    const Direction dir{thetas[cell % thetas.size()], phis[cell / thetas.size()]};
    SerCount total;
    for (std::size_t p = 0; p < schedule.size(); ++p) {
      if (schedule[p].ofdm_symbols == 0) continue;
      Rng rng = cell_stream(seed, cell, p);
      total += count_symbol_errors(harmonic_table(schedule[p].config, sys, dir), sys,
                                   schedule[p].ofdm_symbols, rng);
    }
    map.cells[cell] = {dir, total.ser(), total.trials};
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(map.cells.size())));
  if (workers == 1) {
    for (std::size_t c = 0; c < map.cells.size(); ++c) run_cell(c);
    return map;
  }
  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t c = next++; c < map.cells.size(); c = next++) run_cell(c);
      });
  }
  return map;
}

double log_offset(double ser) { return ser + kLogPlotOffset; }

namespace {

void write_rows(std::ostream& out, const SerMap& map, const char* ser_column, bool offset) {
  out << "theta,phi," << ser_column << ",n_symbols\n";
  char buf[128];
  for (const auto& c : map.cells) {
    std::snprintf(buf, sizeof buf, "%.6f,%.6f,%.17g,%llu\n", c.direction.theta_deg, c.direction.phi_deg,
                  offset ? log_offset(c.ser) : c.ser, static_cast<unsigned long long>(c.n_symbols));
    out << buf;
  }
}

}  // namespace

void write_ser_csv(std::ostream& out, const SerMap& map) { write_rows(out, map, "ser", false); }

void write_ser_plot_csv(std::ostream& out, const SerMap& map) { write_rows(out, map, "ser_plot", true); }

}  // namespace tmirs
