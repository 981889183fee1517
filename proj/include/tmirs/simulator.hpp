#pragma once

// Monte-Carlo symbol error rate of the scrambled OFDM link.
//
// Receivers scale by the magnitude of sqrt(eta) * V0 only. The V0 phase is
// left in place, which is what makes off-target directions see a rotated and
// mixed constellation.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "tmirs/physmodel.hpp"
#include "tmirs/rng.hpp"

namespace tmirs {

struct Constellation {
  std::string name;
  std::vector<cplx> points;
  int bits_per_symbol = 0;

  // Gray-mapped QPSK, unit mean energy: index b1b0 -> ((1-2b1) + j(1-2b0)) / sqrt(2).
  static Constellation qpsk();

  std::size_t size() const { return points.size(); }
  int nearest(cplx y) const;
};

inline constexpr double kAgcFloor = 1e-12;
inline constexpr double kLogPlotOffset = 1e-4;

std::vector<cplx> receive_subcarriers(std::span<const cplx> symbols, const HarmonicTable& table,
                                      double eta, double sigma2, Rng& rng);

std::vector<int> detect(std::span<const cplx> received, const HarmonicTable& table, double eta,
                        const Constellation& constellation);

struct SerCount {
  std::uint64_t errors = 0;
  std::uint64_t trials = 0;

  double ser() const { return trials == 0 ? 0.0 : static_cast<double>(errors) / trials; }
  SerCount& operator+=(const SerCount& o) {
    errors += o.errors;
    trials += o.trials;
    return *this;
  }
};

// Transmits n_ofdm_symbols random OFDM symbols through one table.
SerCount count_symbol_errors(const HarmonicTable& table, const SystemConfig& sys,
                             std::uint64_t n_ofdm_symbols, Rng& rng,
                             const Constellation& constellation = Constellation::qpsk());

double estimate_ser(const TmIrsConfig& cfg, const SystemConfig& sys, Direction dir,
                    std::uint64_t n_ofdm_symbols, Rng& rng);

// Closed-form QPSK SER at per-subcarrier SNR gamma: 1 - (1 - Q(sqrt(gamma)))^2.
double qpsk_ser_awgn(double gamma);

struct SweepGrid {
  double theta_min = -90.0;
  double theta_max = 90.0;
  double theta_step = 2.0;
  double phi_min = 0.0;
  double phi_max = 90.0;
  double phi_step = 2.0;

  void validate() const;
  std::vector<double> thetas() const;
  std::vector<double> phis() const;
  std::size_t cells() const { return thetas().size() * phis().size(); }
};

struct ScheduleEntry {
  TmIrsConfig config;
  std::uint64_t ofdm_symbols = 0;
};
using Schedule = std::vector<ScheduleEntry>;

// Cycles through configs, switching every block_symbols OFDM symbols, until
// total_symbols have been sent.
Schedule make_cyclic_schedule(const std::vector<TmIrsConfig>& configs, std::uint64_t block_symbols,
                              std::uint64_t total_symbols);

struct SerCell {
  Direction direction;
  double ser = 0.0;
  std::uint64_t n_symbols = 0;
};

struct SerMap {
  SweepGrid grid;
  std::vector<SerCell> cells;  // phi-major, theta-minor
  std::uint64_t seed = 0;
};

// Random stream used for cell `cell` and schedule position `position`.
Rng cell_stream(std::uint64_t seed, std::uint64_t cell, std::uint64_t position);

SerMap sweep_heatmap(const Schedule& schedule, const SystemConfig& sys, const SweepGrid& grid,
                     std::uint64_t seed, unsigned threads = 1);

double log_offset(double ser);

// Header `theta,phi,ser,n_symbols`; angles with 6 decimals, SER round-trippable.
void write_ser_csv(std::ostream& out, const SerMap& map);
// Same rows with ser + 1e-4, for log-scale plots only.
void write_ser_plot_csv(std::ostream& out, const SerMap& map);

}  // namespace tmirs
