#pragma once

// Frequency-domain model of an OFDM link reflected by a time-modulated IRS.
//
// Every IRS element (m, n) is switched on for a fraction dtau of each OFDM
// symbol starting at tau_on and applies a unit-modulus phase c. Switching
// creates harmonics at multiples of the subcarrier spacing, so after
// demodulation subcarrier i receives a mixture of all data symbols weighted
// by the harmonic coefficients V(i - k). Angles are degrees at every API
// boundary.

#include <complex>
#include <span>
#include <vector>

namespace tmirs {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

double deg_to_rad(double deg);

struct Direction {
  double theta_deg = 0.0;
  double phi_deg = 0.0;

  bool operator==(const Direction&) const = default;
};

enum class SinrMode {
  consistent,  // eta * (sum |V_j|^2 - |V_0|^2) + sigma^2
  literal,     // eta * sum |V_j|^2 - |V_0|^2 + sigma^2, interference floored at 0
};

// Whether phases c are chosen by the sampler or fixed to single-user steering.
enum class ParamMode { full, fixed_steering };

struct SystemConfig {
  int mx = 6;
  int mz = 6;
  int n_tx = 8;
  int k_sub = 16;
  Direction transmitter{15.0, 10.0};
  double theta_irs_deg = 0.0;  // IRS as seen from the ULA; enters only via eta
  std::vector<Direction> users{{40.0, 30.0}};
  std::vector<double> xi{kPi / 5.0};  // per-user |arg V0| threshold, radians
  double snr_db = 0.0;
  SinrMode sinr_mode = SinrMode::consistent;

  // Carried for documentation; they cancel after demodulation.
  double carrier_hz = 28.0e9;
  double subcarrier_spacing_hz = 120.0e3;
  double symbol_duration_s = 1.0 / 120.0e3;

  int elements() const { return mx * mz; }
  double eta() const { return static_cast<double>(n_tx) / k_sub; }
  double noise_variance() const;

  // Throws std::invalid_argument naming the offending field.
  void validate() const;
};

// Per-element TM parameters, element index e = m * mz + n.
struct TmIrsConfig {
  int mx = 0;
  int mz = 0;
  std::vector<double> c_phase;  // [0, 2pi)
  std::vector<double> tau_on;   // [0, 1)
  std::vector<double> dtau;     // [0, 1]; 1 is an always-on element

  TmIrsConfig() = default;
  TmIrsConfig(int mx, int mz);

  int elements() const { return mx * mz; }
  int index(int m, int n) const { return m * mz + n; }
  cplx c(int e) const { return std::polar(1.0, c_phase[e]); }

  void validate() const;
  bool operator==(const TmIrsConfig&) const = default;
};

// V(l) for l in [-(K-1), K-1] at one direction; V(0) sits at offset K-1.
struct HarmonicTable {
  Direction direction;
  int k_sub = 1;
  std::vector<cplx> coeffs;

  cplx at(int l) const { return coeffs[static_cast<std::size_t>(l + k_sub - 1)]; }
  cplx v0() const { return at(0); }
};

cplx array_factor(int m, int n, double theta_deg, double phi_deg);

double sinc(double x);

// Fourier coefficient of the periodic on/off switching waveform.
cplx switch_fourier_coeff(int l, double tau_on, double dtau);

cplx harmonic_coeff(int l, const TmIrsConfig& cfg, const SystemConfig& sys, Direction dir);

HarmonicTable harmonic_table(const TmIrsConfig& cfg, const SystemConfig& sys, Direction dir);

std::vector<double> sinr_per_subcarrier(const HarmonicTable& table, double eta, double sigma2,
                                        SinrMode mode = SinrMode::consistent);
std::vector<double> sinr_per_subcarrier(const HarmonicTable& table, const SystemConfig& sys);

double sum_rate(std::span<const double> sinrs);

double total_sum_rate(const TmIrsConfig& cfg, const SystemConfig& sys);

// Sum rate gated by every user's V0 phase constraint. With fixed steering the
// gate is dropped because V0 is real and non-negative by construction.
double reward(const TmIrsConfig& cfg, const SystemConfig& sys, ParamMode mode = ParamMode::full);

// Phases c_mn = [a_mn(T) a_mn(user)]^-1 in [0, 2pi). Single-user only.
std::vector<double> steering_phases(const SystemConfig& sys);

}  // namespace tmirs
