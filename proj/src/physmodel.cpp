#include "tmirs/physmodel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace tmirs {

namespace {

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw std::invalid_argument(field + ": " + what);
}

bool in_unit_interval(double x) { return std::isfinite(x) && x >= 0.0 && x < 1.0; }

}  // namespace

double deg_to_rad(double deg) { return deg * (kPi / 180.0); }

double SystemConfig::noise_variance() const { return std::pow(10.0, -snr_db / 10.0); }

void SystemConfig::validate() const {
  require(mx >= 1, "system.mx", "must be >= 1");
  require(mz >= 1, "system.mz", "must be >= 1");
  require(n_tx >= 1, "system.n_tx", "must be >= 1");
  require(k_sub >= 1, "system.k_sub", "must be >= 1");
  require(std::isfinite(transmitter.theta_deg) && std::isfinite(transmitter.phi_deg),
          "system.transmitter", "angles must be finite");
  require(std::isfinite(theta_irs_deg), "system.theta_irs", "must be finite");
  require(!users.empty(), "system.users", "at least one user is required");
  require(users.size() == xi.size(), "system.users",
          "xi count (" + std::to_string(xi.size()) + ") must equal user count (" +
              std::to_string(users.size()) + ")");
  for (std::size_t u = 0; u < users.size(); ++u) {
    const std::string path = "system.users[" + std::to_string(u) + "]";
    require(std::isfinite(users[u].theta_deg) && std::isfinite(users[u].phi_deg), path,
            "angles must be finite");
    require(std::isfinite(xi[u]) && xi[u] > 0.0 && xi[u] <= kPi, path + ".xi",
            "must lie in (0, pi]");
  }
  require(std::isfinite(snr_db), "system.snr_db", "must be finite");
}

TmIrsConfig::TmIrsConfig(int mx_, int mz_)
    : mx(mx_),
      mz(mz_),
      c_phase(static_cast<std::size_t>(mx_ * mz_), 0.0),
      tau_on(static_cast<std::size_t>(mx_ * mz_), 0.0),
      dtau(static_cast<std::size_t>(mx_ * mz_), 0.0) {}

void TmIrsConfig::validate() const {
  const auto m = static_cast<std::size_t>(elements());
  require(mx >= 1 && mz >= 1, "config", "shape must be at least 1x1");
  require(c_phase.size() == m && tau_on.size() == m && dtau.size() == m, "config",
          "parameter arrays must have mx*mz entries");
  for (std::size_t e = 0; e < m; ++e) {
    require(std::isfinite(c_phase[e]) && c_phase[e] >= 0.0 && c_phase[e] < kTwoPi,
            "config.c_phase[" + std::to_string(e) + "]", "must lie in [0, 2pi)");
    require(in_unit_interval(tau_on[e]), "config.tau_on[" + std::to_string(e) + "]",
            "must lie in [0, 1)");
    require(std::isfinite(dtau[e]) && dtau[e] >= 0.0 && dtau[e] <= 1.0,
            "config.dtau[" + std::to_string(e) + "]", "must lie in [0, 1]");
  }
}

cplx array_factor(int m, int n, double theta_deg, double phi_deg) {
  const double th = deg_to_rad(theta_deg);
  const double ph = deg_to_rad(phi_deg);
  const double s = std::sin(th);
  return std::polar(1.0, -kPi * (m * s * std::cos(ph) + n * s * std::sin(ph)));
}

double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }

cplx switch_fourier_coeff(int l, double tau_on, double dtau) {
  const double mag = dtau * sinc(l * kPi * dtau);
  return std::polar(mag, -l * kPi * (2.0 * tau_on + dtau));
}

namespace {

// a_mn(T) * c_mn * a_mn(dir) for every element.
std::vector<cplx> element_weights(const TmIrsConfig& cfg, const SystemConfig& sys, Direction dir) {
  std::vector<cplx> w(static_cast<std::size_t>(cfg.elements()));
  for (int m = 0; m < cfg.mx; ++m) {
    for (int n = 0; n < cfg.mz; ++n) {
      const int e = cfg.index(m, n);
      w[e] = array_factor(m, n, sys.transmitter.theta_deg, sys.transmitter.phi_deg) * cfg.c(e) *
             array_factor(m, n, dir.theta_deg, dir.phi_deg);
    }
  }
  return w;
}

void check_shape(const TmIrsConfig& cfg, const SystemConfig& sys) {
  if (cfg.mx != sys.mx || cfg.mz != sys.mz)
    throw std::invalid_argument("config shape does not match system array size");
}

}  // namespace

cplx harmonic_coeff(int l, const TmIrsConfig& cfg, const SystemConfig& sys, Direction dir) {
  check_shape(cfg, sys);
  const auto w = element_weights(cfg, sys, dir);
  cplx v{0.0, 0.0};
  for (int e = 0; e < cfg.elements(); ++e) v += w[e] * switch_fourier_coeff(l, cfg.tau_on[e], cfg.dtau[e]);
  return v;
}

HarmonicTable harmonic_table(const TmIrsConfig& cfg, const SystemConfig& sys, Direction dir) {
  check_shape(cfg, sys);
  const int k = sys.k_sub;
  HarmonicTable table{dir, k, std::vector<cplx>(static_cast<std::size_t>(2 * k - 1), cplx{})};
  const auto w = element_weights(cfg, sys, dir);
  for (int e = 0; e < cfg.elements(); ++e) {
    if (cfg.dtau[e] == 0.0) continue;
    for (int l = -(k - 1); l <= k - 1; ++l)
      table.coeffs[static_cast<std::size_t>(l + k - 1)] +=
          w[e] * switch_fourier_coeff(l, cfg.tau_on[e], cfg.dtau[e]);
  }
  return table;
}

std::vector<double> sinr_per_subcarrier(const HarmonicTable& table, double eta, double sigma2,
                                        SinrMode mode) {
  if (!(sigma2 > 0.0)) throw std::invalid_argument("noise variance must be positive");
  const int k = table.k_sub;
  if (table.coeffs.size() != static_cast<std::size_t>(2 * k - 1))
    throw std::invalid_argument("harmonic table length must be 2K-1");

  std::vector<double> power(table.coeffs.size());
  for (std::size_t j = 0; j < power.size(); ++j) power[j] = std::norm(table.coeffs[j]);
  const double p0 = power[static_cast<std::size_t>(k - 1)];

  std::vector<double> sinr(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    // harmonics that reach subcarrier i: j = i - k' for k' in [0, K-1]
    double window = 0.0;
    for (int j = i - (k - 1); j <= i; ++j) window += power[static_cast<std::size_t>(j + k - 1)];
    double interference = mode == SinrMode::consistent ? eta * (window - p0) : eta * window - p0;
    interference = std::max(interference, 0.0);
    sinr[static_cast<std::size_t>(i)] = eta * p0 / (interference + sigma2);
  }
  return sinr;
}

std::vector<double> sinr_per_subcarrier(const HarmonicTable& table, const SystemConfig& sys) {
  return sinr_per_subcarrier(table, sys.eta(), sys.noise_variance(), sys.sinr_mode);
}

double sum_rate(std::span<const double> sinrs) {
  double c = 0.0;
  for (double s : sinrs) c += std::log1p(s) / std::numbers::ln2;
  return c;
}

double total_sum_rate(const TmIrsConfig& cfg, const SystemConfig& sys) {
  double total = 0.0;
  for (const auto& user : sys.users) {
    const auto sinr = sinr_per_subcarrier(harmonic_table(cfg, sys, user), sys);
    total += sum_rate(sinr);
  }
  return total;
}

double reward(const TmIrsConfig& cfg, const SystemConfig& sys, ParamMode mode) {
  double total = 0.0;
  bool feasible = true;
  for (std::size_t u = 0; u < sys.users.size(); ++u) {
    const auto table = harmonic_table(cfg, sys, sys.users[u]);
    if (mode == ParamMode::full && !(sys.xi[u] - std::abs(std::arg(table.v0())) >= 0.0)) feasible = false;
    total += sum_rate(sinr_per_subcarrier(table, sys));
  }
  return feasible ? total : 0.0;
}

std::vector<double> steering_phases(const SystemConfig& sys) {
  if (sys.users.size() != 1)
    throw std::invalid_argument("steering phases require exactly one user");
  const Direction user = sys.users.front();
  std::vector<double> phases(static_cast<std::size_t>(sys.elements()));
  for (int m = 0; m < sys.mx; ++m) {
    for (int n = 0; n < sys.mz; ++n) {
      const cplx a = array_factor(m, n, sys.transmitter.theta_deg, sys.transmitter.phi_deg) *
                     array_factor(m, n, user.theta_deg, user.phi_deg);
      double p = -std::arg(a);
      p = std::fmod(p, kTwoPi);
      if (p < 0.0) p += kTwoPi;
      if (p >= kTwoPi) p = 0.0;
      p += 0.0;  // no negative zero
      phases[static_cast<std::size_t>(m * sys.mz + n)] = p;
    }
  }
  return phases;
}

}  // namespace tmirs
