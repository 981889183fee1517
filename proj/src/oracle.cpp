#include "tmirs/oracle.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace tmirs {

namespace {

std::string describe_count(double count, const Mdp& mdp) {
  bool uniform = true;
  double per_element = 1.0;
  for (ParamKind k : mdp.kinds()) {
    per_element *= mdp.levels(k);
    uniform = uniform && mdp.levels(k) == mdp.levels(mdp.kinds().front());
  }
  std::ostringstream s;
  s << "instance has ";
  if (uniform)
    s << mdp.levels(mdp.kinds().front()) << "^" << mdp.sub_blocks();
  else
    s << static_cast<long long>(per_element) << "^" << mdp.elements();
  s << " ~ " << count << " terminal states";
  return s.str();
}

}  // namespace

std::vector<Terminal> enumerate_terminals(const Problem& problem, EnumerationOrder order, double max_terminals) {
  const Mdp& mdp = problem.mdp;
  const double count = mdp.terminal_count();
  if (count > max_terminals)
    throw std::length_error(describe_count(count, mdp) + ", above the enumeration limit of " +
                            std::to_string(static_cast<long long>(max_terminals)));

  const int n = mdp.sub_blocks();
  std::vector<int> radix(static_cast<std::size_t>(n));
  for (int sb = 0; sb < n; ++sb)
    radix[static_cast<std::size_t>(sb)] = mdp.levels(mdp.kinds()[static_cast<std::size_t>(sb % mdp.kinds_per_element())]);

  std::vector<Terminal> out;
  out.reserve(static_cast<std::size_t>(count));
  std::vector<int> digits(static_cast<std::size_t>(n), 0);
  for (;;) {
    Terminal term;
    term.levels = digits;
    term.config = problem.decode(mdp.from_levels(digits));
    term.reward = problem.reward(term.config);
    out.push_back(std::move(term));

    // odometer increment
    int pos = order == EnumerationOrder::last_fastest ? n - 1 : 0;
    const int step = order == EnumerationOrder::last_fastest ? -1 : 1;
    for (;; pos += step) {
      if (pos < 0 || pos >= n) return out;
      auto& d = digits[static_cast<std::size_t>(pos)];
      if (++d < radix[static_cast<std::size_t>(pos)]) break;
      d = 0;
    }
  }
}

double exact_partition(const std::vector<Terminal>& terminals) {
  double z = 0.0;
  for (const auto& t : terminals) z += t.reward;
  return z;
}

DistributionDistance distribution_distance(const nn::PolicyParams& params, const Problem& problem,
                                           const std::vector<Terminal>& terminals, std::uint64_t n_samples, Rng& rng) {
  if (n_samples == 0) throw std::invalid_argument("distribution_distance needs at least one sample");
  const double z = exact_partition(terminals);
  if (!(z > 0.0)) throw std::invalid_argument("partition function is zero; target distribution undefined");

  std::map<std::vector<int>, double> target;
  for (const auto& t : terminals) target[t.levels] += t.reward / z;

  std::map<std::vector<int>, std::uint64_t> hist;
  for (auto& s : sample_configs(params, problem, static_cast<std::size_t>(n_samples), rng)) ++hist[s.state.levels];

  double l1 = 0.0;
  for (const auto& [key, p] : target) {
    const auto it = hist.find(key);
    const double q = it == hist.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(n_samples);
    l1 += std::abs(q - p);
  }
  for (const auto& [key, c] : hist)
    if (!target.contains(key)) l1 += static_cast<double>(c) / static_cast<double>(n_samples);

  const double log_z = std::log(z);
  return {l1, std::abs(params.logz - log_z), log_z, n_samples};
}

void write_terminals_csv(std::ostream& out, const Problem& problem, const std::vector<Terminal>& terminals) {
  const Mdp& mdp = problem.mdp;
  const char* names[] = {"phase", "turn_on", "duration"};
  for (int sb = 0; sb < mdp.sub_blocks(); ++sb) {
    const auto kind = mdp.kinds()[static_cast<std::size_t>(sb % mdp.kinds_per_element())];
    out << names[static_cast<int>(kind)] << '_' << sb / mdp.kinds_per_element() << ',';
  }
  out << "reward\n";
  char buf[64];
  for (const auto& t : terminals) {
    for (int level : t.levels) out << level << ',';
    std::snprintf(buf, sizeof buf, "%.17g\n", t.reward);
    out << buf;
  }
}

}  // namespace tmirs
