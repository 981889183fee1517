#pragma once

// Exhaustive ground truth for small instances, used to check that a trained
// sampler draws terminals in proportion to reward.

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "tmirs/gflownet.hpp"

namespace tmirs {

inline constexpr double kMaxEnumeratedTerminals = 1e6;

struct Terminal {
  std::vector<int> levels;  // per sub-block, in ActionId layout order
  TmIrsConfig config;
  double reward = 0.0;
};

enum class EnumerationOrder { first_fastest, last_fastest };

// Every terminal exactly once. Throws std::length_error (with the count) if
// the instance has more than max_terminals terminals.
std::vector<Terminal> enumerate_terminals(const Problem& problem,
                                          EnumerationOrder order = EnumerationOrder::last_fastest,
                                          double max_terminals = kMaxEnumeratedTerminals);

double exact_partition(const std::vector<Terminal>& terminals);

struct DistributionDistance {
  double l1 = 0.0;
  double logz_error = 0.0;
  double log_partition = 0.0;  // ln Z from enumeration
  std::uint64_t samples = 0;
};

DistributionDistance distribution_distance(const nn::PolicyParams& params, const Problem& problem,
                                           const std::vector<Terminal>& terminals, std::uint64_t n_samples, Rng& rng);

// `levels...,reward` rows, one per terminal.
void write_terminals_csv(std::ostream& out, const Problem& problem, const std::vector<Terminal>& terminals);

}  // namespace tmirs
