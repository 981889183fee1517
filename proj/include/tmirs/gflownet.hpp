#pragma once

// Trajectory-balance GFlowNet over the TM-IRS construction MDP.
//
// One network evaluation per visited state yields both policies: forward
// logits at s_t choose a_{t+1}, backward logits at s_{t+1} score undoing it.
// Trajectories in a batch advance in lockstep (every trajectory has the same
// horizon), so each step is a single batched forward pass, and the cached
// activations are reused for backpropagation.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tmirs/mdp.hpp"
#include "tmirs/nn.hpp"
#include "tmirs/physmodel.hpp"
#include "tmirs/rng.hpp"

namespace tmirs {

inline constexpr double kRewardFloor = 1e-8;

// MDP plus the reward attached to its terminal states.
struct Problem {
  Mdp mdp;
  SystemConfig sys;
  // Replaces the physical reward when set (tests, diagnostics).
  std::function<double(const TmIrsConfig&)> reward_override;

  Problem(SystemConfig sys, DiscretizationGrid grid);

  TmIrsConfig decode(const McState& s) const { return mdp.decode(s, sys); }
  double reward(const TmIrsConfig& cfg) const;
};

struct Trajectory {
  std::vector<ActionId> actions;
  std::vector<double> forward_logp;   // log P_F(s_t | s_{t-1})
  std::vector<double> backward_logp;  // log P_B(s_{t-1} | s_t)
  McState terminal;
  TmIrsConfig config;
  double reward = 0.0;

  double sum_forward_logp() const;
  double sum_backward_logp() const;
};

struct PolicyOptions {
  double epsilon = 0.0;           // probability of a uniform exploratory action
  bool uniform_backward = false;  // ablation: P_B uniform over parents
};

// A lockstep batch of trajectories with the activations of every visited
// state; row t * size() + b holds state s_t of trajectory b.
struct TrajectoryBatch {
  std::vector<Trajectory> trajectories;
  nn::Activations acts;
  std::vector<Mask> forward_masks;  // per row, for t < horizon

  std::size_t size() const { return trajectories.size(); }
};

TrajectoryBatch sample_batch(const nn::PolicyParams& params, const Problem& problem, std::span<Rng> rngs,
                             const PolicyOptions& options = {});

// Re-evaluates given action sequences under params (no sampling).
TrajectoryBatch replay_batch(const nn::PolicyParams& params, const Problem& problem,
                             const std::vector<std::vector<ActionId>>& actions, const PolicyOptions& options = {});

Trajectory sample_trajectory(const nn::PolicyParams& params, const Problem& problem, Rng& rng,
                             const PolicyOptions& options = {});

double tb_log_ratio(const Trajectory& traj, double logz, double reward_floor = kRewardFloor);
double tb_loss(const Trajectory& traj, double logz, double reward_floor = kRewardFloor);

struct BatchLoss {
  nn::Gradients grads;
  std::vector<double> losses;  // per trajectory
  double mean_loss = 0.0;
};

// Mean TB loss over the batch and its exact gradient w.r.t. every network
// parameter and logz.
BatchLoss tb_gradients(const nn::PolicyParams& params, const TrajectoryBatch& batch, const PolicyOptions& options = {},
                       double reward_floor = kRewardFloor);

struct TrainSettings {
  std::uint64_t budget = 900000;  // trajectories
  int batch_size = 16;
  std::vector<int> hidden{256, 256, 256};
  nn::LrSchedule schedule{{{700000, 1e-2}, {900000, 1e-3}}};
  nn::AdamConfig adam;
  PolicyOptions policy;
  double reward_floor = kRewardFloor;
  std::uint64_t seed = 1;
  std::uint64_t report_stride = 1;    // keep every n-th episode row
  std::uint64_t checkpoint_every = 0;  // episodes; 0 disables
  std::filesystem::path dump_path;     // written on numerical abort
};

struct TrainRow {
  std::uint64_t episode = 0;
  double loss = 0.0;
  double logz = 0.0;
  double reward_mean = 0.0;  // over the batch the episode belongs to
};

struct TrainReport {
  std::vector<TrainRow> rows;
  std::uint64_t seed = 0;
  std::string config_digest;
  double wall_clock_s = 0.0;
  std::uint64_t episodes = 0;
};

class NumericalAbort : public std::runtime_error {
 public:
  NumericalAbort(const std::string& what, std::filesystem::path dump)
      : std::runtime_error(what), dump_path(std::move(dump)) {}
  std::filesystem::path dump_path;
};

struct TrainResult {
  nn::PolicyParams params;
  TrainReport report;
};

using CheckpointHook = std::function<void(const nn::PolicyParams&, std::uint64_t episodes)>;

TrainResult train(const Problem& problem, const TrainSettings& settings, const CheckpointHook& on_checkpoint = {});

void write_train_csv(std::ostream& out, const TrainReport& report);

struct SampledConfig {
  McState state;
  TmIrsConfig config;
  double reward = 0.0;
};

// Draws terminal configurations from the forward policy with epsilon = 0.
std::vector<SampledConfig> sample_configs(const nn::PolicyParams& params, const Problem& problem, std::size_t count,
                                          Rng& rng);

}  // namespace tmirs
