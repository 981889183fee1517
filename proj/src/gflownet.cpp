#include "tmirs/gflownet.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include <json.hpp>

namespace tmirs {

Problem::Problem(SystemConfig sys_, DiscretizationGrid grid) : mdp(grid, sys_.elements()), sys(std::move(sys_)) {
  sys.validate();
  if (grid.mode == ParamMode::fixed_steering && sys.users.size() != 1)
    throw std::invalid_argument("grid.mode: fixed_steering requires exactly one user");
}

double Problem::reward(const TmIrsConfig& cfg) const {
  if (reward_override) return reward_override(cfg);
  return tmirs::reward(cfg, sys, mdp.grid().mode);
}

double Trajectory::sum_forward_logp() const {
  double s = 0.0;
  for (double v : forward_logp) s += v;
  return s;
}

double Trajectory::sum_backward_logp() const {
  double s = 0.0;
  for (double v : backward_logp) s += v;
  return s;
}

namespace {

using Chooser = std::function<ActionId(std::size_t b, int t, std::span<const double> logp, const Mask& mask)>;

TrajectoryBatch rollout(const nn::PolicyParams& params, const Problem& problem, std::size_t batch_size,
                        const Chooser& choose, const PolicyOptions& options) {
  const Mdp& mdp = problem.mdp;
  const int horizon = mdp.horizon();
  const int width = mdp.state_size();
  if (params.input_size() != width) throw std::invalid_argument("network input does not match the MDP state size");

  const auto bsz = static_cast<Eigen::Index>(batch_size);
  TrajectoryBatch batch;
  batch.trajectories.resize(batch_size);
  batch.acts = nn::Activations(params, (horizon + 1) * bsz);
  batch.forward_masks.resize(static_cast<std::size_t>(horizon) * batch_size);
  std::vector<McState> states(batch_size, mdp.initial_state());

  auto& out = batch.acts.layers.back();
  for (int t = 0; t <= horizon; ++t) {
    const Eigen::Index first = t * bsz;
    for (std::size_t b = 0; b < batch_size; ++b) {
      auto row = batch.acts.input().row(first + static_cast<Eigen::Index>(b));
      for (int j = 0; j < width; ++j) row(j) = states[b].bits[static_cast<std::size_t>(j)];
    }
    nn::forward_rows(params, batch.acts, first, bsz);

    for (std::size_t b = 0; b < batch_size; ++b) {
      Trajectory& traj = batch.trajectories[b];
      const double* logits = out.row(first + static_cast<Eigen::Index>(b)).data();
      if (t > 0) {
        const ActionId undo = traj.actions.back();
        if (options.uniform_backward) {
          traj.backward_logp.push_back(-std::log(static_cast<double>(states[b].t)));
        } else {
          const auto logp = nn::masked_log_softmax({logits + width, static_cast<std::size_t>(width)},
                                                   mdp.parent_mask(states[b]));
          traj.backward_logp.push_back(logp[static_cast<std::size_t>(undo)]);
        }
      }
      if (t < horizon) {
        Mask mask = mdp.forward_mask(states[b]);
        const auto logp = nn::masked_log_softmax({logits, static_cast<std::size_t>(width)}, mask);
        const ActionId a = choose(b, t, logp, mask);
        if (a < 0 || a >= width || !mask[static_cast<std::size_t>(a)])
          throw std::logic_error("policy selected masked action " + std::to_string(a));
        traj.actions.push_back(a);
        traj.forward_logp.push_back(logp[static_cast<std::size_t>(a)]);
        states[b] = mdp.apply_action(states[b], a);
        batch.forward_masks[static_cast<std::size_t>(first) + b] = std::move(mask);
      }
    }
  }
  for (std::size_t b = 0; b < batch_size; ++b) {
    Trajectory& traj = batch.trajectories[b];
    traj.terminal = std::move(states[b]);
    traj.config = problem.decode(traj.terminal);
    traj.reward = problem.reward(traj.config);
  }
  return batch;
}

ActionId draw_action(std::span<const double> logp, const Mask& mask, Rng& rng, double epsilon) {
  if (epsilon > 0.0 && uniform01(rng) < epsilon) {
    std::size_t allowed = 0;
    for (auto m : mask) allowed += m;
    auto k = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(allowed));
    for (std::size_t i = 0; i < mask.size(); ++i) {
      if (!mask[i]) continue;
      if (k-- == 0) return static_cast<ActionId>(i);
    }
  }
  const double u = uniform01(rng);
  double acc = 0.0;
  ActionId last = -1;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask[i]) continue;
    acc += std::exp(logp[i]);
    last = static_cast<ActionId>(i);
    if (u < acc) return last;
  }
  return last;  // rounding left u above the total mass
}

}  // namespace

TrajectoryBatch sample_batch(const nn::PolicyParams& params, const Problem& problem, std::span<Rng> rngs,
                             const PolicyOptions& options) {
  return rollout(
      params, problem, rngs.size(),
      [&](std::size_t b, int, std::span<const double> logp, const Mask& mask) {
        return draw_action(logp, mask, rngs[b], options.epsilon);
      },
      options);
}

TrajectoryBatch replay_batch(const nn::PolicyParams& params, const Problem& problem,
                             const std::vector<std::vector<ActionId>>& actions, const PolicyOptions& options) {
  for (const auto& seq : actions)
    if (seq.size() != static_cast<std::size_t>(problem.mdp.horizon()))
      throw std::invalid_argument("replayed action sequence must span the full horizon");
  return rollout(
      params, problem, actions.size(),
      [&](std::size_t b, int t, std::span<const double>, const Mask&) { return actions[b][static_cast<std::size_t>(t)]; },
      options);
}

Trajectory sample_trajectory(const nn::PolicyParams& params, const Problem& problem, Rng& rng,
                             const PolicyOptions& options) {
  auto batch = sample_batch(params, problem, std::span<Rng>(&rng, 1), options);
  return std::move(batch.trajectories.front());
}

double tb_log_ratio(const Trajectory& traj, double logz, double reward_floor) {
  return logz + traj.sum_forward_logp() - std::log(std::max(traj.reward, reward_floor)) - traj.sum_backward_logp();
}

double tb_loss(const Trajectory& traj, double logz, double reward_floor) {
  const double r = tb_log_ratio(traj, logz, reward_floor);
  return r * r;
}

BatchLoss tb_gradients(const nn::PolicyParams& params, const TrajectoryBatch& batch, const PolicyOptions& options,
                       double reward_floor) {
  const std::size_t bsz = batch.size();
  const int width = params.input_size();
  const Eigen::Index rows = batch.acts.rows();
  const int horizon = static_cast<int>(rows / static_cast<Eigen::Index>(bsz)) - 1;
  const auto& out = batch.acts.output();
  const auto& in = batch.acts.layers.front();

  nn::Matrix g = nn::Matrix::Zero(rows, params.output_size());
  BatchLoss result;
  result.losses.resize(bsz);
  double dlogz = 0.0;
  Mask parents(static_cast<std::size_t>(width));

  for (std::size_t b = 0; b < bsz; ++b) {
    const Trajectory& traj = batch.trajectories[b];
    const double ratio = tb_log_ratio(traj, params.logz, reward_floor);
    result.losses[b] = ratio * ratio;
    result.mean_loss += ratio * ratio / static_cast<double>(bsz);
    const double coef = 2.0 * ratio / static_cast<double>(bsz);
    dlogz += coef;

    for (int t = 0; t < horizon; ++t) {
      const Eigen::Index row = t * static_cast<Eigen::Index>(bsz) + static_cast<Eigen::Index>(b);
      const Mask& mask = batch.forward_masks[static_cast<std::size_t>(row)];
      const auto logp = nn::masked_log_softmax({out.row(row).data(), static_cast<std::size_t>(width)}, mask);
      for (int i = 0; i < width; ++i)
        if (mask[static_cast<std::size_t>(i)]) g(row, i) -= coef * std::exp(logp[static_cast<std::size_t>(i)]);
      g(row, traj.actions[static_cast<std::size_t>(t)]) += coef;
    }
    if (options.uniform_backward) continue;
    for (int t = 1; t <= horizon; ++t) {
      const Eigen::Index row = t * static_cast<Eigen::Index>(bsz) + static_cast<Eigen::Index>(b);
      for (int i = 0; i < width; ++i) parents[static_cast<std::size_t>(i)] = in(row, i) > 0.5 ? 1 : 0;
      const auto logp = nn::masked_log_softmax({out.row(row).data() + width, static_cast<std::size_t>(width)}, parents);
      for (int i = 0; i < width; ++i)
        if (parents[static_cast<std::size_t>(i)]) g(row, width + i) += coef * std::exp(logp[static_cast<std::size_t>(i)]);
      g(row, width + traj.actions[static_cast<std::size_t>(t - 1)]) -= coef;
    }
  }
  result.grads = nn::backprop(params, batch.acts, g);
  result.grads.logz = dlogz;
  return result;
}

namespace {

void write_dump(const std::filesystem::path& path, std::uint64_t episode, const nn::PolicyParams& params,
                const TrajectoryBatch& batch, const BatchLoss& loss) {
  if (path.empty()) return;
  nlohmann::json j;
  j["episode"] = episode;
  j["logz"] = params.logz;
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const auto& tr = batch.trajectories[b];
    j["trajectories"].push_back({{"loss", loss.losses[b]},
                                 {"reward", tr.reward},
                                 {"actions", tr.actions},
                                 {"forward_logp", tr.forward_logp},
                                 {"backward_logp", tr.backward_logp}});
  }
  std::ofstream(path) << j.dump(2) << '\n';
}

bool all_finite(const nn::Gradients& g) {
  if (!std::isfinite(g.logz)) return false;
  for (std::size_t i = 0; i < g.weights.size(); ++i)
    if (!g.weights[i].allFinite() || !g.biases[i].allFinite()) return false;
  return true;
}

}  // namespace

TrainResult train(const Problem& problem, const TrainSettings& settings, const CheckpointHook& on_checkpoint) {
  if (settings.batch_size < 1) throw std::invalid_argument("training.batch_size: must be >= 1");
  if (settings.report_stride < 1) throw std::invalid_argument("training.report_stride: must be >= 1");
  const auto start = std::chrono::steady_clock::now();

  TrainResult result;
  result.params = nn::init_params(nn::policy_dims(problem.mdp.state_size(), settings.hidden), settings.seed);
  result.report.seed = settings.seed;
  auto opt = nn::make_optimizer(result.params, settings.adam, settings.schedule);

  std::uint64_t episode = 0;
  std::uint64_t next_checkpoint = settings.checkpoint_every;
  while (episode < settings.budget) {
    const auto bsz = static_cast<std::size_t>(
        std::min<std::uint64_t>(static_cast<std::uint64_t>(settings.batch_size), settings.budget - episode));
    std::vector<Rng> rngs;
    rngs.reserve(bsz);
    for (std::size_t b = 0; b < bsz; ++b) rngs.push_back(make_stream(settings.seed, {1, episode + b}));

    TrajectoryBatch batch;
    try {
      batch = sample_batch(result.params, problem, rngs, settings.policy);
    } catch (const std::domain_error& e) {
      write_dump(settings.dump_path, episode, result.params, batch, {});
      throw NumericalAbort(std::string("policy diverged at episode ") + std::to_string(episode) + ": " + e.what(),
                           settings.dump_path);
    }
    const auto loss = tb_gradients(result.params, batch, settings.policy, settings.reward_floor);
    if (!std::isfinite(loss.mean_loss) || !all_finite(loss.grads)) {
      write_dump(settings.dump_path, episode, result.params, batch, loss);
      throw NumericalAbort("non-finite TB loss at episode " + std::to_string(episode), settings.dump_path);
    }

    double reward_mean = 0.0;
    for (const auto& tr : batch.trajectories) reward_mean += tr.reward / static_cast<double>(bsz);
    for (std::size_t b = 0; b < bsz; ++b) {
      const std::uint64_t e = episode + b;
      if (e % settings.report_stride == 0)
        result.report.rows.push_back({e, loss.losses[b], result.params.logz, reward_mean});
    }

    nn::optimizer_step(result.params, opt, loss.grads, opt.schedule.at(episode));
    episode += bsz;
    if (on_checkpoint && settings.checkpoint_every > 0 && episode >= next_checkpoint) {
      on_checkpoint(result.params, episode);
      while (next_checkpoint <= episode) next_checkpoint += settings.checkpoint_every;
    }
  }
  result.report.episodes = episode;
  result.report.wall_clock_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

void write_train_csv(std::ostream& out, const TrainReport& report) {
  out << "episode,loss,logz,reward_mean\n";
  char buf[160];
  for (const auto& r : report.rows) {
    std::snprintf(buf, sizeof buf, "%llu,%.17g,%.17g,%.17g\n", static_cast<unsigned long long>(r.episode), r.loss,
                  r.logz, r.reward_mean);
    out << buf;
  }
}

std::vector<SampledConfig> sample_configs(const nn::PolicyParams& params, const Problem& problem, std::size_t count,
                                          Rng& rng) {
  constexpr std::size_t kChunk = 64;
  std::vector<SampledConfig> out;
  out.reserve(count);
  while (out.size() < count) {
    const std::size_t n = std::min(kChunk, count - out.size());
    std::vector<Rng> rngs;
    for (std::size_t i = 0; i < n; ++i) rngs.emplace_back(splitmix64(rng()));
    auto batch = sample_batch(params, problem, rngs);
    for (auto& tr : batch.trajectories) out.push_back({std::move(tr.terminal), std::move(tr.config), tr.reward});
  }
  return out;
}

}  // namespace tmirs
