#include "tmirs/mdp.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace tmirs {

void DiscretizationGrid::validate() const {
  if (q1 < 1) throw std::invalid_argument("grid.q1: must be >= 1");
  if (q2 < 1) throw std::invalid_argument("grid.q2: must be >= 1");
  if (q3 < 1) throw std::invalid_argument("grid.q3: must be >= 1");
}

Mdp::Mdp(DiscretizationGrid grid, int elements) : grid_(grid), elements_(elements) {
  grid_.validate();
  if (elements_ < 1) throw std::invalid_argument("MDP needs at least one element");
  if (grid_.mode == ParamMode::full) kinds_.push_back(ParamKind::phase);
  kinds_.push_back(ParamKind::turn_on);
  kinds_.push_back(ParamKind::duration);
  for (ParamKind k : kinds_) {
    offsets_.push_back(block_size_);
    block_size_ += levels(k);
  }
}

int Mdp::levels(ParamKind kind) const {
  switch (kind) {
    case ParamKind::phase: return grid_.q1;
    case ParamKind::turn_on: return grid_.q2;
    case ParamKind::duration: return grid_.q3;
  }
  return 0;
}

int Mdp::kind_offset(ParamKind kind) const {
  for (std::size_t i = 0; i < kinds_.size(); ++i)
    if (kinds_[i] == kind) return offsets_[i];
  throw std::invalid_argument("parameter kind not present in this grid mode");
}

double Mdp::terminal_count() const {
  double per_element = 1.0;
  for (ParamKind k : kinds_) per_element *= levels(k);
  return std::pow(per_element, elements_);
}

McState Mdp::initial_state() const {
  return {std::vector<std::uint8_t>(static_cast<std::size_t>(state_size()), 0),
          std::vector<int>(static_cast<std::size_t>(sub_blocks()), -1), 0};
}

ActionInfo Mdp::action_info(ActionId a) const {
  if (a < 0 || a >= state_size()) throw std::out_of_range("action id out of range");
  const int element = a / block_size_;
  const int within = a % block_size_;
  std::size_t k = kinds_.size() - 1;
  while (offsets_[k] > within) --k;
  return {element, kinds_[k], within - offsets_[k]};
}

ActionId Mdp::action_id(int element, ParamKind kind, int level) const {
  if (element < 0 || element >= elements_ || level < 0 || level >= levels(kind))
    throw std::out_of_range("action coordinates out of range");
  return element * block_size_ + kind_offset(kind) + level;
}

int Mdp::sub_block_of(ActionId a) const {
  const auto info = action_info(a);
  std::size_t k = 0;
  while (kinds_[k] != info.kind) ++k;
  return info.element * kinds_per_element() + static_cast<int>(k);
}

Mask Mdp::forward_mask(const McState& s) const {
  Mask mask(static_cast<std::size_t>(state_size()), 0);
  for (int e = 0; e < elements_; ++e) {
    for (std::size_t k = 0; k < kinds_.size(); ++k) {
      if (s.levels[static_cast<std::size_t>(e * kinds_per_element() + static_cast<int>(k))] >= 0) continue;
      const int base = e * block_size_ + offsets_[k];
      for (int q = 0; q < levels(kinds_[k]); ++q) mask[static_cast<std::size_t>(base + q)] = 1;
    }
  }
  return mask;
}

Mask Mdp::parent_mask(const McState& s) const { return s.bits; }

McState Mdp::apply_action(const McState& s, ActionId a) const {
  const int sb = sub_block_of(a);
  if (s.levels[static_cast<std::size_t>(sb)] >= 0)
    throw std::logic_error("action " + std::to_string(a) + " targets an already assigned parameter");
  McState next = s;
  next.bits[static_cast<std::size_t>(a)] = 1;
  next.levels[static_cast<std::size_t>(sb)] = action_info(a).level;
  ++next.t;
  return next;
}

McState Mdp::from_levels(const std::vector<int>& levels) const {
  if (levels.size() != static_cast<std::size_t>(sub_blocks()))
    throw std::invalid_argument("level tuple length must equal the sub-block count");
  McState s = initial_state();
  for (int sb = 0; sb < sub_blocks(); ++sb) {
    const int e = sb / kinds_per_element();
    const ParamKind kind = kinds_[static_cast<std::size_t>(sb % kinds_per_element())];
    s = apply_action(s, action_id(e, kind, levels[static_cast<std::size_t>(sb)]));
  }
  return s;
}

TmIrsConfig Mdp::decode(const McState& s, const SystemConfig& sys) const {
  if (!is_terminal(s)) throw std::invalid_argument("decode requires a terminal state");
  if (sys.elements() != elements_) throw std::invalid_argument("system size does not match the MDP");
  TmIrsConfig cfg(sys.mx, sys.mz);
  if (grid_.mode == ParamMode::fixed_steering) cfg.c_phase = steering_phases(sys);
  const int kpe = kinds_per_element();
  for (int e = 0; e < elements_; ++e) {
    for (int k = 0; k < kpe; ++k) {
      const int level = s.levels[static_cast<std::size_t>(e * kpe + k)];
      switch (kinds_[static_cast<std::size_t>(k)]) {
        case ParamKind::phase: cfg.c_phase[e] = kTwoPi * level / grid_.q1; break;
        case ParamKind::turn_on: cfg.tau_on[e] = static_cast<double>(level) / grid_.q2; break;
        case ParamKind::duration: cfg.dtau[e] = static_cast<double>(level) / grid_.q3; break;
      }
    }
  }
  return cfg;
}

namespace {

int grid_level(double value, double period, int q, const char* what) {
  const double x = value / period * q;
  const double r = std::round(x);
  if (std::abs(x - r) > 1e-9 || r < 0 || r >= q)
    throw std::invalid_argument(std::string(what) + " value is not on the grid");
  return static_cast<int>(r);
}

}  // namespace

McState Mdp::encode(const TmIrsConfig& cfg) const {
  if (cfg.elements() != elements_) throw std::invalid_argument("config size does not match the MDP");
  std::vector<int> levels(static_cast<std::size_t>(sub_blocks()));
  const int kpe = kinds_per_element();
  for (int e = 0; e < elements_; ++e) {
    for (int k = 0; k < kpe; ++k) {
      int& level = levels[static_cast<std::size_t>(e * kpe + k)];
      switch (kinds_[static_cast<std::size_t>(k)]) {
        case ParamKind::phase: level = grid_level(cfg.c_phase[e], kTwoPi, grid_.q1, "phase"); break;
        case ParamKind::turn_on: level = grid_level(cfg.tau_on[e], 1.0, grid_.q2, "turn-on"); break;
        case ParamKind::duration: level = grid_level(cfg.dtau[e], 1.0, grid_.q3, "duration"); break;
      }
    }
  }
  return from_levels(levels);
}

}  // namespace tmirs
