#pragma once

// Deterministic construction MDP over quantized TM-IRS parameters.
//
// The state is a binary vector of M element blocks. Each block holds one
// one-hot sub-block per parameter kind (phase, turn-on, duration), or only
// (turn-on, duration) when phases are fixed by steering. An action fills one
// empty sub-block with a level, in any order, so a terminal state is reached
// after exactly kinds * M actions.
//
// ActionId layout: element-major, then kind in (phase, turn-on, duration)
// order, then level. The same layout indexes the state vector.

#include <cstdint>
#include <vector>

#include "tmirs/physmodel.hpp"

namespace tmirs {

enum class ParamKind : int { phase = 0, turn_on = 1, duration = 2 };

struct DiscretizationGrid {
  int q1 = 16;  // phase levels e^{j 2 pi q / Q1}
  int q2 = 8;   // turn-on levels q / Q2
  int q3 = 8;   // duration levels q / Q3
  ParamMode mode = ParamMode::fixed_steering;

  void validate() const;
};

using ActionId = int;
using Mask = std::vector<std::uint8_t>;

struct ActionInfo {
  int element = 0;
  ParamKind kind = ParamKind::phase;
  int level = 0;
};

struct McState {
  std::vector<std::uint8_t> bits;  // one entry per ActionId
  std::vector<int> levels;         // per sub-block, -1 while unfilled
  int t = 0;

  bool operator==(const McState&) const = default;
};

class Mdp {
 public:
  Mdp(DiscretizationGrid grid, int elements);

  const DiscretizationGrid& grid() const { return grid_; }
  int elements() const { return elements_; }
  int kinds_per_element() const { return static_cast<int>(kinds_.size()); }
  int sub_blocks() const { return elements_ * kinds_per_element(); }
  int block_size() const { return block_size_; }
  int state_size() const { return elements_ * block_size_; }
  int horizon() const { return sub_blocks(); }
  const std::vector<ParamKind>& kinds() const { return kinds_; }
  int levels(ParamKind kind) const;

  // Product of level counts over all sub-blocks, as a double (it overflows
  // integers for realistic arrays).
  double terminal_count() const;

  McState initial_state() const;
  Mask forward_mask(const McState& s) const;
  Mask parent_mask(const McState& s) const;
  // Throws std::logic_error if the action is not allowed at s.
  McState apply_action(const McState& s, ActionId a) const;
  bool is_terminal(const McState& s) const { return s.t == horizon(); }

  ActionInfo action_info(ActionId a) const;
  ActionId action_id(int element, ParamKind kind, int level) const;
  int sub_block_of(ActionId a) const;

  // Terminal states only; fixed_steering phases come from steering_phases(sys).
  TmIrsConfig decode(const McState& s, const SystemConfig& sys) const;
  // Inverse of decode for configs whose values lie exactly on the grid.
  McState encode(const TmIrsConfig& cfg) const;
  // Builds the terminal state reached by a full per-sub-block level tuple.
  McState from_levels(const std::vector<int>& levels) const;

 private:
  int kind_offset(ParamKind kind) const;

  DiscretizationGrid grid_;
  int elements_;
  std::vector<ParamKind> kinds_;
  std::vector<int> offsets_;  // per kinds_ entry, within a block
  int block_size_ = 0;
};

}  // namespace tmirs
