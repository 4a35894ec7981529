#ifndef ELSIM_GRIDWORLD_HPP_
#define ELSIM_GRIDWORLD_HPP_

#include <compare>
#include <map>
#include <set>
#include <string>

#include "elsim/replay_buffer.hpp"

namespace elsim {

struct Cell {
  int x = 0;
  int y = 0;
  auto operator<=>(const Cell&) const = default;
};

// Cardinal movement actions. North decreases y (rows print top-down).
enum GridAction : int { kNorth = 0, kSouth = 1, kEast = 2, kWest = 3 };
constexpr int kGridActionCount = 4;

struct GridSpec {
  int width = 19;
  int height = 19;
  std::set<Cell> walls;
  Cell start{0, 0};
  std::map<Cell, double> reward_cells;
  int episode_len = 100;
};

struct StepResult {
  Obs next_obs;
  double extrinsic_reward = 0.0;
  bool done = false;
};

// Deterministic gridworld: moves into walls or past the boundary leave
// the agent in place; episodes end by step count only.
class GridWorld {
 public:
  explicit GridWorld(GridSpec spec);

  Obs reset();
  StepResult step(int action);  // rejects stepping a finished episode

  const GridSpec& spec() const { return spec_; }
  Cell agent_cell() const { return agent_; }
  int step_count() const { return step_count_; }
  bool done() const { return done_; }

  // Corner-normalized coordinates in [0,1]^2; a bijection on cells.
  Obs observe() const { return observe(agent_); }
  Obs observe(Cell c) const;
  Cell cell_from_obs(const Obs& obs) const;

 private:
  GridSpec spec_;
  Cell agent_;
  int step_count_ = 0;
  bool done_ = false;
  bool started_ = false;
};

// Canonical 19x19 layouts.
GridSpec make_empty();
GridSpec make_four_rooms();
GridSpec make_vertical_wall(bool rewarded);

// Lookup by CLI name: empty, four-rooms, wall, wall-reward.
GridSpec grid_spec_from_name(const std::string& name);

// Map dump: '#' wall, 'S' start, '+' reward, '.' free.
std::string ascii_layout(const GridSpec& spec);

// Column of the dividing wall in the vertical-wall layouts; cells right
// of it are the rewarded side of the rewarded variant.
int vertical_wall_column();

}  // namespace elsim

#endif  // ELSIM_GRIDWORLD_HPP_
