#include "elsim/gridworld.hpp"

#include <cmath>
#include <stdexcept>

namespace elsim {

GridWorld::GridWorld(GridSpec spec) : spec_(std::move(spec)), agent_(spec_.start) {
  if (spec_.width < 1 || spec_.height < 1) throw std::domain_error("GridWorld: empty grid");
  if (spec_.episode_len < 1) throw std::domain_error("GridWorld: episode length must be positive");
  if (spec_.walls.count(spec_.start)) throw std::domain_error("GridWorld: start inside a wall");
  for (const auto& [cell, reward] : spec_.reward_cells) {
    if (spec_.walls.count(cell)) throw std::domain_error("GridWorld: reward cell inside a wall");
  }
}

Obs GridWorld::observe(Cell c) const {
  const double dx = spec_.width > 1 ? static_cast<double>(spec_.width - 1) : 1.0;
  const double dy = spec_.height > 1 ? static_cast<double>(spec_.height - 1) : 1.0;
  return {static_cast<double>(c.x) / dx, static_cast<double>(c.y) / dy};
}

Cell GridWorld::cell_from_obs(const Obs& obs) const {
  if (obs.size() != 2) throw std::domain_error("GridWorld: observation must have 2 coordinates");
  const double dx = spec_.width > 1 ? static_cast<double>(spec_.width - 1) : 1.0;
  const double dy = spec_.height > 1 ? static_cast<double>(spec_.height - 1) : 1.0;
  return {static_cast<int>(std::lround(obs[0] * dx)), static_cast<int>(std::lround(obs[1] * dy))};
}

Obs GridWorld::reset() {
  agent_ = spec_.start;
  step_count_ = 0;
  done_ = false;
  started_ = true;
  return observe();
}

StepResult GridWorld::step(int action) {
  if (!started_) throw std::domain_error("GridWorld: step before reset");
  if (done_) throw std::domain_error("GridWorld: episode already finished");
  if (action < 0 || action >= kGridActionCount) {
    throw std::domain_error("GridWorld: action out of range");
  }
  Cell target = agent_;
  switch (action) {
    case kNorth: target.y -= 1; break;
    case kSouth: target.y += 1; break;
    case kEast: target.x += 1; break;
    case kWest: target.x -= 1; break;
  }
  const bool inside = target.x >= 0 && target.x < spec_.width && target.y >= 0 &&
                      target.y < spec_.height;
  if (inside && !spec_.walls.count(target)) agent_ = target;
  ++step_count_;
  done_ = step_count_ >= spec_.episode_len;
  StepResult result;
  result.next_obs = observe();
  auto it = spec_.reward_cells.find(agent_);
  result.extrinsic_reward = it == spec_.reward_cells.end() ? 0.0 : it->second;
  result.done = done_;
  return result;
}

namespace {
constexpr int kGridSide = 19;
constexpr int kWallLine = 9;  // middle row/column of a 19-cell side
}  // namespace

int vertical_wall_column() { return kWallLine; }

GridSpec make_empty() {
  GridSpec spec;
  spec.width = kGridSide;
  spec.height = kGridSide;
  spec.start = {kGridSide / 2, kGridSide / 2};
  return spec;
}

GridSpec make_four_rooms() {
  GridSpec spec;
  spec.width = kGridSide;
  spec.height = kGridSide;
  // Quadrants split by a cross of walls, one door per wall segment.
  const std::set<Cell> doors{{kWallLine, 4}, {kWallLine, 14}, {4, kWallLine}, {14, kWallLine}};
  for (int y = 0; y < kGridSide; ++y) {
    if (!doors.count({kWallLine, y})) spec.walls.insert({kWallLine, y});
  }
  for (int x = 0; x < kGridSide; ++x) {
    if (!doors.count({x, kWallLine})) spec.walls.insert({x, kWallLine});
  }
  spec.start = {4, 14};  // lower-left room
  return spec;
}

GridSpec make_vertical_wall(bool rewarded) {
  GridSpec spec;
  spec.width = kGridSide;
  spec.height = kGridSide;
  const Cell gap{kWallLine, 1};
  for (int y = 0; y < kGridSide; ++y) {
    const Cell c{kWallLine, y};
    if (c != gap) spec.walls.insert(c);
  }
  spec.start = {4, kGridSide / 2};
  if (rewarded) {
    for (int x = kWallLine + 1; x < kGridSide; ++x) {
      for (int y = 0; y < kGridSide; ++y) spec.reward_cells[{x, y}] = 1.0;
    }
  }
  return spec;
}

GridSpec grid_spec_from_name(const std::string& name) {
  if (name == "empty") return make_empty();
  if (name == "four-rooms") return make_four_rooms();
  if (name == "wall") return make_vertical_wall(false);
  if (name == "wall-reward") return make_vertical_wall(true);
  throw std::domain_error("unknown environment '" + name + "'");
}

std::string ascii_layout(const GridSpec& spec) {
  std::string out;
  out.reserve(static_cast<std::size_t>((spec.width + 1) * spec.height));
  for (int y = 0; y < spec.height; ++y) {
    for (int x = 0; x < spec.width; ++x) {
      const Cell c{x, y};
      char ch = '.';
      if (spec.walls.count(c)) {
        ch = '#';
      } else if (c == spec.start) {
        ch = 'S';
      } else if (spec.reward_cells.count(c)) {
        ch = '+';
      }
      out += ch;
    }
    out += '\n';
  }
  return out;
}

}  // namespace elsim
