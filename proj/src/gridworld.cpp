#include "spikerl/gridworld.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>
#include <string>

namespace spikerl {

Action action_from_index(int index) {
  if (index < 0 || index >= kNumActions) throw std::out_of_range("action index " + std::to_string(index));
  return static_cast<Action>(index);
}

std::string_view action_name(Action a) {
  switch (a) {
    case Action::Up: return "up";
    case Action::Down: return "down";
    case Action::Left: return "left";
    case Action::Right: return "right";
  }
  return "?";
}

void GridSpec::validate() const {
  if (rows < 1 || cols < 1) throw std::invalid_argument("grid: rows and cols must be positive");
  if (static_cast<int>(wind.size()) != cols)
    throw std::invalid_argument("grid.wind: expected " + std::to_string(cols) + " entries, got " +
                                std::to_string(wind.size()));
  if (std::any_of(wind.begin(), wind.end(), [](int w) { return w < 0; }))
    throw std::invalid_argument("grid.wind: entries must be non-negative");
  if (!contains(start)) throw std::invalid_argument("grid.start: outside the grid");
  if (!contains(goal)) throw std::invalid_argument("grid.goal: outside the grid");
  if (start == goal) throw std::invalid_argument("grid: start and goal coincide");
  if (!(goal_reward > 0.0)) throw std::invalid_argument("grid.goal_reward: must be positive");
}

StepOutcome step(const GridSpec& spec, Cell s, Action a) {
  int drow = 0;
  int dcol = 0;
  switch (a) {
    case Action::Up: drow = -1; break;
    case Action::Down: drow = 1; break;
    case Action::Left: dcol = -1; break;
    case Action::Right: dcol = 1; break;
  }
  const int push = spec.wind[static_cast<std::size_t>(s.col - 1)];
  StepOutcome out;
  out.next.row = std::clamp(s.row + drow - push, 1, spec.rows);
  out.next.col = std::clamp(s.col + dcol, 1, spec.cols);
  out.done = out.next == spec.goal;
  out.reward = out.done ? spec.goal_reward : 0.0;
  return out;
}

std::optional<int> shortest_path_length(const GridSpec& spec) {
  auto id = [&](Cell c) { return static_cast<std::size_t>((c.row - 1) * spec.cols + (c.col - 1)); };
  std::vector<int> dist(static_cast<std::size_t>(spec.num_cells()), -1);
  std::deque<Cell> frontier{spec.start};
  dist[id(spec.start)] = 0;
  while (!frontier.empty()) {
    const Cell c = frontier.front();
    frontier.pop_front();
    if (c == spec.goal) return dist[id(c)];
    for (Action a : kAllActions) {
      const Cell n = step(spec, c, a).next;
      if (dist[id(n)] < 0) {
        dist[id(n)] = dist[id(c)] + 1;
        frontier.push_back(n);
      }
    }
  }
  return std::nullopt;
}

std::vector<Cell> all_cells(const GridSpec& spec) {
  std::vector<Cell> cells;
  cells.reserve(static_cast<std::size_t>(spec.num_cells()));
  for (int r = 1; r <= spec.rows; ++r)
    for (int c = 1; c <= spec.cols; ++c) cells.push_back({r, c});
  return cells;
}

}  // namespace spikerl
