#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace spikerl {

enum class Action : std::uint8_t { Up = 0, Down = 1, Left = 2, Right = 3 };

inline constexpr int kNumActions = 4;
inline constexpr std::array<Action, kNumActions> kAllActions = {Action::Up, Action::Down, Action::Left,
                                                                Action::Right};

constexpr int action_index(Action a) { return static_cast<int>(a); }
Action action_from_index(int index);
std::string_view action_name(Action a);

// Grid position, 1-based; row 1 is the top row, col 1 the left column.
struct Cell {
  int row = 1;
  int col = 1;

  friend bool operator==(const Cell&, const Cell&) = default;
};

using AgentState = Cell;

// Deterministic windy grid world. Wind pushes the agent towards row 1.
struct GridSpec {
  int rows = 7;
  int cols = 10;
  std::vector<int> wind = {0, 0, 0, 1, 1, 1, 2, 2, 1, 0};
  Cell start{4, 1};
  Cell goal{4, 8};
  double goal_reward = 1.0;

  bool contains(Cell c) const { return c.row >= 1 && c.row <= rows && c.col >= 1 && c.col <= cols; }
  int num_cells() const { return rows * cols; }

  // Throws std::invalid_argument describing the first violated invariant.
  void validate() const;
};

struct StepOutcome {
  Cell next;
  double reward = 0.0;
  bool done = false;
};

// The wind of the column being left is applied together with the move, then
// the result is clamped into the grid.
StepOutcome step(const GridSpec& spec, Cell s, Action a);

inline Cell reset(const GridSpec& spec) { return spec.start; }

// Minimum number of steps from start to goal (breadth-first search), or
// std::nullopt when the goal cannot be reached.
std::optional<int> shortest_path_length(const GridSpec& spec);

// All cells in row-major order.
std::vector<Cell> all_cells(const GridSpec& spec);

}  // namespace spikerl
