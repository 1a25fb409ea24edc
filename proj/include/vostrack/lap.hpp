#pragma once

#include <vector>

namespace vostrack {

// score[r][c] is the gain of pairing row r with column c; all gains must be
// >= 0. Returns per-row column index (-1 when unmatched) maximizing the
// total gain. Exhaustive enumeration up to 8x8, Jonker-Volgenant style
// shortest augmenting paths with potentials beyond.
std::vector<int> solve_max_assignment(const std::vector<std::vector<double>>& score);

// Total gain of an assignment under a score table.
double assignment_gain(const std::vector<std::vector<double>>& score,
                       const std::vector<int>& row_to_col);

}  // namespace vostrack
