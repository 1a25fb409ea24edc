#include "vostrack/lap.hpp"

#include <algorithm>
#include <limits>

#include "vostrack/errors.hpp"

namespace vostrack {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Lexicographically first optimum over all injections of rows into columns.
// Only sensible for small tables; the caller guards the size.
void enumerate(const std::vector<std::vector<double>>& score, std::size_t row,
               std::vector<int>& current, std::vector<bool>& used, double gain,
               std::vector<int>& best, double& best_gain) {
    const std::size_t rows = score.size();
    if (row == rows) {
        if (gain > best_gain) {
            best_gain = gain;
            best = current;
        }
        return;
    }
    const std::size_t cols = score[0].size();
    for (std::size_t col = 0; col < cols; ++col) {
        if (used[col]) continue;
        used[col] = true;
        current[row] = static_cast<int>(col);
        enumerate(score, row + 1, current, used, gain + score[row][col], best, best_gain);
        used[col] = false;
    }
    current[row] = -1;
}

std::vector<int> solve_exhaustive(const std::vector<std::vector<double>>& score) {
    std::vector<int> current(score.size(), -1);
    std::vector<int> best(score.size(), -1);
    std::vector<bool> used(score[0].size(), false);
    double best_gain = -1.0;
    enumerate(score, 0, current, used, 0.0, best, best_gain);
    return best;
}

// Shortest-augmenting-path assignment with row/column potentials, on a cost
// table with rows <= cols. Returns per-row column, minimizing total cost.
std::vector<int> solve_min_cost(const std::vector<std::vector<double>>& cost) {
    const int n = static_cast<int>(cost.size());
    const int m = static_cast<int>(cost[0].size());
    std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
    std::vector<int> owner(m + 1, 0), way(m + 1, 0);
    for (int i = 1; i <= n; ++i) {
        owner[0] = i;
        int j0 = 0;
        std::vector<double> minv(m + 1, kInf);
        std::vector<bool> used(m + 1, false);
        do {
            used[j0] = true;
            const int i0 = owner[j0];
            int j1 = -1;
            double delta = kInf;
            for (int j = 1; j <= m; ++j) {
                if (used[j]) continue;
                const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= m; ++j) {
                if (used[j]) {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (owner[j0] != 0);
        do {
            const int j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
        } while (j0);
    }
    std::vector<int> row_to_col(n, -1);
    for (int j = 1; j <= m; ++j)
        if (owner[j] > 0) row_to_col[owner[j] - 1] = j - 1;
    return row_to_col;
}

std::vector<std::vector<double>> transpose(const std::vector<std::vector<double>>& score) {
    std::vector<std::vector<double>> out(score[0].size(),
                                         std::vector<double>(score.size()));
    for (std::size_t r = 0; r < score.size(); ++r)
        for (std::size_t c = 0; c < score[0].size(); ++c) out[c][r] = score[r][c];
    return out;
}

std::vector<int> solve_oriented(const std::vector<std::vector<double>>& score) {
    // rows <= cols here
    double top = 0.0;
    for (const auto& row : score)
        for (double value : row) {
            if (value < 0.0)
                raise(ErrorCode::input, "assignment gains must be non-negative");
            top = std::max(top, value);
        }
    if (score.size() <= 8 && score[0].size() <= 8) return solve_exhaustive(score);
    std::vector<std::vector<double>> cost(score.size(),
                                          std::vector<double>(score[0].size()));
    for (std::size_t r = 0; r < score.size(); ++r)
        for (std::size_t c = 0; c < score[0].size(); ++c) cost[r][c] = top - score[r][c];
    return solve_min_cost(cost);
}

}  // namespace

std::vector<int> solve_max_assignment(const std::vector<std::vector<double>>& score) {
    if (score.empty()) return {};
    if (score[0].empty()) return std::vector<int>(score.size(), -1);
    if (score.size() <= score[0].size()) return solve_oriented(score);
    const std::vector<int> col_to_row = solve_oriented(transpose(score));
    std::vector<int> row_to_col(score.size(), -1);
    for (std::size_t col = 0; col < col_to_row.size(); ++col)
        if (col_to_row[col] >= 0) row_to_col[col_to_row[col]] = static_cast<int>(col);
    return row_to_col;
}

double assignment_gain(const std::vector<std::vector<double>>& score,
                       const std::vector<int>& row_to_col) {
    double gain = 0.0;
    for (std::size_t row = 0; row < row_to_col.size(); ++row)
        if (row_to_col[row] >= 0) gain += score[row][row_to_col[row]];
    return gain;
}

}  // namespace vostrack
