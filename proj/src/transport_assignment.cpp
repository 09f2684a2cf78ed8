// Dense linear assignment in the Jonker-Volgenant scheme: column reduction
// and reduction transfer build a partial assignment with feasible duals, then
// every free row gets one Dijkstra search over reduced costs followed by dual
// updates along the explored tree. The augmenting row reduction phase is left
// out; with real-valued costs it can spend very long on tiny dual decrements.

#include <algorithm>
#include <limits>
#include <utility>
#include <vector>

#include "hmlab/errors.hpp"
#include "hmlab/kernels/distance.hpp"
#include "hmlab/transport.hpp"

namespace hmlab {

Assignment solve_assignment(std::span<const double> cost, std::size_t dim) {
  if (cost.size() != dim * dim) throw InvalidArgument("assignment cost matrix must be n x n");
  Assignment result;
  if (dim == 0) return result;
  const int n = static_cast<int>(dim);
  constexpr double kInf = std::numeric_limits<double>::infinity();

  std::vector<double> u(n, 0.0), v(n, 0.0), dist(n);
  std::vector<int> col4row(n, -1), row4col(n, -1), path(n, -1), remaining(n);
  std::vector<char> seen_row(n), seen_col(n);
  auto c = [&](int i, int j) { return cost[static_cast<std::size_t>(i) * dim + j]; };

  // Column reduction.
  std::vector<int> matches(n, 0);
  for (int j = n - 1; j >= 0; --j) {
    double min = c(0, j);
    int imin = 0;
    for (int i = 1; i < n; ++i) {
      if (c(i, j) < min) {
        min = c(i, j);
        imin = i;
      }
    }
    v[j] = min;
    if (++matches[imin] == 1) {
      col4row[imin] = j;
      row4col[j] = imin;
    } else if (v[j] < v[col4row[imin]]) {
      row4col[col4row[imin]] = -1;
      col4row[imin] = j;
      row4col[j] = imin;
    }
  }
  // Reduction transfer.
  std::vector<int> free_rows;
  for (int i = 0; i < n; ++i) {
    if (matches[i] == 0) {
      free_rows.push_back(i);
    } else if (matches[i] == 1) {
      const int j1 = col4row[i];
      double min = kInf;
      for (int j = 0; j < n; ++j) {
        if (j != j1) min = std::min(min, c(i, j) - v[j]);
      }
      if (min < kInf) {
        v[j1] -= min;
        u[i] = min;
      }
    }
  }
  // Rows picked by several columns keep one of them; their u stays 0.
  for (int i = 0; i < n; ++i) {
    if (matches[i] > 1) u[i] = c(i, col4row[i]) - v[col4row[i]];
  }

  for (int cur : free_rows) {
    double min_val = 0.0;
    int num_remaining = n;
    for (int it = 0; it < n; ++it) remaining[it] = n - it - 1;
    std::fill(seen_row.begin(), seen_row.end(), 0);
    std::fill(seen_col.begin(), seen_col.end(), 0);
    std::fill(dist.begin(), dist.end(), kInf);

    int i = cur;
    int sink = -1;
    while (sink == -1) {
      seen_row[i] = 1;
      const double* row = cost.data() + static_cast<std::size_t>(i) * dim;
      const double base = min_val - u[i];
      int index = -1;
      double lowest = kInf;
      for (int it = 0; it < num_remaining; ++it) {
        const int j = remaining[it];
        const double r = base + row[j] - v[j];
        if (r < dist[j]) {
          path[j] = i;
          dist[j] = r;
        }
        if (dist[j] < lowest || (dist[j] == lowest && row4col[j] == -1)) {
          lowest = dist[j];
          index = it;
        }
      }
      min_val = lowest;
      if (index < 0 || min_val == kInf) throw Error("assignment: cost matrix is infeasible");
      const int j = remaining[index];
      if (row4col[j] == -1) {
        sink = j;
      } else {
        i = row4col[j];
      }
      seen_col[j] = 1;
      remaining[index] = remaining[--num_remaining];
    }

    u[cur] += min_val;
    for (int r = 0; r < n; ++r) {
      if (seen_row[r] && r != cur) u[r] += min_val - dist[col4row[r]];
    }
    for (int c = 0; c < n; ++c) {
      if (seen_col[c]) v[c] -= min_val - dist[c];
    }
    int j = sink;
    for (;;) {
      const int r = path[j];
      row4col[j] = r;
      std::swap(col4row[r], j);
      if (r == cur) break;
    }
  }

  result.row_to_col = col4row;
  for (int r = 0; r < n; ++r) result.cost += cost[static_cast<std::size_t>(r) * dim + col4row[r]];
  return result;
}

std::vector<double> euclidean_cost_matrix(std::span<const Point> rows, std::span<const Point> cols) {
  std::vector<double> xs(cols.size()), ys(cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j) {
    xs[j] = cols[j].x;
    ys[j] = cols[j].y;
  }
  std::vector<double> out(rows.size() * cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    kernels::distance_row(rows[i].x, rows[i].y, xs, ys,
                          std::span<double>(out).subspan(i * cols.size(), cols.size()));
  }
  return out;
}

}  // namespace hmlab
