// matching.hpp - maximum-weight bipartite matching (Kuhn-Munkres)
#pragma once

#include <cstdint>
#include <limits>
#include <vector>

namespace saev {

/// Maximum-weight matching over a dense weight matrix. Negative weights mark
/// forbidden pairs; zero-weight matches are dropped, so the result is the
/// matching maximizing the sum of strictly positive weights. Returns, per row,
/// the matched column or -1.
///
/// Works on the square padding of the matrix with zero weights, which is
/// equivalent because all admissible weights are non-negative.
inline std::vector<int> max_weight_matching(const std::vector<std::vector<double>>& weight) {
  const int rows = static_cast<int>(weight.size());
  const int cols = rows ? static_cast<int>(weight[0].size()) : 0;
  if (rows == 0 || cols == 0) return std::vector<int>(rows, -1);
  const int n = std::max(rows, cols);

  // Kuhn-Munkres on the cost matrix c = -w (minimization), 1-based arrays.
  auto cost = [&](int i, int j) -> double {
    if (i < rows && j < cols && weight[i][j] > 0.0) return -weight[i][j];
    return 0.0;  // padding and non-viable pairs
  };

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      int i0 = p[j0], j1 = 0;
      double delta = inf;
      for (int j = 1; j <= n; ++j)
        if (!used[j]) {
          double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
          if (cur < minv[j]) {
            minv[j] = cur;
            way[j] = j0;
          }
          if (minv[j] < delta) {
            delta = minv[j];
            j1 = j;
          }
        }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }

  std::vector<int> match(rows, -1);
  for (int j = 1; j <= n; ++j) {
    int i = p[j];
    if (i >= 1 && i <= rows && j <= cols && weight[i - 1][j - 1] > 0.0) match[i - 1] = j - 1;
  }
  return match;
}

}  // namespace saev
