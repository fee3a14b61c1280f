#include "crowdpose3d/lap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace cp3d {

double Assignment::total_cost() const {
  double sum = 0.0;
  for (const auto& p : pairs) sum += p.cost;
  return sum;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Jonker-Volgenant shortest augmenting path solver for square matrices:
// column reduction, reduction transfer, two augmenting row reduction
// sweeps, then one Dijkstra-style augmentation per remaining free row
// ("A Shortest Augmenting Path Algorithm for Dense and Sparse Linear
// Assignment Problems", Computing 38, 1987).
// Returns row_to_col.
std::vector<int> lap_jv(const Eigen::MatrixXd& c) {
  const int n = static_cast<int>(c.rows());
  std::vector<int> row_to_col(n, -1);
  std::vector<int> col_to_row(n, -1);
  std::vector<double> v(n, 0.0);  // column potentials

  // Column reduction, reverse order.
  {
    std::vector<int> matches(n, 0);
    for (int j = n - 1; j >= 0; --j) {
      int imin = 0;
      double min = c(0, j);
      for (int i = 1; i < n; ++i)
        if (c(i, j) < min) {
          min = c(i, j);
          imin = i;
        }
      v[j] = min;
      if (++matches[imin] == 1) {
        row_to_col[imin] = j;
        col_to_row[j] = imin;
      } else if (v[j] < v[row_to_col[imin]]) {
        const int j1 = row_to_col[imin];
        row_to_col[imin] = j;
        col_to_row[j] = imin;
        col_to_row[j1] = -1;
      } else {
        col_to_row[j] = -1;
      }
    }

    // Reduction transfer from rows assigned exactly once.
    std::vector<int> free_rows;
    free_rows.reserve(n);
    for (int i = 0; i < n; ++i) {
      if (matches[i] == 0) {
        free_rows.push_back(i);
      } else if (matches[i] == 1) {
        const int j1 = row_to_col[i];
        double min = kInf;
        for (int j = 0; j < n; ++j)
          if (j != j1) min = std::min(min, c(i, j) - v[j]);
        if (min < kInf) v[j1] -= min;
      }
    }

    // Augmenting row reduction, two sweeps.
    for (int sweep = 0; sweep < 2; ++sweep) {
      std::size_t k = 0;
      const std::size_t prev_count = free_rows.size();
      std::size_t kept = 0;
      while (k < prev_count) {
        const int i = free_rows[k++];
        double umin = c(i, 0) - v[0];
        double usubmin = kInf;
        int j1 = 0, j2 = -1;
        for (int j = 1; j < n; ++j) {
          const double h = c(i, j) - v[j];
          if (h < usubmin) {
            if (h >= umin) {
              usubmin = h;
              j2 = j;
            } else {
              usubmin = umin;
              umin = h;
              j2 = j1;
              j1 = j;
            }
          }
        }
        int i0 = col_to_row[j1];
        if (umin < usubmin) {
          v[j1] -= usubmin - umin;
        } else if (i0 >= 0) {
          j1 = j2;
          i0 = col_to_row[j2];
        }
        row_to_col[i] = j1;
        col_to_row[j1] = i;
        if (i0 >= 0) {
          if (umin < usubmin)
            free_rows[--k] = i0;  // continue with the bumped row
          else
            free_rows[kept++] = i0;  // defer to the next phase
        }
      }
      free_rows.resize(kept);
    }

    // Shortest augmenting path for each remaining free row.
    std::vector<double> d(n);
    std::vector<int> pred(n), collist(n);
    for (const int free_row : free_rows) {
      for (int j = 0; j < n; ++j) {
        d[j] = c(free_row, j) - v[j];
        pred[j] = free_row;
        collist[j] = j;
      }

      int low = 0, up = 0, last = 0;
      int endofpath = -1;
      double min = 0.0;
      bool found = false;
      do {
        if (up == low) {
          last = low - 1;
          min = d[collist[up++]];
          for (int k2 = up; k2 < n; ++k2) {
            const int j = collist[k2];
            const double h = d[j];
            if (h <= min) {
              if (h < min) {
                up = low;
                min = h;
              }
              collist[k2] = collist[up];
              collist[up++] = j;
            }
          }
          for (int k2 = low; k2 < up; ++k2)
            if (col_to_row[collist[k2]] < 0) {
              endofpath = collist[k2];
              found = true;
              break;
            }
        }
        if (!found) {
          const int j1 = collist[low++];
          const int i = col_to_row[j1];
          const double h = c(i, j1) - v[j1] - min;
          for (int k2 = up; k2 < n; ++k2) {
            const int j = collist[k2];
            const double v2 = c(i, j) - v[j] - h;
            if (v2 < d[j]) {
              pred[j] = i;
              if (v2 == min) {
                if (col_to_row[j] < 0) {
                  endofpath = j;
                  found = true;
                  break;
                }
                collist[k2] = collist[up];
                collist[up++] = j;
              }
              d[j] = v2;
            }
          }
        }
      } while (!found);

      for (int k2 = last + 1; k2-- > 0;) {
        const int j1 = collist[k2];
        v[j1] += d[j1] - min;
      }

      // Flip assignments along the alternating path back to the free row.
      int i;
      do {
        i = pred[endofpath];
        col_to_row[endofpath] = i;
        std::swap(row_to_col[i], endofpath);
      } while (i != free_row);
    }
  }

  return row_to_col;
}

// Potential-based Hungarian algorithm (O(n^3)); kept as an independently
// coded reference path for differential testing against lap_jv.
std::vector<int> lap_hungarian(const Eigen::MatrixXd& c) {
  const int n = static_cast<int>(c.rows());
  // 1-based arrays; p[j] = row assigned to column j.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<char> used(n + 1, false);
    do {
      used[j0] = true;
      const int i0 = p[j0];
      double delta = kInf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = c(i0 - 1, j - 1) - u[i0] - v[j];
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
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= n; ++j)
    if (p[j] > 0) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

}  // namespace

Assignment solve_lap(const Eigen::MatrixXd& cost, LapAlgorithm algorithm) {
  const int rows = static_cast<int>(cost.rows());
  const int cols = static_cast<int>(cost.cols());
  if (rows < 1 || cols < 1)
    throw std::invalid_argument("solve_lap: empty cost matrix");
  if (!cost.allFinite())
    throw InvalidCost("cost matrix contains NaN or infinite entries");

  // Pad to square with dummy rows/columns so unmatched nodes are allowed.
  const int n = std::max(rows, cols);
  Eigen::MatrixXd padded(n, n);
  const double dummy = cost.maxCoeff() * 10.0;
  padded.setConstant(dummy);
  padded.topLeftCorner(rows, cols) = cost;

  const std::vector<int> row_to_col = algorithm == LapAlgorithm::kJonkerVolgenant
                                          ? lap_jv(padded)
                                          : lap_hungarian(padded);

  Assignment out;
  std::vector<char> col_matched(cols, false);
  for (int i = 0; i < rows; ++i) {
    const int j = row_to_col[i];
    if (j >= 0 && j < cols) {
      out.pairs.push_back({i, j, cost(i, j)});
      col_matched[j] = true;
    } else {
      out.unmatched_a.push_back(i);
    }
  }
  for (int j = 0; j < cols; ++j)
    if (!col_matched[j]) out.unmatched_b.push_back(j);
  return out;
}

}  // namespace cp3d
