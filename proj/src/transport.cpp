#include "scd/transport.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace scd {

TransportResult solve_transportation(const TransportationProblem& tp) {
  const int m = static_cast<int>(tp.supplies.size());
  const int n0 = static_cast<int>(tp.demands.size());
  if (m < 1 || n0 < 1) throw std::invalid_argument("solve_transportation: empty problem");
  if (tp.unit_costs.rows() != m || tp.unit_costs.cols() != n0)
    throw std::invalid_argument("solve_transportation: cost matrix shape mismatch");
  for (double s : tp.supplies)
    if (s < 0.0 || !std::isfinite(s))
      throw std::invalid_argument("solve_transportation: bad supply");
  for (double d : tp.demands)
    if (d < 0.0 || !std::isfinite(d))
      throw std::invalid_argument("solve_transportation: bad demand");

  const double total_supply = std::accumulate(tp.supplies.begin(), tp.supplies.end(), 0.0);
  const double total_demand = std::accumulate(tp.demands.begin(), tp.demands.end(), 0.0);
  const double scale = std::max({1.0, total_supply, total_demand});
  if (total_supply < total_demand - 1e-9 * scale) return {};  // cannot meet demand

  // Balance with a dummy sink that soaks up surplus supply at zero cost.
  const int n = n0 + 1;
  std::vector<double> a = tp.supplies;
  std::vector<double> b = tp.demands;
  b.push_back(std::max(0.0, total_supply - total_demand));

  double cmax = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n0; ++j) cmax = std::max(cmax, std::abs(tp.unit_costs(i, j)));
  const double eps_rc = 1e-9 * (1.0 + cmax);
  auto cost_at = [&](int i, int j) { return j < n0 ? tp.unit_costs(i, j) : 0.0; };

  Matrix x(m, n);
  std::vector<std::vector<char>> basic(m, std::vector<char>(n, 0));

  // Northwest-corner start: walks a staircase, one basic cell per step, which
  // is always a spanning tree of the bipartite source/sink graph.
  {
    int i = 0, j = 0;
    for (int step = 0; step < m + n - 1; ++step) {
      basic[i][j] = 1;
      const double q = std::min(a[i], b[j]);
      x(i, j) = q;
      a[i] -= q;
      b[j] -= q;
      if (step == m + n - 2) break;
      if (i == m - 1) ++j;
      else if (j == n - 1) ++i;
      else if (a[i] <= 0.0) ++i;
      else ++j;
    }
  }

  std::vector<double> u(m), v(n);
  std::vector<char> useen(m), vseen(n);
  std::vector<std::pair<char, int>> stack;  // (0 = source, 1 = sink, index)
  const long max_pivots = 2000L * (m + n) * (m + n);

  for (long pivot = 0;; ++pivot) {
    if (pivot > max_pivots)
      throw std::runtime_error("solve_transportation: pivot limit exceeded");

    // Potentials from the basis tree: u_i + v_j = c_ij on basic cells.
    std::fill(useen.begin(), useen.end(), 0);
    std::fill(vseen.begin(), vseen.end(), 0);
    u[0] = 0.0;
    useen[0] = 1;
    stack.assign(1, {0, 0});
    while (!stack.empty()) {
      auto [kind, idx] = stack.back();
      stack.pop_back();
      if (kind == 0) {
        for (int j = 0; j < n; ++j)
          if (basic[idx][j] && !vseen[j]) {
            v[j] = cost_at(idx, j) - u[idx];
            vseen[j] = 1;
            stack.push_back({1, j});
          }
      } else {
        for (int i = 0; i < m; ++i)
          if (basic[i][idx] && !useen[i]) {
            u[i] = cost_at(i, idx) - v[idx];
            useen[i] = 1;
            stack.push_back({0, i});
          }
      }
    }

    // Entering cell: Bland's rule, first negative reduced cost row-major.
    int ei = -1, ej = -1;
    for (int i = 0; i < m && ei < 0; ++i)
      for (int j = 0; j < n; ++j)
        if (!basic[i][j] && cost_at(i, j) - u[i] - v[j] < -eps_rc) {
          ei = i;
          ej = j;
          break;
        }
    if (ei < 0) break;  // optimal

    // Unique tree path source ei -> sink ej; with the entering cell it closes
    // the pivot cycle. parent[] is over nodes: sources 0..m-1, sinks m..m+n-1.
    std::vector<int> parent(m + n, -2);
    parent[ei] = -1;
    stack.assign(1, {0, ei});
    while (!stack.empty()) {
      auto [kind, idx] = stack.back();
      stack.pop_back();
      if (kind == 0) {
        for (int j = 0; j < n; ++j)
          if (basic[idx][j] && parent[m + j] == -2) {
            parent[m + j] = idx;
            stack.push_back({1, j});
          }
      } else {
        for (int i = 0; i < m; ++i)
          if (basic[i][idx] && parent[i] == -2) {
            parent[i] = m + idx;
            stack.push_back({0, i});
          }
      }
    }

    // Node path from the entering source to the entering sink, then cells
    // along it alternate -,+,-,... after the entering cell's +.
    std::vector<int> path;  // node ids from sink ej back to source ei
    for (int node = m + ej; node != -1; node = parent[node]) path.push_back(node);
    std::reverse(path.begin(), path.end());  // now source ei ... sink ej

    std::vector<std::pair<int, int>> minus_cells, plus_cells;
    for (size_t t = 0; t + 1 < path.size(); ++t) {
      const int p0 = path[t], p1 = path[t + 1];
      const int ci = p0 < m ? p0 : p1;
      const int cj = (p0 < m ? p1 : p0) - m;
      if (t % 2 == 0) minus_cells.push_back({ci, cj});
      else plus_cells.push_back({ci, cj});
    }

    double delta = minus_cells.empty() ? 0.0 : x(minus_cells[0].first, minus_cells[0].second);
    std::pair<int, int> leaving = minus_cells.empty() ? std::pair<int, int>{-1, -1}
                                                      : minus_cells[0];
    for (const auto& [ci, cj] : minus_cells) {
      const double f = x(ci, cj);
      if (f < delta || (f == delta && std::pair<int, int>{ci, cj} < leaving)) {
        delta = f;
        leaving = {ci, cj};
      }
    }

    for (const auto& [ci, cj] : minus_cells) x(ci, cj) = std::max(0.0, x(ci, cj) - delta);
    for (const auto& [ci, cj] : plus_cells) x(ci, cj) += delta;
    x(ei, ej) += delta;
    x(leaving.first, leaving.second) = 0.0;
    basic[leaving.first][leaving.second] = 0;
    basic[ei][ej] = 1;
  }

  TransportResult res;
  res.feasible = true;
  res.flows = Matrix(m, n0);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n0; ++j) {
      res.flows(i, j) = x(i, j);
      res.cost += x(i, j) * tp.unit_costs(i, j);
    }
  return res;
}

}  // namespace scd
