#include "scd/exact.hpp"

#include <chrono>
#include <cmath>

#include "scd/transport.hpp"

namespace scd {

ScenarioSolve solve_scenario(const ScdInstance& inst, const std::vector<std::uint8_t>& x, int s) {
  const int L = inst.num_facilities();
  const int C = inst.num_consumers();
  if (static_cast<int>(x.size()) != L)
    throw std::invalid_argument("solve_scenario: selection size mismatch");
  if (s < 0 || s >= inst.num_scenarios())
    throw std::invalid_argument("solve_scenario: scenario index out of range");
  const Scenario& sc = inst.scenarios[s];

  std::vector<int> open;
  std::vector<int> failed;  // open facilities worth inspecting (q > 0)
  for (int l = 0; l < L; ++l)
    if (x[l]) {
      open.push_back(l);
      if (sc.q_eff[l] > 0.0) failed.push_back(l);
    }

  ScenarioSolve best;
  if (open.empty()) return best;

  const double demand_total = static_cast<double>(inst.total_demand());
  TransportationProblem tp;
  tp.demands.resize(C);
  for (int c = 0; c < C; ++c) tp.demands[c] = static_cast<double>(inst.consumers[c].demand);

  const int F = static_cast<int>(failed.size());
  for (std::uint32_t zmask = 0; zmask < (1u << F); ++zmask) {
    std::vector<std::uint8_t> z(L, 0);
    for (int i = 0; i < F; ++i)
      if ((zmask >> i) & 1u) z[failed[i]] = 1;

    // Delivered-unit transportation: supply alpha*kappa, cost coeff/alpha.
    std::vector<double> alpha(open.size());
    tp.supplies.assign(open.size(), 0.0);
    tp.unit_costs = Matrix(static_cast<int>(open.size()), C);
    double supply_total = 0.0;
    double inspection = 0.0;
    for (size_t oi = 0; oi < open.size(); ++oi) {
      const int l = open[oi];
      alpha[oi] = delivered_ratio(sc, l, z[l] != 0);
      tp.supplies[oi] = alpha[oi] * static_cast<double>(inst.facilities[l].capacity);
      supply_total += tp.supplies[oi];
      for (int c = 0; c < C; ++c)
        tp.unit_costs(static_cast<int>(oi), c) =
            unit_cost_coefficient(inst, l, c, s, z[l] != 0) / alpha[oi];
      if (z[l]) inspection += static_cast<double>(inst.facilities[l].inspection_cost);
    }
    if (supply_total < demand_total - 1e-9 * std::max(1.0, demand_total)) continue;

    const TransportResult tr = solve_transportation(tp);
    best.z_evaluated++;
    if (!tr.feasible) continue;
    const double cost = tr.cost + inspection;
    if (!best.feasible || cost < best.cost) {
      best.feasible = true;
      best.cost = cost;
      best.z = z;
      best.produced = Matrix(L, C);
      for (size_t oi = 0; oi < open.size(); ++oi)
        for (int c = 0; c < C; ++c)
          best.produced(open[oi], c) = tr.flows(static_cast<int>(oi), c) / alpha[oi];
    }
  }
  return best;
}

ExactResult solve_exact(const ScdInstance& inst, double time_budget_s, bool allow_large) {
  const int L = inst.num_facilities();
  const int S = inst.num_scenarios();
  if (L > kExactFacilityGuard && !allow_large)
    throw std::invalid_argument("solve_exact: " + std::to_string(L) +
                                " facilities exceed the default cap of " +
                                std::to_string(kExactFacilityGuard) +
                                "; pass allow_large to override");

  const auto t_start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  };

  const std::int64_t demand_total = inst.total_demand();
  ExactResult res;
  res.proven_optimal = true;
  double best_total = std::numeric_limits<double>::infinity();
  std::vector<std::uint8_t> best_x;
  std::vector<std::vector<std::uint8_t>> best_z;  // [L][S]
  std::vector<Matrix> best_p;

  std::vector<std::vector<std::uint8_t>> cand_z(L, std::vector<std::uint8_t>(S, 0));
  std::vector<Matrix> cand_p(S);

  for (std::uint32_t xmask = 1; xmask < (1u << L); ++xmask) {
    if (elapsed() > time_budget_s) {
      res.proven_optimal = false;
      break;
    }
    std::int64_t cap = 0;
    double fixed = 0.0;
    std::vector<std::uint8_t> x(L, 0);
    for (int l = 0; l < L; ++l)
      if ((xmask >> l) & 1u) {
        x[l] = 1;
        cap += inst.facilities[l].capacity;
        fixed += static_cast<double>(inst.facilities[l].fixed_cost);
      }
    if (cap < demand_total) continue;  // cannot cover demand in any scenario
    res.enumerated_x++;

    double total = fixed;
    bool abandoned = false;
    for (int s = 0; s < S; ++s) {
      if (total >= best_total) {  // scenario costs only add, so incumbent wins
        abandoned = true;
        break;
      }
      ScenarioSolve ss = solve_scenario(inst, x, s);
      res.enumerated_z += ss.z_evaluated;
      if (!ss.feasible) {  // unreachable after the capacity prune; stay safe
        abandoned = true;
        break;
      }
      total += inst.scenarios[s].probability * ss.cost;
      for (int l = 0; l < L; ++l) cand_z[l][s] = ss.z[l];
      cand_p[s] = std::move(ss.produced);
    }
    if (abandoned || total >= best_total) continue;
    best_total = total;
    best_x = x;
    best_z = cand_z;
    best_p = cand_p;
  }

  res.wall_time_s = elapsed();
  if (best_x.empty()) {
    res.feasible = false;
    res.proven_optimal = false;
    return res;
  }

  res.feasible = true;
  res.best.selection.x = std::move(best_x);
  res.best.inspections.z = std::move(best_z);
  res.best.flows.p = std::move(best_p);
  res.best.taint = derive_taint_flows(res.best.flows, res.best.inspections, inst.scenarios);
  res.best.cost = evaluate_objective(inst, res.best);
  res.optimum = res.best.cost.total;
  return res;
}

}  // namespace scd
