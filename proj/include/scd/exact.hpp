#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "scd/instance.hpp"
#include "scd/model.hpp"

namespace scd {

struct ScenarioSolve {
  bool feasible = false;
  std::vector<std::uint8_t> z;  // per facility, 0 where closed or not failed
  Matrix produced;              // facility x consumer, produced units
  double cost = 0.0;            // recourse + inspection fees, not yet probability-weighted
  long z_evaluated = 0;         // transportation solves performed
};

// Optimal recourse for a fixed facility selection in one scenario: enumerate
// inspection subsets of the open failed facilities (inspection elsewhere buys
// nothing and costs money), each residual problem being a transportation LP in
// delivered units with per-facility supply alpha * capacity.
ScenarioSolve solve_scenario(const ScdInstance& inst, const std::vector<std::uint8_t>& x, int s);

struct ExactResult {
  bool feasible = false;
  bool proven_optimal = false;
  Solution best;
  double optimum = std::numeric_limits<double>::infinity();
  long enumerated_x = 0;  // selections fully considered (capacity-pruned ones excluded)
  long enumerated_z = 0;  // transportation solves across all scenarios
  double wall_time_s = 0.0;
};

inline constexpr int kExactFacilityGuard = 12;

// Global optimum by enumerating facility selections. Selections whose nominal
// capacity cannot cover demand are pruned (exact: the no-inspection recourse
// is then infeasible in every scenario, and inspecting only shrinks delivered
// capacity). Runs past `time_budget_s` return the incumbent unproven.
ExactResult solve_exact(const ScdInstance& inst,
                        double time_budget_s = std::numeric_limits<double>::infinity(),
                        bool allow_large = false);

}  // namespace scd
