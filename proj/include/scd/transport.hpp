#pragma once

#include <vector>

#include "scd/core.hpp"

namespace scd {

// Classical transportation LP: ship from sources to sinks, sink demands met
// exactly, source supplies are upper bounds (slack absorbed by a zero-cost
// dummy sink internally).
struct TransportationProblem {
  std::vector<double> supplies;
  std::vector<double> demands;
  Matrix unit_costs;  // sources x sinks
};

struct TransportResult {
  bool feasible = false;  // false iff total supply < total demand
  Matrix flows;           // sources x sinks
  double cost = 0.0;
};

// Exact LP optimum via the transportation simplex (northwest-corner start,
// MODI potentials). Bland's entering rule plus lexicographic leaving ties make
// the pivot sequence cycle-free and the returned basis deterministic.
TransportResult solve_transportation(const TransportationProblem& tp);

}  // namespace scd
