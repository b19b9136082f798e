#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scd/core.hpp"
#include "scd/instance.hpp"

namespace scd {

struct FirstStageSelection {
  std::vector<std::uint8_t> x;  // 1 = facility open
};

struct InspectionPlan {
  // z[l][s] = 1 when facility l's output is inspected in scenario s.
  std::vector<std::vector<std::uint8_t>> z;
};

struct FlowPlan {
  // Produced units facility -> consumer, one matrix per scenario.
  std::vector<Matrix> p;
};

struct TaintFlows {
  std::vector<Matrix> k;  // tainted units that reach the consumer
  std::vector<Matrix> d;  // tainted units caught by inspection and discarded
};

struct CostBreakdown {
  double fixed = 0.0;
  double transport = 0.0;      // clean-unit shipping, scenario-weighted
  double taint_penalty = 0.0;  // shipped-taint penalty, scenario-weighted
  double discard = 0.0;        // discard cost, scenario-weighted
  double inspection = 0.0;     // inspection fees, scenario-weighted
  double total = 0.0;
};

struct Solution {
  FirstStageSelection selection;
  InspectionPlan inspections;
  FlowPlan flows;
  TaintFlows taint;
  CostBreakdown cost;
  bool capacity_short = false;  // heuristic could not line up enough capacity
};

// Fraction of produced units that actually reaches the consumer: 1 without
// inspection (tainted units ship and count toward demand), 1 - q + r with it.
double delivered_ratio(const Scenario& sc, int l, bool inspected);

// Closed-form taint split: no inspection ships k = q*p; inspection ships the
// residual k = r*p and discards d = (q - r)*p.
TaintFlows derive_taint_flows(const FlowPlan& flows, const InspectionPlan& z,
                              const std::vector<Scenario>& scenarios);

// Five-term expected cost. Throws std::invalid_argument on dimension mismatch.
CostBreakdown evaluate_objective(const ScdInstance& inst, const Solution& sol);

// Expected recourse cost of producing one unit at l for c in scenario s.
double unit_cost_coefficient(const ScdInstance& inst, int l, int c, int s, bool inspected);

struct FeasibilityReport {
  Matrix capacity_violation;  // facility x scenario, max(0, produced - capacity)
  Matrix demand_residual;     // consumer x scenario, demand - delivered
  int linking_violations = 0; // z=1 or p>0 at a closed facility, or z without q
  double max_capacity_violation = 0.0;
  double max_demand_residual = 0.0;  // max absolute residual
  bool feasible = false;
};

FeasibilityReport check_feasibility(const ScdInstance& inst, const Solution& sol,
                                    double tol = 1e-6);

// (value - reference) / reference. Throws std::domain_error on reference <= 0.
double fractional_gap(double value, double reference);

// Delivered capacity sum_l alpha_ls * kappa_l * x_l covers demand in scenario s.
bool delivered_capacity_ok(const ScdInstance& inst, const std::vector<std::uint8_t>& x,
                           const InspectionPlan& z, int s, double tol = 1e-9);

// Solution files store x, z, sparse nonzero flows and the cost breakdown;
// taint flows are re-derived on load and the cost re-evaluated.
void save_solution(const Solution& sol, const std::string& path);
Solution load_solution(const std::string& path, const ScdInstance& inst);

}  // namespace scd
