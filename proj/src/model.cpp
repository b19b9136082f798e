#include "scd/model.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace scd {

using nlohmann::json;

double delivered_ratio(const Scenario& sc, int l, bool inspected) {
  return inspected ? 1.0 - sc.q_eff[l] + sc.r_eff[l] : 1.0;
}

TaintFlows derive_taint_flows(const FlowPlan& flows, const InspectionPlan& z,
                              const std::vector<Scenario>& scenarios) {
  const int S = static_cast<int>(scenarios.size());
  if (static_cast<int>(flows.p.size()) != S)
    throw std::invalid_argument("derive_taint_flows: flow/scenario count mismatch");
  TaintFlows t;
  t.k.resize(S);
  t.d.resize(S);
  for (int s = 0; s < S; ++s) {
    const Matrix& p = flows.p[s];
    const Scenario& sc = scenarios[s];
    Matrix k(p.rows(), p.cols()), d(p.rows(), p.cols());
    for (int l = 0; l < p.rows(); ++l) {
      const bool ins = z.z[l][s] != 0;
      const double q = sc.q_eff[l];
      const double r = sc.r_eff[l];
      for (int c = 0; c < p.cols(); ++c) {
        if (ins) {
          k(l, c) = r * p(l, c);
          d(l, c) = (q - r) * p(l, c);
        } else {
          k(l, c) = q * p(l, c);
          d(l, c) = 0.0;
        }
      }
    }
    t.k[s] = std::move(k);
    t.d[s] = std::move(d);
  }
  return t;
}

CostBreakdown evaluate_objective(const ScdInstance& inst, const Solution& sol) {
  const int L = inst.num_facilities();
  const int C = inst.num_consumers();
  const int S = inst.num_scenarios();
  if (static_cast<int>(sol.selection.x.size()) != L ||
      static_cast<int>(sol.inspections.z.size()) != L ||
      static_cast<int>(sol.flows.p.size()) != S ||
      static_cast<int>(sol.taint.k.size()) != S ||
      static_cast<int>(sol.taint.d.size()) != S)
    throw std::invalid_argument("evaluate_objective: dimension mismatch");
  for (int l = 0; l < L; ++l)
    if (static_cast<int>(sol.inspections.z[l].size()) != S)
      throw std::invalid_argument("evaluate_objective: inspection plan has wrong scenario count");

  CostBreakdown cb;
  for (int l = 0; l < L; ++l)
    if (sol.selection.x[l]) cb.fixed += static_cast<double>(inst.facilities[l].fixed_cost);

  for (int s = 0; s < S; ++s) {
    const Scenario& sc = inst.scenarios[s];
    const Matrix& p = sol.flows.p[s];
    const Matrix& k = sol.taint.k[s];
    const Matrix& d = sol.taint.d[s];
    if (p.rows() != L || p.cols() != C)
      throw std::invalid_argument("evaluate_objective: flow matrix has wrong shape");
    double transport = 0.0, taint = 0.0, discard = 0.0, inspection = 0.0;
    for (int l = 0; l < L; ++l) {
      const double clean = 1.0 - sc.q_eff[l];
      for (int c = 0; c < C; ++c) {
        transport += inst.costs.ship_clean(l, c) * clean * p(l, c);
        taint += inst.costs.ship_tainted(l, c) * k(l, c);
        discard += inst.costs.discard(l, c) * d(l, c);
      }
      if (sol.inspections.z[l][s])
        inspection += static_cast<double>(inst.facilities[l].inspection_cost);
    }
    cb.transport += sc.probability * transport;
    cb.taint_penalty += sc.probability * taint;
    cb.discard += sc.probability * discard;
    cb.inspection += sc.probability * inspection;
  }
  cb.total = cb.fixed + cb.transport + cb.taint_penalty + cb.discard + cb.inspection;
  return cb;
}

double unit_cost_coefficient(const ScdInstance& inst, int l, int c, int s, bool inspected) {
  const Scenario& sc = inst.scenarios[s];
  const double q = sc.q_eff[l];
  const double r = sc.r_eff[l];
  const double lam = inst.costs.ship_clean(l, c);
  if (!inspected) return lam * (1.0 - q) + inst.costs.ship_tainted(l, c) * q;
  return lam * (1.0 - q) + inst.costs.ship_tainted(l, c) * r + inst.costs.discard(l, c) * (q - r);
}

FeasibilityReport check_feasibility(const ScdInstance& inst, const Solution& sol, double tol) {
  const int L = inst.num_facilities();
  const int C = inst.num_consumers();
  const int S = inst.num_scenarios();
  FeasibilityReport rep;
  rep.capacity_violation = Matrix(L, S);
  rep.demand_residual = Matrix(C, S);

  for (int s = 0; s < S; ++s) {
    const Scenario& sc = inst.scenarios[s];
    const Matrix& p = sol.flows.p[s];
    const Matrix& k = sol.taint.k[s];
    for (int l = 0; l < L; ++l) {
      // Tainted output either ships or is discarded, so sum_c p is exactly the
      // load a facility puts on its capacity.
      const double produced = p.row_sum(l);
      const double cap = sol.selection.x[l]
                             ? static_cast<double>(inst.facilities[l].capacity)
                             : 0.0;
      const double viol = std::max(0.0, produced - cap);
      rep.capacity_violation(l, s) = viol;
      rep.max_capacity_violation = std::max(rep.max_capacity_violation, viol);
      if (!sol.selection.x[l] && (sol.inspections.z[l][s] || produced > tol))
        rep.linking_violations++;
      else if (sol.inspections.z[l][s] && sc.q_eff[l] == 0.0)
        rep.linking_violations++;  // inspecting a clean facility buys nothing
    }
    for (int c = 0; c < C; ++c) {
      double delivered = 0.0;
      for (int l = 0; l < L; ++l) delivered += (1.0 - sc.q_eff[l]) * p(l, c) + k(l, c);
      const double resid = static_cast<double>(inst.consumers[c].demand) - delivered;
      rep.demand_residual(c, s) = resid;
      rep.max_demand_residual = std::max(rep.max_demand_residual, std::abs(resid));
    }
  }
  rep.feasible = rep.max_capacity_violation <= tol && rep.max_demand_residual <= tol &&
                 rep.linking_violations == 0;
  return rep;
}

double fractional_gap(double value, double reference) {
  if (reference <= 0.0) throw std::domain_error("fractional_gap: reference must be positive");
  return (value - reference) / reference;
}

bool delivered_capacity_ok(const ScdInstance& inst, const std::vector<std::uint8_t>& x,
                           const InspectionPlan& z, int s, double tol) {
  const Scenario& sc = inst.scenarios[s];
  double cap = 0.0;
  for (int l = 0; l < inst.num_facilities(); ++l)
    if (x[l])
      cap += delivered_ratio(sc, l, z.z[l][s] != 0) *
             static_cast<double>(inst.facilities[l].capacity);
  return cap >= static_cast<double>(inst.total_demand()) - tol;
}

// ---------- solution JSON ----------

void save_solution(const Solution& sol, const std::string& path) {
  json j;
  j["x"] = json::array();
  for (auto v : sol.selection.x) j["x"].push_back(static_cast<int>(v));
  j["z"] = json::array();
  for (const auto& row : sol.inspections.z) {
    json r = json::array();
    for (auto v : row) r.push_back(static_cast<int>(v));
    j["z"].push_back(std::move(r));
  }
  json flows = json::array();
  for (int s = 0; s < static_cast<int>(sol.flows.p.size()); ++s) {
    const Matrix& p = sol.flows.p[s];
    for (int l = 0; l < p.rows(); ++l)
      for (int c = 0; c < p.cols(); ++c)
        if (p(l, c) != 0.0)
          flows.push_back({{"l", l}, {"c", c}, {"s", s}, {"value", p(l, c)}});
  }
  j["p"] = std::move(flows);
  j["cost"] = {{"fixed", sol.cost.fixed},
               {"transport", sol.cost.transport},
               {"taint_penalty", sol.cost.taint_penalty},
               {"discard", sol.cost.discard},
               {"inspection", sol.cost.inspection},
               {"total", sol.cost.total}};
  j["capacity_short"] = sol.capacity_short;

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << j.dump(2) << "\n";
}

Solution load_solution(const std::string& path, const ScdInstance& inst) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  json j;
  try {
    j = json::parse(ss.str());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }

  const int L = inst.num_facilities();
  const int C = inst.num_consumers();
  const int S = inst.num_scenarios();
  Solution sol;
  try {
    if (!j.contains("x")) throw ParseError("missing field x");
    if (!j.contains("z")) throw ParseError("missing field z");
    if (!j.contains("p")) throw ParseError("missing field p");
    for (const auto& v : j["x"]) sol.selection.x.push_back(v.get<int>() ? 1 : 0);
    for (const auto& row : j["z"]) {
      std::vector<std::uint8_t> r;
      for (const auto& v : row) r.push_back(v.get<int>() ? 1 : 0);
      sol.inspections.z.push_back(std::move(r));
    }
    if (static_cast<int>(sol.selection.x.size()) != L)
      throw ParseError("x: expected " + std::to_string(L) + " entries");
    if (static_cast<int>(sol.inspections.z.size()) != L)
      throw ParseError("z: expected " + std::to_string(L) + " rows");
    for (const auto& r : sol.inspections.z)
      if (static_cast<int>(r.size()) != S)
        throw ParseError("z: expected " + std::to_string(S) + " columns");

    sol.flows.p.assign(S, Matrix(L, C));
    for (const auto& e : j["p"]) {
      const int l = e.at("l").get<int>();
      const int c = e.at("c").get<int>();
      const int s = e.at("s").get<int>();
      if (l < 0 || l >= L || c < 0 || c >= C || s < 0 || s >= S)
        throw ParseError("p: index out of range");
      sol.flows.p[s](l, c) = e.at("value").get<double>();
    }
    if (j.contains("capacity_short")) sol.capacity_short = j["capacity_short"].get<bool>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("ill-typed field: ") + e.what());
  }

  sol.taint = derive_taint_flows(sol.flows, sol.inspections, inst.scenarios);
  sol.cost = evaluate_objective(inst, sol);
  return sol;
}

}  // namespace scd
