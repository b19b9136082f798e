#include "scd/constructive.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace scd {

const char* to_string(Stage1 s) {
  switch (s) {
    case Stage1::bgh: return "bgh";
    case Stage1::sgh: return "sgh";
    case Stage1::cbgh: return "cbgh";
  }
  return "?";
}

const char* to_string(Stage2 s) {
  switch (s) {
    case Stage2::fsih: return "fsih";
    case Stage2::gih: return "gih";
    case Stage2::rgih: return "rgih";
  }
  return "?";
}

std::string pipeline_name(const PipelineConfig& cfg) {
  return std::string(to_string(cfg.stage1)) + "-" + to_string(cfg.stage2);
}

std::optional<PipelineConfig> parse_pipeline(const std::string& name) {
  const auto dash = name.find('-');
  if (dash == std::string::npos) return std::nullopt;
  PipelineConfig cfg;
  const std::string a = name.substr(0, dash), b = name.substr(dash + 1);
  if (a == "bgh") cfg.stage1 = Stage1::bgh;
  else if (a == "sgh") cfg.stage1 = Stage1::sgh;
  else if (a == "cbgh") cfg.stage1 = Stage1::cbgh;
  else return std::nullopt;
  if (b == "fsih") cfg.stage2 = Stage2::fsih;
  else if (b == "gih") cfg.stage2 = Stage2::gih;
  else if (b == "rgih") cfg.stage2 = Stage2::rgih;
  else return std::nullopt;
  return cfg;
}

std::vector<PipelineConfig> all_pipelines(double delta, std::uint64_t seed) {
  std::vector<PipelineConfig> out;
  int i = 0;
  for (Stage1 s1 : {Stage1::bgh, Stage1::sgh, Stage1::cbgh})
    for (Stage2 s2 : {Stage2::fsih, Stage2::gih, Stage2::rgih}) {
      PipelineConfig cfg;
      cfg.stage1 = s1;
      cfg.stage2 = s2;
      cfg.delta = delta;
      cfg.seed = split_seed(seed, static_cast<std::uint64_t>(i++));
      out.push_back(cfg);
    }
  return out;
}

double expected_capacity(const FacilityParams& f, double chi) {
  const double kappa = static_cast<double>(f.capacity);
  return chi * kappa + (1.0 - chi) * (1.0 - f.taint_rate) * kappa;
}

SelectionResult select_bgh(const ScdInstance& inst) {
  SelectionResult r;
  r.x.assign(inst.num_facilities(), 1);
  r.capacity_short = inst.total_capacity() < inst.total_demand();
  return r;
}

namespace {

// Select facilities in `order` until chi-expected capacity covers demand.
SelectionResult select_until_covered(const ScdInstance& inst, const std::vector<int>& order,
                                     double chi) {
  SelectionResult r;
  r.x.assign(inst.num_facilities(), 0);
  const double demand = static_cast<double>(inst.total_demand());
  double acc = 0.0;
  for (int l : order) {
    r.x[l] = 1;
    acc += expected_capacity(inst.facilities[l], chi);
    if (acc >= demand) return r;
  }
  r.capacity_short = true;  // exhausted the list; everything is selected
  return r;
}

}  // namespace

SelectionResult select_sgh(const ScdInstance& inst, double chi) {
  const int L = inst.num_facilities();
  const int C = inst.num_consumers();
  std::vector<double> score(L, 0.0);
  for (int l = 0; l < L; ++l) {
    double lam = 0.0, o = 0.0, g = 0.0;
    for (int c = 0; c < C; ++c) {
      lam += inst.costs.ship_clean(l, c);
      o += inst.costs.ship_tainted(l, c);
      g += inst.costs.discard(l, c);
    }
    score[l] = static_cast<double>(inst.facilities[l].fixed_cost) + (lam + o + g) / C;
  }
  std::vector<int> order(L);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return score[a] < score[b]; });
  return select_until_covered(inst, order, chi);
}

SelectionResult select_cbgh(const ScdInstance& inst, double chi) {
  const int L = inst.num_facilities();
  std::vector<int> order(L);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return expected_capacity(inst.facilities[a], chi) > expected_capacity(inst.facilities[b], chi);
  });
  return select_until_covered(inst, order, chi);
}

void enforce_delivered_capacity(const ScdInstance& inst, const std::vector<std::uint8_t>& x,
                                InspectionPlan& z) {
  const int L = inst.num_facilities();
  const int S = inst.num_scenarios();
  const double demand = static_cast<double>(inst.total_demand());
  for (int s = 0; s < S; ++s) {
    const Scenario& sc = inst.scenarios[s];
    double cap = 0.0;
    for (int l = 0; l < L; ++l)
      if (x[l])
        cap += delivered_ratio(sc, l, z.z[l][s] != 0) *
               static_cast<double>(inst.facilities[l].capacity);
    while (cap < demand - 1e-9) {
      int pick = -1;
      double best_regain = 0.0;
      for (int l = 0; l < L; ++l) {
        if (!x[l] || !z.z[l][s]) continue;
        const double regain =
            static_cast<double>(inst.facilities[l].capacity) * (sc.q_eff[l] - sc.r_eff[l]);
        if (regain > best_regain) {
          best_regain = regain;
          pick = l;
        }
      }
      if (pick < 0) break;  // nothing left to drop; shortfall surfaces downstream
      z.z[pick][s] = 0;
      cap += best_regain;
    }
  }
}

InspectionPlan inspect_fsih(const ScdInstance& inst, const std::vector<std::uint8_t>& x) {
  const int L = inst.num_facilities();
  const int S = inst.num_scenarios();
  InspectionPlan z;
  z.z.assign(L, std::vector<std::uint8_t>(S, 0));
  for (int s = 0; s < S; ++s)
    for (int l = 0; l < L; ++l)
      if (x[l] && inst.scenarios[s].q_eff[l] > 0.0) z.z[l][s] = 1;
  enforce_delivered_capacity(inst, x, z);
  return z;
}

InspectionPlan inspect_gih(const ScdInstance& inst, const std::vector<std::uint8_t>& x,
                           double delta) {
  const int L = inst.num_facilities();
  const int S = inst.num_scenarios();
  const double demand = static_cast<double>(inst.total_demand());
  const double bound = (1.0 - delta) * demand;
  InspectionPlan z;
  z.z.assign(L, std::vector<std::uint8_t>(S, 0));
  for (int s = 0; s < S; ++s) {
    const Scenario& sc = inst.scenarios[s];
    double taint_cap = 0.0;  // tainted output at full load, uninspected
    double cap = 0.0;        // delivered capacity under the current plan
    std::vector<int> candidates;
    for (int l = 0; l < L; ++l) {
      if (!x[l]) continue;
      const double kappa = static_cast<double>(inst.facilities[l].capacity);
      taint_cap += sc.q_eff[l] * kappa;
      cap += kappa;
      if (sc.q_eff[l] > 0.0) candidates.push_back(l);
    }
    std::stable_sort(candidates.begin(), candidates.end(), [&](int a, int b) {
      return sc.q_eff[a] - sc.r_eff[a] > sc.q_eff[b] - sc.r_eff[b];
    });
    for (int l : candidates) {
      if (taint_cap <= bound + 1e-12) break;
      const double shift =
          static_cast<double>(inst.facilities[l].capacity) * (sc.q_eff[l] - sc.r_eff[l]);
      if (cap - shift < demand - 1e-9) continue;  // inspection would starve demand
      z.z[l][s] = 1;
      taint_cap -= shift;
      cap -= shift;
    }
  }
  return z;
}

InspectionPlan inspect_rgih(const ScdInstance& inst, const std::vector<std::uint8_t>& x,
                            std::mt19937_64& rng) {
  const int L = inst.num_facilities();
  const int C = inst.num_consumers();
  const int S = inst.num_scenarios();
  std::vector<double> o_bar(L, 0.0), g_bar(L, 0.0);
  for (int l = 0; l < L; ++l) {
    for (int c = 0; c < C; ++c) {
      o_bar[l] += inst.costs.ship_tainted(l, c);
      g_bar[l] += inst.costs.discard(l, c);
    }
    o_bar[l] /= C;
    g_bar[l] /= C;
  }
  InspectionPlan z;
  z.z.assign(L, std::vector<std::uint8_t>(S, 0));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int s = 0; s < S; ++s) {
    const Scenario& sc = inst.scenarios[s];
    for (int l = 0; l < L; ++l) {
      if (!x[l] || sc.q_eff[l] <= 0.0) continue;
      const double q = sc.q_eff[l], r = sc.r_eff[l];
      const double n = static_cast<double>(inst.facilities[l].inspection_cost);
      // Estimated saving of inspecting at full load: avoided shipped-taint
      // penalty minus residual penalty, discards and the inspection fee.
      const double saving =
          static_cast<double>(inst.facilities[l].capacity) *
              (o_bar[l] * q - (o_bar[l] * r + g_bar[l] * (q - r))) -
          n;
      const double tau = unit(rng);
      if (saving > tau * n) z.z[l][s] = 1;
    }
  }
  enforce_delivered_capacity(inst, x, z);
  return z;
}

InspectionPlan make_inspections(const ScdInstance& inst, const std::vector<std::uint8_t>& x,
                                Stage2 method, double delta, std::uint64_t seed) {
  switch (method) {
    case Stage2::fsih: return inspect_fsih(inst, x);
    case Stage2::gih: return inspect_gih(inst, x, delta);
    case Stage2::rgih: {
      std::mt19937_64 rng(seed);
      return inspect_rgih(inst, x, rng);
    }
  }
  throw std::logic_error("make_inspections: bad method");
}

AllocationResult allocate_greedy(const ScdInstance& inst, const std::vector<std::uint8_t>& x,
                                 const InspectionPlan& z) {
  const int L = inst.num_facilities();
  const int C = inst.num_consumers();
  const int S = inst.num_scenarios();
  if (static_cast<int>(x.size()) != L || static_cast<int>(z.z.size()) != L)
    throw std::invalid_argument("allocate_greedy: dimension mismatch");

  AllocationResult out;
  out.flows.p.assign(S, Matrix(L, C));
  for (int s = 0; s < S; ++s) {
    const Scenario& sc = inst.scenarios[s];
    Matrix& p = out.flows.p[s];
    std::vector<double> remaining(L, 0.0);  // producible units left
    std::vector<double> alpha(L, 1.0);
    for (int l = 0; l < L; ++l) {
      if (x[l]) remaining[l] = static_cast<double>(inst.facilities[l].capacity);
      alpha[l] = delivered_ratio(sc, l, z.z[l][s] != 0);
    }
    for (int c = 0; c < C; ++c) {
      double need = static_cast<double>(inst.consumers[c].demand);  // delivered units
      while (need > 0.0) {
        int pick = -1;
        for (int l = 0; l < L; ++l) {
          if (remaining[l] <= 0.0) continue;
          if (pick < 0 || inst.costs.ship_clean(l, c) < inst.costs.ship_clean(pick, c)) pick = l;
        }
        if (pick < 0) {
          out.shortfall = true;
          out.max_unserved = std::max(out.max_unserved, need);
          break;
        }
        const double deliverable = alpha[pick] * remaining[pick];
        if (deliverable > need) {
          const double used = need / alpha[pick];
          p(pick, c) += used;
          remaining[pick] = std::max(0.0, remaining[pick] - used);
          need = 0.0;
        } else {
          p(pick, c) += remaining[pick];
          need -= deliverable;
          remaining[pick] = 0.0;
        }
      }
    }
  }
  return out;
}

Solution build_solution(const ScdInstance& inst, std::vector<std::uint8_t> x, InspectionPlan z,
                        bool capacity_short) {
  Solution sol;
  sol.selection.x = std::move(x);
  AllocationResult alloc = allocate_greedy(inst, sol.selection.x, z);
  sol.inspections = std::move(z);
  sol.flows = std::move(alloc.flows);
  sol.taint = derive_taint_flows(sol.flows, sol.inspections, inst.scenarios);
  sol.cost = evaluate_objective(inst, sol);
  sol.capacity_short = capacity_short || alloc.shortfall;
  return sol;
}

Solution run_pipeline(const ScdInstance& inst, const PipelineConfig& cfg) {
  SelectionResult sel;
  switch (cfg.stage1) {
    case Stage1::bgh: sel = select_bgh(inst); break;
    case Stage1::sgh: sel = select_sgh(inst, cfg.chi); break;
    case Stage1::cbgh: sel = select_cbgh(inst, cfg.chi); break;
  }
  InspectionPlan z = make_inspections(inst, sel.x, cfg.stage2, cfg.delta, cfg.seed);
  return build_solution(inst, std::move(sel.x), std::move(z), sel.capacity_short);
}

Solution best_constructive(const ScdInstance& inst, double delta, std::uint64_t seed,
                           PipelineConfig* which) {
  Solution best;
  bool have = false;
  for (const PipelineConfig& cfg : all_pipelines(delta, seed)) {
    Solution sol = run_pipeline(inst, cfg);
    if (!have || sol.cost.total < best.cost.total) {
      best = std::move(sol);
      if (which) *which = cfg;
      have = true;
    }
  }
  return best;
}

}  // namespace scd
