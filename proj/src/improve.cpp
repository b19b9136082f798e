#include "scd/improve.hpp"

#include <algorithm>
#include <cmath>

namespace scd {

Solution local_x(const ScdInstance& inst, const Solution& start, const Stage2Config& stage2) {
  const int L = inst.num_facilities();
  const std::int64_t demand = inst.total_demand();
  Solution cur = start;

  bool improved = true;
  while (improved) {
    improved = false;
    for (int l = 0; l < L; ++l) {
      std::vector<std::uint8_t> x2 = cur.selection.x;
      x2[l] ^= 1;
      std::int64_t cap = 0;
      for (int i = 0; i < L; ++i)
        if (x2[i]) cap += inst.facilities[i].capacity;
      if (cap < demand) continue;
      InspectionPlan z = make_inspections(inst, x2, stage2.method, stage2.delta, stage2.seed);
      Solution cand = build_solution(inst, std::move(x2), std::move(z));
      if (cand.cost.total < cur.cost.total) {
        cur = std::move(cand);
        improved = true;
        break;  // restart the sweep from facility 0
      }
    }
  }
  return cur;
}

void apply_rectangle(Matrix& m, const RectangleMove& mv) {
  if (mv.amount == 0.0) return;
  m(mv.l1, mv.c1) -= mv.amount;
  m(mv.l2, mv.c2) -= mv.amount;
  m(mv.l1, mv.c2) += mv.amount;
  m(mv.l2, mv.c1) += mv.amount;
}

RectangleMove propose_rectangle(const Matrix& m, std::mt19937_64& rng) {
  RectangleMove mv;
  if (m.rows() < 2 || m.cols() < 2) return mv;  // no rectangle exists
  std::uniform_int_distribution<int> row(0, m.rows() - 1);
  std::uniform_int_distribution<int> col(0, m.cols() - 1);
  std::uniform_int_distribution<int> other_row(0, m.rows() - 2);
  std::uniform_int_distribution<int> other_col(0, m.cols() - 2);
  mv.l1 = row(rng);
  mv.c1 = col(rng);
  for (int attempt = 0; attempt < 20; ++attempt) {
    int l2 = other_row(rng);
    if (l2 >= mv.l1) ++l2;
    int c2 = other_col(rng);
    if (c2 >= mv.c1) ++c2;
    const double bound = std::min(std::min(m(mv.l1, mv.c1), m(mv.l1, c2)),
                                  std::min(m(l2, mv.c1), m(l2, c2)));
    if (bound > 0.0) {
      mv.l2 = l2;
      mv.c2 = c2;
      mv.amount = std::uniform_real_distribution<double>(0.0, bound)(rng);
      return mv;
    }
  }
  return mv;  // amount stays 0: no valid move found
}

VnsResult vns_transport(const ScdInstance& inst, const Solution& start, const VnsConfig& cfg) {
  const int L = inst.num_facilities();
  const int C = inst.num_consumers();
  const int S = inst.num_scenarios();
  if (cfg.k_max < 1) throw std::invalid_argument("vns_transport: k_max must be >= 1");

  VnsResult out;
  out.solution = start;
  out.traces.reserve(S);

  for (int s = 0; s < S; ++s) {
    const Scenario& sc = inst.scenarios[s];
    std::vector<double> alpha(L);
    for (int l = 0; l < L; ++l)
      alpha[l] = delivered_ratio(sc, l, start.inspections.z[l][s] != 0);

    // Per-unit metric weight on delivered flows.
    Matrix w(L, C);
    for (int l = 0; l < L; ++l)
      for (int c = 0; c < C; ++c) {
        const double per_produced =
            cfg.metric == VnsConfig::Metric::shipping
                ? inst.costs.ship_clean(l, c) * (1.0 - sc.q_eff[l])
                : unit_cost_coefficient(inst, l, c, s, start.inspections.z[l][s] != 0);
        w(l, c) = per_produced / alpha[l];
      }

    Matrix y(L, C);  // delivered units; moves here keep demand columns intact
    for (int l = 0; l < L; ++l)
      for (int c = 0; c < C; ++c) y(l, c) = alpha[l] * out.solution.flows.p[s](l, c);

    auto metric = [&](const Matrix& f) {
      double v = 0.0;
      for (int l = 0; l < L; ++l)
        for (int c = 0; c < C; ++c) v += w(l, c) * f(l, c);
      return v;
    };

    VnsScenarioTrace trace;
    trace.scenario = s;
    double cost = metric(y);
    trace.accepted_costs.push_back(cost);

    std::mt19937_64 rng(split_seed(cfg.seed, static_cast<std::uint64_t>(s)));
    int k = 1;
    long shakes = 0;
    const long shake_cap = 100L * cfg.k_max;  // strict descent could stall out in FP dust
    while (k < cfg.k_max && shakes < shake_cap) {
      ++shakes;
      const RectangleMove mv = propose_rectangle(y, rng);
      if (mv.amount <= 0.0) {
        ++k;
        continue;
      }
      Matrix u = y;
      apply_rectangle(u, mv);
      const double cu = metric(u);
      if (cu < cost) {
        y = std::move(u);
        cost = cu;
        trace.accepted_costs.push_back(cost);
      } else {
        ++k;
      }
    }

    for (int l = 0; l < L; ++l)
      for (int c = 0; c < C; ++c) out.solution.flows.p[s](l, c) = y(l, c) / alpha[l];
    out.traces.push_back(std::move(trace));
  }

  out.solution.taint =
      derive_taint_flows(out.solution.flows, out.solution.inspections, inst.scenarios);
  out.solution.cost = evaluate_objective(inst, out.solution);
  return out;
}

}  // namespace scd
