#include "scd/sa.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace scd {

const char* to_string(SaMove m) {
  switch (m) {
    case SaMove::swap: return "swap";
    case SaMove::add: return "add";
    case SaMove::remove: return "remove";
    case SaMove::two_swap: return "two_swap";
    case SaMove::z_only: return "z_only";
  }
  return "?";
}

double acceptance_probability(double delta, double t) {
  if (delta <= 0.0) return 1.0;
  return std::exp(-delta / t);
}

double estimate_initial_temperature(const std::vector<double>& cost_samples, double varpi) {
  if (cost_samples.size() < 2)
    throw std::invalid_argument("estimate_initial_temperature: need at least two samples");
  if (!(varpi > 0.0 && varpi < 1.0))
    throw std::invalid_argument("estimate_initial_temperature: varpi must lie in (0,1)");
  std::vector<double> diffs(cost_samples.size() - 1);
  for (size_t i = 0; i + 1 < cost_samples.size(); ++i)
    diffs[i] = cost_samples[i + 1] - cost_samples[i];
  if (diffs.size() < 2) return 0.0;  // a single difference has no spread
  const double mean = std::accumulate(diffs.begin(), diffs.end(), 0.0) / diffs.size();
  double ss = 0.0;
  for (double d : diffs) ss += (d - mean) * (d - mean);
  const double sigma = std::sqrt(ss / (diffs.size() - 1));
  return (-3.0 / std::log(varpi)) * sigma;
}

namespace {

int pick_from(const std::vector<int>& pool, std::mt19937_64& rng) {
  return pool[std::uniform_int_distribution<size_t>(0, pool.size() - 1)(rng)];
}

// Two distinct picks from pool (|pool| >= 2).
std::pair<int, int> pick_two(const std::vector<int>& pool, std::mt19937_64& rng) {
  const size_t i = std::uniform_int_distribution<size_t>(0, pool.size() - 1)(rng);
  size_t j = std::uniform_int_distribution<size_t>(0, pool.size() - 2)(rng);
  if (j >= i) ++j;
  return {pool[i], pool[j]};
}

}  // namespace

SaProposal propose_move(const ScdInstance& inst, const std::vector<std::uint8_t>& x,
                        const InspectionPlan& /*z*/, std::mt19937_64& rng) {
  const int L = inst.num_facilities();
  const int S = inst.num_scenarios();
  const std::int64_t demand = inst.total_demand();

  std::vector<int> ones, zeros;
  for (int l = 0; l < L; ++l) (x[l] ? ones : zeros).push_back(l);

  const bool can_swap = !ones.empty() && !zeros.empty();
  const bool can_add = !zeros.empty();
  const bool can_remove = ones.size() > 1;
  const bool can_two = ones.size() >= 2 && zeros.size() >= 2;

  SaProposal prop;
  prop.x = x;
  prop.move = SaMove::z_only;

  if (can_swap || can_add || can_remove || can_two) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int attempt = 0; attempt < 200; ++attempt) {
      const double a = unit(rng);
      SaMove move;
      if (a < 0.25) move = SaMove::swap;
      else if (a < 0.5) move = SaMove::add;
      else if (a < 0.75) move = SaMove::remove;
      else move = SaMove::two_swap;

      if ((move == SaMove::swap && !can_swap) || (move == SaMove::add && !can_add) ||
          (move == SaMove::remove && !can_remove) || (move == SaMove::two_swap && !can_two))
        continue;  // ineligible draw; roll again

      std::vector<std::uint8_t> x2 = x;
      switch (move) {
        case SaMove::swap: {
          x2[pick_from(ones, rng)] = 0;
          x2[pick_from(zeros, rng)] = 1;
          break;
        }
        case SaMove::add: x2[pick_from(zeros, rng)] = 1; break;
        case SaMove::remove: x2[pick_from(ones, rng)] = 0; break;
        case SaMove::two_swap: {
          auto [o1, o2] = pick_two(ones, rng);
          auto [z1, z2] = pick_two(zeros, rng);
          x2[o1] = x2[o2] = 0;
          x2[z1] = x2[z2] = 1;
          break;
        }
        case SaMove::z_only: break;
      }
      std::int64_t cap = 0;
      for (int l = 0; l < L; ++l)
        if (x2[l]) cap += inst.facilities[l].capacity;
      if (cap < demand) continue;  // capacity-starving move; resample
      prop.x = std::move(x2);
      prop.move = move;
      break;
    }
  }

  // Fresh inspect-all-failed plan, then one random eligible flip. Flips that
  // would starve a scenario's delivered capacity are resampled.
  prop.z = inspect_fsih(inst, prop.x);
  std::vector<std::pair<int, int>> eligible;  // (l, s)
  for (int l = 0; l < L; ++l)
    if (prop.x[l])
      for (int s = 0; s < S; ++s)
        if (inst.scenarios[s].q_eff[l] > 0.0) eligible.push_back({l, s});
  if (!eligible.empty()) {
    const int flip_attempts = std::min<size_t>(eligible.size() * 2, 100);
    for (int attempt = 0; attempt < flip_attempts; ++attempt) {
      const auto [l, s] = eligible[std::uniform_int_distribution<size_t>(
          0, eligible.size() - 1)(rng)];
      prop.z.z[l][s] ^= 1;
      if (!prop.z.z[l][s] || delivered_capacity_ok(inst, prop.x, prop.z, s)) break;
      prop.z.z[l][s] ^= 1;  // revert and try another entry
    }
  }
  return prop;
}

SaResult sa_solve(const ScdInstance& inst, const Solution& start, const SaConfig& cfg) {
  const int L = inst.num_facilities();
  if (!(cfg.theta > 0.0 && cfg.theta < 1.0))
    throw std::invalid_argument("sa_solve: theta must lie in (0,1)");
  if (!(cfg.t0 > cfg.t_final && cfg.t_final > 0.0))
    throw std::invalid_argument("sa_solve: need t0 > t_final > 0");
  const int max_iter = cfg.max_iter > 0 ? cfg.max_iter : (L <= 5 ? 100 : 350);

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  SaResult res;
  Solution cur = start;
  res.best = start;

  double t = cfg.t0;
  int iter = 1;
  while (t > cfg.t_final && iter <= max_iter) {
    SaProposal prop = propose_move(inst, cur.selection.x, cur.inspections, rng);
    Solution cand = build_solution(inst, std::move(prop.x), std::move(prop.z));
    const double cand_cost = cand.cost.total;
    const double delta = cand_cost - cur.cost.total;
    bool accepted = delta <= 0.0;
    if (!accepted && cfg.acceptance == SaAcceptance::metropolis)
      accepted = unit(rng) < acceptance_probability(delta, t);
    if (accepted) cur = std::move(cand);
    if (cur.cost.total < res.best.cost.total) res.best = cur;
    res.trace.push_back({iter, prop.move, cand_cost, accepted, t, res.best.cost.total});
    // Exact geometric schedule (recomputed, not accumulated, so no FP drift).
    t = cfg.t0 * std::pow(cfg.theta, iter);
    ++iter;
  }
  return res;
}

}  // namespace scd
