#include <cmath>
#include <map>
#include <random>
#include <vector>

#include "doctest.h"
#include "scd/instance.hpp"
#include "scd/sa.hpp"

using namespace scd;

namespace {

FacilityParams facility(int id, std::int64_t fixed, std::int64_t kappa, std::int64_t inspect,
                        double theta, double q, double r) {
  FacilityParams f;
  f.id = id;
  f.fixed_cost = fixed;
  f.capacity = kappa;
  f.inspection_cost = inspect;
  f.reliability = theta;
  f.taint_rate = q;
  f.residual_taint_rate = r;
  return f;
}

ScdInstance uniform_instance(int L, std::int64_t kappa, std::int64_t demand) {
  ScdInstance inst;
  for (int l = 0; l < L; ++l)
    inst.facilities.push_back(facility(l, 1'000'000, kappa, 50'000, 0.8, 0.2, 0.05));
  inst.consumers.push_back({0, demand});
  inst.costs.ship_clean = Matrix(L, 1, 500.0);
  inst.costs.ship_tainted = Matrix(L, 1, 15'000.0);
  inst.costs.discard = Matrix(L, 1, 125.0);
  inst.scenarios = enumerate_scenarios(inst.facilities);
  return inst;
}

}  // namespace

TEST_CASE("initial temperature estimator") {
  const std::vector<double> zigzag{0.0, 10.0, 0.0, 10.0};
  const double sigma = 20.0 / std::sqrt(3.0);  // diffs {10,-10,10}, sample stddev

  SUBCASE("varpi = e^-3 makes the factor exactly one") {
    CHECK(estimate_initial_temperature(zigzag, std::exp(-3.0)) ==
          doctest::Approx(sigma).epsilon(1e-12));
  }
  SUBCASE("default varpi scales sigma by -3/ln(varpi)") {
    CHECK(estimate_initial_temperature(zigzag, 0.95) ==
          doctest::Approx((-3.0 / std::log(0.95)) * sigma).epsilon(1e-12));
  }
  SUBCASE("no spread means no signal") {
    CHECK(estimate_initial_temperature({5.0, 5.0, 5.0, 5.0}, 0.95) == 0.0);
    CHECK(estimate_initial_temperature({1.0, 2.0}, 0.95) == 0.0);  // single diff
  }
  SUBCASE("bad input throws") {
    CHECK_THROWS_AS(estimate_initial_temperature({1.0}, 0.95), std::invalid_argument);
    CHECK_THROWS_AS(estimate_initial_temperature({}, 0.95), std::invalid_argument);
    CHECK_THROWS_AS(estimate_initial_temperature(zigzag, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(estimate_initial_temperature(zigzag, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(estimate_initial_temperature(zigzag, 1.5), std::invalid_argument);
  }
}

TEST_CASE("acceptance probability") {
  CHECK(acceptance_probability(0.0, 100.0) == 1.0);
  CHECK(acceptance_probability(-5.0, 100.0) == 1.0);
  CHECK(acceptance_probability(100.0, 100.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(acceptance_probability(200.0, 100.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-15));
}

TEST_CASE("default schedule runs exactly 48 cooling steps") {
  const ScdInstance inst = generate_instance(GenConfig{3, 3, 7});
  const Solution start = best_constructive(inst, 0.90, 7);
  SaConfig cfg;
  cfg.seed = 123;
  const SaResult res = sa_solve(inst, start, cfg);

  REQUIRE(res.trace.size() == 48);
  CHECK(res.trace.front().iter == 1);
  CHECK(res.trace.back().iter == 48);
  for (size_t i = 0; i < res.trace.size(); ++i)
    CHECK(res.trace[i].temperature == 8000.0 * std::pow(0.75, static_cast<double>(i)));
  // One more step would already be at or below the floor.
  CHECK(8000.0 * std::pow(0.75, 48.0) <= 0.01);
  CHECK(8000.0 * std::pow(0.75, 47.0) > 0.01);
}

TEST_CASE("iteration cap cuts the schedule short") {
  const ScdInstance inst = generate_instance(GenConfig{3, 3, 7});
  const Solution start = best_constructive(inst, 0.90, 7);
  SaConfig cfg;
  cfg.max_iter = 10;
  CHECK(sa_solve(inst, start, cfg).trace.size() == 10);
  cfg.max_iter = 5000;  // temperature floor binds first
  CHECK(sa_solve(inst, start, cfg).trace.size() == 48);
}

TEST_CASE("best-so-far never worsens and the result stays feasible") {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const ScdInstance inst = generate_instance(GenConfig{4, 3, seed * 101});
    const Solution start = best_constructive(inst, 0.90, seed);
    SaConfig cfg;
    cfg.seed = seed;
    const SaResult res = sa_solve(inst, start, cfg);

    CHECK(res.best.cost.total <= start.cost.total + 1e-9);
    double prev = start.cost.total;
    for (const SaIterRecord& rec : res.trace) {
      CHECK(rec.best_cost <= prev + 1e-12);
      prev = rec.best_cost;
    }
    CHECK(res.trace.back().best_cost == doctest::Approx(res.best.cost.total).epsilon(1e-15));

    const int L = inst.num_facilities();
    std::int64_t cap = 0;
    for (int l = 0; l < L; ++l) {
      if (res.best.selection.x[l]) cap += inst.facilities[l].capacity;
      for (int s = 0; s < inst.num_scenarios(); ++s)
        CHECK(res.best.inspections.z[l][s] <= res.best.selection.x[l]);
    }
    CHECK(cap >= inst.total_demand());
    CHECK(check_feasibility(inst, res.best).feasible);
  }
}

TEST_CASE("move mix is roughly uniform when every move is eligible") {
  // Half the facilities open, tiny demand: swap/add/remove/two_swap all stay
  // eligible and no capacity resampling kicks in.
  const ScdInstance inst = uniform_instance(6, 1000, 1);
  const std::vector<std::uint8_t> x{1, 1, 1, 0, 0, 0};
  const InspectionPlan z = inspect_fsih(inst, x);
  std::mt19937_64 rng(99);
  std::map<SaMove, int> counts;
  const int trials = 4000;
  for (int i = 0; i < trials; ++i) {
    const SaProposal prop = propose_move(inst, x, z, rng);
    ++counts[prop.move];

    // The proposal plan is the fresh all-failed plan with at most one flip.
    const InspectionPlan base = inspect_fsih(inst, prop.x);
    int diffs = 0;
    for (size_t l = 0; l < prop.z.z.size(); ++l)
      for (size_t s = 0; s < prop.z.z[l].size(); ++s) {
        if (prop.z.z[l][s] != base.z[l][s]) ++diffs;
        CHECK(prop.z.z[l][s] <= prop.x[l]);
      }
    CHECK(diffs <= 1);
  }
  CHECK(counts[SaMove::z_only] == 0);
  for (SaMove m : {SaMove::swap, SaMove::add, SaMove::remove, SaMove::two_swap}) {
    CHECK(counts[m] > 850);   // ~1000 expected, sigma ~27
    CHECK(counts[m] < 1150);
  }
}

TEST_CASE("move eligibility respects the selection state") {
  SUBCASE("everything open leaves only removal") {
    const ScdInstance inst = uniform_instance(3, 1000, 1);
    const std::vector<std::uint8_t> x{1, 1, 1};
    const InspectionPlan z = inspect_fsih(inst, x);
    std::mt19937_64 rng(5);
    for (int i = 0; i < 50; ++i) {
      const SaProposal prop = propose_move(inst, x, z, rng);
      CHECK(prop.move == SaMove::remove);
      int open = 0;
      for (auto v : prop.x) open += v;
      CHECK(open == 2);
    }
  }
  SUBCASE("a single open facility cannot be removed or double-swapped") {
    const ScdInstance inst = uniform_instance(4, 1000, 1);
    const std::vector<std::uint8_t> x{1, 0, 0, 0};
    const InspectionPlan z = inspect_fsih(inst, x);
    std::mt19937_64 rng(6);
    for (int i = 0; i < 50; ++i) {
      const SaProposal prop = propose_move(inst, x, z, rng);
      CHECK((prop.move == SaMove::swap || prop.move == SaMove::add));
    }
  }
  SUBCASE("capacity-blocked selections degrade to inspection flips") {
    // Both facilities are required (60 + 60 vs demand 100) and nothing can be
    // added, so every selection move dies in resampling.
    const ScdInstance inst = uniform_instance(2, 60, 100);
    const std::vector<std::uint8_t> x{1, 1};
    const InspectionPlan z = inspect_fsih(inst, x);
    std::mt19937_64 rng(7);
    for (int i = 0; i < 20; ++i) {
      const SaProposal prop = propose_move(inst, x, z, rng);
      CHECK(prop.move == SaMove::z_only);
      CHECK(prop.x == x);
    }
  }
  SUBCASE("single facility has no selection move at all") {
    const ScdInstance inst = uniform_instance(1, 1000, 1);
    const std::vector<std::uint8_t> x{1};
    const InspectionPlan z = inspect_fsih(inst, x);
    std::mt19937_64 rng(8);
    const SaProposal prop = propose_move(inst, x, z, rng);
    CHECK(prop.move == SaMove::z_only);
    CHECK(prop.x == x);
  }
}

TEST_CASE("inspection flips never starve a scenario") {
  const ScdInstance inst = uniform_instance(3, 60, 100);  // tight: alpha*60 = 51
  const std::vector<std::uint8_t> x{1, 1, 1};
  const InspectionPlan z = inspect_fsih(inst, x);
  std::mt19937_64 rng(11);
  for (int i = 0; i < 300; ++i) {
    const SaProposal prop = propose_move(inst, x, z, rng);
    for (int s = 0; s < inst.num_scenarios(); ++s)
      CHECK(delivered_capacity_ok(inst, prop.x, prop.z, s));
  }
}

TEST_CASE("annealing is deterministic in the seed") {
  const ScdInstance inst = generate_instance(GenConfig{4, 4, 55});
  const Solution start = best_constructive(inst, 0.90, 55);
  SaConfig cfg;
  cfg.seed = 314;
  const SaResult a = sa_solve(inst, start, cfg);
  const SaResult b = sa_solve(inst, start, cfg);
  CHECK(a.best.cost.total == b.best.cost.total);
  REQUIRE(a.trace.size() == b.trace.size());
  for (size_t i = 0; i < a.trace.size(); ++i) {
    CHECK(a.trace[i].move == b.trace[i].move);
    CHECK(a.trace[i].candidate_cost == b.trace[i].candidate_cost);
    CHECK(a.trace[i].accepted == b.trace[i].accepted);
    CHECK(a.trace[i].temperature == b.trace[i].temperature);
    CHECK(a.trace[i].best_cost == b.trace[i].best_cost);
  }
}

TEST_CASE("descent acceptance never takes an uphill candidate") {
  const ScdInstance inst = generate_instance(GenConfig{4, 3, 202});
  const Solution start = best_constructive(inst, 0.90, 202);
  SaConfig cfg;
  cfg.seed = 9;
  cfg.acceptance = SaAcceptance::descent;
  const SaResult res = sa_solve(inst, start, cfg);
  double cur = start.cost.total;
  for (const SaIterRecord& rec : res.trace) {
    if (rec.accepted) {
      CHECK(rec.candidate_cost <= cur + 1e-12);
      cur = rec.candidate_cost;
    }
  }
}

TEST_CASE("annealing validates its schedule") {
  const ScdInstance inst = generate_instance(GenConfig{2, 2, 3});
  const Solution start = best_constructive(inst, 0.90, 3);
  SaConfig cfg;
  cfg.theta = 1.0;
  CHECK_THROWS_AS(sa_solve(inst, start, cfg), std::invalid_argument);
  cfg.theta = 0.0;
  CHECK_THROWS_AS(sa_solve(inst, start, cfg), std::invalid_argument);
  cfg = SaConfig{};
  cfg.t_final = 9000.0;  // above t0
  CHECK_THROWS_AS(sa_solve(inst, start, cfg), std::invalid_argument);
  cfg = SaConfig{};
  cfg.t_final = 0.0;
  CHECK_THROWS_AS(sa_solve(inst, start, cfg), std::invalid_argument);
}
