#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "scd/constructive.hpp"
#include "scd/instance.hpp"
#include "scd/model.hpp"

namespace scd {

enum class SaMove { swap, add, remove, two_swap, z_only };

const char* to_string(SaMove m);

enum class SaAcceptance { metropolis, descent };

struct SaConfig {
  double t0 = 8000.0;
  double theta = 0.75;     // geometric cooling factor
  double t_final = 0.01;
  int max_iter = 0;        // 0 = auto: 100 up to 5 facilities, 350 beyond
  std::uint64_t seed = 0;
  SaAcceptance acceptance = SaAcceptance::metropolis;
};

struct SaProposal {
  std::vector<std::uint8_t> x;
  InspectionPlan z;
  SaMove move = SaMove::z_only;
};

// Quartile move mix on the selection (swap / add / remove / double swap);
// draws ineligible for the current selection are redrawn, and moves that drop
// nominal capacity below demand are resampled. The inspection plan is rebuilt
// (inspect-all-failed with the capacity guard) and one random eligible entry
// flipped. The incoming plan only matters as the flip baseline contract.
SaProposal propose_move(const ScdInstance& inst, const std::vector<std::uint8_t>& x,
                        const InspectionPlan& z, std::mt19937_64& rng);

// 1 for improvements, exp(-delta/t) otherwise.
double acceptance_probability(double delta, double t);

// Temperature t * sigma where t = -3 / ln(varpi) and sigma is the sample
// standard deviation of successive differences of the cost samples. Returns 0
// when the samples carry no spread (callers fall back to the default t0).
double estimate_initial_temperature(const std::vector<double>& cost_samples, double varpi);

struct SaIterRecord {
  int iter = 0;
  SaMove move = SaMove::z_only;
  double candidate_cost = 0.0;
  bool accepted = false;
  double temperature = 0.0;  // temperature the acceptance test used
  double best_cost = 0.0;
};

struct SaResult {
  Solution best;
  std::vector<SaIterRecord> trace;
};

// Annealing over (x, z) with greedy reallocation per candidate. Cools once per
// iteration on the exact geometric schedule t0 * theta^k; stops at the earlier
// of temperature <= t_final or the iteration cap.
SaResult sa_solve(const ScdInstance& inst, const Solution& start, const SaConfig& cfg);

}  // namespace scd
