#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "scd/constructive.hpp"
#include "scd/instance.hpp"
#include "scd/model.hpp"

namespace scd {

struct Stage2Config {
  Stage2 method = Stage2::fsih;
  double delta = 0.90;
  std::uint64_t seed = 0;
};

// Flip one facility at a time in index order; rebuild stage 2 + allocation and
// accept only strict improvements whose nominal capacity still covers demand.
// Every acceptance restarts the sweep; returns when a full sweep finds nothing.
Solution local_x(const ScdInstance& inst, const Solution& start, const Stage2Config& stage2);

// Four-corner reroute on a flow matrix: the chosen cell and its opposite
// corner lose `amount`, the other two corners gain it, so row and column sums
// are untouched.
struct RectangleMove {
  int l1 = -1, c1 = -1;  // chosen cell (loses amount)
  int l2 = -1, c2 = -1;  // opposite corner (loses amount)
  double amount = 0.0;
};

void apply_rectangle(Matrix& m, const RectangleMove& mv);

// Random cell, then up to 20 partner draws; amount ~ U[0, min of the four
// corner flows]. amount == 0 signals "no valid move" (all bounds were zero or
// the matrix has no rectangle).
RectangleMove propose_rectangle(const Matrix& m, std::mt19937_64& rng);

struct VnsConfig {
  int k_max = 50;
  std::uint64_t seed = 0;
  enum class Metric { shipping, full_coefficient } metric = Metric::shipping;
};

struct VnsScenarioTrace {
  int scenario = 0;
  std::vector<double> accepted_costs;  // metric values; [0] is the start
};

struct VnsResult {
  Solution solution;
  std::vector<VnsScenarioTrace> traces;
};

// Scenario-by-scenario shaking of the flow plan. Moves are proposed on the
// delivered-unit matrix (alpha * produced) so demand columns stay balanced,
// then mapped back to produced units. The default metric is the
// clean-shipping cost sum lambda * (1 - q) * p; acceptance is strict descent.
VnsResult vns_transport(const ScdInstance& inst, const Solution& start, const VnsConfig& cfg);

}  // namespace scd
