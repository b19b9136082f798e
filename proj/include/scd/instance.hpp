#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scd/core.hpp"

namespace scd {

struct FacilityParams {
  int id = 0;
  std::int64_t fixed_cost = 0;       // one-off cost of opening the facility
  std::int64_t capacity = 0;         // production capacity, units
  std::int64_t inspection_cost = 0;  // per-scenario cost of inspecting output
  double reliability = 0.0;          // probability the facility operates untainted
  double taint_rate = 0.0;           // q: tainted fraction of output when failed
  double residual_taint_rate = 0.0;  // r: tainted fraction slipping past inspection
};

struct ConsumerParams {
  int id = 0;
  std::int64_t demand = 0;
};

struct CostMatrices {
  Matrix ship_clean;    // lambda: per-unit shipping cost, facility x consumer
  Matrix ship_tainted;  // o: per-unit penalty when a tainted unit reaches a consumer
  Matrix discard;       // gamma: per-unit discard cost, exactly 0.25 * ship_clean
};

// One joint facility-state outcome. failed_mask bit l set = facility l failed.
struct Scenario {
  std::uint32_t failed_mask = 0;
  double probability = 0.0;
  std::vector<double> q_eff;  // taint_rate if failed else 0, per facility
  std::vector<double> r_eff;  // residual_taint_rate if failed else 0

  bool failed(int l) const { return (failed_mask >> l) & 1u; }
};

struct ScdInstance {
  std::vector<FacilityParams> facilities;
  std::vector<ConsumerParams> consumers;
  CostMatrices costs;
  std::vector<Scenario> scenarios;
  std::uint64_t seed = 0;  // generator seed recorded for reproducibility

  int num_facilities() const { return static_cast<int>(facilities.size()); }
  int num_consumers() const { return static_cast<int>(consumers.size()); }
  int num_scenarios() const { return static_cast<int>(scenarios.size()); }
  std::int64_t total_demand() const;
  std::int64_t total_capacity() const;
};

// Full-enumeration guard: every facility doubles the scenario count, and each
// scenario stores per-facility rate vectors, so 18 is the hard ceiling.
inline constexpr int kFacilityGuard = 16;
inline constexpr int kFacilityHardCap = 18;

struct GenConfig {
  int num_facilities = 2;
  int num_consumers = 2;
  std::uint64_t seed = 0;
  bool allow_large = false;  // permit 17..18 facilities

  // Sampling bounds. Monetary draws are whole currency units.
  std::int64_t fixed_cost_min = 1'000'000, fixed_cost_max = 2'000'000;
  std::int64_t demand_min = 100, demand_max = 300;
  std::int64_t inspection_min = 50'000, inspection_max = 100'000;
  double ship_clean_min = 100, ship_clean_max = 1000;
  double ship_tainted_min = 10'000, ship_tainted_max = 25'000;
  double reliability_min = 0.50, reliability_max = 0.95;
  double taint_min = 0.10, taint_max = 0.30;
  double residual_min = 0.01, residual_max = 0.09;
  double capacity_ratio = 1.3;    // total capacity = round(ratio * total demand)
  double discard_fraction = 0.25; // discard = fraction * ship_clean
  // Relative capacity weights; kept tight so no facility dominates the split.
  double weight_min = 0.8, weight_max = 1.2;
};

// Deterministic instance sampler: same config (seed included) => identical
// instance, bit for bit. Throws std::invalid_argument on bad config.
ScdInstance generate_instance(const GenConfig& cfg);

// All 2^|L| joint facility states in binary-counter order (facility 0 = least
// significant bit). Probabilities multiply per-facility reliabilities.
std::vector<Scenario> enumerate_scenarios(const std::vector<FacilityParams>& facilities);

// Structural and range checks; throws ValidationError naming the bad field.
void validate_instance(const ScdInstance& inst);

std::string instance_to_json(const ScdInstance& inst);
ScdInstance instance_from_json(const std::string& text);
void save_instance(const ScdInstance& inst, const std::string& path);
ScdInstance load_instance(const std::string& path);

}  // namespace scd
