#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "scd/instance.hpp"
#include "scd/model.hpp"

namespace scd {

enum class Stage1 { bgh, sgh, cbgh };  // all-open / score-greedy / capacity-greedy
enum class Stage2 { fsih, gih, rgih }; // inspect-all-failed / taint-bound / randomized-savings

const char* to_string(Stage1 s);
const char* to_string(Stage2 s);

struct PipelineConfig {
  Stage1 stage1 = Stage1::bgh;
  Stage2 stage2 = Stage2::fsih;
  double delta = 0.90;  // taint-bound tightness for gih
  double chi = 0.5;     // failure-odds weight in expected capacity
  std::uint64_t seed = 0;
};

std::string pipeline_name(const PipelineConfig& cfg);
std::optional<PipelineConfig> parse_pipeline(const std::string& name);
// The nine stage1 x stage2 combinations in fixed (stage1-major) order.
std::vector<PipelineConfig> all_pipelines(double delta = 0.90, std::uint64_t seed = 0);

struct SelectionResult {
  std::vector<std::uint8_t> x;
  bool capacity_short = false;  // ran out of facilities before covering demand
};

// chi-weighted average of full and failure-degraded capacity.
double expected_capacity(const FacilityParams& f, double chi);

SelectionResult select_bgh(const ScdInstance& inst);
SelectionResult select_sgh(const ScdInstance& inst, double chi = 0.5);
SelectionResult select_cbgh(const ScdInstance& inst, double chi = 0.5);

InspectionPlan inspect_fsih(const ScdInstance& inst, const std::vector<std::uint8_t>& x);
InspectionPlan inspect_gih(const ScdInstance& inst, const std::vector<std::uint8_t>& x,
                           double delta);
InspectionPlan inspect_rgih(const ScdInstance& inst, const std::vector<std::uint8_t>& x,
                            std::mt19937_64& rng);

// Drops inspections (largest regained delivered capacity first) in any
// scenario where inspecting would leave delivered capacity below demand.
void enforce_delivered_capacity(const ScdInstance& inst, const std::vector<std::uint8_t>& x,
                                InspectionPlan& z);

InspectionPlan make_inspections(const ScdInstance& inst, const std::vector<std::uint8_t>& x,
                                Stage2 method, double delta, std::uint64_t seed);

struct AllocationResult {
  FlowPlan flows;
  bool shortfall = false;    // some consumer left unserved in some scenario
  double max_unserved = 0.0; // largest delivered-unit residual
};

// Per scenario: serve consumers in index order, always from the open facility
// with the cheapest clean-shipping rate that still has capacity. Demand is
// booked in delivered units (alpha * produced), so inspected facilities
// produce extra to cover their discards.
AllocationResult allocate_greedy(const ScdInstance& inst, const std::vector<std::uint8_t>& x,
                                 const InspectionPlan& z);

// allocate_greedy + taint derivation + objective evaluation.
Solution build_solution(const ScdInstance& inst, std::vector<std::uint8_t> x, InspectionPlan z,
                        bool capacity_short = false);

Solution run_pipeline(const ScdInstance& inst, const PipelineConfig& cfg);

// Cheapest of the nine pipelines (per-pipeline seeds split from `seed`); used
// as the starting point for all improvement methods and SA.
Solution best_constructive(const ScdInstance& inst, double delta, std::uint64_t seed,
                           PipelineConfig* which = nullptr);

}  // namespace scd
