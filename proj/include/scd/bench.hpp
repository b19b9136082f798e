#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "scd/sa.hpp"

namespace scd {

// One cell of the experiment matrix: every set holds `instances_per_set`
// randomly generated instances of the same size.
struct BenchSet {
  int set_id = 0;
  int num_consumers = 0;
  int num_facilities = 0;
};

// The default 12-set matrix: consumers {2,5,10,20} x facilities {2,5,10},
// consumer-major (set 1 = 2x2, set 2 = 2x5, set 3 = 2x10, set 4 = 5x2, ...).
std::vector<BenchSet> default_bench_sets();

struct BenchConfig {
  std::vector<BenchSet> sets = default_bench_sets();
  int instances_per_set = 10;
  int replications = 30;  // for the randomized algorithms (rgih, vns, sa)
  std::uint64_t master_seed = 1;
  int exact_facility_cap = 10;  // run the exact oracle only when |L| <= cap
  double exact_budget_s = 60.0;
  double delta = 0.90;  // gih taint-coverage threshold
  int k_max = 50;       // vns neighborhood count
  SaConfig sa;          // seed field is ignored; per-replication seeds derived
};

// One benchmark run. `gap` is the fractional gap (cost - ref) / ref where ref
// is the proven exact optimum for the instance when available, else the best
// cost any algorithm found on that instance. `seed` is the RNG seed of this
// particular run. Failed rows carry NaN cost/gap.
struct ResultRow {
  int set_id = 0;
  int instance_id = 0;
  std::string algorithm;
  int replication = 1;
  double cost = 0.0;
  double gap = 0.0;
  double time_ms = 0.0;
  std::uint64_t seed = 0;
  bool failed = false;
};

struct BenchResult {
  BenchConfig config;
  std::vector<ResultRow> rows;
  bool partial_failure = false;
};

// Runs the whole matrix. Per instance: the exact oracle (when within the
// facility cap), the nine constructive pipelines (randomized ones replicated),
// then local-x, vns and sa started from the cheapest constructive solution.
// Exceptions in a single run are recorded as a failed row and the bench
// continues. If `progress` is non-null a one-line note per instance is
// written to it.
BenchResult run_bench(const BenchConfig& cfg, std::ostream* progress = nullptr);

// CSV with a `# scd-bench v1 ...` comment carrying the master seed and the
// set matrix, then a header line and one row per run.
void write_results_csv(const std::string& path, const BenchResult& result);
BenchResult read_results_csv(const std::string& path);

// Aggregates per (set, algorithm): replications are averaged per instance
// first, then min/avg/max of the per-instance mean gaps across instances.
// Gap statistics are percentages here (the CSV stores fractions).
struct ReportLine {
  int set_id = 0;
  int num_consumers = 0;
  int num_facilities = 0;
  std::string algorithm;
  int instances = 0;  // instances with at least one successful run
  double min_gap_pct = 0.0;
  double avg_gap_pct = 0.0;
  double max_gap_pct = 0.0;
  double avg_time_ms = 0.0;
};

struct BenchReport {
  std::vector<ReportLine> lines;
  std::string table;  // human-readable per-set tables
};

BenchReport make_report(const BenchResult& result);

// Writes summary.csv, report.txt, and per-algorithm plot data
// (plot_gap_<algo>.csv and plot_time_<algo>.csv, columns `facilities,value`,
// value averaged over every set sharing that facility count).
void write_report(const std::string& out_dir, const BenchResult& result);

}  // namespace scd
