#include "scd/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "scd/constructive.hpp"
#include "scd/core.hpp"
#include "scd/exact.hpp"
#include "scd/improve.hpp"
#include "scd/instance.hpp"

namespace scd {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
        .count();
  }
};

// Runs one algorithm invocation, converting any exception into a failed row.
template <typename Fn>
ResultRow timed_row(int set_id, int instance_id, const char* algorithm, int replication,
                    std::uint64_t seed, bool& partial_failure, Fn&& body) {
  ResultRow row;
  row.set_id = set_id;
  row.instance_id = instance_id;
  row.algorithm = algorithm;
  row.replication = replication;
  row.seed = seed;
  Timer timer;
  try {
    row.cost = body();
  } catch (const std::exception&) {
    row.failed = true;
    row.cost = kNaN;
    row.gap = kNaN;
    partial_failure = true;
  }
  row.time_ms = timer.ms();
  return row;
}

std::string format_row(const ResultRow& r) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%d,%d,%s,%d,%.17g,%.17g,%.17g,%llu", r.set_id, r.instance_id,
                r.algorithm.c_str(), r.replication, r.cost, r.gap, r.time_ms,
                static_cast<unsigned long long>(r.seed));
  return buf;
}

const char* kColumnHeader = "set_id,instance_id,algorithm,replication,cost,gap,time_ms,seed";

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t begin = 0;
  while (true) {
    std::size_t end = line.find(sep, begin);
    out.push_back(line.substr(begin, end == std::string::npos ? end : end - begin));
    if (end == std::string::npos) break;
    begin = end + 1;
  }
  return out;
}

// Canonical display/report order for the algorithms the bench produces.
std::vector<std::string> canonical_algorithms() {
  std::vector<std::string> names{"exact"};
  for (const PipelineConfig& cfg : all_pipelines()) names.push_back(pipeline_name(cfg));
  names.push_back("local-x");
  names.push_back("vns");
  names.push_back("sa");
  return names;
}

int algorithm_rank(const std::string& name) {
  static const std::vector<std::string> order = canonical_algorithms();
  for (std::size_t i = 0; i < order.size(); ++i)
    if (order[i] == name) return static_cast<int>(i);
  return static_cast<int>(order.size());
}

// Mean gap (fraction) and mean time per instance, replications averaged.
struct InstanceMean {
  double gap = 0.0;
  double time_ms = 0.0;
  int runs = 0;
};

using MeanKey = std::tuple<int, std::string, int>;  // set, algorithm, instance

std::map<MeanKey, InstanceMean> per_instance_means(const std::vector<ResultRow>& rows) {
  std::map<MeanKey, InstanceMean> sums;
  for (const ResultRow& r : rows) {
    if (r.failed || std::isnan(r.cost)) continue;
    InstanceMean& m = sums[{r.set_id, r.algorithm, r.instance_id}];
    m.gap += r.gap;
    m.time_ms += r.time_ms;
    m.runs += 1;
  }
  for (auto& [key, m] : sums) {
    m.gap /= m.runs;
    m.time_ms /= m.runs;
  }
  return sums;
}

}  // namespace

std::vector<BenchSet> default_bench_sets() {
  std::vector<BenchSet> sets;
  int id = 1;
  for (int consumers : {2, 5, 10, 20})
    for (int facilities : {2, 5, 10}) sets.push_back({id++, consumers, facilities});
  return sets;
}

BenchResult run_bench(const BenchConfig& cfg, std::ostream* progress) {
  if (cfg.sets.empty()) throw ValidationError("bench: empty set matrix");
  if (cfg.instances_per_set < 1) throw ValidationError("bench: instances_per_set must be >= 1");
  if (cfg.replications < 1) throw ValidationError("bench: replications must be >= 1");

  BenchResult result;
  result.config = cfg;

  for (const BenchSet& set : cfg.sets) {
    const std::uint64_t set_seed = split_seed(cfg.master_seed, static_cast<std::uint64_t>(set.set_id));
    for (int instance_id = 1; instance_id <= cfg.instances_per_set; ++instance_id) {
      const std::uint64_t inst_seed = split_seed(set_seed, static_cast<std::uint64_t>(instance_id));
      std::vector<ResultRow> rows;

      ScdInstance inst;
      try {
        GenConfig gen;
        gen.num_facilities = set.num_facilities;
        gen.num_consumers = set.num_consumers;
        gen.seed = inst_seed;
        gen.allow_large = set.num_facilities > kFacilityGuard;
        inst = generate_instance(gen);
      } catch (const std::exception&) {
        ResultRow row;
        row.set_id = set.set_id;
        row.instance_id = instance_id;
        row.algorithm = "generate";
        row.seed = inst_seed;
        row.failed = true;
        row.cost = row.gap = kNaN;
        result.rows.push_back(std::move(row));
        result.partial_failure = true;
        continue;
      }

      // Exact oracle (reference when it proves optimality within budget).
      bool proven = false;
      double exact_optimum = kNaN;
      if (set.num_facilities <= cfg.exact_facility_cap) {
        rows.push_back(timed_row(set.set_id, instance_id, "exact", 1, inst_seed,
                                 result.partial_failure, [&] {
                                   ExactResult er =
                                       solve_exact(inst, cfg.exact_budget_s,
                                                   set.num_facilities > kExactFacilityGuard);
                                   if (!er.feasible) throw ValidationError("exact: infeasible");
                                   proven = er.proven_optimal;
                                   exact_optimum = er.optimum;
                                   return er.optimum;
                                 }));
      }

      // Nine constructive pipelines; the randomized one is replicated.
      const std::uint64_t pipe_block = split_seed(inst_seed, 1);
      Solution best_start;
      PipelineConfig best_cfg;
      bool have_start = false;
      std::vector<PipelineConfig> pipelines = all_pipelines(cfg.delta);
      for (std::size_t i = 0; i < pipelines.size(); ++i) {
        PipelineConfig pipe = pipelines[i];
        const std::uint64_t pipe_seed = split_seed(pipe_block, static_cast<std::uint64_t>(i));
        const std::string name = pipeline_name(pipe);
        const int reps = pipe.stage2 == Stage2::rgih ? cfg.replications : 1;
        for (int rep = 1; rep <= reps; ++rep) {
          pipe.seed = reps == 1 ? pipe_seed : split_seed(pipe_seed, static_cast<std::uint64_t>(rep));
          rows.push_back(timed_row(set.set_id, instance_id, name.c_str(), rep, pipe.seed,
                                   result.partial_failure, [&] {
                                     Solution sol = run_pipeline(inst, pipe);
                                     if (!have_start || sol.cost.total < best_start.cost.total) {
                                       best_start = sol;
                                       best_cfg = pipe;
                                       have_start = true;
                                     }
                                     return sol.cost.total;
                                   }));
        }
      }

      // Improvement methods and SA, all started from the cheapest constructive run.
      const std::uint64_t vns_block = split_seed(inst_seed, 2);
      const std::uint64_t sa_block = split_seed(inst_seed, 3);
      if (have_start) {
        rows.push_back(timed_row(set.set_id, instance_id, "local-x", 1, best_cfg.seed,
                                 result.partial_failure, [&] {
                                   Stage2Config s2{best_cfg.stage2, cfg.delta, best_cfg.seed};
                                   return local_x(inst, best_start, s2).cost.total;
                                 }));
        for (int rep = 1; rep <= cfg.replications; ++rep) {
          const std::uint64_t seed = split_seed(vns_block, static_cast<std::uint64_t>(rep));
          rows.push_back(timed_row(set.set_id, instance_id, "vns", rep, seed,
                                   result.partial_failure, [&] {
                                     VnsConfig vc;
                                     vc.k_max = cfg.k_max;
                                     vc.seed = seed;
                                     return vns_transport(inst, best_start, vc)
                                         .solution.cost.total;
                                   }));
        }
        for (int rep = 1; rep <= cfg.replications; ++rep) {
          const std::uint64_t seed = split_seed(sa_block, static_cast<std::uint64_t>(rep));
          rows.push_back(timed_row(set.set_id, instance_id, "sa", rep, seed,
                                   result.partial_failure, [&] {
                                     SaConfig sc = cfg.sa;
                                     sc.seed = seed;
                                     return sa_solve(inst, best_start, sc).best.cost.total;
                                   }));
        }
      } else {
        for (const char* name : {"local-x", "vns", "sa"}) {
          ResultRow row;
          row.set_id = set.set_id;
          row.instance_id = instance_id;
          row.algorithm = name;
          row.seed = inst_seed;
          row.failed = true;
          row.cost = row.gap = kNaN;
          rows.push_back(std::move(row));
          result.partial_failure = true;
        }
      }

      // Gap pass: proven exact optimum if available, else best cost found.
      double reference = kNaN;
      if (proven) {
        reference = exact_optimum;
      } else {
        for (const ResultRow& r : rows)
          if (!r.failed && (std::isnan(reference) || r.cost < reference)) reference = r.cost;
      }
      if (!std::isnan(reference) && reference > 0.0)
        for (ResultRow& r : rows)
          if (!r.failed) r.gap = (r.cost - reference) / reference;

      if (progress) {
        *progress << "set " << set.set_id << " (" << set.num_consumers << "x"
                  << set.num_facilities << ") instance " << instance_id << ": " << rows.size()
                  << " rows" << (proven ? "" : ", reference = best found") << '\n';
        progress->flush();
      }
      for (ResultRow& r : rows) result.rows.push_back(std::move(r));
    }
  }
  return result;
}

void write_results_csv(const std::string& path, const BenchResult& result) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open for writing: " + path);
  out << "# scd-bench v1 master_seed=" << result.config.master_seed << " sets=";
  for (std::size_t i = 0; i < result.config.sets.size(); ++i) {
    if (i) out << ';';
    out << result.config.sets[i].num_consumers << 'x' << result.config.sets[i].num_facilities;
  }
  out << " instances=" << result.config.instances_per_set
      << " replications=" << result.config.replications << '\n';
  out << kColumnHeader << '\n';
  for (const ResultRow& r : result.rows) out << format_row(r) << '\n';
  if (!out) throw ValidationError("write failed: " + path);
}

BenchResult read_results_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open: " + path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty results file: " + path);

  std::istringstream head(line);
  std::string hash, tag, version;
  head >> hash >> tag >> version;
  if (hash != "#" || tag != "scd-bench" || version != "v1")
    throw ParseError("unrecognized results header: " + line);

  BenchResult result;
  result.config.sets.clear();
  std::string kv;
  while (head >> kv) {
    const std::size_t eq = kv.find('=');
    if (eq == std::string::npos) throw ParseError("malformed header token: " + kv);
    const std::string key = kv.substr(0, eq);
    const std::string value = kv.substr(eq + 1);
    if (key == "master_seed") {
      result.config.master_seed = std::stoull(value);
    } else if (key == "sets") {
      int id = 1;
      for (const std::string& item : split(value, ';')) {
        const std::size_t x = item.find('x');
        if (x == std::string::npos) throw ParseError("malformed set token: " + item);
        BenchSet set;
        set.set_id = id++;
        set.num_consumers = std::stoi(item.substr(0, x));
        set.num_facilities = std::stoi(item.substr(x + 1));
        result.config.sets.push_back(set);
      }
    } else if (key == "instances") {
      result.config.instances_per_set = std::stoi(value);
    } else if (key == "replications") {
      result.config.replications = std::stoi(value);
    }
    // Unknown keys are ignored for forward compatibility.
  }

  if (!std::getline(in, line) || line != kColumnHeader)
    throw ParseError("missing column header in " + path);

  int line_no = 2;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::vector<std::string> fields = split(line, ',');
    if (fields.size() != 8)
      throw ParseError(path + ":" + std::to_string(line_no) + ": expected 8 fields");
    try {
      ResultRow r;
      r.set_id = std::stoi(fields[0]);
      r.instance_id = std::stoi(fields[1]);
      r.algorithm = fields[2];
      r.replication = std::stoi(fields[3]);
      r.cost = std::stod(fields[4]);
      r.gap = std::stod(fields[5]);
      r.time_ms = std::stod(fields[6]);
      r.seed = std::stoull(fields[7]);
      r.failed = std::isnan(r.cost);
      if (r.failed) result.partial_failure = true;
      result.rows.push_back(std::move(r));
    } catch (const std::invalid_argument&) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": malformed field");
    } catch (const std::out_of_range&) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": value out of range");
    }
  }
  return result;
}

BenchReport make_report(const BenchResult& result) {
  if (result.rows.empty()) throw ValidationError("report: no result rows");

  std::map<int, BenchSet> sets;
  for (const BenchSet& s : result.config.sets) sets[s.set_id] = s;

  const std::map<MeanKey, InstanceMean> means = per_instance_means(result.rows);

  // Collapse instances into per-(set, algorithm) statistics.
  struct Agg {
    double min_gap = std::numeric_limits<double>::infinity();
    double max_gap = -std::numeric_limits<double>::infinity();
    double sum_gap = 0.0;
    double sum_time = 0.0;
    int instances = 0;
  };
  std::map<std::pair<int, std::string>, Agg> aggs;
  for (const auto& [key, m] : means) {
    Agg& a = aggs[{std::get<0>(key), std::get<1>(key)}];
    a.min_gap = std::min(a.min_gap, m.gap);
    a.max_gap = std::max(a.max_gap, m.gap);
    a.sum_gap += m.gap;
    a.sum_time += m.time_ms;
    a.instances += 1;
  }

  BenchReport report;
  for (const auto& [key, a] : aggs) {
    ReportLine line;
    line.set_id = key.first;
    if (auto it = sets.find(key.first); it != sets.end()) {
      line.num_consumers = it->second.num_consumers;
      line.num_facilities = it->second.num_facilities;
    }
    line.algorithm = key.second;
    line.instances = a.instances;
    line.min_gap_pct = 100.0 * a.min_gap;
    line.avg_gap_pct = 100.0 * a.sum_gap / a.instances;
    line.max_gap_pct = 100.0 * a.max_gap;
    line.avg_time_ms = a.sum_time / a.instances;
    report.lines.push_back(std::move(line));
  }
  std::sort(report.lines.begin(), report.lines.end(),
            [](const ReportLine& a, const ReportLine& b) {
              if (a.set_id != b.set_id) return a.set_id < b.set_id;
              const int ra = algorithm_rank(a.algorithm), rb = algorithm_rank(b.algorithm);
              if (ra != rb) return ra < rb;
              return a.algorithm < b.algorithm;
            });

  std::ostringstream table;
  int current_set = -1;
  for (const ReportLine& line : report.lines) {
    if (line.set_id != current_set) {
      current_set = line.set_id;
      table << "set " << line.set_id << " (" << line.num_consumers << " consumers x "
            << line.num_facilities << " facilities)\n";
      char head[160];
      std::snprintf(head, sizeof(head), "  %-12s %10s %10s %10s %12s %5s\n", "algorithm",
                    "min gap %", "avg gap %", "max gap %", "avg time ms", "inst");
      table << head;
    }
    char buf[160];
    std::snprintf(buf, sizeof(buf), "  %-12s %10.3f %10.3f %10.3f %12.3f %5d\n",
                  line.algorithm.c_str(), line.min_gap_pct, line.avg_gap_pct, line.max_gap_pct,
                  line.avg_time_ms, line.instances);
    table << buf;
  }
  report.table = table.str();
  return report;
}

void write_report(const std::string& out_dir, const BenchResult& result) {
  const BenchReport report = make_report(result);
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir(out_dir);

  {
    std::ofstream out(dir / "summary.csv");
    if (!out) throw ValidationError("cannot open for writing: " + (dir / "summary.csv").string());
    out << "set_id,consumers,facilities,algorithm,instances,min_gap_pct,avg_gap_pct,max_gap_pct,"
           "avg_time_ms\n";
    for (const ReportLine& line : report.lines) {
      char buf[256];
      std::snprintf(buf, sizeof(buf), "%d,%d,%d,%s,%d,%.17g,%.17g,%.17g,%.17g\n", line.set_id,
                    line.num_consumers, line.num_facilities, line.algorithm.c_str(),
                    line.instances, line.min_gap_pct, line.avg_gap_pct, line.max_gap_pct,
                    line.avg_time_ms);
      out << buf;
    }
  }
  {
    std::ofstream out(dir / "report.txt");
    if (!out) throw ValidationError("cannot open for writing: " + (dir / "report.txt").string());
    out << report.table;
  }

  // Per-algorithm plot data: average across every set sharing a facility count.
  std::map<int, BenchSet> sets;
  for (const BenchSet& s : result.config.sets) sets[s.set_id] = s;
  const std::map<MeanKey, InstanceMean> means = per_instance_means(result.rows);

  struct PlotAgg {
    double sum_gap = 0.0;
    double sum_time = 0.0;
    int n = 0;
  };
  std::map<std::string, std::map<int, PlotAgg>> by_algo;  // algorithm -> facilities -> agg
  for (const auto& [key, m] : means) {
    auto it = sets.find(std::get<0>(key));
    if (it == sets.end()) continue;
    PlotAgg& agg = by_algo[std::get<1>(key)][it->second.num_facilities];
    agg.sum_gap += m.gap;
    agg.sum_time += m.time_ms;
    agg.n += 1;
  }
  for (const auto& [algo, per_fac] : by_algo) {
    std::ofstream gap_out(dir / ("plot_gap_" + algo + ".csv"));
    std::ofstream time_out(dir / ("plot_time_" + algo + ".csv"));
    if (!gap_out || !time_out) throw ValidationError("cannot write plot data for " + algo);
    gap_out << "facilities,value\n";
    time_out << "facilities,value\n";
    for (const auto& [facilities, agg] : per_fac) {
      char buf[96];
      std::snprintf(buf, sizeof(buf), "%d,%.17g\n", facilities, 100.0 * agg.sum_gap / agg.n);
      gap_out << buf;
      std::snprintf(buf, sizeof(buf), "%d,%.17g\n", facilities, agg.sum_time / agg.n);
      time_out << buf;
    }
  }
}

}  // namespace scd
