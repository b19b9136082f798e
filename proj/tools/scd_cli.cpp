// scd: command-line front end for the supply chain design solver suite.
//
// Subcommands: generate, solve, exact, bench, report.
// Exit codes: 0 success, 1 usage or input error, 2 infeasible instance,
// 3 benchmark finished with failed rows.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "scd/bench.hpp"
#include "scd/constructive.hpp"
#include "scd/core.hpp"
#include "scd/exact.hpp"
#include "scd/improve.hpp"
#include "scd/instance.hpp"
#include "scd/model.hpp"
#include "scd/sa.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitPartialBench = 3;

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

void print_breakdown(const scd::CostBreakdown& c) {
  std::printf("fixed       %.4f\n", c.fixed);
  std::printf("transport   %.4f\n", c.transport);
  std::printf("taint       %.4f\n", c.taint_penalty);
  std::printf("discard     %.4f\n", c.discard);
  std::printf("inspection  %.4f\n", c.inspection);
  std::printf("total       %.4f\n", c.total);
}

struct GenerateArgs {
  int facilities = 0;
  int consumers = 0;
  std::uint64_t seed = 1;
  std::string out;
  bool allow_large = false;
};

int cmd_generate(const GenerateArgs& args) {
  scd::GenConfig cfg;
  cfg.num_facilities = args.facilities;
  cfg.num_consumers = args.consumers;
  cfg.seed = args.seed;
  cfg.allow_large = args.allow_large;
  const scd::ScdInstance inst = scd::generate_instance(cfg);
  scd::save_instance(inst, args.out);
  std::printf("wrote %s\n", args.out.c_str());
  std::printf("facilities %d  consumers %d  scenarios %d\n", inst.num_facilities(),
              inst.num_consumers(), inst.num_scenarios());
  std::printf("total_capacity %lld  total_demand %lld\n",
              static_cast<long long>(inst.total_capacity()),
              static_cast<long long>(inst.total_demand()));
  return kExitOk;
}

struct SolveArgs {
  std::string instance_path;
  std::string algo;
  std::string out;
  std::uint64_t seed = 1;
  int replications = 1;
  double delta = 0.90;
  // vns
  int k_max = 50;
  std::string vns_metric = "shipping";
  // sa
  double t0 = 8000.0;
  double theta = 0.75;
  double t_final = 0.01;
  int iters = 0;
  std::string acceptance = "metropolis";
  bool auto_t0 = false;
  // exact
  double budget = std::numeric_limits<double>::infinity();
  bool force = false;
};

// Short accept-everything walk from the start solution; feeds the
// initial-temperature estimator.
double walk_estimate_t0(const scd::ScdInstance& inst, const scd::Solution& start,
                        std::uint64_t seed, double varpi) {
  std::mt19937_64 rng(scd::split_seed(seed, 0x7730));
  std::vector<double> samples{start.cost.total};
  scd::Solution cur = start;
  for (int i = 0; i < 19; ++i) {
    scd::SaProposal prop = scd::propose_move(inst, cur.selection.x, cur.inspections, rng);
    cur = scd::build_solution(inst, std::move(prop.x), std::move(prop.z));
    samples.push_back(cur.cost.total);
  }
  return scd::estimate_initial_temperature(samples, varpi);
}

int cmd_solve(const SolveArgs& args) {
  const scd::ScdInstance inst = scd::load_instance(args.instance_path);
  const Clock::time_point start_time = Clock::now();

  scd::Solution sol;
  if (args.algo == "exact") {
    const scd::ExactResult er = scd::solve_exact(inst, args.budget, args.force);
    if (!er.feasible) {
      std::fprintf(stderr, "infeasible: no facility selection covers demand\n");
      return kExitInfeasible;
    }
    std::printf("proven_optimal %s\n", er.proven_optimal ? "yes" : "no");
    sol = er.best;
  } else if (args.algo == "local-x") {
    scd::PipelineConfig which;
    const scd::Solution start = scd::best_constructive(inst, args.delta, args.seed, &which);
    std::printf("start %s cost %.4f\n", scd::pipeline_name(which).c_str(), start.cost.total);
    sol = scd::local_x(inst, start, scd::Stage2Config{which.stage2, args.delta, which.seed});
  } else {
    // Randomized methods: optional replications, best result kept.
    std::optional<scd::PipelineConfig> pipeline = scd::parse_pipeline(args.algo);
    const bool is_vns = args.algo == "vns";
    const bool is_sa = args.algo == "sa";
    if (!pipeline && !is_vns && !is_sa) {
      std::fprintf(stderr, "error: unknown algorithm '%s'\n", args.algo.c_str());
      return kExitUsage;
    }
    if (args.replications < 1) {
      std::fprintf(stderr, "error: --replications must be >= 1\n");
      return kExitUsage;
    }

    scd::Solution start;
    scd::SaConfig sa_cfg;
    if (is_vns || is_sa) start = scd::best_constructive(inst, args.delta, args.seed, nullptr);
    if (is_sa) {
      sa_cfg.t0 = args.t0;
      sa_cfg.theta = args.theta;
      sa_cfg.t_final = args.t_final;
      sa_cfg.max_iter = args.iters;
      if (args.acceptance == "metropolis") {
        sa_cfg.acceptance = scd::SaAcceptance::metropolis;
      } else if (args.acceptance == "descent") {
        sa_cfg.acceptance = scd::SaAcceptance::descent;
      } else {
        std::fprintf(stderr, "error: --acceptance must be metropolis or descent\n");
        return kExitUsage;
      }
      if (args.auto_t0) {
        const double est = walk_estimate_t0(inst, start, args.seed, 0.95);
        if (est > sa_cfg.t_final) {
          sa_cfg.t0 = est;
          std::printf("auto_t0 %.4f\n", est);
        } else {
          std::printf("auto_t0 estimate %.4f too small, keeping t0 %.4f\n", est, sa_cfg.t0);
        }
      }
    }
    scd::VnsConfig vns_cfg;
    if (is_vns) {
      vns_cfg.k_max = args.k_max;
      if (args.vns_metric == "shipping") {
        vns_cfg.metric = scd::VnsConfig::Metric::shipping;
      } else if (args.vns_metric == "full") {
        vns_cfg.metric = scd::VnsConfig::Metric::full_coefficient;
      } else {
        std::fprintf(stderr, "error: --vns-metric must be shipping or full\n");
        return kExitUsage;
      }
    }

    double cost_sum = 0.0;
    for (int rep = 1; rep <= args.replications; ++rep) {
      const std::uint64_t rep_seed =
          args.replications == 1 ? args.seed : scd::split_seed(args.seed, rep);
      scd::Solution run;
      if (pipeline) {
        scd::PipelineConfig cfg = *pipeline;
        cfg.delta = args.delta;
        cfg.seed = rep_seed;
        run = scd::run_pipeline(inst, cfg);
      } else if (is_vns) {
        vns_cfg.seed = rep_seed;
        const scd::VnsResult vr = scd::vns_transport(inst, start, vns_cfg);
        for (const scd::VnsScenarioTrace& tr : vr.traces)
          std::printf("vns scenario %d: %.4f -> %.4f (%zu accepted moves)\n", tr.scenario,
                      tr.accepted_costs.front(), tr.accepted_costs.back(),
                      tr.accepted_costs.size() - 1);
        run = vr.solution;
      } else {
        sa_cfg.seed = rep_seed;
        const scd::SaResult sr = scd::sa_solve(inst, start, sa_cfg);
        std::printf("sa iterations %zu\n", sr.trace.size());
        run = sr.best;
      }
      cost_sum += run.cost.total;
      if (args.replications > 1) std::printf("replication %d: %.4f\n", rep, run.cost.total);
      if (rep == 1 || run.cost.total < sol.cost.total) sol = run;
    }
    if (args.replications > 1) {
      std::printf("mean %.4f\n", cost_sum / args.replications);
      std::printf("best %.4f\n", sol.cost.total);
    }
  }

  const double ms = elapsed_ms(start_time);
  print_breakdown(sol.cost);
  std::printf("time_ms     %.3f\n", ms);
  if (!args.out.empty()) {
    scd::save_solution(sol, args.out);
    std::printf("wrote %s\n", args.out.c_str());
  }
  return kExitOk;
}

struct ExactArgs {
  std::string instance_path;
  std::string out;
  double budget = std::numeric_limits<double>::infinity();
  bool force = false;
};

int cmd_exact(const ExactArgs& args) {
  const scd::ScdInstance inst = scd::load_instance(args.instance_path);
  const scd::ExactResult er = scd::solve_exact(inst, args.budget, args.force);
  if (!er.feasible) {
    std::fprintf(stderr, "infeasible: no facility selection covers demand\n");
    return kExitInfeasible;
  }
  std::printf("optimum %.4f\n", er.optimum);
  std::printf("proven_optimal %s\n", er.proven_optimal ? "yes" : "no");
  std::printf("selections_enumerated %ld\n", er.enumerated_x);
  std::printf("transport_solves %ld\n", er.enumerated_z);
  std::printf("time_ms     %.3f\n", er.wall_time_s * 1000.0);
  print_breakdown(er.best.cost);
  if (!args.out.empty()) {
    scd::save_solution(er.best, args.out);
    std::printf("wrote %s\n", args.out.c_str());
  }
  return kExitOk;
}

struct BenchArgs {
  std::string out;
  std::uint64_t master_seed = 1;
  int instances = 10;
  int replications = 30;
  std::vector<int> consumers = {2, 5, 10, 20};
  std::vector<int> facilities = {2, 5, 10};
  int exact_cap = 10;
  double exact_budget = 60.0;
  double delta = 0.90;
  int k_max = 50;
  scd::SaConfig sa;
  bool quiet = false;
};

int cmd_bench(const BenchArgs& args) {
  scd::BenchConfig cfg;
  cfg.sets.clear();
  int id = 1;
  for (int c : args.consumers)
    for (int f : args.facilities) cfg.sets.push_back({id++, c, f});
  cfg.instances_per_set = args.instances;
  cfg.replications = args.replications;
  cfg.master_seed = args.master_seed;
  cfg.exact_facility_cap = args.exact_cap;
  cfg.exact_budget_s = args.exact_budget;
  cfg.delta = args.delta;
  cfg.k_max = args.k_max;
  cfg.sa = args.sa;

  const scd::BenchResult result = scd::run_bench(cfg, args.quiet ? nullptr : &std::cerr);
  scd::write_results_csv(args.out, result);
  std::printf("wrote %s (%zu rows)\n", args.out.c_str(), result.rows.size());
  if (result.partial_failure) {
    std::fprintf(stderr, "warning: some runs failed; their rows carry nan cost\n");
    return kExitPartialBench;
  }
  return kExitOk;
}

struct ReportArgs {
  std::string csv_path;
  std::string out_dir;
};

int cmd_report(const ReportArgs& args) {
  const scd::BenchResult result = scd::read_results_csv(args.csv_path);
  const scd::BenchReport report = scd::make_report(result);
  std::fputs(report.table.c_str(), stdout);
  if (!args.out_dir.empty()) {
    scd::write_report(args.out_dir, result);
    std::printf("wrote %s/summary.csv, report.txt and plot data\n", args.out_dir.c_str());
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-stage supply chain design under disruption: solvers and benchmarks"};
  app.require_subcommand(1);

  GenerateArgs gen;
  CLI::App* gen_cmd = app.add_subcommand("generate", "generate a random instance file");
  gen_cmd->add_option("--facilities", gen.facilities, "number of facilities")->required();
  gen_cmd->add_option("--consumers", gen.consumers, "number of consumers")->required();
  gen_cmd->add_option("--seed", gen.seed, "generator seed");
  gen_cmd->add_option("--out", gen.out, "output instance JSON path")->required();
  gen_cmd->add_flag("--allow-large", gen.allow_large,
                    "permit more than 16 facilities (scenario count doubles per facility)");

  SolveArgs solve;
  CLI::App* solve_cmd = app.add_subcommand("solve", "run one algorithm on an instance");
  solve_cmd->add_option("instance", solve.instance_path, "instance JSON path")->required();
  solve_cmd
      ->add_option("--algo", solve.algo,
                   "bgh-fsih .. cbgh-rgih, local-x, vns, sa, exact")
      ->required();
  solve_cmd->add_option("--out", solve.out, "write the solution JSON here");
  solve_cmd->add_option("--seed", solve.seed, "RNG seed");
  solve_cmd->add_option("--replications", solve.replications,
                        "independent repeats for randomized algorithms; best kept");
  solve_cmd->add_option("--delta", solve.delta, "taint coverage tightness for gih");
  solve_cmd->add_option("--kmax", solve.k_max, "vns neighborhood count");
  solve_cmd->add_option("--vns-metric", solve.vns_metric, "shipping | full");
  solve_cmd->add_option("--t0", solve.t0, "sa initial temperature");
  solve_cmd->add_option("--theta", solve.theta, "sa cooling factor");
  solve_cmd->add_option("--t-final", solve.t_final, "sa stopping temperature");
  solve_cmd->add_option("--iters", solve.iters, "sa iteration cap (0 = auto)");
  solve_cmd->add_option("--acceptance", solve.acceptance, "metropolis | descent");
  solve_cmd->add_flag("--auto-t0", solve.auto_t0,
                      "estimate the initial temperature from a short random walk");
  solve_cmd->add_option("--budget", solve.budget, "time budget in seconds (exact)");
  solve_cmd->add_flag("--force", solve.force, "lift the exact oracle's facility guard");

  ExactArgs exact;
  CLI::App* exact_cmd = app.add_subcommand("exact", "exact oracle with enumeration statistics");
  exact_cmd->add_option("instance", exact.instance_path, "instance JSON path")->required();
  exact_cmd->add_option("--out", exact.out, "write the optimal solution JSON here");
  exact_cmd->add_option("--budget", exact.budget, "time budget in seconds");
  exact_cmd->add_flag("--force", exact.force, "lift the facility guard");

  BenchArgs bench;
  CLI::App* bench_cmd = app.add_subcommand("bench", "run the benchmark matrix, write CSV");
  bench_cmd->add_option("--out", bench.out, "results CSV path")->required();
  bench_cmd->add_option("--master-seed", bench.master_seed, "master seed");
  bench_cmd->add_option("--instances", bench.instances, "instances per set");
  bench_cmd->add_option("--replications", bench.replications,
                        "replications for randomized algorithms");
  bench_cmd->add_option("--consumers", bench.consumers, "consumer counts")->delimiter(',');
  bench_cmd->add_option("--facilities", bench.facilities, "facility counts")->delimiter(',');
  bench_cmd->add_option("--exact-cap", bench.exact_cap,
                        "run the exact oracle only up to this many facilities");
  bench_cmd->add_option("--exact-budget", bench.exact_budget, "exact time budget in seconds");
  bench_cmd->add_option("--delta", bench.delta, "taint coverage tightness for gih");
  bench_cmd->add_option("--kmax", bench.k_max, "vns neighborhood count");
  bench_cmd->add_option("--t0", bench.sa.t0, "sa initial temperature");
  bench_cmd->add_option("--theta", bench.sa.theta, "sa cooling factor");
  bench_cmd->add_option("--t-final", bench.sa.t_final, "sa stopping temperature");
  bench_cmd->add_option("--iters", bench.sa.max_iter, "sa iteration cap (0 = auto)");
  bench_cmd->add_flag("--quiet", bench.quiet, "suppress per-instance progress on stderr");

  ReportArgs report;
  CLI::App* report_cmd = app.add_subcommand("report", "aggregate a results CSV into tables");
  report_cmd->add_option("csv", report.csv_path, "results CSV path")->required();
  report_cmd->add_option("--out-dir", report.out_dir, "write summary.csv, report.txt, plot data");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (gen_cmd->parsed()) return cmd_generate(gen);
    if (solve_cmd->parsed()) return cmd_solve(solve);
    if (exact_cmd->parsed()) return cmd_exact(exact);
    if (bench_cmd->parsed()) return cmd_bench(bench);
    if (report_cmd->parsed()) return cmd_report(report);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  }
  return kExitUsage;
}
