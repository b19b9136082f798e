#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

namespace {

struct CmdResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CmdResult run_cli(const std::string& args) {
  const std::string out_path = "/tmp/scd_cli_stdout.txt";
  const std::string err_path = "/tmp/scd_cli_stderr.txt";
  const std::string cmd =
      std::string(SCD_CLI_PATH) + " " + args + " > " + out_path + " 2> " + err_path;
  const int status = std::system(cmd.c_str());
  CmdResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out_path);
  r.err = slurp(err_path);
  return r;
}

// Last "<label>  <number>" occurrence in the output (the cost breakdown).
double parse_labeled(const std::string& out, const std::string& label) {
  size_t pos = out.rfind(label + " ");
  REQUIRE(pos != std::string::npos);
  pos += label.size();
  return std::stod(out.substr(pos));
}

const char* kInst = "/tmp/scd_cli_instance.json";

}  // namespace

TEST_CASE("generate writes a deterministic instance file") {
  const CmdResult a =
      run_cli(std::string("generate --facilities 2 --consumers 2 --seed 3 --out ") + kInst);
  REQUIRE(a.exit_code == 0);
  CHECK(a.out.find("wrote") != std::string::npos);
  CHECK(a.out.find("scenarios 4") != std::string::npos);
  REQUIRE(std::filesystem::exists(kInst));

  const CmdResult b =
      run_cli("generate --facilities 2 --consumers 2 --seed 3 --out /tmp/scd_cli_again.json");
  REQUIRE(b.exit_code == 0);
  CHECK(slurp(kInst) == slurp("/tmp/scd_cli_again.json"));
  std::remove("/tmp/scd_cli_again.json");

  SUBCASE("another seed gives another instance") {
    const CmdResult c =
        run_cli("generate --facilities 2 --consumers 2 --seed 4 --out /tmp/scd_cli_other.json");
    REQUIRE(c.exit_code == 0);
    CHECK(slurp(kInst) != slurp("/tmp/scd_cli_other.json"));
    std::remove("/tmp/scd_cli_other.json");
  }
}

TEST_CASE("generate refuses runaway scenario counts") {
  const CmdResult r =
      run_cli("generate --facilities 20 --consumers 2 --out /tmp/scd_cli_never.json");
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("1048576") != std::string::npos);
  CHECK_FALSE(std::filesystem::exists("/tmp/scd_cli_never.json"));
}

TEST_CASE("missing required options is a usage error") {
  CHECK(run_cli("generate --facilities 2").exit_code == 1);
  CHECK(run_cli("").exit_code == 1);              // subcommand required
  CHECK(run_cli("solve /tmp/nope.json").exit_code == 1);  // --algo required
}

TEST_CASE("solve: exact dominates a pipeline and reports its proof") {
  run_cli(std::string("generate --facilities 2 --consumers 3 --seed 11 --out ") + kInst);

  const CmdResult exact = run_cli(std::string("solve ") + kInst + " --algo exact");
  REQUIRE(exact.exit_code == 0);
  CHECK(exact.out.find("proven_optimal yes") != std::string::npos);
  const double opt = parse_labeled(exact.out, "total");

  const CmdResult heur = run_cli(std::string("solve ") + kInst + " --algo sgh-fsih");
  REQUIRE(heur.exit_code == 0);
  const double cost = parse_labeled(heur.out, "total");
  CHECK(cost >= opt - 1e-6 * opt);

  SUBCASE("breakdown lines are all present") {
    for (const char* label : {"fixed", "transport", "taint", "discard", "inspection", "time_ms"})
      CHECK(exact.out.find(label) != std::string::npos);
  }
}

TEST_CASE("solve --algo sa is reproducible for a fixed seed") {
  run_cli(std::string("generate --facilities 3 --consumers 2 --seed 21 --out ") + kInst);
  const CmdResult a = run_cli(std::string("solve ") + kInst +
                              " --algo sa --seed 7 --out /tmp/scd_cli_sa1.json");
  REQUIRE(a.exit_code == 0);
  CHECK(a.out.find("sa iterations 48") != std::string::npos);
  const CmdResult b = run_cli(std::string("solve ") + kInst +
                              " --algo sa --seed 7 --out /tmp/scd_cli_sa2.json");
  REQUIRE(b.exit_code == 0);
  CHECK(slurp("/tmp/scd_cli_sa1.json") == slurp("/tmp/scd_cli_sa2.json"));
  std::remove("/tmp/scd_cli_sa1.json");
  std::remove("/tmp/scd_cli_sa2.json");
}

TEST_CASE("solve replications report mean and best") {
  run_cli(std::string("generate --facilities 3 --consumers 2 --seed 22 --out ") + kInst);
  const CmdResult r =
      run_cli(std::string("solve ") + kInst + " --algo cbgh-rgih --seed 5 --replications 3");
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("replication 1:") != std::string::npos);
  CHECK(r.out.find("replication 3:") != std::string::npos);
  const double mean = parse_labeled(r.out, "mean");
  const double best = parse_labeled(r.out, "best");
  CHECK(best <= mean + 1e-9);
  CHECK(parse_labeled(r.out, "total") == doctest::Approx(best).epsilon(1e-9));
}

TEST_CASE("solve rejects unknown algorithms and bad knobs") {
  run_cli(std::string("generate --facilities 2 --consumers 2 --seed 3 --out ") + kInst);
  const CmdResult r = run_cli(std::string("solve ") + kInst + " --algo nope");
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("unknown algorithm") != std::string::npos);
  CHECK(run_cli(std::string("solve ") + kInst + " --algo sa --acceptance maybe").exit_code == 1);
  CHECK(run_cli(std::string("solve ") + kInst + " --algo vns --vns-metric fast").exit_code == 1);
  CHECK(run_cli(std::string("solve ") + kInst + " --algo sa --replications 0").exit_code == 1);
}

TEST_CASE("exact subcommand prints enumeration statistics") {
  run_cli(std::string("generate --facilities 2 --consumers 2 --seed 3 --out ") + kInst);
  const CmdResult r = run_cli(std::string("exact ") + kInst);
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("optimum") != std::string::npos);
  CHECK(r.out.find("proven_optimal yes") != std::string::npos);
  CHECK(r.out.find("selections_enumerated") != std::string::npos);
  CHECK(r.out.find("transport_solves") != std::string::npos);

  SUBCASE("a zero budget cannot prove anything and exits infeasible") {
    const CmdResult z = run_cli(std::string("solve ") + kInst + " --algo exact --budget 0");
    CHECK(z.exit_code == 2);
    CHECK(z.err.find("infeasible") != std::string::npos);
  }
}

TEST_CASE("bench and report round trip through the csv") {
  const char* csv = "/tmp/scd_cli_bench.csv";
  const CmdResult bench = run_cli(std::string("bench --out ") + csv +
                                  " --consumers 2 --facilities 2 --instances 1"
                                  " --replications 2 --master-seed 5 --quiet");
  REQUIRE(bench.exit_code == 0);
  CHECK(bench.out.find("rows") != std::string::npos);
  REQUIRE(std::filesystem::exists(csv));

  const CmdResult rep = run_cli(std::string("report ") + csv + " --out-dir /tmp/scd_cli_report");
  REQUIRE(rep.exit_code == 0);
  CHECK(rep.out.find("exact") != std::string::npos);
  CHECK(rep.out.find("sa") != std::string::npos);
  CHECK(std::filesystem::exists("/tmp/scd_cli_report/summary.csv"));
  CHECK(std::filesystem::exists("/tmp/scd_cli_report/report.txt"));
  std::filesystem::remove_all("/tmp/scd_cli_report");
  std::remove(csv);
}

TEST_CASE("report on a missing or corrupt file fails cleanly") {
  const CmdResult missing = run_cli("report /tmp/scd_cli_definitely_missing.csv");
  CHECK(missing.exit_code == 1);
  CHECK(missing.err.find("cannot open") != std::string::npos);

  std::ofstream("/tmp/scd_cli_garbage.csv") << "not a results file\n";
  const CmdResult garbage = run_cli("report /tmp/scd_cli_garbage.csv");
  CHECK(garbage.exit_code == 1);
  CHECK(garbage.err.find("error:") != std::string::npos);
  std::remove("/tmp/scd_cli_garbage.csv");
}

TEST_CASE("solve on a missing instance fails cleanly") {
  const CmdResult r = run_cli("solve /tmp/scd_cli_no_such_instance.json --algo sa");
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("error:") != std::string::npos);
}
