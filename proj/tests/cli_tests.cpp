// End-to-end checks of the command-line surface: subcommands, exit codes,
// file formats. argv[1] = tlqg binary, argv[2] = scenario directory.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace {

int failures = 0;
std::string g_binary;
std::string g_scenarios;

void check(bool ok, const std::string& what) {
  std::cout << (ok ? "ok" : "FAIL") << " - " << what << std::endl;
  if (!ok) {
    ++failures;
  }
}

int run(const std::string& args) {
  const std::string cmd = g_binary + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool file_exists(const std::string& path) {
  std::ifstream in(path);
  return in.good();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::cerr << "usage: cli_tests <tlqg-binary> <scenario-dir>\n";
    return 1;
  }
  g_binary = argv[1];
  g_scenarios = argv[2];
  const std::string rb = g_scenarios + "/range_bearing.json";

  // plan: writes the file and reports success.
  check(run("plan --scenario " + rb + " --out cli_plan.csv --svg cli_plan.svg") ==
            0,
        "plan on the range-bearing scenario exits 0");
  check(file_exists("cli_plan.csv"), "plan file written");
  {
    const std::string text = slurp("cli_plan.csv");
    check(text.rfind("# tlqg plan v1", 0) == 0, "plan file has the preamble");
    check(text.find("opt_state") != std::string::npos,
          "plan file contains the optimized trajectory");
  }
  check(file_exists("cli_plan.svg"), "svg plot written");

  // plan: malformed scenario exits 2 and writes nothing.
  write_file("cli_bad.json", "{\"motion\": 7}");
  std::remove("cli_bad_plan.csv");
  check(run("plan --scenario cli_bad.json --out cli_bad_plan.csv") == 2,
        "malformed scenario exits 2");
  check(!file_exists("cli_bad_plan.csv"), "no plan file on input error");
  check(run("plan --scenario does_not_exist.json --out x.csv") == 2,
        "missing scenario file exits 2");

  // execute: deterministic traces, plan reuse round trip.
  check(run("execute --scenario " + rb + " --out cli_trace_a.csv --seed 7") == 0,
        "execute exits 0 when the goal is reached");
  check(run("execute --scenario " + rb + " --out cli_trace_b.csv --seed 7") == 0,
        "second execute run exits 0");
  check(!slurp("cli_trace_a.csv").empty() &&
            slurp("cli_trace_a.csv") == slurp("cli_trace_b.csv"),
        "fixed seed gives byte-identical trace files");
  check(run("execute --scenario " + rb +
            " --plan cli_plan.csv --out cli_trace_c.csv --seed 7") == 0,
        "execute reuses a plan file");

  // execute: batch mode writes per-seed traces plus a summary.
  check(run("execute --scenario " + rb + " --out cli_batch.csv --seeds 3") == 0,
        "batch execute exits 0");
  check(file_exists("cli_batch_summary.csv"), "batch summary written");
  {
    const std::string summary = slurp("cli_batch_summary.csv");
    check(summary.find("reach_rate=") != std::string::npos,
          "summary contains the reach rate");
  }
  check(file_exists("cli_batch_seed1.csv") &&
            file_exists("cli_batch_seed2.csv") &&
            file_exists("cli_batch_seed3.csv"),
        "per-seed trace files written");

  // validate: small sizes for speed; the gain-error injection must fail.
  check(run("validate --systems 4 --realizations 5 --theorem1-samples 3000") ==
            0,
        "validate exits 0 on the identities");
  check(run("validate --systems 4 --realizations 5 --theorem1-samples 3000 "
            "--inject-gain-error") == 1,
        "validate with an injected gain error exits 1");

  // mvee: square vertices, inflation monotonicity, input errors.
  write_file("cli_square.csv", "0,0\n1,0\n1,1\n0,1\n");
  check(run("mvee --vertices cli_square.csv --out cli_mvee.csv") == 0,
        "mvee exits 0");
  {
    std::ifstream in("cli_mvee.csv");
    std::string line;
    std::getline(in, line);  // preamble
    std::getline(in, line);  // polygons count
    std::getline(in, line);  // header
    std::getline(in, line);  // first row
    double c0 = 0.0, c1 = 0.0;
    std::sscanf(line.c_str(), "0,%lf,%lf", &c0, &c1);
    check(std::abs(c0 - 0.5) <= 1e-3 && std::abs(c1 - 0.5) <= 1e-3,
          "unit-square ellipsoid centered at (0.5, 0.5)");
  }
  check(run("mvee --vertices cli_square.csv --radius 0.1 --out cli_mvee2.csv") ==
            0,
        "mvee with inflation exits 0");
  write_file("cli_empty.csv", "");
  check(run("mvee --vertices cli_empty.csv --out x.csv") == 2,
        "empty vertex file exits 2");
  write_file("cli_two.csv", "0,0\n1,0\n");
  check(run("mvee --vertices cli_two.csv --out x.csv") == 2,
        "two-vertex polygon exits 2");

  for (const char* f :
       {"cli_plan.csv", "cli_plan.svg", "cli_bad.json", "cli_trace_a.csv",
        "cli_trace_b.csv", "cli_trace_c.csv", "cli_batch_summary.csv",
        "cli_batch_seed1.csv", "cli_batch_seed2.csv", "cli_batch_seed3.csv",
        "cli_square.csv", "cli_mvee.csv", "cli_mvee2.csv", "cli_empty.csv",
        "cli_two.csv"}) {
    std::remove(f);
  }

  std::cout << (failures == 0 ? "CLI TESTS PASSED"
                              : std::to_string(failures) + " CLI TESTS FAILED")
            << std::endl;
  return failures;
}
