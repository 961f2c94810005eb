#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "fixtures.hpp"
#include "itdopf/io/json_text.hpp"
#include "itdopf/io/result.hpp"

#ifndef ITDOPF_CLI_PATH
#error "ITDOPF_CLI_PATH must be defined by the build"
#endif

namespace fs = std::filesystem;
using namespace itdopf;

namespace {

struct RunResult {
  int exit_code;
  std::string stdout_text;
  std::string stderr_text;
};

RunResult run_cli(const std::string& args) {
  static int counter = 0;
  const fs::path dir = fs::temp_directory_path() / "itdopf_cli_test";
  fs::create_directories(dir);
  const std::string out = (dir / ("stdout." + std::to_string(counter))).string();
  const std::string err = (dir / ("stderr." + std::to_string(counter))).string();
  ++counter;
  const std::string cmd =
      std::string(ITDOPF_CLI_PATH) + " " + args + " > " + out + " 2> " + err;
  const int raw = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.stdout_text = io::read_file(out);
  r.stderr_text = io::read_file(err);
  return r;
}

std::string write_temp(const std::string& name, const std::string& text) {
  const fs::path dir = fs::temp_directory_path() / "itdopf_cli_test";
  fs::create_directories(dir);
  const std::string path = (dir / name).string();
  std::ofstream(path) << text;
  return path;
}

}  // namespace

TEST_CASE("solve: valid case exits 0 and writes the result") {
  const std::string out = write_temp("result.json", "");
  fs::remove(out);
  const RunResult r = run_cli("solve --pm " + fixtures::data("transmission/case5_withload.m") +
                              " --boundary " + fixtures::data("boundary/case5_feeder4.json") +
                              " --out " + out);
  CHECK(r.exit_code == 0);
  REQUIRE(fs::exists(out));
  const io::ResultDocument doc = io::parse_result_json(io::read_file(out));
  CHECK(doc.status == "optimal");
  CHECK(doc.boundaries.size() == 1);
  // no temp droppings next to the output
  for (const auto& e : fs::directory_iterator(fs::path(out).parent_path()))
    CHECK(e.path().string().find(".tmp.") == std::string::npos);
}

TEST_CASE("solve: boundary naming a missing bus exits 1 and names it") {
  const std::string bad = write_temp("bad_boundary.json",
                                     R"([{"transmission_boundary":"99",
  "distribution_boundary":"sourcebus",
  "distribution_file":")" + fixtures::data("distribution/feeder4.json") + R"("}])");
  const RunResult r = run_cli("solve --pm " + fixtures::data("transmission/case5_withload.m") +
                              " --boundary " + bad);
  CHECK(r.exit_code == 1);
  CHECK(r.stderr_text.find("99") != std::string::npos);
}

TEST_CASE("solve: infeasible setpoint power flow exits 2") {
  // all non-reference generation pinned to zero: the 200 MW reference
  // generator cannot cover the 1020 MW system load
  const std::string sp = write_temp("setpoints.json", R"({
    "transmission": [
      {"gen": 0, "p_mw": 0.0},
      {"gen": 1, "p_mw": 0.0},
      {"gen": 2, "p_mw": 0.0},
      {"gen": 4, "p_mw": 0.0}
    ]
  })");
  const RunResult r =
      run_cli("solve --problem pf --setpoints " + sp + " --pm " +
              fixtures::data("transmission/case5_withload.m") + " --boundary " +
              fixtures::data("boundary/case5_feeder4.json"));
  CHECK(r.exit_code == 2);
}

TEST_CASE("solve: independent mode writes the coordination summary") {
  const std::string out = write_temp("independent.json", "");
  const RunResult r = run_cli("solve --mode independent --reserve 0.1 --pm " +
                              fixtures::data("transmission/case5_withload.m") +
                              " --boundary " + fixtures::data("boundary/case5_feeder4.json") +
                              " --out " + out);
  CHECK(r.exit_code == 0);
  const std::string text = io::read_file(out);
  CHECK(text.find("\"mode\": \"independent\"") != std::string::npos);
  CHECK(text.find("total_cost_usd_per_hr") != std::string::npos);
}

TEST_CASE("compare: full four-formulation table") {
  const std::string base = write_temp("cmp", "");
  fs::remove(base);
  const RunResult r = run_cli("compare --pm " + fixtures::data("transmission/case5_withload.m") +
                              " --boundary " + fixtures::data("boundary/case5_feeder4.json") +
                              " --out " + base);
  CHECK(r.exit_code == 0);
  const std::string csv = io::read_file(base + ".csv");
  // header + 4 formulations x 3 rows
  int lines = 0;
  for (char c : csv)
    if (c == '\n') ++lines;
  CHECK(lines == 13);
  CHECK(fs::exists(base + ".json"));
}

TEST_CASE("compare: single formulation gives one row group") {
  const RunResult r = run_cli("compare --formulations acp-acpu --pm " +
                              fixtures::data("transmission/case5_withload.m") +
                              " --boundary " + fixtures::data("boundary/case5_feeder4.json"));
  CHECK(r.exit_code == 0);
  int lines = 0;
  for (char c : r.stdout_text)
    if (c == '\n') ++lines;
  CHECK(lines == 4);  // header + independent / itd / difference
}

TEST_CASE("validate: clean case exits 0, corrupted case exits 1") {
  const RunResult ok = run_cli("validate --pm " + fixtures::data("transmission/case5.m"));
  CHECK(ok.exit_code == 0);
  CHECK(ok.stdout_text.find("valid") != std::string::npos);

  std::string text = io::read_file(fixtures::data("transmission/case5.m"));
  // swap Vmax/Vmin columns on bus 1: v_min > v_max
  const size_t pos = text.find("1.10000\t0.90000");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, 15, "0.90000\t1.10000");
  const std::string bad = write_temp("bad_case5.m", text);
  const RunResult fail = run_cli("validate --pm " + bad);
  CHECK(fail.exit_code == 1);
  CHECK(fail.stdout_text.find("v_min") != std::string::npos);
}

TEST_CASE("sweep:three rows and exit 0") {
  const RunResult r = run_cli("sweep --pm " + fixtures::data("transmission/case5_withload.m") +
                              " --feeder " + fixtures::data("distribution/feeder4.json") +
                              " --attach 2 3 6 --k-from 1 --k-to 3");
  CHECK(r.exit_code == 0);
  int lines = 0;
  for (char c : r.stdout_text)
    if (c == '\n') ++lines;
  CHECK(lines == 4);  // header + k = 1..3
}

TEST_CASE("check-derivs on a failing-free model exits 0") {
  const RunResult r = run_cli("check-derivs --points 3 --pm " +
                              fixtures::data("transmission/case5_withload.m") +
                              " --boundary " + fixtures::data("boundary/case5_feeder4.json"));
  CHECK(r.exit_code == 0);
  CHECK(r.stdout_text.find("passed") != std::string::npos);
}

TEST_CASE("solve: unreadable input exits 1") {
  const RunResult r = run_cli("solve --pm /nonexistent/case.m");
  CHECK(r.exit_code == 1);
}
