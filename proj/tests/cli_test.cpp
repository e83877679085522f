// End-to-end tests driving the installed binary as a subprocess. The build
// passes the binary and sample-data locations in as macros.

#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "test_helpers.hpp"
#include "toepricc/toepricc.hpp"

using namespace toepricc;
using namespace toepricc_test;

namespace {

namespace fs = std::filesystem;

struct RunResult {
  int code = -1;
  std::string out;
};

RunResult run(const std::string& args) {
  const std::string cmd = std::string(TOEPRICC_BIN) + " " + args;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe))
    out.append(buf, n);
  const int status = pclose(pipe);
  RunResult r;
  if (WIFEXITED(status)) r.code = WEXITSTATUS(status);
  r.out = std::move(out);
  return r;
}

std::string sample(const std::string& name) {
  return std::string(TOEPRICC_DATA_DIR) + "/" + name;
}

std::string fresh_dir(const std::string& tag) {
  const fs::path dir = fs::path("/tmp/toepricc_cli_test") / tag;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir.string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("analyze decides the shipped samples") {
  const RunResult ok = run("analyze " + sample("worked_scalar.json") +
                           " 2>/dev/null");
  REQUIRE(ok.code == 0);
  const json rep = json::parse(ok.out);
  REQUIRE(rep["verdict"] == "invertible");

  REQUIRE(run("analyze " + sample("identity.json") + " 2>/dev/null").code ==
          0);
  REQUIRE(run("analyze " + sample("circle_pole.json") + " 2>/dev/null")
              .code == 3);
  REQUIRE(run("analyze " + sample("quadratic_over_pole.json") +
              " 2>/dev/null")
              .code == 3);
  REQUIRE(run("analyze " + sample("vanishing_on_circle.json") +
              " 2>&1")
              .code == 2);
}

TEST_CASE("analyze report shape and text format") {
  const RunResult r = run("analyze " + sample("worked_scalar.json") +
                          " 2>/dev/null");
  const json rep = json::parse(r.out);
  std::vector<std::string> keys;
  for (auto it = rep.begin(); it != rep.end(); ++it) keys.push_back(it.key());
  REQUIRE(keys == std::vector<std::string>{"input_echo", "diagnostics",
                                           "riccati", "factorization",
                                           "inverse_check", "verdict",
                                           "timings"});

  const RunResult t = run("analyze " + sample("worked_scalar.json") +
                          " --format text 2>/dev/null");
  REQUIRE(t.code == 0);
  REQUIRE(t.out.find("verdict: invertible") != std::string::npos);
}

TEST_CASE("analyze writes its result files") {
  const std::string dir = fresh_dir("analyze_out");
  const RunResult r = run("analyze " + sample("worked_scalar.json") +
                          " --out " + dir + " >/dev/null 2>&1");
  REQUIRE(r.code == 0);
  const json rep = json::parse(slurp(dir + "/report.json"));
  REQUIRE(rep["verdict"] == "invertible");
  REQUIRE(slurp(dir + "/report.txt").find("verdict: invertible") !=
          std::string::npos);
  const CMatrix q = matrix_from_json(json::parse(slurp(dir + "/Q.json")), 1,
                                     1, "Q");
  REQUIRE(std::abs(q(0, 0) - Complex(0.5)) < 1e-9);
}

TEST_CASE("input failures land on the input-error exit code") {
  REQUIRE(run("analyze /nonexistent/nope.json 2>&1").code == 1);

  const std::string dir = fresh_dir("bad_inputs");
  const std::string malformed = dir + "/malformed.json";
  write_file(malformed, "{ not json\n");
  const RunResult r = run("analyze " + malformed + " 2>&1");
  REQUIRE(r.code == 1);
  REQUIRE(r.out.find("input error") != std::string::npos);

  // Marginally stable plus part: rho(A) = 1 is rejected up front.
  const std::string marginal = dir + "/marginal.json";
  json v = realization_to_json(worked_scalar());
  v["A"] = json::parse("[[[1.0, 0.0]]]");
  write_file(marginal, v.dump());
  REQUIRE(run("analyze " + marginal + " 2>&1").code == 1);

  // Malformed invocations fold into the same code; help stays 0.
  REQUIRE(run("analyze 2>&1").code == 1);
  REQUIRE(run("frobnicate 2>&1").code == 1);
  REQUIRE(run("--help 2>&1").code == 0);
}

TEST_CASE("sections exports sections and the similarity residual") {
  const std::string dir = fresh_dir("sections_out");
  const RunResult r = run("sections " + sample("worked_scalar.json") +
                          " --N 8 --out " + dir + " 2>/dev/null");
  REQUIRE(r.code == 0);
  REQUIRE(r.out.find("similarity_residual=") != std::string::npos);

  const json summary = json::parse(slurp(dir + "/sections_summary.json"));
  REQUIRE(summary["N"] == 8);
  REQUIRE(summary["r"].get<double>() > 1.0);
  REQUIRE(summary["similarity_residual"].get<double>() < 1e-12);

  const CMatrix sec =
      matrix_from_json(json::parse(slurp(dir + "/section.json")), 8, 8,
                       "section");
  REQUIRE(diff_norm(sec, build_section(worked_scalar(), 8).data) == 0.0);
}

TEST_CASE("sections honours an explicit radius and the CSV format") {
  const std::string dir = fresh_dir("sections_csv");
  const RunResult r = run("sections " + sample("worked_scalar.json") +
                          " --N 6 --r 1.05 --format csv --out " + dir +
                          " 2>/dev/null");
  REQUIRE(r.code == 0);
  const CMatrix sec = matrix_from_csv(slurp(dir + "/section.csv"));
  const CMatrix scaled = matrix_from_csv(slurp(dir + "/section_scaled.csv"));
  REQUIRE(diff_norm(sec, build_section(worked_scalar(), 6).data) == 0.0);
  REQUIRE(diff_norm(scaled,
                    build_section(scale(worked_scalar(), 1.05), 6).data) ==
          0.0);
}

TEST_CASE("invert exports the inverse corner and the factors") {
  const std::string dir = fresh_dir("invert_out");
  const RunResult r = run("invert " + sample("worked_scalar.json") +
                          " --N 4 --out " + dir + " 2>/dev/null");
  REQUIRE(r.code == 0);

  const Realization w = worked_scalar();
  const FactorPair f = build_factors(w, solve_fixed_point(w));
  const InverseBlocks ib = inverse_blocks(f, 4);
  const CMatrix got = matrix_from_json(
      json::parse(slurp(dir + "/inverse_blocks.json")), 4, 4,
      "inverse_blocks");
  REQUIRE(diff_norm(got, ib.data) < 1e-15);

  const CMatrix theta_stack = matrix_from_json(
      json::parse(slurp(dir + "/theta_x.json")), 4, 1, "theta_x");
  for (std::size_t j = 0; j < 4; ++j)
    REQUIRE(std::abs(theta_stack(j, 0) - ib.theta_x[j](0, 0)) < 1e-15);

  const json factors = json::parse(slurp(dir + "/factors.json"));
  REQUIRE(factors["split"] == "identity_delta");
  const Realization theta = realization_from_json(factors["theta"]);
  REQUIRE(theta.R0 == f.theta.R0);

  const std::string dir2 = fresh_dir("invert_split");
  REQUIRE(run("invert " + sample("worked_scalar.json") +
              " --N 2 --split identity_D --out " + dir2 + " 2>/dev/null")
              .code == 0);
  REQUIRE(json::parse(slurp(dir2 + "/factors.json"))["split"] ==
          "identity_D");
}

TEST_CASE("invert refuses symbols without the factorization") {
  REQUIRE(run("invert " + sample("circle_pole.json") + " 2>&1").code == 3);
  REQUIRE(run("invert " + sample("vanishing_on_circle.json") + " 2>&1")
              .code == 2);
}

TEST_CASE("JSON and CSV exports hold the same numbers") {
  const std::string dj = fresh_dir("fmt_json");
  const std::string dc = fresh_dir("fmt_csv");
  REQUIRE(run("invert " + sample("worked_scalar.json") + " --N 6 --out " +
              dj + " 2>/dev/null")
              .code == 0);
  REQUIRE(run("invert " + sample("worked_scalar.json") +
              " --N 6 --format csv --out " + dc + " 2>/dev/null")
              .code == 0);
  const CMatrix a = matrix_from_json(
      json::parse(slurp(dj + "/inverse_blocks.json")), 6, 6, "a");
  const CMatrix b = matrix_from_csv(slurp(dc + "/inverse_blocks.csv"));
  REQUIRE(a == b);  // both formats round-trip doubles exactly
}

TEST_CASE("a generated two-by-two symbol runs through every subcommand") {
  const Instance inst = make_instance(4096ull, {2, 2, 2, true});
  const std::string dir = fresh_dir("generated");
  const std::string path = dir + "/mixed.json";
  write_file(path, realization_to_json(inst.R).dump(2));

  const RunResult a = run("analyze " + path + " 2>/dev/null");
  REQUIRE(a.code == 0);
  const json rep = json::parse(a.out);
  REQUIRE(rep["verdict"] == "invertible");
  const CMatrix q = matrix_from_json(rep["riccati"]["Q"], 2, 2, "Q");
  REQUIRE(diff_norm(q, inst.Q) < 1e-8);

  REQUIRE(run("sections " + path + " --N 12 --out " + dir + " 2>/dev/null")
              .code == 0);
  REQUIRE(run("invert " + path + " --N 8 --out " + dir + " 2>/dev/null")
              .code == 0);
  const CMatrix corner = matrix_from_json(
      json::parse(slurp(dir + "/inverse_blocks.json")), 16, 16, "corner");
  const FactorPair f = build_factors(inst.R, solve_fixed_point(inst.R));
  REQUIRE(diff_norm(corner, inverse_blocks(f, 8).data) < 1e-14);
}
