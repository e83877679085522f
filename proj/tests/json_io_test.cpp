#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <string>

#include "test_helpers.hpp"
#include "toepricc/json_io.hpp"

using namespace toepricc;
using namespace toepricc_test;

TEST_CASE("matrix round trip through JSON") {
  std::mt19937_64 rng(5ull);
  const CMatrix m = random_matrix(rng, 3, 2, 1.0);
  const CMatrix back = matrix_from_json(matrix_to_json(m), 3, 2, "m");
  REQUIRE(m == back);

  const CMatrix empty(0, 4);
  REQUIRE(matrix_to_json(empty) == json::array());
  const CMatrix eback = matrix_from_json(json::array(), 0, 4, "e");
  REQUIRE(eback.rows() == 0);
  REQUIRE(eback.cols() == 4);
}

TEST_CASE("matrix schema violations are reported by field") {
  const json bad_shape = json::parse("[[[1, 0]], [[2, 0]]]");
  REQUIRE_THROWS_MATCHES(
      matrix_from_json(bad_shape, 2, 2, "A"), InputError,
      Catch::Matchers::MessageMatches(
          Catch::Matchers::ContainsSubstring("\"A\"")));
  const json bad_entry = json::parse("[[[1, 0], 3]]");
  REQUIRE_THROWS_MATCHES(
      matrix_from_json(bad_entry, 1, 2, "B"), InputError,
      Catch::Matchers::MessageMatches(
          Catch::Matchers::ContainsSubstring("(0, 1)")));
  const json not_array = json::object();
  REQUIRE_THROWS_AS(matrix_from_json(not_array, 1, 1, "C"), InputError);
  const json nonempty_for_empty = json::parse("[[[1, 0]]]");
  REQUIRE_THROWS_AS(matrix_from_json(nonempty_for_empty, 0, 2, "D"),
                    InputError);
}

TEST_CASE("realization round trip through JSON") {
  for (std::uint64_t seed : {1ull, 2ull}) {
    const Instance inst = make_instance(seed, {2, 2, 2, seed == 2});
    const Realization back = realization_from_json(
        realization_to_json(inst.R));
    REQUIRE(back.R0 == inst.R.R0);
    REQUIRE(back.C == inst.R.C);
    REQUIRE(back.A == inst.R.A);
    REQUIRE(back.B == inst.R.B);
    REQUIRE(back.gamma == inst.R.gamma);
    REQUIRE(back.alpha == inst.R.alpha);
    REQUIRE(back.beta == inst.R.beta);
  }
  // Degenerate state dimensions survive the trip.
  const Realization c = Realization::constant(CMatrix::identity(2));
  const Realization cb = realization_from_json(realization_to_json(c));
  REQUIRE(cb.s == 0);
  REQUIRE(cb.t == 0);
  REQUIRE(cb.R0 == c.R0);
}

TEST_CASE("realization schema violations") {
  json v = realization_to_json(worked_scalar());
  SECTION("missing dimension") {
    v.erase("t");
    REQUIRE_THROWS_AS(realization_from_json(v), InputError);
  }
  SECTION("negative dimension") {
    v["s"] = -1;
    REQUIRE_THROWS_AS(realization_from_json(v), InputError);
  }
  SECTION("zero symbol dimension") {
    v["m"] = 0;
    REQUIRE_THROWS_AS(realization_from_json(v), InputError);
  }
  SECTION("missing matrix") {
    v.erase("alpha");
    REQUIRE_THROWS_AS(realization_from_json(v), InputError);
  }
  SECTION("shape mismatch") {
    v["B"] = json::parse("[[[1, 0]]]");  // 1 x 1, needs s x m
    v["s"] = 2;
    REQUIRE_THROWS_AS(realization_from_json(v), InputError);
  }
  SECTION("not an object") {
    REQUIRE_THROWS_AS(realization_from_json(json::array()), InputError);
  }
}

TEST_CASE("loading a realization from disk") {
  const std::string path = "/tmp/toepricc_json_io_roundtrip.json";
  const Realization w = worked_scalar();
  write_file(path, realization_to_json(w).dump(2));
  const Realization back = load_realization(path);
  REQUIRE(back.R0 == w.R0);
  REQUIRE(back.alpha == w.alpha);
  std::remove(path.c_str());

  REQUIRE_THROWS_AS(load_realization("/nonexistent/nowhere.json"),
                    InputError);
}

TEST_CASE("parse errors carry the line and column") {
  const std::string path = "/tmp/toepricc_json_io_malformed.json";
  write_file(path, "{\n  \"m\": 1,\n  oops\n}\n");
  REQUIRE_THROWS_MATCHES(
      load_realization(path), InputError,
      Catch::Matchers::MessageMatches(
          Catch::Matchers::ContainsSubstring("line 3")));
  std::remove(path.c_str());
}

TEST_CASE("factor pair serialization carries both factors") {
  const Realization w = worked_scalar();
  const FactorPair f = build_factors(w, solve_fixed_point(w));
  const json v = factor_pair_to_json(f);
  REQUIRE(v["split"] == "identity_delta");
  REQUIRE(v.contains("theta"));
  REQUIRE(v.contains("psi_inv"));
  const Realization theta = realization_from_json(v["theta"]);
  REQUIRE(theta.R0 == f.theta.R0);
  REQUIRE(theta.A == f.theta.A);
}

TEST_CASE("CSV entries round trip exactly") {
  const Complex samples[] = {Complex(0.0, 0.0), Complex(1.0, -1.0),
                             Complex(1.0 / 3.0, -2.0 / 7.0),
                             Complex(-1e-17, 1e300),
                             Complex(0.1234567890123456789, -0.5)};
  for (Complex z : samples) {
    const std::string cell = complex_to_csv(z);
    double re = 0.0, im = 0.0;
    REQUIRE(std::sscanf(cell.c_str(), "%lg%lgj", &re, &im) == 2);
    REQUIRE(re == z.real());
    REQUIRE(im == z.imag());
  }
}

TEST_CASE("matrix round trip through CSV") {
  std::mt19937_64 rng(77ull);
  const CMatrix m = random_matrix(rng, 4, 3, 2.5);
  const CMatrix back = matrix_from_csv(matrix_to_csv(m));
  REQUIRE(m == back);

  REQUIRE_THROWS_AS(matrix_from_csv("1+2j,zzz\n"), InputError);
  REQUIRE_THROWS_AS(matrix_from_csv("1+2j,3+4j\n5+6j\n"), InputError);
}
