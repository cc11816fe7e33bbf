// Tests for CNF construction and the internal SAT solver, including a
// brute-force differential and the DIMACS output parser.
#include <catch2/catch_amalgamated.hpp>

#include <chrono>
#include <random>

#include "resynth/satcore.hpp"
#include "test_util.hpp"

using namespace resynth;

TEST_CASE("builder normalizes clauses", "[satcore]") {
  CnfBuilder b;
  int x = b.fresh_var("x");
  int y = b.fresh_var();
  CHECK(b.named_var("x") == x);
  CHECK_FALSE(b.named_var("z").has_value());

  b.add_clause({x, y, x});
  CHECK(b.clauses().back() == std::vector<int>{x, y});

  std::size_t before = b.clauses().size();
  b.add_clause({x, -x, y});  // tautology, dropped
  CHECK(b.clauses().size() == before);

  CHECK_THROWS_AS(b.add_clause(std::vector<int>{}), std::invalid_argument);
  CHECK_THROWS_AS(b.add_clause({0}), std::invalid_argument);
  CHECK_THROWS_AS(b.add_clause({y + 1}), std::invalid_argument);

  CHECK(b.to_dimacs().rfind("p cnf 2 1", 0) == 0);
}

TEST_CASE("solver handles trivial instances", "[satcore]") {
  SECTION("empty formula is satisfiable") {
    CnfBuilder b;
    CHECK(solve(b).sat);
  }
  SECTION("unit clauses") {
    CnfBuilder b;
    int x = b.fresh_var();
    b.add_clause({x});
    SatResult r = solve(b);
    REQUIRE(r.sat);
    CHECK(r.model[static_cast<std::size_t>(x)]);
  }
  SECTION("contradicting units") {
    CnfBuilder b;
    int x = b.fresh_var();
    b.add_clause({x});
    b.add_clause({-x});
    CHECK_FALSE(solve(b).sat);
  }
  SECTION("implication chain forces values") {
    CnfBuilder b;
    int x = b.fresh_var();
    int y = b.fresh_var();
    int z = b.fresh_var();
    b.add_clause({x});
    b.add_clause({-x, y});
    b.add_clause({-y, z});
    b.add_clause({-z, -x, y});
    SatResult r = solve(b);
    REQUIRE(r.sat);
    CHECK(r.model[static_cast<std::size_t>(z)]);
  }
}

TEST_CASE("exactly-one admits exactly the singleton models", "[satcore]") {
  CnfBuilder b;
  std::vector<int> vars;
  for (int i = 0; i < 5; ++i) vars.push_back(b.fresh_var());
  b.add_exactly_one(vars);

  // Enumerate models by blocking each one found.
  int models = 0;
  while (true) {
    SatResult r = solve(b);
    if (!r.sat) break;
    ++models;
    int set_count = 0;
    std::vector<int> blocking;
    for (int v : vars) {
      if (r.model[static_cast<std::size_t>(v)]) ++set_count;
      blocking.push_back(r.model[static_cast<std::size_t>(v)] ? -v : v);
    }
    CHECK(set_count == 1);
    b.add_clause(blocking);
    REQUIRE(models <= 5);
  }
  CHECK(models == 5);
}

namespace {

// Pigeonhole principle: n+1 pigeons into n holes, unsatisfiable.
CnfBuilder pigeonhole(int holes) {
  CnfBuilder b;
  std::vector<std::vector<int>> at(static_cast<std::size_t>(holes + 1));
  for (int p = 0; p <= holes; ++p)
    for (int h = 0; h < holes; ++h) at[static_cast<std::size_t>(p)].push_back(b.fresh_var());
  for (int p = 0; p <= holes; ++p) b.add_clause(at[static_cast<std::size_t>(p)]);
  for (int h = 0; h < holes; ++h)
    for (int p = 0; p <= holes; ++p)
      for (int q = p + 1; q <= holes; ++q)
        b.add_clause({-at[static_cast<std::size_t>(p)][static_cast<std::size_t>(h)],
                      -at[static_cast<std::size_t>(q)][static_cast<std::size_t>(h)]});
  return b;
}

}  // namespace

TEST_CASE("pigeonhole instances are refuted", "[satcore]") {
  for (int holes = 2; holes <= 5; ++holes) {
    CAPTURE(holes);
    CHECK_FALSE(solve(pigeonhole(holes)).sat);
  }
}

TEST_CASE("verdicts agree with brute force on random instances", "[satcore]") {
  std::mt19937 rng(2024);
  std::uniform_int_distribution<int> var_count(1, 10);
  for (int round = 0; round < 300; ++round) {
    CnfBuilder b;
    int n = var_count(rng);
    for (int i = 0; i < n; ++i) b.fresh_var();
    std::uniform_int_distribution<int> clause_count(1, 4 * n);
    std::uniform_int_distribution<int> width(1, 3);
    std::uniform_int_distribution<int> var_pick(1, n);
    std::uniform_int_distribution<int> coin(0, 1);
    int m = clause_count(rng);
    for (int c = 0; c < m; ++c) {
      std::vector<int> clause;
      int w = width(rng);
      for (int k = 0; k < w; ++k) {
        int v = var_pick(rng);
        clause.push_back(coin(rng) ? v : -v);
      }
      bool tautology = false;
      for (int a : clause)
        for (int bb : clause)
          if (a == -bb) tautology = true;
      if (!tautology) b.add_clause(clause);
    }
    CAPTURE(round, b.to_dimacs());
    bool expected = testutil::brute_force_sat(b);
    // solve() validates any claimed model internally, so agreeing verdicts
    // certify both directions.
    CHECK(solve(b).sat == expected);
  }
}

TEST_CASE("solving is deterministic", "[satcore]") {
  std::mt19937 rng(77);
  CnfBuilder b;
  for (int i = 0; i < 30; ++i) b.fresh_var();
  std::uniform_int_distribution<int> var_pick(1, 30);
  std::uniform_int_distribution<int> coin(0, 1);
  for (int c = 0; c < 120; ++c) {
    std::vector<int> clause;
    for (int k = 0; k < 3; ++k) {
      int v = var_pick(rng);
      clause.push_back(coin(rng) ? v : -v);
    }
    bool tautology = false;
    for (int a : clause)
      for (int bb : clause)
        if (a == -bb) tautology = true;
    if (!tautology) b.add_clause(clause);
  }
  SatResult first = solve(b);
  SatResult second = solve(b);
  CHECK(first.sat == second.sat);
  CHECK(first.model == second.model);
}

TEST_CASE("expired deadlines raise a resource error", "[satcore]") {
  CnfBuilder b;
  int x = b.fresh_var();
  b.add_clause({x});
  SolveOptions options;
  options.deadline = std::chrono::steady_clock::now() - std::chrono::seconds(1);
  CHECK_THROWS_AS(solve(b, options), ResourceError);
}

TEST_CASE("external solver output parsing", "[satcore]") {
  SatResult r = detail::parse_solver_output("c comment\ns SATISFIABLE\nv 1 -2 0\n", 2);
  REQUIRE(r.sat);
  CHECK(r.model[1]);
  CHECK_FALSE(r.model[2]);

  r = detail::parse_solver_output("s UNSATISFIABLE\n", 2);
  CHECK_FALSE(r.sat);

  // Values may be split over several v lines.
  r = detail::parse_solver_output("s SATISFIABLE\nv -1 2\nv 3 0\n", 3);
  REQUIRE(r.sat);
  CHECK_FALSE(r.model[1]);
  CHECK(r.model[2]);
  CHECK(r.model[3]);

  CHECK_THROWS_AS(detail::parse_solver_output("c nothing\n", 2), SolverError);
  CHECK_THROWS_AS(detail::parse_solver_output("s MAYBE\n", 2), SolverError);
}

TEST_CASE("model validation rejects non-models", "[satcore]") {
  CnfBuilder b;
  int x = b.fresh_var();
  int y = b.fresh_var();
  b.add_clause({x, y});
  SatResult bogus;
  bogus.sat = true;
  bogus.model = {false, false, false};
  CHECK_THROWS_AS(validate_model(b, bogus), std::logic_error);
  SatResult fine;
  fine.sat = true;
  fine.model = {false, true, false};
  CHECK_NOTHROW(validate_model(b, fine));
}
