// Tests for the model checker: fixture verdicts, witness validity and a
// randomized sweep against trace sampling.
#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "resynth/fixtures.hpp"
#include "resynth/model_check.hpp"
#include "test_util.hpp"

using namespace resynth;

TEST_CASE("the round robin satisfies mutual exclusion and fairness", "[model_check]") {
  LtlFactory f(fixtures::arbiter_alphabet());
  TransitionSystem ts = fixtures::arb0();

  CHECK(model_check(f, ts, parse_ltl(fixtures::mutex_property(), f)).verdict ==
        Verdict::Holds);
  CHECK(model_check(f, ts, parse_ltl(fixtures::fairness_property(0), f)).verdict ==
        Verdict::Holds);
  CHECK(model_check(f, ts, parse_ltl(fixtures::arbiter_basic_spec(), f)).verdict ==
        Verdict::Holds);
}

TEST_CASE("the round robin grants spuriously", "[model_check]") {
  LtlFactory f(fixtures::arbiter_alphabet());
  TransitionSystem ts = fixtures::arb0();
  FormulaId full = parse_ltl(fixtures::arbiter_full_spec(), f);

  ModelCheckResult result = model_check(f, ts, full);
  REQUIRE(result.verdict == Verdict::Fails);
  REQUIRE(result.witness.has_value());
  CHECK(trace_member(ts, *result.witness));
  CHECK_FALSE(eval_lasso(f, *result.witness, full));
}

TEST_CASE("the repaired arbiter satisfies the full specification", "[model_check]") {
  LtlFactory f(fixtures::arbiter_alphabet());
  TransitionSystem ts = fixtures::arb5();
  CHECK(model_check(f, ts, parse_ltl(fixtures::arbiter_full_spec(), f)).verdict ==
        Verdict::Holds);
}

TEST_CASE("the small repair examples fail their targets", "[model_check]") {
  LtlFactory f(fixtures::rg_alphabet());

  ModelCheckResult r1 =
      model_check(f, fixtures::phi1_system(), parse_ltl(fixtures::phi1_property(), f));
  CHECK(r1.verdict == Verdict::Fails);

  ModelCheckResult r2 =
      model_check(f, fixtures::phi2_system(), parse_ltl(fixtures::phi2_property(), f));
  CHECK(r2.verdict == Verdict::Fails);
}

TEST_CASE("one-state systems against simple properties", "[model_check]") {
  LtlFactory f(fixtures::rg_alphabet());
  TransitionSystem quiet;
  quiet.alphabet = f.alphabet();
  quiet.out = {0};
  quiet.tau = {{0, 0}};

  CHECK(model_check(f, quiet, parse_ltl("G !g", f)).verdict == Verdict::Holds);
  CHECK(model_check(f, quiet, parse_ltl("F g", f)).verdict == Verdict::Fails);
  CHECK(model_check(f, quiet, parse_ltl("G (r -> X !g)", f)).verdict == Verdict::Holds);
  CHECK(model_check(f, quiet, parse_ltl("F r", f)).verdict == Verdict::Fails);
  CHECK(model_check(f, quiet, parse_ltl("G F !r", f)).verdict == Verdict::Fails);
}

TEST_CASE("verdicts agree with sampled traces on random systems", "[model_check]") {
  std::mt19937 rng(909);
  AtomicAlphabet alphabet({"r"}, {"g"});
  LtlFactory f(alphabet);
  int failures = 0;
  for (int round = 0; round < 80; ++round) {
    TransitionSystem ts = testutil::random_system(alphabet, rng, 3);
    FormulaId phi = testutil::random_formula(f, rng, 3);
    CAPTURE(round, pretty_print(f, phi));
    ModelCheckResult result = model_check(f, ts, phi);
    if (result.verdict == Verdict::Fails) {
      ++failures;
      // Witness validity is also asserted inside model_check.
      REQUIRE(result.witness.has_value());
      CHECK(trace_member(ts, *result.witness));
      CHECK_FALSE(eval_lasso(f, *result.witness, phi));
    } else {
      // No violating trace should be found by sampling either.
      for (int i = 0; i < 40; ++i) {
        LassoWord w = testutil::random_trace(ts, rng, 6);
        REQUIRE(eval_lasso(f, w, phi));
      }
    }
  }
  // The sweep should exercise both verdicts.
  CHECK(failures > 10);
  CHECK(failures < 80);
}
