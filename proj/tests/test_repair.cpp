#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <vector>

#include "resynth/fixtures.hpp"
#include "resynth/model_check.hpp"
#include "resynth/repair.hpp"
#include "test_util.hpp"

using namespace resynth;
using namespace resynth::fixtures;

namespace {

void force_system(CnfBuilder& builder, const SynthesisVarMap& synth,
                  const TransitionSystem& target) {
  const AtomicAlphabet& alphabet = target.alphabet;
  int n = static_cast<int>(target.size());
  for (int t = 0; t < n; ++t) {
    for (std::uint32_t i = 0; i < alphabet.input_letter_count(); ++i)
      builder.add_clause({synth.tau_var(t, i, target.tau[static_cast<std::size_t>(t)][i])});
    for (int o = 0; o < alphabet.num_outputs(); ++o) {
      int var = synth.out_var(o, t);
      bool set = (target.out[static_cast<std::size_t>(t)] >> o) & 1u;
      builder.add_clause({set ? var : -var});
    }
  }
}

bool cost_feasible(LtlFactory& f, const BuchiAutomaton& ucw, const TransitionSystem& base,
                   const TransitionSystem& target, int k) {
  auto [builder, synth] = encode_bounded_synthesis(ucw, static_cast<int>(base.size()),
                                                   f.alphabet());
  encode_cost(base, k, synth, builder);
  force_system(builder, synth, target);
  return solve(builder).sat;
}

}  // namespace

TEST_CASE("a satisfying system repairs with zero operations", "[repair]") {
  LtlFactory f(arbiter_alphabet());

  FormulaId full = parse_ltl(arbiter_full_spec(), f);
  auto xi = repair(f, arb5(), full, 0);
  REQUIRE(xi.has_value());
  CHECK(xi->empty());

  FormulaId basic = parse_ltl(arbiter_basic_spec(), f);
  xi = repair(f, arb0(), basic, 0);
  REQUIRE(xi.has_value());
  CHECK(xi->empty());
}

TEST_CASE("a failing system has no zero-operation repair", "[repair]") {
  LtlFactory f(arbiter_alphabet());
  FormulaId full = parse_ltl(arbiter_full_spec(), f);
  CHECK_FALSE(repair(f, arb0_budget4(), full, 0).has_value());
}

TEST_CASE("five operations repair the four-state round robin", "[repair]") {
  LtlFactory f(arbiter_alphabet());
  FormulaId full = parse_ltl(arbiter_full_spec(), f);
  TransitionSystem budgeted = arb0_budget4();

  auto xi = repair(f, budgeted, full, 5);
  REQUIRE(xi.has_value());
  CHECK(xi->size() == 5);
  CHECK(xi->label_change_count() == 1);
  CHECK(xi->redirect_count() == 4);
  CHECK(is_consistent(*xi));
  CHECK(model_check(f, apply_all(budgeted, *xi), full).verdict == Verdict::Holds);

  CHECK_FALSE(repair(f, budgeted, full, 4).has_value());
}

TEST_CASE("the minimal repair of the four-state round robin has five operations",
          "[repair]") {
  LtlFactory f(arbiter_alphabet());
  FormulaId full = parse_ltl(arbiter_full_spec(), f);
  auto xi = minimal_repair(f, arb0_budget4(), full);
  REQUIRE(xi.has_value());
  CHECK(xi->size() == 5);
  CHECK(xi->label_change_count() == 1);
  CHECK(xi->redirect_count() == 4);
}

TEST_CASE("the five-operation repair recovers the reference arbiter", "[repair]") {
  LtlFactory f(arbiter_alphabet());
  FormulaId full = parse_ltl(arbiter_full_spec(), f);
  auto xi = minimal_repair(f, arb0_budget4(), full);
  REQUIRE(xi.has_value());
  CHECK(apply_all(arb0_budget4(), *xi) == arb5());
}

TEST_CASE("self-loop padding makes the arbiter repair more expensive", "[repair]") {
  LtlFactory f(arbiter_alphabet());
  FormulaId full = parse_ltl(arbiter_full_spec(), f);
  auto xi = minimal_repair(f, extend_states(arb0(), 4), full);
  REQUIRE(xi.has_value());
  CHECK(xi->size() == 10);
  CHECK(xi->label_change_count() == 3);
  CHECK(xi->redirect_count() == 7);
}

TEST_CASE("the deferred-grant chain needs exactly two redirects", "[repair]") {
  LtlFactory f(rg_alphabet());
  FormulaId phi = parse_ltl(phi2_property(), f);
  TransitionSystem ts = phi2_system();

  CHECK_FALSE(repair(f, ts, phi, 0).has_value());
  CHECK_FALSE(repair(f, ts, phi, 1).has_value());

  auto xi = minimal_repair(f, ts, phi);
  REQUIRE(xi.has_value());
  REQUIRE(xi->size() == 2);
  CHECK(xi->contains(make_redirect(0, 1, {0})));
  CHECK(xi->contains(make_redirect(1, 2, {0})));
}

TEST_CASE("unrealizable properties admit no repair", "[repair]") {
  LtlFactory f(rg_alphabet());
  FormulaId phi = parse_ltl("g & !g", f);
  CHECK_FALSE(repair(f, phi1_system(), phi, 3).has_value());
  CHECK_FALSE(minimal_repair(f, phi1_system(), phi).has_value());
}

TEST_CASE("the cost encoding counts exactly the operation distance", "[repair]") {
  LtlFactory f(rg_alphabet());
  FormulaId tautology = parse_ltl("true", f);
  BuchiAutomaton ucw = ucw_for(f, tautology);
  std::mt19937 rng(31337);

  int checked = 0;
  for (std::uint32_t base_index = 0; base_index < 64; base_index += 7) {
    TransitionSystem base = testutil::random_system(f.alphabet(), rng, 2);
    for (int round = 0; round < 6; ++round) {
      TransitionSystem target = testutil::random_system(f.alphabet(), rng, 2);
      int distance = static_cast<int>(diff(base, target).size());
      CAPTURE(to_json(base).dump(), to_json(target).dump(), distance);
      CHECK(cost_feasible(f, ucw, base, target, distance));
      CHECK(cost_feasible(f, ucw, base, target, distance + 1));
      if (distance > 0) CHECK_FALSE(cost_feasible(f, ucw, base, target, distance - 1));
      ++checked;
    }
  }
  CHECK(checked == 60);
}

TEST_CASE("repairs are monotone in the budget", "[repair]") {
  LtlFactory f(rg_alphabet());
  std::mt19937 rng(2024);
  int found = 0;
  for (int round = 0; round < 12; ++round) {
    TransitionSystem ts = testutil::random_system(f.alphabet(), rng, 2);
    FormulaId phi = testutil::random_formula(f, rng, 2);
    CAPTURE(pretty_print(f, phi));
    for (int k = 0; k <= 2; ++k) {
      auto at_k = repair(f, ts, phi, k);
      if (!at_k) continue;
      ++found;
      auto at_next = repair(f, ts, phi, k + 1);
      CHECK(at_next.has_value());
      CHECK(at_k->size() <= static_cast<std::size_t>(k));
    }
  }
  CHECK(found > 5);
}

TEST_CASE("the cost encoding rejects a mismatched bound", "[repair]") {
  LtlFactory f(rg_alphabet());
  BuchiAutomaton ucw = ucw_for(f, parse_ltl("true", f));
  auto [builder, synth] = encode_bounded_synthesis(ucw, 3, f.alphabet());
  REQUIRE_THROWS_AS(encode_cost(phi1_system(), 1, synth, builder), std::invalid_argument);
}
