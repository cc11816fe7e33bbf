#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>
#include <vector>

#include "resynth/fixtures.hpp"
#include "resynth/model_check.hpp"
#include "resynth/synthesis.hpp"
#include "test_util.hpp"

using namespace resynth;
using namespace resynth::fixtures;

namespace {

// Every deterministic total n-state system over the alphabet.
std::vector<TransitionSystem> all_small_systems(const AtomicAlphabet& alphabet, int n) {
  std::uint32_t inputs = alphabet.input_letter_count();
  std::uint32_t masks = alphabet.output_mask_count();
  std::size_t cells = static_cast<std::size_t>(n) * inputs;
  std::vector<TransitionSystem> result;
  std::vector<std::uint32_t> out(static_cast<std::size_t>(n), 0);
  for (;;) {
    std::vector<int> tau_choice(cells, 0);
    for (;;) {
      TransitionSystem ts;
      ts.alphabet = alphabet;
      ts.out = out;
      ts.tau.assign(static_cast<std::size_t>(n), std::vector<int>(inputs, 0));
      for (std::size_t cell = 0; cell < cells; ++cell)
        ts.tau[cell / inputs][cell % inputs] = tau_choice[cell];
      result.push_back(std::move(ts));
      std::size_t cell = 0;
      while (cell < cells && tau_choice[cell] == n - 1) tau_choice[cell++] = 0;
      if (cell == cells) break;
      ++tau_choice[cell];
    }
    std::size_t s = 0;
    while (s < out.size() && out[s] == masks - 1) out[s++] = 0;
    if (s == out.size()) break;
    ++out[s];
  }
  return result;
}

bool some_system_satisfies(LtlFactory& f, FormulaId phi,
                           const std::vector<TransitionSystem>& systems) {
  for (const auto& ts : systems)
    if (model_check(f, ts, phi).verdict == Verdict::Holds) return true;
  return false;
}

}  // namespace

TEST_CASE("an invariant output needs one state", "[synthesis]") {
  LtlFactory f(rg_alphabet());
  FormulaId phi = parse_ltl("G g", f);
  auto ts = synthesize(f, phi, 1);
  REQUIRE(ts.has_value());
  CHECK(ts->size() == 1);
  CHECK(ts->out[0] == 1u);
  CHECK(ts->tau[0] == std::vector<int>{0, 0});
  CHECK(model_check(f, *ts, phi).verdict == Verdict::Holds);
}

TEST_CASE("mutex plus fairness admits a two-state arbiter", "[synthesis]") {
  LtlFactory f(arbiter_alphabet());
  FormulaId phi = parse_ltl(arbiter_basic_spec(), f);

  CHECK_FALSE(synthesize(f, phi, 1).has_value());

  auto ts = synthesize(f, phi, 2);
  REQUIRE(ts.has_value());
  CHECK(ts->size() == 2);
  CHECK(model_check(f, *ts, phi).verdict == Verdict::Holds);
}

TEST_CASE("contradictions are unrealizable at every bound", "[synthesis]") {
  LtlFactory f(rg_alphabet());
  FormulaId phi = parse_ltl("g & X !g & G g", f);
  for (int n = 1; n <= 3; ++n) CHECK_FALSE(synthesize(f, phi, n).has_value());
}

TEST_CASE("a zero bound is rejected", "[synthesis]") {
  LtlFactory f(rg_alphabet());
  FormulaId phi = parse_ltl("G g", f);
  REQUIRE_THROWS_AS(synthesize(f, phi, 0), std::invalid_argument);
}

TEST_CASE("synthesis agrees with exhaustive search at small bounds", "[synthesis]") {
  LtlFactory f(rg_alphabet());
  std::vector<TransitionSystem> one_state = all_small_systems(f.alphabet(), 1);
  std::vector<TransitionSystem> two_state = all_small_systems(f.alphabet(), 2);
  REQUIRE(one_state.size() == 2);
  REQUIRE(two_state.size() == 64);

  std::vector<FormulaId> formulas;
  for (const char* text :
       {"G g", "F g", "g & X !g", "G (r -> X g)", "G (r -> F g)", "F G g", "G F g",
        "(G r) -> G g", "r", "!r U g", "g R !g", "X X g & G !g"})
    formulas.push_back(parse_ltl(text, f));
  std::mt19937 rng(4711);
  std::set<FormulaId> seen(formulas.begin(), formulas.end());
  while (formulas.size() < 40) {
    FormulaId phi = testutil::random_formula(f, rng, 2);
    if (seen.insert(phi).second) formulas.push_back(phi);
  }

  int realizable_at_two = 0;
  for (FormulaId phi : formulas) {
    CAPTURE(pretty_print(f, phi));
    auto s1 = synthesize(f, phi, 1);
    auto s2 = synthesize(f, phi, 2);

    CHECK(s1.has_value() == some_system_satisfies(f, phi, one_state));
    CHECK(s2.has_value() == some_system_satisfies(f, phi, two_state));
    if (s1.has_value()) CHECK(s2.has_value());

    if (s1) CHECK(model_check(f, *s1, phi).verdict == Verdict::Holds);
    if (s2) {
      CHECK(model_check(f, *s2, phi).verdict == Verdict::Holds);
      ++realizable_at_two;
    }
  }
  CHECK(realizable_at_two > 5);
  CHECK(realizable_at_two < static_cast<int>(formulas.size()));
}

TEST_CASE("returned systems model-check at larger bounds", "[synthesis]") {
  LtlFactory f(arbiter_alphabet());
  std::mt19937 rng(99);
  int produced = 0;
  for (int round = 0; round < 25; ++round) {
    FormulaId phi = testutil::random_formula(f, rng, 2);
    CAPTURE(pretty_print(f, phi));
    auto ts = synthesize(f, phi, 3);
    if (!ts) continue;
    ++produced;
    CHECK(ts->size() == 3);
    CHECK(model_check(f, *ts, phi).verdict == Verdict::Holds);
  }
  CHECK(produced > 5);
}

TEST_CASE("decoding rejects assignments that break determinism", "[synthesis]") {
  LtlFactory f(rg_alphabet());
  FormulaId phi = parse_ltl("G g", f);
  BuchiAutomaton ucw = ucw_for(f, phi);
  auto [builder, map] = encode_bounded_synthesis(ucw, 2, f.alphabet());
  SatResult result = solve(builder);
  REQUIRE(result.sat);

  std::vector<bool> doubled = result.model;
  doubled[static_cast<std::size_t>(map.tau_var(0, 0, 0))] = true;
  doubled[static_cast<std::size_t>(map.tau_var(0, 0, 1))] = true;
  REQUIRE_THROWS_AS(decode_model(doubled, map, 2, f.alphabet()), std::logic_error);

  std::vector<bool> starved = result.model;
  starved[static_cast<std::size_t>(map.tau_var(1, 1, 0))] = false;
  starved[static_cast<std::size_t>(map.tau_var(1, 1, 1))] = false;
  REQUIRE_THROWS_AS(decode_model(starved, map, 2, f.alphabet()), std::logic_error);
}
