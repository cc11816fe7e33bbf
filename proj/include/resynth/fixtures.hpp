// Small arbiter and grant-scheduling systems plus their specification
// formulas; shared by the test suites, the examples and the documentation.
#pragma once

#include <string>
#include <vector>

#include "resynth/ltl.hpp"
#include "resynth/system.hpp"

namespace resynth::fixtures {

// Two-client arbiter alphabet: requests in, grants out.
inline AtomicAlphabet arbiter_alphabet() {
  return AtomicAlphabet({"r0", "r1"}, {"g0", "g1"});
}

// Input letter masks for the arbiter alphabet.
inline constexpr std::uint32_t kNone = 0;   // {}
inline constexpr std::uint32_t kR0 = 1;     // {r0}
inline constexpr std::uint32_t kR1 = 2;     // {r1}
inline constexpr std::uint32_t kR0R1 = 3;   // {r0,r1}

// Output masks for the arbiter alphabet.
inline constexpr std::uint32_t kG0 = 1;
inline constexpr std::uint32_t kG1 = 2;

// Round-robin arbiter: grants alternate between the clients regardless of
// the requests.
inline TransitionSystem arb0() {
  TransitionSystem ts;
  ts.alphabet = arbiter_alphabet();
  ts.out = {kG0, kG1};
  ts.tau = {{1, 1, 1, 1}, {0, 0, 0, 0}};
  ts.validate();
  return ts;
}

// The round-robin arbiter padded with two extra states that already carry
// useful structure: t2 routes by the pending request, t3 grants client 0 and
// falls back into the rotation. Repairs at budget four are searched over this
// system.
inline TransitionSystem arb0_budget4() {
  TransitionSystem ts;
  ts.alphabet = arbiter_alphabet();
  ts.out = {kG0, kG1, kG0, kG0};
  ts.tau = {
      {1, 1, 1, 1},
      {0, 0, 0, 0},
      {0, 0, 1, 1},
      {1, 1, 1, 1},
  };
  ts.validate();
  return ts;
}

// First repair stage: the initial state no longer grants.
inline TransitionSystem arb1() {
  TransitionSystem ts = arb0_budget4();
  ts.out[0] = 0;
  return ts;
}

// Third repair stage: the initial state waits on no requests and answers a
// lone r0 via the router state t2.
inline TransitionSystem arb3() {
  TransitionSystem ts = arb1();
  ts.tau[0][kNone] = 0;
  ts.tau[0][kR0] = 2;
  return ts;
}

// Fully repaired arbiter: grants are given exactly to pending requests, and
// simultaneous requests are queued so both clients are served.
inline TransitionSystem arb5() {
  TransitionSystem ts;
  ts.alphabet = arbiter_alphabet();
  ts.out = {0, kG1, kG0, kG0};
  ts.tau = {
      {0, 2, 1, 3},
      {0, 2, 0, 2},
      {0, 0, 1, 1},
      {1, 1, 1, 1},
  };
  ts.validate();
  return ts;
}

// Mutual exclusion of the grants.
inline std::string mutex_property() { return "G (!g0 | !g1)"; }

// Every request is eventually answered.
inline std::string fairness_property(int client) {
  std::string c = std::to_string(client);
  return "G (r" + c + " -> F g" + c + ")";
}

// No grant without a pending request: grants are withheld until a request
// arrives, initially and after every grant.
inline std::string non_spurious_property(int client) {
  std::string c = std::to_string(client);
  return "(r" + c + " R !g" + c + ") & G (g" + c + " -> (r" + c + " | X (r" + c +
         " R !g" + c + ")))";
}

inline std::string arbiter_basic_spec() {
  return mutex_property() + " & " + fairness_property(0) + " & " + fairness_property(1);
}

inline std::string arbiter_full_spec() {
  return arbiter_basic_spec() + " & " + non_spurious_property(0) + " & " +
         non_spurious_property(1);
}

// Single request/grant alphabet for the two hand-sized repair examples.
inline AtomicAlphabet rg_alphabet() { return AtomicAlphabet({"r"}, {"g"}); }

// Two states that both grant forever; violates "g & X !g" only through the
// labels.
inline TransitionSystem phi1_system() {
  TransitionSystem ts;
  ts.alphabet = rg_alphabet();
  ts.out = {1, 1};
  ts.tau = {{0, 0}, {1, 1}};
  ts.validate();
  return ts;
}

inline std::string phi1_property() { return "g & X !g"; }

// Request counter chain: two requests reach the granting sink t2.
inline TransitionSystem phi2_system() {
  TransitionSystem ts;
  ts.alphabet = rg_alphabet();
  ts.out = {0, 0, 1};
  ts.tau = {{0, 1}, {1, 2}, {2, 2}};
  ts.validate();
  return ts;
}

inline std::string phi2_property() { return "!g & X !g & ((G !r) -> X X g)"; }

// Every fixture system by name, for the command line and the JSON snapshot
// tests.
inline std::vector<std::pair<std::string, TransitionSystem>> all_systems() {
  return {
      {"arb0", arb0()},
      {"arb0_budget4", arb0_budget4()},
      {"arb1", arb1()},
      {"arb3", arb3()},
      {"arb5", arb5()},
      {"phi1_system", phi1_system()},
      {"phi2_system", phi2_system()},
  };
}

}  // namespace resynth::fixtures
