#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "resynth/automata.hpp"
#include "resynth/ltl.hpp"
#include "resynth/satcore.hpp"
#include "resynth/system.hpp"

namespace resynth {

// ==========================================================================
// Variable map
// ==========================================================================

namespace detail {

// Per automaton state: n times the number of rejecting states it is
// reachable from (via zero or more edges). The rejecting product vertices on
// any repetition-free run graph path into (t, q) are pairwise distinct and
// their automaton states all reach q, so a valid annotation never needs a
// value above this ceiling.
inline std::vector<int> annotation_caps(const BuchiAutomaton& ucw, int n) {
  int states = ucw.size();
  std::vector<int> upstream(static_cast<std::size_t>(states), 0);
  for (int f = 0; f < states; ++f) {
    if (!ucw.accepting[static_cast<std::size_t>(f)]) continue;
    std::vector<std::uint8_t> seen(static_cast<std::size_t>(states), 0);
    std::vector<int> stack{f};
    seen[static_cast<std::size_t>(f)] = 1;
    while (!stack.empty()) {
      int q = stack.back();
      stack.pop_back();
      for (const auto& e : ucw.edges[static_cast<std::size_t>(q)]) {
        if (!seen[static_cast<std::size_t>(e.dst)]) {
          seen[static_cast<std::size_t>(e.dst)] = 1;
          stack.push_back(e.dst);
        }
      }
    }
    for (int q = 0; q < states; ++q)
      if (seen[static_cast<std::size_t>(q)]) ++upstream[static_cast<std::size_t>(q)];
  }
  std::vector<int> caps(static_cast<std::size_t>(states));
  for (int q = 0; q < states; ++q) caps[static_cast<std::size_t>(q)] = n * upstream[static_cast<std::size_t>(q)];
  return caps;
}

}  // namespace detail

// Variable layout for the bounded-synthesis constraints over an n-state
// candidate system and a universal co-Buchi automaton.
//
//   tau_var(t, i, t2)    the candidate moves t -> t2 on input letter i
//   out_var(o, t)        output proposition o holds at state t
//   reach_var(t, q)      run graph vertex (t, q) carries an annotation
//   count_ge(t, q, c)    the annotation value at (t, q) is at least c
//
// Counters use an order encoding with a per-automaton-state ceiling cap(q);
// count_ge is defined for 1 <= c <= cap(q).
class SynthesisVarMap {
 public:
  SynthesisVarMap(const BuchiAutomaton& ucw, int n, const AtomicAlphabet& alphabet,
                  CnfBuilder& builder)
      : n_(n),
        inputs_(alphabet.input_letter_count()),
        out_props_(alphabet.num_outputs()),
        states_(ucw.size()),
        caps_(detail::annotation_caps(ucw, n)) {
    offsets_.resize(static_cast<std::size_t>(states_) + 1, 0);
    for (int q = 0; q < states_; ++q)
      offsets_[static_cast<std::size_t>(q) + 1] =
          offsets_[static_cast<std::size_t>(q)] + caps_[static_cast<std::size_t>(q)];
    int per_state_counter = offsets_[static_cast<std::size_t>(states_)];
    base_tau_ = builder.num_vars() + 1;
    base_out_ = base_tau_ + n_ * static_cast<int>(inputs_) * n_;
    base_reach_ = base_out_ + out_props_ * n_;
    base_count_ = base_reach_ + n_ * states_;
    int total = base_count_ + n_ * per_state_counter - base_tau_;
    for (int k = 0; k < total; ++k) builder.fresh_var();
  }

  int bound() const { return n_; }
  int automaton_states() const { return states_; }

  int tau_var(int t, std::uint32_t i, int t2) const {
    return base_tau_ + (t * static_cast<int>(inputs_) + static_cast<int>(i)) * n_ + t2;
  }
  int out_var(int o, int t) const { return base_out_ + o * n_ + t; }
  int reach_var(int t, int q) const { return base_reach_ + t * states_ + q; }

  int cap(int q) const { return caps_[static_cast<std::size_t>(q)]; }

  int count_ge(int t, int q, int c) const {
    return base_count_ + t * offsets_[static_cast<std::size_t>(states_)] +
           offsets_[static_cast<std::size_t>(q)] + (c - 1);
  }

 private:
  int n_;
  std::uint32_t inputs_;
  int out_props_;
  int states_;
  std::vector<int> caps_;
  std::vector<int> offsets_;
  int base_tau_ = 0;
  int base_out_ = 0;
  int base_reach_ = 0;
  int base_count_ = 0;
};

// ==========================================================================
// Encoding
// ==========================================================================

// Constraint system that is satisfiable iff some deterministic, total,
// n-state system over the alphabet satisfies the property whose universal
// co-Buchi automaton is given. Constraints:
//   (a) exactly one successor per state and input letter;
//   (b) the initial run graph vertex carries an annotation;
//   (c) along every run graph edge compatible with the chosen outputs, the
//       annotation propagates without decreasing, strictly increasing into
//       rejecting automaton states;
//   (d) order-encoded counters are downward closed.
inline std::pair<CnfBuilder, SynthesisVarMap> encode_bounded_synthesis(
    const BuchiAutomaton& ucw, int n, const AtomicAlphabet& alphabet) {
  if (n < 1) throw std::invalid_argument("state bound must be at least 1");
  CnfBuilder builder;
  SynthesisVarMap map(ucw, n, alphabet, builder);
  std::uint32_t inputs = alphabet.input_letter_count();
  int out_props = alphabet.num_outputs();
  int states = ucw.size();

  for (int t = 0; t < n; ++t) {
    for (std::uint32_t i = 0; i < inputs; ++i) {
      std::vector<int> successors;
      successors.reserve(static_cast<std::size_t>(n));
      for (int t2 = 0; t2 < n; ++t2) successors.push_back(map.tau_var(t, i, t2));
      builder.add_exactly_one(successors);
    }
  }

  builder.add_clause({map.reach_var(0, ucw.initial)});

  for (int t = 0; t < n; ++t) {
    for (int q = 0; q < states; ++q) {
      for (int c = 2; c <= map.cap(q); ++c)
        builder.add_clause({-map.count_ge(t, q, c), map.count_ge(t, q, c - 1)});
    }
  }

  for (int q = 0; q < states; ++q) {
    for (const auto& e : ucw.edges[static_cast<std::size_t>(q)]) {
      std::uint32_t pos_in = e.pos & (inputs - 1);
      std::uint32_t neg_in = e.neg & (inputs - 1);
      std::uint32_t pos_out = alphabet.output_part(e.pos);
      std::uint32_t neg_out = alphabet.output_part(e.neg);
      int q2 = e.dst;
      bool rejecting = ucw.accepting[static_cast<std::size_t>(q2)] != 0;
      for (std::uint32_t i = 0; i < inputs; ++i) {
        if ((i & pos_in) != pos_in || (i & neg_in) != 0) continue;
        for (int t = 0; t < n; ++t) {
          std::vector<int> antecedent{-map.reach_var(t, q)};
          for (int o = 0; o < out_props; ++o) {
            if (pos_out & (1u << o)) antecedent.push_back(-map.out_var(o, t));
            if (neg_out & (1u << o)) antecedent.push_back(map.out_var(o, t));
          }
          for (int t2 = 0; t2 < n; ++t2) {
            std::vector<int> base = antecedent;
            base.push_back(-map.tau_var(t, i, t2));

            std::vector<int> clause = base;
            clause.push_back(map.reach_var(t2, q2));
            builder.add_clause(std::move(clause));

            int low = rejecting ? 0 : 1;
            for (int c = low; c <= map.cap(q); ++c) {
              int target = rejecting ? c + 1 : c;
              clause = base;
              if (c >= 1) clause.push_back(-map.count_ge(t, q, c));
              if (target <= map.cap(q2)) {
                clause.push_back(map.count_ge(t2, q2, target));
              } else if (c == 0) {
                // A rejecting state reaches itself, so its cap is at least n.
                throw std::logic_error("annotation cap vanished at a rejecting state");
              }
              builder.add_clause(std::move(clause));
            }
          }
        }
      }
    }
  }
  return {std::move(builder), std::move(map)};
}

// ==========================================================================
// Decoding
// ==========================================================================

inline TransitionSystem decode_model(const std::vector<bool>& model,
                                     const SynthesisVarMap& map, int n,
                                     const AtomicAlphabet& alphabet) {
  TransitionSystem ts;
  ts.alphabet = alphabet;
  std::uint32_t inputs = alphabet.input_letter_count();
  ts.out.assign(static_cast<std::size_t>(n), 0);
  ts.tau.assign(static_cast<std::size_t>(n), std::vector<int>(inputs, -1));
  for (int t = 0; t < n; ++t) {
    for (std::uint32_t i = 0; i < inputs; ++i) {
      int chosen = -1;
      for (int t2 = 0; t2 < n; ++t2) {
        if (!model[static_cast<std::size_t>(map.tau_var(t, i, t2))]) continue;
        if (chosen != -1)
          throw std::logic_error("synthesis model picks two successors for one input");
        chosen = t2;
      }
      if (chosen == -1)
        throw std::logic_error("synthesis model picks no successor for an input");
      ts.tau[static_cast<std::size_t>(t)][i] = chosen;
    }
    for (int o = 0; o < alphabet.num_outputs(); ++o) {
      if (model[static_cast<std::size_t>(map.out_var(o, t))])
        ts.out[static_cast<std::size_t>(t)] |= 1u << o;
    }
  }
  ts.validate();
  return ts;
}

// ==========================================================================
// Synthesis
// ==========================================================================

struct SynthesisOptions {
  SolveOptions solve;
  int automaton_cap = kDefaultAutomatonCap;
};

// Bounded synthesis: an n-state system satisfying the formula, or nullopt
// when no such system exists.
inline std::optional<TransitionSystem> synthesize(LtlFactory& f, FormulaId phi, int n,
                                                  const SynthesisOptions& options = {}) {
  BuchiAutomaton ucw = ucw_for(f, phi, options.automaton_cap);
  auto [builder, map] = encode_bounded_synthesis(ucw, n, f.alphabet());
  SatResult result = solve(builder, options.solve);
  if (!result.sat) return std::nullopt;
  return decode_model(result.model, map, n, f.alphabet());
}

}  // namespace resynth
