#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "resynth/automata.hpp"
#include "resynth/ltl.hpp"
#include "resynth/model_check.hpp"
#include "resynth/satcore.hpp"
#include "resynth/synthesis.hpp"
#include "resynth/system.hpp"

namespace resynth {

// ==========================================================================
// Cost variables
// ==========================================================================

// Cost bookkeeping over an implicit operation order: for each state t, first
// the potential redirects to states 0..N-1, then the potential label change
// of t. Slot n of state t is the redirect to state n for n < N and the label
// change for n = N.
//
//   trans_var(t, t2)     some input letter is redirected from t to t2
//   label_var(t)         the output label of t changes
//   cost_var(t, n, c)    at least c operations applied through slot (t, n),
//                        for c in 0..k+1
class CostVarMap {
 public:
  CostVarMap(int states, int k, CnfBuilder& builder)
      : n_(states), k_(k), base_(builder.num_vars() + 1) {
    base_label_ = base_ + n_ * n_;
    base_cost_ = base_label_ + n_;
    int total = base_cost_ + n_ * (n_ + 1) * (k_ + 2) - base_;
    for (int v = 0; v < total; ++v) builder.fresh_var();
  }

  int states() const { return n_; }
  int budget() const { return k_; }

  int trans_var(int t, int t2) const { return base_ + t * n_ + t2; }
  int label_var(int t) const { return base_label_ + t; }
  int cost_var(int t, int slot, int c) const {
    return base_cost_ + (t * (n_ + 1) + slot) * (k_ + 2) + c;
  }

 private:
  int n_;
  int k_;
  int base_;
  int base_label_ = 0;
  int base_cost_ = 0;
};

// ==========================================================================
// Cost encoding
// ==========================================================================

// Bounds the number of label-change and redirect operations that separate
// the encoded candidate from the original system by k. Redirects are counted
// once per (source, target) pair regardless of how many letters move.
inline CostVarMap encode_cost(const TransitionSystem& orig, int k,
                              const SynthesisVarMap& synth, CnfBuilder& builder) {
  int n = static_cast<int>(orig.size());
  if (synth.bound() != n)
    throw std::invalid_argument("cost encoding needs the synthesis bound to match the system size");
  CostVarMap map(n, k, builder);
  const AtomicAlphabet& alphabet = orig.alphabet;
  std::uint32_t inputs = alphabet.input_letter_count();

  for (int t = 0; t < n; ++t) {
    for (int t2 = 0; t2 < n; ++t2) {
      int trans = map.trans_var(t, t2);
      std::vector<int> definition{-trans};
      for (std::uint32_t i = 0; i < inputs; ++i) {
        if (orig.tau[static_cast<std::size_t>(t)][i] == t2) continue;
        int redirecting = synth.tau_var(t, i, t2);
        definition.push_back(redirecting);
        builder.add_clause({-redirecting, trans});
      }
      builder.add_clause(std::move(definition));
    }

    int label = map.label_var(t);
    std::vector<int> definition{-label};
    for (int o = 0; o < alphabet.num_outputs(); ++o) {
      bool originally_set = (orig.out[static_cast<std::size_t>(t)] >> o) & 1u;
      int differs = originally_set ? -synth.out_var(o, t) : synth.out_var(o, t);
      definition.push_back(differs);
      builder.add_clause({-differs, label});
    }
    builder.add_clause(std::move(definition));
  }

  builder.add_clause({-map.trans_var(0, 0), map.cost_var(0, 0, 1)});
  builder.add_clause({map.trans_var(0, 0), map.cost_var(0, 0, 0)});
  for (int t = 0; t < n; ++t) {
    for (int slot = 0; slot <= n; ++slot) {
      if (t == 0 && slot == 0) continue;
      int prev_t = slot > 0 ? t : t - 1;
      int prev_slot = slot > 0 ? slot - 1 : n;
      int op = slot < n ? map.trans_var(t, slot) : map.label_var(t);
      for (int c = 0; c <= k; ++c) {
        builder.add_clause({-map.cost_var(prev_t, prev_slot, c), -op, map.cost_var(t, slot, c + 1)});
        builder.add_clause({-map.cost_var(prev_t, prev_slot, c), op, map.cost_var(t, slot, c)});
      }
    }
  }
  for (int t = 0; t < n; ++t)
    for (int slot = 0; slot <= n; ++slot)
      builder.add_clause({-map.cost_var(t, slot, k + 1)});
  return map;
}

// ==========================================================================
// Repair
// ==========================================================================

struct RepairOptions {
  SolveOptions solve;
  int automaton_cap = kDefaultAutomatonCap;
};

namespace detail {

inline std::optional<Transformation> repair_against_ucw(LtlFactory& f,
                                                        const TransitionSystem& ts,
                                                        FormulaId phi, int k,
                                                        const BuchiAutomaton& ucw,
                                                        const RepairOptions& options) {
  if (k < 0) throw std::invalid_argument("operation budget must be non-negative");
  int n = static_cast<int>(ts.size());
  auto [builder, synth] = encode_bounded_synthesis(ucw, n, f.alphabet());
  encode_cost(ts, k, synth, builder);
  SatResult result = solve(builder, options.solve);
  if (!result.sat) return std::nullopt;
  TransitionSystem repaired = decode_model(result.model, synth, n, f.alphabet());
  Transformation xi = diff(ts, repaired);
  if (static_cast<int>(xi.size()) > k)
    throw std::logic_error("repair exceeded the operation budget");
  if (!is_consistent(xi)) throw std::logic_error("repair produced an inconsistent transformation");
  if (model_check(f, repaired, phi).verdict != Verdict::Holds)
    throw std::logic_error("repaired system fails the property it was repaired for");
  return xi;
}

}  // namespace detail

// A transformation of at most k operations whose application makes the
// system satisfy the formula, or nullopt when none exists. The system is
// expected to already carry its full state budget.
inline std::optional<Transformation> repair(LtlFactory& f, const TransitionSystem& ts,
                                            FormulaId phi, int k,
                                            const RepairOptions& options = {}) {
  BuchiAutomaton ucw = ucw_for(f, phi, options.automaton_cap);
  return detail::repair_against_ucw(f, ts, phi, k, ucw, options);
}

// Binary search for a repair with the fewest operations. Probes are memoized
// per budget; each probe solves an independent constraint system.
inline std::optional<Transformation> minimal_repair(LtlFactory& f,
                                                    const TransitionSystem& ts,
                                                    FormulaId phi,
                                                    const RepairOptions& options = {}) {
  BuchiAutomaton ucw = ucw_for(f, phi, options.automaton_cap);
  std::map<int, std::optional<Transformation>> probes;
  auto probe = [&](int k) -> const std::optional<Transformation>& {
    auto it = probes.find(k);
    if (it == probes.end())
      it = probes.emplace(k, detail::repair_against_ucw(f, ts, phi, k, ucw, options)).first;
    return it->second;
  };

  int n = static_cast<int>(ts.size());
  int left = 0;
  int right = n + n * n;
  bool exists = false;
  std::optional<Transformation> best;
  while (left < right) {
    int k = (left + right) / 2;
    const auto& found = probe(k);
    if (found) {
      right = k - 1;
      best = found;
      exists = true;
    } else {
      left = k + 1;
    }
  }
  const auto& final_probe = probe(left);
  if (!exists) return std::nullopt;
  if (final_probe) return final_probe;
  return best;
}

}  // namespace resynth
