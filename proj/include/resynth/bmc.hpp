#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
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

// Bounded model checking unrolls k trace positions plus a closing state.
// State vectors are one-hot over system states for steps 0..k; trace letters
// live at positions 0..k-1 with input bits free and output bits tied to the
// step's state. Loop selector j (1-based, j in 1..k) closes the lasso with
// s_k = s_{j-1}, so positions 0..j-2 form the prefix and j-1..k-1 the loop.
//
// Temporal subformulas get one variable per position, plus a second chain
// per Until and Release node that unrolls one further period to discharge
// eventualities at the wrap.
class BmcVarMap {
 public:
  BmcVarMap(int states, int props, int k, CnfBuilder& builder)
      : n_(states), props_(props), k_(k) {
    base_state_ = builder.num_vars() + 1;
    base_letter_ = base_state_ + (k_ + 1) * n_;
    base_loop_ = base_letter_ + k_ * props_;
    const_true_ = base_loop_ + k_;
    int total = const_true_ - base_state_ + 1;
    for (int v = 0; v < total; ++v) builder.fresh_var();
  }

  int unrolling() const { return k_; }
  int states() const { return n_; }

  int state_var(int step, int t) const { return base_state_ + step * n_ + t; }
  int letter_var(int step, int prop) const { return base_letter_ + step * props_ + prop; }
  int loop_sel(int j) const { return base_loop_ + (j - 1); }
  int const_true() const { return const_true_; }

  // Literal carrying the truth of the subformula at a trace position.
  int literal(const LtlFactory& f, FormulaId node, int step) const {
    switch (f.kind(node)) {
      case LtlKind::True:
        return const_true_;
      case LtlKind::False:
        return -const_true_;
      case LtlKind::Atom:
        return letter_var(step, f.atom_index(node));
      case LtlKind::Not:
        return -letter_var(step, f.atom_index(f.lhs(node)));
      default:
        return subf_.at({node, step});
    }
  }

  int register_subf(FormulaId node, int step, CnfBuilder& builder) {
    auto [it, inserted] = subf_.try_emplace({node, step}, 0);
    if (inserted) it->second = builder.fresh_var();
    return it->second;
  }
  int register_again(FormulaId node, int step, CnfBuilder& builder) {
    auto [it, inserted] = again_.try_emplace({node, step}, 0);
    if (inserted) it->second = builder.fresh_var();
    return it->second;
  }
  int again(FormulaId node, int step) const { return again_.at({node, step}); }

 private:
  int n_;
  int props_;
  int k_;
  int base_state_ = 0;
  int base_letter_ = 0;
  int base_loop_ = 0;
  int const_true_ = 0;
  std::map<std::pair<FormulaId, int>, int> subf_;
  std::map<std::pair<FormulaId, int>, int> again_;
};

// ==========================================================================
// Encoding
// ==========================================================================

namespace detail {

inline void encode_equiv_or(CnfBuilder& builder, int x, int a, int b) {
  builder.add_clause({-x, a, b});
  builder.add_clause({x, -a});
  builder.add_clause({x, -b});
}

inline void encode_equiv_and(CnfBuilder& builder, int x, int a, int b) {
  builder.add_clause({x, -a, -b});
  builder.add_clause({-x, a});
  builder.add_clause({-x, b});
}

// x <-> b | (a & y)
inline void encode_until_step(CnfBuilder& builder, int x, int a, int b, int y) {
  builder.add_clause({-x, b, a});
  builder.add_clause({-x, b, y});
  builder.add_clause({x, -b});
  builder.add_clause({x, -a, -y});
}

// x <-> b & (a | y)
inline void encode_release_step(CnfBuilder& builder, int x, int a, int b, int y) {
  builder.add_clause({-x, b});
  builder.add_clause({-x, a, y});
  builder.add_clause({x, -b, -a});
  builder.add_clause({x, -b, -y});
}

// Defines x as the value of the per-position literal at the loop start.
inline void encode_wrap(CnfBuilder& builder, const BmcVarMap& map, int x,
                        const std::vector<int>& at_position) {
  for (int j = 1; j <= map.unrolling(); ++j) {
    int value = at_position[static_cast<std::size_t>(j - 1)];
    builder.add_clause({-map.loop_sel(j), -x, value});
    builder.add_clause({-map.loop_sel(j), x, -value});
  }
}

inline void encode_subformulas(const LtlFactory& f, FormulaId node, CnfBuilder& builder,
                               BmcVarMap& map, std::set<FormulaId>& visited) {
  if (!visited.insert(node).second) return;
  int k = map.unrolling();
  switch (f.kind(node)) {
    case LtlKind::True:
    case LtlKind::False:
    case LtlKind::Atom:
    case LtlKind::Not:
      return;
    case LtlKind::And:
    case LtlKind::Or: {
      encode_subformulas(f, f.lhs(node), builder, map, visited);
      encode_subformulas(f, f.rhs(node), builder, map, visited);
      bool conj = f.kind(node) == LtlKind::And;
      for (int i = 0; i < k; ++i) {
        int x = map.register_subf(node, i, builder);
        int a = map.literal(f, f.lhs(node), i);
        int b = map.literal(f, f.rhs(node), i);
        if (conj)
          encode_equiv_and(builder, x, a, b);
        else
          encode_equiv_or(builder, x, a, b);
      }
      return;
    }
    case LtlKind::Next: {
      encode_subformulas(f, f.lhs(node), builder, map, visited);
      std::vector<int> child(static_cast<std::size_t>(k));
      for (int i = 0; i < k; ++i) child[static_cast<std::size_t>(i)] = map.literal(f, f.lhs(node), i);
      for (int i = 0; i < k; ++i) map.register_subf(node, i, builder);
      for (int i = 0; i + 1 < k; ++i) {
        int x = map.literal(f, node, i);
        builder.add_clause({-x, child[static_cast<std::size_t>(i) + 1]});
        builder.add_clause({x, -child[static_cast<std::size_t>(i) + 1]});
      }
      encode_wrap(builder, map, map.literal(f, node, k - 1), child);
      return;
    }
    case LtlKind::Until:
    case LtlKind::Release: {
      encode_subformulas(f, f.lhs(node), builder, map, visited);
      encode_subformulas(f, f.rhs(node), builder, map, visited);
      bool until = f.kind(node) == LtlKind::Until;
      for (int i = 0; i < k; ++i) {
        map.register_subf(node, i, builder);
        map.register_again(node, i, builder);
      }
      std::vector<int> second(static_cast<std::size_t>(k));
      for (int i = 0; i < k; ++i) second[static_cast<std::size_t>(i)] = map.again(node, i);

      for (int i = 0; i < k; ++i) {
        int a = map.literal(f, f.lhs(node), i);
        int b = map.literal(f, f.rhs(node), i);
        int x = map.literal(f, node, i);
        int x2 = map.again(node, i);
        if (i + 1 < k) {
          int next1 = map.literal(f, node, i + 1);
          int next2 = map.again(node, i + 1);
          if (until) {
            encode_until_step(builder, x, a, b, next1);
            encode_until_step(builder, x2, a, b, next2);
          } else {
            encode_release_step(builder, x, a, b, next1);
            encode_release_step(builder, x2, a, b, next2);
          }
        } else {
          int wrap = builder.fresh_var();
          encode_wrap(builder, map, wrap, second);
          if (until)
            encode_until_step(builder, x, a, b, wrap);
          else
            encode_release_step(builder, x, a, b, wrap);
          // The second pass ends after one full period: an Until must have
          // found its fulfilment by then, and a Release that survived the
          // period holds forever. Both reduce the closing value to b.
          builder.add_clause({-x2, b});
          builder.add_clause({x2, -b});
        }
      }
      return;
    }
    case LtlKind::Implies:
    case LtlKind::Finally:
    case LtlKind::Globally:
      throw std::logic_error("bounded model checking expects negation normal form");
  }
  throw std::logic_error("unhandled formula kind");
}

}  // namespace detail

// Constraint system that is satisfiable iff the system admits an initial
// lasso of total length k whose trace violates the formula.
inline std::pair<CnfBuilder, BmcVarMap> encode_bmc(LtlFactory& f,
                                                   const TransitionSystem& ts,
                                                   FormulaId phi, int k) {
  if (k < 1) throw std::invalid_argument("unrolling length must be at least 1");
  const AtomicAlphabet& alphabet = ts.alphabet;
  int n = static_cast<int>(ts.size());
  int props = alphabet.num_props();
  CnfBuilder builder;
  BmcVarMap map(n, props, k, builder);

  builder.add_clause({map.const_true()});
  builder.add_clause({map.state_var(0, 0)});
  for (int step = 0; step <= k; ++step) {
    std::vector<int> onehot;
    onehot.reserve(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t) onehot.push_back(map.state_var(step, t));
    builder.add_exactly_one(onehot);
  }

  std::uint32_t inputs = alphabet.input_letter_count();
  int num_inputs = alphabet.num_inputs();
  for (int step = 0; step < k; ++step) {
    for (int t = 0; t < n; ++t) {
      for (std::uint32_t i = 0; i < inputs; ++i) {
        std::vector<int> clause{-map.state_var(step, t)};
        for (int bit = 0; bit < num_inputs; ++bit) {
          int v = map.letter_var(step, bit);
          clause.push_back((i >> bit) & 1u ? -v : v);
        }
        clause.push_back(map.state_var(step + 1, ts.tau[static_cast<std::size_t>(t)][i]));
        builder.add_clause(std::move(clause));
      }
      for (int o = 0; o < alphabet.num_outputs(); ++o) {
        int v = map.letter_var(step, num_inputs + o);
        bool set = (ts.out[static_cast<std::size_t>(t)] >> o) & 1u;
        builder.add_clause({-map.state_var(step, t), set ? v : -v});
      }
    }
  }

  std::vector<int> selectors;
  selectors.reserve(static_cast<std::size_t>(k));
  for (int j = 1; j <= k; ++j) selectors.push_back(map.loop_sel(j));
  builder.add_exactly_one(selectors);
  for (int j = 1; j <= k; ++j) {
    for (int t = 0; t < n; ++t)
      builder.add_clause({-map.loop_sel(j), -map.state_var(k, t), map.state_var(j - 1, t)});
  }

  FormulaId negated = negate_nnf(f, phi);
  std::set<FormulaId> visited;
  detail::encode_subformulas(f, negated, builder, map, visited);
  builder.add_clause({map.literal(f, negated, 0)});
  return {std::move(builder), std::move(map)};
}

// ==========================================================================
// Counterexample extraction
// ==========================================================================

inline LassoWord decode_bmc_lasso(const std::vector<bool>& model, const BmcVarMap& map,
                                  int props) {
  int k = map.unrolling();
  int selected = 0;
  for (int j = 1; j <= k; ++j) {
    if (!model[static_cast<std::size_t>(map.loop_sel(j))]) continue;
    if (selected != 0) throw std::logic_error("two loop selectors are active at once");
    selected = j;
  }
  if (selected == 0) throw std::logic_error("no loop selector is active");
  std::vector<std::uint32_t> letters(static_cast<std::size_t>(k), 0);
  for (int step = 0; step < k; ++step) {
    for (int p = 0; p < props; ++p) {
      if (model[static_cast<std::size_t>(map.letter_var(step, p))])
        letters[static_cast<std::size_t>(step)] |= 1u << p;
    }
  }
  LassoWord w;
  w.prefix.assign(letters.begin(), letters.begin() + (selected - 1));
  w.loop.assign(letters.begin() + (selected - 1), letters.end());
  return w;
}

struct BmcOptions {
  SolveOptions solve;
  int automaton_cap = kDefaultAutomatonCap;
};

// Iterative deepening over the unrolling length, returning the lasso of the
// smallest satisfiable bound. The default cap is the run graph bound
// |T| * |A(not phi)| + 1, past which no new lassos exist. A lasso at bound k
// pads to every larger bound by walking further around its loop, so one
// unsatisfiable query at the cap rules out all smaller bounds; the scan only
// continues below the cap when that query finds a witness.
inline std::optional<LassoWord> find_counterexample(LtlFactory& f,
                                                    const TransitionSystem& ts,
                                                    FormulaId phi,
                                                    std::optional<int> k_max = std::nullopt,
                                                    const BmcOptions& options = {}) {
  int cap;
  if (k_max) {
    cap = *k_max;
  } else {
    BuchiAutomaton nba = ltl_to_nba(f, f.lnot(phi), options.automaton_cap);
    cap = static_cast<int>(ts.size()) * nba.size() + 1;
  }

  auto attempt = [&](int k) -> std::optional<LassoWord> {
    auto [builder, map] = encode_bmc(f, ts, phi, k);
    SatResult result = solve(builder, options.solve);
    if (!result.sat) return std::nullopt;
    LassoWord w = decode_bmc_lasso(result.model, map, ts.alphabet.num_props());
    if (!trace_member(ts, w) || eval_lasso(f, w, phi))
      throw std::logic_error("bounded model checking decoded an invalid counterexample");
    return w;
  };

  constexpr int kDirectLimit = 10;
  for (int k = 1; k <= std::min(cap, kDirectLimit); ++k)
    if (auto w = attempt(k)) return w;
  if (cap <= kDirectLimit) return std::nullopt;

  auto at_cap = attempt(cap);
  if (!at_cap) return std::nullopt;
  for (int k = kDirectLimit + 1; k < cap; ++k)
    if (auto w = attempt(k)) return w;
  return at_cap;
}

}  // namespace resynth
