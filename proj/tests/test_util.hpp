// Shared helpers for the unit tests: deterministic random formulas, lassos
// and systems, plus a brute-force satisfiability reference.
#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "resynth/ltl.hpp"
#include "resynth/satcore.hpp"
#include "resynth/system.hpp"

namespace testutil {

using namespace resynth;

// Random formula over the factory's alphabet with the given operator depth.
// Leaves are atoms or constants; inner nodes cover every connective.
inline FormulaId random_formula(LtlFactory& f, std::mt19937& rng, int depth) {
  std::uniform_int_distribution<int> leaf_pick(0, f.alphabet().num_props() + 1);
  if (depth == 0) {
    int pick = leaf_pick(rng);
    if (pick < f.alphabet().num_props()) return f.atom_by_index(pick);
    return pick == f.alphabet().num_props() ? f.tt() : f.ff();
  }
  std::uniform_int_distribution<int> op_pick(0, 8);
  switch (op_pick(rng)) {
    case 0: return f.lnot(random_formula(f, rng, depth - 1));
    case 1: return f.next(random_formula(f, rng, depth - 1));
    case 2: return f.finally_(random_formula(f, rng, depth - 1));
    case 3: return f.globally(random_formula(f, rng, depth - 1));
    case 4:
      return f.land(random_formula(f, rng, depth - 1), random_formula(f, rng, depth - 1));
    case 5:
      return f.lor(random_formula(f, rng, depth - 1), random_formula(f, rng, depth - 1));
    case 6:
      return f.implies(random_formula(f, rng, depth - 1), random_formula(f, rng, depth - 1));
    case 7:
      return f.until(random_formula(f, rng, depth - 1), random_formula(f, rng, depth - 1));
    default:
      return f.release(random_formula(f, rng, depth - 1), random_formula(f, rng, depth - 1));
  }
}

// Every formula of the exact given structure depth over the alphabet,
// counting atoms and constants as depth zero.
inline std::vector<FormulaId> formulas_up_to_depth(LtlFactory& f, int depth) {
  std::vector<std::vector<FormulaId>> by_depth;
  std::vector<FormulaId> leaves = {f.tt(), f.ff()};
  for (int p = 0; p < f.alphabet().num_props(); ++p) leaves.push_back(f.atom_by_index(p));
  by_depth.push_back(leaves);
  std::vector<FormulaId> all = leaves;
  for (int d = 1; d <= depth; ++d) {
    std::vector<FormulaId> level;
    std::vector<FormulaId> smaller;
    for (int e = 0; e < d; ++e)
      smaller.insert(smaller.end(), by_depth[static_cast<std::size_t>(e)].begin(),
                     by_depth[static_cast<std::size_t>(e)].end());
    for (FormulaId a : by_depth[static_cast<std::size_t>(d - 1)]) {
      level.push_back(f.lnot(a));
      level.push_back(f.next(a));
      level.push_back(f.finally_(a));
      level.push_back(f.globally(a));
    }
    // Binary nodes: one side at depth d-1, the other anything smaller.
    for (FormulaId a : by_depth[static_cast<std::size_t>(d - 1)]) {
      for (FormulaId b : smaller) {
        level.push_back(f.land(a, b));
        level.push_back(f.lor(a, b));
        level.push_back(f.until(a, b));
        level.push_back(f.release(a, b));
        level.push_back(f.land(b, a));
        level.push_back(f.lor(b, a));
        level.push_back(f.until(b, a));
        level.push_back(f.release(b, a));
      }
      for (FormulaId b : by_depth[static_cast<std::size_t>(d - 1)]) {
        level.push_back(f.land(a, b));
        level.push_back(f.lor(a, b));
        level.push_back(f.until(a, b));
        level.push_back(f.release(a, b));
      }
    }
    std::sort(level.begin(), level.end());
    level.erase(std::unique(level.begin(), level.end()), level.end());
    by_depth.push_back(level);
    all.insert(all.end(), level.begin(), level.end());
  }
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  return all;
}

inline LassoWord random_lasso(const AtomicAlphabet& alphabet, std::mt19937& rng,
                              std::size_t max_prefix, std::size_t max_loop) {
  std::uniform_int_distribution<std::uint32_t> letter(0, alphabet.trace_letter_count() - 1);
  std::uniform_int_distribution<std::size_t> prefix_len(0, max_prefix);
  std::uniform_int_distribution<std::size_t> loop_len(1, max_loop);
  LassoWord w;
  std::size_t np = prefix_len(rng);
  std::size_t nl = loop_len(rng);
  for (std::size_t i = 0; i < np; ++i) w.prefix.push_back(letter(rng));
  for (std::size_t i = 0; i < nl; ++i) w.loop.push_back(letter(rng));
  return w;
}

// All lasso words with |prefix| + |loop| <= total_len over the alphabet.
inline std::vector<LassoWord> all_lassos(const AtomicAlphabet& alphabet, std::size_t total_len) {
  std::vector<LassoWord> result;
  std::uint32_t letters = alphabet.trace_letter_count();
  for (std::size_t pl = 0; pl + 1 <= total_len; ++pl) {
    for (std::size_t ll = 1; pl + ll <= total_len; ++ll) {
      std::size_t n = pl + ll;
      std::vector<std::uint32_t> word(n, 0);
      while (true) {
        LassoWord w;
        w.prefix.assign(word.begin(), word.begin() + static_cast<std::ptrdiff_t>(pl));
        w.loop.assign(word.begin() + static_cast<std::ptrdiff_t>(pl), word.end());
        result.push_back(w);
        std::size_t i = 0;
        for (; i < n; ++i) {
          if (++word[i] < letters) break;
          word[i] = 0;
        }
        if (i == n) break;
      }
    }
  }
  return result;
}

inline TransitionSystem random_system(const AtomicAlphabet& alphabet, std::mt19937& rng,
                                      int num_states) {
  std::uniform_int_distribution<std::uint32_t> mask(0, alphabet.output_mask_count() - 1);
  std::uniform_int_distribution<int> target(0, num_states - 1);
  TransitionSystem ts;
  ts.alphabet = alphabet;
  for (int t = 0; t < num_states; ++t) {
    ts.out.push_back(mask(rng));
    std::vector<int> row;
    for (std::uint32_t i = 0; i < alphabet.input_letter_count(); ++i) row.push_back(target(rng));
    ts.tau.push_back(std::move(row));
  }
  ts.validate();
  return ts;
}

// A random trace of the system: walk under random inputs for at least the
// requested number of steps, then close the lasso at the latest revisited
// state. The result always satisfies trace membership.
inline LassoWord random_trace(const TransitionSystem& ts, std::mt19937& rng,
                              std::size_t steps) {
  std::uniform_int_distribution<std::uint32_t> input(0, ts.alphabet.input_letter_count() - 1);
  std::vector<std::uint32_t> letters;
  std::vector<std::size_t> last_seen(ts.out.size(), static_cast<std::size_t>(-1));
  int state = 0;
  last_seen[0] = 0;
  std::size_t start = 0;
  for (std::size_t i = 0;; ++i) {
    std::uint32_t in = input(rng);
    letters.push_back(step_letter(ts, state, in));
    state = ts.tau[static_cast<std::size_t>(state)][in];
    if (i + 1 >= steps && last_seen[static_cast<std::size_t>(state)] != static_cast<std::size_t>(-1)) {
      start = last_seen[static_cast<std::size_t>(state)];
      break;
    }
    last_seen[static_cast<std::size_t>(state)] = i + 1;
  }
  LassoWord w;
  w.prefix.assign(letters.begin(), letters.begin() + static_cast<std::ptrdiff_t>(start));
  w.loop.assign(letters.begin() + static_cast<std::ptrdiff_t>(start), letters.end());
  return w;
}

// Brute-force satisfiability over all assignments; usable up to ~20 vars.
inline bool brute_force_sat(const CnfBuilder& builder) {
  int n = builder.num_vars();
  for (std::uint64_t assignment = 0; assignment < (1ull << n); ++assignment) {
    bool ok = true;
    for (const auto& clause : builder.clauses()) {
      bool sat = false;
      for (int lit : clause) {
        bool value = (assignment >> (std::abs(lit) - 1)) & 1ull;
        if ((lit > 0) == value) {
          sat = true;
          break;
        }
      }
      if (!sat) {
        ok = false;
        break;
      }
    }
    if (ok) return true;
  }
  return false;
}

}  // namespace testutil
