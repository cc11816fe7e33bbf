// CNF construction and satisfiability solving: an internal conflict-driven
// solver plus a DIMACS client for external solver binaries.
#pragma once

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "resynth/errors.hpp"

namespace resynth {

// ==========================================================================
// CNF builder
//
// Variables are positive integers, literals are signed. The name registry is
// for diagnostics only; encodings register their variables so instances can
// be inspected by name.
// ==========================================================================

class CnfBuilder {
 public:
  int num_vars() const { return num_vars_; }
  const std::vector<std::vector<int>>& clauses() const { return clauses_; }

  int fresh_var() { return ++num_vars_; }

  int fresh_var(const std::string& name) {
    int v = fresh_var();
    names_.emplace(name, v);
    return v;
  }

  std::optional<int> named_var(const std::string& name) const {
    auto it = names_.find(name);
    if (it == names_.end()) return std::nullopt;
    return it->second;
  }

  void add_clause(std::vector<int> lits) {
    if (lits.empty()) throw std::invalid_argument("empty clause");
    std::sort(lits.begin(), lits.end(), [](int a, int b) {
      int va = std::abs(a), vb = std::abs(b);
      return va != vb ? va < vb : a < b;
    });
    std::vector<int> unique;
    for (int lit : lits) {
      if (lit == 0 || std::abs(lit) > num_vars_)
        throw std::invalid_argument("literal outside the declared variables");
      if (!unique.empty() && unique.back() == lit) continue;
      if (!unique.empty() && unique.back() == -lit) return;  // tautology
      unique.push_back(lit);
    }
    clauses_.push_back(std::move(unique));
  }

  void add_clause(std::initializer_list<int> lits) { add_clause(std::vector<int>(lits)); }

  // At-least-one clause plus pairwise at-most-one.
  void add_exactly_one(const std::vector<int>& lits) {
    if (lits.empty()) throw std::invalid_argument("exactly-one over an empty literal list");
    add_clause(lits);
    for (std::size_t i = 0; i < lits.size(); ++i)
      for (std::size_t j = i + 1; j < lits.size(); ++j)
        add_clause({-lits[i], -lits[j]});
  }

  std::string to_dimacs() const {
    std::ostringstream out;
    out << "p cnf " << num_vars_ << " " << clauses_.size() << "\n";
    for (const auto& clause : clauses_) {
      for (int lit : clause) out << lit << " ";
      out << "0\n";
    }
    return out.str();
  }

 private:
  int num_vars_ = 0;
  std::vector<std::vector<int>> clauses_;
  std::unordered_map<std::string, int> names_;
};

struct SatResult {
  bool sat = false;
  // Indexed by variable, entry 0 unused.
  std::vector<bool> model;
};

struct SolveOptions {
  // Path of an external solver binary; empty selects the internal solver.
  std::string external_solver;
  std::optional<std::chrono::steady_clock::time_point> deadline;
};

// ==========================================================================
// Internal solver
//
// Conflict-driven clause learning over two-watched-literal propagation,
// first-UIP learning, activity-ordered decisions with phase saving, and
// Luby-scheduled restarts. Everything is deterministic.
// ==========================================================================

namespace detail {

class CdclSolver {
 public:
  CdclSolver(const CnfBuilder& builder,
             std::optional<std::chrono::steady_clock::time_point> deadline)
      : num_vars_(builder.num_vars()), deadline_(deadline) {
    value_.assign(num_vars_, kUndef);
    level_.assign(num_vars_, 0);
    reason_.assign(num_vars_, -1);
    activity_.assign(num_vars_, 0.0);
    phase_.assign(num_vars_, 0);
    seen_.assign(num_vars_, 0);
    watches_.assign(2 * static_cast<std::size_t>(num_vars_), {});
    for (const auto& clause : builder.clauses()) {
      std::vector<int> lits;
      lits.reserve(clause.size());
      for (int lit : clause) lits.push_back(to_internal(lit));
      if (!add_input_clause(std::move(lits))) {
        unsat_at_input_ = true;
        return;
      }
    }
    first_learned_ = static_cast<int>(clauses_.size());
  }

  SatResult run() {
    SatResult result;
    check_deadline();
    if (unsat_at_input_) return result;
    std::int64_t conflicts_until_restart = restart_interval();
    while (true) {
      int confl = propagate();
      if (confl != -1) {
        ++conflicts_;
        if ((conflicts_ & 1023) == 0) check_deadline();
        if (current_level_ == 0) return result;
        std::vector<int> learned;
        int backjump = 0;
        analyze(confl, learned, backjump);
        backtrack(backjump);
        attach_learned(learned);
        decay_activities();
        if (--conflicts_until_restart <= 0) {
          ++restarts_;
          conflicts_until_restart = restart_interval();
          backtrack(0);
          maybe_reduce_db();
        }
      } else {
        if (trail_.size() == static_cast<std::size_t>(num_vars_)) {
          result.sat = true;
          result.model.assign(static_cast<std::size_t>(num_vars_) + 1, false);
          for (int v = 0; v < num_vars_; ++v)
            result.model[static_cast<std::size_t>(v) + 1] = value_[v] == kTrue;
          return result;
        }
        int var = pick_branch_var();
        ++current_level_;
        level_marks_.push_back(static_cast<int>(trail_.size()));
        enqueue(phase_[var] ? 2 * var : 2 * var + 1, -1);
      }
    }
  }

 private:
  static constexpr std::uint8_t kTrue = 1;
  static constexpr std::uint8_t kFalse = 0;
  static constexpr std::uint8_t kUndef = 2;

  static int to_internal(int lit) {
    int v = std::abs(lit) - 1;
    return lit > 0 ? 2 * v : 2 * v + 1;
  }

  static int var_of(int l) { return l >> 1; }
  static bool sign_of(int l) { return l & 1; }

  std::uint8_t lit_value(int l) const {
    std::uint8_t v = value_[var_of(l)];
    if (v == kUndef) return kUndef;
    return v ^ static_cast<std::uint8_t>(l & 1);
  }

  // Returns false on an immediate input-level contradiction.
  bool add_input_clause(std::vector<int> lits) {
    if (lits.size() == 1) {
      std::uint8_t v = lit_value(lits[0]);
      if (v == kFalse) return false;
      if (v == kUndef) enqueue(lits[0], -1);
      return true;
    }
    int id = static_cast<int>(clauses_.size());
    watches_[static_cast<std::size_t>(lits[0] ^ 1)].push_back(id);
    watches_[static_cast<std::size_t>(lits[1] ^ 1)].push_back(id);
    clauses_.push_back(std::move(lits));
    return true;
  }

  void attach_learned(std::vector<int>& learned) {
    if (learned.size() == 1) {
      enqueue(learned[0], -1);
      return;
    }
    int id = static_cast<int>(clauses_.size());
    watches_[static_cast<std::size_t>(learned[0] ^ 1)].push_back(id);
    watches_[static_cast<std::size_t>(learned[1] ^ 1)].push_back(id);
    clauses_.push_back(learned);
    enqueue(learned[0], id);
  }

  void enqueue(int l, int reason) {
    value_[var_of(l)] = sign_of(l) ? kFalse : kTrue;
    level_[var_of(l)] = current_level_;
    reason_[var_of(l)] = reason;
    trail_.push_back(l);
  }

  // Returns the index of a conflicting clause, or -1. Clauses watching a
  // literal are registered under its negation, so the list at p holds the
  // clauses whose watch p falsified.
  int propagate() {
    while (qhead_ < trail_.size()) {
      int p = trail_[qhead_++];
      int false_lit = p ^ 1;
      auto& watch_list = watches_[static_cast<std::size_t>(p)];
      std::size_t keep = 0;
      for (std::size_t i = 0; i < watch_list.size(); ++i) {
        int id = watch_list[i];
        auto& c = clauses_[static_cast<std::size_t>(id)];
        if (c[0] == false_lit) std::swap(c[0], c[1]);
        if (lit_value(c[0]) == kTrue) {
          watch_list[keep++] = id;
          continue;
        }
        bool moved = false;
        for (std::size_t k = 2; k < c.size(); ++k) {
          if (lit_value(c[k]) != kFalse) {
            std::swap(c[1], c[k]);
            watches_[static_cast<std::size_t>(c[1] ^ 1)].push_back(id);
            moved = true;
            break;
          }
        }
        if (moved) continue;
        if (lit_value(c[0]) == kFalse) {
          for (; i < watch_list.size(); ++i) watch_list[keep++] = watch_list[i];
          watch_list.resize(keep);
          return id;
        }
        enqueue(c[0], id);
        watch_list[keep++] = id;
      }
      watch_list.resize(keep);
    }
    return -1;
  }

  // First unique implication point learning.
  void analyze(int confl, std::vector<int>& learned, int& backjump) {
    learned.clear();
    learned.push_back(0);  // slot for the asserting literal
    int counter = 0;
    int p = -1;
    std::size_t index = trail_.size();
    int clause = confl;
    while (true) {
      const auto& c = clauses_[static_cast<std::size_t>(clause)];
      for (std::size_t k = (p == -1 ? 0 : 1); k < c.size(); ++k) {
        int q = c[k];
        int v = var_of(q);
        if (seen_[v] || level_[v] == 0) continue;
        seen_[v] = 1;
        bump_activity(v);
        if (level_[v] == current_level_) {
          ++counter;
        } else {
          learned.push_back(q);
        }
      }
      while (!seen_[var_of(trail_[index - 1])]) --index;
      p = trail_[--index];
      seen_[var_of(p)] = 0;
      if (--counter == 0) break;
      clause = reason_[var_of(p)];
    }
    learned[0] = p ^ 1;
    // A non-asserting literal whose reason is covered by the rest of the
    // clause (or by root-level facts) is implied and can be dropped.
    std::vector<int> pre_minimization(learned.begin() + 1, learned.end());
    std::size_t kept = 1;
    for (std::size_t i = 1; i < learned.size(); ++i) {
      int v = var_of(learned[i]);
      int reason = reason_[v];
      bool redundant = reason != -1;
      if (redundant) {
        const auto& c = clauses_[static_cast<std::size_t>(reason)];
        for (std::size_t k = 1; k < c.size(); ++k) {
          int rv = var_of(c[k]);
          if (!seen_[rv] && level_[rv] != 0) {
            redundant = false;
            break;
          }
        }
      }
      if (!redundant) learned[kept++] = learned[i];
    }
    learned.resize(kept);
    backjump = 0;
    std::size_t max_pos = 1;
    for (std::size_t i = 1; i < learned.size(); ++i) {
      int lvl = level_[var_of(learned[i])];
      if (lvl > backjump) {
        backjump = lvl;
        max_pos = i;
      }
    }
    // The second watch must sit at the backjump level so the clause wakes up
    // exactly when it becomes unit again.
    if (learned.size() > 1) std::swap(learned[1], learned[max_pos]);
    for (int lit : pre_minimization) seen_[var_of(lit)] = 0;
  }

  void backtrack(int target_level) {
    if (current_level_ <= target_level) return;
    int mark = level_marks_[static_cast<std::size_t>(target_level)];
    for (std::size_t i = trail_.size(); i-- > static_cast<std::size_t>(mark);) {
      int v = var_of(trail_[i]);
      phase_[v] = value_[v] == kTrue;
      value_[v] = kUndef;
      reason_[v] = -1;
      heap_push(v);
    }
    trail_.resize(static_cast<std::size_t>(mark));
    level_marks_.resize(static_cast<std::size_t>(target_level));
    qhead_ = trail_.size();
    current_level_ = target_level;
  }

  struct HeapLess {
    bool operator()(const std::pair<double, int>& a, const std::pair<double, int>& b) const {
      if (a.first != b.first) return a.first < b.first;
      return a.second > b.second;  // smaller variable index wins ties
    }
  };

  void heap_push(int v) {
    heap_.push_back({activity_[v], v});
    std::push_heap(heap_.begin(), heap_.end(), HeapLess{});
  }

  // Lazy deletion: entries whose activity is stale or whose variable is
  // already assigned are skipped; a rebuild refills the heap if it drains.
  int pick_branch_var() {
    while (true) {
      if (heap_.empty()) {
        for (int v = 0; v < num_vars_; ++v)
          if (value_[v] == kUndef) heap_.push_back({activity_[v], v});
        std::make_heap(heap_.begin(), heap_.end(), HeapLess{});
      }
      std::pop_heap(heap_.begin(), heap_.end(), HeapLess{});
      auto [act, var] = heap_.back();
      heap_.pop_back();
      if (value_[var] == kUndef && act == activity_[var]) return var;
    }
  }

  void bump_activity(int v) {
    activity_[v] += activity_inc_;
    if (activity_[v] > 1e100) {
      for (double& a : activity_) a *= 1e-100;
      activity_inc_ *= 1e-100;
      heap_.clear();
    }
  }

  void decay_activities() { activity_inc_ *= (1.0 / 0.95); }

  std::int64_t restart_interval() const { return 128 * luby(restarts_ + 1); }

  static std::int64_t luby(std::int64_t i) {
    std::int64_t k = 1;
    while ((1ll << (k + 1)) - 1 <= i) ++k;
    while (i != (1ll << k) - 1) {
      i -= (1ll << k) - 1;
      k = 1;
      while ((1ll << (k + 1)) - 1 <= i) ++k;
    }
    return 1ll << (k - 1);
  }

  // At restart depth zero, drop the longest learned clauses once the
  // database has grown large. Short clauses and the originals are kept.
  void maybe_reduce_db() {
    std::size_t learned_count = clauses_.size() - static_cast<std::size_t>(first_learned_);
    if (learned_count < 20000) return;
    std::vector<std::vector<int>> kept;
    kept.reserve(clauses_.size());
    for (std::size_t i = 0; i < static_cast<std::size_t>(first_learned_); ++i)
      kept.push_back(std::move(clauses_[i]));
    std::vector<std::size_t> order;
    for (std::size_t i = static_cast<std::size_t>(first_learned_); i < clauses_.size(); ++i)
      order.push_back(i);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return clauses_[a].size() < clauses_[b].size();
    });
    std::size_t keep_count = learned_count / 2;
    for (std::size_t i = 0; i < order.size(); ++i) {
      if (clauses_[order[i]].size() <= 3 || i < keep_count)
        kept.push_back(std::move(clauses_[order[i]]));
    }
    clauses_ = std::move(kept);
    for (auto& wl : watches_) wl.clear();
    for (std::size_t id = 0; id < clauses_.size(); ++id) {
      auto& c = clauses_[id];
      watches_[static_cast<std::size_t>(c[0] ^ 1)].push_back(static_cast<int>(id));
      watches_[static_cast<std::size_t>(c[1] ^ 1)].push_back(static_cast<int>(id));
    }
    // Clause ids moved; level-zero assignments never have their reasons
    // examined, so dropping them is safe.
    for (int v = 0; v < num_vars_; ++v) reason_[v] = -1;
    qhead_ = 0;
  }

  void check_deadline() const {
    if (deadline_ && std::chrono::steady_clock::now() > *deadline_)
      throw ResourceError("solver deadline exceeded");
  }

  int num_vars_;
  std::optional<std::chrono::steady_clock::time_point> deadline_;
  bool unsat_at_input_ = false;

  std::vector<std::vector<int>> clauses_;
  std::vector<std::vector<int>> watches_;
  std::vector<std::uint8_t> value_;
  std::vector<int> level_;
  std::vector<int> reason_;
  std::vector<int> trail_;
  std::size_t qhead_ = 0;
  std::vector<int> level_marks_;
  int current_level_ = 0;

  std::vector<double> activity_;
  double activity_inc_ = 1.0;
  std::vector<std::pair<double, int>> heap_;
  std::vector<std::uint8_t> seen_;
  std::vector<std::uint8_t> phase_;

  std::int64_t conflicts_ = 0;
  std::int64_t restarts_ = 0;
  int first_learned_ = 0;
};

// ==========================================================================
// External solver client
// ==========================================================================

inline SatResult parse_solver_output(const std::string& text, int num_vars) {
  SatResult result;
  bool verdict_seen = false;
  std::istringstream in(text);
  std::string line;
  std::vector<int> lits;
  while (std::getline(in, line)) {
    if (line.rfind("s ", 0) == 0) {
      std::string verdict = line.substr(2);
      while (!verdict.empty() && std::isspace(static_cast<unsigned char>(verdict.back())))
        verdict.pop_back();
      if (verdict == "SATISFIABLE") {
        result.sat = true;
        verdict_seen = true;
      } else if (verdict == "UNSATISFIABLE") {
        result.sat = false;
        verdict_seen = true;
      } else {
        throw SolverError("unrecognized solver verdict: '" + verdict + "'");
      }
    } else if (line.rfind("v", 0) == 0 && (line.size() == 1 || line[1] == ' ')) {
      std::istringstream vs(line.substr(1));
      int lit = 0;
      while (vs >> lit) {
        if (lit != 0) lits.push_back(lit);
      }
    }
  }
  if (!verdict_seen) throw SolverError("external solver produced no verdict line");
  if (result.sat) {
    result.model.assign(static_cast<std::size_t>(num_vars) + 1, false);
    for (int lit : lits) {
      int v = std::abs(lit);
      if (v >= 1 && v <= num_vars) result.model[static_cast<std::size_t>(v)] = lit > 0;
    }
  }
  return result;
}

inline SatResult solve_external(const CnfBuilder& builder, const std::string& solver_path) {
  namespace fs = std::filesystem;
  static int counter = 0;
  std::string stem = "resynth-" + std::to_string(static_cast<long>(::getpid())) + "-" +
                     std::to_string(counter++);
  fs::path cnf_path = fs::temp_directory_path() / (stem + ".cnf");
  fs::path out_path = fs::temp_directory_path() / (stem + ".out");
  {
    std::ofstream out(cnf_path);
    if (!out) throw SolverError("cannot write DIMACS file " + cnf_path.string());
    out << builder.to_dimacs();
  }
  std::string command = "\"" + solver_path + "\" \"" + cnf_path.string() + "\" > \"" +
                        out_path.string() + "\" 2>/dev/null";
  // Solver exit codes are conventionally nonzero (10 sat, 20 unsat); the
  // verdict line is authoritative.
  int rc = std::system(command.c_str());
  (void)rc;
  std::ifstream in(out_path);
  if (!in) {
    fs::remove(cnf_path);
    throw SolverError("external solver produced no output file");
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  in.close();
  fs::remove(cnf_path);
  fs::remove(out_path);
  return parse_solver_output(buffer.str(), builder.num_vars());
}

}  // namespace detail

// Checks a satisfying assignment against every clause; guards both the
// internal solver and externally produced models.
inline void validate_model(const CnfBuilder& builder, const SatResult& result) {
  if (!result.sat) return;
  for (const auto& clause : builder.clauses()) {
    bool satisfied = false;
    for (int lit : clause) {
      bool value = result.model[static_cast<std::size_t>(std::abs(lit))];
      if ((lit > 0) == value) {
        satisfied = true;
        break;
      }
    }
    if (!satisfied) throw std::logic_error("solver returned a non-model assignment");
  }
}

inline SatResult solve(const CnfBuilder& builder, const SolveOptions& options = {}) {
  SatResult result;
  if (!options.external_solver.empty()) {
    result = detail::solve_external(builder, options.external_solver);
  } else {
    detail::CdclSolver solver(builder, options.deadline);
    result = solver.run();
  }
  validate_model(builder, result);
  return result;
}

}  // namespace resynth
