// Nondeterministic Buchi automata from LTL via an on-the-fly tableau,
// counter-based degeneralization, language-preserving cleanup, lasso
// acceptance checks, run graphs against transition systems, and a restricted
// HOA import.
#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "resynth/errors.hpp"
#include "resynth/ltl.hpp"
#include "resynth/system.hpp"

namespace resynth {

inline constexpr int kDefaultAutomatonCap = 10000;

// ==========================================================================
// Automaton type
//
// Edges carry cube guards: a letter matches when it contains every
// proposition in pos and none in neg. For the universal reading (UCW) the
// accepting flags are interpreted as rejecting.
// ==========================================================================

struct BuchiAutomaton {
  AtomicAlphabet alphabet;
  int initial = 0;

  struct Edge {
    std::uint32_t pos = 0;
    std::uint32_t neg = 0;
    int dst = 0;

    auto operator<=>(const Edge&) const = default;
  };

  std::vector<std::vector<Edge>> edges;  // indexed by source state
  std::vector<std::uint8_t> accepting;

  int size() const { return static_cast<int>(accepting.size()); }

  static bool edge_matches(const Edge& e, std::uint32_t letter) {
    return (letter & e.pos) == e.pos && (letter & e.neg) == 0;
  }

  std::vector<int> successors(int state, std::uint32_t letter) const {
    std::vector<int> result;
    for (const Edge& e : edges[static_cast<std::size_t>(state)])
      if (edge_matches(e, letter)) result.push_back(e.dst);
    std::sort(result.begin(), result.end());
    result.erase(std::unique(result.begin(), result.end()), result.end());
    return result;
  }

  std::size_t edge_count() const {
    std::size_t n = 0;
    for (const auto& list : edges) n += list.size();
    return n;
  }
};

// ==========================================================================
// Tableau construction
// ==========================================================================

namespace detail {

// Collects every Until subformula; these drive the generalized acceptance.
inline void collect_untils(const LtlFactory& f, FormulaId id, std::set<FormulaId>& untils,
                           std::set<FormulaId>& visited) {
  if (!visited.insert(id).second) return;
  switch (f.kind(id)) {
    case LtlKind::Until:
      untils.insert(id);
      collect_untils(f, f.lhs(id), untils, visited);
      collect_untils(f, f.rhs(id), untils, visited);
      break;
    case LtlKind::And:
    case LtlKind::Or:
    case LtlKind::Release:
      collect_untils(f, f.lhs(id), untils, visited);
      collect_untils(f, f.rhs(id), untils, visited);
      break;
    case LtlKind::Not:
    case LtlKind::Next:
      collect_untils(f, f.lhs(id), untils, visited);
      break;
    default:
      break;
  }
}

// Tableau expansion over formulas in negation normal form. Nodes hold the
// obligations already honored at the current position (olds) and the ones
// deferred to the successor (nexts); nodes agreeing on both are merged.
class TableauBuilder {
 public:
  TableauBuilder(LtlFactory& f, int cap) : f_(f), cap_(cap) {}

  struct Node {
    std::set<FormulaId> olds;
    std::set<FormulaId> nexts;
    std::vector<int> incoming;  // node ids, -1 for the initial state
  };

  // Runs the expansion and returns the completed node list.
  const std::vector<Node>& build(FormulaId phi) {
    Pending root;
    root.incoming = {-1};
    root.news.insert(phi);
    expand(std::move(root));
    return nodes_;
  }

 private:
  struct Pending {
    std::set<FormulaId> news;
    std::set<FormulaId> olds;
    std::set<FormulaId> nexts;
    std::vector<int> incoming;
  };

  void expand(Pending q) {
    if (q.news.empty()) {
      for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (nodes_[i].olds == q.olds && nodes_[i].nexts == q.nexts) {
          auto& in = nodes_[i].incoming;
          in.insert(in.end(), q.incoming.begin(), q.incoming.end());
          return;
        }
      }
      if (static_cast<int>(nodes_.size()) >= cap_)
        throw ResourceError("automaton construction exceeded the state cap");
      int id = static_cast<int>(nodes_.size());
      nodes_.push_back(Node{q.olds, q.nexts, q.incoming});
      Pending succ;
      succ.news = q.nexts;
      succ.incoming = {id};
      expand(std::move(succ));
      return;
    }
    FormulaId eta = *q.news.begin();
    q.news.erase(q.news.begin());
    switch (f_.kind(eta)) {
      case LtlKind::True:
        // Recorded like any processed obligation: the acceptance test reads
        // fulfillment of an until off the presence of its right side.
        q.olds.insert(eta);
        expand(std::move(q));
        return;
      case LtlKind::False:
        return;  // contradiction, drop the branch
      case LtlKind::Atom:
      case LtlKind::Not: {
        FormulaId complement = f_.kind(eta) == LtlKind::Atom
                                   ? find_negation(eta)
                                   : f_.lhs(eta);
        if (complement != kInvalidFormula && q.olds.count(complement)) return;
        q.olds.insert(eta);
        expand(std::move(q));
        return;
      }
      case LtlKind::And: {
        q.olds.insert(eta);
        push_new(q, f_.lhs(eta));
        push_new(q, f_.rhs(eta));
        expand(std::move(q));
        return;
      }
      case LtlKind::Or: {
        q.olds.insert(eta);
        Pending q2 = q;
        push_new(q, f_.lhs(eta));
        push_new(q2, f_.rhs(eta));
        expand(std::move(q));
        expand(std::move(q2));
        return;
      }
      case LtlKind::Next: {
        q.olds.insert(eta);
        q.nexts.insert(f_.lhs(eta));
        expand(std::move(q));
        return;
      }
      case LtlKind::Until: {
        q.olds.insert(eta);
        Pending q2 = q;
        push_new(q, f_.lhs(eta));
        q.nexts.insert(eta);
        push_new(q2, f_.rhs(eta));
        expand(std::move(q));
        expand(std::move(q2));
        return;
      }
      case LtlKind::Release: {
        q.olds.insert(eta);
        Pending q2 = q;
        push_new(q, f_.rhs(eta));
        q.nexts.insert(eta);
        push_new(q2, f_.lhs(eta));
        push_new(q2, f_.rhs(eta));
        expand(std::move(q));
        expand(std::move(q2));
        return;
      }
      default:
        throw std::logic_error("tableau expansion expects negation normal form");
    }
  }

  void push_new(Pending& q, FormulaId id) {
    if (!q.olds.count(id)) q.news.insert(id);
  }

  FormulaId find_negation(FormulaId atom) {
    auto it = negation_cache_.find(atom);
    if (it != negation_cache_.end()) return it->second;
    FormulaId neg = f_.lnot(atom);
    negation_cache_.emplace(atom, neg);
    return neg;
  }

  LtlFactory& f_;
  int cap_;
  std::vector<Node> nodes_;
  std::map<FormulaId, FormulaId> negation_cache_;
};

// Guard cube over the literals a tableau node asserts about the current
// letter.
inline BuchiAutomaton::Edge guard_of_olds(const LtlFactory& f,
                                          const std::set<FormulaId>& olds, int dst) {
  BuchiAutomaton::Edge e;
  e.dst = dst;
  for (FormulaId id : olds) {
    if (f.kind(id) == LtlKind::Atom) {
      e.pos |= 1u << f.atom_index(id);
    } else if (f.kind(id) == LtlKind::Not && f.kind(f.lhs(id)) == LtlKind::Atom) {
      e.neg |= 1u << f.atom_index(f.lhs(id));
    }
  }
  return e;
}

// Restriction to states reachable from the initial state that can still
// reach an accepting cycle; the initial state survives unconditionally.
inline BuchiAutomaton trim_automaton(const BuchiAutomaton& a) {
  int m = a.size();
  std::vector<std::uint8_t> reachable(static_cast<std::size_t>(m), 0);
  std::vector<int> stack = {a.initial};
  reachable[static_cast<std::size_t>(a.initial)] = 1;
  while (!stack.empty()) {
    int q = stack.back();
    stack.pop_back();
    for (const auto& e : a.edges[static_cast<std::size_t>(q)]) {
      if (!reachable[static_cast<std::size_t>(e.dst)]) {
        reachable[static_cast<std::size_t>(e.dst)] = 1;
        stack.push_back(e.dst);
      }
    }
  }
  // An accepting state is live when it lies on a cycle.
  std::vector<std::uint8_t> live(static_cast<std::size_t>(m), 0);
  for (int f = 0; f < m; ++f) {
    if (!a.accepting[static_cast<std::size_t>(f)] || !reachable[static_cast<std::size_t>(f)])
      continue;
    std::vector<std::uint8_t> seen(static_cast<std::size_t>(m), 0);
    std::vector<int> dfs;
    for (const auto& e : a.edges[static_cast<std::size_t>(f)])
      if (!seen[static_cast<std::size_t>(e.dst)]) {
        seen[static_cast<std::size_t>(e.dst)] = 1;
        dfs.push_back(e.dst);
      }
    while (!dfs.empty()) {
      int q = dfs.back();
      dfs.pop_back();
      if (q == f) {
        live[static_cast<std::size_t>(f)] = 1;
        break;
      }
      for (const auto& e : a.edges[static_cast<std::size_t>(q)])
        if (!seen[static_cast<std::size_t>(e.dst)]) {
          seen[static_cast<std::size_t>(e.dst)] = 1;
          dfs.push_back(e.dst);
        }
    }
  }
  // Useful states reach a live accepting state.
  std::vector<std::vector<int>> reverse(static_cast<std::size_t>(m));
  for (int q = 0; q < m; ++q)
    for (const auto& e : a.edges[static_cast<std::size_t>(q)])
      reverse[static_cast<std::size_t>(e.dst)].push_back(q);
  std::vector<std::uint8_t> useful(static_cast<std::size_t>(m), 0);
  for (int f = 0; f < m; ++f)
    if (live[static_cast<std::size_t>(f)]) {
      useful[static_cast<std::size_t>(f)] = 1;
      stack.push_back(f);
    }
  while (!stack.empty()) {
    int q = stack.back();
    stack.pop_back();
    for (int p : reverse[static_cast<std::size_t>(q)])
      if (!useful[static_cast<std::size_t>(p)]) {
        useful[static_cast<std::size_t>(p)] = 1;
        stack.push_back(p);
      }
  }
  std::vector<int> remap(static_cast<std::size_t>(m), -1);
  BuchiAutomaton out;
  out.alphabet = a.alphabet;
  for (int q = 0; q < m; ++q) {
    bool keep = q == a.initial ||
                (reachable[static_cast<std::size_t>(q)] && useful[static_cast<std::size_t>(q)]);
    if (!keep) continue;
    remap[static_cast<std::size_t>(q)] = out.size();
    out.accepting.push_back(a.accepting[static_cast<std::size_t>(q)]);
    out.edges.emplace_back();
  }
  out.initial = remap[static_cast<std::size_t>(a.initial)];
  for (int q = 0; q < m; ++q) {
    if (remap[static_cast<std::size_t>(q)] < 0) continue;
    auto& list = out.edges[static_cast<std::size_t>(remap[static_cast<std::size_t>(q)])];
    for (const auto& e : a.edges[static_cast<std::size_t>(q)]) {
      int dst = remap[static_cast<std::size_t>(e.dst)];
      if (dst < 0) continue;
      list.push_back({e.pos, e.neg, dst});
    }
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
  return out;
}

// Iteratively merges states with identical acceptance and identical edge
// sets, keeping only one representative per class, then re-trims the
// reachable part. Each merging round shrinks the automaton, so this ends.
inline BuchiAutomaton dedup_states(const BuchiAutomaton& a) {
  BuchiAutomaton cur = a;
  while (true) {
    std::map<std::pair<std::uint8_t, std::vector<BuchiAutomaton::Edge>>, int> groups;
    std::vector<int> rep(static_cast<std::size_t>(cur.size()));
    bool merged = false;
    for (int q = 0; q < cur.size(); ++q) {
      auto key = std::make_pair(cur.accepting[static_cast<std::size_t>(q)],
                                cur.edges[static_cast<std::size_t>(q)]);
      auto [it, inserted] = groups.emplace(std::move(key), q);
      rep[static_cast<std::size_t>(q)] = it->second;
      if (!inserted) merged = true;
    }
    if (!merged) return trim_automaton(cur);
    std::vector<int> remap(static_cast<std::size_t>(cur.size()), -1);
    BuchiAutomaton next;
    next.alphabet = cur.alphabet;
    for (int q = 0; q < cur.size(); ++q) {
      if (rep[static_cast<std::size_t>(q)] != q) continue;
      remap[static_cast<std::size_t>(q)] = next.size();
      next.accepting.push_back(cur.accepting[static_cast<std::size_t>(q)]);
      next.edges.push_back(cur.edges[static_cast<std::size_t>(q)]);
    }
    for (auto& list : next.edges) {
      for (auto& e : list)
        e.dst = remap[static_cast<std::size_t>(rep[static_cast<std::size_t>(e.dst)])];
      std::sort(list.begin(), list.end());
      list.erase(std::unique(list.begin(), list.end()), list.end());
    }
    next.initial = remap[static_cast<std::size_t>(rep[static_cast<std::size_t>(cur.initial)])];
    cur = std::move(next);
  }
}

// Tableau plus degeneralization for one formula in negation normal form.
inline BuchiAutomaton tableau_automaton(LtlFactory& f, FormulaId phi, int cap) {
  TableauBuilder builder(f, cap);
  const auto& nodes = builder.build(phi);

  std::set<FormulaId> untils;
  std::set<FormulaId> visited;
  collect_untils(f, phi, untils, visited);
  std::vector<FormulaId> until_list(untils.begin(), untils.end());
  int k = static_cast<int>(until_list.size());

  // Generalized automaton: state 0 is a fresh initial state, node i becomes
  // state i+1. Edges into a node carry the node's literal guard.
  int gba_size = static_cast<int>(nodes.size()) + 1;
  std::vector<std::vector<BuchiAutomaton::Edge>> gba_edges(
      static_cast<std::size_t>(gba_size));
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    BuchiAutomaton::Edge guard = guard_of_olds(f, nodes[i].olds, static_cast<int>(i) + 1);
    for (int pred : nodes[i].incoming) {
      int src = pred < 0 ? 0 : pred + 1;
      gba_edges[static_cast<std::size_t>(src)].push_back(guard);
    }
  }
  // membership[i][u]: node state i+1 satisfies acceptance set u, meaning the
  // until is either not pending or just fulfilled. The fresh initial state
  // counts as unfulfilled; it is visited once, so acceptance is unaffected.
  auto in_set = [&](int state, int u) {
    if (state == 0) return false;
    const auto& olds = nodes[static_cast<std::size_t>(state - 1)].olds;
    FormulaId until = until_list[static_cast<std::size_t>(u)];
    return olds.count(until) == 0 || olds.count(f.rhs(until)) > 0;
  };

  BuchiAutomaton out;
  out.alphabet = f.alphabet();
  if (k == 0) {
    out.initial = 0;
    out.edges = std::move(gba_edges);
    out.accepting.assign(static_cast<std::size_t>(gba_size), 1);
    for (auto& list : out.edges) {
      std::sort(list.begin(), list.end());
      list.erase(std::unique(list.begin(), list.end()), list.end());
    }
    return dedup_states(out);
  }

  // Counter degeneralization: track which acceptance set is owed next; a
  // state of the final layer that satisfies the last set is accepting.
  std::map<std::pair<int, int>, int> index;  // (gba state, layer) -> id
  std::vector<std::pair<int, int>> worklist;
  auto intern = [&](int state, int layer) {
    auto key = std::make_pair(state, layer);
    auto it = index.find(key);
    if (it != index.end()) return it->second;
    if (static_cast<int>(out.accepting.size()) >= cap)
      throw ResourceError("automaton construction exceeded the state cap");
    int id = static_cast<int>(out.accepting.size());
    index.emplace(key, id);
    out.accepting.push_back(layer == k && in_set(state, k - 1) ? 1 : 0);
    out.edges.emplace_back();
    worklist.push_back(key);
    return id;
  };
  out.initial = intern(0, 1);
  while (!worklist.empty()) {
    auto [state, layer] = worklist.back();
    worklist.pop_back();
    int id = index.at({state, layer});
    int next_layer = in_set(state, layer - 1) ? layer % k + 1 : layer;
    for (const auto& e : gba_edges[static_cast<std::size_t>(state)]) {
      int dst = intern(e.dst, next_layer);
      out.edges[static_cast<std::size_t>(id)].push_back({e.pos, e.neg, dst});
    }
  }
  for (auto& list : out.edges) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
  return dedup_states(out);
}

inline void flatten_or(const LtlFactory& f, FormulaId id, std::vector<FormulaId>& parts) {
  if (f.kind(id) == LtlKind::Or) {
    flatten_or(f, f.lhs(id), parts);
    flatten_or(f, f.rhs(id), parts);
  } else {
    parts.push_back(id);
  }
}

// Language union: a fresh initial state copies every component initial's
// outgoing edges; components are otherwise kept disjoint.
inline BuchiAutomaton union_automata(const AtomicAlphabet& alphabet,
                                     const std::vector<BuchiAutomaton>& parts) {
  BuchiAutomaton out;
  out.alphabet = alphabet;
  out.initial = 0;
  out.accepting.push_back(0);
  out.edges.emplace_back();
  for (const BuchiAutomaton& part : parts) {
    int offset = out.size();
    for (int q = 0; q < part.size(); ++q) {
      out.accepting.push_back(part.accepting[static_cast<std::size_t>(q)]);
      out.edges.emplace_back();
      for (const auto& e : part.edges[static_cast<std::size_t>(q)])
        out.edges.back().push_back({e.pos, e.neg, e.dst + offset});
    }
    for (const auto& e : part.edges[static_cast<std::size_t>(part.initial)])
      out.edges[0].push_back({e.pos, e.neg, e.dst + offset});
  }
  std::sort(out.edges[0].begin(), out.edges[0].end());
  out.edges[0].erase(std::unique(out.edges[0].begin(), out.edges[0].end()),
                     out.edges[0].end());
  return out;
}

}  // namespace detail

// ==========================================================================
// LTL to automata
// ==========================================================================

// Buchi automaton for the language of phi. Top-level disjuncts are compiled
// separately and united, which keeps the per-conjunct automata of negated
// conjunction specs small.
inline BuchiAutomaton ltl_to_nba(LtlFactory& f, FormulaId phi,
                                 int cap = kDefaultAutomatonCap) {
  FormulaId nnf = to_nnf(f, phi);
  std::vector<FormulaId> disjuncts;
  detail::flatten_or(f, nnf, disjuncts);
  if (disjuncts.size() == 1) return detail::tableau_automaton(f, nnf, cap);
  std::vector<BuchiAutomaton> parts;
  parts.reserve(disjuncts.size());
  for (FormulaId d : disjuncts) parts.push_back(detail::tableau_automaton(f, d, cap));
  BuchiAutomaton merged = detail::union_automata(f.alphabet(), parts);
  if (merged.size() > cap)
    throw ResourceError("automaton construction exceeded the state cap");
  return detail::dedup_states(merged);
}

// Universal co-Buchi view for checking phi: the automaton of the negation,
// with accepting states read as rejecting. A system satisfies phi iff no run
// of its traces visits a rejecting state infinitely often.
inline BuchiAutomaton ucw_for(LtlFactory& f, FormulaId phi,
                              int cap = kDefaultAutomatonCap) {
  return ltl_to_nba(f, negate_nnf(f, phi), cap);
}

// ==========================================================================
// Lasso acceptance
// ==========================================================================

// Whether the automaton accepts prefix . loop^omega: a reachable cycle in
// the position/state product that carries an accepting state.
inline bool accepts_lasso(const BuchiAutomaton& a, const LassoWord& w) {
  if (w.loop.empty()) throw std::invalid_argument("lasso loop must be non-empty");
  std::size_t positions = w.prefix.size() + w.loop.size();
  auto letter_at = [&](std::size_t pos) {
    return pos < w.prefix.size() ? w.prefix[pos] : w.loop[pos - w.prefix.size()];
  };
  auto succ_pos = [&](std::size_t pos) {
    return pos + 1 < positions ? pos + 1 : w.prefix.size();
  };
  std::size_t m = static_cast<std::size_t>(a.size());
  std::vector<std::uint8_t> reached(positions * m, 0);
  std::vector<std::pair<std::size_t, int>> stack;
  auto visit = [&](std::size_t pos, int q) {
    std::size_t id = pos * m + static_cast<std::size_t>(q);
    if (!reached[id]) {
      reached[id] = 1;
      stack.push_back({pos, q});
    }
  };
  visit(0, a.initial);
  while (!stack.empty()) {
    auto [pos, q] = stack.back();
    stack.pop_back();
    for (const auto& e : a.edges[static_cast<std::size_t>(q)])
      if (BuchiAutomaton::edge_matches(e, letter_at(pos))) visit(succ_pos(pos), e.dst);
  }
  // A cycle through a reachable accepting product vertex: search from each
  // accepting vertex back to itself.
  for (std::size_t pos = 0; pos < positions; ++pos) {
    for (int q = 0; q < a.size(); ++q) {
      if (!a.accepting[static_cast<std::size_t>(q)]) continue;
      if (!reached[pos * m + static_cast<std::size_t>(q)]) continue;
      std::vector<std::uint8_t> seen(positions * m, 0);
      std::vector<std::pair<std::size_t, int>> dfs;
      auto push = [&](std::size_t p2, int q2) {
        std::size_t id = p2 * m + static_cast<std::size_t>(q2);
        if (!seen[id]) {
          seen[id] = 1;
          dfs.push_back({p2, q2});
        }
      };
      for (const auto& e : a.edges[static_cast<std::size_t>(q)])
        if (BuchiAutomaton::edge_matches(e, letter_at(pos))) push(succ_pos(pos), e.dst);
      bool found = false;
      while (!dfs.empty() && !found) {
        auto [p2, q2] = dfs.back();
        dfs.pop_back();
        if (p2 == pos && q2 == q) {
          found = true;
          break;
        }
        for (const auto& e : a.edges[static_cast<std::size_t>(q2)])
          if (BuchiAutomaton::edge_matches(e, letter_at(p2))) push(succ_pos(p2), e.dst);
      }
      if (found) return true;
    }
  }
  return false;
}

// ==========================================================================
// Run graphs
// ==========================================================================

// Reachable product of a system and a universal automaton. Edges remember
// the input letter that induced them; rejecting vertices carry the
// automaton's flag.
struct RunGraph {
  struct Vertex {
    int sys_state = 0;
    int aut_state = 0;
  };

  struct Edge {
    std::uint32_t input = 0;
    int target = 0;
  };

  std::vector<Vertex> vertices;
  std::vector<std::vector<Edge>> edges;
  std::vector<std::uint8_t> rejecting;
  int root = 0;

  int size() const { return static_cast<int>(vertices.size()); }
};

inline RunGraph build_run_graph(const TransitionSystem& ts, const BuchiAutomaton& ucw) {
  if (ts.alphabet != ucw.alphabet)
    throw std::invalid_argument("system and automaton alphabets disagree");
  RunGraph rg;
  std::map<std::pair<int, int>, int> index;
  std::vector<int> worklist;
  auto intern = [&](int t, int q) {
    auto key = std::make_pair(t, q);
    auto it = index.find(key);
    if (it != index.end()) return it->second;
    int id = rg.size();
    index.emplace(key, id);
    rg.vertices.push_back({t, q});
    rg.edges.emplace_back();
    rg.rejecting.push_back(ucw.accepting[static_cast<std::size_t>(q)]);
    worklist.push_back(id);
    return id;
  };
  rg.root = intern(0, ucw.initial);
  while (!worklist.empty()) {
    int id = worklist.back();
    worklist.pop_back();
    auto [t, q] = std::make_pair(rg.vertices[static_cast<std::size_t>(id)].sys_state,
                                 rg.vertices[static_cast<std::size_t>(id)].aut_state);
    for (std::uint32_t i = 0; i < ts.alphabet.input_letter_count(); ++i) {
      int t2 = ts.tau[static_cast<std::size_t>(t)][i];
      std::uint32_t letter = step_letter(ts, t, i);
      for (int q2 : ucw.successors(q, letter)) {
        int target = intern(t2, q2);  // may grow the edge table
        rg.edges[static_cast<std::size_t>(id)].push_back({i, target});
      }
    }
  }
  return rg;
}

// ==========================================================================
// HOA import
//
// Restricted to explicitly labeled, state-based Buchi automata with a single
// start state; used to cross-check externally produced automata.
// ==========================================================================

namespace detail {

class HoaLabelParser {
 public:
  HoaLabelParser(const std::string& text, const std::vector<int>& ap_map)
      : text_(text), ap_map_(ap_map) {}

  // Evaluates the label expression against a full trace letter.
  bool eval(std::uint32_t letter) {
    pos_ = 0;
    letter_ = letter;
    bool v = parse_or();
    skip_space();
    if (pos_ != text_.size())
      throw std::invalid_argument("trailing input in HOA label '" + text_ + "'");
    return v;
  }

 private:
  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool parse_or() {
    bool v = parse_and();
    skip_space();
    while (pos_ < text_.size() && text_[pos_] == '|') {
      ++pos_;
      bool rhs = parse_and();
      v = v || rhs;
      skip_space();
    }
    return v;
  }

  bool parse_and() {
    bool v = parse_unary();
    skip_space();
    while (pos_ < text_.size() && text_[pos_] == '&') {
      ++pos_;
      bool rhs = parse_unary();
      v = v && rhs;
      skip_space();
    }
    return v;
  }

  bool parse_unary() {
    skip_space();
    if (pos_ >= text_.size()) throw std::invalid_argument("truncated HOA label");
    char c = text_[pos_];
    if (c == '!') {
      ++pos_;
      return !parse_unary();
    }
    if (c == '(') {
      ++pos_;
      bool v = parse_or();
      skip_space();
      if (pos_ >= text_.size() || text_[pos_] != ')')
        throw std::invalid_argument("unbalanced parenthesis in HOA label");
      ++pos_;
      return v;
    }
    if (c == 't') {
      ++pos_;
      return true;
    }
    if (c == 'f') {
      ++pos_;
      return false;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      int ap = std::stoi(text_.substr(start, pos_ - start));
      if (ap < 0 || ap >= static_cast<int>(ap_map_.size()))
        throw std::invalid_argument("HOA label references an undeclared proposition");
      return (letter_ >> ap_map_[static_cast<std::size_t>(ap)]) & 1u;
    }
    throw std::invalid_argument("unexpected character in HOA label '" + text_ + "'");
  }

  const std::string& text_;
  const std::vector<int>& ap_map_;
  std::size_t pos_ = 0;
  std::uint32_t letter_ = 0;
};

}  // namespace detail

inline BuchiAutomaton parse_hoa(const std::string& text, const AtomicAlphabet& alphabet) {
  std::istringstream in(text);
  std::string line;
  int states = -1;
  int start = -1;
  std::vector<int> ap_map;
  bool buchi = false;
  bool in_body = false;
  BuchiAutomaton out;
  out.alphabet = alphabet;
  int current = -1;

  auto strip = [](std::string s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
    return s;
  };

  while (std::getline(in, line)) {
    line = strip(line);
    if (line.empty()) continue;
    if (line == "--BODY--") {
      if (states < 0 || start < 0 || !buchi)
        throw std::invalid_argument("HOA header is missing States, Start or Buchi acceptance");
      out.accepting.assign(static_cast<std::size_t>(states), 0);
      out.edges.assign(static_cast<std::size_t>(states), {});
      out.initial = start;
      in_body = true;
      continue;
    }
    if (line == "--END--") break;
    if (!in_body) {
      if (line.rfind("States:", 0) == 0) {
        states = std::stoi(strip(line.substr(7)));
      } else if (line.rfind("Start:", 0) == 0) {
        std::string rest = strip(line.substr(6));
        if (rest.find(' ') != std::string::npos || rest.find('&') != std::string::npos)
          throw std::invalid_argument("only a single HOA start state is supported");
        if (start >= 0) throw std::invalid_argument("multiple HOA start states are not supported");
        start = std::stoi(rest);
      } else if (line.rfind("AP:", 0) == 0) {
        std::istringstream aps(line.substr(3));
        int count = 0;
        aps >> count;
        for (int i = 0; i < count; ++i) {
          std::string name;
          aps >> std::ws;
          if (aps.get() != '"') throw std::invalid_argument("HOA AP names must be quoted");
          std::getline(aps, name, '"');
          std::optional<int> index = alphabet.prop_index(name);
          if (!index)
            throw std::invalid_argument("HOA proposition '" + name + "' is not in the alphabet");
          ap_map.push_back(*index);
        }
      } else if (line.rfind("acc-name:", 0) == 0) {
        if (strip(line.substr(9)) == "Buchi") buchi = true;
      } else if (line.rfind("Acceptance:", 0) == 0) {
        std::string rest = strip(line.substr(11));
        if (rest == "1 Inf(0)") buchi = true;
      }
      continue;
    }
    if (line.rfind("State:", 0) == 0) {
      std::string rest = strip(line.substr(6));
      if (!rest.empty() && rest[0] == '[')
        throw std::invalid_argument("HOA state labels (implicit edges) are not supported");
      bool accepting = false;
      std::size_t brace = rest.find('{');
      if (brace != std::string::npos) {
        std::string sets = rest.substr(brace);
        accepting = sets.find('0') != std::string::npos;
        rest = strip(rest.substr(0, brace));
      }
      std::size_t name_quote = rest.find('"');
      if (name_quote != std::string::npos) rest = strip(rest.substr(0, name_quote));
      current = std::stoi(rest);
      if (current < 0 || current >= states)
        throw std::invalid_argument("HOA state id out of range");
      out.accepting[static_cast<std::size_t>(current)] = accepting ? 1 : 0;
      continue;
    }
    // Edge line: [label] target
    if (current < 0) throw std::invalid_argument("HOA edge before any state");
    if (line[0] != '[')
      throw std::invalid_argument("only explicitly labeled HOA edges are supported");
    std::size_t close = line.find(']');
    if (close == std::string::npos) throw std::invalid_argument("unterminated HOA label");
    std::string label = line.substr(1, close - 1);
    std::string rest = strip(line.substr(close + 1));
    if (rest.find('{') != std::string::npos)
      throw std::invalid_argument("edge-based HOA acceptance is not supported");
    int target = std::stoi(rest);
    if (target < 0 || target >= states)
      throw std::invalid_argument("HOA edge target out of range");
    detail::HoaLabelParser parser(label, ap_map);
    for (std::uint32_t letter = 0; letter < alphabet.trace_letter_count(); ++letter) {
      if (parser.eval(letter)) {
        std::uint32_t all = alphabet.trace_letter_count() - 1;
        out.edges[static_cast<std::size_t>(current)].push_back(
            {letter, all & ~letter, target});
      }
    }
  }
  if (!in_body) throw std::invalid_argument("HOA input has no body");
  for (auto& list : out.edges) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
  return out;
}

}  // namespace resynth
