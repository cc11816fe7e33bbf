// LTL model checking of transition systems through run-graph cycle analysis,
// with deterministic lasso witnesses for failures.
#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <optional>
#include <stdexcept>
#include <vector>

#include "resynth/automata.hpp"
#include "resynth/ltl.hpp"
#include "resynth/system.hpp"

namespace resynth {

enum class Verdict { Holds, Fails };

struct ModelCheckResult {
  Verdict verdict = Verdict::Holds;
  std::optional<LassoWord> witness;
};

namespace detail {

// Strongly connected components in completion order (the order their roots
// finish), computed iteratively to stay independent of stack limits.
inline std::vector<std::vector<int>> scc_components(
    const std::vector<std::vector<RunGraph::Edge>>& edges) {
  int n = static_cast<int>(edges.size());
  std::vector<int> index(static_cast<std::size_t>(n), -1);
  std::vector<int> lowlink(static_cast<std::size_t>(n), 0);
  std::vector<std::uint8_t> on_stack(static_cast<std::size_t>(n), 0);
  std::vector<int> stack;
  std::vector<std::vector<int>> components;
  int counter = 0;

  struct Frame {
    int vertex;
    std::size_t child;
  };
  std::vector<Frame> call;

  for (int s = 0; s < n; ++s) {
    if (index[static_cast<std::size_t>(s)] >= 0) continue;
    call.push_back({s, 0});
    index[static_cast<std::size_t>(s)] = lowlink[static_cast<std::size_t>(s)] = counter++;
    stack.push_back(s);
    on_stack[static_cast<std::size_t>(s)] = 1;
    while (!call.empty()) {
      Frame& frame = call.back();
      int v = frame.vertex;
      if (frame.child < edges[static_cast<std::size_t>(v)].size()) {
        int w = edges[static_cast<std::size_t>(v)][frame.child++].target;
        if (index[static_cast<std::size_t>(w)] < 0) {
          call.push_back({w, 0});
          index[static_cast<std::size_t>(w)] = lowlink[static_cast<std::size_t>(w)] = counter++;
          stack.push_back(w);
          on_stack[static_cast<std::size_t>(w)] = 1;
        } else if (on_stack[static_cast<std::size_t>(w)]) {
          lowlink[static_cast<std::size_t>(v)] =
              std::min(lowlink[static_cast<std::size_t>(v)], index[static_cast<std::size_t>(w)]);
        }
        continue;
      }
      if (lowlink[static_cast<std::size_t>(v)] == index[static_cast<std::size_t>(v)]) {
        std::vector<int> component;
        while (true) {
          int w = stack.back();
          stack.pop_back();
          on_stack[static_cast<std::size_t>(w)] = 0;
          component.push_back(w);
          if (w == v) break;
        }
        std::sort(component.begin(), component.end());
        components.push_back(std::move(component));
      }
      call.pop_back();
      if (!call.empty()) {
        int parent = call.back().vertex;
        lowlink[static_cast<std::size_t>(parent)] = std::min(
            lowlink[static_cast<std::size_t>(parent)], lowlink[static_cast<std::size_t>(v)]);
      }
    }
  }
  return components;
}

// Shortest path by breadth-first search; returns the edge sequence as
// (vertex, input) steps, or nothing when target is unreachable under the
// filter. A nonempty path is forced when from == to.
inline std::optional<std::vector<std::pair<int, std::uint32_t>>> bfs_path(
    const RunGraph& rg, int from, int to, const std::vector<std::uint8_t>* allowed) {
  int n = rg.size();
  std::vector<int> parent(static_cast<std::size_t>(n), -1);
  std::vector<std::uint32_t> via(static_cast<std::size_t>(n), 0);
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(n), 0);
  std::deque<int> queue;
  auto relax = [&](int u) {
    for (const auto& e : rg.edges[static_cast<std::size_t>(u)]) {
      if (allowed && !(*allowed)[static_cast<std::size_t>(e.target)]) continue;
      if (seen[static_cast<std::size_t>(e.target)]) continue;
      seen[static_cast<std::size_t>(e.target)] = 1;
      parent[static_cast<std::size_t>(e.target)] = u;
      via[static_cast<std::size_t>(e.target)] = e.input;
      queue.push_back(e.target);
    }
  };
  // The origin is deliberately not marked seen, so from == to asks for a
  // cycle of at least one edge.
  relax(from);
  while (!seen[static_cast<std::size_t>(to)] && !queue.empty()) {
    int u = queue.front();
    queue.pop_front();
    relax(u);
  }
  if (!seen[static_cast<std::size_t>(to)]) return std::nullopt;
  std::vector<std::pair<int, std::uint32_t>> steps;
  int cur = to;
  do {
    steps.push_back({parent[static_cast<std::size_t>(cur)], via[static_cast<std::size_t>(cur)]});
    cur = parent[static_cast<std::size_t>(cur)];
  } while (cur != from);
  std::reverse(steps.begin(), steps.end());
  return steps;
}

}  // namespace detail

// Checks whether every trace of the system satisfies phi. On failure the
// result carries a lasso trace of the system violating phi: the witness is
// rebuilt from the first rejecting component in Tarjan completion order,
// using shortest paths for the stem and the cycle.
inline ModelCheckResult model_check(LtlFactory& f, const TransitionSystem& ts, FormulaId phi,
                                    int cap = kDefaultAutomatonCap) {
  BuchiAutomaton ucw = ucw_for(f, phi, cap);
  RunGraph rg = build_run_graph(ts, ucw);
  auto components = detail::scc_components(rg.edges);

  for (const auto& component : components) {
    bool nontrivial = component.size() > 1;
    if (!nontrivial) {
      int v = component[0];
      for (const auto& e : rg.edges[static_cast<std::size_t>(v)])
        if (e.target == v) nontrivial = true;
    }
    if (!nontrivial) continue;
    int pivot = -1;
    for (int v : component)
      if (rg.rejecting[static_cast<std::size_t>(v)]) {
        pivot = v;
        break;
      }
    if (pivot < 0) continue;

    std::vector<std::uint8_t> in_component(static_cast<std::size_t>(rg.size()), 0);
    for (int v : component) in_component[static_cast<std::size_t>(v)] = 1;

    auto stem = pivot == rg.root
                    ? std::vector<std::pair<int, std::uint32_t>>{}
                    : *detail::bfs_path(rg, rg.root, pivot, nullptr);
    auto cycle = *detail::bfs_path(rg, pivot, pivot, &in_component);

    LassoWord w;
    for (auto [v, input] : stem)
      w.prefix.push_back(step_letter(ts, rg.vertices[static_cast<std::size_t>(v)].sys_state, input));
    for (auto [v, input] : cycle)
      w.loop.push_back(step_letter(ts, rg.vertices[static_cast<std::size_t>(v)].sys_state, input));

    if (!trace_member(ts, w) || eval_lasso(f, w, phi))
      throw std::logic_error("model check produced an invalid witness");
    return {Verdict::Fails, w};
  }
  return {Verdict::Holds, std::nullopt};
}

}  // namespace resynth
