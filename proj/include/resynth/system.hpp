// Finite-state transition systems with output-labeled states, the repair
// operation algebra (label changes and transition redirects), trace
// membership, and JSON/DOT serialization.
#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "resynth/ltl.hpp"

namespace resynth {

// ==========================================================================
// Transition systems
//
// Deterministic and total over the input letters: tau[state][input] is the
// unique successor. States are labeled with a set of outputs; the trace
// letter emitted at a step is the state's outputs plus the environment's
// inputs. State 0 is initial.
// ==========================================================================

struct TransitionSystem {
  AtomicAlphabet alphabet;
  std::vector<std::uint32_t> out;        // output mask per state
  std::vector<std::vector<int>> tau;     // [state][input letter] -> successor

  int size() const { return static_cast<int>(out.size()); }

  bool operator==(const TransitionSystem&) const = default;

  void validate() const {
    if (out.size() != tau.size())
      throw std::invalid_argument("label and transition tables disagree on state count");
    std::uint32_t inputs = alphabet.input_letter_count();
    for (std::size_t t = 0; t < tau.size(); ++t) {
      if (out[t] >= alphabet.output_mask_count())
        throw std::invalid_argument("state label uses unknown outputs");
      if (tau[t].size() != inputs)
        throw std::invalid_argument("transition table is not total over the input letters");
      for (int target : tau[t])
        if (target < 0 || target >= size())
          throw std::invalid_argument("transition target out of range");
    }
  }
};

// Trace letter emitted when the environment plays input_letter in state t.
inline std::uint32_t step_letter(const TransitionSystem& ts, int t, std::uint32_t input_letter) {
  return ts.alphabet.trace_letter(input_letter, ts.out[static_cast<std::size_t>(t)]);
}

// ==========================================================================
// Repair operations
// ==========================================================================

struct LabelChangeOp {
  int state = 0;
  std::uint32_t output = 0;

  auto operator<=>(const LabelChangeOp&) const = default;
};

struct RedirectOp {
  int from = 0;
  int to = 0;
  std::vector<std::uint32_t> letters;  // kept sorted and unique

  auto operator<=>(const RedirectOp&) const = default;
};

using RepairOperation = std::variant<LabelChangeOp, RedirectOp>;

inline RepairOperation make_label_change(int state, std::uint32_t output) {
  return LabelChangeOp{state, output};
}

inline RepairOperation make_redirect(int from, int to, std::vector<std::uint32_t> letters) {
  std::sort(letters.begin(), letters.end());
  letters.erase(std::unique(letters.begin(), letters.end()), letters.end());
  return RedirectOp{from, to, std::move(letters)};
}

// A set of repair operations; insertion keeps a sorted, duplicate-free
// canonical order (label changes before redirects, then by fields).
struct Transformation {
  std::vector<RepairOperation> ops;

  static Transformation of(std::vector<RepairOperation> list) {
    Transformation t;
    for (RepairOperation& op : list) t.insert(std::move(op));
    return t;
  }

  void insert(RepairOperation op) {
    if (auto* rd = std::get_if<RedirectOp>(&op)) {
      std::sort(rd->letters.begin(), rd->letters.end());
      rd->letters.erase(std::unique(rd->letters.begin(), rd->letters.end()),
                        rd->letters.end());
    }
    auto it = std::lower_bound(ops.begin(), ops.end(), op);
    if (it != ops.end() && *it == op) return;
    ops.insert(it, std::move(op));
  }

  void erase(const RepairOperation& op) {
    auto it = std::lower_bound(ops.begin(), ops.end(), op);
    if (it != ops.end() && *it == op) ops.erase(it);
  }

  bool contains(const RepairOperation& op) const {
    return std::binary_search(ops.begin(), ops.end(), op);
  }

  std::size_t size() const { return ops.size(); }
  bool empty() const { return ops.empty(); }

  std::size_t label_change_count() const {
    std::size_t n = 0;
    for (const auto& op : ops)
      if (std::holds_alternative<LabelChangeOp>(op)) ++n;
    return n;
  }
  std::size_t redirect_count() const { return size() - label_change_count(); }

  bool operator==(const Transformation&) const = default;
};

// Two operations conflict when applying them in different orders could give
// different systems: label changes of the same state to different labels, or
// redirects from the same state over overlapping letters to different
// targets.
inline bool is_consistent(const Transformation& xi) {
  for (std::size_t i = 0; i < xi.ops.size(); ++i) {
    for (std::size_t j = i + 1; j < xi.ops.size(); ++j) {
      const auto& a = xi.ops[i];
      const auto& b = xi.ops[j];
      if (const auto* la = std::get_if<LabelChangeOp>(&a)) {
        const auto* lb = std::get_if<LabelChangeOp>(&b);
        if (lb && la->state == lb->state && la->output != lb->output) return false;
      }
      if (const auto* ra = std::get_if<RedirectOp>(&a)) {
        const auto* rb = std::get_if<RedirectOp>(&b);
        if (rb && ra->from == rb->from && ra->to != rb->to) {
          std::vector<std::uint32_t> common;
          std::set_intersection(ra->letters.begin(), ra->letters.end(), rb->letters.begin(),
                                rb->letters.end(), std::back_inserter(common));
          if (!common.empty()) return false;
        }
      }
    }
  }
  return true;
}

inline TransitionSystem apply(const TransitionSystem& ts, const RepairOperation& op) {
  TransitionSystem result = ts;
  if (const auto* lc = std::get_if<LabelChangeOp>(&op)) {
    if (lc->state < 0 || lc->state >= ts.size())
      throw std::invalid_argument("label change targets a state out of range");
    if (lc->output >= ts.alphabet.output_mask_count())
      throw std::invalid_argument("label change uses unknown outputs");
    result.out[static_cast<std::size_t>(lc->state)] = lc->output;
    return result;
  }
  const auto& rd = std::get<RedirectOp>(op);
  if (rd.from < 0 || rd.from >= ts.size() || rd.to < 0 || rd.to >= ts.size())
    throw std::invalid_argument("redirect endpoint out of range");
  for (std::uint32_t letter : rd.letters) {
    if (letter >= ts.alphabet.input_letter_count())
      throw std::invalid_argument("redirect letter outside the input alphabet");
    result.tau[static_cast<std::size_t>(rd.from)][letter] = rd.to;
  }
  return result;
}

inline TransitionSystem apply_all(const TransitionSystem& ts, const Transformation& xi) {
  if (!is_consistent(xi)) throw std::invalid_argument("inconsistent transformation");
  TransitionSystem result = ts;
  for (const RepairOperation& op : xi.ops) result = resynth::apply(result, op);
  return result;
}

// The canonical transformation turning one system into another of the same
// shape: one label change per relabeled state, one redirect per (source,
// new target) pair collecting all letters that moved there.
inline Transformation diff(const TransitionSystem& from, const TransitionSystem& to) {
  if (from.alphabet != to.alphabet)
    throw std::invalid_argument("diff requires a common alphabet");
  if (from.size() != to.size())
    throw std::invalid_argument("diff requires equal state counts");
  Transformation xi;
  for (int t = 0; t < from.size(); ++t) {
    if (from.out[static_cast<std::size_t>(t)] != to.out[static_cast<std::size_t>(t)])
      xi.insert(make_label_change(t, to.out[static_cast<std::size_t>(t)]));
    std::map<int, std::vector<std::uint32_t>> moved;
    for (std::uint32_t i = 0; i < from.alphabet.input_letter_count(); ++i) {
      int old_target = from.tau[static_cast<std::size_t>(t)][i];
      int new_target = to.tau[static_cast<std::size_t>(t)][i];
      if (old_target != new_target) moved[new_target].push_back(i);
    }
    for (auto& [target, letters] : moved)
      xi.insert(make_redirect(t, target, std::move(letters)));
  }
  return xi;
}

// ==========================================================================
// Traces
// ==========================================================================

// Whether the ultimately periodic word is the trace of the (unique) run it
// induces: outputs must match at every position, checked until the pair
// (loop offset, state) repeats.
inline bool trace_member(const TransitionSystem& ts, const LassoWord& w) {
  if (w.loop.empty()) throw std::invalid_argument("lasso loop must be non-empty");
  int state = 0;
  for (std::uint32_t letter : w.prefix) {
    if (letter >= ts.alphabet.trace_letter_count())
      throw std::invalid_argument("lasso letter outside the alphabet");
    if (ts.alphabet.output_part(letter) != ts.out[static_cast<std::size_t>(state)])
      return false;
    state = ts.tau[static_cast<std::size_t>(state)][ts.alphabet.input_part(letter)];
  }
  std::set<std::pair<std::size_t, int>> visited;
  std::size_t offset = 0;
  while (visited.insert({offset, state}).second) {
    std::uint32_t letter = w.loop[offset];
    if (letter >= ts.alphabet.trace_letter_count())
      throw std::invalid_argument("lasso letter outside the alphabet");
    if (ts.alphabet.output_part(letter) != ts.out[static_cast<std::size_t>(state)])
      return false;
    state = ts.tau[static_cast<std::size_t>(state)][ts.alphabet.input_part(letter)];
    offset = (offset + 1) % w.loop.size();
  }
  return true;
}

// Pads the system to new_size states; fresh states carry no outputs and loop
// back to themselves on every input, so the behavior from state 0 is
// unchanged.
inline TransitionSystem extend_states(const TransitionSystem& ts, int new_size) {
  if (new_size < ts.size())
    throw std::invalid_argument("extend_states cannot shrink a system");
  TransitionSystem result = ts;
  for (int t = ts.size(); t < new_size; ++t) {
    result.out.push_back(0);
    result.tau.emplace_back(ts.alphabet.input_letter_count(), t);
  }
  return result;
}

// ==========================================================================
// JSON
//
// {"inputs": [...], "outputs": [...], "states": [{"label": [props],
//  "trans": {"<letter as sorted prop list>": target}}]}; state 0 initial.
// ==========================================================================

namespace detail {

inline std::string input_letter_key(const AtomicAlphabet& alphabet, std::uint32_t letter) {
  std::vector<std::string> props = alphabet.input_letter_props(letter);
  std::string key;
  for (std::size_t i = 0; i < props.size(); ++i) {
    if (i) key += ",";
    key += props[i];
  }
  return key;
}

inline std::uint32_t parse_input_letter_key(const AtomicAlphabet& alphabet,
                                            const std::string& key) {
  std::uint32_t mask = 0;
  if (key.empty()) return mask;
  std::stringstream ss(key);
  std::string name;
  while (std::getline(ss, name, ',')) {
    std::optional<int> index = alphabet.input_index(name);
    if (!index) throw std::invalid_argument("unknown input proposition '" + name + "'");
    std::uint32_t bit = 1u << *index;
    if (mask & bit) throw std::invalid_argument("duplicate proposition in letter '" + key + "'");
    mask |= bit;
  }
  return mask;
}

inline std::uint32_t parse_output_props(const AtomicAlphabet& alphabet,
                                        const nlohmann::json& props) {
  if (!props.is_array()) throw std::invalid_argument("state label must be a list");
  std::uint32_t mask = 0;
  for (const auto& entry : props) {
    std::string name = entry.get<std::string>();
    std::optional<int> index = alphabet.output_index(name);
    if (!index) throw std::invalid_argument("unknown output proposition '" + name + "'");
    std::uint32_t bit = 1u << *index;
    if (mask & bit) throw std::invalid_argument("duplicate output proposition '" + name + "'");
    mask |= bit;
  }
  return mask;
}

}  // namespace detail

inline nlohmann::json to_json(const TransitionSystem& ts) {
  nlohmann::json j;
  j["inputs"] = ts.alphabet.inputs();
  j["outputs"] = ts.alphabet.outputs();
  j["states"] = nlohmann::json::array();
  for (int t = 0; t < ts.size(); ++t) {
    nlohmann::json state;
    state["label"] = ts.alphabet.output_mask_props(ts.out[static_cast<std::size_t>(t)]);
    nlohmann::json trans = nlohmann::json::object();
    for (std::uint32_t i = 0; i < ts.alphabet.input_letter_count(); ++i)
      trans[detail::input_letter_key(ts.alphabet, i)] = ts.tau[static_cast<std::size_t>(t)][i];
    state["trans"] = trans;
    j["states"].push_back(state);
  }
  return j;
}

inline TransitionSystem system_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("inputs") || !j.contains("outputs") ||
      !j.contains("states"))
    throw std::invalid_argument("system JSON needs inputs, outputs and states");
  TransitionSystem ts;
  ts.alphabet = AtomicAlphabet(j.at("inputs").get<std::vector<std::string>>(),
                               j.at("outputs").get<std::vector<std::string>>());
  const auto& states = j.at("states");
  if (!states.is_array() || states.empty())
    throw std::invalid_argument("system JSON needs a non-empty state list");
  int n = static_cast<int>(states.size());
  for (const auto& state : states) {
    ts.out.push_back(detail::parse_output_props(ts.alphabet, state.at("label")));
    const auto& trans = state.at("trans");
    if (!trans.is_object()) throw std::invalid_argument("state trans must be an object");
    std::vector<int> row(ts.alphabet.input_letter_count(), -1);
    for (auto it = trans.begin(); it != trans.end(); ++it) {
      std::uint32_t letter = detail::parse_input_letter_key(ts.alphabet, it.key());
      if (row[letter] != -1)
        throw std::invalid_argument("duplicate transition for letter '" + it.key() + "'");
      int target = it.value().get<int>();
      if (target < 0 || target >= n)
        throw std::invalid_argument("transition target out of range");
      row[letter] = target;
    }
    for (int target : row)
      if (target == -1)
        throw std::invalid_argument("transition table is not total over the input letters");
    ts.tau.push_back(std::move(row));
  }
  ts.validate();
  return ts;
}

inline nlohmann::json to_json(const AtomicAlphabet& alphabet, const RepairOperation& op) {
  nlohmann::json j;
  if (const auto* lc = std::get_if<LabelChangeOp>(&op)) {
    j["type"] = "label";
    j["state"] = lc->state;
    j["output"] = alphabet.output_mask_props(lc->output);
  } else {
    const auto& rd = std::get<RedirectOp>(op);
    j["type"] = "redirect";
    j["from"] = rd.from;
    j["to"] = rd.to;
    j["letters"] = nlohmann::json::array();
    for (std::uint32_t letter : rd.letters)
      j["letters"].push_back(alphabet.input_letter_props(letter));
  }
  return j;
}

inline RepairOperation operation_from_json(const AtomicAlphabet& alphabet,
                                           const nlohmann::json& j) {
  std::string type = j.at("type").get<std::string>();
  if (type == "label") {
    std::uint32_t mask = detail::parse_output_props(alphabet, j.at("output"));
    return make_label_change(j.at("state").get<int>(), mask);
  }
  if (type == "redirect") {
    std::vector<std::uint32_t> letters;
    for (const auto& entry : j.at("letters")) {
      std::uint32_t mask = 0;
      for (const auto& name : entry) {
        std::optional<int> index = alphabet.input_index(name.get<std::string>());
        if (!index)
          throw std::invalid_argument("unknown input proposition in redirect letters");
        mask |= 1u << *index;
      }
      letters.push_back(mask);
    }
    return make_redirect(j.at("from").get<int>(), j.at("to").get<int>(), std::move(letters));
  }
  throw std::invalid_argument("unknown repair operation type '" + type + "'");
}

inline nlohmann::json to_json(const AtomicAlphabet& alphabet, const Transformation& xi) {
  nlohmann::json j = nlohmann::json::array();
  for (const RepairOperation& op : xi.ops) j.push_back(to_json(alphabet, op));
  return j;
}

inline Transformation transformation_from_json(const AtomicAlphabet& alphabet,
                                               const nlohmann::json& j) {
  if (!j.is_array()) throw std::invalid_argument("transformation JSON must be a list");
  Transformation xi;
  for (const auto& entry : j) xi.insert(operation_from_json(alphabet, entry));
  return xi;
}

inline nlohmann::json to_json(const AtomicAlphabet& alphabet, const LassoWord& w) {
  nlohmann::json j;
  j["prefix"] = nlohmann::json::array();
  for (std::uint32_t letter : w.prefix) j["prefix"].push_back(alphabet.trace_letter_props(letter));
  j["loop"] = nlohmann::json::array();
  for (std::uint32_t letter : w.loop) j["loop"].push_back(alphabet.trace_letter_props(letter));
  return j;
}

inline LassoWord lasso_from_json(const AtomicAlphabet& alphabet, const nlohmann::json& j) {
  auto parse_letters = [&](const nlohmann::json& list) {
    std::vector<std::uint32_t> letters;
    for (const auto& entry : list) {
      std::uint32_t mask = 0;
      for (const auto& name : entry) {
        std::optional<int> index = alphabet.prop_index(name.get<std::string>());
        if (!index) throw std::invalid_argument("unknown proposition in lasso word");
        mask |= 1u << *index;
      }
      letters.push_back(mask);
    }
    return letters;
  };
  LassoWord w;
  w.prefix = parse_letters(j.at("prefix"));
  w.loop = parse_letters(j.at("loop"));
  if (w.loop.empty()) throw std::invalid_argument("lasso loop must be non-empty");
  return w;
}

// ==========================================================================
// DOT
// ==========================================================================

// Extra rendering instructions for explanation frames: the marked (state,
// input letter) edges are drawn red, the note lands in a graph label.
struct DotHighlight {
  std::set<std::pair<int, std::uint32_t>> edges;
  std::string note;
};

inline std::string to_dot(const TransitionSystem& ts, const DotHighlight* highlight = nullptr) {
  std::ostringstream dot;
  dot << "digraph system {\n";
  dot << "  rankdir=LR;\n";
  if (highlight && !highlight->note.empty()) {
    std::string note = highlight->note;
    std::string escaped;
    for (char c : note) {
      if (c == '"' || c == '\\') escaped += '\\';
      escaped += c;
    }
    dot << "  label=\"" << escaped << "\";\n  labelloc=t;\n";
  }
  dot << "  init [shape=point];\n";
  for (int t = 0; t < ts.size(); ++t) {
    dot << "  s" << t << " [shape=circle, label=\"t" << t << "\\n"
        << ts.alphabet.output_mask_string(ts.out[static_cast<std::size_t>(t)]) << "\"];\n";
  }
  dot << "  init -> s0;\n";
  for (int t = 0; t < ts.size(); ++t) {
    std::map<int, std::pair<std::vector<std::string>, std::vector<std::string>>> grouped;
    for (std::uint32_t i = 0; i < ts.alphabet.input_letter_count(); ++i) {
      int target = ts.tau[static_cast<std::size_t>(t)][i];
      bool hot = highlight && highlight->edges.count({t, i}) > 0;
      auto& group = grouped[target];
      (hot ? group.second : group.first).push_back(ts.alphabet.input_letter_string(i));
    }
    for (const auto& [target, letters] : grouped) {
      auto emit = [&](const std::vector<std::string>& labels, bool hot) {
        if (labels.empty()) return;
        std::string text;
        for (std::size_t i = 0; i < labels.size(); ++i) {
          if (i) text += ", ";
          text += labels[i];
        }
        dot << "  s" << t << " -> s" << target << " [label=\"" << text << "\"";
        if (hot) dot << ", color=red, fontcolor=red";
        dot << "];\n";
      };
      emit(letters.first, false);
      emit(letters.second, true);
    }
  }
  dot << "}\n";
  return dot.str();
}

}  // namespace resynth
