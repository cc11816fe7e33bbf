// Linear temporal logic over a partitioned alphabet: interned formula store,
// parser, printer, negation normal form, and evaluation on lasso words.
#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "resynth/errors.hpp"

namespace resynth {

// ==========================================================================
// Alphabet
//
// Atomic propositions are split into environment inputs and system outputs.
// Propositions are numbered inputs first, then outputs; a letter is a bitmask
// over that numbering. Input letters use only the low input bits, output
// labels are masks over the outputs in their own local numbering.
// ==========================================================================

class AtomicAlphabet {
 public:
  AtomicAlphabet() = default;

  AtomicAlphabet(std::vector<std::string> inputs, std::vector<std::string> outputs)
      : inputs_(std::move(inputs)), outputs_(std::move(outputs)) {
    validate();
  }

  const std::vector<std::string>& inputs() const { return inputs_; }
  const std::vector<std::string>& outputs() const { return outputs_; }

  int num_inputs() const { return static_cast<int>(inputs_.size()); }
  int num_outputs() const { return static_cast<int>(outputs_.size()); }
  int num_props() const { return num_inputs() + num_outputs(); }

  std::uint32_t input_letter_count() const { return 1u << num_inputs(); }
  std::uint32_t output_mask_count() const { return 1u << num_outputs(); }
  std::uint32_t trace_letter_count() const { return 1u << num_props(); }

  // Proposition name for a global index (inputs first, then outputs).
  const std::string& prop_name(int index) const {
    if (index < num_inputs()) return inputs_[static_cast<std::size_t>(index)];
    return outputs_[static_cast<std::size_t>(index - num_inputs())];
  }

  std::optional<int> prop_index(const std::string& name) const {
    for (int i = 0; i < num_inputs(); ++i)
      if (inputs_[static_cast<std::size_t>(i)] == name) return i;
    for (int j = 0; j < num_outputs(); ++j)
      if (outputs_[static_cast<std::size_t>(j)] == name) return num_inputs() + j;
    return std::nullopt;
  }

  std::optional<int> input_index(const std::string& name) const {
    for (int i = 0; i < num_inputs(); ++i)
      if (inputs_[static_cast<std::size_t>(i)] == name) return i;
    return std::nullopt;
  }

  std::optional<int> output_index(const std::string& name) const {
    for (int j = 0; j < num_outputs(); ++j)
      if (outputs_[static_cast<std::size_t>(j)] == name) return j;
    return std::nullopt;
  }

  // Trace letters pack the input letter in the low bits and the output mask
  // above them.
  std::uint32_t trace_letter(std::uint32_t input_letter, std::uint32_t output_mask) const {
    return input_letter | (output_mask << num_inputs());
  }
  std::uint32_t input_part(std::uint32_t trace_letter) const {
    return trace_letter & (input_letter_count() - 1);
  }
  std::uint32_t output_part(std::uint32_t trace_letter) const {
    return trace_letter >> num_inputs();
  }

  // Proposition names present in a letter, sorted lexicographically. The
  // mask is interpreted against the given name list.
  static std::vector<std::string> mask_props(std::uint32_t mask,
                                             const std::vector<std::string>& names) {
    std::vector<std::string> props;
    for (std::size_t i = 0; i < names.size(); ++i)
      if (mask & (1u << i)) props.push_back(names[i]);
    std::sort(props.begin(), props.end());
    return props;
  }

  std::vector<std::string> input_letter_props(std::uint32_t input_letter) const {
    return mask_props(input_letter, inputs_);
  }
  std::vector<std::string> output_mask_props(std::uint32_t output_mask) const {
    return mask_props(output_mask, outputs_);
  }
  std::vector<std::string> trace_letter_props(std::uint32_t letter) const {
    std::vector<std::string> props = mask_props(input_part(letter), inputs_);
    std::vector<std::string> outs = mask_props(output_part(letter), outputs_);
    props.insert(props.end(), outs.begin(), outs.end());
    std::sort(props.begin(), props.end());
    return props;
  }

  static std::string brace_list(const std::vector<std::string>& props) {
    std::string s = "{";
    for (std::size_t i = 0; i < props.size(); ++i) {
      if (i) s += ",";
      s += props[i];
    }
    s += "}";
    return s;
  }

  std::string input_letter_string(std::uint32_t input_letter) const {
    return brace_list(input_letter_props(input_letter));
  }
  std::string output_mask_string(std::uint32_t output_mask) const {
    return brace_list(output_mask_props(output_mask));
  }
  std::string trace_letter_string(std::uint32_t letter) const {
    return brace_list(trace_letter_props(letter));
  }

  bool operator==(const AtomicAlphabet& other) const {
    return inputs_ == other.inputs_ && outputs_ == other.outputs_;
  }
  bool operator!=(const AtomicAlphabet& other) const { return !(*this == other); }

  static bool is_identifier(const std::string& s) {
    if (s.empty()) return false;
    if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
    for (char c : s)
      if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
    return true;
  }

  static bool is_reserved(const std::string& s) {
    return s == "X" || s == "F" || s == "G" || s == "U" || s == "R" ||
           s == "true" || s == "false";
  }

 private:
  void validate() const {
    if (num_props() > 30)
      throw std::invalid_argument("alphabet too large: at most 30 propositions supported");
    std::vector<std::string> all = inputs_;
    all.insert(all.end(), outputs_.begin(), outputs_.end());
    for (const std::string& name : all) {
      if (!is_identifier(name))
        throw std::invalid_argument("proposition name is not an identifier: '" + name + "'");
      if (is_reserved(name))
        throw std::invalid_argument("proposition name collides with a keyword: '" + name + "'");
    }
    std::sort(all.begin(), all.end());
    for (std::size_t i = 1; i < all.size(); ++i)
      if (all[i] == all[i - 1])
        throw std::invalid_argument("duplicate proposition name: '" + all[i] + "'");
  }

  std::vector<std::string> inputs_;
  std::vector<std::string> outputs_;
};

// ==========================================================================
// Formulas
//
// Formulas are interned into a factory-owned arena; structurally equal
// subterms share one id, so equality is id comparison and evaluation can
// memoize per id.
// ==========================================================================

enum class LtlKind : std::uint8_t {
  True,
  False,
  Atom,
  Not,
  And,
  Or,
  Implies,
  Next,
  Until,
  Release,
  Finally,
  Globally,
};

using FormulaId = std::uint32_t;
inline constexpr FormulaId kInvalidFormula = 0xffffffffu;

class LtlFactory {
 public:
  explicit LtlFactory(AtomicAlphabet alphabet) : alphabet_(std::move(alphabet)) {}

  const AtomicAlphabet& alphabet() const { return alphabet_; }

  LtlKind kind(FormulaId id) const { return node(id).kind; }
  FormulaId lhs(FormulaId id) const { return node(id).lhs; }
  FormulaId rhs(FormulaId id) const { return node(id).rhs; }

  // Global proposition index of an Atom node.
  int atom_index(FormulaId id) const { return static_cast<int>(node(id).atom); }
  const std::string& atom_name(FormulaId id) const {
    return alphabet_.prop_name(atom_index(id));
  }

  FormulaId tt() { return intern(LtlKind::True, kInvalidFormula, kInvalidFormula, 0); }
  FormulaId ff() { return intern(LtlKind::False, kInvalidFormula, kInvalidFormula, 0); }

  FormulaId atom(const std::string& name) {
    std::optional<int> index = alphabet_.prop_index(name);
    if (!index) throw std::invalid_argument("unknown proposition: '" + name + "'");
    return atom_by_index(*index);
  }

  FormulaId atom_by_index(int prop) {
    if (prop < 0 || prop >= alphabet_.num_props())
      throw std::invalid_argument("proposition index out of range");
    return intern(LtlKind::Atom, kInvalidFormula, kInvalidFormula,
                  static_cast<std::uint32_t>(prop));
  }

  FormulaId lnot(FormulaId a) { return intern(LtlKind::Not, a, kInvalidFormula, 0); }
  FormulaId land(FormulaId a, FormulaId b) { return intern(LtlKind::And, a, b, 0); }
  FormulaId lor(FormulaId a, FormulaId b) { return intern(LtlKind::Or, a, b, 0); }
  FormulaId implies(FormulaId a, FormulaId b) { return intern(LtlKind::Implies, a, b, 0); }
  FormulaId next(FormulaId a) { return intern(LtlKind::Next, a, kInvalidFormula, 0); }
  FormulaId until(FormulaId a, FormulaId b) { return intern(LtlKind::Until, a, b, 0); }
  FormulaId release(FormulaId a, FormulaId b) { return intern(LtlKind::Release, a, b, 0); }
  FormulaId finally_(FormulaId a) { return intern(LtlKind::Finally, a, kInvalidFormula, 0); }
  FormulaId globally(FormulaId a) { return intern(LtlKind::Globally, a, kInvalidFormula, 0); }

  // Conjunction of a property list; true when empty.
  FormulaId conjunction(const std::vector<FormulaId>& parts) {
    if (parts.empty()) return tt();
    FormulaId acc = parts[0];
    for (std::size_t i = 1; i < parts.size(); ++i) acc = land(acc, parts[i]);
    return acc;
  }

  std::size_t size() const { return nodes_.size(); }

  bool is_literal(FormulaId id) const {
    LtlKind k = kind(id);
    if (k == LtlKind::Atom) return true;
    return k == LtlKind::Not && kind(lhs(id)) == LtlKind::Atom;
  }

 private:
  struct Node {
    LtlKind kind;
    FormulaId lhs;
    FormulaId rhs;
    std::uint32_t atom;
  };

  struct NodeKey {
    LtlKind kind;
    FormulaId lhs;
    FormulaId rhs;
    std::uint32_t atom;
    bool operator==(const NodeKey&) const = default;
  };

  struct NodeKeyHash {
    std::size_t operator()(const NodeKey& k) const {
      std::size_t h = static_cast<std::size_t>(k.kind);
      h = h * 1000003u ^ k.lhs;
      h = h * 1000003u ^ k.rhs;
      h = h * 1000003u ^ k.atom;
      return h;
    }
  };

  const Node& node(FormulaId id) const {
    if (id >= nodes_.size()) throw std::invalid_argument("invalid formula id");
    return nodes_[id];
  }

  FormulaId intern(LtlKind kind, FormulaId lhs, FormulaId rhs, std::uint32_t atom) {
    NodeKey key{kind, lhs, rhs, atom};
    auto it = intern_.find(key);
    if (it != intern_.end()) return it->second;
    FormulaId id = static_cast<FormulaId>(nodes_.size());
    nodes_.push_back(Node{kind, lhs, rhs, atom});
    intern_.emplace(key, id);
    return id;
  }

  AtomicAlphabet alphabet_;
  std::vector<Node> nodes_;
  std::unordered_map<NodeKey, FormulaId, NodeKeyHash> intern_;
};

// ==========================================================================
// Parsing
//
// Grammar, loosest binding first: "->" (right associative), "|", "&",
// "U"/"R" (right associative), then the unary prefixes "!", "X", "F", "G".
// Whitespace is insignificant; identifiers are [A-Za-z_][A-Za-z0-9_]*.
// ==========================================================================

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, int line, int column)
      : std::runtime_error(message + " at line " + std::to_string(line) + ", column " +
                           std::to_string(column)),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

class SyntaxError : public ParseError {
 public:
  using ParseError::ParseError;
};

class UnknownPropositionError : public ParseError {
 public:
  UnknownPropositionError(const std::string& name, int line, int column)
      : ParseError("unknown proposition '" + name + "'", line, column), name_(name) {}

  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

namespace detail {

enum class TokenType {
  LParen,
  RParen,
  Not,
  And,
  Or,
  Implies,
  Next,
  Finally,
  Globally,
  Until,
  Release,
  TrueLit,
  FalseLit,
  Ident,
  End,
};

struct Token {
  TokenType type;
  std::string text;
  int line;
  int column;
};

inline std::vector<Token> tokenize_ltl(const std::string& text) {
  std::vector<Token> tokens;
  int line = 1;
  int col = 1;
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (c == '\n') {
      ++line;
      col = 1;
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++col;
      ++i;
      continue;
    }
    int tl = line;
    int tc = col;
    if (c == '(') {
      tokens.push_back({TokenType::LParen, "(", tl, tc});
      ++i;
      ++col;
    } else if (c == ')') {
      tokens.push_back({TokenType::RParen, ")", tl, tc});
      ++i;
      ++col;
    } else if (c == '!') {
      tokens.push_back({TokenType::Not, "!", tl, tc});
      ++i;
      ++col;
    } else if (c == '&') {
      tokens.push_back({TokenType::And, "&", tl, tc});
      ++i;
      ++col;
    } else if (c == '|') {
      tokens.push_back({TokenType::Or, "|", tl, tc});
      ++i;
      ++col;
    } else if (c == '-') {
      if (i + 1 >= text.size() || text[i + 1] != '>')
        throw SyntaxError("expected '->'", tl, tc);
      tokens.push_back({TokenType::Implies, "->", tl, tc});
      i += 2;
      col += 2;
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = i;
      while (i < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_')) {
        ++i;
        ++col;
      }
      std::string word = text.substr(start, i - start);
      TokenType type = TokenType::Ident;
      if (word == "X") type = TokenType::Next;
      else if (word == "F") type = TokenType::Finally;
      else if (word == "G") type = TokenType::Globally;
      else if (word == "U") type = TokenType::Until;
      else if (word == "R") type = TokenType::Release;
      else if (word == "true") type = TokenType::TrueLit;
      else if (word == "false") type = TokenType::FalseLit;
      tokens.push_back({type, word, tl, tc});
    } else {
      throw SyntaxError(std::string("unexpected character '") + c + "'", tl, tc);
    }
  }
  int el = line;
  int ec = col;
  tokens.push_back({TokenType::End, "", el, ec});
  return tokens;
}

class LtlParser {
 public:
  LtlParser(std::vector<Token> tokens, LtlFactory& factory)
      : tokens_(std::move(tokens)), factory_(factory) {}

  FormulaId parse() {
    FormulaId result = parse_implies();
    if (peek().type != TokenType::End)
      throw SyntaxError("unexpected token '" + peek().text + "'", peek().line, peek().column);
    return result;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& advance() { return tokens_[pos_++]; }

  bool accept(TokenType type) {
    if (peek().type != type) return false;
    ++pos_;
    return true;
  }

  FormulaId parse_implies() {
    FormulaId left = parse_or();
    if (accept(TokenType::Implies)) return factory_.implies(left, parse_implies());
    return left;
  }

  FormulaId parse_or() {
    FormulaId left = parse_and();
    while (accept(TokenType::Or)) left = factory_.lor(left, parse_and());
    return left;
  }

  FormulaId parse_and() {
    FormulaId left = parse_until();
    while (accept(TokenType::And)) left = factory_.land(left, parse_until());
    return left;
  }

  FormulaId parse_until() {
    FormulaId left = parse_unary();
    if (accept(TokenType::Until)) return factory_.until(left, parse_until());
    if (accept(TokenType::Release)) return factory_.release(left, parse_until());
    return left;
  }

  FormulaId parse_unary() {
    const Token& token = peek();
    switch (token.type) {
      case TokenType::Not:
        advance();
        return factory_.lnot(parse_unary());
      case TokenType::Next:
        advance();
        return factory_.next(parse_unary());
      case TokenType::Finally:
        advance();
        return factory_.finally_(parse_unary());
      case TokenType::Globally:
        advance();
        return factory_.globally(parse_unary());
      case TokenType::LParen: {
        advance();
        FormulaId inner = parse_implies();
        if (!accept(TokenType::RParen))
          throw SyntaxError("expected ')'", peek().line, peek().column);
        return inner;
      }
      case TokenType::TrueLit:
        advance();
        return factory_.tt();
      case TokenType::FalseLit:
        advance();
        return factory_.ff();
      case TokenType::Ident: {
        advance();
        if (!factory_.alphabet().prop_index(token.text))
          throw UnknownPropositionError(token.text, token.line, token.column);
        return factory_.atom(token.text);
      }
      default:
        throw SyntaxError("unexpected token '" + token.text + "'", token.line, token.column);
    }
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  LtlFactory& factory_;
};

}  // namespace detail

inline FormulaId parse_ltl(const std::string& text, LtlFactory& factory) {
  detail::LtlParser parser(detail::tokenize_ltl(text), factory);
  return parser.parse();
}

// ==========================================================================
// Printing
// ==========================================================================

namespace detail {

inline int print_precedence(LtlKind kind) {
  switch (kind) {
    case LtlKind::Implies: return 1;
    case LtlKind::Or: return 2;
    case LtlKind::And: return 3;
    case LtlKind::Until:
    case LtlKind::Release: return 4;
    case LtlKind::Not:
    case LtlKind::Next:
    case LtlKind::Finally:
    case LtlKind::Globally: return 5;
    default: return 6;
  }
}

// min_prec is the loosest binding a child may expose without parentheses;
// re-parsing the result reproduces the exact tree.
inline std::string print_rec(const LtlFactory& f, FormulaId id, int min_prec) {
  LtlKind k = f.kind(id);
  int prec = print_precedence(k);
  std::string s;
  switch (k) {
    case LtlKind::True: s = "true"; break;
    case LtlKind::False: s = "false"; break;
    case LtlKind::Atom: s = f.atom_name(id); break;
    case LtlKind::Not: s = "!" + print_rec(f, f.lhs(id), 5); break;
    case LtlKind::Next: s = "X " + print_rec(f, f.lhs(id), 5); break;
    case LtlKind::Finally: s = "F " + print_rec(f, f.lhs(id), 5); break;
    case LtlKind::Globally: s = "G " + print_rec(f, f.lhs(id), 5); break;
    case LtlKind::And:
      s = print_rec(f, f.lhs(id), 3) + " & " + print_rec(f, f.rhs(id), 4);
      break;
    case LtlKind::Or:
      s = print_rec(f, f.lhs(id), 2) + " | " + print_rec(f, f.rhs(id), 3);
      break;
    case LtlKind::Implies:
      s = print_rec(f, f.lhs(id), 2) + " -> " + print_rec(f, f.rhs(id), 1);
      break;
    case LtlKind::Until:
      s = print_rec(f, f.lhs(id), 5) + " U " + print_rec(f, f.rhs(id), 4);
      break;
    case LtlKind::Release:
      s = print_rec(f, f.lhs(id), 5) + " R " + print_rec(f, f.rhs(id), 4);
      break;
  }
  if (prec < min_prec) return "(" + s + ")";
  return s;
}

}  // namespace detail

inline std::string pretty_print(const LtlFactory& f, FormulaId id) {
  return detail::print_rec(f, id, 0);
}

// ==========================================================================
// Negation normal form
//
// to_nnf pushes negations to the atoms and eliminates Implies, Finally and
// Globally (F a = true U a, G a = false R a). negate_nnf(phi) is the normal
// form of the negation.
// ==========================================================================

inline FormulaId to_nnf(LtlFactory& f, FormulaId id);

inline FormulaId negate_nnf(LtlFactory& f, FormulaId id) {
  switch (f.kind(id)) {
    case LtlKind::True: return f.ff();
    case LtlKind::False: return f.tt();
    case LtlKind::Atom: return f.lnot(id);
    case LtlKind::Not: return to_nnf(f, f.lhs(id));
    case LtlKind::And: return f.lor(negate_nnf(f, f.lhs(id)), negate_nnf(f, f.rhs(id)));
    case LtlKind::Or: return f.land(negate_nnf(f, f.lhs(id)), negate_nnf(f, f.rhs(id)));
    case LtlKind::Implies:
      return f.land(to_nnf(f, f.lhs(id)), negate_nnf(f, f.rhs(id)));
    case LtlKind::Next: return f.next(negate_nnf(f, f.lhs(id)));
    case LtlKind::Until:
      return f.release(negate_nnf(f, f.lhs(id)), negate_nnf(f, f.rhs(id)));
    case LtlKind::Release:
      return f.until(negate_nnf(f, f.lhs(id)), negate_nnf(f, f.rhs(id)));
    case LtlKind::Finally: return f.release(f.ff(), negate_nnf(f, f.lhs(id)));
    case LtlKind::Globally: return f.until(f.tt(), negate_nnf(f, f.lhs(id)));
  }
  throw std::logic_error("unhandled formula kind");
}

inline FormulaId to_nnf(LtlFactory& f, FormulaId id) {
  switch (f.kind(id)) {
    case LtlKind::True:
    case LtlKind::False:
    case LtlKind::Atom: return id;
    case LtlKind::Not: return negate_nnf(f, f.lhs(id));
    case LtlKind::And: return f.land(to_nnf(f, f.lhs(id)), to_nnf(f, f.rhs(id)));
    case LtlKind::Or: return f.lor(to_nnf(f, f.lhs(id)), to_nnf(f, f.rhs(id)));
    case LtlKind::Implies: return f.lor(negate_nnf(f, f.lhs(id)), to_nnf(f, f.rhs(id)));
    case LtlKind::Next: return f.next(to_nnf(f, f.lhs(id)));
    case LtlKind::Until: return f.until(to_nnf(f, f.lhs(id)), to_nnf(f, f.rhs(id)));
    case LtlKind::Release: return f.release(to_nnf(f, f.lhs(id)), to_nnf(f, f.rhs(id)));
    case LtlKind::Finally: return f.until(f.tt(), to_nnf(f, f.lhs(id)));
    case LtlKind::Globally: return f.release(f.ff(), to_nnf(f, f.lhs(id)));
  }
  throw std::logic_error("unhandled formula kind");
}

// ==========================================================================
// Lasso words and evaluation
// ==========================================================================

// Ultimately periodic word prefix . loop^omega; letters are trace letters
// over the full proposition set.
struct LassoWord {
  std::vector<std::uint32_t> prefix;
  std::vector<std::uint32_t> loop;

  bool operator==(const LassoWord&) const = default;
};

// The same omega word with the first loop letter unrolled onto the prefix.
inline LassoWord rotate_lasso(const LassoWord& w) {
  if (w.loop.empty()) throw std::invalid_argument("lasso loop must be non-empty");
  LassoWord r;
  r.prefix = w.prefix;
  r.prefix.push_back(w.loop[0]);
  r.loop.assign(w.loop.begin() + 1, w.loop.end());
  r.loop.push_back(w.loop[0]);
  return r;
}

namespace detail {

class LassoEvaluator {
 public:
  LassoEvaluator(const LtlFactory& f, const LassoWord& w) : f_(f), w_(w) {
    if (w.loop.empty()) throw std::invalid_argument("lasso loop must be non-empty");
    prefix_len_ = w.prefix.size();
    total_ = prefix_len_ + w.loop.size();
    std::uint32_t limit = f.alphabet().trace_letter_count();
    for (std::uint32_t letter : w.prefix)
      if (letter >= limit) throw std::invalid_argument("lasso letter outside the alphabet");
    for (std::uint32_t letter : w.loop)
      if (letter >= limit) throw std::invalid_argument("lasso letter outside the alphabet");
  }

  bool value_at_start(FormulaId id) { return table(id)[0] != 0; }

 private:
  std::uint32_t letter(std::size_t pos) const {
    return pos < prefix_len_ ? w_.prefix[pos] : w_.loop[pos - prefix_len_];
  }

  std::size_t succ(std::size_t pos) const {
    return pos + 1 < total_ ? pos + 1 : prefix_len_;
  }

  const std::vector<std::uint8_t>& table(FormulaId id) {
    auto it = memo_.find(id);
    if (it != memo_.end()) return it->second;
    std::vector<std::uint8_t> v(total_, 0);
    switch (f_.kind(id)) {
      case LtlKind::True:
        std::fill(v.begin(), v.end(), 1);
        break;
      case LtlKind::False:
        break;
      case LtlKind::Atom: {
        int ap = f_.atom_index(id);
        for (std::size_t i = 0; i < total_; ++i)
          v[i] = static_cast<std::uint8_t>((letter(i) >> ap) & 1u);
        break;
      }
      case LtlKind::Not: {
        const auto& a = table(f_.lhs(id));
        for (std::size_t i = 0; i < total_; ++i) v[i] = !a[i];
        break;
      }
      case LtlKind::And: {
        const auto& a = table(f_.lhs(id));
        const auto& b = table(f_.rhs(id));
        for (std::size_t i = 0; i < total_; ++i) v[i] = a[i] && b[i];
        break;
      }
      case LtlKind::Or: {
        const auto& a = table(f_.lhs(id));
        const auto& b = table(f_.rhs(id));
        for (std::size_t i = 0; i < total_; ++i) v[i] = a[i] || b[i];
        break;
      }
      case LtlKind::Implies: {
        const auto& a = table(f_.lhs(id));
        const auto& b = table(f_.rhs(id));
        for (std::size_t i = 0; i < total_; ++i) v[i] = !a[i] || b[i];
        break;
      }
      case LtlKind::Next: {
        const auto& a = table(f_.lhs(id));
        for (std::size_t i = 0; i < total_; ++i) v[i] = a[succ(i)];
        break;
      }
      case LtlKind::Until:
        v = fixpoint(table(f_.lhs(id)), table(f_.rhs(id)), false);
        break;
      case LtlKind::Release:
        v = fixpoint(table(f_.lhs(id)), table(f_.rhs(id)), true);
        break;
      case LtlKind::Finally: {
        std::vector<std::uint8_t> all_true(total_, 1);
        v = fixpoint(all_true, table(f_.lhs(id)), false);
        break;
      }
      case LtlKind::Globally: {
        std::vector<std::uint8_t> all_false(total_, 0);
        v = fixpoint(all_false, table(f_.lhs(id)), true);
        break;
      }
    }
    return memo_.emplace(id, std::move(v)).first->second;
  }

  // Until as least fixpoint (greatest = false) of v = b | (a & v'); Release
  // as greatest fixpoint of v = b & (a | v'). The loop stabilizes within
  // |loop| sweeps, the prefix follows in one backward pass.
  std::vector<std::uint8_t> fixpoint(const std::vector<std::uint8_t>& a,
                                     const std::vector<std::uint8_t>& b,
                                     bool greatest) {
    std::vector<std::uint8_t> v(total_, greatest ? 1 : 0);
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t off = w_.loop.size(); off-- > 0;) {
        std::size_t i = prefix_len_ + off;
        std::uint8_t next = greatest ? (b[i] && (a[i] || v[succ(i)]))
                                     : (b[i] || (a[i] && v[succ(i)]));
        if (next != v[i]) {
          v[i] = next;
          changed = true;
        }
      }
    }
    for (std::size_t i = prefix_len_; i-- > 0;) {
      v[i] = greatest ? (b[i] && (a[i] || v[i + 1])) : (b[i] || (a[i] && v[i + 1]));
    }
    return v;
  }

  const LtlFactory& f_;
  const LassoWord& w_;
  std::size_t prefix_len_ = 0;
  std::size_t total_ = 0;
  std::unordered_map<FormulaId, std::vector<std::uint8_t>> memo_;
};

}  // namespace detail

// True iff the omega word prefix . loop^omega satisfies the formula.
inline bool eval_lasso(const LtlFactory& f, const LassoWord& w, FormulaId phi) {
  detail::LassoEvaluator evaluator(f, w);
  return evaluator.value_at_start(phi);
}

}  // namespace resynth
