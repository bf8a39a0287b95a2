#pragma once

#include <array>
#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stlmon/errors.hpp"
#include "stlmon/grid.hpp"

namespace stlmon {

struct Interval {
  int lo = 0;
  int hi = 0;
};

/// Atomic state constraint. Either a closed box (per-dimension intervals,
/// an absent entry leaves that dimension unconstrained) or a linear
/// inequality c.x + d >= 0. Truth at a grid cell is truth at its center.
struct Predicate {
  enum class Kind { Box, Linear };

  Kind kind = Kind::Box;
  std::vector<std::optional<std::array<double, 2>>> box;
  std::vector<double> coeffs;
  double offset = 0.0;

  static Predicate make_box(std::vector<std::optional<std::array<double, 2>>> b) {
    Predicate p;
    p.kind = Kind::Box;
    p.box = std::move(b);
    return p;
  }
  static Predicate make_linear(std::vector<double> c, double d) {
    Predicate p;
    p.kind = Kind::Linear;
    p.coeffs = std::move(c);
    p.offset = d;
    return p;
  }

  int dim() const {
    return static_cast<int>(kind == Kind::Box ? box.size() : coeffs.size());
  }

  bool holds(std::span<const double> x) const {
    if (kind == Kind::Box) {
      for (size_t d = 0; d < box.size(); ++d) {
        if (!box[d]) continue;
        if (x[d] < (*box[d])[0] || x[d] > (*box[d])[1]) return false;
      }
      return true;
    }
    double v = offset;
    for (size_t d = 0; d < coeffs.size(); ++d) v += coeffs[d] * x[d];
    return v >= 0.0;
  }
};

/// Cells whose center satisfies the predicate. Box bounds are clamped to the
/// grid box first; a box that misses the grid entirely yields the empty set.
inline StateSet predicate_region(const Predicate& p, const GridSpec& grid) {
  if (p.dim() != grid.dim())
    throw DimensionMismatch("predicate dimension " + std::to_string(p.dim()) +
                            " does not match grid dimension " + std::to_string(grid.dim()));
  Predicate clamped = p;
  if (clamped.kind == Predicate::Kind::Box) {
    for (int d = 0; d < grid.dim(); ++d) {
      auto& b = clamped.box[static_cast<size_t>(d)];
      if (!b) continue;
      const auto& s = grid.dim_spec(d);
      (*b)[0] = std::max((*b)[0], s.lo);
      (*b)[1] = std::min((*b)[1], s.hi);
    }
  }
  StateSet out(grid.cell_count());
  std::vector<double> x(static_cast<size_t>(grid.dim()));
  for (int c = 0; c < grid.cell_count(); ++c) {
    grid.center_into(c, x);
    if (clamped.holds(x)) out.set(c);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Surface formulae
// ---------------------------------------------------------------------------

/// Formula as written: Boolean connectives plus F/G/U/U' with integer
/// step intervals. Predicates are referenced by name and resolved against
/// the scenario's declarations.
struct SurfaceFormula {
  enum class Kind {
    True,
    Pred,
    Not,
    And,
    Or,
    Implies,
    Eventually,
    Always,
    Until,
    UntilPrime
  };

  Kind kind = Kind::True;
  Interval window;  // Eventually/Always/Until/UntilPrime only
  std::string pred;
  std::vector<SurfaceFormula> children;

  static SurfaceFormula make_true() { return {}; }
  static SurfaceFormula make_pred(std::string name) {
    SurfaceFormula f;
    f.kind = Kind::Pred;
    f.pred = std::move(name);
    return f;
  }
  static SurfaceFormula make_not(SurfaceFormula c) {
    SurfaceFormula f;
    f.kind = Kind::Not;
    f.children.push_back(std::move(c));
    return f;
  }
  static SurfaceFormula make_and(std::vector<SurfaceFormula> cs) {
    SurfaceFormula f;
    f.kind = Kind::And;
    f.children = std::move(cs);
    return f;
  }
  static SurfaceFormula make_or(std::vector<SurfaceFormula> cs) {
    SurfaceFormula f;
    f.kind = Kind::Or;
    f.children = std::move(cs);
    return f;
  }
  static SurfaceFormula make_implies(SurfaceFormula a, SurfaceFormula b) {
    SurfaceFormula f;
    f.kind = Kind::Implies;
    f.children.push_back(std::move(a));
    f.children.push_back(std::move(b));
    return f;
  }
  static SurfaceFormula make_temporal(Kind k, Interval iv, std::vector<SurfaceFormula> cs) {
    SurfaceFormula f;
    f.kind = k;
    f.window = iv;
    f.children = std::move(cs);
    return f;
  }
  static SurfaceFormula eventually(Interval iv, SurfaceFormula c) {
    return make_temporal(Kind::Eventually, iv, {std::move(c)});
  }
  static SurfaceFormula always(Interval iv, SurfaceFormula c) {
    return make_temporal(Kind::Always, iv, {std::move(c)});
  }
  static SurfaceFormula until(Interval iv, SurfaceFormula l, SurfaceFormula r) {
    return make_temporal(Kind::Until, iv, {std::move(l), std::move(r)});
  }
  static SurfaceFormula until_prime(Interval iv, SurfaceFormula l, SurfaceFormula r) {
    return make_temporal(Kind::UntilPrime, iv, {std::move(l), std::move(r)});
  }

  bool is_temporal() const {
    return kind == Kind::Eventually || kind == Kind::Always || kind == Kind::Until ||
           kind == Kind::UntilPrime;
  }

  std::string to_text() const {
    switch (kind) {
      case Kind::True: return "top";
      case Kind::Pred: return pred;
      case Kind::Not: return "!" + wrap(children[0]);
      case Kind::And: return joined(" & ");
      case Kind::Or: return joined(" | ");
      case Kind::Implies: return wrap(children[0]) + " -> " + wrap(children[1]);
      case Kind::Eventually: return "F" + win() + " " + wrap(children[0]);
      case Kind::Always: return "G" + win() + " " + wrap(children[0]);
      case Kind::Until: return "(" + children[0].to_text() + ") U" + win() + " (" + children[1].to_text() + ")";
      case Kind::UntilPrime:
        return "(" + children[0].to_text() + ") U'" + win() + " (" + children[1].to_text() + ")";
    }
    return {};
  }

 private:
  std::string win() const {
    return "[" + std::to_string(window.lo) + "," + std::to_string(window.hi) + "]";
  }
  static std::string wrap(const SurfaceFormula& f) {
    if (f.kind == Kind::True || f.kind == Kind::Pred || f.kind == Kind::Not)
      return f.to_text();
    return "(" + f.to_text() + ")";
  }
  std::string joined(const char* sep) const {
    std::string out;
    for (size_t i = 0; i < children.size(); ++i) {
      if (i) out += sep;
      out += wrap(children[i]);
    }
    return out;
  }
};

namespace detail {

struct Token {
  enum class Type { Ident, Top, Int, Not, AndOp, OrOp, Implies, LParen, RParen, LBrack, RBrack, Comma, End };
  Type type = Type::End;
  std::string text;
  long value = 0;
  size_t pos = 0;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) { advance(); }

  const Token& peek() const { return tok_; }

  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw SyntaxError(msg + " at position " + std::to_string(tok_.pos));
  }

 private:
  void advance() {
    while (i_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[i_]))) ++i_;
    tok_ = Token{};
    tok_.pos = i_;
    if (i_ >= text_.size()) return;
    char c = text_[i_];
    auto single = [&](Token::Type t) {
      tok_.type = t;
      tok_.text = std::string(1, c);
      ++i_;
    };
    switch (c) {
      case '!': single(Token::Type::Not); return;
      case '&': single(Token::Type::AndOp); return;
      case '|': single(Token::Type::OrOp); return;
      case '(': single(Token::Type::LParen); return;
      case ')': single(Token::Type::RParen); return;
      case '[': single(Token::Type::LBrack); return;
      case ']': single(Token::Type::RBrack); return;
      case ',': single(Token::Type::Comma); return;
      default: break;
    }
    if (c == '-' && i_ + 1 < text_.size() && text_[i_ + 1] == '>') {
      tok_.type = Token::Type::Implies;
      tok_.text = "->";
      i_ += 2;
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t start = i_;
      while (i_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[i_]))) ++i_;
      tok_.type = Token::Type::Int;
      tok_.text = std::string(text_.substr(start, i_ - start));
      try {
        tok_.value = std::stol(tok_.text);
      } catch (const std::out_of_range&) {
        throw SyntaxError("interval bound '" + tok_.text + "' is out of range at position " +
                          std::to_string(start));
      }
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = i_;
      while (i_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[i_])) || text_[i_] == '_'))
        ++i_;
      tok_.text = std::string(text_.substr(start, i_ - start));
      if (tok_.text == "U" && i_ < text_.size() && text_[i_] == '\'') {
        tok_.text = "U'";
        ++i_;
      }
      tok_.type = tok_.text == "top" ? Token::Type::Top : Token::Type::Ident;
      return;
    }
    throw SyntaxError(std::string("unexpected character '") + c + "' at position " +
                      std::to_string(i_));
  }

  std::string_view text_;
  size_t i_ = 0;
  Token tok_;
};

class Parser {
 public:
  Parser(std::string_view text, const std::set<std::string>* declared)
      : lex_(text), declared_(declared) {}

  SurfaceFormula parse() {
    SurfaceFormula f = parse_or();
    if (lex_.peek().type != Token::Type::End) lex_.fail("trailing input");
    return f;
  }

 private:
  using Kind = SurfaceFormula::Kind;

  SurfaceFormula parse_or() {
    std::vector<SurfaceFormula> parts;
    parts.push_back(parse_implies_operand());
    while (lex_.peek().type == Token::Type::OrOp) {
      lex_.take();
      parts.push_back(parse_implies_operand());
    }
    if (parts.size() == 1) return std::move(parts[0]);
    return SurfaceFormula::make_or(std::move(parts));
  }

  // "->" binds looser than "&", tighter than "|", right-associative.
  SurfaceFormula parse_implies_operand() {
    SurfaceFormula lhs = parse_and();
    if (lex_.peek().type == Token::Type::Implies) {
      lex_.take();
      SurfaceFormula rhs = parse_implies_operand();
      return SurfaceFormula::make_implies(std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  SurfaceFormula parse_and() {
    std::vector<SurfaceFormula> parts;
    parts.push_back(parse_unary());
    while (lex_.peek().type == Token::Type::AndOp) {
      lex_.take();
      parts.push_back(parse_unary());
    }
    if (parts.size() == 1) return std::move(parts[0]);
    return SurfaceFormula::make_and(std::move(parts));
  }

  SurfaceFormula parse_unary() {
    const Token& t = lex_.peek();
    if (t.type == Token::Type::Not) {
      lex_.take();
      return SurfaceFormula::make_not(parse_unary());
    }
    if (t.type == Token::Type::Ident && (t.text == "G" || t.text == "F")) {
      // G/F are operators only when an interval follows; otherwise they are
      // ordinary predicate names.
      bool is_g = t.text == "G";
      Lexer save = lex_;
      lex_.take();
      if (lex_.peek().type == Token::Type::LBrack) {
        Interval iv = parse_interval();
        SurfaceFormula child = parse_unary();
        return SurfaceFormula::make_temporal(is_g ? Kind::Always : Kind::Eventually, iv,
                                             {std::move(child)});
      }
      lex_ = save;
    }
    return parse_atom();
  }

  SurfaceFormula parse_atom() {
    Token t = lex_.take();
    switch (t.type) {
      case Token::Type::Top:
        return SurfaceFormula::make_true();
      case Token::Type::Ident: {
        if (declared_ && !declared_->count(t.text))
          throw UnknownPredicate("undeclared predicate '" + t.text + "'");
        return SurfaceFormula::make_pred(t.text);
      }
      case Token::Type::LParen: {
        SurfaceFormula inner = parse_or();
        expect(Token::Type::RParen, "expected ')'");
        const Token& nxt = lex_.peek();
        if (nxt.type == Token::Type::Ident && (nxt.text == "U" || nxt.text == "U'")) {
          bool prime = nxt.text == "U'";
          lex_.take();
          Interval iv = parse_interval();
          expect(Token::Type::LParen, "expected '(' before until right operand");
          SurfaceFormula rhs = parse_or();
          expect(Token::Type::RParen, "expected ')' after until right operand");
          return SurfaceFormula::make_temporal(prime ? Kind::UntilPrime : Kind::Until, iv,
                                               {std::move(inner), std::move(rhs)});
        }
        return inner;
      }
      default:
        throw SyntaxError("unexpected token '" + t.text + "' at position " +
                          std::to_string(t.pos));
    }
  }

  Interval parse_interval() {
    expect(Token::Type::LBrack, "expected '['");
    long a = expect(Token::Type::Int, "expected interval lower bound").value;
    expect(Token::Type::Comma, "expected ','");
    long b = expect(Token::Type::Int, "expected interval upper bound").value;
    expect(Token::Type::RBrack, "expected ']'");
    if (a > b)
      throw IntervalOrderError("interval [" + std::to_string(a) + "," + std::to_string(b) +
                               "] has lower bound above upper bound");
    return Interval{static_cast<int>(a), static_cast<int>(b)};
  }

  Token expect(Token::Type type, const char* msg) {
    if (lex_.peek().type != type) lex_.fail(msg);
    return lex_.take();
  }

  Lexer lex_;
  const std::set<std::string>* declared_;
};

}  // namespace detail

inline SurfaceFormula parse_formula(std::string_view text) {
  return detail::Parser(text, nullptr).parse();
}

/// Parse and check every predicate name against the declared set.
inline SurfaceFormula parse_formula(std::string_view text, const std::set<std::string>& declared) {
  return detail::Parser(text, &declared).parse();
}

// ---------------------------------------------------------------------------
// Negation normal form
// ---------------------------------------------------------------------------

namespace detail {

inline SurfaceFormula nnf(const SurfaceFormula& f, bool negated) {
  using Kind = SurfaceFormula::Kind;
  switch (f.kind) {
    case Kind::True:
      return negated ? SurfaceFormula::make_not(SurfaceFormula::make_true())
                     : SurfaceFormula::make_true();
    case Kind::Pred:
      return negated ? SurfaceFormula::make_not(SurfaceFormula::make_pred(f.pred))
                     : SurfaceFormula::make_pred(f.pred);
    case Kind::Not:
      return nnf(f.children[0], !negated);
    case Kind::And:
    case Kind::Or: {
      bool and_out = (f.kind == Kind::And) != negated;
      std::vector<SurfaceFormula> cs;
      cs.reserve(f.children.size());
      for (const auto& c : f.children) cs.push_back(nnf(c, negated));
      return and_out ? SurfaceFormula::make_and(std::move(cs))
                     : SurfaceFormula::make_or(std::move(cs));
    }
    case Kind::Implies: {
      // a -> b  ==  !a | b
      std::vector<SurfaceFormula> cs;
      cs.push_back(nnf(f.children[0], !negated));
      cs.push_back(nnf(f.children[1], negated));
      return negated ? SurfaceFormula::make_and(std::move(cs))
                     : SurfaceFormula::make_or(std::move(cs));
    }
    case Kind::Eventually:
    case Kind::Always:
    case Kind::Until:
    case Kind::UntilPrime: {
      if (negated)
        throw NegatedTemporalError("negation applied to temporal operator in '" + f.to_text() +
                                   "'");
      std::vector<SurfaceFormula> cs;
      cs.reserve(f.children.size());
      for (const auto& c : f.children) cs.push_back(nnf(c, false));
      return SurfaceFormula::make_temporal(f.kind, f.window, std::move(cs));
    }
  }
  throw Error("unreachable formula kind");
}

}  // namespace detail

/// Push negation down to predicate leaves; eliminates Implies. Rejects
/// negation over temporal operators, which the accepted fragment forbids.
inline SurfaceFormula to_nnf(const SurfaceFormula& f) { return detail::nnf(f, false); }

// ---------------------------------------------------------------------------
// Core formulae
// ---------------------------------------------------------------------------

/// Normalized formula: region leaves, n-ary conjunction, G, and U' only.
/// Produced by desugar(); the root is always an And node.
struct CoreFormula {
  enum class Kind { Region, And, Always, UntilPrime };

  Kind kind = Kind::Region;
  Interval window;
  StateSet region;    // Region only
  std::string label;  // Region only, for dumps
  std::vector<CoreFormula> children;

  static CoreFormula make_region(StateSet s, std::string label) {
    CoreFormula f;
    f.kind = Kind::Region;
    f.region = std::move(s);
    f.label = std::move(label);
    return f;
  }
  static CoreFormula make_and(std::vector<CoreFormula> cs) {
    CoreFormula f;
    f.kind = Kind::And;
    f.children = std::move(cs);
    return f;
  }
  static CoreFormula make_always(Interval iv, CoreFormula c) {
    CoreFormula f;
    f.kind = Kind::Always;
    f.window = iv;
    f.children.push_back(std::move(c));
    return f;
  }
  static CoreFormula make_until_prime(Interval iv, CoreFormula l, CoreFormula r) {
    CoreFormula f;
    f.kind = Kind::UntilPrime;
    f.window = iv;
    f.children.push_back(std::move(l));
    f.children.push_back(std::move(r));
    return f;
  }
};

namespace detail {

inline bool is_boolean_layer(const SurfaceFormula& f) {
  using Kind = SurfaceFormula::Kind;
  switch (f.kind) {
    case Kind::True:
    case Kind::Pred:
      return true;
    case Kind::Not:
    case Kind::And:
    case Kind::Or:
    case Kind::Implies: {
      for (const auto& c : f.children)
        if (!is_boolean_layer(c)) return false;
      return true;
    }
    default:
      return false;
  }
}

inline const Predicate& lookup_pred(const std::map<std::string, Predicate>& preds,
                                    const std::string& name) {
  auto it = preds.find(name);
  if (it == preds.end()) throw UnknownPredicate("undeclared predicate '" + name + "'");
  return it->second;
}

inline StateSet boolean_region(const SurfaceFormula& f,
                               const std::map<std::string, Predicate>& preds,
                               const GridSpec& grid) {
  using Kind = SurfaceFormula::Kind;
  switch (f.kind) {
    case Kind::True:
      return StateSet::full(grid.cell_count());
    case Kind::Pred:
      return predicate_region(lookup_pred(preds, f.pred), grid);
    case Kind::Not:
      return boolean_region(f.children[0], preds, grid).complement();
    case Kind::And: {
      StateSet out = StateSet::full(grid.cell_count());
      for (const auto& c : f.children) out &= boolean_region(c, preds, grid);
      return out;
    }
    case Kind::Or: {
      StateSet out(grid.cell_count());
      for (const auto& c : f.children) out |= boolean_region(c, preds, grid);
      return out;
    }
    case Kind::Implies: {
      StateSet out = boolean_region(f.children[0], preds, grid).complement();
      out |= boolean_region(f.children[1], preds, grid);
      return out;
    }
    default:
      throw FragmentError("temporal operator inside Boolean layer");
  }
}

inline std::string boolean_label(const SurfaceFormula& f) {
  using Kind = SurfaceFormula::Kind;
  switch (f.kind) {
    case Kind::True: return "top";
    case Kind::Pred: return f.pred;
    case Kind::Not: return "!" + boolean_label(f.children[0]);
    case Kind::And:
    case Kind::Or: {
      std::string sep = f.kind == Kind::And ? " & " : " | ";
      std::string out = "(";
      for (size_t i = 0; i < f.children.size(); ++i) {
        if (i) out += sep;
        out += boolean_label(f.children[i]);
      }
      return out + ")";
    }
    case Kind::Implies:
      return "(" + boolean_label(f.children[0]) + " -> " + boolean_label(f.children[1]) + ")";
    default:
      return "?";
  }
}

inline CoreFormula desugar_rec(const SurfaceFormula& f,
                               const std::map<std::string, Predicate>& preds,
                               const GridSpec& grid) {
  using Kind = SurfaceFormula::Kind;
  if (is_boolean_layer(f))
    return CoreFormula::make_region(boolean_region(f, preds, grid), boolean_label(f));
  switch (f.kind) {
    case Kind::And: {
      // Flatten nested conjunction so And is n-ary, children in source order.
      std::vector<CoreFormula> cs;
      for (const auto& c : f.children) {
        CoreFormula cc = desugar_rec(c, preds, grid);
        if (cc.kind == CoreFormula::Kind::And) {
          for (auto& g : cc.children) cs.push_back(std::move(g));
        } else {
          cs.push_back(std::move(cc));
        }
      }
      return CoreFormula::make_and(std::move(cs));
    }
    case Kind::Always:
      return CoreFormula::make_always(f.window, desugar_rec(f.children[0], preds, grid));
    case Kind::Eventually:
      // F[a,b] p  ==  top U'[a,b] p
      return CoreFormula::make_until_prime(
          f.window, CoreFormula::make_region(StateSet::full(grid.cell_count()), "top"),
          desugar_rec(f.children[0], preds, grid));
    case Kind::Until: {
      // p U[a,b] q  ==  (p U'[a,b] q) & G[0,a] p
      std::vector<CoreFormula> cs;
      cs.push_back(CoreFormula::make_until_prime(f.window, desugar_rec(f.children[0], preds, grid),
                                                 desugar_rec(f.children[1], preds, grid)));
      cs.push_back(CoreFormula::make_always(Interval{0, f.window.lo},
                                            desugar_rec(f.children[0], preds, grid)));
      return CoreFormula::make_and(std::move(cs));
    }
    case Kind::UntilPrime:
      return CoreFormula::make_until_prime(f.window, desugar_rec(f.children[0], preds, grid),
                                           desugar_rec(f.children[1], preds, grid));
    case Kind::Or:
    case Kind::Implies:
      throw FragmentError("disjunction/implication over temporal subformulae is outside the "
                          "accepted fragment: " +
                          f.to_text());
    case Kind::Not:
      throw FragmentError("formula is not in negation normal form: " + f.to_text());
    default:
      throw Error("unreachable surface kind");
  }
}

}  // namespace detail

/// Rewrite an NNF surface formula into the core grammar: F and U eliminated,
/// Boolean subtrees collapsed into region leaves, root wrapped in And.
inline CoreFormula desugar(const SurfaceFormula& f, const std::map<std::string, Predicate>& preds,
                           const GridSpec& grid) {
  CoreFormula core = detail::desugar_rec(f, preds, grid);
  if (core.kind != CoreFormula::Kind::And) {
    std::vector<CoreFormula> cs;
    cs.push_back(std::move(core));
    return CoreFormula::make_and(std::move(cs));
  }
  return core;
}

}  // namespace stlmon
