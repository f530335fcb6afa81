// Copyright 2026 The dlc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dlc/formula.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <set>

#include "dlc/error.hpp"

namespace dlc {

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

// ---------------------------------------------------------------------------
// Construction and equality

Term Term::constant(double value) { return Term(std::make_shared<TermNode>(TermNode{Const{value}})); }
Term Term::input(Which which, std::size_t index) {
  return Term(std::make_shared<TermNode>(TermNode{InputRef{which, index}}));
}
Term Term::net_out(Which which, std::size_t k) { return Term(std::make_shared<TermNode>(TermNode{NetOut{which, k}})); }
Term Term::group(std::string name) {
  return Term(std::make_shared<TermNode>(TermNode{GroupProb{std::move(name)}}));
}
Term Term::inf_norm_diff() { return Term(std::make_shared<TermNode>(TermNode{InfNormDiff{}})); }
Term Term::negate(Term operand) {
  return Term(std::make_shared<TermNode>(TermNode{Negate{std::move(operand)}}));
}
Term Term::binary(char op, Term lhs, Term rhs) {
  if (op != '+' && op != '-' && op != '*' && op != '/') throw Error(std::string("unknown arithmetic operator ") + op);
  return Term(std::make_shared<TermNode>(TermNode{Binary{op, std::move(lhs), std::move(rhs)}}));
}

const Term::Node& Term::node() const { return node_->node; }

bool Term::is_leaf() const {
  return std::holds_alternative<InputRef>(node()) || std::holds_alternative<NetOut>(node()) ||
         std::holds_alternative<GroupProb>(node()) || std::holds_alternative<InfNormDiff>(node());
}

bool operator==(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return true;
  if (a.node().index() != b.node().index()) return false;
  return std::visit(
      Overloaded{
          [&](const Term::Const& x) { return x.value == std::get<Term::Const>(b.node()).value; },
          [&](const Term::InputRef& x) {
            const auto& y = std::get<Term::InputRef>(b.node());
            return x.which == y.which && x.index == y.index;
          },
          [&](const Term::NetOut& x) {
            const auto& y = std::get<Term::NetOut>(b.node());
            return x.which == y.which && x.k == y.k;
          },
          [&](const Term::GroupProb& x) { return x.group == std::get<Term::GroupProb>(b.node()).group; },
          [&](const Term::InfNormDiff&) { return true; },
          [&](const Term::Negate& x) { return x.operand == std::get<Term::Negate>(b.node()).operand; },
          [&](const Term::Binary& x) {
            const auto& y = std::get<Term::Binary>(b.node());
            return x.op == y.op && x.lhs == y.lhs && x.rhs == y.rhs;
          },
      },
      a.node());
}

Formula Formula::compare(CmpOp op, Term lhs, Term rhs) {
  return Formula(std::make_shared<FormulaNode>(FormulaNode{Compare{op, std::move(lhs), std::move(rhs)}}));
}
Formula Formula::conj(Formula a, Formula b) {
  return Formula(std::make_shared<FormulaNode>(FormulaNode{And{std::move(a), std::move(b)}}));
}
Formula Formula::disj(Formula a, Formula b) {
  return Formula(std::make_shared<FormulaNode>(FormulaNode{Or{std::move(a), std::move(b)}}));
}
Formula Formula::negate(Formula a) { return Formula(std::make_shared<FormulaNode>(FormulaNode{Not{std::move(a)}})); }
Formula Formula::implies(Formula a, Formula b) {
  return Formula(std::make_shared<FormulaNode>(FormulaNode{Implies{std::move(a), std::move(b)}}));
}
Formula Formula::iff(Formula a, Formula b) {
  return Formula(std::make_shared<FormulaNode>(FormulaNode{Iff{std::move(a), std::move(b)}}));
}
Formula Formula::big_and(std::vector<Formula> items) {
  if (items.empty()) throw Error("big conjunction over an empty index set");
  return Formula(std::make_shared<FormulaNode>(FormulaNode{BigAnd{std::move(items)}}));
}
Formula Formula::big_or(std::vector<Formula> items) {
  if (items.empty()) throw Error("big disjunction over an empty index set");
  return Formula(std::make_shared<FormulaNode>(FormulaNode{BigOr{std::move(items)}}));
}
Formula Formula::prop(std::string name) {
  return Formula(std::make_shared<FormulaNode>(FormulaNode{PropVar{std::move(name)}}));
}
Formula Formula::forall_ball(double epsilon, Formula body) {
  if (!(epsilon > 0.0)) throw DomainError("forall_ball radius must be positive");
  return Formula(std::make_shared<FormulaNode>(FormulaNode{ForallBall{epsilon, std::move(body)}}));
}

const Formula::Node& Formula::node() const { return node_->node; }

namespace {

bool same_items(const std::vector<Formula>& a, const std::vector<Formula>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!(a[i] == b[i])) return false;
  }
  return true;
}

}  // namespace

bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  if (a.node().index() != b.node().index()) return false;
  return std::visit(
      Overloaded{
          [&](const Formula::Compare& x) {
            const auto& y = std::get<Formula::Compare>(b.node());
            return x.op == y.op && x.lhs == y.lhs && x.rhs == y.rhs;
          },
          [&](const Formula::And& x) {
            const auto& y = std::get<Formula::And>(b.node());
            return x.lhs == y.lhs && x.rhs == y.rhs;
          },
          [&](const Formula::Or& x) {
            const auto& y = std::get<Formula::Or>(b.node());
            return x.lhs == y.lhs && x.rhs == y.rhs;
          },
          [&](const Formula::Not& x) { return x.operand == std::get<Formula::Not>(b.node()).operand; },
          [&](const Formula::Implies& x) {
            const auto& y = std::get<Formula::Implies>(b.node());
            return x.lhs == y.lhs && x.rhs == y.rhs;
          },
          [&](const Formula::Iff& x) {
            const auto& y = std::get<Formula::Iff>(b.node());
            return x.lhs == y.lhs && x.rhs == y.rhs;
          },
          [&](const Formula::BigAnd& x) { return same_items(x.items, std::get<Formula::BigAnd>(b.node()).items); },
          [&](const Formula::BigOr& x) { return same_items(x.items, std::get<Formula::BigOr>(b.node()).items); },
          [&](const Formula::PropVar& x) { return x.name == std::get<Formula::PropVar>(b.node()).name; },
          [&](const Formula::ForallBall& x) {
            const auto& y = std::get<Formula::ForallBall>(b.node());
            return x.epsilon == y.epsilon && x.body == y.body;
          },
      },
      a.node());
}

// ---------------------------------------------------------------------------
// Lexer

namespace {

enum class Tok {
  kEnd,
  kNumber,
  kIdent,
  kLParen,
  kRParen,
  kLBracket,
  kRBracket,
  kComma,
  kColon,
  kPlus,
  kMinus,
  kStar,
  kSlash,
  kLe,
  kLt,
  kGe,
  kGt,
  kEq,
  kNe,
  kAnd,
  kOr,
  kNot,
  kImplies,
  kIff,
};

struct Token {
  Tok kind;
  std::string text;
  double number = 0.0;
  std::size_t line = 1;
  std::size_t column = 1;
};

struct Symbol {
  std::string_view spelling;
  Tok kind;
};

// Longest spellings first.
constexpr Symbol kSymbols[] = {
    {"<->", Tok::kIff},      {"->", Tok::kImplies},   {"<=", Tok::kLe},     {">=", Tok::kGe},
    {"==", Tok::kEq},        {"!=", Tok::kNe},        {"<", Tok::kLt},      {">", Tok::kGt},
    {"&", Tok::kAnd},        {"|", Tok::kOr},         {"!", Tok::kNot},     {"(", Tok::kLParen},
    {")", Tok::kRParen},     {"[", Tok::kLBracket},   {"]", Tok::kRBracket}, {",", Tok::kComma},
    {":", Tok::kColon},      {"+", Tok::kPlus},       {"-", Tok::kMinus},   {"*", Tok::kStar},
    {"/", Tok::kSlash},      {"∧", Tok::kAnd},   {"∨", Tok::kOr}, {"¬", Tok::kNot},
    {"⇒", Tok::kImplies}, {"→", Tok::kImplies}, {"⇔", Tok::kIff}, {"↔", Tok::kIff},
    {"≤", Tok::kLe},    {"≥", Tok::kGe},    {"≠", Tok::kNe},
};

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0, line = 1, col = 1;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (src[i + k] == '\n') {
        ++line;
        col = 1;
      } else if ((static_cast<unsigned char>(src[i + k]) & 0xC0) != 0x80) {
        ++col;
      }
    }
    i += n;
  };
  while (i < src.size()) {
    const char c = src[i];
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      advance(1);
      continue;
    }
    Token tok{Tok::kEnd, {}, 0.0, line, col};
    if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && i + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
      std::size_t j = i;
      while (j < src.size() && (std::isdigit(static_cast<unsigned char>(src[j])) || src[j] == '.')) ++j;
      if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
        if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
          j = k;
          while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
        }
      }
      tok.kind = Tok::kNumber;
      tok.text = std::string(src.substr(i, j - i));
      auto [ptr, ec] = std::from_chars(src.data() + i, src.data() + j, tok.number);
      if (ec != std::errc() || ptr != src.data() + j) throw SyntaxError("malformed number '" + tok.text + "'", line, col);
      advance(j - i);
      out.push_back(std::move(tok));
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      tok.kind = Tok::kIdent;
      tok.text = std::string(src.substr(i, j - i));
      advance(j - i);
      out.push_back(std::move(tok));
      continue;
    }
    bool matched = false;
    for (const Symbol& sym : kSymbols) {
      if (src.substr(i, sym.spelling.size()) == sym.spelling) {
        tok.kind = sym.kind;
        tok.text = std::string(sym.spelling);
        advance(sym.spelling.size());
        out.push_back(std::move(tok));
        matched = true;
        break;
      }
    }
    if (!matched) throw SyntaxError(std::string("unexpected character '") + c + "'", line, col);
  }
  out.push_back(Token{Tok::kEnd, "<end>", 0.0, line, col});
  return out;
}

bool is_keyword(const std::string& s) {
  return s == "N" || s == "x0" || s == "xadv" || s == "group" || s == "inf_norm_diff" || s == "forall_ball" ||
         s == "all" || s == "any";
}

// ---------------------------------------------------------------------------
// Parser

class Parser {
 public:
  explicit Parser(std::string_view src) : toks_(lex(src)) {}

  Formula formula_top() {
    Formula f = [&] {
      if (peek().kind == Tok::kIdent && peek().text == "forall_ball") {
        next();
        expect(Tok::kLParen, "'('");
        double eps = signed_number();
        expect(Tok::kRParen, "')'");
        expect(Tok::kColon, "':'");
        Formula body = iff();
        if (!(eps > 0.0)) throw SyntaxError("forall_ball radius must be positive", toks_[0].line, toks_[0].column);
        return Formula::forall_ball(eps, body);
      }
      return iff();
    }();
    expect(Tok::kEnd, "end of input");
    return f;
  }

  Term term_top() {
    Term t = term();
    expect(Tok::kEnd, "end of input");
    return t;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }
  const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  bool accept(Tok kind) {
    if (peek().kind != kind) return false;
    next();
    return true;
  }
  const Token& expect(Tok kind, const char* what) {
    if (peek().kind != kind) fail(std::string("expected ") + what + ", found '" + peek().text + "'");
    return next();
  }
  [[noreturn]] void fail(const std::string& msg) const { throw SyntaxError(msg, peek().line, peek().column); }

  double signed_number() {
    bool neg = accept(Tok::kMinus);
    double v = expect(Tok::kNumber, "number").number;
    return neg ? -v : v;
  }

  std::size_t index() {
    const Token& t = expect(Tok::kNumber, "index");
    if (t.number < 0 || t.number != std::floor(t.number) || t.text.find_first_of(".eE") != std::string::npos) {
      throw SyntaxError("index must be a non-negative integer", t.line, t.column);
    }
    return static_cast<std::size_t>(t.number);
  }

  Formula iff() {
    Formula lhs = imp();
    while (accept(Tok::kIff)) lhs = Formula::iff(lhs, imp());
    return lhs;
  }

  Formula imp() {
    Formula lhs = disj();
    if (accept(Tok::kImplies)) return Formula::implies(lhs, imp());
    return lhs;
  }

  Formula disj() {
    Formula lhs = conj();
    while (accept(Tok::kOr)) lhs = Formula::disj(lhs, conj());
    return lhs;
  }

  Formula conj() {
    Formula lhs = unary();
    while (accept(Tok::kAnd)) lhs = Formula::conj(lhs, unary());
    return lhs;
  }

  static std::optional<CmpOp> cmp_of(Tok kind) {
    switch (kind) {
      case Tok::kLe: return CmpOp::kLe;
      case Tok::kLt: return CmpOp::kLt;
      case Tok::kGe: return CmpOp::kGe;
      case Tok::kGt: return CmpOp::kGt;
      case Tok::kEq: return CmpOp::kEq;
      case Tok::kNe: return CmpOp::kNe;
      default: return std::nullopt;
    }
  }

  Formula unary() {
    if (accept(Tok::kNot)) return Formula::negate(unary());
    const Token& t = peek();
    if (t.kind == Tok::kIdent && (t.text == "all" || t.text == "any") && peek(1).kind == Tok::kLParen) {
      const bool is_all = t.text == "all";
      next();
      next();
      std::vector<Formula> items{iff()};
      while (accept(Tok::kComma)) items.push_back(iff());
      expect(Tok::kRParen, "')'");
      return is_all ? Formula::big_and(std::move(items)) : Formula::big_or(std::move(items));
    }
    if (t.kind == Tok::kIdent && !is_keyword(t.text) &&
        (peek(1).kind == Tok::kLParen || peek(1).kind == Tok::kLBracket)) {
      fail("unknown identifier '" + t.text + "'");
    }
    // A comparison atom; fall back to a parenthesised formula or a variable.
    const std::size_t saved = pos_;
    std::optional<Term> lhs;
    try {
      lhs = term();
    } catch (const SyntaxError&) {
      pos_ = saved;
    }
    if (lhs) {
      if (auto op = cmp_of(peek().kind)) {
        next();
        return Formula::compare(*op, *lhs, term());
      }
      pos_ = saved;
    }
    if (accept(Tok::kLParen)) {
      Formula inner = iff();
      expect(Tok::kRParen, "')'");
      return inner;
    }
    if (t.kind == Tok::kIdent) {
      if (is_keyword(t.text)) fail("'" + t.text + "' cannot be used as a propositional variable");
      next();
      return Formula::prop(toks_[pos_ - 1].text);
    }
    fail("expected formula, found '" + t.text + "'");
  }

  Term term() {
    Term lhs = product();
    while (peek().kind == Tok::kPlus || peek().kind == Tok::kMinus) {
      const char op = next().kind == Tok::kPlus ? '+' : '-';
      lhs = Term::binary(op, lhs, product());
    }
    return lhs;
  }

  Term product() {
    Term lhs = term_unary();
    while (peek().kind == Tok::kStar || peek().kind == Tok::kSlash) {
      const char op = next().kind == Tok::kStar ? '*' : '/';
      lhs = Term::binary(op, lhs, term_unary());
    }
    return lhs;
  }

  Term term_unary() {
    if (accept(Tok::kMinus)) {
      if (peek().kind == Tok::kNumber) return Term::constant(-next().number);
      return Term::negate(term_unary());
    }
    return primary();
  }

  Which which() {
    const Token& t = expect(Tok::kIdent, "x0 or xadv");
    if (t.text == "x0") return Which::kX0;
    if (t.text == "xadv") return Which::kXAdv;
    throw SyntaxError("unknown identifier '" + t.text + "' (expected x0 or xadv)", t.line, t.column);
  }

  Term primary() {
    const Token& t = peek();
    if (t.kind == Tok::kNumber) return Term::constant(next().number);
    if (accept(Tok::kLParen)) {
      Term inner = term();
      expect(Tok::kRParen, "')'");
      return inner;
    }
    if (t.kind != Tok::kIdent) fail("expected term, found '" + t.text + "'");
    const std::string name = t.text;
    if (name == "N") {
      next();
      expect(Tok::kLParen, "'('");
      Which w = which();
      expect(Tok::kRParen, "')'");
      expect(Tok::kLBracket, "'['");
      std::size_t k = index();
      expect(Tok::kRBracket, "']'");
      return Term::net_out(w, k);
    }
    if (name == "x0" || name == "xadv") {
      next();
      expect(Tok::kLBracket, "'['");
      std::size_t i = index();
      expect(Tok::kRBracket, "']'");
      return Term::input(name == "x0" ? Which::kX0 : Which::kXAdv, i);
    }
    if (name == "group") {
      next();
      expect(Tok::kLParen, "'('");
      std::string group = expect(Tok::kIdent, "group name").text;
      expect(Tok::kRParen, "')'");
      return Term::group(group);
    }
    if (name == "inf_norm_diff") {
      next();
      expect(Tok::kLParen, "'('");
      expect(Tok::kRParen, "')'");
      return Term::inf_norm_diff();
    }
    fail("expected term, found '" + name + "'");
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Printer

std::string number_text(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string which_text(Which w) { return w == Which::kX0 ? "x0" : "xadv"; }

void print_term(const Term& t, int ctx, std::string& out) {
  std::visit(Overloaded{
                 [&](const Term::Const& c) { out += number_text(c.value); },
                 [&](const Term::InputRef& r) { out += which_text(r.which) + "[" + std::to_string(r.index) + "]"; },
                 [&](const Term::NetOut& n) { out += "N(" + which_text(n.which) + ")[" + std::to_string(n.k) + "]"; },
                 [&](const Term::GroupProb& g) { out += "group(" + g.group + ")"; },
                 [&](const Term::InfNormDiff&) { out += "inf_norm_diff()"; },
                 [&](const Term::Negate& n) {
                   out += '-';
                   const bool wrap = std::holds_alternative<Term::Const>(n.operand.node());
                   if (wrap) out += '(';
                   print_term(n.operand, wrap ? 0 : 3, out);
                   if (wrap) out += ')';
                 },
                 [&](const Term::Binary& b) {
                   const int prec = (b.op == '+' || b.op == '-') ? 1 : 2;
                   if (prec < ctx) out += '(';
                   print_term(b.lhs, prec, out);
                   out += ' ';
                   out += b.op;
                   out += ' ';
                   print_term(b.rhs, prec + 1, out);
                   if (prec < ctx) out += ')';
                 },
             },
             t.node());
}

void print_formula(const Formula& f, int ctx, std::string& out) {
  auto binary = [&](const Formula& l, const Formula& r, int prec, int lctx, int rctx, const char* sym) {
    if (prec < ctx) out += '(';
    print_formula(l, lctx, out);
    out += sym;
    print_formula(r, rctx, out);
    if (prec < ctx) out += ')';
  };
  auto list = [&](const std::vector<Formula>& items, const char* head) {
    out += head;
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (i) out += ", ";
      print_formula(items[i], 0, out);
    }
    out += ')';
  };
  std::visit(Overloaded{
                 [&](const Formula::Compare& c) {
                   print_term(c.lhs, 0, out);
                   out += ' ';
                   out += cmp_symbol(c.op);
                   out += ' ';
                   print_term(c.rhs, 0, out);
                 },
                 [&](const Formula::Iff& x) { binary(x.lhs, x.rhs, 1, 1, 2, " <-> "); },
                 [&](const Formula::Implies& x) { binary(x.lhs, x.rhs, 2, 3, 2, " -> "); },
                 [&](const Formula::Or& x) { binary(x.lhs, x.rhs, 3, 3, 4, " | "); },
                 [&](const Formula::And& x) { binary(x.lhs, x.rhs, 4, 4, 5, " & "); },
                 [&](const Formula::Not& x) {
                   out += '!';
                   print_formula(x.operand, 5, out);
                 },
                 [&](const Formula::BigAnd& x) { list(x.items, "all("); },
                 [&](const Formula::BigOr& x) { list(x.items, "any("); },
                 [&](const Formula::PropVar& p) { out += p.name; },
                 [&](const Formula::ForallBall& q) {
                   if (ctx > 0) out += '(';
                   out += "forall_ball(" + number_text(q.epsilon) + "): ";
                   print_formula(q.body, 0, out);
                   if (ctx > 0) out += ')';
                 },
             },
             f.node());
}

}  // namespace

Formula parse_formula(std::string_view text) { return Parser(text).formula_top(); }
Term parse_term(std::string_view text) { return Parser(text).term_top(); }

std::string_view cmp_symbol(CmpOp op) {
  switch (op) {
    case CmpOp::kLe: return "<=";
    case CmpOp::kLt: return "<";
    case CmpOp::kGe: return ">=";
    case CmpOp::kGt: return ">";
    case CmpOp::kEq: return "==";
    case CmpOp::kNe: return "!=";
  }
  return "?";
}

std::string to_string(const Formula& f) {
  std::string out;
  print_formula(f, 0, out);
  return out;
}

std::string to_string(const Term& t) {
  std::string out;
  print_term(t, 0, out);
  return out;
}

// ---------------------------------------------------------------------------
// Negation normal form

namespace {

Formula flip(const Formula::Compare& c) {
  switch (c.op) {
    case CmpOp::kLe: return Formula::compare(CmpOp::kLt, c.rhs, c.lhs);
    case CmpOp::kLt: return Formula::compare(CmpOp::kLe, c.rhs, c.lhs);
    case CmpOp::kGe: return Formula::compare(CmpOp::kLt, c.lhs, c.rhs);
    case CmpOp::kGt: return Formula::compare(CmpOp::kLe, c.lhs, c.rhs);
    case CmpOp::kEq: return Formula::compare(CmpOp::kNe, c.lhs, c.rhs);
    case CmpOp::kNe: return Formula::compare(CmpOp::kEq, c.lhs, c.rhs);
  }
  throw Error("unreachable");
}

Formula nnf(const Formula& f, bool negated) {
  return std::visit(
      Overloaded{
          [&](const Formula::Compare& c) { return negated ? flip(c) : f; },
          [&](const Formula::And& x) {
            return negated ? Formula::disj(nnf(x.lhs, true), nnf(x.rhs, true))
                           : Formula::conj(nnf(x.lhs, false), nnf(x.rhs, false));
          },
          [&](const Formula::Or& x) {
            return negated ? Formula::conj(nnf(x.lhs, true), nnf(x.rhs, true))
                           : Formula::disj(nnf(x.lhs, false), nnf(x.rhs, false));
          },
          [&](const Formula::Not& x) { return nnf(x.operand, !negated); },
          [&](const Formula::Implies& x) {
            return negated ? Formula::conj(nnf(x.lhs, false), nnf(x.rhs, true))
                           : Formula::implies(nnf(x.lhs, false), nnf(x.rhs, false));
          },
          [&](const Formula::Iff& x) {
            if (!negated) return Formula::iff(nnf(x.lhs, false), nnf(x.rhs, false));
            return Formula::disj(Formula::conj(nnf(x.lhs, false), nnf(x.rhs, true)),
                                 Formula::conj(nnf(x.lhs, true), nnf(x.rhs, false)));
          },
          [&](const Formula::BigAnd& x) {
            std::vector<Formula> items;
            for (const Formula& item : x.items) items.push_back(nnf(item, negated));
            return negated ? Formula::big_or(std::move(items)) : Formula::big_and(std::move(items));
          },
          [&](const Formula::BigOr& x) {
            std::vector<Formula> items;
            for (const Formula& item : x.items) items.push_back(nnf(item, negated));
            return negated ? Formula::big_and(std::move(items)) : Formula::big_or(std::move(items));
          },
          [&](const Formula::PropVar& p) -> Formula {
            throw SemanticsError("push_negation: propositional variable '" + p.name +
                                 "' has no comparison to flip");
          },
          [&](const Formula::ForallBall& q) -> Formula {
            if (negated) throw SemanticsError("push_negation: negated quantifier is not supported");
            return Formula::forall_ball(q.epsilon, nnf(q.body, false));
          },
      },
      f.node());
}

}  // namespace

Formula push_negation(const Formula& f) { return nnf(f, false); }

std::optional<double> ball_radius(const Formula& f) {
  if (const auto* q = std::get_if<Formula::ForallBall>(&f.node())) return q->epsilon;
  return std::nullopt;
}

const Formula& strip_quantifier(const Formula& f) {
  if (const auto* q = std::get_if<Formula::ForallBall>(&f.node())) return q->body;
  return f;
}

std::string leaf_key(const Term& leaf) { return to_string(leaf); }

// ---------------------------------------------------------------------------
// Lowering

NodeId lower(const Term& t, const Bindings& bindings, Graph& graph) {
  return std::visit(Overloaded{
                        [&](const Term::Const& c) { return graph.constant(c.value); },
                        [&](const Term::Negate& n) { return graph.neg(lower(n.operand, bindings, graph)); },
                        [&](const Term::Binary& b) {
                          NodeId l = lower(b.lhs, bindings, graph);
                          NodeId r = lower(b.rhs, bindings, graph);
                          switch (b.op) {
                            case '+': return graph.add(l, r);
                            case '-': return graph.sub(l, r);
                            case '*': return graph.mul(l, r);
                            default: return graph.div(l, r);
                          }
                        },
                        [&](const auto&) {
                          const std::string key = leaf_key(t);
                          auto it = bindings.find(key);
                          if (it == bindings.end()) throw UnboundError("unbound leaf '" + key + "'");
                          return it->second;
                        },
                    },
                    t.node());
}

namespace {

NodeId lower_compare(const Formula::Compare& c, const LogicConfig& logic, NodeId x, NodeId y, Graph& g) {
  if (!logic.is_fuzzy()) {
    switch (c.op) {
      case CmpOp::kLe: return ops::dl2_leq(g, x, y);
      case CmpOp::kLt: return g.add(ops::dl2_leq(g, x, y), ops::dl2_neq(g, x, y, logic.xi));
      case CmpOp::kGe: return ops::dl2_leq(g, y, x);
      case CmpOp::kGt: return g.add(ops::dl2_leq(g, y, x), ops::dl2_neq(g, y, x, logic.xi));
      case CmpOp::kEq: return g.add(ops::dl2_leq(g, x, y), ops::dl2_leq(g, y, x));
      case CmpOp::kNe: return ops::dl2_neq(g, x, y, logic.xi);
    }
  }
  switch (c.op) {
    case CmpOp::kLe:
    case CmpOp::kLt: return ops::fuzzy_leq(g, x, y);
    case CmpOp::kGe:
    case CmpOp::kGt: return ops::fuzzy_leq(g, y, x);
    case CmpOp::kEq: return ops::tnorm(g, logic, ops::fuzzy_leq(g, x, y), ops::fuzzy_leq(g, y, x));
    case CmpOp::kNe:
      return ops::negation(g, ops::tnorm(g, logic, ops::fuzzy_leq(g, x, y), ops::fuzzy_leq(g, y, x)));
  }
  throw Error("unreachable");
}

NodeId lower_formula(const Formula& f, const LogicConfig& logic, const Bindings& b, Graph& g);

NodeId lower_implication(const Formula& lhs, const Formula& rhs, const LogicConfig& logic, const Bindings& b,
                         Graph& g) {
  if (logic.is_fuzzy()) return ops::implication(g, logic, lower_formula(lhs, logic, b, g), lower_formula(rhs, logic, b, g));
  NodeId not_lhs = lower_formula(push_negation(Formula::negate(lhs)), logic, b, g);
  return g.mul(not_lhs, lower_formula(rhs, logic, b, g));
}

NodeId lower_formula(const Formula& f, const LogicConfig& logic, const Bindings& b, Graph& g) {
  return std::visit(
      Overloaded{
          [&](const Formula::Compare& c) {
            NodeId x = lower(c.lhs, b, g);
            NodeId y = lower(c.rhs, b, g);
            return lower_compare(c, logic, x, y, g);
          },
          [&](const Formula::And& x) {
            NodeId l = lower_formula(x.lhs, logic, b, g);
            return ops::conjunction(g, logic, l, lower_formula(x.rhs, logic, b, g));
          },
          [&](const Formula::Or& x) {
            NodeId l = lower_formula(x.lhs, logic, b, g);
            return ops::disjunction(g, logic, l, lower_formula(x.rhs, logic, b, g));
          },
          [&](const Formula::Not& x) -> NodeId {
            if (!logic.is_fuzzy()) {
              throw SemanticsError("DL2 has no negation; apply push_negation before lowering");
            }
            return ops::negation(g, lower_formula(x.operand, logic, b, g));
          },
          [&](const Formula::Implies& x) { return lower_implication(x.lhs, x.rhs, logic, b, g); },
          [&](const Formula::Iff& x) {
            if (logic.is_fuzzy()) {
              NodeId l = lower_formula(x.lhs, logic, b, g);
              NodeId r = lower_formula(x.rhs, logic, b, g);
              return ops::tnorm(g, logic, ops::implication(g, logic, l, r), ops::implication(g, logic, r, l));
            }
            NodeId fwd = lower_implication(x.lhs, x.rhs, logic, b, g);
            return g.add(fwd, lower_implication(x.rhs, x.lhs, logic, b, g));
          },
          [&](const Formula::BigAnd& x) {
            NodeId acc = lower_formula(x.items.front(), logic, b, g);
            for (std::size_t i = 1; i < x.items.size(); ++i) {
              acc = ops::conjunction(g, logic, acc, lower_formula(x.items[i], logic, b, g));
            }
            return acc;
          },
          [&](const Formula::BigOr& x) {
            NodeId acc = lower_formula(x.items.front(), logic, b, g);
            for (std::size_t i = 1; i < x.items.size(); ++i) {
              acc = ops::disjunction(g, logic, acc, lower_formula(x.items[i], logic, b, g));
            }
            return acc;
          },
          [&](const Formula::PropVar& p) {
            auto it = b.find(p.name);
            if (it == b.end()) throw UnboundError("unbound propositional variable '" + p.name + "'");
            return it->second;
          },
          [&](const Formula::ForallBall& q) { return lower_formula(q.body, logic, b, g); },
      },
      f.node());
}

}  // namespace

NodeId lower(const Formula& f, const LogicConfig& logic, const Bindings& bindings, Graph& graph) {
  logic.validate();
  return lower_formula(f, logic, bindings, graph);
}

// ---------------------------------------------------------------------------
// Exact evaluation

double evaluate(const Term& t, const LeafValue& leaf) {
  return std::visit(Overloaded{
                        [&](const Term::Const& c) { return c.value; },
                        [&](const Term::Negate& n) { return -evaluate(n.operand, leaf); },
                        [&](const Term::Binary& b) {
                          const double l = evaluate(b.lhs, leaf);
                          const double r = evaluate(b.rhs, leaf);
                          switch (b.op) {
                            case '+': return l + r;
                            case '-': return l - r;
                            case '*': return l * r;
                            default:
                              if (r == 0.0) throw DomainError("division by zero in term " + to_string(t));
                              return l / r;
                          }
                        },
                        [&](const auto&) { return leaf(t); },
                    },
                    t.node());
}

bool holds(const Formula& f, const LeafValue& leaf, const PropValue& prop) {
  return std::visit(
      Overloaded{
          [&](const Formula::Compare& c) {
            const double x = evaluate(c.lhs, leaf);
            const double y = evaluate(c.rhs, leaf);
            switch (c.op) {
              case CmpOp::kLe: return x <= y;
              case CmpOp::kLt: return x < y;
              case CmpOp::kGe: return x >= y;
              case CmpOp::kGt: return x > y;
              case CmpOp::kEq: return x == y;
              case CmpOp::kNe: return x != y;
            }
            return false;
          },
          [&](const Formula::And& x) { return holds(x.lhs, leaf, prop) && holds(x.rhs, leaf, prop); },
          [&](const Formula::Or& x) { return holds(x.lhs, leaf, prop) || holds(x.rhs, leaf, prop); },
          [&](const Formula::Not& x) { return !holds(x.operand, leaf, prop); },
          [&](const Formula::Implies& x) { return !holds(x.lhs, leaf, prop) || holds(x.rhs, leaf, prop); },
          [&](const Formula::Iff& x) { return holds(x.lhs, leaf, prop) == holds(x.rhs, leaf, prop); },
          [&](const Formula::BigAnd& x) {
            for (const Formula& item : x.items) {
              if (!holds(item, leaf, prop)) return false;
            }
            return true;
          },
          [&](const Formula::BigOr& x) {
            for (const Formula& item : x.items) {
              if (holds(item, leaf, prop)) return true;
            }
            return false;
          },
          [&](const Formula::PropVar& p) {
            if (!prop) throw UnboundError("unbound propositional variable '" + p.name + "'");
            return prop(p.name);
          },
          [&](const Formula::ForallBall& q) { return holds(q.body, leaf, prop); },
      },
      f.node());
}

namespace {

void collect_term(const Term& t, Leaves& out, std::set<std::string>& seen) {
  std::visit(Overloaded{
                 [&](const Term::Const&) {},
                 [&](const Term::Negate& n) { collect_term(n.operand, out, seen); },
                 [&](const Term::Binary& b) {
                   collect_term(b.lhs, out, seen);
                   collect_term(b.rhs, out, seen);
                 },
                 [&](const auto&) {
                   if (seen.insert(leaf_key(t)).second) out.terms.push_back(t);
                 },
             },
             t.node());
}

void collect_formula(const Formula& f, Leaves& out, std::set<std::string>& seen) {
  std::visit(Overloaded{
                 [&](const Formula::Compare& c) {
                   collect_term(c.lhs, out, seen);
                   collect_term(c.rhs, out, seen);
                 },
                 [&](const Formula::Not& x) { collect_formula(x.operand, out, seen); },
                 [&](const Formula::BigAnd& x) {
                   for (const Formula& item : x.items) collect_formula(item, out, seen);
                 },
                 [&](const Formula::BigOr& x) {
                   for (const Formula& item : x.items) collect_formula(item, out, seen);
                 },
                 [&](const Formula::PropVar& p) {
                   if (seen.insert("prop:" + p.name).second) out.props.push_back(p.name);
                 },
                 [&](const Formula::ForallBall& q) { collect_formula(q.body, out, seen); },
                 [&](const auto& x) {
                   collect_formula(x.lhs, out, seen);
                   collect_formula(x.rhs, out, seen);
                 },
             },
             f.node());
}

}  // namespace

Leaves collect_leaves(const Formula& f) {
  Leaves out;
  std::set<std::string> seen;
  collect_formula(f, out, seen);
  return out;
}

}  // namespace dlc
