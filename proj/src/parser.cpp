#include <algorithm>
#include <cctype>
#include <set>
#include <vector>

#include "tccp/syntax.hpp"

namespace tccp {

namespace {

using namespace ast;

enum class Tok {
  Lower,   // atoms, procedure names, keywords
  Upper,   // variables
  Anon,    // _
  Number,  // digits with optional fraction part
  LParen, RParen, LBrack, RBrack, Bar, Comma, Dot,
  Plus, Minus, Star, Slash,
  Eq, Lt, Gt, Le, Ge,
  Arrow,   // ->
  Par,     // ||
  Neck,    // :-
  End,
};

struct Token {
  Tok kind;
  std::string text;
  SourcePos pos;
};

std::string describe(const Token& t) {
  if (t.kind == Tok::End) return "end of input";
  return "'" + t.text + "'";
}

bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0, line = 1, col = 1;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '%') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    SourcePos pos{line, col};
    std::size_t start = i;
    auto emit = [&](Tok kind, std::size_t len) {
      out.push_back({kind, std::string(src.substr(start, len)), pos});
      advance(len);
    };
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i + 1;
      while (j < src.size() && is_ident_char(src[j])) ++j;
      while (j < src.size() && src[j] == '\'') ++j;
      std::size_t len = j - i;
      Tok kind = Tok::Lower;
      if (c == '_')
        kind = len == 1 ? Tok::Anon : Tok::Upper;
      else if (std::isupper(static_cast<unsigned char>(c)))
        kind = Tok::Upper;
      else if (src[j - 1] == '\'')
        throw SyntaxError("primes are only allowed on variable names", pos);
      emit(kind, len);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      if (j + 1 < src.size() && src[j] == '.' && std::isdigit(static_cast<unsigned char>(src[j + 1]))) {
        ++j;
        while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      }
      emit(Tok::Number, j - i);
      continue;
    }
    auto two = src.substr(i, 2);
    if (two == "->") { emit(Tok::Arrow, 2); continue; }
    if (two == "||") { emit(Tok::Par, 2); continue; }
    if (two == ":-") { emit(Tok::Neck, 2); continue; }
    if (two == "<=") { emit(Tok::Le, 2); continue; }
    if (two == ">=") { emit(Tok::Ge, 2); continue; }
    switch (c) {
      case '(': emit(Tok::LParen, 1); continue;
      case ')': emit(Tok::RParen, 1); continue;
      case '[': emit(Tok::LBrack, 1); continue;
      case ']': emit(Tok::RBrack, 1); continue;
      case '|': emit(Tok::Bar, 1); continue;
      case ',': emit(Tok::Comma, 1); continue;
      case '.': emit(Tok::Dot, 1); continue;
      case '+': emit(Tok::Plus, 1); continue;
      case '-': emit(Tok::Minus, 1); continue;
      case '*': emit(Tok::Star, 1); continue;
      case '/': emit(Tok::Slash, 1); continue;
      case '=': emit(Tok::Eq, 1); continue;
      case '<': emit(Tok::Lt, 1); continue;
      case '>': emit(Tok::Gt, 1); continue;
      default:
        throw SyntaxError("unexpected character '" + std::string(1, c) + "'", pos);
    }
  }
  out.push_back({Tok::End, "", {line, col}});
  return out;
}

Rational parse_decimal(const std::string& text) {
  auto dot = text.find('.');
  if (dot == std::string::npos) return Rational(BigInt(text));
  std::string digits = text.substr(0, dot) + text.substr(dot + 1);
  BigInt denom = 1;
  for (std::size_t k = dot + 1; k < text.size(); ++k) denom *= 10;
  return Rational(BigInt(digits), denom);
}

const std::set<std::string> kKeywords = {"skip", "tell", "ask", "now", "then", "else", "exists", "true"};

/// An affine expression together with whether it was written as a lone
/// variable or a lone (possibly negated) number literal.
struct ParsedExpr {
  LinExpr expr;
  bool bare = false;
};

class Parser {
 public:
  explicit Parser(std::string_view src) : toks_(lex(src)) {}

  Program program() {
    Program p;
    while (!at(Tok::End)) p.decls.push_back(declaration());
    return p;
  }

  AgentPtr agent_only() {
    auto a = agent();
    expect(Tok::End, "end of input");
    return a;
  }

  Constraint constraint_only() {
    auto c = constraint();
    expect(Tok::End, "end of input");
    return c;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  bool at(Tok k, std::size_t ahead = 0) const { return peek(ahead).kind == k; }
  bool at_keyword(const char* kw) const { return at(Tok::Lower) && peek().text == kw; }

  Token take() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  [[noreturn]] void fail(const std::string& expected) const {
    throw SyntaxError("expected " + expected + ", found " + describe(peek()), peek().pos, expected);
  }

  Token expect(Tok k, const std::string& expected) {
    if (!at(k)) fail(expected);
    return take();
  }

  void expect_keyword(const char* kw) {
    if (!at_keyword(kw)) fail(std::string("'") + kw + "'");
    take();
  }

  std::string variable_name() { return expect(Tok::Upper, "variable").text; }

  Declaration declaration() {
    Declaration d;
    d.pos = peek().pos;
    if (!at(Tok::Lower) || kKeywords.count(peek().text)) fail("procedure name");
    d.name = take().text;
    if (at(Tok::LParen)) {
      take();
      d.formals.push_back(variable_name());
      while (at(Tok::Comma)) {
        take();
        d.formals.push_back(variable_name());
      }
      expect(Tok::RParen, "')'");
    }
    expect(Tok::Neck, "':-'");
    d.body = agent();
    expect(Tok::Dot, "'.'");
    return d;
  }

  static AgentPtr make(decltype(Agent::node) node, SourcePos pos) {
    return std::make_shared<Agent>(Agent{std::move(node), pos});
  }

  AgentPtr agent() {
    auto left = choice_level();
    while (at(Tok::Par)) {
      auto pos = take().pos;
      auto right = choice_level();
      left = make(Parallel{left, right}, pos);
    }
    return left;
  }

  AgentPtr choice_level() {
    if (!at_keyword("ask")) {
      auto p = primary();
      if (at(Tok::Plus)) {
        take();
        fail("'ask' guarded branch");
      }
      return p;
    }
    auto pos = peek().pos;
    std::vector<Branch> branches;
    branches.push_back(branch());
    while (at(Tok::Plus)) {
      take();
      if (!at_keyword("ask")) fail("'ask' guarded branch");
      branches.push_back(branch());
    }
    return make(Choice{std::move(branches)}, pos);
  }

  Branch branch() {
    expect_keyword("ask");
    expect(Tok::LParen, "'('");
    auto guard = constraint();
    expect(Tok::RParen, "')'");
    expect(Tok::Arrow, "'->'");
    return Branch{std::move(guard), primary()};
  }

  AgentPtr primary() {
    auto pos = peek().pos;
    if (at(Tok::LParen)) {
      take();
      auto a = agent();
      expect(Tok::RParen, "')'");
      return a;
    }
    if (!at(Tok::Lower)) fail("agent");
    const std::string word = peek().text;
    if (word == "skip") {
      take();
      return make(Skip{}, pos);
    }
    if (word == "tell") {
      take();
      expect(Tok::LParen, "'('");
      auto c = constraint();
      expect(Tok::RParen, "')'");
      return make(Tell{std::move(c)}, pos);
    }
    if (word == "now") {
      take();
      expect(Tok::LParen, "'('");
      auto c = constraint();
      expect(Tok::RParen, "')'");
      expect_keyword("then");
      auto then_branch = primary();
      AgentPtr else_branch;
      if (at_keyword("else")) {
        take();
        else_branch = primary();
      } else {
        else_branch = make(Skip{}, peek().pos);
      }
      return make(Now{std::move(c), then_branch, else_branch}, pos);
    }
    if (word == "exists") {
      take();
      std::vector<std::string> vars{variable_name()};
      while (at(Tok::Comma)) {
        take();
        vars.push_back(variable_name());
      }
      expect(Tok::LParen, "'('");
      auto body = agent();
      expect(Tok::RParen, "')'");
      return make(Exists{std::move(vars), body}, pos);
    }
    if (kKeywords.count(word)) fail("agent");
    take();
    std::vector<Actual> actuals;
    if (at(Tok::LParen)) {
      take();
      actuals.push_back(actual());
      while (at(Tok::Comma)) {
        take();
        actuals.push_back(actual());
      }
      expect(Tok::RParen, "')'");
    }
    return make(Call{word, std::move(actuals)}, pos);
  }

  Actual actual() {
    if (at(Tok::LBrack) || at(Tok::Lower) || at(Tok::Anon)) return term();
    auto pe = expr();
    if (pe.expr.is_constant()) return num(pe.expr.constant);
    if (pe.bare) return var(pe.expr.coeffs.begin()->first);
    return pe.expr;
  }

  // ------------------------------------------------------------------------
  // Constraints

  static bool ends_constraint(Tok k) { return k == Tok::RParen || k == Tok::End; }

  Constraint constraint() {
    if (at_keyword("true") && ends_constraint(peek(1).kind)) {
      take();
      return true_constraint();
    }
    if (at(Tok::Upper) && at(Tok::Eq, 1)) {
      Tok rhs = peek(2).kind;
      bool stream_rhs = rhs == Tok::LBrack || rhs == Tok::Lower || rhs == Tok::Anon ||
                        (rhs == Tok::Upper && ends_constraint(peek(3).kind));
      if (stream_rhs) {
        std::string v = take().text;
        take();
        return stream_eq(std::move(v), term());
      }
    }
    auto lhs = expr().expr;
    RelOp op;
    switch (peek().kind) {
      case Tok::Eq: op = RelOp::Eq; break;
      case Tok::Lt: op = RelOp::Lt; break;
      case Tok::Gt: op = RelOp::Gt; break;
      case Tok::Le: op = RelOp::Le; break;
      case Tok::Ge: op = RelOp::Ge; break;
      default: fail("relation ('=', '<', '>', '<=', '>=')");
    }
    take();
    auto rhs = expr().expr;
    return linear(std::move(lhs), op, std::move(rhs));
  }

  Rational number_literal() {
    auto value = parse_decimal(expect(Tok::Number, "number").text);
    if (at(Tok::Slash) && at(Tok::Number, 1)) {
      take();
      auto pos = peek().pos;
      auto d = parse_decimal(take().text);
      if (d == 0) throw SyntaxError("division by zero", pos);
      value /= d;
    }
    return value;
  }

  TermPtr term() {
    switch (peek().kind) {
      case Tok::Anon: take(); return anon();
      case Tok::Upper: return var(take().text);
      case Tok::Number: return num(number_literal());
      case Tok::Minus:
        take();
        return num(-number_literal());
      case Tok::Lower: {
        if (kKeywords.count(peek().text) && peek().text != "true") fail("term");
        return atom(take().text);
      }
      case Tok::LBrack: {
        take();
        std::vector<TermPtr> heads{term()};
        while (at(Tok::Comma)) {
          take();
          heads.push_back(term());
        }
        expect(Tok::Bar, "'|'");
        auto tail = term();
        expect(Tok::RBrack, "']'");
        for (auto it = heads.rbegin(); it != heads.rend(); ++it) tail = cons(*it, tail);
        return tail;
      }
      default: fail("term");
    }
  }

  // expr   ::= ['-'] product { ('+'|'-') product }
  // product::= factor { ('*'|'/') factor }
  // factor ::= number | Var | '(' expr ')' | '-' factor
  ParsedExpr expr() {
    auto first = product();
    ParsedExpr out{first.expr, first.bare};
    while (at(Tok::Plus) || at(Tok::Minus)) {
      bool minus = take().kind == Tok::Minus;
      auto rhs = product();
      if (minus)
        out.expr -= rhs.expr;
      else
        out.expr += rhs.expr;
      out.bare = false;
    }
    return out;
  }

  ParsedExpr product() {
    auto acc = factor();
    while (at(Tok::Star) || at(Tok::Slash)) {
      auto op = take();
      auto rhs = factor();
      if (op.kind == Tok::Star) {
        if (acc.expr.is_constant())
          acc.expr = rhs.expr * acc.expr.constant;
        else if (rhs.expr.is_constant())
          acc.expr *= rhs.expr.constant;
        else
          throw SyntaxError("non-linear product", op.pos);
      } else {
        if (!rhs.expr.is_constant()) throw SyntaxError("division by a non-constant", op.pos);
        if (rhs.expr.constant == 0) throw SyntaxError("division by zero", op.pos);
        acc.expr *= Rational(1) / rhs.expr.constant;
      }
      acc.bare = false;
    }
    return acc;
  }

  ParsedExpr factor() {
    switch (peek().kind) {
      case Tok::Number:
        return {LinExpr::of_const(parse_decimal(take().text)), true};
      case Tok::Upper:
        return {LinExpr::of_var(take().text), true};
      case Tok::Minus: {
        take();
        auto inner = factor();
        inner.expr *= Rational(-1);
        inner.bare = inner.bare && inner.expr.is_constant();
        return inner;
      }
      case Tok::LParen: {
        take();
        auto inner = expr();
        expect(Tok::RParen, "')'");
        return {inner.expr, false};
      }
      default: fail("arithmetic expression");
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Program checks

void check_agent(const Program& p, const Agent& a, std::vector<std::string>& scope, bool allow_free) {
  auto require = [&](const std::vector<std::string>& vars) {
    if (allow_free) return;
    for (const auto& v : vars)
      if (std::find(scope.begin(), scope.end(), v) == scope.end())
        throw UnboundVariable("unbound variable " + v, a.pos);
  };
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Tell>) {
          require(vars_of(x.constraint));
        } else if constexpr (std::is_same_v<T, Parallel>) {
          check_agent(p, *x.left, scope, allow_free);
          check_agent(p, *x.right, scope, allow_free);
        } else if constexpr (std::is_same_v<T, Choice>) {
          if (x.branches.empty()) throw SyntaxError("choice without branches", a.pos);
          for (const auto& b : x.branches) {
            require(vars_of(b.guard));
            check_agent(p, *b.body, scope, allow_free);
          }
        } else if constexpr (std::is_same_v<T, Now>) {
          require(vars_of(x.cond));
          check_agent(p, *x.then_branch, scope, allow_free);
          check_agent(p, *x.else_branch, scope, allow_free);
        } else if constexpr (std::is_same_v<T, Exists>) {
          if (x.vars.empty()) throw SyntaxError("exists without variables", a.pos);
          std::set<std::string> seen;
          for (const auto& v : x.vars)
            if (!seen.insert(v).second) throw DuplicateDeclaration("variable " + v + " declared twice", a.pos);
          auto inner = scope;
          inner.insert(inner.end(), x.vars.begin(), x.vars.end());
          check_agent(p, *x.body, inner, allow_free);
        } else if constexpr (std::is_same_v<T, Call>) {
          const auto* d = p.find(x.name);
          if (!d) throw UnknownProcedure("unknown procedure " + x.name, a.pos);
          if (d->formals.size() != x.actuals.size())
            throw ArityError(x.name + " expects " + std::to_string(d->formals.size()) + " argument(s), got " +
                                 std::to_string(x.actuals.size()),
                             a.pos);
          for (const auto& act : x.actuals) require(vars_of(act));
        }
      },
      a.node);
}

}  // namespace

void check_program(const Program& program) {
  std::set<std::string> names;
  for (const auto& d : program.decls) {
    if (!names.insert(d.name).second) throw DuplicateDeclaration("procedure " + d.name + " declared twice", d.pos);
    std::set<std::string> formals(d.formals.begin(), d.formals.end());
    if (formals.size() != d.formals.size())
      throw DuplicateDeclaration("repeated formal parameter in " + d.name, d.pos);
  }
  for (const auto& d : program.decls) {
    auto scope = d.formals;
    check_agent(program, *d.body, scope, false);
  }
}

Program parse_program(std::string_view text) {
  auto p = Parser(text).program();
  check_program(p);
  return p;
}

AgentPtr parse_agent(std::string_view text) { return Parser(text).agent_only(); }

Constraint parse_constraint(std::string_view text) { return Parser(text).constraint_only(); }

void attach_entry(Program& program, AgentPtr entry) {
  std::vector<std::string> scope;
  check_agent(program, *entry, scope, true);
  program.entry = std::move(entry);
}

}  // namespace tccp
