#include <sstream>

#include "tccp/syntax.hpp"

namespace tccp {

using namespace ast;

std::string pretty(const Term& t) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Atom>) return x.name;
        if constexpr (std::is_same_v<T, Num>) return to_string(x.value);
        if constexpr (std::is_same_v<T, Var>) return x.name;
        if constexpr (std::is_same_v<T, Anon>) return "_";
        if constexpr (std::is_same_v<T, Cons>) return "[" + pretty(*x.head) + "|" + pretty(*x.tail) + "]";
      },
      t.node);
}

std::string pretty(const LinExpr& e) {
  std::string out;
  auto emit = [&](const Rational& k, const std::string& what) {
    bool neg = k < 0;
    Rational mag = neg ? Rational(-k) : k;
    if (out.empty())
      out += neg ? "-" : "";
    else
      out += neg ? " - " : " + ";
    if (what.empty())
      out += to_string(mag);
    else if (mag == 1)
      out += what;
    else
      out += to_string(mag) + "*" + what;
  };
  for (const auto& [v, k] : e.coeffs) emit(k, v);
  if (e.constant != 0 || out.empty()) emit(e.constant, "");
  return out;
}

namespace {

bool lone_var(const LinExpr& e) {
  return e.constant == 0 && e.coeffs.size() == 1 && e.coeffs.begin()->second == 1;
}

}  // namespace

std::string pretty(const Constraint& c) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, True>) {
          return "true";
        } else if constexpr (std::is_same_v<T, StreamEq>) {
          return x.var + " = " + pretty(*x.rhs);
        } else {
          // `X = Y` reads as unification; parenthesise to keep it linear.
          std::string rhs = pretty(x.rhs);
          if (x.op == RelOp::Eq && lone_var(x.lhs) && lone_var(x.rhs)) rhs = "(" + rhs + ")";
          return pretty(x.lhs) + " " + to_string(x.op) + " " + rhs;
        }
      },
      c.node);
}

std::string pretty(const Actual& a) {
  if (a.index() == 0) return pretty(*std::get<0>(a));
  return "(" + pretty(std::get<1>(a)) + ")";
}

namespace {

enum class Level { Agent, Choice, Primary };

std::string print(const Agent& a, Level ctx);

std::string wrap(const Agent& a, Level need) {
  Level own = Level::Primary;
  if (std::holds_alternative<Parallel>(a.node)) own = Level::Agent;
  if (std::holds_alternative<Choice>(a.node)) own = Level::Choice;
  std::string s = print(a, own);
  if (static_cast<int>(own) < static_cast<int>(need)) return "(" + s + ")";
  return s;
}

std::string print(const Agent& a, Level) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Skip>) {
          return "skip";
        } else if constexpr (std::is_same_v<T, Tell>) {
          return "tell(" + pretty(x.constraint) + ")";
        } else if constexpr (std::is_same_v<T, Parallel>) {
          return wrap(*x.left, Level::Agent) + " || " + wrap(*x.right, Level::Choice);
        } else if constexpr (std::is_same_v<T, Choice>) {
          std::string out;
          for (const auto& b : x.branches) {
            if (!out.empty()) out += " + ";
            out += "ask(" + pretty(b.guard) + ") -> " + wrap(*b.body, Level::Primary);
          }
          return out;
        } else if constexpr (std::is_same_v<T, Now>) {
          return "now(" + pretty(x.cond) + ") then " + wrap(*x.then_branch, Level::Primary) + " else " +
                 wrap(*x.else_branch, Level::Primary);
        } else if constexpr (std::is_same_v<T, Exists>) {
          std::string vars;
          for (const auto& v : x.vars) vars += (vars.empty() ? "" : ", ") + v;
          return "exists " + vars + " (" + pretty(*x.body) + ")";
        } else {
          if (x.actuals.empty()) return x.name;
          std::string args;
          for (const auto& act : x.actuals) args += (args.empty() ? "" : ", ") + pretty(act);
          return x.name + "(" + args + ")";
        }
      },
      a.node);
}

}  // namespace

std::string pretty(const Agent& a) { return wrap(a, Level::Agent); }

std::string pretty(const Declaration& d) {
  std::string head = d.name;
  if (!d.formals.empty()) {
    head += "(";
    for (std::size_t i = 0; i < d.formals.size(); ++i) head += (i ? ", " : "") + d.formals[i];
    head += ")";
  }
  return head + " :- " + pretty(*d.body) + ".";
}

std::string pretty(const Program& p) {
  std::ostringstream out;
  for (const auto& d : p.decls) out << pretty(d) << "\n";
  return out.str();
}

}  // namespace tccp
