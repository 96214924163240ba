#include "tccp/ast.hpp"

#include <algorithm>
#include <set>

namespace tccp::ast {

TermPtr atom(std::string name) { return std::make_shared<Term>(Term{Atom{std::move(name)}}); }
TermPtr num(Rational value) { return std::make_shared<Term>(Term{Num{std::move(value)}}); }
TermPtr var(std::string name) { return std::make_shared<Term>(Term{Var{std::move(name)}}); }
TermPtr anon() { return std::make_shared<Term>(Term{Anon{}}); }
TermPtr cons(TermPtr head, TermPtr tail) {
  return std::make_shared<Term>(Term{Cons{std::move(head), std::move(tail)}});
}

bool operator==(const Term& a, const Term& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(b.node);
        if constexpr (std::is_same_v<T, Atom>) return x.name == y.name;
        if constexpr (std::is_same_v<T, Num>) return x.value == y.value;
        if constexpr (std::is_same_v<T, Var>) return x.name == y.name;
        if constexpr (std::is_same_v<T, Anon>) return true;
        if constexpr (std::is_same_v<T, Cons>) return *x.head == *y.head && *x.tail == *y.tail;
      },
      a.node);
}

LinExpr LinExpr::of_var(const std::string& name) {
  LinExpr e;
  e.coeffs[name] = 1;
  return e;
}

LinExpr LinExpr::of_const(Rational value) {
  LinExpr e;
  e.constant = std::move(value);
  return e;
}

LinExpr& LinExpr::operator+=(const LinExpr& other) {
  for (const auto& [v, k] : other.coeffs) {
    auto& slot = coeffs[v];
    slot += k;
    if (slot == 0) coeffs.erase(v);
  }
  constant += other.constant;
  return *this;
}

LinExpr& LinExpr::operator-=(const LinExpr& other) {
  LinExpr neg = other;
  neg *= Rational(-1);
  return *this += neg;
}

LinExpr& LinExpr::operator*=(const Rational& k) {
  if (k == 0) {
    coeffs.clear();
    constant = 0;
    return *this;
  }
  for (auto& [v, c] : coeffs) c *= k;
  constant *= k;
  return *this;
}

LinExpr operator+(LinExpr a, const LinExpr& b) { return a += b; }
LinExpr operator-(LinExpr a, const LinExpr& b) { return a -= b; }
LinExpr operator*(LinExpr a, const Rational& k) { return a *= k; }

const char* to_string(RelOp op) {
  switch (op) {
    case RelOp::Eq: return "=";
    case RelOp::Lt: return "<";
    case RelOp::Gt: return ">";
    case RelOp::Le: return "<=";
    case RelOp::Ge: return ">=";
  }
  return "?";
}

bool operator==(const StreamEq& a, const StreamEq& b) {
  return a.var == b.var && *a.rhs == *b.rhs;
}

bool operator==(const Constraint& a, const Constraint& b) { return a.node == b.node; }

Constraint true_constraint() { return Constraint{True{}}; }
Constraint stream_eq(std::string var, TermPtr rhs) {
  return Constraint{StreamEq{std::move(var), std::move(rhs)}};
}
Constraint linear(LinExpr lhs, RelOp op, LinExpr rhs) {
  return Constraint{Linear{std::move(lhs), op, std::move(rhs)}};
}

namespace {
AgentPtr make(decltype(Agent::node) node) { return std::make_shared<Agent>(Agent{std::move(node), {}}); }

bool actual_eq(const Actual& a, const Actual& b) {
  if (a.index() != b.index()) return false;
  if (a.index() == 0) return *std::get<0>(a) == *std::get<0>(b);
  return std::get<1>(a) == std::get<1>(b);
}
}  // namespace

AgentPtr skip() { return make(Skip{}); }
AgentPtr tell(Constraint c) { return make(Tell{std::move(c)}); }
AgentPtr parallel(AgentPtr left, AgentPtr right) { return make(Parallel{std::move(left), std::move(right)}); }
AgentPtr choice(std::vector<Branch> branches) { return make(Choice{std::move(branches)}); }
AgentPtr now(Constraint cond, AgentPtr then_branch, AgentPtr else_branch) {
  return make(Now{std::move(cond), std::move(then_branch), std::move(else_branch)});
}
AgentPtr exists(std::vector<std::string> vars, AgentPtr body) {
  return make(Exists{std::move(vars), std::move(body)});
}
AgentPtr call(std::string name, std::vector<Actual> actuals) {
  return make(Call{std::move(name), std::move(actuals)});
}

bool operator==(const Agent& a, const Agent& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(b.node);
        if constexpr (std::is_same_v<T, Skip>) {
          return true;
        } else if constexpr (std::is_same_v<T, Tell>) {
          return x.constraint == y.constraint;
        } else if constexpr (std::is_same_v<T, Parallel>) {
          return *x.left == *y.left && *x.right == *y.right;
        } else if constexpr (std::is_same_v<T, Choice>) {
          return std::equal(x.branches.begin(), x.branches.end(), y.branches.begin(), y.branches.end(),
                            [](const Branch& p, const Branch& q) { return p.guard == q.guard && *p.body == *q.body; });
        } else if constexpr (std::is_same_v<T, Now>) {
          return x.cond == y.cond && *x.then_branch == *y.then_branch && *x.else_branch == *y.else_branch;
        } else if constexpr (std::is_same_v<T, Exists>) {
          return x.vars == y.vars && *x.body == *y.body;
        } else {
          return x.name == y.name &&
                 std::equal(x.actuals.begin(), x.actuals.end(), y.actuals.begin(), y.actuals.end(), actual_eq);
        }
      },
      a.node);
}

const Declaration* Program::find(const std::string& name) const {
  for (const auto& d : decls)
    if (d.name == name) return &d;
  return nullptr;
}

namespace {

void push_unique(std::vector<std::string>& out, const std::string& v) {
  if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
}

void collect(const Term& t, std::vector<std::string>& out) {
  if (const auto* v = std::get_if<Var>(&t.node)) {
    push_unique(out, v->name);
  } else if (const auto* c = std::get_if<Cons>(&t.node)) {
    collect(*c->head, out);
    collect(*c->tail, out);
  }
}

void collect(const LinExpr& e, std::vector<std::string>& out) {
  for (const auto& [v, k] : e.coeffs) push_unique(out, v);
}

void collect(const Constraint& c, std::vector<std::string>& out) {
  if (const auto* s = std::get_if<StreamEq>(&c.node)) {
    push_unique(out, s->var);
    collect(*s->rhs, out);
  } else if (const auto* l = std::get_if<Linear>(&c.node)) {
    collect(l->lhs, out);
    collect(l->rhs, out);
  }
}

void collect(const Actual& a, std::vector<std::string>& out) {
  if (a.index() == 0)
    collect(*std::get<0>(a), out);
  else
    collect(std::get<1>(a), out);
}

void collect_free(const Agent& a, std::vector<std::string>& bound, std::vector<std::string>& out) {
  auto add = [&](const std::vector<std::string>& vs) {
    for (const auto& v : vs)
      if (std::find(bound.begin(), bound.end(), v) == bound.end()) push_unique(out, v);
  };
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Tell>) {
          add(vars_of(x.constraint));
        } else if constexpr (std::is_same_v<T, Parallel>) {
          collect_free(*x.left, bound, out);
          collect_free(*x.right, bound, out);
        } else if constexpr (std::is_same_v<T, Choice>) {
          for (const auto& b : x.branches) {
            add(vars_of(b.guard));
            collect_free(*b.body, bound, out);
          }
        } else if constexpr (std::is_same_v<T, Now>) {
          add(vars_of(x.cond));
          collect_free(*x.then_branch, bound, out);
          collect_free(*x.else_branch, bound, out);
        } else if constexpr (std::is_same_v<T, Exists>) {
          auto inner = bound;
          inner.insert(inner.end(), x.vars.begin(), x.vars.end());
          collect_free(*x.body, inner, out);
        } else if constexpr (std::is_same_v<T, Call>) {
          for (const auto& act : x.actuals) add(vars_of(act));
        }
      },
      a.node);
}

}  // namespace

std::vector<std::string> vars_of(const Term& t) {
  std::vector<std::string> out;
  collect(t, out);
  return out;
}

std::vector<std::string> vars_of(const Constraint& c) {
  std::vector<std::string> out;
  collect(c, out);
  return out;
}

std::vector<std::string> vars_of(const Actual& a) {
  std::vector<std::string> out;
  collect(a, out);
  return out;
}

std::vector<std::string> free_vars(const Agent& a) {
  std::vector<std::string> bound, out;
  collect_free(a, bound, out);
  return out;
}

}  // namespace tccp::ast
