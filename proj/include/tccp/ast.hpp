#pragma once

// Abstract syntax of tccp programs: terms, constraints, agents and
// procedure declarations. Nodes are immutable once built and shared through
// shared_ptr, so continuations produced by the interpreter can point straight
// into the program text's tree.

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tccp/errors.hpp"
#include "tccp/rational.hpp"

namespace tccp::ast {

// ---------------------------------------------------------------------------
// Terms (stream constraints)

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Atom { std::string name; };
struct Num { Rational value; };
struct Var { std::string name; };
struct Anon {};
struct Cons { TermPtr head; TermPtr tail; };

struct Term {
  std::variant<Atom, Num, Var, Anon, Cons> node;
};

TermPtr atom(std::string name);
TermPtr num(Rational value);
TermPtr var(std::string name);
TermPtr anon();
TermPtr cons(TermPtr head, TermPtr tail);

bool operator==(const Term& a, const Term& b);

// ---------------------------------------------------------------------------
// Affine expressions over named variables

/// sum(coeffs[v] * v) + constant. Zero coefficients are never stored.
struct LinExpr {
  std::map<std::string, Rational> coeffs;
  Rational constant;

  static LinExpr of_var(const std::string& name);
  static LinExpr of_const(Rational value);

  bool is_constant() const { return coeffs.empty(); }

  LinExpr& operator+=(const LinExpr& other);
  LinExpr& operator-=(const LinExpr& other);
  LinExpr& operator*=(const Rational& k);

  friend bool operator==(const LinExpr&, const LinExpr&) = default;
};

LinExpr operator+(LinExpr a, const LinExpr& b);
LinExpr operator-(LinExpr a, const LinExpr& b);
LinExpr operator*(LinExpr a, const Rational& k);

enum class RelOp { Eq, Lt, Gt, Le, Ge };

const char* to_string(RelOp op);

// ---------------------------------------------------------------------------
// Constraints

struct True {
  friend bool operator==(const True&, const True&) = default;
};

/// var = rhs, resolved by unification (tell) or matching (ask).
struct StreamEq {
  std::string var;
  TermPtr rhs;
};

struct Linear {
  LinExpr lhs;
  RelOp op = RelOp::Eq;
  LinExpr rhs;

  friend bool operator==(const Linear&, const Linear&) = default;
};

struct Constraint {
  std::variant<True, StreamEq, Linear> node;
};

bool operator==(const StreamEq& a, const StreamEq& b);
bool operator==(const Constraint& a, const Constraint& b);

Constraint true_constraint();
Constraint stream_eq(std::string var, TermPtr rhs);
Constraint linear(LinExpr lhs, RelOp op, LinExpr rhs);

// ---------------------------------------------------------------------------
// Agents

struct Agent;
using AgentPtr = std::shared_ptr<const Agent>;

/// Actual argument of a call: a stream term (variables, atoms, numbers,
/// lists) or an affine expression that is more than a lone variable/number.
using Actual = std::variant<TermPtr, LinExpr>;

struct Skip {};
struct Tell { Constraint constraint; };
struct Parallel { AgentPtr left; AgentPtr right; };
struct Branch {
  Constraint guard;
  AgentPtr body;
};
struct Choice { std::vector<Branch> branches; };
struct Now {
  Constraint cond;
  AgentPtr then_branch;
  AgentPtr else_branch;
};
struct Exists {
  std::vector<std::string> vars;
  AgentPtr body;
};
struct Call {
  std::string name;
  std::vector<Actual> actuals;
};

struct Agent {
  std::variant<Skip, Tell, Parallel, Choice, Now, Exists, Call> node;
  SourcePos pos;
};

AgentPtr skip();
AgentPtr tell(Constraint c);
AgentPtr parallel(AgentPtr left, AgentPtr right);
AgentPtr choice(std::vector<Branch> branches);
AgentPtr now(Constraint cond, AgentPtr then_branch, AgentPtr else_branch);
AgentPtr exists(std::vector<std::string> vars, AgentPtr body);
AgentPtr call(std::string name, std::vector<Actual> actuals);

/// Structural equality; source positions are ignored.
bool operator==(const Agent& a, const Agent& b);

// ---------------------------------------------------------------------------
// Programs

struct Declaration {
  std::string name;
  std::vector<std::string> formals;
  AgentPtr body;
  SourcePos pos;
};

struct Program {
  std::vector<Declaration> decls;  // in source order
  AgentPtr entry;                  // may be null until an entry is attached

  const Declaration* find(const std::string& name) const;
};

// ---------------------------------------------------------------------------
// Variable bookkeeping

/// Variables of a term, left to right, duplicates removed.
std::vector<std::string> vars_of(const Term& t);
std::vector<std::string> vars_of(const Constraint& c);
std::vector<std::string> vars_of(const Actual& a);

/// Free variables of an agent in order of first occurrence.
std::vector<std::string> free_vars(const Agent& a);

}  // namespace tccp::ast
