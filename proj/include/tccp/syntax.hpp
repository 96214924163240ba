#pragma once

// Concrete syntax: parser and pretty-printer. The grammar is documented in
// docs/grammar.md; pretty() output always parses back to an equal tree.

#include <string>
#include <string_view>

#include "tccp/ast.hpp"

namespace tccp {

/// Parses a sequence of declarations `name(Formals) :- Agent.` and runs the
/// program checks (duplicate names, arity, unknown procedures, unbound
/// variables). The returned program has no entry agent.
ast::Program parse_program(std::string_view text);

/// Parses a single agent, e.g. an entry agent given on the command line.
ast::AgentPtr parse_agent(std::string_view text);

ast::Constraint parse_constraint(std::string_view text);

/// Re-runs the declaration checks; parse_program already calls this.
void check_program(const ast::Program& program);

/// Validates calls in `entry` against the program's declarations and stores
/// it as the program's entry. Free variables are allowed in an entry agent.
void attach_entry(ast::Program& program, ast::AgentPtr entry);

std::string pretty(const ast::Term& t);
std::string pretty(const ast::LinExpr& e);
std::string pretty(const ast::Constraint& c);
std::string pretty(const ast::Actual& a);
std::string pretty(const ast::Agent& a);
std::string pretty(const ast::Declaration& d);
std::string pretty(const ast::Program& p);

}  // namespace tccp
