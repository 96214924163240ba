#pragma once

// Reference semantics: applies the transition rules directly to agent trees.
// There is no symbol table and no register memory. Local variables and
// procedure formals are renamed apart (`X#3`), stream information lives in a
// substitution keyed by variable name, numeric information in a LinStore.
//
// Used as a differential oracle for the abstract machine: both must produce
// the same observable trace (clock, status, entailed probe constraints).

#include <map>
#include <string>
#include <vector>

#include "tccp/ast.hpp"
#include "tccp/interpreter.hpp"
#include "tccp/linear_store.hpp"

namespace tccp::oracle {

class RefStore {
 public:
  bool is_consistent() const { return !clash_ && !lin_.is_empty(); }

  /// Conjoins c. Names are global; anything never told is unconstrained.
  void tell(const ast::Constraint& c);
  bool entails(const ast::Constraint& c) const;

  /// Binding of each variable name that has one, for debugging.
  const std::map<std::string, ast::TermPtr>& substitution() const { return subst_; }
  const LinStore& lin() const { return lin_; }

 private:
  ast::TermPtr walk(ast::TermPtr t) const;
  ast::TermPtr freshen(const ast::TermPtr& t);
  void unify(ast::TermPtr a, ast::TermPtr b);
  void bind(const std::string& var, const ast::TermPtr& value);
  bool occurs(const std::string& var, ast::TermPtr t) const;
  Dim dim_of(const std::string& var);

  bool matches(ast::TermPtr value, const ast::Term& pattern) const;
  bool same(ast::TermPtr a, ast::TermPtr b) const;
  bool equals_number(ast::TermPtr a, const Rational& n) const;

  std::map<std::string, ast::TermPtr> subst_;
  std::map<std::string, Dim> dims_;
  LinStore lin_;
  bool clash_ = false;
  std::size_t fresh_ = 0;
};

struct Step {
  std::size_t clock = 0;
  Status status = Status::Running;
  RefStore store;
  std::vector<ast::AgentPtr> active;
};

std::vector<Step> run(const ast::Program& program, std::size_t steps, ChoicePolicy policy);

// ---------------------------------------------------------------------------
// Observations shared by both interpreters

struct Observation {
  std::size_t clock = 0;
  Status status = Status::Running;
  std::vector<bool> entailed;

  friend bool operator==(const Observation&, const Observation&) = default;
};

/// Ask-constraints over the entry's free variables built from the atoms and
/// numbers occurring in the program: stream heads at depth one and two,
/// numeric comparisons and pairwise equalities.
std::vector<ast::Constraint> probes(const ast::Program& program);

Observation observe(const TraceStep& step, const std::vector<ast::Constraint>& probes);
Observation observe(const Step& step, const std::vector<ast::Constraint>& probes);

std::vector<Observation> observe(const Trace& trace, const std::vector<ast::Constraint>& probes);
std::vector<Observation> observe(const std::vector<Step>& trace, const std::vector<ast::Constraint>& probes);

}  // namespace tccp::oracle
