#include "tccp/interpreter.hpp"

#include <stdexcept>

namespace tccp {

const char* to_string(Status s) {
  switch (s) {
    case Status::Running: return "running";
    case Status::Quiescent: return "quiescent";
    case Status::Failed: return "failed";
  }
  return "?";
}

std::size_t BranchPicker::pick(std::size_t n) {
  switch (policy_.kind) {
    case ChoicePolicy::Kind::First: return 0;
    case ChoicePolicy::Kind::Last: return n - 1;
    case ChoicePolicy::Kind::Random: return static_cast<std::size_t>(rng_() % n);
  }
  return 0;
}

Machine::Machine(const ast::Program& program, ChoicePolicy policy) : program_(program), picker_(policy) {
  if (!program.entry) throw std::invalid_argument("program has no entry agent");
  for (const auto& v : ast::free_vars(*program.entry)) store_.add_variable(Store::kRoot, v);
  active_.push_back({program.entry, Store::kRoot});
  status_ = classify();
}

namespace {

void flatten(const ast::AgentPtr& a, std::vector<ast::AgentPtr>& out) {
  if (const auto* p = std::get_if<ast::Parallel>(&a->node)) {
    flatten(p->left, out);
    flatten(p->right, out);
  } else {
    out.push_back(a);
  }
}

}  // namespace

void Machine::execute(const ast::AgentPtr& agent, NodeId scope, Store& local, std::vector<Thread>& next) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, ast::Skip>) {
          return;
        } else if constexpr (std::is_same_v<T, ast::Tell>) {
          local.add_constraint(scope, x.constraint);
        } else if constexpr (std::is_same_v<T, ast::Parallel>) {
          std::vector<ast::AgentPtr> parts;
          flatten(agent, parts);
          std::vector<Store> subs;
          subs.reserve(parts.size());
          for (const auto& part : parts) {
            subs.push_back(local.snapshot());
            execute(part, scope, subs.back(), next);
          }
          local = Store::merge(local, subs);
        } else if constexpr (std::is_same_v<T, ast::Choice>) {
          // The snapshot differs from the instant's initial store only by
          // fresh scopes and unbound variables, so guards see the pre-step store.
          std::vector<std::size_t> enabled;
          for (std::size_t i = 0; i < x.branches.size(); ++i)
            if (local.entails(scope, x.branches[i].guard)) enabled.push_back(i);
          if (enabled.empty())
            next.push_back({agent, scope});
          else
            next.push_back({x.branches[enabled[picker_.pick(enabled.size())]].body, scope});
        } else if constexpr (std::is_same_v<T, ast::Now>) {
          if (local.entails(scope, x.cond))
            execute(x.then_branch, scope, local, next);
          else
            execute(x.else_branch, scope, local, next);
        } else if constexpr (std::is_same_v<T, ast::Exists>) {
          NodeId node = local.add_scope(scope, ScopeKind::Exists);
          for (const auto& v : x.vars) local.add_variable(node, v);
          execute(x.body, node, local, next);
        } else {
          const ast::Declaration* decl = program_.find(x.name);
          if (!decl) throw UnknownProcedure("unknown procedure " + x.name, agent->pos);
          if (decl->formals.size() != x.actuals.size())
            throw ArityError(x.name + " expects " + std::to_string(decl->formals.size()) + " arguments", agent->pos);
          NodeId node = local.add_scope(scope, ScopeKind::ProcCall, x.name);
          for (std::size_t i = 0; i < x.actuals.size(); ++i)
            local.add_parameter(node, decl->formals[i], x.actuals[i], scope);
          next.push_back({decl->body, node});
        }
      },
      agent->node);
}

Status Machine::classify() const {
  if (!store_.is_consistent()) return Status::Failed;
  for (const auto& t : active_) {
    if (std::holds_alternative<ast::Skip>(t.agent->node)) continue;
    const auto* c = std::get_if<ast::Choice>(&t.agent->node);
    if (!c) return Status::Running;
    for (const auto& b : c->branches)
      if (store_.entails(t.scope, b.guard)) return Status::Running;
  }
  return Status::Quiescent;
}

void Machine::step() {
  if (status_ != Status::Running) return;
  std::vector<Store> locals;
  locals.reserve(active_.size());
  std::vector<Thread> next;
  for (const auto& t : active_) {
    locals.push_back(store_.snapshot());
    execute(t.agent, t.scope, locals.back(), next);
  }
  store_ = Store::merge(store_, locals);
  active_ = std::move(next);
  ++clock_;
  status_ = classify();
}

Trace run(const ast::Program& program, std::size_t steps, ChoicePolicy policy) {
  Machine m(program, policy);
  Trace trace;
  trace.push_back(m.snapshot());
  while (m.clock() < steps && m.status() == Status::Running) {
    m.step();
    trace.push_back(m.snapshot());
  }
  return trace;
}

}  // namespace tccp
