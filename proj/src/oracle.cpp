#include "tccp/oracle.hpp"

#include <set>
#include <stdexcept>

namespace tccp::oracle {

using ast::TermPtr;

namespace {

LinConstraint::Cmp cmp_of(ast::RelOp op) {
  switch (op) {
    case ast::RelOp::Eq: return LinConstraint::Cmp::Eq;
    case ast::RelOp::Lt: return LinConstraint::Cmp::Lt;
    case ast::RelOp::Gt: return LinConstraint::Cmp::Gt;
    case ast::RelOp::Le: return LinConstraint::Cmp::Le;
    case ast::RelOp::Ge: return LinConstraint::Cmp::Ge;
  }
  return LinConstraint::Cmp::Eq;
}

const std::string* var_name(const TermPtr& t) {
  if (const auto* v = std::get_if<ast::Var>(&t->node)) return &v->name;
  return nullptr;
}

}  // namespace

// ---------------------------------------------------------------------------
// RefStore

TermPtr RefStore::walk(TermPtr t) const {
  while (const auto* name = var_name(t)) {
    auto it = subst_.find(*name);
    if (it == subst_.end()) break;
    t = it->second;
  }
  return t;
}

TermPtr RefStore::freshen(const TermPtr& t) {
  if (std::holds_alternative<ast::Anon>(t->node)) return ast::var("_#" + std::to_string(fresh_++));
  if (const auto* c = std::get_if<ast::Cons>(&t->node)) return ast::cons(freshen(c->head), freshen(c->tail));
  return t;
}

Dim RefStore::dim_of(const std::string& var) {
  auto it = dims_.find(var);
  if (it != dims_.end()) return it->second;
  Dim d = lin_.add_dim();
  dims_.emplace(var, d);
  return d;
}

bool RefStore::occurs(const std::string& var, TermPtr t) const {
  t = walk(t);
  if (const auto* name = var_name(t)) return *name == var;
  if (const auto* c = std::get_if<ast::Cons>(&t->node)) return occurs(var, c->head) || occurs(var, c->tail);
  return false;
}

void RefStore::bind(const std::string& var, const TermPtr& value) {
  if (dims_.count(var)) {
    if (const auto* n = std::get_if<ast::Num>(&value->node))
      lin_.add(LinConstraint::make(AffineExpr::dim(dims_.at(var)), LinConstraint::Cmp::Eq, AffineExpr::value(n->value)));
    else
      clash_ = true;
    return;
  }
  if (occurs(var, value)) {
    clash_ = true;
    return;
  }
  subst_[var] = value;
}

void RefStore::unify(TermPtr a, TermPtr b) {
  a = walk(a);
  b = walk(b);
  const auto* va = var_name(a);
  const auto* vb = var_name(b);
  if (va && vb) {
    if (*va == *vb) return;
    bool da = dims_.count(*va) > 0;
    bool db = dims_.count(*vb) > 0;
    if (da && db)
      lin_.add(LinConstraint::make(AffineExpr::dim(dims_.at(*va)), LinConstraint::Cmp::Eq,
                                   AffineExpr::dim(dims_.at(*vb))));
    else if (da)
      subst_[*vb] = a;
    else
      subst_[*va] = b;
    return;
  }
  if (va) return bind(*va, b);
  if (vb) return bind(*vb, a);

  const auto& na = a->node;
  const auto& nb = b->node;
  if (na.index() != nb.index()) {
    clash_ = true;
    return;
  }
  if (const auto* x = std::get_if<ast::Atom>(&na)) {
    if (x->name != std::get<ast::Atom>(nb).name) clash_ = true;
  } else if (const auto* x = std::get_if<ast::Num>(&na)) {
    if (x->value != std::get<ast::Num>(nb).value) clash_ = true;
  } else if (const auto* x = std::get_if<ast::Cons>(&na)) {
    const auto& y = std::get<ast::Cons>(nb);
    unify(x->head, y.head);
    unify(x->tail, y.tail);
  }
}

void RefStore::tell(const ast::Constraint& c) {
  if (const auto* s = std::get_if<ast::StreamEq>(&c.node)) {
    unify(ast::var(s->var), freshen(s->rhs));
  } else if (const auto* l = std::get_if<ast::Linear>(&c.node)) {
    bool ok = true;
    auto convert = [&](const ast::LinExpr& e) {
      AffineExpr out = AffineExpr::value(e.constant);
      for (const auto& [name, k] : e.coeffs) {
        TermPtr w = walk(ast::var(name));
        if (const auto* v = var_name(w))
          out += AffineExpr::dim(dim_of(*v), k);
        else if (const auto* n = std::get_if<ast::Num>(&w->node))
          out += AffineExpr::value(k * n->value);
        else
          ok = false;
      }
      return out;
    };
    AffineExpr lhs = convert(l->lhs);
    AffineExpr rhs = convert(l->rhs);
    if (ok)
      lin_.add(LinConstraint::make(lhs, cmp_of(l->op), rhs));
    else
      clash_ = true;
  }
}

bool RefStore::equals_number(TermPtr a, const Rational& n) const {
  a = walk(a);
  if (const auto* x = std::get_if<ast::Num>(&a->node)) return x->value == n;
  if (const auto* v = var_name(a)) {
    auto it = dims_.find(*v);
    return it != dims_.end() &&
           lin_.entails(LinConstraint::make(AffineExpr::dim(it->second), LinConstraint::Cmp::Eq, AffineExpr::value(n)));
  }
  return false;
}

bool RefStore::same(TermPtr a, TermPtr b) const {
  a = walk(a);
  b = walk(b);
  const auto* va = var_name(a);
  const auto* vb = var_name(b);
  if (va && vb) {
    if (*va == *vb) return true;
    auto ia = dims_.find(*va);
    auto ib = dims_.find(*vb);
    return ia != dims_.end() && ib != dims_.end() &&
           lin_.entails(LinConstraint::make(AffineExpr::dim(ia->second), LinConstraint::Cmp::Eq,
                                            AffineExpr::dim(ib->second)));
  }
  if (va) {
    const auto* n = std::get_if<ast::Num>(&b->node);
    return n && equals_number(a, n->value);
  }
  if (vb) return same(b, a);
  if (a->node.index() != b->node.index()) return false;
  if (const auto* x = std::get_if<ast::Atom>(&a->node)) return x->name == std::get<ast::Atom>(b->node).name;
  if (const auto* x = std::get_if<ast::Num>(&a->node)) return x->value == std::get<ast::Num>(b->node).value;
  if (const auto* x = std::get_if<ast::Cons>(&a->node)) {
    const auto& y = std::get<ast::Cons>(b->node);
    return same(x->head, y.head) && same(x->tail, y.tail);
  }
  return false;
}

bool RefStore::matches(TermPtr value, const ast::Term& pattern) const {
  if (std::holds_alternative<ast::Anon>(pattern.node)) return true;
  if (const auto* v = std::get_if<ast::Var>(&pattern.node)) return same(value, ast::var(v->name));
  value = walk(value);
  if (const auto* a = std::get_if<ast::Atom>(&pattern.node)) {
    const auto* x = std::get_if<ast::Atom>(&value->node);
    return x && x->name == a->name;
  }
  if (const auto* n = std::get_if<ast::Num>(&pattern.node)) return equals_number(value, n->value);
  const auto& pc = std::get<ast::Cons>(pattern.node);
  const auto* vc = std::get_if<ast::Cons>(&value->node);
  return vc && matches(vc->head, *pc.head) && matches(vc->tail, *pc.tail);
}

bool RefStore::entails(const ast::Constraint& c) const {
  if (!is_consistent()) return true;
  if (std::holds_alternative<ast::True>(c.node)) return true;
  if (const auto* s = std::get_if<ast::StreamEq>(&c.node)) return matches(ast::var(s->var), *s->rhs);
  const auto& l = std::get<ast::Linear>(c.node);
  ast::LinExpr diff = l.lhs - l.rhs;
  AffineExpr e = AffineExpr::value(diff.constant);
  for (const auto& [name, k] : diff.coeffs) {
    TermPtr w = walk(ast::var(name));
    if (const auto* v = var_name(w)) {
      auto it = dims_.find(*v);
      if (it == dims_.end()) return false;
      e += AffineExpr::dim(it->second, k);
    } else if (const auto* n = std::get_if<ast::Num>(&w->node)) {
      e += AffineExpr::value(k * n->value);
    } else {
      return false;
    }
  }
  return lin_.entails(LinConstraint::make(e, cmp_of(l.op), AffineExpr{}));
}

// ---------------------------------------------------------------------------
// Rule application

namespace {

using Renaming = std::map<std::string, std::string>;

std::string renamed(const Renaming& m, const std::string& v) {
  auto it = m.find(v);
  return it == m.end() ? v : it->second;
}

TermPtr rename(const TermPtr& t, const Renaming& m) {
  if (const auto* v = std::get_if<ast::Var>(&t->node)) return ast::var(renamed(m, v->name));
  if (const auto* c = std::get_if<ast::Cons>(&t->node)) return ast::cons(rename(c->head, m), rename(c->tail, m));
  return t;
}

ast::LinExpr rename(const ast::LinExpr& e, const Renaming& m) {
  ast::LinExpr out = ast::LinExpr::of_const(e.constant);
  for (const auto& [v, k] : e.coeffs) out += ast::LinExpr::of_var(renamed(m, v)) * k;
  return out;
}

ast::Constraint rename(const ast::Constraint& c, const Renaming& m) {
  if (const auto* s = std::get_if<ast::StreamEq>(&c.node)) return ast::stream_eq(renamed(m, s->var), rename(s->rhs, m));
  if (const auto* l = std::get_if<ast::Linear>(&c.node)) return ast::linear(rename(l->lhs, m), l->op, rename(l->rhs, m));
  return c;
}

ast::AgentPtr rename(const ast::AgentPtr& a, const Renaming& m) {
  if (m.empty()) return a;
  return std::visit(
      [&](const auto& x) -> ast::AgentPtr {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, ast::Skip>) {
          return a;
        } else if constexpr (std::is_same_v<T, ast::Tell>) {
          return ast::tell(rename(x.constraint, m));
        } else if constexpr (std::is_same_v<T, ast::Parallel>) {
          return ast::parallel(rename(x.left, m), rename(x.right, m));
        } else if constexpr (std::is_same_v<T, ast::Choice>) {
          std::vector<ast::Branch> bs;
          for (const auto& b : x.branches) bs.push_back({rename(b.guard, m), rename(b.body, m)});
          return ast::choice(std::move(bs));
        } else if constexpr (std::is_same_v<T, ast::Now>) {
          return ast::now(rename(x.cond, m), rename(x.then_branch, m), rename(x.else_branch, m));
        } else if constexpr (std::is_same_v<T, ast::Exists>) {
          Renaming inner = m;
          for (const auto& v : x.vars) inner.erase(v);
          return ast::exists(x.vars, rename(x.body, inner));
        } else {
          std::vector<ast::Actual> acts;
          for (const auto& act : x.actuals) {
            if (act.index() == 0)
              acts.emplace_back(rename(std::get<0>(act), m));
            else
              acts.emplace_back(rename(std::get<1>(act), m));
          }
          return ast::call(x.name, std::move(acts));
        }
      },
      a->node);
}

class Engine {
 public:
  Engine(const ast::Program& p, ChoicePolicy policy) : program_(p), picker_(policy) {}

  void transition(const ast::AgentPtr& a, const RefStore& d, RefStore& next, std::vector<ast::AgentPtr>& out) {
    std::visit(
        [&](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, ast::Skip>) {
            return;
          } else if constexpr (std::is_same_v<T, ast::Tell>) {
            next.tell(x.constraint);
          } else if constexpr (std::is_same_v<T, ast::Parallel>) {
            transition(x.left, d, next, out);
            transition(x.right, d, next, out);
          } else if constexpr (std::is_same_v<T, ast::Choice>) {
            std::vector<std::size_t> enabled;
            for (std::size_t i = 0; i < x.branches.size(); ++i)
              if (d.entails(x.branches[i].guard)) enabled.push_back(i);
            if (enabled.empty())
              out.push_back(a);
            else
              out.push_back(x.branches[enabled[picker_.pick(enabled.size())]].body);
          } else if constexpr (std::is_same_v<T, ast::Now>) {
            transition(d.entails(x.cond) ? x.then_branch : x.else_branch, d, next, out);
          } else if constexpr (std::is_same_v<T, ast::Exists>) {
            Renaming m;
            for (const auto& v : x.vars) m[v] = fresh(v);
            transition(rename(x.body, m), d, next, out);
          } else {
            const ast::Declaration* decl = program_.find(x.name);
            if (!decl || decl->formals.size() != x.actuals.size())
              throw std::invalid_argument("bad call to " + x.name);
            Renaming m;
            for (std::size_t i = 0; i < x.actuals.size(); ++i) {
              const std::string f = fresh(decl->formals[i]);
              m[decl->formals[i]] = f;
              const auto& act = x.actuals[i];
              if (act.index() == 0)
                next.tell(ast::stream_eq(f, std::get<0>(act)));
              else
                next.tell(ast::linear(ast::LinExpr::of_var(f), ast::RelOp::Eq, std::get<1>(act)));
            }
            out.push_back(rename(decl->body, m));
          }
        },
        a->node);
  }

 private:
  std::string fresh(const std::string& base) { return base + "#" + std::to_string(counter_++); }

  const ast::Program& program_;
  BranchPicker picker_;
  std::size_t counter_ = 0;
};

Status classify(const RefStore& d, const std::vector<ast::AgentPtr>& active) {
  if (!d.is_consistent()) return Status::Failed;
  for (const auto& a : active) {
    if (std::holds_alternative<ast::Skip>(a->node)) continue;
    const auto* c = std::get_if<ast::Choice>(&a->node);
    if (!c) return Status::Running;
    for (const auto& b : c->branches)
      if (d.entails(b.guard)) return Status::Running;
  }
  return Status::Quiescent;
}

}  // namespace

std::vector<Step> run(const ast::Program& program, std::size_t steps, ChoicePolicy policy) {
  if (!program.entry) throw std::invalid_argument("program has no entry agent");
  Engine engine(program, policy);
  std::vector<Step> trace;
  Step cur;
  cur.active.push_back(program.entry);
  cur.status = classify(cur.store, cur.active);
  trace.push_back(cur);
  while (cur.clock < steps && cur.status == Status::Running) {
    Step next;
    next.store = cur.store;
    for (const auto& a : cur.active) engine.transition(a, cur.store, next.store, next.active);
    next.clock = cur.clock + 1;
    next.status = classify(next.store, next.active);
    cur = std::move(next);
    trace.push_back(cur);
  }
  return trace;
}

// ---------------------------------------------------------------------------
// Observations

namespace {

void collect(const ast::Term& t, std::set<std::string>& atoms, std::set<Rational>& nums) {
  if (const auto* a = std::get_if<ast::Atom>(&t.node)) atoms.insert(a->name);
  if (const auto* n = std::get_if<ast::Num>(&t.node)) nums.insert(n->value);
  if (const auto* c = std::get_if<ast::Cons>(&t.node)) {
    collect(*c->head, atoms, nums);
    collect(*c->tail, atoms, nums);
  }
}

void collect(const ast::Constraint& c, std::set<std::string>& atoms, std::set<Rational>& nums) {
  if (const auto* s = std::get_if<ast::StreamEq>(&c.node)) collect(*s->rhs, atoms, nums);
  if (const auto* l = std::get_if<ast::Linear>(&c.node)) {
    nums.insert(l->lhs.constant);
    nums.insert(-l->rhs.constant);
    nums.insert(l->rhs.constant - l->lhs.constant);
  }
}

void collect(const ast::Agent& a, std::set<std::string>& atoms, std::set<Rational>& nums) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, ast::Tell>) {
          collect(x.constraint, atoms, nums);
        } else if constexpr (std::is_same_v<T, ast::Parallel>) {
          collect(*x.left, atoms, nums);
          collect(*x.right, atoms, nums);
        } else if constexpr (std::is_same_v<T, ast::Choice>) {
          for (const auto& b : x.branches) {
            collect(b.guard, atoms, nums);
            collect(*b.body, atoms, nums);
          }
        } else if constexpr (std::is_same_v<T, ast::Now>) {
          collect(x.cond, atoms, nums);
          collect(*x.then_branch, atoms, nums);
          collect(*x.else_branch, atoms, nums);
        } else if constexpr (std::is_same_v<T, ast::Exists>) {
          collect(*x.body, atoms, nums);
        } else if constexpr (std::is_same_v<T, ast::Call>) {
          for (const auto& act : x.actuals) {
            if (act.index() == 0)
              collect(*std::get<0>(act), atoms, nums);
            else
              nums.insert(std::get<1>(act).constant);
          }
        }
      },
      a.node);
}

}  // namespace

std::vector<ast::Constraint> probes(const ast::Program& program) {
  std::set<std::string> atoms;
  std::set<Rational> nums{Rational(0)};
  for (const auto& d : program.decls) collect(*d.body, atoms, nums);
  if (program.entry) collect(*program.entry, atoms, nums);

  std::vector<std::string> roots = program.entry ? ast::free_vars(*program.entry) : std::vector<std::string>{};
  std::vector<ast::Constraint> out;
  for (const auto& v : roots) {
    out.push_back(ast::stream_eq(v, ast::cons(ast::anon(), ast::anon())));
    for (const auto& a : atoms) {
      out.push_back(ast::stream_eq(v, ast::atom(a)));
      out.push_back(ast::stream_eq(v, ast::cons(ast::atom(a), ast::anon())));
      out.push_back(ast::stream_eq(v, ast::cons(ast::anon(), ast::cons(ast::atom(a), ast::anon()))));
    }
    for (const auto& n : nums) {
      out.push_back(ast::stream_eq(v, ast::cons(ast::num(n), ast::anon())));
      for (auto op : {ast::RelOp::Eq, ast::RelOp::Gt, ast::RelOp::Ge})
        out.push_back(ast::linear(ast::LinExpr::of_var(v), op, ast::LinExpr::of_const(n)));
    }
  }
  for (std::size_t i = 0; i < roots.size(); ++i)
    for (std::size_t j = i + 1; j < roots.size(); ++j) {
      out.push_back(ast::stream_eq(roots[i], ast::var(roots[j])));
      out.push_back(ast::linear(ast::LinExpr::of_var(roots[i]), ast::RelOp::Ge, ast::LinExpr::of_var(roots[j])));
      out.push_back(ast::stream_eq(roots[i], ast::cons(ast::var(roots[j]), ast::anon())));
    }
  return out;
}

Observation observe(const TraceStep& step, const std::vector<ast::Constraint>& ps) {
  Observation o{step.clock, step.status, {}};
  for (const auto& p : ps) o.entailed.push_back(step.store.entails(Store::kRoot, p));
  return o;
}

Observation observe(const Step& step, const std::vector<ast::Constraint>& ps) {
  Observation o{step.clock, step.status, {}};
  for (const auto& p : ps) o.entailed.push_back(step.store.entails(p));
  return o;
}

std::vector<Observation> observe(const Trace& trace, const std::vector<ast::Constraint>& ps) {
  std::vector<Observation> out;
  for (const auto& s : trace) out.push_back(observe(s, ps));
  return out;
}

std::vector<Observation> observe(const std::vector<Step>& trace, const std::vector<ast::Constraint>& ps) {
  std::vector<Observation> out;
  for (const auto& s : trace) out.push_back(observe(s, ps));
  return out;
}

}  // namespace tccp::oracle
