#include "tccp/store.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace tccp {

const char* to_string(ScopeKind k) {
  switch (k) {
    case ScopeKind::Root: return "root";
    case ScopeKind::ProcCall: return "proc_call";
    case ScopeKind::Exists: return "exists";
  }
  return "?";
}

const char* to_string(CellKind k) {
  switch (k) {
    case CellKind::Unbound: return "unbound";
    case CellKind::Constant: return "constant";
    case CellKind::DiscreteVar: return "discrete";
    case CellKind::Reference: return "reference";
    case CellKind::Functor: return "functor";
    case CellKind::Vacant: return "vacant";
  }
  return "?";
}

std::string to_string(const ConstValue& v) {
  if (const auto* a = std::get_if<AtomValue>(&v)) return a->name;
  return to_string(std::get<Rational>(v));
}

std::optional<Reg> ScopeNode::find(std::string_view name) const {
  for (auto it = symbols.rbegin(); it != symbols.rend(); ++it)
    if (it->first == name) return it->second;
  return std::nullopt;
}

namespace {

LinConstraint::Cmp to_cmp(ast::RelOp op) {
  switch (op) {
    case ast::RelOp::Eq: return LinConstraint::Cmp::Eq;
    case ast::RelOp::Lt: return LinConstraint::Cmp::Lt;
    case ast::RelOp::Gt: return LinConstraint::Cmp::Gt;
    case ast::RelOp::Le: return LinConstraint::Cmp::Le;
    case ast::RelOp::Ge: return LinConstraint::Cmp::Ge;
  }
  return LinConstraint::Cmp::Eq;
}

}  // namespace

Store::Store() : alloc_(std::make_shared<Allocator>()) {
  alloc_->next_node = 1;
  scopes_.push_back(std::make_shared<ScopeNode>(ScopeNode{kRoot, std::nullopt, ScopeKind::Root, {}, {}}));
}

// ---------------------------------------------------------------------------
// Allocation

Reg Store::alloc(std::size_t n) {
  Reg r = alloc_->next_reg;
  alloc_->next_reg += n;
  if (memory_.size() < r) memory_.resize(r, MemCell::vacant());
  memory_.resize(r + n, MemCell::unbound());
  return r;
}

Dim Store::alloc_dim() {
  Dim d = alloc_->next_dim++;
  lin_.ensure_dims(d + 1);
  return d;
}

void Store::put(Reg r, MemCell c) { memory_[r] = std::move(c); }

Dim Store::dim_of_unbound(Reg r) {
  Dim d;
  if (auto it = alloc_->lazy_dims.find(r); it != alloc_->lazy_dims.end()) {
    d = it->second;
    lin_.ensure_dims(d + 1);
  } else {
    d = alloc_dim();
    alloc_->lazy_dims.emplace(r, d);
  }
  put(r, MemCell::discrete(d));
  return d;
}

NodeId Store::add_scope(NodeId parent, ScopeKind kind, std::string label) {
  scope(parent);
  NodeId id = alloc_->next_node++;
  if (scopes_.size() <= id) scopes_.resize(id + 1);
  scopes_[id] = std::make_shared<ScopeNode>(ScopeNode{id, parent, kind, std::move(label), {}});
  return id;
}

const ScopeNode& Store::scope(NodeId id) const {
  if (id >= scopes_.size() || !scopes_[id]) throw UnknownScope("no scope node N" + std::to_string(id));
  return *scopes_[id];
}

ScopeNode& Store::mutable_scope(NodeId id) {
  scope(id);
  auto& p = scopes_[id];
  if (p.use_count() > 1) p = std::make_shared<ScopeNode>(*p);
  return *p;
}

// ---------------------------------------------------------------------------
// Symbols

std::optional<Reg> Store::find(NodeId id, std::string_view name) const {
  for (;;) {
    const ScopeNode& node = scope(id);
    if (auto r = node.find(name)) return r;
    if (node.kind == ScopeKind::ProcCall || !node.parent) return std::nullopt;
    id = *node.parent;
  }
}

Reg Store::lookup(NodeId scope_id, std::string_view name) const {
  if (auto r = find(scope_id, name)) return *r;
  throw UnknownSymbol("unknown symbol " + std::string(name) + " in scope N" + std::to_string(scope_id));
}

Reg Store::add_variable(NodeId scope_id, std::string_view name) {
  if (scope(scope_id).find(name))
    throw DuplicateInScope(std::string(name) + " already declared in N" + std::to_string(scope_id));
  Reg r = alloc();
  mutable_scope(scope_id).symbols.emplace_back(std::string(name), r);
  return r;
}

Reg Store::add_parameter(NodeId callee, std::string_view formal, const ast::Actual& actual, NodeId caller) {
  if (scope(callee).kind != ScopeKind::ProcCall)
    throw Error("add_parameter on non procedure-call scope N" + std::to_string(callee));
  if (scope(callee).find(formal))
    throw DuplicateInScope(std::string(formal) + " already declared in N" + std::to_string(callee));
  for (const auto& v : ast::vars_of(actual))
    if (!find(caller, v)) throw UnboundActual("actual parameter " + v + " is not in scope");

  Reg r;
  if (actual.index() == 0) {
    const ast::Term& t = *std::get<0>(actual);
    if (const auto* v = std::get_if<ast::Var>(&t.node)) {
      // The formal names the caller's register itself; no cell is allocated.
      r = lookup(caller, v->name);
    } else {
      r = alloc();
      build(caller, r, t);
    }
  } else {
    const auto& expr = std::get<1>(actual);
    AffineExpr value;
    bool ok = true;
    for (const auto& [name, k] : expr.coeffs) {
      Reg x = deref(lookup(caller, name));
      const MemCell c = memory_[x];
      if (c.kind == CellKind::Unbound) {
        value += AffineExpr::dim(dim_of_unbound(x), k);
      } else if (c.kind == CellKind::DiscreteVar) {
        value += AffineExpr::dim(c.index, k);
      } else if (c.kind == CellKind::Constant && std::holds_alternative<Rational>(c.value)) {
        value += AffineExpr::value(k * std::get<Rational>(c.value));
      } else {
        ok = false;
      }
    }
    value += AffineExpr::value(expr.constant);
    Dim d = alloc_dim();
    r = alloc();
    put(r, MemCell::discrete(d));
    if (ok)
      lin_.add(LinConstraint::make(AffineExpr::dim(d), LinConstraint::Cmp::Eq, value));
    else
      clash();
  }
  mutable_scope(callee).symbols.emplace_back(std::string(formal), r);
  return r;
}

// ---------------------------------------------------------------------------
// Tell

Reg Store::deref(Reg r) const {
  while (memory_.at(r).kind == CellKind::Reference) r = memory_[r].index;
  return r;
}

void Store::bind(Reg unbound, MemCell value) { put(unbound, std::move(value)); }

bool Store::occurs(Reg needle, Reg hay) const {
  hay = deref(hay);
  if (hay == needle) return true;
  const MemCell& c = memory_[hay];
  if (c.kind != CellKind::Functor) return false;
  return occurs(needle, c.index) || occurs(needle, c.index + 1);
}

bool Store::occurs_in_term(NodeId scope_id, Reg needle, const ast::Term& t) const {
  if (const auto* v = std::get_if<ast::Var>(&t.node)) return occurs(needle, lookup(scope_id, v->name));
  if (const auto* c = std::get_if<ast::Cons>(&t.node))
    return occurs_in_term(scope_id, needle, *c->head) || occurs_in_term(scope_id, needle, *c->tail);
  return false;
}

void Store::unify(Reg a, Reg b) {
  a = deref(a);
  b = deref(b);
  if (a == b) return;
  const MemCell ca = memory_[a];
  const MemCell cb = memory_[b];
  if (ca.kind == CellKind::Unbound && cb.kind == CellKind::Unbound) {
    // younger register points at the older one
    bind(std::max(a, b), MemCell::reference(std::min(a, b)));
    return;
  }
  if (ca.kind == CellKind::Unbound) {
    if (cb.kind == CellKind::Functor && occurs(a, b))
      clash();
    else
      bind(a, MemCell::reference(b));
    return;
  }
  if (cb.kind == CellKind::Unbound) {
    if (ca.kind == CellKind::Functor && occurs(b, a))
      clash();
    else
      bind(b, MemCell::reference(a));
    return;
  }
  unify_cell(a, cb);
}

void Store::unify_cell(Reg r, const MemCell& v) {
  switch (v.kind) {
    case CellKind::Unbound:
    case CellKind::Vacant:
      return;
    case CellKind::Reference:
      unify(r, v.index);
      return;
    default:
      break;
  }
  Reg x = deref(r);
  const MemCell cx = memory_[x];
  auto link_number = [&](Dim d, const ConstValue& value) {
    if (const auto* q = std::get_if<Rational>(&value))
      lin_.add(LinConstraint::make(AffineExpr::dim(d), LinConstraint::Cmp::Eq, AffineExpr::value(*q)));
    else
      clash();
  };
  switch (cx.kind) {
    case CellKind::Unbound:
      if (v.kind == CellKind::Functor && (occurs(x, v.index) || occurs(x, v.index + 1)))
        clash();
      else
        bind(x, v);
      return;
    case CellKind::Constant:
      if (v.kind == CellKind::Constant) {
        if (!(cx.value == v.value)) clash();
      } else if (v.kind == CellKind::DiscreteVar) {
        link_number(v.index, cx.value);
      } else {
        clash();
      }
      return;
    case CellKind::DiscreteVar:
      if (v.kind == CellKind::DiscreteVar) {
        if (v.index != cx.index)
          lin_.add(LinConstraint::make(AffineExpr::dim(cx.index), LinConstraint::Cmp::Eq, AffineExpr::dim(v.index)));
      } else if (v.kind == CellKind::Constant) {
        link_number(cx.index, v.value);
      } else {
        clash();
      }
      return;
    case CellKind::Functor:
      if (v.kind == CellKind::Functor) {
        unify(cx.index, v.index);
        unify(cx.index + 1, v.index + 1);
      } else {
        clash();
      }
      return;
    default:
      throw std::logic_error("unify_cell on " + std::string(to_string(cx.kind)) + " register");
  }
}

void Store::build(NodeId scope_id, Reg target, const ast::Term& t) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, ast::Anon>) {
          put(target, MemCell::unbound());
        } else if constexpr (std::is_same_v<T, ast::Var>) {
          put(target, MemCell::reference(lookup(scope_id, x.name)));
        } else if constexpr (std::is_same_v<T, ast::Atom>) {
          put(target, MemCell::constant(AtomValue{x.name}));
        } else if constexpr (std::is_same_v<T, ast::Num>) {
          put(target, MemCell::constant(x.value));
        } else {
          Reg head = alloc(2);
          build(scope_id, head, *x.head);
          build(scope_id, head + 1, *x.tail);
          put(target, MemCell::functor(head));
        }
      },
      t.node);
}

void Store::unify_term(NodeId scope_id, Reg r, const ast::Term& t) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, ast::Anon>) {
          return;
        } else if constexpr (std::is_same_v<T, ast::Var>) {
          unify(r, lookup(scope_id, x.name));
        } else if constexpr (std::is_same_v<T, ast::Atom>) {
          unify_cell(r, MemCell::constant(AtomValue{x.name}));
        } else if constexpr (std::is_same_v<T, ast::Num>) {
          unify_cell(r, MemCell::constant(x.value));
        } else {
          Reg target = deref(r);
          const MemCell c = memory_[target];
          if (c.kind == CellKind::Unbound) {
            if (occurs_in_term(scope_id, target, t)) {
              clash();
              return;
            }
            Reg head = alloc(2);
            build(scope_id, head, *x.head);
            build(scope_id, head + 1, *x.tail);
            put(target, MemCell::functor(head));
          } else if (c.kind == CellKind::Functor) {
            unify_term(scope_id, c.index, *x.head);
            unify_term(scope_id, c.index + 1, *x.tail);
          } else {
            clash();
          }
        }
      },
      t.node);
}

void Store::tell_linear(NodeId scope_id, const ast::Linear& c) {
  bool ok = true;
  auto convert = [&](const ast::LinExpr& e) {
    AffineExpr out = AffineExpr::value(e.constant);
    for (const auto& [name, k] : e.coeffs) {
      Reg x = deref(lookup(scope_id, name));
      const MemCell cell = memory_[x];
      if (cell.kind == CellKind::Unbound)
        out += AffineExpr::dim(dim_of_unbound(x), k);
      else if (cell.kind == CellKind::DiscreteVar)
        out += AffineExpr::dim(cell.index, k);
      else if (cell.kind == CellKind::Constant && std::holds_alternative<Rational>(cell.value))
        out += AffineExpr::value(k * std::get<Rational>(cell.value));
      else
        ok = false;
    }
    return out;
  };
  AffineExpr lhs = convert(c.lhs);
  AffineExpr rhs = convert(c.rhs);
  if (!ok) {
    clash();
    return;
  }
  lin_.add(LinConstraint::make(lhs, to_cmp(c.op), rhs));
}

void Store::add_constraint(NodeId scope_id, const ast::Constraint& c) {
  for (const auto& v : ast::vars_of(c)) lookup(scope_id, v);
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, ast::StreamEq>) {
          unify_term(scope_id, lookup(scope_id, x.var), *x.rhs);
        } else if constexpr (std::is_same_v<T, ast::Linear>) {
          tell_linear(scope_id, x);
        }
      },
      c.node);
}

// ---------------------------------------------------------------------------
// Ask

bool Store::numeric_equals(Reg r, const Rational& v) const {
  const MemCell& c = memory_[deref(r)];
  if (c.kind == CellKind::Constant) {
    const auto* q = std::get_if<Rational>(&c.value);
    return q && *q == v;
  }
  if (c.kind == CellKind::DiscreteVar)
    return lin_.entails(LinConstraint::make(AffineExpr::dim(c.index), LinConstraint::Cmp::Eq, AffineExpr::value(v)));
  return false;
}

bool Store::same_value(Reg a, Reg b) const {
  a = deref(a);
  b = deref(b);
  if (a == b) return true;
  const MemCell& ca = memory_[a];
  const MemCell& cb = memory_[b];
  if (ca.kind == CellKind::Constant && cb.kind == CellKind::Constant) return ca.value == cb.value;
  if (ca.kind == CellKind::Constant && cb.kind == CellKind::DiscreteVar) {
    const auto* q = std::get_if<Rational>(&ca.value);
    return q && numeric_equals(b, *q);
  }
  if (ca.kind == CellKind::DiscreteVar && cb.kind == CellKind::Constant) return same_value(b, a);
  if (ca.kind == CellKind::DiscreteVar && cb.kind == CellKind::DiscreteVar)
    return lin_.entails(
        LinConstraint::make(AffineExpr::dim(ca.index), LinConstraint::Cmp::Eq, AffineExpr::dim(cb.index)));
  if (ca.kind == CellKind::Functor && cb.kind == CellKind::Functor)
    return same_value(ca.index, cb.index) && same_value(ca.index + 1, cb.index + 1);
  return false;
}

bool Store::matches(NodeId scope_id, Reg r, const ast::Term& t) const {
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, ast::Anon>) {
          return true;
        } else if constexpr (std::is_same_v<T, ast::Var>) {
          return same_value(r, lookup(scope_id, x.name));
        } else if constexpr (std::is_same_v<T, ast::Atom>) {
          const MemCell& c = memory_[deref(r)];
          if (c.kind != CellKind::Constant) return false;
          const auto* a = std::get_if<AtomValue>(&c.value);
          return a && a->name == x.name;
        } else if constexpr (std::is_same_v<T, ast::Num>) {
          return numeric_equals(r, x.value);
        } else {
          const MemCell& c = memory_[deref(r)];
          if (c.kind != CellKind::Functor) return false;
          Reg head = c.index;
          return matches(scope_id, head, *x.head) && matches(scope_id, head + 1, *x.tail);
        }
      },
      t.node);
}

bool Store::entails(NodeId scope_id, const ast::Constraint& c) const {
  for (const auto& v : ast::vars_of(c)) lookup(scope_id, v);
  if (!is_consistent()) return true;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, ast::True>) {
          return true;
        } else if constexpr (std::is_same_v<T, ast::StreamEq>) {
          return matches(scope_id, lookup(scope_id, x.var), *x.rhs);
        } else {
          auto convert = [&](const ast::LinExpr& e) -> std::optional<AffineExpr> {
            AffineExpr out = AffineExpr::value(e.constant);
            for (const auto& [name, k] : e.coeffs) {
              const MemCell& cell = memory_[deref(lookup(scope_id, name))];
              if (cell.kind == CellKind::DiscreteVar)
                out += AffineExpr::dim(cell.index, k);
              else if (cell.kind == CellKind::Constant && std::holds_alternative<Rational>(cell.value))
                out += AffineExpr::value(k * std::get<Rational>(cell.value));
              else
                return std::nullopt;
            }
            return out;
          };
          // Variables that cancel out are irrelevant; any other variable that
          // is unbound or non-numeric leaves the constraint undecided.
          auto diff = convert(x.lhs - x.rhs);
          if (!diff) return false;
          return lin_.entails(LinConstraint::make(*diff, to_cmp(x.op), AffineExpr{}));
        }
      },
      c.node);
}

// ---------------------------------------------------------------------------
// Merge

Store Store::merge(const Store& base, std::span<const Store> locals) {
  Store out = base;
  std::size_t nregs = base.memory_.size();
  std::size_t nnodes = base.scopes_.size();
  std::size_t ndims = base.lin_.dims();
  for (const auto& l : locals) {
    nregs = std::max(nregs, l.memory_.size());
    nnodes = std::max(nnodes, l.scopes_.size());
    ndims = std::max(ndims, l.lin_.dims());
  }
  out.memory_.resize(nregs, MemCell::vacant());
  out.scopes_.resize(nnodes);
  out.lin_.ensure_dims(ndims);

  std::vector<std::pair<Reg, MemCell>> late_bindings;
  std::vector<std::pair<Reg, Reg>> late_links;

  for (const auto& l : locals) {
    for (Reg i = 0; i < l.memory_.size(); ++i) {
      const MemCell& lc = l.memory_[i];
      if (lc.kind == CellKind::Vacant) continue;
      const MemCell* bc = i < base.memory_.size() ? &base.memory_[i] : nullptr;
      if (bc && *bc == lc) continue;
      if (bc && bc->kind != CellKind::Unbound && bc->kind != CellKind::Vacant)
        throw std::logic_error("snapshot rewrote bound register R" + std::to_string(i));
      MemCell& oc = out.memory_[i];
      // Registers the snapshot allocated itself are copied. Bindings of
      // registers that already existed go through unification so that two
      // individually acyclic snapshots cannot combine into a cyclic term.
      bool fresh = !bc || bc->kind == CellKind::Vacant;
      if (fresh && oc.kind == CellKind::Vacant)
        oc = lc;
      else if (!(oc == lc))
        late_bindings.emplace_back(i, lc);
    }

    for (NodeId i = 0; i < l.scopes_.size(); ++i) {
      const auto& lp = l.scopes_[i];
      if (!lp) continue;
      auto& op = out.scopes_[i];
      if (op == lp) continue;
      if (!op) {
        op = lp;
        continue;
      }
      auto merged = std::make_shared<ScopeNode>(*op);
      for (const auto& [name, reg] : lp->symbols) {
        auto it = std::find_if(merged->symbols.begin(), merged->symbols.end(),
                               [&](const auto& s) { return s.first == name; });
        if (it == merged->symbols.end())
          merged->symbols.emplace_back(name, reg);
        else if (it->second != reg)
          late_links.emplace_back(it->second, reg);
      }
      op = std::move(merged);
    }

    LinStore lin = l.lin_;
    lin.ensure_dims(ndims);
    out.lin_ = out.lin_.meet(lin);
    out.stream_false_ = out.stream_false_ || l.stream_false_;
  }

  for (const auto& [r, v] : late_bindings) out.unify_cell(r, v);
  for (const auto& [a, b] : late_links) out.unify(a, b);
  return out;
}

// ---------------------------------------------------------------------------
// Inspection

std::string Store::render(Reg r, std::size_t depth_limit) const {
  Reg x = deref(r);
  const MemCell& c = memory_[x];
  switch (c.kind) {
    case CellKind::Unbound: return "_";
    case CellKind::Constant: return to_string(c.value);
    case CellKind::DiscreteVar: return "D_" + std::to_string(c.index);
    case CellKind::Functor: break;
    default: return "?";
  }
  if (depth_limit == 0) return "[...]";
  std::string out = "[";
  std::size_t n = 0;
  for (;;) {
    const MemCell& cell = memory_[x];
    out += render(cell.index, depth_limit - 1);
    x = deref(cell.index + 1);
    const MemCell& tail = memory_[x];
    if (tail.kind != CellKind::Functor) {
      out += "|" + render(x, depth_limit - 1);
      break;
    }
    if (++n >= depth_limit) {
      out += "|...";
      break;
    }
    out += ", ";
  }
  return out + "]";
}

std::vector<std::string> Store::stream_heads(Reg r, std::size_t limit) const {
  std::vector<std::string> out;
  Reg x = deref(r);
  while (out.size() < limit && memory_[x].kind == CellKind::Functor) {
    out.push_back(render(memory_[x].index));
    x = deref(memory_[x].index + 1);
  }
  return out;
}

std::string Store::dump() const {
  std::ostringstream out;
  out << "scopes:\n";
  for (const auto& node : scopes_) {
    if (!node) continue;
    out << "  N" << node->id << " " << to_string(node->kind);
    if (!node->label.empty()) out << " " << node->label;
    if (node->parent) out << " <- N" << *node->parent;
    out << ":";
    for (const auto& [name, reg] : node->symbols) out << " " << name << "=R" << reg;
    out << "\n";
  }
  out << "registers:\n";
  for (Reg i = 0; i < memory_.size(); ++i) {
    const MemCell& c = memory_[i];
    if (c.kind == CellKind::Vacant) continue;
    out << "  R" << i << " ";
    switch (c.kind) {
      case CellKind::Unbound: out << "unbound"; break;
      case CellKind::Constant: out << "const " << to_string(c.value); break;
      case CellKind::DiscreteVar: out << "discrete D_" << c.index; break;
      case CellKind::Reference: out << "ref R" << c.index; break;
      case CellKind::Functor: out << "functor R" << c.index << " R" << c.index + 1; break;
      default: break;
    }
    out << "\n";
  }
  out << "linear (" << lin_.dims() << " dims):\n";
  for (const auto& c : lin_.constraints()) out << "  " << c.str() << "\n";
  out << "consistent: " << (is_consistent() ? "yes" : "no") << "\n";
  return out.str();
}

bool Store::operator==(const Store& other) const {
  if (memory_ != other.memory_ || stream_false_ != other.stream_false_) return false;
  if (lin_.dims() != other.lin_.dims() || lin_.constraints() != other.lin_.constraints()) return false;
  if (scopes_.size() != other.scopes_.size()) return false;
  for (std::size_t i = 0; i < scopes_.size(); ++i) {
    const auto& a = scopes_[i];
    const auto& b = other.scopes_[i];
    if (!a || !b) {
      if (a || b) return false;
      continue;
    }
    if (a->id != b->id || a->parent != b->parent || a->kind != b->kind || a->label != b->label ||
        a->symbols != b->symbols)
      return false;
  }
  return true;
}

}  // namespace tccp
