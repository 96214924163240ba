#pragma once

// The abstract machine's memory: a symbol-table tree of scopes, an
// append-only array of typed registers and the linear constraint store.
//
// A Store is a value. Snapshots are plain copies that keep sharing one
// Allocator with their origin, so registers, dimensions and scope nodes
// created in sibling snapshots never collide and merge() can recombine them
// index for index.

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "tccp/ast.hpp"
#include "tccp/linear_store.hpp"

namespace tccp {

using Reg = std::size_t;
using NodeId = std::size_t;

enum class ScopeKind { Root, ProcCall, Exists };

const char* to_string(ScopeKind k);

struct ScopeNode {
  NodeId id = 0;
  std::optional<NodeId> parent;
  ScopeKind kind = ScopeKind::Root;
  std::string label;  // procedure name for ProcCall nodes
  std::vector<std::pair<std::string, Reg>> symbols;

  std::optional<Reg> find(std::string_view name) const;
};

struct AtomValue {
  std::string name;
  friend bool operator==(const AtomValue&, const AtomValue&) = default;
};

/// Payload of a Constant register.
using ConstValue = std::variant<AtomValue, Rational>;

std::string to_string(const ConstValue& v);

enum class CellKind {
  Unbound,      // logic variable with no information yet
  Constant,     // atom or number
  DiscreteVar,  // numeric variable living in the linear store
  Reference,    // alias of another register
  Functor,      // stream cell; head at `index`, tail at `index + 1`
  Vacant,       // allocated by a sibling snapshot, not visible here
};

const char* to_string(CellKind k);

struct MemCell {
  CellKind kind = CellKind::Unbound;
  std::size_t index = 0;  // dim (DiscreteVar), target (Reference), head (Functor)
  ConstValue value;       // Constant only

  static MemCell unbound() { return {}; }
  static MemCell constant(ConstValue v) { return {CellKind::Constant, 0, std::move(v)}; }
  static MemCell discrete(Dim d) { return {CellKind::DiscreteVar, d, {}}; }
  static MemCell reference(Reg r) { return {CellKind::Reference, r, {}}; }
  static MemCell functor(Reg head) { return {CellKind::Functor, head, {}}; }
  static MemCell vacant() { return {CellKind::Vacant, 0, {}}; }

  friend bool operator==(const MemCell&, const MemCell&) = default;
};

/// Index source shared by a store and every snapshot derived from it.
struct Allocator {
  std::size_t next_reg = 0;
  std::size_t next_dim = 0;
  std::size_t next_node = 0;
  /// Dimension handed out for a formerly unbound register, so that sibling
  /// snapshots constraining the same variable agree on its dimension.
  std::unordered_map<Reg, Dim> lazy_dims;
};

class Store {
 public:
  static constexpr NodeId kRoot = 0;

  /// Fresh store: a single root scope, no registers, universe linear store.
  Store();

  // --- the six machine instructions -------------------------------------

  /// Stream constraints consistent and linear store non-empty.
  bool is_consistent() const { return !stream_false_ && !lin_.is_empty(); }

  /// New Unbound register bound to `name` in `scope`.
  Reg add_variable(NodeId scope, std::string_view name);

  /// Binds `formal` in the procedure-call node `callee` to the caller's actual:
  /// a variable makes the formal's symbol point at the caller's register, a
  /// constant gives a fresh Constant register, an affine expression a fresh
  /// DiscreteVar constrained to equal it.
  Reg add_parameter(NodeId callee, std::string_view formal, const ast::Actual& actual, NodeId caller);

  /// Tell-mode: unifies stream equations, conjoins linear constraints.
  /// Conflicts make the store inconsistent rather than throwing.
  void add_constraint(NodeId scope, const ast::Constraint& c);

  /// Ask-mode; never mutates. Unbound positions are not entailed.
  bool entails(NodeId scope, const ast::Constraint& c) const;

  /// Independent copy sharing index allocation with this store.
  Store snapshot() const { return *this; }

  /// Recombines snapshots taken from `base` (directly or transitively).
  static Store merge(const Store& base, std::span<const Store> locals);

  // --- scopes ------------------------------------------------------------

  NodeId add_scope(NodeId parent, ScopeKind kind, std::string label = {});

  /// Walks from `scope` toward the root, stopping after the first
  /// procedure-call node. Throws UnknownSymbol.
  Reg lookup(NodeId scope, std::string_view name) const;
  std::optional<Reg> find(NodeId scope, std::string_view name) const;

  // --- inspection --------------------------------------------------------

  std::size_t scope_count() const { return scopes_.size(); }
  const ScopeNode& scope(NodeId id) const;
  std::size_t register_count() const { return memory_.size(); }
  const MemCell& cell(Reg r) const { return memory_.at(r); }
  const LinStore& lin() const { return lin_; }
  bool stream_inconsistent() const { return stream_false_; }
  std::size_t dims() const { return lin_.dims(); }

  /// Follows Reference chains.
  Reg deref(Reg r) const;

  /// Human-readable value of a register: `[free|_]`, `5`, `D_3`, `_`.
  std::string render(Reg r, std::size_t depth_limit = 64) const;

  /// Heads of the stream rooted at r until an unbound tail, rendered.
  std::vector<std::string> stream_heads(Reg r, std::size_t limit = 4096) const;

  /// Symbol table, registers and linear store as text.
  std::string dump() const;

  bool operator==(const Store& other) const;

 private:
  Reg alloc(std::size_t n = 1);
  Dim alloc_dim();
  void put(Reg r, MemCell c);
  ScopeNode& mutable_scope(NodeId id);

  Dim dim_of_unbound(Reg r);

  // tell-mode
  void bind(Reg unbound, MemCell value);
  void unify(Reg a, Reg b);
  void unify_cell(Reg r, const MemCell& value);
  void unify_term(NodeId scope, Reg r, const ast::Term& t);
  void build(NodeId scope, Reg target, const ast::Term& t);
  bool occurs(Reg needle, Reg hay) const;
  bool occurs_in_term(NodeId scope, Reg needle, const ast::Term& t) const;
  void tell_linear(NodeId scope, const ast::Linear& c);
  void clash() { stream_false_ = true; }

  // ask-mode
  bool matches(NodeId scope, Reg r, const ast::Term& t) const;
  bool same_value(Reg a, Reg b) const;
  bool numeric_equals(Reg r, const Rational& v) const;

  std::shared_ptr<Allocator> alloc_;
  std::vector<std::shared_ptr<ScopeNode>> scopes_;  // null = vacant
  std::vector<MemCell> memory_;
  LinStore lin_;
  bool stream_false_ = false;
};

}  // namespace tccp
