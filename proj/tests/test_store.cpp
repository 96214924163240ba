#include <gtest/gtest.h>

#include "support/diagonal.hpp"
#include "support/generators.hpp"
#include "support/printers.hpp"
#include "tccp/errors.hpp"
#include "tccp/store.hpp"
#include "tccp/syntax.hpp"

using namespace tccp;

namespace {

ast::Constraint pc(const char* text) { return parse_constraint(text); }

struct Fixture {
  Store s;
  std::map<std::string, Reg> regs;

  explicit Fixture(std::initializer_list<const char*> names) {
    for (const char* n : names) regs[n] = s.add_variable(Store::kRoot, n);
  }
  void tell(const char* c) { s.add_constraint(Store::kRoot, pc(c)); }
  bool ask(const char* c) const { return s.entails(Store::kRoot, pc(c)); }
};

}  // namespace

// --- consistency --------------------------------------------------------

TEST(Store, FreshIsConsistent) {
  Store s;
  EXPECT_TRUE(s.is_consistent());
  EXPECT_EQ(s.scope_count(), 1u);
  EXPECT_EQ(s.register_count(), 0u);
  EXPECT_EQ(s.dims(), 0u);
}

TEST(Store, OppositeSignsMergeInconsistent) {
  Fixture f{"X"};
  Store a = f.s.snapshot(), b = f.s.snapshot();
  a.add_constraint(Store::kRoot, pc("X > 0"));
  b.add_constraint(Store::kRoot, pc("X < 0"));
  EXPECT_TRUE(a.is_consistent());
  EXPECT_TRUE(b.is_consistent());
  std::vector<Store> locals{a, b};
  Store m = Store::merge(f.s, locals);
  EXPECT_FALSE(m.is_consistent());
  EXPECT_FALSE(m.stream_inconsistent());
}

TEST(Store, HeadClashLatches) {
  Fixture f{"C"};
  f.tell("C = [on|_]");
  EXPECT_TRUE(f.s.is_consistent());
  f.tell("C = [off|_]");
  EXPECT_TRUE(f.s.stream_inconsistent());
  EXPECT_FALSE(f.s.is_consistent());
  // The latch is permanent.
  f.tell("true");
  EXPECT_FALSE(f.s.is_consistent());
}

TEST(Store, InconsistentEntailsEverything) {
  Fixture f{"C", "X"};
  f.tell("C = [on|_]");
  f.tell("C = [off|_]");
  EXPECT_TRUE(f.ask("X = [anything|_]"));
  EXPECT_TRUE(f.ask("X > 100"));
}

// --- add_variable / lookup ----------------------------------------------

TEST(Store, ShadowingInExistsNode) {
  Store s;
  Reg outer = s.add_variable(Store::kRoot, "T'");
  NodeId ex = s.add_scope(Store::kRoot, ScopeKind::Exists);
  Reg inner = s.add_variable(ex, "T'");
  EXPECT_NE(outer, inner);
  EXPECT_EQ(s.lookup(ex, "T'"), inner);
  EXPECT_EQ(s.lookup(Store::kRoot, "T'"), outer);
  EXPECT_EQ(s.cell(inner).kind, CellKind::Unbound);
}

TEST(Store, SiblingExistsNodesGetDistinctCells) {
  Store s;
  NodeId a = s.add_scope(Store::kRoot, ScopeKind::Exists);
  NodeId b = s.add_scope(Store::kRoot, ScopeKind::Exists);
  EXPECT_NE(s.add_variable(a, "X"), s.add_variable(b, "X"));
}

TEST(Store, DuplicateInScope) {
  Store s;
  s.add_variable(Store::kRoot, "X");
  EXPECT_THROW(s.add_variable(Store::kRoot, "X"), DuplicateInScope);
}

TEST(Store, LookupThroughExistsStopsAtProcCall) {
  Store s;
  Reg x = s.add_variable(Store::kRoot, "X");
  NodeId call = s.add_scope(Store::kRoot, ScopeKind::ProcCall, "p");
  s.add_parameter(call, "A", ast::var("X"), Store::kRoot);
  NodeId ex = s.add_scope(call, ScopeKind::Exists);
  Reg aux = s.add_variable(ex, "Aux");
  NodeId inner = s.add_scope(ex, ScopeKind::Exists);
  EXPECT_EQ(s.lookup(inner, "Aux"), aux);
  EXPECT_EQ(s.deref(s.lookup(inner, "A")), x);
  // The caller's X is behind the procedure-call barrier.
  EXPECT_THROW(s.lookup(inner, "X"), UnknownSymbol);
  EXPECT_THROW(s.lookup(Store::kRoot, "Nope"), UnknownSymbol);
}

TEST(Store, UnknownScope) {
  Store s;
  EXPECT_THROW(s.add_variable(7, "X"), UnknownScope);
}

// --- add_parameter --------------------------------------------------------

TEST(Store, VariableActualLinksToCallerRegister) {
  // initialize(MIdle) with MIdle at register 0.
  Store s;
  Reg midle = s.add_variable(Store::kRoot, "MIdle");
  ASSERT_EQ(midle, 0u);
  NodeId call = s.add_scope(Store::kRoot, ScopeKind::ProcCall, "initialize");
  s.add_parameter(call, "MIdle", ast::var("MIdle"), Store::kRoot);
  EXPECT_EQ(s.deref(s.lookup(call, "MIdle")), 0u);
  s.add_constraint(call, pc("MIdle = 5"));
  EXPECT_TRUE(s.entails(Store::kRoot, pc("MIdle = 5")));
}

TEST(Store, ConstantActual) {
  Store s;
  NodeId call = s.add_scope(Store::kRoot, ScopeKind::ProcCall, "p");
  Reg r = s.add_parameter(call, "A", ast::num(7), Store::kRoot);
  const MemCell& c = s.cell(s.deref(r));
  ASSERT_EQ(c.kind, CellKind::Constant);
  EXPECT_EQ(to_string(c.value), "7");
  EXPECT_TRUE(s.entails(call, pc("A = 7")));
  EXPECT_TRUE(s.entails(call, pc("A > 6")));
}

TEST(Store, AffineActualGetsFreshDimension) {
  Fixture f{"Aux"};
  f.tell("Aux = 5");
  NodeId call = f.s.add_scope(Store::kRoot, ScopeKind::ProcCall, "p");
  std::size_t before = f.s.dims();
  ast::LinExpr e = ast::LinExpr::of_var("Aux") - ast::LinExpr::of_const(1);
  Reg r = f.s.add_parameter(call, "N", e, Store::kRoot);
  const MemCell& c = f.s.cell(f.s.deref(r));
  ASSERT_EQ(c.kind, CellKind::DiscreteVar);
  EXPECT_EQ(f.s.dims(), before + 1);
  EXPECT_EQ(c.index, before);
  // d = Aux_dim - 1
  Dim aux = f.s.cell(f.s.deref(f.regs["Aux"])).index;
  AffineExpr rhs = AffineExpr::dim(aux);
  rhs -= AffineExpr::value(1);
  EXPECT_TRUE(f.s.lin().entails(LinConstraint::make(AffineExpr::dim(c.index), LinConstraint::Cmp::Eq, rhs)));
  EXPECT_TRUE(f.s.entails(call, pc("N = 4")));
}

TEST(Store, UnboundActual) {
  Store s;
  NodeId call = s.add_scope(Store::kRoot, ScopeKind::ProcCall, "p");
  EXPECT_THROW(s.add_parameter(call, "A", ast::var("Ghost"), Store::kRoot), UnboundActual);
}

// --- add_constraint -------------------------------------------------------

TEST(Store, FunctorLayout) {
  Fixture f{"A"};
  std::size_t before = f.s.register_count();
  f.tell("A = [free|_]");
  const MemCell& a = f.s.cell(f.regs["A"]);
  ASSERT_EQ(a.kind, CellKind::Functor);
  const MemCell& head = f.s.cell(a.index);
  ASSERT_EQ(head.kind, CellKind::Constant);
  EXPECT_EQ(to_string(head.value), "free");
  EXPECT_EQ(f.s.cell(a.index + 1).kind, CellKind::Unbound);
  EXPECT_EQ(f.s.register_count(), before + 2);
  EXPECT_EQ(f.s.render(f.regs["A"]), "[free|_]");
}

TEST(Store, StreamExtensionUsesThreeCells) {
  // Functor cell of the stream variable plus head and tail.
  Fixture f{"T", "T'"};
  std::size_t before = f.s.register_count();
  f.tell("T = [a|T']");
  const MemCell& t = f.s.cell(f.s.deref(f.regs["T"]));
  ASSERT_EQ(t.kind, CellKind::Functor);
  EXPECT_EQ(f.s.register_count(), before + 2);
  EXPECT_EQ(f.s.deref(t.index + 1), f.s.deref(f.regs["T'"]));
}

TEST(Store, DestructuringBindsHeadAndTail) {
  Fixture f{"T", "Aux", "T'"};
  f.tell("T = [5|_]");
  f.tell("T = [Aux|T']");
  EXPECT_TRUE(f.s.is_consistent());
  Reg aux = f.s.deref(f.regs["Aux"]);
  ASSERT_EQ(f.s.cell(aux).kind, CellKind::Constant);
  EXPECT_EQ(f.s.render(aux), "5");
  const MemCell& t = f.s.cell(f.s.deref(f.regs["T"]));
  EXPECT_EQ(f.s.deref(f.regs["T'"]), f.s.deref(t.index + 1));
  EXPECT_TRUE(f.ask("Aux > 4"));
}

TEST(Store, LazyDimensions) {
  Fixture f{"X", "Y", "S"};
  f.tell("S = [a|_]");
  EXPECT_EQ(f.s.dims(), 0u);
  f.tell("X >= 1");
  EXPECT_EQ(f.s.dims(), 1u);
  f.tell("X + Y = 3");
  EXPECT_EQ(f.s.dims(), 2u);
  f.tell("X - Y = 1");
  EXPECT_TRUE(f.ask("X = 2"));
  EXPECT_TRUE(f.ask("Y = 1"));
}

TEST(Store, OccursCheck) {
  Fixture f{"X"};
  f.tell("X = [a|X]");
  EXPECT_FALSE(f.s.is_consistent());
}

TEST(Store, StreamAgainstNumberClashes) {
  Fixture f{"X"};
  f.tell("X = 3");
  f.tell("X = [a|_]");
  EXPECT_FALSE(f.s.is_consistent());
}

// --- entails --------------------------------------------------------------

TEST(Store, AskMatchesBoundHead) {
  Fixture f{"A"};
  f.tell("A = [free|_]");
  EXPECT_TRUE(f.ask("A = [free|_]"));
  EXPECT_FALSE(f.ask("A = [busy|_]"));
  EXPECT_TRUE(f.ask("A = [_|_]"));
  EXPECT_FALSE(f.ask("A = [free, free|_]"));
}

TEST(Store, AbsenceIsNotEntailed) {
  Fixture f{"C"};
  EXPECT_FALSE(f.ask("C = [on|_]"));
  EXPECT_FALSE(f.ask("C = [off|_]"));
  // A bare wildcard asks for nothing.
  EXPECT_TRUE(f.ask("C = _"));
  EXPECT_TRUE(f.ask("true"));
}

TEST(Store, AskNeverBinds) {
  Fixture f{"X", "Y"};
  Store before = f.s;
  EXPECT_FALSE(f.ask("X = Y"));
  EXPECT_FALSE(f.ask("X = [a|Y]"));
  EXPECT_FALSE(f.ask("X > 0"));
  EXPECT_TRUE(f.s == before);
}

TEST(Store, EntailsIsPure) {
  gen::Gen g(17);
  std::vector<std::string> vars{"X", "Y", "Z"};
  for (int i = 0; i < 100; ++i) {
    Fixture f{"X", "Y", "Z"};
    int n = g.range(0, 5);
    for (int k = 0; k < n; ++k) f.s.add_constraint(Store::kRoot, g.constraint(vars, true));
    Store copy = f.s;
    std::string dump = f.s.dump();
    for (int k = 0; k < 20; ++k) {
      auto q = g.constraint(vars, true);
      bool first = f.s.entails(Store::kRoot, q);
      ASSERT_EQ(f.s.entails(Store::kRoot, q), first);
    }
    ASSERT_TRUE(f.s == copy);
    ASSERT_EQ(f.s.dump(), dump);
  }
}

TEST(Store, Monotonicity) {
  gen::Gen g(18);
  std::vector<std::string> vars{"X", "Y", "Z"};
  for (int i = 0; i < 100; ++i) {
    Fixture f{"X", "Y", "Z"};
    std::vector<ast::Constraint> queries;
    for (int k = 0; k < 30; ++k) queries.push_back(g.constraint(vars, false));
    std::vector<bool> seen(queries.size(), false);
    for (int k = 0; k < 6; ++k) {
      f.s.add_constraint(Store::kRoot, g.constraint(vars, false));
      for (std::size_t q = 0; q < queries.size(); ++q) {
        bool now = f.s.entails(Store::kRoot, queries[q]);
        ASSERT_TRUE(now || !seen[q]) << pretty(queries[q]) << "\n" << f.s.dump();
        seen[q] = now;
      }
    }
  }
}

// --- snapshot / merge -----------------------------------------------------

TEST(Store, SnapshotsAreIndependent) {
  Fixture f{"X"};
  Store a = f.s.snapshot();
  a.add_constraint(Store::kRoot, pc("X = 1"));
  EXPECT_FALSE(f.ask("X = 1"));
  Store b = f.s.snapshot();
  EXPECT_FALSE(b.entails(Store::kRoot, pc("X = 1")));
}

TEST(Store, MergeCombinesDisjointTells) {
  Fixture f{"X", "Y"};
  Store a = f.s.snapshot(), b = f.s.snapshot();
  a.add_constraint(Store::kRoot, pc("X = 1"));
  b.add_constraint(Store::kRoot, pc("Y = 2"));
  std::vector<Store> locals{a, b};
  Store m = Store::merge(f.s, locals);
  EXPECT_TRUE(m.entails(Store::kRoot, pc("X = 1")));
  EXPECT_TRUE(m.entails(Store::kRoot, pc("Y = 2")));
}

TEST(Store, MergeConflictingTells) {
  Fixture f{"X", "S"};
  {
    Store a = f.s.snapshot(), b = f.s.snapshot();
    a.add_constraint(Store::kRoot, pc("X = 1"));
    b.add_constraint(Store::kRoot, pc("X = 2"));
    std::vector<Store> locals{a, b};
    EXPECT_FALSE(Store::merge(f.s, locals).is_consistent());
  }
  {
    Store a = f.s.snapshot(), b = f.s.snapshot();
    a.add_constraint(Store::kRoot, pc("S = [on|_]"));
    b.add_constraint(Store::kRoot, pc("S = [off|_]"));
    std::vector<Store> locals{a, b};
    EXPECT_FALSE(Store::merge(f.s, locals).is_consistent());
  }
}

TEST(Store, MergeSingleIsIdentity) {
  Fixture f{"X", "S"};
  Store a = f.s.snapshot();
  a.add_constraint(Store::kRoot, pc("S = [on, X|_]"));
  a.add_constraint(Store::kRoot, pc("X >= 2"));
  std::vector<Store> locals{a};
  EXPECT_TRUE(Store::merge(f.s, locals) == a);
}

TEST(Store, MergeKeepsScopesFromEverySnapshot) {
  Store base;
  Store a = base.snapshot(), b = base.snapshot();
  NodeId na = a.add_scope(Store::kRoot, ScopeKind::Exists);
  NodeId nb = b.add_scope(Store::kRoot, ScopeKind::Exists);
  Reg ra = a.add_variable(na, "L");
  Reg rb = b.add_variable(nb, "L");
  EXPECT_NE(na, nb);
  EXPECT_NE(ra, rb);
  std::vector<Store> locals{a, b};
  Store m = Store::merge(base, locals);
  EXPECT_EQ(m.scope_count(), 3u);
  EXPECT_EQ(m.lookup(na, "L"), ra);
  EXPECT_EQ(m.lookup(nb, "L"), rb);
}

TEST(Store, MergeIsCommutative) {
  gen::Gen g(23);
  std::vector<std::string> vars{"X", "Y", "Z"};
  for (int i = 0; i < 200; ++i) {
    Fixture f{"X", "Y", "Z"};
    int pre = g.range(0, 2);
    for (int k = 0; k < pre; ++k) f.s.add_constraint(Store::kRoot, g.constraint(vars, false));
    std::vector<Store> locals;
    int n = g.range(2, 3);
    for (int j = 0; j < n; ++j) {
      Store l = f.s.snapshot();
      int m = g.range(1, 3);
      for (int k = 0; k < m; ++k) l.add_constraint(Store::kRoot, g.constraint(vars, false));
      locals.push_back(l);
    }
    std::vector<Store> reversed(locals.rbegin(), locals.rend());
    Store ab = Store::merge(f.s, locals);
    Store ba = Store::merge(f.s, reversed);
    ASSERT_EQ(ab.is_consistent(), ba.is_consistent());
    for (int k = 0; k < 40; ++k) {
      auto q = g.constraint(vars, false);
      ASSERT_EQ(ab.entails(Store::kRoot, q), ba.entails(Store::kRoot, q)) << pretty(q) << "\n" << ab.dump() << ba.dump();
    }
  }
}

// Merging snapshots equals telling everything in one store.
TEST(Store, MergeAgreesWithSequentialTells) {
  gen::Gen g(29);
  std::vector<std::string> vars{"X", "Y", "Z"};
  for (int i = 0; i < 200; ++i) {
    Fixture f{"X", "Y", "Z"};
    Fixture seq{"X", "Y", "Z"};
    std::vector<Store> locals;
    for (int j = 0; j < 2; ++j) {
      Store l = f.s.snapshot();
      int m = g.range(1, 3);
      for (int k = 0; k < m; ++k) {
        auto c = g.constraint(vars, false);
        l.add_constraint(Store::kRoot, c);
        seq.s.add_constraint(Store::kRoot, c);
      }
      locals.push_back(l);
    }
    Store merged = Store::merge(f.s, locals);
    ASSERT_EQ(merged.is_consistent(), seq.s.is_consistent()) << merged.dump() << seq.s.dump();
    for (int k = 0; k < 40; ++k) {
      auto q = g.constraint(vars, false);
      ASSERT_EQ(merged.entails(Store::kRoot, q), seq.s.entails(Store::kRoot, q))
          << pretty(q) << "\n" << merged.dump() << seq.s.dump();
    }
  }
}

// --- diagonal elements via parameter passing ------------------------------

TEST(DiagonalLaw, FormalAndActualAreInterchangeable) {
  auto r = diag::check(41, 150);
  EXPECT_EQ(r.violations, 0) << r.first;
  EXPECT_GT(r.checked, 1500);
}

// --- dump -----------------------------------------------------------------

TEST(Store, DumpShape) {
  Fixture f{"A", "X"};
  f.tell("A = [free|_]");
  f.tell("X > 1");
  std::string d = f.s.dump();
  EXPECT_NE(d.find("N0 root: A=R0 X=R1"), std::string::npos) << d;
  EXPECT_NE(d.find("R0 functor R2 R3"), std::string::npos) << d;
  EXPECT_NE(d.find("R2 const free"), std::string::npos) << d;
  EXPECT_NE(d.find("R1 discrete D_0"), std::string::npos) << d;
  EXPECT_NE(d.find("linear (1 dims)"), std::string::npos) << d;
  EXPECT_NE(d.find("consistent: yes"), std::string::npos) << d;
}

// Each snapshot is acyclic on its own; together they would build X = [a, b|X].
TEST(Store, MergeOccursCheck) {
  Fixture f{"X", "Y"};
  Store a = f.s.snapshot(), b = f.s.snapshot();
  a.add_constraint(Store::kRoot, pc("X = [a|Y]"));
  b.add_constraint(Store::kRoot, pc("Y = [b|X]"));
  ASSERT_TRUE(a.is_consistent());
  ASSERT_TRUE(b.is_consistent());
  std::vector<Store> ab{a, b}, ba{b, a};
  Store m1 = Store::merge(f.s, ab);
  Store m2 = Store::merge(f.s, ba);
  EXPECT_FALSE(m1.is_consistent());
  EXPECT_FALSE(m2.is_consistent());
  EXPECT_EQ(m1.render(f.regs["X"]).size() < 64, true);
}
