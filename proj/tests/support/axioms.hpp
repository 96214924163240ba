#pragma once

// Cylindric-algebra laws of the linear store, checked on random stores.
// Equivalence of two stores is mutual entailment of their constraints.

#include <functional>
#include <string>

#include "support/generators.hpp"
#include "tccp/linear_store.hpp"

namespace axioms {

using namespace tccp;

inline bool entails_all(const LinStore& s, const LinStore& t) {
  if (s.is_empty()) return true;
  if (t.is_empty()) return false;
  for (const auto& c : t.constraints())
    if (!s.entails(c)) return false;
  return true;
}

inline bool equivalent(const LinStore& a, const LinStore& b) { return entails_all(a, b) && entails_all(b, a); }

struct Report {
  int cases = 0;
  int violations = 0;
  std::string first;
};

inline Report run(std::uint64_t seed, int cases, const std::function<bool(gen::Gen&, std::string&)>& law) {
  gen::Gen g(seed);
  Report r;
  for (int i = 0; i < cases; ++i) {
    std::string why;
    ++r.cases;
    if (!law(g, why) && r.violations++ == 0) r.first = why;
  }
  return r;
}

inline Dim some_dim(gen::Gen& g) { return static_cast<Dim>(g.range(0, 2)); }

/// (a) exists_x c <= c
inline bool projection_weaker(gen::Gen& g, std::string& why) {
  LinStore s = g.lin_store(3, 0, 5);
  Dim x = some_dim(g);
  if (entails_all(s, s.project(x))) return true;
  why = s.dump() + "x = D_" + std::to_string(x);
  return false;
}

/// (b) c <= d implies exists_x c <= exists_x d   (order: d entails c)
inline bool projection_monotone(gen::Gen& g, std::string& why) {
  LinStore c = g.lin_store(3, 0, 4);
  LinStore d = c;
  int extra = g.range(0, 3);
  for (int k = 0; k < extra; ++k) d.add(g.lin_constraint(3));
  Dim x = some_dim(g);
  if (entails_all(d.project(x), c.project(x))) return true;
  why = c.dump() + "--\n" + d.dump();
  return false;
}

/// (c) exists_x (c /\ exists_x d) = exists_x c /\ exists_x d
inline bool projection_over_meet(gen::Gen& g, std::string& why) {
  LinStore c = g.lin_store(3, 0, 4);
  LinStore d = g.lin_store(3, 0, 4);
  Dim x = some_dim(g);
  if (equivalent(c.meet(d.project(x)).project(x), c.project(x).meet(d.project(x)))) return true;
  why = c.dump() + "--\n" + d.dump();
  return false;
}

/// (d) exists_x exists_y c = exists_y exists_x c
inline bool projections_commute(gen::Gen& g, std::string& why) {
  LinStore c = g.lin_store(3, 0, 5);
  Dim x = some_dim(g), y = some_dim(g);
  if (equivalent(c.project(x).project(y), c.project(y).project(x))) return true;
  why = c.dump();
  return false;
}

}  // namespace axioms
