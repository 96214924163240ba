#pragma once

// Independent satisfiability check for small linear systems, used to
// cross-check the simplex in linear_store. Plain Fourier-Motzkin over dense
// rational rows; equalities become two inequalities, strictness propagates
// through every combination.

#include <cstddef>
#include <vector>

#include "tccp/linear_store.hpp"

namespace fm {

using tccp::Rational;

/// sum(a[i] * x_i) + c  (> 0 if strict, >= 0 otherwise)
struct Row {
  std::vector<Rational> a;
  Rational c;
  bool strict = false;
};

inline std::vector<Row> rows_of(const std::vector<tccp::LinConstraint>& system, std::size_t dims) {
  std::vector<Row> out;
  for (const auto& lc : system) {
    Row r{std::vector<Rational>(dims), Rational(lc.constant()), lc.rel() == tccp::Rel::Gt};
    for (const auto& [d, k] : lc.terms()) r.a.at(d) = Rational(k);
    out.push_back(r);
    if (lc.rel() == tccp::Rel::Eq) {
      Row neg = r;
      for (auto& x : neg.a) x = -x;
      neg.c = -neg.c;
      out.push_back(neg);
    }
  }
  return out;
}

inline bool satisfiable(std::vector<Row> rows, std::size_t dims) {
  for (std::size_t v = 0; v < dims; ++v) {
    std::vector<Row> pos, neg, rest;
    for (auto& r : rows) {
      if (r.a[v] > 0)
        pos.push_back(r);
      else if (r.a[v] < 0)
        neg.push_back(r);
      else
        rest.push_back(r);
    }
    for (const auto& p : pos)
      for (const auto& n : neg) {
        // p.a[v] * x + ... >= 0 and n.a[v] * x + ... >= 0 with opposite signs:
        // scale so the x coefficients cancel.
        Rational sp = -n.a[v];
        Rational sn = p.a[v];
        Row r{std::vector<Rational>(dims), sp * p.c + sn * n.c, p.strict || n.strict};
        for (std::size_t i = 0; i < dims; ++i) r.a[i] = sp * p.a[i] + sn * n.a[i];
        r.a[v] = 0;
        rest.push_back(r);
      }
    rows = std::move(rest);
  }
  for (const auto& r : rows) {
    if (r.strict ? !(r.c > 0) : !(r.c >= 0)) return false;
  }
  return true;
}

inline bool satisfiable(const std::vector<tccp::LinConstraint>& system, std::size_t dims) {
  return satisfiable(rows_of(system, dims), dims);
}

/// s |= c, decided by refuting s together with each half of the negation.
inline bool entails(const std::vector<tccp::LinConstraint>& s, const tccp::LinConstraint& c, std::size_t dims) {
  if (!satisfiable(s, dims)) return true;
  auto base = rows_of(s, dims);
  Row e{std::vector<Rational>(dims), Rational(c.constant()), false};
  for (const auto& [d, k] : c.terms()) e.a.at(d) = Rational(k);
  Row neg = e;
  for (auto& x : neg.a) x = -x;
  neg.c = -neg.c;
  auto with = [&](Row extra) {
    auto rows = base;
    rows.push_back(std::move(extra));
    return satisfiable(rows, dims);
  };
  switch (c.rel()) {
    case tccp::Rel::Ge: neg.strict = true; return !with(neg);         // e < 0
    case tccp::Rel::Gt: neg.strict = false; return !with(neg);        // e <= 0
    case tccp::Rel::Eq: {
      Row lt = neg;
      lt.strict = true;
      Row gt = e;
      gt.strict = true;
      return !with(lt) && !with(gt);
    }
  }
  return false;
}

}  // namespace fm
