#pragma once

// Monotonic conjunction of affine constraints over rational dimensions
// D_0 ... D_{n-1}. Satisfiability and entailment are decided exactly (rational
// simplex); projection uses Fourier-Motzkin elimination.

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "tccp/rational.hpp"

namespace tccp {

using Dim = std::size_t;

/// sum(coeffs[d] * D_d) + constant
struct AffineExpr {
  std::map<Dim, Rational> coeffs;
  Rational constant;

  static AffineExpr dim(Dim d, Rational k = 1);
  static AffineExpr value(Rational c);

  AffineExpr& operator+=(const AffineExpr& o);
  AffineExpr& operator-=(const AffineExpr& o);
  AffineExpr& operator*=(const Rational& k);
};

/// Relation of a canonical constraint against zero.
enum class Rel { Eq, Ge, Gt };

/// `sum(terms) + constant REL 0` with integer coefficients whose gcd is 1.
/// Equalities have a positive leading coefficient, so two constraints denote
/// the same half-space/hyperplane iff they compare equal.
class LinConstraint {
 public:
  enum class Cmp { Eq, Lt, Gt, Le, Ge };

  /// lhs CMP rhs, normalised.
  static LinConstraint make(const AffineExpr& lhs, Cmp cmp, const AffineExpr& rhs);
  static LinConstraint from(const AffineExpr& expr, Rel rel);

  const std::vector<std::pair<Dim, BigInt>>& terms() const { return terms_; }
  const BigInt& constant() const { return constant_; }
  Rel rel() const { return rel_; }

  bool is_ground() const { return terms_.empty(); }
  /// Only meaningful for ground constraints.
  bool ground_holds() const;
  /// Largest dimension mentioned plus one (0 if ground).
  std::size_t dims_needed() const;
  bool mentions(Dim d) const;
  BigInt coeff(Dim d) const;

  AffineExpr expr() const;

  /// e.g. "D_0 - D_1 = 1", "D_2 > 0".
  std::string str() const;

  friend bool operator==(const LinConstraint&, const LinConstraint&) = default;
  friend auto operator<=>(const LinConstraint& a, const LinConstraint& b) {
    if (auto c = a.rel_ <=> b.rel_; c != 0) return c;
    if (a.terms_ != b.terms_) return a.terms_ < b.terms_ ? std::strong_ordering::less : std::strong_ordering::greater;
    if (a.constant_ != b.constant_)
      return a.constant_ < b.constant_ ? std::strong_ordering::less : std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

 private:
  std::vector<std::pair<Dim, BigInt>> terms_;  // sorted by dim, no zeros
  BigInt constant_;
  Rel rel_ = Rel::Eq;
};

class LinStore {
 public:
  /// The universe: no dimensions, no constraints.
  LinStore() = default;

  std::size_t dims() const { return dims_; }
  /// Allocates a fresh unconstrained dimension and returns its index.
  Dim add_dim();
  /// Grows to at least n dimensions.
  void ensure_dims(std::size_t n);

  /// Conjoins c. Throws UnallocatedDimension if c mentions a dimension not yet
  /// allocated.
  void add(const LinConstraint& c);

  /// No rational point satisfies the system.
  bool is_empty() const { return empty_; }

  /// Every solution satisfies c. An empty store entails everything.
  bool entails(const LinConstraint& c) const;

  /// Conjunction of both systems; both must have the same dimension count.
  LinStore meet(const LinStore& other) const;

  /// Existential quantification of dimension d: d becomes unconstrained.
  LinStore project(Dim d) const;

  const std::vector<LinConstraint>& constraints() const { return constraints_; }

  /// One constraint per line in insertion order.
  std::string dump() const;

 private:
  void check_dims(const LinConstraint& c) const;

  std::size_t dims_ = 0;
  std::vector<LinConstraint> constraints_;
  bool empty_ = false;
};

/// Exact feasibility of a conjunction of canonical constraints.
bool is_satisfiable(const std::vector<LinConstraint>& system);

/// Fourier-Motzkin elimination of one dimension from a system. The result no
/// longer mentions d and has the same rational solutions projected.
std::vector<LinConstraint> eliminate(const std::vector<LinConstraint>& system, Dim d);

}  // namespace tccp
