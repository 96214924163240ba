#include "tccp/linear_store.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "tccp/errors.hpp"

namespace tccp {

// ---------------------------------------------------------------------------
// AffineExpr

AffineExpr AffineExpr::dim(Dim d, Rational k) {
  AffineExpr e;
  if (k != 0) e.coeffs[d] = std::move(k);
  return e;
}

AffineExpr AffineExpr::value(Rational c) {
  AffineExpr e;
  e.constant = std::move(c);
  return e;
}

AffineExpr& AffineExpr::operator+=(const AffineExpr& o) {
  for (const auto& [d, k] : o.coeffs) {
    auto& slot = coeffs[d];
    slot += k;
    if (slot == 0) coeffs.erase(d);
  }
  constant += o.constant;
  return *this;
}

AffineExpr& AffineExpr::operator-=(const AffineExpr& o) {
  AffineExpr neg = o;
  neg *= Rational(-1);
  return *this += neg;
}

AffineExpr& AffineExpr::operator*=(const Rational& k) {
  if (k == 0) {
    coeffs.clear();
    constant = 0;
    return *this;
  }
  for (auto& [d, c] : coeffs) c *= k;
  constant *= k;
  return *this;
}

// ---------------------------------------------------------------------------
// LinConstraint

namespace {

BigInt abs_big(const BigInt& x) { return x < 0 ? BigInt(-x) : x; }

}  // namespace

LinConstraint LinConstraint::from(const AffineExpr& expr, Rel rel) {
  using boost::multiprecision::denominator;
  using boost::multiprecision::numerator;

  BigInt lcm = 1;
  auto fold_den = [&](const Rational& q) {
    BigInt den = denominator(q);
    lcm = lcm / boost::multiprecision::gcd(lcm, den) * den;
  };
  for (const auto& [d, k] : expr.coeffs) fold_den(k);
  fold_den(expr.constant);

  LinConstraint c;
  c.rel_ = rel;
  BigInt g = 0;
  for (const auto& [d, k] : expr.coeffs) {
    if (k == 0) continue;
    BigInt v = numerator(k) * (lcm / denominator(k));
    g = boost::multiprecision::gcd(g, abs_big(v));
    c.terms_.emplace_back(d, std::move(v));
  }
  c.constant_ = numerator(expr.constant) * (lcm / denominator(expr.constant));
  g = boost::multiprecision::gcd(g, abs_big(c.constant_));
  if (g > 1) {
    for (auto& [d, v] : c.terms_) v /= g;
    c.constant_ /= g;
  }
  if (rel == Rel::Eq) {
    bool flip = c.terms_.empty() ? c.constant_ < 0 : c.terms_.front().second < 0;
    if (flip) {
      for (auto& [d, v] : c.terms_) v = -v;
      c.constant_ = -c.constant_;
    }
  }
  return c;
}

LinConstraint LinConstraint::make(const AffineExpr& lhs, Cmp cmp, const AffineExpr& rhs) {
  AffineExpr diff = lhs;
  diff -= rhs;
  switch (cmp) {
    case Cmp::Eq: return from(diff, Rel::Eq);
    case Cmp::Ge: return from(diff, Rel::Ge);
    case Cmp::Gt: return from(diff, Rel::Gt);
    case Cmp::Le: diff *= Rational(-1); return from(diff, Rel::Ge);
    case Cmp::Lt: diff *= Rational(-1); return from(diff, Rel::Gt);
  }
  return from(diff, Rel::Eq);
}

bool LinConstraint::ground_holds() const {
  switch (rel_) {
    case Rel::Eq: return constant_ == 0;
    case Rel::Ge: return constant_ >= 0;
    case Rel::Gt: return constant_ > 0;
  }
  return false;
}

std::size_t LinConstraint::dims_needed() const { return terms_.empty() ? 0 : terms_.back().first + 1; }

bool LinConstraint::mentions(Dim d) const {
  return std::any_of(terms_.begin(), terms_.end(), [d](const auto& t) { return t.first == d; });
}

BigInt LinConstraint::coeff(Dim d) const {
  for (const auto& [dd, v] : terms_)
    if (dd == d) return v;
  return 0;
}

AffineExpr LinConstraint::expr() const {
  AffineExpr e;
  for (const auto& [d, v] : terms_) e.coeffs[d] = Rational(v);
  e.constant = Rational(constant_);
  return e;
}

std::string LinConstraint::str() const {
  std::ostringstream out;
  bool first = true;
  for (const auto& [d, v] : terms_) {
    BigInt mag = abs_big(v);
    if (first)
      out << (v < 0 ? "-" : "");
    else
      out << (v < 0 ? " - " : " + ");
    if (mag != 1) out << mag << "*";
    out << "D_" << d;
    first = false;
  }
  if (first) out << "0";
  switch (rel_) {
    case Rel::Eq: out << " = "; break;
    case Rel::Ge: out << " >= "; break;
    case Rel::Gt: out << " > "; break;
  }
  out << BigInt(-constant_);
  return out.str();
}

// ---------------------------------------------------------------------------
// Exact two-phase simplex (Bland's rule). Used only for feasibility.

namespace {

class Tableau {
 public:
  // rows: coefficient vectors over `cols` variables, rhs >= 0, basis given.
  Tableau(std::vector<std::vector<Rational>> rows, std::vector<std::size_t> basis)
      : rows_(std::move(rows)), basis_(std::move(basis)) {}

  /// Maximises obj over the current feasible basis, allowing only columns
  /// with allowed[j]. Returns false when unbounded.
  bool maximize(const std::vector<Rational>& obj, const std::vector<bool>& allowed) {
    const std::size_t cols = obj.size();
    for (;;) {
      std::size_t enter = cols;
      for (std::size_t j = 0; j < cols && enter == cols; ++j) {
        if (!allowed[j] || is_basic(j)) continue;
        Rational reduced = obj[j];
        for (std::size_t i = 0; i < rows_.size(); ++i)
          if (rows_[i][j] != 0) reduced -= obj[basis_[i]] * rows_[i][j];
        if (reduced > 0) enter = j;
      }
      if (enter == cols) return true;
      std::size_t leave = rows_.size();
      Rational best;
      for (std::size_t i = 0; i < rows_.size(); ++i) {
        if (rows_[i][enter] <= 0) continue;
        Rational ratio = rows_[i][cols] / rows_[i][enter];
        if (leave == rows_.size() || ratio < best || (ratio == best && basis_[i] < basis_[leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave == rows_.size()) return false;
      pivot(leave, enter);
    }
  }

  Rational value(const std::vector<Rational>& obj) const {
    Rational v = 0;
    const std::size_t cols = obj.size();
    for (std::size_t i = 0; i < rows_.size(); ++i) v += obj[basis_[i]] * rows_[i][cols];
    return v;
  }

  void pivot(std::size_t r, std::size_t c) {
    Rational p = rows_[r][c];
    for (auto& x : rows_[r]) x /= p;
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      if (i == r || rows_[i][c] == 0) continue;
      Rational f = rows_[i][c];
      for (std::size_t j = 0; j < rows_[i].size(); ++j)
        if (rows_[r][j] != 0) rows_[i][j] -= f * rows_[r][j];
    }
    basis_[r] = c;
  }

  bool is_basic(std::size_t j) const { return std::find(basis_.begin(), basis_.end(), j) != basis_.end(); }

  std::vector<std::vector<Rational>>& rows() { return rows_; }
  std::vector<std::size_t>& basis() { return basis_; }

 private:
  std::vector<std::vector<Rational>> rows_;
  std::vector<std::size_t> basis_;
};

}  // namespace

bool is_satisfiable(const std::vector<LinConstraint>& system) {
  std::vector<const LinConstraint*> live;
  std::map<Dim, std::size_t> column;
  bool strict = false;
  for (const auto& c : system) {
    if (c.is_ground()) {
      if (!c.ground_holds()) return false;
      continue;
    }
    live.push_back(&c);
    for (const auto& [d, v] : c.terms()) column.emplace(d, 0);
    strict = strict || c.rel() == Rel::Gt;
  }
  if (live.empty()) return true;

  // Free variable x_d = p_d - q_d; t >= 0 is the strictness margin:
  //   e >= 0  ->  a.x >= -b
  //   e > 0   ->  a.x - t >= -b,   t <= 1,   maximise t
  std::size_t n = 0;
  for (auto& [d, col] : column) col = n++;
  const std::size_t t_col = 2 * n;
  const std::size_t structural = 2 * n + (strict ? 1 : 0);

  struct Row {
    std::vector<Rational> a;
    Rational b;
    enum { Le, Ge, Eq } sense;
  };
  std::vector<Row> rows;
  for (const auto* c : live) {
    Row r{std::vector<Rational>(structural), Rational(-c->constant()), Row::Eq};
    for (const auto& [d, v] : c->terms()) {
      r.a[column[d]] = Rational(v);
      r.a[n + column[d]] = Rational(-v);
    }
    if (c->rel() == Rel::Gt) r.a[t_col] = -1;
    r.sense = c->rel() == Rel::Eq ? Row::Eq : Row::Ge;
    rows.push_back(std::move(r));
  }
  if (strict) {
    Row r{std::vector<Rational>(structural), Rational(1), Row::Le};
    r.a[t_col] = 1;
    rows.push_back(std::move(r));
  }
  for (auto& r : rows) {
    if (r.b < 0) {
      for (auto& x : r.a) x = -x;
      r.b = -r.b;
      if (r.sense == Row::Le)
        r.sense = Row::Ge;
      else if (r.sense == Row::Ge)
        r.sense = Row::Le;
    }
  }

  const std::size_t m = rows.size();
  std::size_t slacks = 0, artificials = 0;
  for (const auto& r : rows) {
    if (r.sense != Row::Eq) ++slacks;
    if (r.sense != Row::Le) ++artificials;
  }
  const std::size_t cols = structural + slacks + artificials;
  std::vector<std::vector<Rational>> tab(m, std::vector<Rational>(cols + 1));
  std::vector<std::size_t> basis(m);
  std::vector<bool> is_artificial(cols, false);
  std::size_t next_slack = structural, next_art = structural + slacks;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < structural; ++j) tab[i][j] = rows[i].a[j];
    tab[i][cols] = rows[i].b;
    if (rows[i].sense == Row::Le) {
      tab[i][next_slack] = 1;
      basis[i] = next_slack++;
    } else {
      if (rows[i].sense == Row::Ge) tab[i][next_slack++] = -1;
      tab[i][next_art] = 1;
      is_artificial[next_art] = true;
      basis[i] = next_art++;
    }
  }

  Tableau tableau(std::move(tab), std::move(basis));
  if (artificials > 0) {
    std::vector<Rational> phase1(cols);
    for (std::size_t j = 0; j < cols; ++j)
      if (is_artificial[j]) phase1[j] = -1;
    std::vector<bool> all(cols, true);
    tableau.maximize(phase1, all);
    if (tableau.value(phase1) < 0) return false;
    // Drive zero-valued artificials out of the basis; drop redundant rows.
    auto& tr = tableau.rows();
    auto& tb = tableau.basis();
    for (std::size_t i = 0; i < tr.size();) {
      if (!is_artificial[tb[i]]) {
        ++i;
        continue;
      }
      std::size_t j = 0;
      while (j < cols && (is_artificial[j] || tr[i][j] == 0)) ++j;
      if (j < cols) {
        tableau.pivot(i, j);
        ++i;
      } else {
        tr.erase(tr.begin() + static_cast<std::ptrdiff_t>(i));
        tb.erase(tb.begin() + static_cast<std::ptrdiff_t>(i));
      }
    }
  }
  if (!strict) return true;

  std::vector<Rational> phase2(cols);
  phase2[t_col] = 1;
  std::vector<bool> allowed(cols);
  for (std::size_t j = 0; j < cols; ++j) allowed[j] = !is_artificial[j];
  tableau.maximize(phase2, allowed);
  return tableau.value(phase2) > 0;
}

// ---------------------------------------------------------------------------
// Fourier-Motzkin

namespace {

LinConstraint combine(const LinConstraint& a, const BigInt& ka, const LinConstraint& b, const BigInt& kb, Rel rel) {
  AffineExpr e = a.expr();
  e *= Rational(ka);
  AffineExpr f = b.expr();
  f *= Rational(kb);
  e += f;
  return LinConstraint::from(e, rel);
}

void keep(std::vector<LinConstraint>& out, std::set<LinConstraint>& seen, LinConstraint c) {
  if (c.is_ground() && c.ground_holds()) return;
  if (seen.insert(c).second) out.push_back(std::move(c));
}

}  // namespace

std::vector<LinConstraint> eliminate(const std::vector<LinConstraint>& system, Dim d) {
  std::vector<LinConstraint> out;
  std::set<LinConstraint> seen;

  auto pivot_it = std::find_if(system.begin(), system.end(),
                               [d](const LinConstraint& c) { return c.rel() == Rel::Eq && c.mentions(d); });
  if (pivot_it != system.end()) {
    const LinConstraint& eq = *pivot_it;
    BigInt a = eq.coeff(d);
    BigInt abs_a = abs_big(a);
    BigInt sign_a = a < 0 ? -1 : 1;
    for (auto it = system.begin(); it != system.end(); ++it) {
      if (it == pivot_it) continue;
      BigInt c = it->coeff(d);
      if (c == 0) {
        keep(out, seen, *it);
        continue;
      }
      keep(out, seen, combine(*it, abs_a, eq, BigInt(-c * sign_a), it->rel()));
    }
    return out;
  }

  std::vector<const LinConstraint*> lower, upper;
  for (const auto& c : system) {
    BigInt k = c.coeff(d);
    if (k == 0)
      keep(out, seen, c);
    else if (k > 0)
      lower.push_back(&c);
    else
      upper.push_back(&c);
  }
  for (const auto* lo : lower) {
    for (const auto* up : upper) {
      BigInt kl = lo->coeff(d);
      BigInt ku = up->coeff(d);
      Rel rel = (lo->rel() == Rel::Gt || up->rel() == Rel::Gt) ? Rel::Gt : Rel::Ge;
      keep(out, seen, combine(*lo, abs_big(ku), *up, kl, rel));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// LinStore

Dim LinStore::add_dim() { return dims_++; }

void LinStore::ensure_dims(std::size_t n) { dims_ = std::max(dims_, n); }

void LinStore::check_dims(const LinConstraint& c) const {
  if (c.dims_needed() > dims_)
    throw UnallocatedDimension("constraint mentions D_" + std::to_string(c.dims_needed() - 1) + " but only " +
                               std::to_string(dims_) + " dimension(s) are allocated");
}

void LinStore::add(const LinConstraint& c) {
  check_dims(c);
  if (c.is_ground() && c.ground_holds()) return;
  if (std::find(constraints_.begin(), constraints_.end(), c) != constraints_.end()) return;
  constraints_.push_back(c);
  if (!empty_) empty_ = !is_satisfiable(constraints_);
}

bool LinStore::entails(const LinConstraint& c) const {
  check_dims(c);
  if (empty_) return true;
  if (c.is_ground()) return c.ground_holds();
  if (std::find(constraints_.begin(), constraints_.end(), c) != constraints_.end()) return true;

  AffineExpr e = c.expr();
  AffineExpr neg = e;
  neg *= Rational(-1);
  auto refuted = [&](const LinConstraint& counter) {
    auto sys = constraints_;
    sys.push_back(counter);
    return !is_satisfiable(sys);
  };
  switch (c.rel()) {
    case Rel::Ge: return refuted(LinConstraint::from(neg, Rel::Gt));
    case Rel::Gt: return refuted(LinConstraint::from(neg, Rel::Ge));
    case Rel::Eq: return refuted(LinConstraint::from(e, Rel::Gt)) && refuted(LinConstraint::from(neg, Rel::Gt));
  }
  return false;
}

LinStore LinStore::meet(const LinStore& other) const {
  if (dims_ != other.dims_)
    throw DimensionMismatch("meet of stores with " + std::to_string(dims_) + " and " + std::to_string(other.dims_) +
                            " dimensions");
  LinStore out = *this;
  bool grew = false;
  for (const auto& c : other.constraints_) {
    if (std::find(out.constraints_.begin(), out.constraints_.end(), c) != out.constraints_.end()) continue;
    out.constraints_.push_back(c);
    grew = true;
  }
  out.empty_ = empty_ || other.empty_;
  if (grew && !out.empty_) out.empty_ = !is_satisfiable(out.constraints_);
  return out;
}

LinStore LinStore::project(Dim d) const {
  if (d >= dims_) throw UnallocatedDimension("projection of unallocated dimension D_" + std::to_string(d));
  LinStore out;
  out.dims_ = dims_;
  out.constraints_ = eliminate(constraints_, d);
  out.empty_ = !is_satisfiable(out.constraints_);
  return out;
}

std::string LinStore::dump() const {
  std::string out;
  for (const auto& c : constraints_) out += c.str() + "\n";
  return out;
}

}  // namespace tccp
