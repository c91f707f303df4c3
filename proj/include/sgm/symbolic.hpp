#pragma once
// Exact symbolic scalars of the form  q * prod_n f(n)^(e/2)  with a rational
// multiplier q and doubled integer exponents e, where f(n) = log2(n+1).
// The normal form folds every factor with exactly known value into q:
//   - f(1) = 1 is dropped;
//   - if n = 2^t - 1 then f(n) = t exactly: whole powers of t move into q and
//     a leftover half power sqrt(t) = u * sqrt(v), with v squarefree, moves u
//     into q and re-keys sqrt(v) as f(2^v - 1)^(1/2).
// Sums of such scalars (SymSum) and sparse vectors of sums (SymVector) make
// the reconstruction identities of the calculus decidable by ==.

#include "sgm/interval.hpp"
#include "sgm/vector.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace sgm {

class SymCoeff {
 public:
  SymCoeff() : q_(0) {}
  explicit SymCoeff(const mpq_class& q) : q_(q) { normalize(); }
  SymCoeff(const mpq_class& q, const mpz_class& n, long doubled_exp);

  // f(n)^(doubled_exp / 2)
  static SymCoeff f_pow(const mpz_class& n, long doubled_exp);
  static SymCoeff one() { return SymCoeff(mpq_class(1)); }

  const mpq_class& rational_part() const { return q_; }
  const std::map<mpz_class, long>& factors() const { return fac_; }
  bool is_zero() const { return q_ == 0; }
  bool is_rational() const { return fac_.empty(); }
  mpq_class as_rational() const;  // throws unless is_rational()

  SymCoeff reciprocal() const;  // throws on zero
  SymCoeff negated() const;

  friend SymCoeff operator*(const SymCoeff& a, const SymCoeff& b);
  bool operator==(const SymCoeff& o) const { return q_ == o.q_ && fac_ == o.fac_; }
  bool operator!=(const SymCoeff& o) const { return !(*this == o); }

  Interval eval(mpfr_prec_t prec) const;
  std::string str() const;

 private:
  void normalize();
  mpq_class q_;
  std::map<mpz_class, long> fac_;  // n -> doubled exponent, never zero
};

// order on the irrational factor parts, used to keep SymSum terms canonical
int cmp_factor_maps(const std::map<mpz_class, long>& a, const std::map<mpz_class, long>& b);

class SymSum {
 public:
  SymSum() = default;
  SymSum(const SymCoeff& c) { insert(c); }  // NOLINT: implicit by design
  explicit SymSum(const mpq_class& q) { insert(SymCoeff(q)); }

  const std::vector<SymCoeff>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_rational() const;
  mpq_class as_rational() const;  // throws unless is_rational()

  SymSum negated() const;
  friend SymSum operator+(const SymSum& a, const SymSum& b);
  friend SymSum operator*(const SymSum& a, const SymCoeff& c);
  friend SymSum operator*(const SymSum& a, const SymSum& b);
  bool operator==(const SymSum& o) const { return terms_ == o.terms_; }
  bool operator!=(const SymSum& o) const { return !(*this == o); }

  Interval eval(mpfr_prec_t prec) const;
  std::string str() const;

 private:
  void insert(const SymCoeff& c);
  std::vector<SymCoeff> terms_;  // sorted by factor map, no zero terms, maps distinct
};

// sparse exact vector / functional: basis index -> symbolic coefficient
class SymVector {
 public:
  SymVector() = default;
  static SymVector from_rational(const FiniteVector& x);

  void set(std::uint64_t idx, const SymSum& s);  // erases on zero
  void add_to(std::uint64_t idx, const SymSum& s);
  const std::map<std::uint64_t, SymSum>& coords() const { return coords_; }
  const SymSum& coeff(std::uint64_t idx) const;  // zero sum if absent
  bool empty() const { return coords_.empty(); }
  std::uint64_t min_index() const;  // throws on empty
  std::uint64_t max_index() const;

  friend SymVector operator+(const SymVector& a, const SymVector& b);
  SymVector scaled(const SymCoeff& c) const;
  SymVector scaled(const SymSum& s) const;
  SymVector restricted(std::uint64_t lo, std::uint64_t hi) const;  // indices in [lo, hi]

  bool operator==(const SymVector& o) const { return coords_ == o.coords_; }
  bool operator!=(const SymVector& o) const { return !(*this == o); }

  bool is_rational() const;
  FiniteVector to_rational() const;  // throws unless all coords rational
  std::vector<Interval> eval_coords(mpfr_prec_t prec) const;  // in index order
  std::string str() const;

 private:
  std::map<std::uint64_t, SymSum> coords_;
};

SymSum sym_pairing(const SymVector& fstar, const SymVector& x);
SymSum sym_pairing(const SymVector& fstar, const FiniteVector& x);
bool successive(const SymVector& a, const SymVector& b);

}  // namespace sgm
