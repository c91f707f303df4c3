#pragma once
// Iterated-exponential arithmetic for astronomically large positive reals.
// A value is  exp2^h(top)  with height h and a directed-rounding enclosure
// top >= 1.  Normalization keeps the height minimal subject to the top staying
// a plain machine-representable interval: while h >= 1 and top < 2^60 the top
// is exponentiated (exactly for integer tops) and the height dropped.  Hence
// at height >= 1 the top is at least 2^60, which makes relative slacks of
// 2^(-59) at the top level cover any additive perturbation introduced at
// lower levels (f(x) vs log2(x), +1 from additions, small scalings).
//
// Every operation returns an enclosure of the true value; comparison verdicts
// are rigorous ("less" is proven, "unknown" means the enclosures overlap).

#include "sgm/interval.hpp"

#include <cstdint>
#include <string>

namespace sgm {

inline constexpr int kMaxTowerHeight = 16;

class TowerReal {
 public:
  TowerReal() : h_(0), top_(Interval::from_si(1, 64)) {}
  TowerReal(int height, Interval top);  // validates (value >= 1) + normalizes

  static TowerReal from_ui(std::uint64_t v, mpfr_prec_t prec = 128);
  static TowerReal from_q(const mpq_class& q, mpfr_prec_t prec = 128);
  static TowerReal from_z(const mpz_class& z, mpfr_prec_t prec = 128);
  static TowerReal from_interval(const Interval& v);  // v.lo >= 1 required
  static TowerReal exp2_of(const TowerReal& t);

  int height() const { return h_; }
  const Interval& top() const { return top_; }
  bool plain() const { return h_ == 0; }

  // plain enclosure of the value; saturates to [maxfinite, +inf] on overflow
  Interval value_interval(mpfr_prec_t prec = 128) const;
  // plain enclosure of log2(value); saturates likewise (height drops by one)
  Interval log2_interval(mpfr_prec_t prec = 128) const;

  std::string str(int digits = 10) const;

 private:
  void normalize();
  int h_;
  Interval top_;
};

enum class TowerCmp { less, greater, unknown };
const char* to_string(TowerCmp c);

TowerCmp tower_compare(const TowerReal& a, const TowerReal& b);
// certified one-sided tests (false = could not certify, not "the opposite")
bool tower_cert_le(const TowerReal& a, const TowerReal& b);
bool tower_cert_lt(const TowerReal& a, const TowerReal& b);
// a >= 2^e rigorously certified?
bool tower_ge_pow2(const TowerReal& a, std::uint64_t e);

// f(a) = log2(a + 1); drops the height by one with top-level slack
TowerReal tower_f(const TowerReal& a, mpfr_prec_t prec = 128);
// log2(a) for a >= 2 (structural at height >= 1)
TowerReal tower_log2(const TowerReal& a, mpfr_prec_t prec = 128);
TowerReal tower_add(const TowerReal& a, const TowerReal& b, mpfr_prec_t prec = 128);
TowerReal tower_mul(const TowerReal& a, const TowerReal& b, mpfr_prec_t prec = 128);
// a^e for a plain positive exponent enclosure (e.lo > 0)
TowerReal tower_pow(const TowerReal& a, const Interval& e, mpfr_prec_t prec = 128);
// a^e with a tower exponent (a >= 2, e >= 2)
TowerReal tower_pow(const TowerReal& a, const TowerReal& e, mpfr_prec_t prec = 128);

}  // namespace sgm
