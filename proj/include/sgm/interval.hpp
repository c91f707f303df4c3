#pragma once
// Certified interval scalars on top of MPFR directed rounding.
//
// Every operation rounds the lower endpoint with MPFR_RNDD and the upper
// endpoint with MPFR_RNDU, so an Interval always encloses the exact real
// result of the expression that produced it.  Comparisons are three-valued:
// they answer pass/fail only when the enclosures decide the question.

#include <gmpxx.h>
#include <mpfr.h>

#include <string>
#include <utility>

namespace sgm {

enum class Verdict { pass, fail, unknown };
const char* to_string(Verdict v);

class Interval {
 public:
  explicit Interval(mpfr_prec_t prec = 128);
  Interval(const Interval& o);
  Interval(Interval&& o) noexcept;
  Interval& operator=(const Interval& o);
  Interval& operator=(Interval&& o) noexcept;
  ~Interval();

  mpfr_prec_t prec() const { return mpfr_get_prec(lo_); }
  mpfr_srcptr lo() const { return lo_; }
  mpfr_srcptr hi() const { return hi_; }
  mpfr_ptr lo_mut() { return lo_; }
  mpfr_ptr hi_mut() { return hi_; }

  bool valid() const;          // lo <= hi and neither endpoint NaN
  bool exact() const;          // lo == hi (zero width)
  bool is_zero() const;        // exactly [0, 0]
  bool nonneg() const { return mpfr_sgn(lo_) >= 0; }
  bool contains_zero() const;
  bool contains_q(const mpq_class& q) const;

  double mid_d() const;        // approximate midpoint (diagnostics only)
  double wid_d() const;        // approximate width (diagnostics only)

  // --- constructors from exact values (zero width when representable) ---
  static Interval from_si(long v, mpfr_prec_t prec);
  static Interval from_ui(unsigned long v, mpfr_prec_t prec);
  static Interval from_q(const mpq_class& q, mpfr_prec_t prec);
  static Interval from_z(const mpz_class& z, mpfr_prec_t prec);
  static Interval from_d(double d, mpfr_prec_t prec);
  static Interval pow2(long e, mpfr_prec_t prec);  // exact 2^e
  static Interval hull_of(const Interval& a, const Interval& b);

  void swap(Interval& o) noexcept;

 private:
  mpfr_t lo_, hi_;
};

// Result precision of binary operations is max(prec(a), prec(b)).
Interval add(const Interval& a, const Interval& b);
Interval sub(const Interval& a, const Interval& b);
Interval mul(const Interval& a, const Interval& b);
Interval div(const Interval& a, const Interval& b);  // 0 not in b
Interval neg(const Interval& a);
Interval abs_i(const Interval& a);
Interval max_i(const Interval& a, const Interval& b);  // enclosure of max
Interval min_i(const Interval& a, const Interval& b);
Interval sqrt_i(const Interval& a);                    // a >= 0
Interval log2_i(const Interval& a);                    // a > 0
Interval log_i(const Interval& a);                     // natural log, a > 0
Interval exp2_i(const Interval& a);
Interval recip(const Interval& a);
Interval mul_q(const Interval& a, const mpq_class& q);
Interval div_ui(const Interval& a, unsigned long d);
Interval add_q(const Interval& a, const mpq_class& q);
Interval mul_2exp(const Interval& a, long e);          // exact scaling
Interval ipow(const Interval& a, long e);              // a > 0 when e < 0
// a^b for a > 0 via exp2(b * log2 a)
Interval pow_i(const Interval& a, const Interval& b);
// outward round to a (usually smaller) precision
Interval round_to(const Interval& a, mpfr_prec_t prec);

// in-place helpers for hot loops (dest may not alias a or b)
void add_into(Interval& dest, const Interval& a, const Interval& b);
void max_into(Interval& dest, const Interval& a, const Interval& b);
void set_interval(Interval& dest, const Interval& src);

// three-valued comparisons of the underlying reals
Verdict cmp_le(const Interval& a, const Interval& b);  // a <= b ?
Verdict cmp_lt(const Interval& a, const Interval& b);
Verdict cmp_ge(const Interval& a, const Interval& b);
Verdict cmp_ge_q(const Interval& a, const mpq_class& q);
Verdict cmp_le_q(const Interval& a, const mpq_class& q);
bool certainly_gt(const Interval& a, const Interval& b);   // a.lo > b.hi
bool overlaps(const Interval& a, const Interval& b);
bool same_bits(const Interval& a, const Interval& b);      // bit-identical endpoints

// sound decimal rendering: lo rounded toward -inf, hi toward +inf
std::string dec_lo(const Interval& a, int digits);
std::string dec_hi(const Interval& a, int digits);

// f(x) = log2(x + 1), the regularization function of the whole development
Interval f_interval(const Interval& x);
Interval f_of_ui(unsigned long n, mpfr_prec_t prec);
Interval f_of_z(const mpz_class& n, mpfr_prec_t prec);

}  // namespace sgm
