#include "sgm/interval.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>
#include <vector>

namespace sgm {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    default: return "unknown";
  }
}

Interval::Interval(mpfr_prec_t prec) {
  mpfr_init2(lo_, prec);
  mpfr_init2(hi_, prec);
  mpfr_set_zero(lo_, 1);
  mpfr_set_zero(hi_, 1);
}

Interval::Interval(const Interval& o) {
  mpfr_init2(lo_, o.prec());
  mpfr_init2(hi_, o.prec());
  mpfr_set(lo_, o.lo_, MPFR_RNDD);
  mpfr_set(hi_, o.hi_, MPFR_RNDU);
}

Interval::Interval(Interval&& o) noexcept {
  mpfr_init2(lo_, o.prec());
  mpfr_init2(hi_, o.prec());
  mpfr_swap(lo_, o.lo_);
  mpfr_swap(hi_, o.hi_);
}

Interval& Interval::operator=(const Interval& o) {
  if (this != &o) {
    mpfr_set_prec(lo_, o.prec());
    mpfr_set_prec(hi_, o.prec());
    mpfr_set(lo_, o.lo_, MPFR_RNDD);
    mpfr_set(hi_, o.hi_, MPFR_RNDU);
  }
  return *this;
}

Interval& Interval::operator=(Interval&& o) noexcept {
  if (this != &o) {
    mpfr_swap(lo_, o.lo_);
    mpfr_swap(hi_, o.hi_);
  }
  return *this;
}

Interval::~Interval() {
  mpfr_clear(lo_);
  mpfr_clear(hi_);
}

void Interval::swap(Interval& o) noexcept {
  mpfr_swap(lo_, o.lo_);
  mpfr_swap(hi_, o.hi_);
}

bool Interval::valid() const {
  if (mpfr_nan_p(lo_) || mpfr_nan_p(hi_)) return false;
  return mpfr_cmp(lo_, hi_) <= 0;
}

bool Interval::exact() const { return mpfr_cmp(lo_, hi_) == 0; }

bool Interval::is_zero() const {
  return mpfr_zero_p(lo_) && mpfr_zero_p(hi_);
}

bool Interval::contains_zero() const {
  return mpfr_sgn(lo_) <= 0 && mpfr_sgn(hi_) >= 0;
}

bool Interval::contains_q(const mpq_class& q) const {
  return mpfr_cmp_q(lo_, q.get_mpq_t()) <= 0 &&
         mpfr_cmp_q(hi_, q.get_mpq_t()) >= 0;
}

double Interval::mid_d() const {
  return (mpfr_get_d(lo_, MPFR_RNDN) + mpfr_get_d(hi_, MPFR_RNDN)) / 2.0;
}

double Interval::wid_d() const {
  mpfr_t w;
  mpfr_init2(w, 64);
  mpfr_sub(w, hi_, lo_, MPFR_RNDU);
  double d = mpfr_get_d(w, MPFR_RNDU);
  mpfr_clear(w);
  return d;
}

Interval Interval::from_si(long v, mpfr_prec_t prec) {
  Interval r(prec);
  mpfr_set_si(r.lo_, v, MPFR_RNDD);
  mpfr_set_si(r.hi_, v, MPFR_RNDU);
  return r;
}

Interval Interval::from_ui(unsigned long v, mpfr_prec_t prec) {
  Interval r(prec);
  mpfr_set_ui(r.lo_, v, MPFR_RNDD);
  mpfr_set_ui(r.hi_, v, MPFR_RNDU);
  return r;
}

Interval Interval::from_q(const mpq_class& q, mpfr_prec_t prec) {
  Interval r(prec);
  mpfr_set_q(r.lo_, q.get_mpq_t(), MPFR_RNDD);
  mpfr_set_q(r.hi_, q.get_mpq_t(), MPFR_RNDU);
  return r;
}

Interval Interval::from_z(const mpz_class& z, mpfr_prec_t prec) {
  Interval r(prec);
  mpfr_set_z(r.lo_, z.get_mpz_t(), MPFR_RNDD);
  mpfr_set_z(r.hi_, z.get_mpz_t(), MPFR_RNDU);
  return r;
}

Interval Interval::from_d(double d, mpfr_prec_t prec) {
  Interval r(prec);
  mpfr_set_d(r.lo_, d, MPFR_RNDD);
  mpfr_set_d(r.hi_, d, MPFR_RNDU);
  return r;
}

Interval Interval::pow2(long e, mpfr_prec_t prec) {
  Interval r(prec);
  mpfr_set_ui_2exp(r.lo_, 1, e, MPFR_RNDD);
  mpfr_set_ui_2exp(r.hi_, 1, e, MPFR_RNDU);
  return r;
}

Interval Interval::hull_of(const Interval& a, const Interval& b) {
  Interval r(std::max(a.prec(), b.prec()));
  mpfr_min(r.lo_, a.lo(), b.lo(), MPFR_RNDD);
  mpfr_max(r.hi_, a.hi(), b.hi(), MPFR_RNDU);
  return r;
}

static mpfr_prec_t pmax(const Interval& a, const Interval& b) {
  return std::max(a.prec(), b.prec());
}

Interval add(const Interval& a, const Interval& b) {
  Interval r(pmax(a, b));
  mpfr_add(r.lo_mut(), a.lo(), b.lo(), MPFR_RNDD);
  mpfr_add(r.hi_mut(), a.hi(), b.hi(), MPFR_RNDU);
  return r;
}

void add_into(Interval& dest, const Interval& a, const Interval& b) {
  mpfr_add(dest.lo_mut(), a.lo(), b.lo(), MPFR_RNDD);
  mpfr_add(dest.hi_mut(), a.hi(), b.hi(), MPFR_RNDU);
}

void max_into(Interval& dest, const Interval& a, const Interval& b) {
  mpfr_max(dest.lo_mut(), a.lo(), b.lo(), MPFR_RNDD);
  mpfr_max(dest.hi_mut(), a.hi(), b.hi(), MPFR_RNDU);
}

void set_interval(Interval& dest, const Interval& src) {
  mpfr_set(dest.lo_mut(), src.lo(), MPFR_RNDD);
  mpfr_set(dest.hi_mut(), src.hi(), MPFR_RNDU);
}

Interval sub(const Interval& a, const Interval& b) {
  Interval r(pmax(a, b));
  mpfr_sub(r.lo_mut(), a.lo(), b.hi(), MPFR_RNDD);
  mpfr_sub(r.hi_mut(), a.hi(), b.lo(), MPFR_RNDU);
  return r;
}

Interval neg(const Interval& a) {
  Interval r(a.prec());
  mpfr_neg(r.lo_mut(), a.hi(), MPFR_RNDD);
  mpfr_neg(r.hi_mut(), a.lo(), MPFR_RNDU);
  return r;
}

Interval mul(const Interval& a, const Interval& b) {
  mpfr_prec_t p = pmax(a, b);
  // fast path: both nonnegative (the common case in the norm DP)
  if (a.nonneg() && b.nonneg()) {
    Interval r(p);
    mpfr_mul(r.lo_mut(), a.lo(), b.lo(), MPFR_RNDD);
    mpfr_mul(r.hi_mut(), a.hi(), b.hi(), MPFR_RNDU);
    return r;
  }
  // general case: min/max over the four endpoint products
  mpfr_t c[4], d[4];
  for (int i = 0; i < 4; i++) {
    mpfr_init2(c[i], p);
    mpfr_init2(d[i], p);
  }
  mpfr_mul(c[0], a.lo(), b.lo(), MPFR_RNDD);
  mpfr_mul(c[1], a.lo(), b.hi(), MPFR_RNDD);
  mpfr_mul(c[2], a.hi(), b.lo(), MPFR_RNDD);
  mpfr_mul(c[3], a.hi(), b.hi(), MPFR_RNDD);
  mpfr_mul(d[0], a.lo(), b.lo(), MPFR_RNDU);
  mpfr_mul(d[1], a.lo(), b.hi(), MPFR_RNDU);
  mpfr_mul(d[2], a.hi(), b.lo(), MPFR_RNDU);
  mpfr_mul(d[3], a.hi(), b.hi(), MPFR_RNDU);
  Interval r(p);
  mpfr_set(r.lo_mut(), c[0], MPFR_RNDD);
  mpfr_set(r.hi_mut(), d[0], MPFR_RNDU);
  for (int i = 1; i < 4; i++) {
    if (mpfr_cmp(c[i], r.lo()) < 0) mpfr_set(r.lo_mut(), c[i], MPFR_RNDD);
    if (mpfr_cmp(d[i], r.hi()) > 0) mpfr_set(r.hi_mut(), d[i], MPFR_RNDU);
  }
  for (int i = 0; i < 4; i++) {
    mpfr_clear(c[i]);
    mpfr_clear(d[i]);
  }
  return r;
}

Interval div(const Interval& a, const Interval& b) {
  if (b.contains_zero()) throw std::domain_error("interval division by enclosure containing zero");
  return mul(a, recip(b));
}

Interval recip(const Interval& a) {
  if (a.contains_zero()) throw std::domain_error("interval reciprocal of enclosure containing zero");
  Interval r(a.prec());
  mpfr_ui_div(r.lo_mut(), 1, a.hi(), MPFR_RNDD);
  mpfr_ui_div(r.hi_mut(), 1, a.lo(), MPFR_RNDU);
  return r;
}

Interval abs_i(const Interval& a) {
  Interval r(a.prec());
  if (a.nonneg()) return a;
  if (mpfr_sgn(a.hi()) <= 0) return neg(a);
  // straddles zero
  mpfr_neg(r.lo_mut(), a.lo(), MPFR_RNDU);  // |lo|
  if (mpfr_cmp(r.lo(), a.hi()) >= 0)
    mpfr_set(r.hi_mut(), r.lo(), MPFR_RNDU);
  else
    mpfr_set(r.hi_mut(), a.hi(), MPFR_RNDU);
  mpfr_set_zero(r.lo_mut(), 1);
  return r;
}

Interval max_i(const Interval& a, const Interval& b) {
  Interval r(pmax(a, b));
  max_into(r, a, b);
  return r;
}

Interval min_i(const Interval& a, const Interval& b) {
  Interval r(pmax(a, b));
  mpfr_min(r.lo_mut(), a.lo(), b.lo(), MPFR_RNDD);
  mpfr_min(r.hi_mut(), a.hi(), b.hi(), MPFR_RNDU);
  return r;
}

Interval sqrt_i(const Interval& a) {
  if (mpfr_sgn(a.lo()) < 0) throw std::domain_error("interval sqrt of negative enclosure");
  Interval r(a.prec());
  mpfr_sqrt(r.lo_mut(), a.lo(), MPFR_RNDD);
  mpfr_sqrt(r.hi_mut(), a.hi(), MPFR_RNDU);
  return r;
}

Interval log2_i(const Interval& a) {
  if (mpfr_sgn(a.lo()) <= 0) throw std::domain_error("interval log2 of non-positive enclosure");
  Interval r(a.prec());
  mpfr_log2(r.lo_mut(), a.lo(), MPFR_RNDD);
  mpfr_log2(r.hi_mut(), a.hi(), MPFR_RNDU);
  return r;
}

Interval log_i(const Interval& a) {
  if (mpfr_sgn(a.lo()) <= 0) throw std::domain_error("interval log of non-positive enclosure");
  Interval r(a.prec());
  mpfr_log(r.lo_mut(), a.lo(), MPFR_RNDD);
  mpfr_log(r.hi_mut(), a.hi(), MPFR_RNDU);
  return r;
}

Interval exp2_i(const Interval& a) {
  Interval r(a.prec());
  mpfr_exp2(r.lo_mut(), a.lo(), MPFR_RNDD);
  mpfr_exp2(r.hi_mut(), a.hi(), MPFR_RNDU);
  return r;
}

Interval mul_q(const Interval& a, const mpq_class& q) {
  Interval r(a.prec());
  if (sgn(q) >= 0) {
    mpfr_mul_q(r.lo_mut(), a.lo(), q.get_mpq_t(), MPFR_RNDD);
    mpfr_mul_q(r.hi_mut(), a.hi(), q.get_mpq_t(), MPFR_RNDU);
  } else {
    mpfr_mul_q(r.lo_mut(), a.hi(), q.get_mpq_t(), MPFR_RNDD);
    mpfr_mul_q(r.hi_mut(), a.lo(), q.get_mpq_t(), MPFR_RNDU);
  }
  return r;
}

Interval div_ui(const Interval& a, unsigned long d) {
  if (d == 0) throw std::domain_error("division by zero");
  Interval r(a.prec());
  if (a.nonneg()) {
    mpfr_div_ui(r.lo_mut(), a.lo(), d, MPFR_RNDD);
    mpfr_div_ui(r.hi_mut(), a.hi(), d, MPFR_RNDU);
  } else {
    mpfr_div_ui(r.lo_mut(), a.lo(), d, MPFR_RNDD);
    mpfr_div_ui(r.hi_mut(), a.hi(), d, MPFR_RNDU);
  }
  return r;
}

Interval add_q(const Interval& a, const mpq_class& q) {
  Interval r(a.prec());
  mpfr_t t;
  mpfr_init2(t, a.prec());
  mpfr_set_q(t, q.get_mpq_t(), MPFR_RNDD);
  mpfr_add(r.lo_mut(), a.lo(), t, MPFR_RNDD);
  mpfr_set_q(t, q.get_mpq_t(), MPFR_RNDU);
  mpfr_add(r.hi_mut(), a.hi(), t, MPFR_RNDU);
  mpfr_clear(t);
  return r;
}

Interval mul_2exp(const Interval& a, long e) {
  Interval r(a.prec());
  mpfr_mul_2si(r.lo_mut(), a.lo(), e, MPFR_RNDD);
  mpfr_mul_2si(r.hi_mut(), a.hi(), e, MPFR_RNDU);
  return r;
}

Interval ipow(const Interval& a, long e) {
  if (e == 0) return Interval::from_ui(1, a.prec());
  if (e < 0) return recip(ipow(a, -e));
  if (mpfr_sgn(a.lo()) < 0) throw std::domain_error("ipow expects nonnegative base");
  Interval r(a.prec());
  mpfr_pow_si(r.lo_mut(), a.lo(), e, MPFR_RNDD);
  mpfr_pow_si(r.hi_mut(), a.hi(), e, MPFR_RNDU);
  return r;
}

Interval pow_i(const Interval& a, const Interval& b) {
  return exp2_i(mul(b, log2_i(a)));
}

Interval round_to(const Interval& a, mpfr_prec_t prec) {
  Interval r(prec);
  mpfr_set(r.lo_mut(), a.lo(), MPFR_RNDD);
  mpfr_set(r.hi_mut(), a.hi(), MPFR_RNDU);
  return r;
}

Verdict cmp_le(const Interval& a, const Interval& b) {
  if (mpfr_cmp(a.hi(), b.lo()) <= 0) return Verdict::pass;
  if (mpfr_cmp(a.lo(), b.hi()) > 0) return Verdict::fail;
  return Verdict::unknown;
}

Verdict cmp_lt(const Interval& a, const Interval& b) {
  if (mpfr_cmp(a.hi(), b.lo()) < 0) return Verdict::pass;
  if (mpfr_cmp(a.lo(), b.hi()) >= 0) return Verdict::fail;
  return Verdict::unknown;
}

Verdict cmp_ge(const Interval& a, const Interval& b) { return cmp_le(b, a); }

Verdict cmp_ge_q(const Interval& a, const mpq_class& q) {
  if (mpfr_cmp_q(a.lo(), q.get_mpq_t()) >= 0) return Verdict::pass;
  if (mpfr_cmp_q(a.hi(), q.get_mpq_t()) < 0) return Verdict::fail;
  return Verdict::unknown;
}

Verdict cmp_le_q(const Interval& a, const mpq_class& q) {
  if (mpfr_cmp_q(a.hi(), q.get_mpq_t()) <= 0) return Verdict::pass;
  if (mpfr_cmp_q(a.lo(), q.get_mpq_t()) > 0) return Verdict::fail;
  return Verdict::unknown;
}

bool certainly_gt(const Interval& a, const Interval& b) {
  return mpfr_cmp(a.lo(), b.hi()) > 0;
}

bool overlaps(const Interval& a, const Interval& b) {
  return !(mpfr_cmp(a.hi(), b.lo()) < 0 || mpfr_cmp(b.hi(), a.lo()) < 0);
}

bool same_bits(const Interval& a, const Interval& b) {
  return mpfr_cmp(a.lo(), b.lo()) == 0 && mpfr_cmp(a.hi(), b.hi()) == 0 &&
         a.prec() == b.prec();
}

static std::string fmt_one(mpfr_srcptr v, int digits, const char* rnd_letter) {
  char fmt[32];
  std::snprintf(fmt, sizeof fmt, "%%.%dR%se", digits, rnd_letter);
  char buf[256];
  mpfr_snprintf(buf, sizeof buf, fmt, v);
  return std::string(buf);
}

std::string dec_lo(const Interval& a, int digits) { return fmt_one(a.lo(), digits, "D"); }
std::string dec_hi(const Interval& a, int digits) { return fmt_one(a.hi(), digits, "U"); }

Interval f_interval(const Interval& x) {
  if (mpfr_cmp_si(x.lo(), -1) <= 0)
    throw std::domain_error("f(x) requires x > -1");
  Interval xp1(x.prec());
  mpfr_add_ui(xp1.lo_mut(), x.lo(), 1, MPFR_RNDD);
  mpfr_add_ui(xp1.hi_mut(), x.hi(), 1, MPFR_RNDU);
  return log2_i(xp1);
}

Interval f_of_ui(unsigned long n, mpfr_prec_t prec) {
  Interval r(prec);
  mpfr_t t;
  mpfr_init2(t, 8 * sizeof(unsigned long) + 4);
  mpfr_set_ui(t, n, MPFR_RNDN);  // exact
  mpfr_add_ui(t, t, 1, MPFR_RNDN);
  mpfr_log2(r.lo_mut(), t, MPFR_RNDD);
  mpfr_log2(r.hi_mut(), t, MPFR_RNDU);
  mpfr_clear(t);
  return r;
}

Interval f_of_z(const mpz_class& n, mpfr_prec_t prec) {
  mpz_class np1 = n + 1;
  Interval r(prec);
  mpfr_t t;
  mpfr_init2(t, std::max<mpfr_prec_t>(8, mpz_sizeinbase(np1.get_mpz_t(), 2) + 2));
  mpfr_set_z(t, np1.get_mpz_t(), MPFR_RNDN);  // exact at that precision
  mpfr_log2(r.lo_mut(), t, MPFR_RNDD);
  mpfr_log2(r.hi_mut(), t, MPFR_RNDU);
  mpfr_clear(t);
  return r;
}

}  // namespace sgm
