#include "sgm/tower.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

namespace sgm {

namespace {

// [0, 2^-s]
Interval upper_slack(long s, mpfr_prec_t prec) {
  return Interval::hull_of(Interval::from_si(0, prec), Interval::pow2(-s, prec));
}

// [-2^-s, 2^-s]
Interval sym_slack(long s, mpfr_prec_t prec) {
  return Interval::hull_of(neg(Interval::pow2(-s, prec)), Interval::pow2(-s, prec));
}

long floor_lo_clamped(const Interval& x, long lo_clamp, long hi_clamp) {
  long v = mpfr_get_si(x.lo(), MPFR_RNDD);
  if (v < lo_clamp) v = lo_clamp;
  if (v > hi_clamp) v = hi_clamp;
  return v;
}

bool hi_below_2exp60(const Interval& x) {
  return mpfr_cmp_ui_2exp(x.hi(), 1, 60) < 0;
}

}  // namespace

const char* to_string(TowerCmp c) {
  switch (c) {
    case TowerCmp::less: return "less";
    case TowerCmp::greater: return "greater";
    default: return "unknown";
  }
}

TowerReal::TowerReal(int height, Interval top) : h_(height), top_(std::move(top)) {
  if (h_ < 0 || h_ > kMaxTowerHeight)
    throw std::domain_error("TowerReal: height out of range");
  if (!top_.valid() || !mpfr_number_p(top_.hi()))
    throw std::domain_error("TowerReal: top must be a finite enclosure");
  if (mpfr_cmp_si(top_.lo(), 1) < 0)
    throw std::domain_error("TowerReal: degenerate operand (value below 1)");
  normalize();
}

void TowerReal::normalize() {
  while (h_ >= 1 && hi_below_2exp60(top_)) {
    top_ = exp2_i(top_);  // top < 2^60, so this cannot overflow
    --h_;
  }
}

TowerReal TowerReal::from_ui(std::uint64_t v, mpfr_prec_t prec) {
  return TowerReal(0, Interval::from_z(mpz_class(static_cast<unsigned long>(v)), prec));
}

TowerReal TowerReal::from_q(const mpq_class& q, mpfr_prec_t prec) {
  return TowerReal(0, Interval::from_q(q, prec));
}

TowerReal TowerReal::from_z(const mpz_class& z, mpfr_prec_t prec) {
  return TowerReal(0, Interval::from_z(z, prec));
}

TowerReal TowerReal::from_interval(const Interval& v) { return TowerReal(0, v); }

TowerReal TowerReal::exp2_of(const TowerReal& t) {
  return TowerReal(t.h_ + 1, t.top_);
}

Interval TowerReal::value_interval(mpfr_prec_t prec) const {
  Interval v = round_to(top_, prec);
  for (int i = 0; i < h_; ++i) v = exp2_i(v);  // saturates to [maxfinite, +inf]
  return v;
}

Interval TowerReal::log2_interval(mpfr_prec_t prec) const {
  if (h_ == 0) return log2_i(round_to(top_, prec));
  return TowerReal(h_ - 1, top_).value_interval(prec);
}

std::string TowerReal::str(int digits) const {
  std::string body = "[" + dec_lo(top_, digits) + ", " + dec_hi(top_, digits) + "]";
  if (h_ == 0) return body;
  return "exp2^" + std::to_string(h_) + "(" + body + ")";
}

namespace {

TowerCmp cmp_intervals(const Interval& a, const Interval& b) {
  if (mpfr_cmp(a.hi(), b.lo()) < 0) return TowerCmp::less;
  if (mpfr_cmp(a.lo(), b.hi()) > 0) return TowerCmp::greater;
  return TowerCmp::unknown;
}

TowerCmp flip(TowerCmp c) {
  if (c == TowerCmp::less) return TowerCmp::greater;
  if (c == TowerCmp::greater) return TowerCmp::less;
  return TowerCmp::unknown;
}

// compare a finite plain enclosure against a tower of height >= 1 by
// saturating evaluation: the saturated lower endpoint (largest finite number
// on overflow) still decides every realistic case.
TowerCmp cmp_plain_vs_tower(const Interval& x, const TowerReal& t) {
  Interval tv = t.value_interval(std::max<mpfr_prec_t>(x.prec(), 96));
  return cmp_intervals(x, tv);
}

}  // namespace

TowerCmp tower_compare(const TowerReal& a, const TowerReal& b) {
  // exp2 is strictly increasing, so dropping one level on both sides
  // preserves the order verdict.
  if (a.height() >= 1 && b.height() >= 1)
    return tower_compare(TowerReal(a.height() - 1, a.top()),
                         TowerReal(b.height() - 1, b.top()));
  if (a.height() == 0 && b.height() == 0) return cmp_intervals(a.top(), b.top());
  if (a.height() == 0) return cmp_plain_vs_tower(a.top(), b);
  return flip(cmp_plain_vs_tower(b.top(), a));
}

bool tower_cert_le(const TowerReal& a, const TowerReal& b) {
  if (a.height() >= 1 && b.height() >= 1)
    return tower_cert_le(TowerReal(a.height() - 1, a.top()),
                         TowerReal(b.height() - 1, b.top()));
  if (a.height() == 0 && b.height() == 0)
    return mpfr_cmp(a.top().hi(), b.top().lo()) <= 0;
  if (a.height() == 0) {
    Interval tv = b.value_interval(std::max<mpfr_prec_t>(a.top().prec(), 96));
    return mpfr_cmp(a.top().hi(), tv.lo()) <= 0;
  }
  Interval tv = a.value_interval(std::max<mpfr_prec_t>(b.top().prec(), 96));
  return mpfr_cmp(tv.hi(), b.top().lo()) <= 0;
}

bool tower_cert_lt(const TowerReal& a, const TowerReal& b) {
  return tower_compare(a, b) == TowerCmp::less;
}

bool tower_ge_pow2(const TowerReal& a, std::uint64_t e) {
  if (e == 0) return true;  // every value is >= 1
  TowerReal b(1, Interval::from_z(mpz_class(static_cast<unsigned long>(e)), 96));
  return tower_cert_le(b, a);
}

TowerReal tower_f(const TowerReal& a, mpfr_prec_t prec) {
  if (a.height() == 0) {
    Interval x = round_to(a.top(), prec + 32);
    return TowerReal(0, round_to(f_interval(x), prec));
  }
  // a = 2^u with u = exp2^(h-1)(top).  f(a) = u + eps, 0 < eps <= 2^(-u).
  // Widening the top by [0, 2^-s] with 2^-s >= eps (relative to the level it
  // lands on) encloses the result: at height h-1 = 0 the widening is additive
  // and 2^-s >= 2^(-u) suffices; at h-1 >= 1 the widening multiplies the value
  // by 2^(2^-s) >= 1 + 0.69*u*2^-s >= 1 + eps/u, which again covers u + eps.
  long s;
  long t0 = floor_lo_clamped(a.top(), 1, 60);
  if (a.height() == 1) {
    s = t0;  // eps <= 2^(-top.lo) <= 2^(-t0)
  } else {
    s = (t0 >= 6) ? 60 : std::min<long>(60, 1L << t0);
  }
  mpfr_prec_t tp = std::max<mpfr_prec_t>(a.top().prec(), prec);
  return TowerReal(a.height() - 1, add(round_to(a.top(), tp), upper_slack(s, tp)));
}

TowerReal tower_log2(const TowerReal& a, mpfr_prec_t prec) {
  if (a.height() >= 1) return TowerReal(a.height() - 1, a.top());
  if (mpfr_cmp_si(a.top().lo(), 2) < 0)
    throw std::domain_error("tower_log2: operand must be >= 2");
  return TowerReal(0, log2_i(round_to(a.top(), prec)));
}

namespace {

// t + d for a signed plain perturbation d with |d| < 2^62, valid whenever the
// result stays >= 1.  For t of height >= 1 the value is at least 2^(2^60), so
// the relative shift is below 2^-60 and a symmetric top slack of 2^-58 covers
// it at every level (same argument as in tower_f).
TowerReal add_plain_signed(const TowerReal& t, const Interval& d, mpfr_prec_t prec) {
  if (!mpfr_number_p(d.hi()) || !mpfr_number_p(d.lo()))
    throw std::domain_error("tower add: non-finite perturbation");
  if (t.height() == 0) {
    Interval s = add(round_to(t.top(), std::max(prec, t.top().prec())), d);
    return TowerReal(0, s);
  }
  if (mpfr_cmp_ui_2exp(abs_i(d).hi(), 1, 62) >= 0)
    throw std::domain_error("tower add: perturbation too large");
  mpfr_prec_t tp = std::max<mpfr_prec_t>(t.top().prec(), prec);
  return TowerReal(t.height(), add(round_to(t.top(), tp), sym_slack(58, tp)));
}

// value multiplied by a factor in [1, 2]: top slack [0, 1] at the first log
// level (exp2^(h-1)(top + 1) >= 2 * exp2^(h-1)(top) for every h >= 1).
TowerReal slack_double(const TowerReal& t, mpfr_prec_t prec) {
  if (t.height() == 0) {
    Interval two = Interval::hull_of(Interval::from_si(1, 32), Interval::from_si(2, 32));
    Interval m = mul(round_to(t.top(), std::max(prec, t.top().prec())), two);
    if (mpfr_number_p(m.hi())) return TowerReal(0, m);
    Interval lt = log2_i(t.top());
    return TowerReal::exp2_of(TowerReal(0, add(lt, upper_slack(0, lt.prec()))));
  }
  mpfr_prec_t tp = std::max<mpfr_prec_t>(t.top().prec(), prec);
  if (t.height() == 1) {
    // 2 * exp2(t) = exp2(t + 1), exactly
    return TowerReal(1, add(round_to(t.top(), tp), Interval::from_si(1, 32)));
  }
  if (mpfr_cmp_ui(t.top().lo(), 64) >= 0) {
    // doubling exp2^h(t) raises the level-(h-1) entry by exactly 1; with
    // exp2(t) >= 2^64 that is a top shift of at most log2(1 + 2^-(2^64)) < 2^-60
    return TowerReal(t.height(), add(round_to(t.top(), tp), upper_slack(60, tp)));
  }
  Interval one01 = Interval::hull_of(Interval::from_si(0, 32), Interval::from_si(1, 32));
  return TowerReal(t.height(), add(round_to(t.top(), tp), one01));
}

}  // namespace

TowerReal tower_add(const TowerReal& a, const TowerReal& b, mpfr_prec_t prec) {
  if (a.height() == 0 && b.height() == 0) {
    Interval s = add(round_to(a.top(), prec + 8), round_to(b.top(), prec + 8));
    if (mpfr_number_p(s.hi())) return TowerReal(0, s);
    Interval la = log2_i(a.top()), lb = log2_i(b.top());
    Interval lmax = max_i(la, lb);
    return TowerReal::exp2_of(TowerReal(0, add(lmax, upper_slack(0, lmax.prec()))));
  }
  // a + b lies in [max(a,b), 2*max(a,b)]; take the certified-or-taller side as
  // the base (the sum dominates each operand, so its lower endpoint is sound).
  const TowerReal* base = nullptr;
  TowerCmp c = tower_compare(a, b);
  if (c == TowerCmp::less) base = &b;
  else if (c == TowerCmp::greater) base = &a;
  else if (a.height() != b.height()) base = (a.height() > b.height()) ? &a : &b;
  else base = (mpfr_cmp(a.top().hi(), b.top().hi()) >= 0) ? &a : &b;
  return slack_double(*base, prec);
}

TowerReal tower_mul(const TowerReal& a, const TowerReal& b, mpfr_prec_t prec) {
  if (a.height() == 0 && b.height() == 0) {
    Interval m = mul(round_to(a.top(), prec + 8), round_to(b.top(), prec + 8));
    if (mpfr_number_p(m.hi())) return TowerReal(0, m);
    Interval s = add(log2_i(a.top()), log2_i(b.top()));
    return TowerReal::exp2_of(TowerReal(0, s));
  }
  const TowerReal& tall = (a.height() >= b.height()) ? a : b;
  const TowerReal& other = (a.height() >= b.height()) ? b : a;
  TowerReal lt = tower_log2(tall, prec);
  if (other.height() == 0) {
    Interval lo = log2_i(round_to(other.top(), prec + 8));
    return TowerReal::exp2_of(add_plain_signed(lt, lo, prec));
  }
  TowerReal lo = tower_log2(other, prec);
  return TowerReal::exp2_of(tower_add(lt, lo, prec));
}

TowerReal tower_pow(const TowerReal& a, const Interval& e, mpfr_prec_t prec) {
  if (!e.valid() || mpfr_sgn(e.lo()) <= 0)
    throw std::domain_error("tower_pow: exponent must be positive");
  if (a.height() == 0) {
    if (mpfr_cmp_si(a.top().lo(), 1) == 0 && a.top().exact())
      return TowerReal(0, Interval::from_si(1, prec));
    Interval la = log2_i(round_to(a.top(), prec + 16));
    Interval prod = mul(la, round_to(e, prec + 16));
    if (mpfr_number_p(prod.hi()) && mpfr_cmp_si(prod.hi(), 60) < 0)
      return TowerReal(0, exp2_i(prod));
    if (mpfr_number_p(prod.hi()))
      return TowerReal::exp2_of(TowerReal(0, prod));
    throw std::domain_error("tower_pow: exponent product overflow");
  }
  // a = 2^u:  a^e = 2^(u*e);  u*e handled one level down.
  TowerReal u = tower_log2(a, prec);
  if (u.height() == 0) {
    Interval prod = mul(round_to(u.top(), prec + 16), round_to(e, prec + 16));
    if (mpfr_number_p(prod.hi()))
      return TowerReal::exp2_of(TowerReal(0, prod));
    Interval s = add(log2_i(u.top()), log2_i(e));
    return TowerReal::exp2_of(TowerReal::exp2_of(TowerReal(0, s)));
  }
  // u has height >= 1: u*e = 2^(log2 u + log2 e) with a small signed shift
  TowerReal lu = tower_log2(u, prec);
  Interval le = log2_i(round_to(e, prec + 16));
  return TowerReal::exp2_of(TowerReal::exp2_of(add_plain_signed(lu, le, prec)));
}

TowerReal tower_pow(const TowerReal& a, const TowerReal& e, mpfr_prec_t prec) {
  if (e.height() == 0) return tower_pow(a, e.top(), prec);
  TowerReal la = tower_log2(a, prec);
  return TowerReal::exp2_of(tower_mul(la, e, prec));
}

}  // namespace sgm
