#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "sgm/interval.hpp"

#include <string>

using namespace sgm;

namespace {
// v lies inside the decimal bracket [lo, hi]
bool within(const Interval& v, const char* lo, const char* hi) {
  mpfr_t a, b;
  mpfr_init2(a, 256);
  mpfr_init2(b, 256);
  mpfr_set_str(a, lo, 10, MPFR_RNDD);
  mpfr_set_str(b, hi, 10, MPFR_RNDU);
  const bool ok = mpfr_cmp(v.lo(), a) >= 0 && mpfr_cmp(v.hi(), b) <= 0;
  mpfr_clear(a);
  mpfr_clear(b);
  return ok;
}
}  // namespace

TEST_CASE("integer constructors are exact") {
  CHECK(Interval::from_si(-7, 64).exact());
  CHECK(Interval::from_ui(0, 64).is_zero());
  CHECK(Interval::from_z(mpz_class("123456789123456789"), 128).exact());
  CHECK(Interval::from_d(0.5, 64).exact());
  CHECK(Interval::pow2(-3, 64).contains_q(mpq_class(1, 8)));
  CHECK(Interval::pow2(-3, 64).exact());
}

TEST_CASE("rational constructor encloses non-representable values") {
  Interval third = Interval::from_q(mpq_class(1, 3), 64);
  CHECK(third.valid());
  CHECK_FALSE(third.exact());
  CHECK(third.contains_q(mpq_class(1, 3)));
  // dyadic rationals stay exact
  CHECK(Interval::from_q(mpq_class(3, 8), 64).exact());
}

TEST_CASE("arithmetic encloses the exact rational result") {
  mpfr_prec_t p = 96;
  Interval a = Interval::from_q(mpq_class(1, 3), p);
  Interval b = Interval::from_q(mpq_class(1, 6), p);
  CHECK(add(a, b).contains_q(mpq_class(1, 2)));
  CHECK(sub(a, b).contains_q(mpq_class(1, 6)));
  CHECK(mul(a, b).contains_q(mpq_class(1, 18)));
  CHECK(div(a, b).contains_q(mpq_class(2)));
  CHECK(recip(a).contains_q(mpq_class(3)));
  CHECK(neg(a).contains_q(mpq_class(-1, 3)));
  CHECK(abs_i(neg(a)).contains_q(mpq_class(1, 3)));
  CHECK(mul_q(a, mpq_class(9)).contains_q(mpq_class(3)));
  CHECK(add_q(a, mpq_class(2, 3)).contains_q(mpq_class(1)));
  CHECK(div_ui(a, 2).contains_q(mpq_class(1, 6)));
  CHECK(mul_2exp(a, 4).contains_q(mpq_class(16, 3)));
  CHECK(ipow(a, 3).contains_q(mpq_class(1, 27)));
  CHECK(ipow(a, -2).contains_q(mpq_class(9)));
}

TEST_CASE("transcendental maps bracket known points") {
  mpfr_prec_t p = 128;
  CHECK(sqrt_i(Interval::from_ui(4, p)).contains_q(mpq_class(2)));
  CHECK(log2_i(Interval::from_ui(8, p)).contains_q(mpq_class(3)));
  CHECK(exp2_i(Interval::from_si(-1, p)).contains_q(mpq_class(1, 2)));
  Interval s2 = sqrt_i(Interval::from_ui(2, p));
  CHECK(mul(s2, s2).contains_q(mpq_class(2)));
  CHECK(within(log_i(Interval::from_ui(2, p)), "0.693147180559945", "0.693147180559946"));
  CHECK(pow_i(Interval::from_ui(2, p), Interval::from_ui(10, p)).contains_q(mpq_class(1024)));
}

TEST_CASE("f regularization values") {
  mpfr_prec_t p = 128;
  CHECK(f_of_ui(1, p).contains_q(mpq_class(1)));
  CHECK(f_of_ui(3, p).contains_q(mpq_class(2)));
  CHECK(f_of_ui(7, p).contains_q(mpq_class(3)));
  CHECK(f_of_ui(15, p).contains_q(mpq_class(4)));
  CHECK(within(f_of_ui(2, p), "1.58496250072115", "1.58496250072116"));
  CHECK(within(f_of_ui(4, p), "2.32192809488736", "2.32192809488737"));
  // strictly increasing where decidable
  CHECK(certainly_gt(f_of_ui(100, p), f_of_ui(10, p)));
  CHECK(f_of_z(mpz_class(3), p).contains_q(mpq_class(2)));
  // f over an interval argument is the hull of the endpoint images
  Interval x(p);
  mpfr_set_ui(x.lo_mut(), 3, MPFR_RNDD);
  mpfr_set_ui(x.hi_mut(), 7, MPFR_RNDU);
  Interval fx = f_interval(x);
  CHECK(fx.contains_q(mpq_class(2)));
  CHECK(fx.contains_q(mpq_class(3)));
}

TEST_CASE("three-valued comparisons answer only when decidable") {
  mpfr_prec_t p = 64;
  Interval one = Interval::from_ui(1, p);
  Interval two = Interval::from_ui(2, p);
  CHECK(cmp_le(one, two) == Verdict::pass);
  CHECK(cmp_le(two, one) == Verdict::fail);
  CHECK(cmp_lt(one, two) == Verdict::pass);
  CHECK(cmp_ge(two, one) == Verdict::pass);
  Interval wide(p);
  mpfr_set_ui(wide.lo_mut(), 0, MPFR_RNDD);
  mpfr_set_ui(wide.hi_mut(), 3, MPFR_RNDU);
  CHECK(cmp_le(wide, two) == Verdict::unknown);
  CHECK(cmp_ge_q(two, mpq_class(2)) == Verdict::pass);
  CHECK(cmp_le_q(one, mpq_class(1, 2)) == Verdict::fail);
  CHECK(overlaps(wide, two));
  CHECK_FALSE(overlaps(one, two));
  CHECK(same_bits(one, Interval::from_ui(1, p)));
  CHECK_FALSE(same_bits(one, two));
  CHECK(std::string(to_string(Verdict::pass)) == "pass");
  CHECK(std::string(to_string(Verdict::fail)) == "fail");
  CHECK(std::string(to_string(Verdict::unknown)) == "unknown");
}

TEST_CASE("min max hull behave as set operations on enclosures") {
  mpfr_prec_t p = 64;
  Interval a = Interval::from_ui(1, p);
  Interval b = Interval::from_ui(5, p);
  CHECK(max_i(a, b).contains_q(mpq_class(5)));
  CHECK(min_i(a, b).contains_q(mpq_class(1)));
  Interval h = Interval::hull_of(a, b);
  CHECK(h.contains_q(mpq_class(1)));
  CHECK(h.contains_q(mpq_class(3)));
  CHECK(h.contains_q(mpq_class(5)));
}

TEST_CASE("rounding to lower precision stays outward") {
  Interval third = Interval::from_q(mpq_class(1, 3), 192);
  Interval r = round_to(third, 64);
  CHECK(r.prec() == 64);
  CHECK(r.contains_q(mpq_class(1, 3)));
  CHECK(mpfr_cmp(r.lo(), third.lo()) <= 0);
  CHECK(mpfr_cmp(r.hi(), third.hi()) >= 0);
}

TEST_CASE("decimal rendering is directed") {
  Interval third = Interval::from_q(mpq_class(1, 3), 128);
  std::string lo = dec_lo(third, 12), hi = dec_hi(third, 12);
  mpfr_t back;
  mpfr_init2(back, 192);
  mpfr_set_str(back, lo.c_str(), 10, MPFR_RNDU);
  CHECK(mpfr_cmp(back, third.lo()) <= 0);
  mpfr_set_str(back, hi.c_str(), 10, MPFR_RNDD);
  CHECK(mpfr_cmp(back, third.hi()) >= 0);
  mpfr_clear(back);
}

TEST_CASE("in-place helpers match the value semantics") {
  mpfr_prec_t p = 96;
  Interval a = Interval::from_q(mpq_class(2, 7), p);
  Interval b = Interval::from_q(mpq_class(3, 7), p);
  Interval dest(p);
  add_into(dest, a, b);
  CHECK(same_bits(dest, add(a, b)));
  max_into(dest, a, b);
  CHECK(same_bits(dest, max_i(a, b)));
  set_interval(dest, a);
  CHECK(same_bits(dest, a));
}
