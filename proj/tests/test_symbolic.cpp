#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "sgm/symbolic.hpp"
#include "sgm/vector.hpp"

#include <stdexcept>

using namespace sgm;

namespace {
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

TEST_CASE("normal form folds exactly known factors into the rational part") {
  // f(1) = 1 disappears entirely
  CHECK(SymCoeff::f_pow(mpz_class(1), -2) == SymCoeff::one());
  CHECK(SymCoeff::f_pow(mpz_class(1), 5) == SymCoeff::one());
  // n = 2^t - 1 makes whole powers rational: f(3) = 2, f(7) = 3, f(15) = 4
  CHECK(SymCoeff::f_pow(mpz_class(3), -2).as_rational() == mpq_class(1, 2));
  CHECK(SymCoeff::f_pow(mpz_class(7), 2).as_rational() == mpq_class(3));
  CHECK(SymCoeff::f_pow(mpz_class(15), 4).as_rational() == mpq_class(16));
  // half powers of perfect squares also fold: f(15)^(1/2) = 2
  CHECK(SymCoeff::f_pow(mpz_class(15), 1).as_rational() == mpq_class(2));
  CHECK(SymCoeff::f_pow(mpz_class(15), -1).as_rational() == mpq_class(1, 2));
  // f(3)^(1/2) = sqrt(2) stays irrational with an empty rational multiple
  SymCoeff r3 = SymCoeff::f_pow(mpz_class(3), 1);
  CHECK_FALSE(r3.is_rational());
  CHECK(r3.eval(128).contains_q(mpq_class(0)) == false);
  CHECK_THROWS_AS(r3.as_rational(), std::exception);
  // f(2) = log2(3) has no fold at all
  SymCoeff f2 = SymCoeff::f_pow(mpz_class(2), 2);
  CHECK_FALSE(f2.is_rational());
  CHECK(f2.factors().size() == 1);
}

TEST_CASE("multiplication cancels reciprocal factors") {
  SymCoeff a = SymCoeff::f_pow(mpz_class(2), -2);
  SymCoeff b = SymCoeff::f_pow(mpz_class(2), 2);
  CHECK(a * b == SymCoeff::one());
  SymCoeff half = SymCoeff::f_pow(mpz_class(2), 1);
  CHECK(half * half == b);
  CHECK((a * SymCoeff(mpq_class(0))).is_zero());
  SymCoeff c = SymCoeff(mpq_class(3, 4)) * SymCoeff(mpq_class(2, 3));
  CHECK(c.as_rational() == mpq_class(1, 2));
  CHECK(a.reciprocal() == b);
  CHECK(a.negated().rational_part() == -a.rational_part());
}

TEST_CASE("coefficient evaluation brackets the real value") {
  // (1/3) / log2(3) = 0.2103099178571524790...
  SymCoeff c = SymCoeff(mpq_class(1, 3)) * SymCoeff::f_pow(mpz_class(2), -2);
  CHECK(within(c.eval(128), "0.2103099178571524", "0.2103099178571525"));
  // sqrt factor: f(3)^(1/2) evaluates around sqrt(2)
  Interval s = SymCoeff::f_pow(mpz_class(3), 1).eval(128);
  Interval s2 = mul(s, s);
  CHECK(s2.contains_q(mpq_class(2)));
}

TEST_CASE("sums keep a canonical merged term list") {
  SymSum a(SymCoeff::f_pow(mpz_class(2), 2));
  SymSum twice = a + a;
  CHECK(twice.terms().size() == 1);
  CHECK(twice.terms()[0].rational_part() == mpq_class(2));
  CHECK((a + a.negated()).is_zero());
  SymSum mixed = SymSum(mpq_class(1)) + a;
  CHECK(mixed.terms().size() == 2);
  CHECK(mixed == SymSum(mpq_class(1)) + a);
  CHECK(mixed != a);
  CHECK_FALSE(mixed.is_rational());
  SymSum rat = SymSum(mpq_class(2, 3)) + SymSum(mpq_class(1, 3));
  CHECK(rat.is_rational());
  CHECK(rat.as_rational() == mpq_class(1));
  // product distributes and cancels
  SymSum prod = mixed * SymCoeff::f_pow(mpz_class(2), -2);
  CHECK(prod == SymSum(SymCoeff::f_pow(mpz_class(2), -2)) + SymSum(mpq_class(1)));
  // 1 + log2(3) = 2.5849625007211561814...
  CHECK(within(mixed.eval(128), "2.5849625007211561", "2.5849625007211562"));
}

TEST_CASE("sum against sum multiplication expands fully") {
  SymSum f2(SymCoeff::f_pow(mpz_class(2), 2));
  SymSum lhs = (SymSum(mpq_class(1)) + f2) * (SymSum(mpq_class(1)) + f2.negated());
  // (1 + f2)(1 - f2) = 1 - f2^2
  SymSum expect = SymSum(mpq_class(1)) +
                  SymSum(SymCoeff::f_pow(mpz_class(2), 4)).negated();
  CHECK(lhs == expect);
}

TEST_CASE("vectors support exact construction and slicing") {
  SymVector v;
  CHECK(v.empty());
  v.set(3, SymSum(mpq_class(1, 2)));
  v.set(7, SymSum(SymCoeff::f_pow(mpz_class(2), -2)));
  v.add_to(3, SymSum(mpq_class(1, 2)));
  CHECK(v.coeff(3).as_rational() == mpq_class(1));
  CHECK(v.min_index() == 3);
  CHECK(v.max_index() == 7);
  SymVector r = v.restricted(4, 9);
  CHECK(r.coords().size() == 1);
  CHECK(r.coeff(7) == v.coeff(7));
  v.set(3, SymSum());  // erase through zero
  CHECK(v.coords().size() == 1);
  SymVector sc = v.scaled(SymCoeff::f_pow(mpz_class(2), 2));
  CHECK(sc.coeff(7).as_rational() == mpq_class(1));
  CHECK_FALSE(v.is_rational());
  CHECK_THROWS_AS(v.to_rational(), std::exception);
}

TEST_CASE("rational round trip preserves every coordinate") {
  FiniteVector x = FiniteVector::parse("1:1 4:-2/3 9:5");
  SymVector v = SymVector::from_rational(x);
  CHECK(v.is_rational());
  FiniteVector back = v.to_rational();
  CHECK(back.coords() == x.coords());
  auto coords = v.eval_coords(128);
  REQUIRE(coords.size() == 3);
  CHECK(coords[0].contains_q(mpq_class(1)));
  CHECK(coords[1].contains_q(mpq_class(-2, 3)));
  CHECK(coords[2].contains_q(mpq_class(5)));
}

TEST_CASE("vector addition merges and cancels coordinatewise") {
  SymVector a = SymVector::from_rational(FiniteVector::parse("1:1 2:1"));
  SymVector b = SymVector::from_rational(FiniteVector::parse("2:-1 3:1"));
  SymVector s = a + b;
  CHECK(s.coords().size() == 2);
  CHECK(s.coeff(1).as_rational() == mpq_class(1));
  CHECK(s.coeff(3).as_rational() == mpq_class(1));
  CHECK(s == SymVector::from_rational(FiniteVector::parse("1:1 3:1")));
}

TEST_CASE("pairing is the exact bilinear action") {
  SymVector fstar;
  fstar.set(1, SymSum(SymCoeff::f_pow(mpz_class(2), -2)));
  fstar.set(2, SymSum(mpq_class(1, 2)));
  FiniteVector x = FiniteVector::parse("1:1 2:1 5:9");
  SymSum act = sym_pairing(fstar, x);
  // f(2)^(-1) + 1/2, exactly
  SymSum expect = SymSum(SymCoeff::f_pow(mpz_class(2), -2)) + SymSum(mpq_class(1, 2));
  CHECK(act == expect);
  SymSum self = sym_pairing(fstar, SymVector::from_rational(x));
  CHECK(self == expect);
  // disjoint supports pair to zero
  CHECK(sym_pairing(fstar, FiniteVector::parse("9:4")).is_zero());
}

TEST_CASE("successiveness compares support windows strictly") {
  SymVector a = SymVector::from_rational(FiniteVector::parse("1:1 3:1"));
  SymVector b = SymVector::from_rational(FiniteVector::parse("4:1 6:1"));
  CHECK(successive(a, b));
  CHECK_FALSE(successive(b, a));
  SymVector c = SymVector::from_rational(FiniteVector::parse("3:1 9:1"));
  CHECK_FALSE(successive(a, c));  // windows touch at 3
}

TEST_CASE("string renderings are stable and informative") {
  SymCoeff c = SymCoeff(mpq_class(1, 2)) * SymCoeff::f_pow(mpz_class(2), -2);
  CHECK(c.str() == "1/2*f(2)^(-1)");
  SymSum s = SymSum(mpq_class(1)) + SymSum(c);
  CHECK(s.str().find("1/2*f(2)^(-1)") != std::string::npos);
  SymVector v;
  v.set(2, SymSum(c));
  CHECK(v.str().find("2:") != std::string::npos);
}
