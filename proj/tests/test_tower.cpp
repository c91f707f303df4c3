// Tests for iterated-exponential (tower) arithmetic: normalization, rigorous
// comparison verdicts, f/log2/add/mul/pow enclosures, and saturation behavior.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "sgm/interval.hpp"
#include "sgm/tower.hpp"

#include <stdexcept>

using sgm::Interval;
using sgm::TowerCmp;
using sgm::TowerReal;

namespace {

bool within(const Interval& v, const char* lo, const char* hi) {
  mpfr_t a, b;
  mpfr_init2(a, 256);
  mpfr_init2(b, 256);
  mpfr_set_str(a, lo, 10, MPFR_RNDD);
  mpfr_set_str(b, hi, 10, MPFR_RNDU);
  bool ok = mpfr_cmp(v.lo(), a) >= 0 && mpfr_cmp(v.hi(), b) <= 0;
  mpfr_clear(a);
  mpfr_clear(b);
  return ok;
}

mpz_class pow2z(unsigned long e) { return mpz_class(1) << e; }

}  // namespace

TEST_CASE("plain construction and folding to exact integers") {
  TowerReal one;
  CHECK(one.plain());
  CHECK(one.top().exact());
  CHECK(one.top().contains_q(mpq_class(1)));

  TowerReal five = TowerReal::from_ui(5);
  CHECK(five.plain());
  CHECK(five.top().contains_q(mpq_class(5)));

  // exp2^1(3) = 8 and exp2^2(2) = 16 fold down to exact plain integers.
  TowerReal t8(1, Interval::from_si(3, 96));
  CHECK(t8.plain());
  CHECK(t8.top().exact());
  CHECK(t8.top().contains_q(mpq_class(8)));

  TowerReal t16(2, Interval::from_si(2, 96));
  CHECK(t16.plain());
  CHECK(t16.top().contains_q(mpq_class(16)));

  // exp2^3(2) = 2^16 = 65536, still exact after three folds.
  TowerReal t65536(3, Interval::from_si(2, 96));
  CHECK(t65536.plain());
  CHECK(t65536.top().exact());
  CHECK(t65536.top().contains_q(mpq_class(65536)));

  // exp2^4(2) = 2^65536 is a power of two, exactly representable.
  TowerReal big(4, Interval::from_si(2, 96));
  CHECK(big.plain());
  CHECK(big.top().exact());
  CHECK(big.top().contains_q(mpq_class(pow2z(65536))));

  // exp2_of composes with the same folding.
  TowerReal p256 = TowerReal::exp2_of(TowerReal::from_ui(256));
  CHECK(p256.plain());
  CHECK(p256.top().exact());
  CHECK(p256.top().contains_q(mpq_class(pow2z(256))));

  CHECK(five.str().find("exp2") == std::string::npos);
}

TEST_CASE("height-one towers keep large tops and saturate plain evaluation") {
  // exp2^2(256) = 2^(2^256): one fold leaves height 1 with top 2^256.
  TowerReal a(2, Interval::from_si(256, 96));
  CHECK(a.height() == 1);
  CHECK(a.top().contains_q(mpq_class(pow2z(256))));
  // normalized towers of height >= 1 have top >= 2^60
  CHECK(mpfr_cmp_ui_2exp(a.top().hi(), 1, 60) >= 0);
  CHECK(a.str().find("exp2^1(") != std::string::npos);

  // 2^(2^256) overflows any plain mpfr range: [maxfinite, +inf].
  Interval v = a.value_interval(128);
  CHECK(mpfr_number_p(v.lo()));
  CHECK(mpfr_inf_p(v.hi()));

  // log2 drops one level back to the exact plain top.
  Interval lg = a.log2_interval(300);
  CHECK(lg.exact());
  CHECK(lg.contains_q(mpq_class(pow2z(256))));

  // exp2^1(2^20) folds to the exact plain power 2^(2^20), and its log2
  // round-trips exactly.
  TowerReal folded(1, Interval::from_z(pow2z(20), 96));
  CHECK(folded.plain());
  CHECK(folded.top().exact());
  CHECK(log2_i(folded.top()).contains_q(mpq_class(pow2z(20))));

  // exp2^5(2) folds four times and parks at height 1 with top 2^65536.
  TowerReal huge(5, Interval::from_si(2, 96));
  CHECK(huge.height() == 1);
  CHECK(huge.log2_interval(128).contains_q(mpq_class(pow2z(65536))));
}

TEST_CASE("comparisons are rigorous across heights") {
  TowerReal a(2, Interval::from_si(256, 96));  // 2^(2^256)
  TowerReal b(2, Interval::from_si(300, 96));  // 2^(2^300)
  CHECK(tower_compare(a, b) == TowerCmp::less);
  CHECK(tower_compare(b, a) == TowerCmp::greater);
  CHECK(tower_compare(a, a) == TowerCmp::unknown);  // overlapping enclosures
  CHECK(tower_cert_lt(a, b));
  CHECK(tower_cert_le(a, b));
  CHECK(!tower_cert_le(b, a));
  CHECK(tower_cert_le(a, a));
  CHECK(!tower_cert_lt(a, a));

  // plain vs tower through saturating evaluation
  TowerReal plain = TowerReal::from_ui(1000000000000000000ull);
  CHECK(tower_compare(plain, a) == TowerCmp::less);
  CHECK(tower_compare(a, plain) == TowerCmp::greater);
  CHECK(tower_cert_lt(plain, a));

  // towers of different heights
  TowerReal taller(3, Interval::from_si(70, 96));  // 2^(2^(2^70))
  CHECK(tower_compare(a, taller) == TowerCmp::less);
  CHECK(tower_cert_lt(a, taller));

  // plain exact ties certify <= but not <
  TowerReal four = TowerReal::from_ui(4);
  CHECK(tower_cert_le(four, four));
  CHECK(!tower_cert_lt(four, four));
  CHECK(to_string(TowerCmp::less) == std::string("less"));
  CHECK(to_string(TowerCmp::greater) == std::string("greater"));
  CHECK(to_string(TowerCmp::unknown) == std::string("unknown"));
}

TEST_CASE("certified pow2 lower bounds have sharp boundaries") {
  TowerReal eight = TowerReal::from_ui(8);
  CHECK(tower_ge_pow2(eight, 0));
  CHECK(tower_ge_pow2(eight, 3));
  CHECK(!tower_ge_pow2(eight, 4));

  TowerReal one = TowerReal::from_ui(1);
  CHECK(tower_ge_pow2(one, 0));
  CHECK(!tower_ge_pow2(one, 1));

  // at height 1 the boundary is sharp at the exact top
  TowerReal edge(1, Interval::from_z(pow2z(60), 96));  // 2^(2^60)
  CHECK(tower_ge_pow2(edge, 1ull << 60));
  CHECK(!tower_ge_pow2(edge, (1ull << 60) + 1));

  // astronomically large towers clear any machine-word exponent
  TowerReal a(2, Interval::from_si(256, 96));
  CHECK(tower_ge_pow2(a, ~0ull));
}

TEST_CASE("f drops one level and stays above log2") {
  // f(3) = log2(4) = 2 exactly
  Interval f3 = tower_f(TowerReal::from_ui(3)).top();
  CHECK(f3.exact());
  CHECK(f3.contains_q(mpq_class(2)));

  // f(2) = log2(3)
  TowerReal f2 = tower_f(TowerReal::from_ui(2));
  CHECK(f2.plain());
  CHECK(within(f2.top(), "1.5849625007211561", "1.5849625007211562"));

  // f(2^256 - 1) = 256 exactly (given enough working precision)
  TowerReal j1 = TowerReal::from_z(pow2z(256) - 1, 320);
  Interval fj1 = tower_f(j1, 280).top();
  CHECK(fj1.exact());
  CHECK(fj1.contains_q(mpq_class(256)));

  // height 1: f(2^(2^256)) is a plain enclosure just above 2^256
  TowerReal a(2, Interval::from_si(256, 96));
  TowerReal fa = tower_f(a);
  CHECK(fa.plain());
  CHECK(fa.top().contains_q(mpq_class(pow2z(256))));
  CHECK(tower_cert_le(tower_log2(a), fa));

  // height 2: result keeps height 1 and still dominates log2
  TowerReal a2(3, Interval::from_si(70, 96));
  TowerReal fa2 = tower_f(a2);
  CHECK(fa2.height() == 1);
  CHECK(tower_cert_le(tower_log2(a2), fa2));
}

TEST_CASE("log2 is structural at height and exact on plain powers of two") {
  Interval l = tower_log2(TowerReal::from_ui(1024)).top();
  CHECK(l.exact());
  CHECK(l.contains_q(mpq_class(10)));

  TowerReal a(2, Interval::from_si(256, 96));
  TowerReal la = tower_log2(a);
  CHECK(la.plain());
  CHECK(la.top().contains_q(mpq_class(pow2z(256))));

  CHECK_THROWS_AS(tower_log2(TowerReal::from_ui(1)), std::domain_error);
  CHECK_THROWS_AS(tower_log2(TowerReal::from_q(mpq_class(3, 2))),
                  std::domain_error);
}

TEST_CASE("add and mul enclose with controlled slack") {
  TowerReal s = tower_add(TowerReal::from_ui(2), TowerReal::from_ui(3));
  CHECK(s.plain());
  CHECK(s.top().contains_q(mpq_class(5)));

  TowerReal m = tower_mul(TowerReal::from_ui(2), TowerReal::from_ui(3));
  CHECK(m.plain());
  CHECK(m.top().contains_q(mpq_class(6)));

  // t = 2^(2^256): t <= t + 1 <= t * t = 2^(2^257)
  TowerReal t(2, Interval::from_si(256, 96));
  TowerReal sum = tower_add(t, TowerReal::from_ui(1));
  CHECK(tower_cert_le(t, sum));
  TowerReal sq = tower_mul(t, t);
  CHECK(tower_cert_le(sum, sq));
  CHECK(sq.log2_interval(300).contains_q(mpq_class(pow2z(257))));

  // doubling a height-1 tower lands exactly on top + 1
  TowerReal dbl = tower_mul(TowerReal::from_ui(2), t);
  CHECK(dbl.height() == 1);
  CHECK(dbl.log2_interval(300).contains_q(mpq_class(pow2z(256) + 1)));
}

TEST_CASE("pow handles plain and tower exponents") {
  TowerReal p = tower_pow(TowerReal::from_ui(2), Interval::from_si(10, 96));
  CHECK(p.plain());
  CHECK(p.top().contains_q(mpq_class(1024)));

  // large plain exponent routes through an extra level and folds back
  TowerReal q = tower_pow(TowerReal::from_ui(2), Interval::from_si(100, 96));
  CHECK(q.plain());
  CHECK(q.top().contains_q(mpq_class(pow2z(100))));

  // 2^f(2) = 3
  TowerReal three = tower_pow(TowerReal::from_ui(2),
                              tower_f(TowerReal::from_ui(2), 192), 192);
  CHECK(three.value_interval(192).contains_q(mpq_class(3)));

  // exact base 1 collapses
  TowerReal one = tower_pow(TowerReal::from_ui(1), Interval::from_si(7, 96));
  CHECK(one.plain());
  CHECK(one.top().exact());
  CHECK(one.top().contains_q(mpq_class(1)));

  // tower exponent: 2^(2^(2^256)) has height 2 and dominates its exponent
  TowerReal t(2, Interval::from_si(256, 96));
  TowerReal big = tower_pow(TowerReal::from_ui(2), t);
  CHECK(big.height() == 2);
  CHECK(tower_compare(big, t) == TowerCmp::greater);

  CHECK_THROWS_AS(tower_pow(TowerReal::from_ui(3), Interval::from_si(0, 96)),
                  std::domain_error);
}

TEST_CASE("value and log2 enclosures nest with precision") {
  TowerReal x = TowerReal::from_q(mpq_class(4, 3), 192);
  Interval coarse = x.value_interval(64);
  Interval fine = x.value_interval(192);
  CHECK(mpfr_cmp(coarse.lo(), fine.lo()) <= 0);
  CHECK(mpfr_cmp(fine.hi(), coarse.hi()) <= 0);
  CHECK(fine.contains_q(mpq_class(4, 3)));

  Interval lc = x.log2_interval(64);
  Interval lf = x.log2_interval(192);
  CHECK(mpfr_cmp(lc.lo(), lf.lo()) <= 0);
  CHECK(mpfr_cmp(lf.hi(), lc.hi()) <= 0);
}

TEST_CASE("invalid operands are rejected") {
  CHECK_THROWS_AS(TowerReal(0, Interval::from_q(mpq_class(1, 2), 96)),
                  std::domain_error);
  CHECK_THROWS_AS(TowerReal::from_q(mpq_class(1, 2)), std::domain_error);
  CHECK_THROWS_AS(TowerReal(-1, Interval::from_si(2, 96)), std::domain_error);
  CHECK_THROWS_AS(TowerReal(sgm::kMaxTowerHeight + 1, Interval::from_si(2, 96)),
                  std::domain_error);

  // exp2_of at the height cap overflows the cap
  TowerReal capped(sgm::kMaxTowerHeight, Interval::from_z(pow2z(61), 96));
  CHECK(capped.height() == sgm::kMaxTowerHeight);
  CHECK_THROWS_AS(TowerReal::exp2_of(capped), std::domain_error);

  // non-finite tops are rejected (saturated exp2 of a huge plain value)
  Interval sat = exp2_i(Interval::from_z(pow2z(63), 96));
  CHECK(mpfr_inf_p(sat.hi()));
  CHECK_THROWS_AS(TowerReal(0, sat), std::domain_error);
}
