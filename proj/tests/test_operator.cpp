// Tests for the distinguished block sequence, the diagonal-style operator T,
// block decomposition, and the measurement harnesses (basis domination,
// descent lower bound, tail localization, cost comparison, operator report).
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "sgm/block_operator.hpp"

#include <algorithm>
#include <stdexcept>

using sgm::CheckRow;
using sgm::FiniteVector;
using sgm::Interval;
using sgm::ParameterSystem;
using sgm::SymVector;
using sgm::Verdict;
using sgm::XStarSequence;

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

const CheckRow& row_named(const std::vector<CheckRow>& rows,
                          const std::string& name) {
  auto it = std::find_if(rows.begin(), rows.end(), [&](const CheckRow& r) {
    return r.condition == name;
  });
  REQUIRE(it != rows.end());
  return *it;
}

XStarSequence make_xs() {
  return sgm::build_xstars({2, 3, 4, 5}, {0, 1, 1, 2}, 192);
}

FiniteVector flat(std::uint64_t n) {
  FiniteVector x;
  for (std::uint64_t i = 1; i <= n; ++i) x = x.plus(FiniteVector::unit(i));
  return x;
}

}  // namespace

TEST_CASE("construction pins windows, leaves, and certified norms") {
  XStarSequence xs = make_xs();
  REQUIRE(xs.count() == 4);

  const std::uint64_t lo[] = {1, 2, 4, 6};
  const std::uint64_t hi[] = {1, 3, 5, 12};
  const std::size_t leaves[] = {1, 2, 2, 7};
  for (std::size_t n = 1; n <= 4; ++n) {
    const sgm::XStarItem& it = xs.at(n);
    CHECK(it.lo == lo[n - 1]);
    CHECK(it.hi == hi[n - 1]);
    CHECK(it.tree.leaf_count() == leaves[n - 1]);
    CHECK(it.vec_le2 == Verdict::pass);
    // the pairing x*_n(x_n) collapses to exactly 1
    Interval p = it.pairing.eval(192);
    CHECK(p.exact());
    CHECK(p.contains_q(mpq_class(1)));
  }
  CHECK(xs.at(1).vec_norm.exact());
  CHECK(xs.at(1).vec_norm.contains_q(mpq_class(1)));
  CHECK(within(xs.at(4).vec_norm, "1.1416823268", "1.1416823269"));
  CHECK(xs.at(1).dual_lower.contains_q(mpq_class(1)));
  CHECK(within(xs.at(4).dual_lower, "0.87590039406", "0.87590039407"));

  // the shared stream must be strictly increasing
  CHECK_THROWS_AS(sgm::build_xstars({2, 2, 3}, {0, 1}, 192), std::domain_error);
}

TEST_CASE("T acts as the identity on the block basis") {
  XStarSequence xs = make_xs();

  // biorthogonality: T x_n = e_n symbolically
  for (std::size_t n = 1; n <= 4; ++n) {
    SymVector tx = apply_T(xs, xs.at(n).vector);
    REQUIRE(tx.coords().size() == 1);
    const auto& [idx, coeff] = *tx.coords().begin();
    CHECK(idx == n);
    Interval cv = coeff.eval(192);
    CHECK(cv.exact());
    CHECK(cv.contains_q(mpq_class(1)));
  }

  SymVector t1 = apply_T(xs, FiniteVector::parse("1:1"));
  REQUIRE(t1.coords().size() == 1);
  CHECK(t1.coords().begin()->first == 1);

  // T(e2 + e3) = (2/f(2)) e2
  SymVector t23 = apply_T(xs, FiniteVector::parse("2:1 3:1"));
  REQUIRE(t23.coords().size() == 1);
  CHECK(t23.coords().begin()->first == 2);
  CHECK(within(t23.coords().begin()->second.eval(192), "1.2618595071",
               "1.2618595072"));

  // diagonal damping scales each slot by nu_n
  SymVector tnu = apply_T_nu(xs, {mpq_class(1), mpq_class(1, 2)},
                             FiniteVector::parse("1:1 2:1"));
  REQUIRE(tnu.coords().size() == 2);
  CHECK(within(tnu.coords().rbegin()->second.eval(192), "0.3154648767",
               "0.3154648768"));
}

TEST_CASE("block decomposition splits along slot windows") {
  XStarSequence xs = make_xs();
  sgm::BlockDecomposition bd =
      decompose_blocks(xs, FiniteVector::parse("1:1 2:1 7:1"));
  REQUIRE(bd.pieces.size() == 4);
  CHECK(bd.reconstruction == Verdict::pass);

  CHECK(bd.pieces[0].slot == 1);
  CHECK(!bd.pieces[0].filler);
  Interval p1 = bd.pieces[0].pairing.eval(192);
  CHECK(p1.exact());
  CHECK(p1.contains_q(mpq_class(1)));

  // x*_2(e2) = 1/f(2)
  CHECK(within(bd.pieces[1].pairing.eval(192), "0.63092975357", "0.63092975358"));

  // slot 3 is never met: canonical filler contributes nothing to the pairing
  CHECK(bd.pieces[2].filler);
  CHECK(bd.pieces[2].pairing.is_zero());

  // x*_4(e7) = (1/2) / f(2)
  CHECK(!bd.pieces[3].filler);
  CHECK(within(bd.pieces[3].pairing.eval(192), "0.31546487678", "0.31546487679"));

  // a nonzero piece with zero pairing breaks the block form
  CHECK_THROWS_AS(decompose_blocks(xs, FiniteVector::parse("2:1 3:-1")),
                  std::domain_error);
}

TEST_CASE("basis domination at the smallest scale") {
  XStarSequence xs = make_xs();
  std::vector<SymVector> zs = {xs.at(1).vector, xs.at(2).vector};
  std::vector<mpq_class> lambdas = {mpq_class(1), mpq_class(1)};

  sgm::Check21Result res = check_21(xs, zs, lambdas, 2, mpq_class(1), 192);
  CHECK(within(res.lhs, "1.2618595071", "1.2618595072"));
  CHECK(within(res.rhs, "1.2924812503", "1.2924812504"));
  CHECK(within(res.scaled_rhs, "1.2924812503", "1.2924812504"));
  CHECK(res.verdict == Verdict::pass);
  CHECK(res.coarse.contains_q(mpq_class(2)));
  CHECK(row_named(res.rows, "block-validation").verdict == Verdict::pass);
  CHECK(row_named(res.rows, "basis-vs-blocks l=2").verdict == Verdict::pass);
  CHECK(row_named(res.rows, "coarse-ratio").verdict == Verdict::pass);

  // all-zero coefficients compare 0 <= 0
  sgm::Check21Result zero =
      check_21(xs, zs, {mpq_class(0), mpq_class(0)}, 2, mpq_class(1), 192);
  CHECK(zero.verdict == Verdict::pass);
  CHECK(zero.lhs.is_zero());

  // a block violating x*_i(z_i) = 1 is rejected
  std::vector<SymVector> bad = {xs.at(2).vector, xs.at(1).vector};
  CHECK_THROWS_AS(check_21(xs, bad, lambdas, 2, mpq_class(1), 192),
                  std::invalid_argument);
}

TEST_CASE("descent certifies the explicit functional lower bound") {
  XStarSequence xs = make_xs();
  auto sys = ParameterSystem::toy();
  std::vector<mpq_class> lambdas = {mpq_class(0), mpq_class(0), mpq_class(1),
                                    mpq_class(1)};
  sgm::DescentResult res = check_descent(xs, lambdas, 100, *sys, 192);
  CHECK(within(res.lhs_measured, "1.5081631324", "1.5081631325"));
  CHECK(within(res.lhs_witness, "1.2618595071", "1.2618595072"));
  CHECK(within(res.rhs, "0.42557810379", "0.42557810380"));
  CHECK(res.verdict == Verdict::pass);
  CHECK(res.depth == 1);
  CHECK(res.gain_argmax == 2);
  CHECK(row_named(res.rows, "descent-pre f(f(m)) <= min support").verdict ==
        Verdict::pass);
  CHECK(row_named(res.rows, "descent-level 0").verdict == Verdict::pass);
  CHECK(row_named(res.rows, "descent-level 1").verdict == Verdict::pass);
  CHECK(row_named(res.rows, "descent-gain cutoff").verdict == Verdict::pass);
  CHECK(row_named(res.rows, "descent-conclusion").verdict == Verdict::pass);

  // all-zero coefficients short-circuit
  sgm::DescentResult triv = check_descent(
      xs, {mpq_class(0), mpq_class(0), mpq_class(0), mpq_class(0)}, 100, *sys, 192);
  CHECK(triv.verdict == Verdict::pass);
  CHECK(row_named(triv.rows, "descent-trivial").verdict == Verdict::pass);

  // negative coefficients are rejected
  CHECK_THROWS_AS(
      check_descent(xs, {mpq_class(-1), mpq_class(0), mpq_class(0), mpq_class(0)},
                    100, *sys, 192),
      std::domain_error);
  // more active items than m
  CHECK_THROWS_AS(
      check_descent(xs, {mpq_class(1), mpq_class(1), mpq_class(1), mpq_class(1)},
                    2, *sys, 192),
      std::domain_error);
  // f(f(m)) must stay below the least active support index
  CHECK_THROWS_AS(
      check_descent(xs, {mpq_class(1), mpq_class(0), mpq_class(0), mpq_class(0)},
                    100, *sys, 192),
      std::domain_error);
}

TEST_CASE("tail localization pins the witness and honest desk-scale rows") {
  auto sys = ParameterSystem::toy();
  FiniteVector x = flat(8);
  sgm::TailLocalization res =
      check_tail_localization(x, mpq_class(3), 2, *sys, false, 192);
  CHECK(within(res.tail_value, "2.5237190142", "2.5237190143"));
  CHECK(res.witness_l == 8);
  REQUIRE(res.head.size() == 2);
  CHECK(res.head[0] == 1);
  CHECK(res.head[1] == 2);
  CHECK(res.complement_split.slots == 6);
  CHECK(res.complement_split.parts.size() == 6);
  CHECK(within(res.complement_split.value, "2.13724312", "2.13724313"));
  CHECK(res.bounded == Verdict::pass);

  // honest desk-scale reporting: only the regularity premise fails
  for (const CheckRow& row : res.rows) {
    if (row.condition == "regularity f(r) > d^2")
      CHECK(row.verdict == Verdict::fail);
    else
      CHECK(row.verdict == Verdict::pass);
  }
  const CheckRow& sharp = row_named(res.rows, "tail-le-l1-over-f");
  CHECK(sharp.verdict == Verdict::pass);

  // certified mode needs f(r) > d^2, unreachable at desk scale
  CHECK_THROWS_AS(check_tail_localization(x, mpq_class(3), 2, *sys, true, 192),
                  std::domain_error);

  sgm::TailLocalization triv =
      check_tail_localization(FiniteVector(), mpq_class(3), 2, *sys, false, 192);
  CHECK(row_named(triv.rows, "tail-trivial").verdict == Verdict::pass);
}

TEST_CASE("cost comparison at desk scale measures honestly") {
  XStarSequence xs = make_xs();
  auto sys = ParameterSystem::toy();
  std::vector<SymVector> zs = {xs.at(1).vector, xs.at(2).vector};
  std::vector<mpq_class> lambdas = {mpq_class(1), mpq_class(1)};

  sgm::CostCompareResult res =
      check_cost_compare(xs, zs, lambdas, 3, *sys, false, 192);
  CHECK(res.lhs.exact());
  CHECK(res.lhs.contains_q(mpq_class(1)));  // ||e1 + e2||_3 = 2/f(3) = 1
  CHECK(within(res.rhs, "4.8652863987", "4.8652863988"));
  CHECK(res.verdict == Verdict::pass);
  CHECK(!res.above_threshold);
  CHECK(mpfr_inf_p(res.c_product.hi()));
  CHECK(res.c_product.contains_q(mpq_class(1)));
  CHECK(row_named(res.rows, "cost-threshold").verdict == Verdict::fail);
  CHECK(row_named(res.rows, "c-product factor 1").verdict == Verdict::fail);
  CHECK(row_named(res.rows, "cost-conclusion m=3").verdict == Verdict::pass);

  CHECK_THROWS_AS(check_cost_compare(xs, zs, lambdas, 3, *sys, true, 192),
                  std::domain_error);

  sgm::CostCompareResult triv = check_cost_compare(
      xs, zs, {mpq_class(0), mpq_class(0)}, 3, *sys, false, 192);
  CHECK(row_named(triv.rows, "cost-trivial").verdict == Verdict::pass);
}

TEST_CASE("operator report sandwiches the diagonal modification") {
  XStarSequence xs = make_xs();
  auto sys = ParameterSystem::toy();
  std::vector<FiniteVector> probes = {FiniteVector::parse("1:1"),
                                      FiniteVector::parse("2:1 3:1"), flat(5)};
  std::vector<mpq_class> nu = {mpq_class(1), mpq_class(1, 2), mpq_class(1, 4),
                               mpq_class(1, 8)};
  sgm::OperatorReport rep = operator_norm_report(xs, probes, nu, *sys, 192);
  REQUIRE(rep.rows.size() == 3);

  CHECK(within(rep.rows[0].ratio_upper, "0.99999999", "1.00000001"));
  CHECK(within(rep.rows[2].ratio_upper, "0.9108681515", "0.9108681516"));
  CHECK(within(rep.rows[0].gm_upper, "2.5928571428", "2.5928571429"));
  CHECK(within(rep.rows[1].gm_upper, "4.4475737928", "4.4475737929"));
  CHECK(within(rep.rows[2].gm_upper, "9.1604092576", "9.1604092577"));
  CHECK(within(rep.rows[2].x_norm, "1.9342640361", "1.9342640362"));

  CHECK(rep.sup_ratio.contains_q(mpq_class(1)));
  CHECK(within(rep.sup_ratio, "0.99999999", "1.00000001"));
  CHECK(within(rep.dual_inf, "0.87590039406", "0.87590039407"));
  CHECK(rep.tnu_lower.contains_q(mpq_class(1)));

  // upper sandwich: (sup ratio + desk-scale cost sum) * max|nu| diverges
  CHECK(mpfr_inf_p(rep.tnu_upper.hi()));
  CHECK(mpfr_cmp_ui(rep.tnu_upper.lo(), 6) > 0);
  CHECK(mpfr_cmp_ui(rep.tnu_upper.lo(), 8) < 0);

  REQUIRE(rep.checks.size() == 4);
  for (const CheckRow& row : rep.checks) CHECK(row.verdict == Verdict::pass);
  row_named(rep.checks, "pairing-identity");
  row_named(rep.checks, "biorthogonality");
  row_named(rep.checks, "diagonal-sandwich");
  row_named(rep.checks, "non-compactness-indicator");
}
