// Tests for the depth-bounded norming-set machinery: formation trees, exact
// materialization, certified lower/upper bounds, special combinations and
// their registry decomposition, and the spreading-gap measurement.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "sgm/gmspace.hpp"

#include <algorithm>
#include <stdexcept>

using sgm::CheckRow;
using sgm::FiniteVector;
using sgm::GMBudget;
using sgm::GMFunctional;
using sgm::GMNode;
using sgm::Interval;
using sgm::ParameterSystem;
using sgm::SymVector;
using sgm::Verdict;

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

// special combination with groups of the given sizes over unit atoms placed
// consecutively from position 1
GMNode flat_special(std::vector<std::uint64_t> ms) {
  std::vector<GMNode> kids;
  std::uint64_t pos = 1;
  for (std::uint64_t m : ms)
    for (std::uint64_t i = 0; i < m; ++i)
      kids.push_back(GMNode::atom(pos++, mpq_class(1)));
  return GMNode::special(std::move(ms), std::move(kids));
}

GMFunctional wrap(GMNode root, bool rule3) {
  GMFunctional f;
  f.coeffs = materialize_gm(root);
  f.root = std::move(root);
  f.uses_rule3 = rule3;
  return f;
}

}  // namespace

TEST_CASE("formation trees materialize exactly and validate structurally") {
  auto sys = ParameterSystem::toy();

  GMNode avg = GMNode::average(
      {GMNode::atom(1, mpq_class(1)), GMNode::atom(2, mpq_class(-1))});
  check_gm_node(avg, *sys);
  SymVector v = materialize_gm(avg);
  REQUIRE(v.coords().size() == 2);
  // each coordinate is +-1/f(2), irrational but certified
  CHECK(within(v.coords().begin()->second.eval(192), "0.63092975357",
               "0.63092975358"));

  GMNode cvx = GMNode::convex(
      {mpq_class(1, 2), mpq_class(-1, 2)},
      {GMNode::atom(1, mpq_class(1)), GMNode::atom(3, mpq_class(1))});
  check_gm_node(cvx, *sys);
  CHECK(materialize_gm(cvx).coords().size() == 2);

  GMNode res = GMNode::restrict_to(2, 5, avg);
  check_gm_node(res, *sys);
  SymVector rv = materialize_gm(res);
  REQUIRE(rv.coords().size() == 1);
  CHECK(rv.coords().begin()->first == 2);

  CHECK_THROWS_AS(check_gm_node(GMNode::atom(1, mpq_class(2)), *sys),
                  std::domain_error);
  CHECK_THROWS_AS(check_gm_node(GMNode::atom(0, mpq_class(1)), *sys),
                  std::domain_error);
  CHECK_THROWS_AS(
      check_gm_node(GMNode::convex({mpq_class(3, 4), mpq_class(1, 2)},
                                   {GMNode::atom(1, mpq_class(1)),
                                    GMNode::atom(2, mpq_class(1))}),
                    *sys),
      std::domain_error);
  // averages demand successive supports
  CHECK_THROWS_AS(check_gm_node(GMNode::average({GMNode::atom(2, mpq_class(1)),
                                                 GMNode::atom(1, mpq_class(1))}),
                                *sys),
                  std::domain_error);
  // the head group size must be the designated index-set member
  CHECK_THROWS_AS(check_gm_node(flat_special({8}), *sys), std::domain_error);
}

TEST_CASE("the norm witness is itself a norming functional") {
  auto sys = ParameterSystem::toy();
  FiniteVector avg2 = FiniteVector::parse("1:1 2:1");
  GMFunctional w = sgm::witness_functional(avg2, 192);
  CHECK(w.describe() == "avg2(1*e1,1*e2)");
  CHECK(w.depth == 1);
  CHECK(!w.uses_rule3);
  check_gm_node(w.root, *sys);
  Interval pairing = sym_pairing(w.coeffs, avg2).eval(192);
  CHECK(within(pairing, "1.2618595071", "1.2618595072"));
}

TEST_CASE("certified lower bounds inject the dynamic-program witness") {
  auto sys = ParameterSystem::toy();
  sgm::GMLower lo =
      sgm::gm_lower_bound(FiniteVector::parse("1:1 2:1"), 1, GMBudget{}, *sys, 192);
  CHECK(within(lo.value, "1.2618595071", "1.2618595072"));
  CHECK(lo.enumerated == 28);
  CHECK(!lo.witness_injected);
  CHECK(lo.witness.describe() == "avg2(1*e1,1*e2)");

  sgm::GMLower dec = sgm::gm_lower_bound(
      FiniteVector::parse("1:1 2:1/2 3:1/4 4:1/8"), 1, GMBudget{}, *sys, 192);
  CHECK(dec.value.exact());
  CHECK(dec.value.contains_q(mpq_class(1)));
  CHECK(dec.witness.describe() == "1*e1");
}

TEST_CASE("upper bounds combine the base norm with the index-set sum") {
  auto sys = ParameterSystem::toy();
  sgm::GMUpper u1 = sgm::gm_upper_bound(FiniteVector::parse("1:1"), *sys, 192);
  CHECK(within(u1.value, "2.5928571428", "2.5928571429"));  // 1 + 223/140
  CHECK(u1.s_part.contains_q(mpq_class(1)));
  CHECK(u1.split == 1);
  CHECK(u1.exact_members == 0);
  CHECK(u1.remainder.is_zero());
  REQUIRE(u1.rows.size() == 6);
  for (std::size_t t = 1; t <= 6; ++t)
    CHECK(row_named(u1.rows, "gm-upper member t=" + std::to_string(t)).verdict ==
          Verdict::pass);

  FiniteVector flat5 = FiniteVector::parse("1:1 2:1 3:1 4:1 5:1");
  sgm::GMUpper u5 = sgm::gm_upper_bound(flat5, *sys, 192);
  CHECK(within(u5.value, "9.1604092576", "9.1604092577"));
  CHECK(within(u5.s_part, "1.9342640361", "1.9342640362"));
  CHECK(u5.split == 5);
  CHECK(u5.exact_members == 1);
  CHECK(row_named(u5.rows, "gm-upper member t=1").rhs == "exact l-norm, l = 3");
}

TEST_CASE("upper bounds at canonical scale stay within one part in 256") {
  auto sys = ParameterSystem::honest();
  sgm::GMUpper u = sgm::gm_upper_bound(FiniteVector::parse("1:1"), *sys, 192);
  CHECK(within(u.value, "1.0039062500", "1.0039062501"));
  REQUIRE(u.rows.size() == 7);
  CHECK(row_named(u.rows, "gm-upper remainder").verdict == Verdict::pass);
  CHECK(mpfr_zero_p(u.remainder.lo()));
  // the unmaterialized tail is bounded by 1/f of an astronomically large index
  mpfr_t tiny;
  mpfr_init2(tiny, 64);
  mpfr_set_str(tiny, "1e-1000", 10, MPFR_RNDU);
  CHECK(mpfr_cmp(u.remainder.hi(), tiny) < 0);
  mpfr_clear(tiny);
}

TEST_CASE("special combinations decompose into registry-indexed parts") {
  auto sys = ParameterSystem::toy();

  // one head group only: everything lands in the ball part
  GMFunctional one = wrap(flat_special({7}), true);
  check_gm_node(one.root, *sys);
  sgm::SGMDecomposition d1 = sgm_decompose(one, *sys);
  CHECK(d1.reconstruction == Verdict::pass);
  CHECK(d1.supports == Verdict::pass);
  CHECK(d1.parts.empty());
  CHECK(d1.audit.size() == 2);

  // head 31 then a sigma-assigned group of size 7, restricted to [10, 60]
  GMFunctional two = wrap(flat_special({31, 7}), true);
  check_gm_node(two.root, *sys);
  GMFunctional cut = wrap(GMNode::restrict_to(10, 60, two.root), true);
  sgm::SGMDecomposition d2 = sgm_decompose(cut, *sys);
  CHECK(d2.reconstruction == Verdict::pass);
  CHECK(d2.supports == Verdict::pass);
  REQUIRE(d2.parts.size() == 1);
  CHECK(d2.parts.begin()->first == 7);
  CHECK(d2.parts.begin()->second.min_index() == 32);
  CHECK(d2.parts.begin()->second.max_index() == 38);
  REQUIRE(d2.part_scales.size() == 1);
  REQUIRE(d2.part_scales.begin()->second.size() == 1);
  Interval mass = abs_i(d2.part_scales.begin()->second[0].eval(192));
  CHECK(within(mass, "0.794310867", "0.794310868"));  // 1/sqrt(f(2))
  CHECK(row_named(d2.audit, "sgm-reconstruction").verdict == Verdict::pass);
  CHECK(row_named(d2.audit, "sgm-support T0").verdict == Verdict::pass);
  CHECK(row_named(d2.audit, "sgm-support T_7").verdict == Verdict::pass);
  CHECK(row_named(d2.audit, "sgm-aco T_7").verdict == Verdict::pass);

  // the validation above registered the head sequence: end index 31
  auto recs = J_of_interval(1, 100, *sys);
  REQUIRE(recs.size() == 1);
  CHECK(recs[0].position == 1);
  CHECK(recs[0].end_index == 31);
  CHECK(recs[0].support_size == 31);
  CHECK(J_of_interval(32, 100, *sys).empty());

  auto fresh = ParameterSystem::toy();
  CHECK(J_of_interval(1, 100, *fresh).empty());
}

TEST_CASE("enumeration emits rule-3 functionals only for surrogate systems") {
  auto sys = ParameterSystem::toy();
  GMBudget budget;
  budget.max_special_ell = 2;
  auto fs = enumerate_gm(2, 1, 45, budget, *sys);
  CHECK(fs.size() == budget.max_emit);
  std::vector<std::string> specials;
  for (const auto& f : fs)
    if (f.uses_rule3) specials.push_back(f.describe());
  REQUIRE(specials.size() == 2);
  CHECK(specials[0] == "spc(m1=7;7 kids)");
  CHECK(specials[1] == "spc(m1=31,m2=7;38 kids)");
  for (std::size_t i = 0; i < 50; ++i) check_gm_node(fs[i].root, *sys);

  auto hon = ParameterSystem::honest();
  auto hs = enumerate_gm(1, 1, 8, GMBudget{}, *hon);
  CHECK(!hs.empty());
  CHECK(std::none_of(hs.begin(), hs.end(),
                     [](const GMFunctional& f) { return f.uses_rule3; }));
}

TEST_CASE("the spreading gap tightens once registry positions retire") {
  auto sys = ParameterSystem::toy();
  std::vector<mpq_class> lam = {mpq_class(1), mpq_class(1)};

  sgm::SpreadingGap g1 = spreading_gap(lam, 1, *sys, 192);
  CHECK(within(g1.coarse_bound, "3.1857142857", "3.1857142858"));
  CHECK(within(g1.registry_bound, "1.3523809523", "1.3523809524"));
  CHECK(within(g1.s_norm_base, "1.2618595071", "1.2618595072"));
  CHECK(within(g1.width, "3.1857142857", "3.1857142858"));
  REQUIRE(g1.placement.size() == 2);
  CHECK(g1.placement[0] == 1);
  CHECK(g1.placement[1] == 2);
  CHECK(row_named(g1.rows, "spreading-coarse-bound").verdict == Verdict::pass);
  CHECK(row_named(g1.rows, "spreading-registry-bound N=1").verdict ==
        Verdict::pass);
  CHECK(row_named(g1.rows, "spreading-width").verdict == Verdict::pass);

  // before any registration the refinement cannot drop a position
  sgm::SpreadingGap g50 = spreading_gap(lam, 50, *sys, 192);
  CHECK(within(g50.registry_bound, "1.3523809523", "1.3523809524"));

  // registering a sequence that dies at index 31 retires its position for
  // copies placed at 50 and beyond
  check_gm_node(flat_special({31, 7}), *sys);
  sgm::SpreadingGap g50r = spreading_gap(lam, 50, *sys, 192);
  CHECK(within(g50r.registry_bound, "0.68571428571", "0.68571428572"));
  sgm::SpreadingGap g1r = spreading_gap(lam, 1, *sys, 192);
  CHECK(within(g1r.registry_bound, "1.3523809523", "1.3523809524"));

  CHECK_THROWS_AS(spreading_gap(lam, 0, *sys, 192), std::domain_error);
}

TEST_CASE("the spreading gap at canonical scale is provably tiny") {
  auto sys = ParameterSystem::honest();
  std::vector<mpq_class> lam = {mpq_class(1), mpq_class(1)};
  sgm::SpreadingGap g = spreading_gap(lam, 1, *sys, 192);
  CHECK(within(g.coarse_bound, "0.0078125", "0.0078125001"));
  CHECK(within(g.width, "0.0078124999", "0.0078125001"));
  CHECK(mpfr_zero_p(g.registry_bound.lo()));
  mpfr_t tiny;
  mpfr_init2(tiny, 64);
  mpfr_set_str(tiny, "1e-1000", 10, MPFR_RNDU);
  CHECK(mpfr_cmp(g.registry_bound.hi(), tiny) < 0);
  mpfr_clear(tiny);
  for (const CheckRow& row : g.rows) CHECK(row.verdict == Verdict::pass);
}
