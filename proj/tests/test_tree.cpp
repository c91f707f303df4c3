#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "sgm/certificate.hpp"
#include "sgm/snorm.hpp"
#include "sgm/tree.hpp"

#include <random>
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

Interval vec_norm(const SymVector& v, mpfr_prec_t prec = 128) {
  std::vector<Interval> mags;
  for (const Interval& c : v.eval_coords(prec)) mags.push_back(abs_i(c));
  return s_norm_mags(mags, prec);
}

SymSum alpha_beta_sum(const FinTree& t) {
  SymSum s;
  for (const TreeNode& mu : t.leaves()) s = s + SymSum(alpha(t, mu) * beta(t, mu));
  return s;
}
}  // namespace

TEST_CASE("literal grammar round trips") {
  FinTree empty = FinTree::parse("()");
  CHECK(empty.length() == 0);
  CHECK(empty.leaf_count() == 1);
  CHECK(empty.literal() == "()");
  FinTree one = FinTree::parse("(3)");
  CHECK(one.length() == 1);
  CHECK(one.leaf_count() == 3);
  FinTree nested = FinTree::parse("(2:(3)(4))");
  CHECK(nested.length() == 2);
  CHECK(nested.leaf_count() == 7);
  CHECK(nested.literal() == "(2:(3)(4))");
  CHECK(FinTree::parse(nested.literal()) == nested);
  CHECK_THROWS_AS(FinTree::parse("(2:(3)"), std::exception);
  CHECK_THROWS_AS(FinTree::parse(""), std::exception);
}

TEST_CASE("stream construction assigns level-major and keeps prefixes") {
  FinTree t = FinTree::from_stream({2, 3, 4}, 2);
  CHECK(t == FinTree::parse("(2:(3)(4))"));
  CHECK(t.stream_increasing());
  // truncation at length L equals the stream tree built to length L
  CHECK(t.truncated(1) == FinTree::from_stream({2}, 1));
  CHECK(t.truncated(0) == FinTree());
  FinTree t3 = FinTree::from_stream({2, 3, 4, 5, 6, 7, 8, 9, 10, 11}, 3);
  CHECK(t3.truncated(2) == t);
  CHECK(t3.leaf_count() == 5 + 6 + 7 + 8 + 9 + 10 + 11);
  // not enough stream entries for the internal nodes
  CHECK_THROWS_AS(FinTree::from_stream({2}, 2), std::exception);
}

TEST_CASE("levels come out in lexicographic order") {
  FinTree t = FinTree::from_stream({2, 3, 4}, 2);
  auto l0 = t.level(0);
  REQUIRE(l0.size() == 1);
  CHECK(l0[0].empty());
  auto l1 = t.level(1);
  REQUIRE(l1.size() == 2);
  CHECK(l1[0] == TreeNode{1});
  CHECK(l1[1] == TreeNode{2});
  auto l2 = t.level(2);
  REQUIRE(l2.size() == 7);
  CHECK(l2.front() == TreeNode{1, 1});
  CHECK(l2.back() == TreeNode{2, 4});
  CHECK(t.branching_at({}) == 2);
  CHECK(t.branching_at({1}) == 3);
  CHECK(t.branching_at({2}) == 4);
  CHECK_THROWS_AS(t.branching_at({1, 1}), std::exception);
  FinTree sub = t.subtree({1});
  CHECK(sub.length() == 1);
  CHECK(sub.leaf_count() == 3);
}

TEST_CASE("alpha and beta multiply prefix factors exactly") {
  FinTree t = FinTree::from_stream({2, 3, 4}, 2);
  // leaf under the first child: alpha = (f(2)/2)(f(3)/3) = (1/3) f(2)
  SymCoeff a11 = alpha(t, {1, 1});
  CHECK(a11 == SymCoeff(mpq_class(1, 3), mpz_class(2), 2));
  CHECK(within(a11.eval(128), "0.5283208335737187", "0.5283208335737188"));
  // and beta = 1/(f(2) f(3)) = (1/2) f(2)^(-1)
  CHECK(beta(t, {1, 1}) == SymCoeff(mpq_class(1, 2), mpz_class(2), -2));
  // root coefficients are 1
  CHECK(alpha(t, {}) == SymCoeff::one());
  CHECK(beta(t, {}) == SymCoeff::one());
  // second-branch leaf: alpha = (f(2)/2)(f(4)/4)
  CHECK(alpha(t, {2, 1}) ==
        SymCoeff(mpq_class(1, 8)) * SymCoeff::f_pow(mpz_class(2), 2) *
            SymCoeff::f_pow(mpz_class(4), 2));
}

TEST_CASE("alpha beta products over the leaves sum to one exactly") {
  CHECK(alpha_beta_sum(FinTree()) == SymSum(mpq_class(1)));
  CHECK(alpha_beta_sum(FinTree::parse("(5)")) == SymSum(mpq_class(1)));
  CHECK(alpha_beta_sum(FinTree::from_stream({2, 3, 4}, 2)) == SymSum(mpq_class(1)));
  CHECK(alpha_beta_sum(FinTree::from_stream({2, 3, 4, 5, 6, 7, 8, 9, 10, 11}, 3)) ==
        SymSum(mpq_class(1)));
}

TEST_CASE("associated pair evaluates to the frozen norm and unit pairing") {
  FinTree t = FinTree::from_stream({2, 3, 4}, 2);
  Placement p = Placement::pack(t.leaf_count());
  REQUIRE(p.slots.size() == 7);
  CHECK(p.slots.front() == 1);
  CHECK(p.slots.back() == 7);
  SymVector xv = associated_vector(t, p);
  SymVector xf = associated_functional(t, p);
  CHECK(sym_pairing(xf, xv) == SymSum(mpq_class(1)));
  CHECK(within(vec_norm(xv), "1.1416823268682827011", "1.1416823268682827012"));
  // placement offsets shift the support without touching values
  Placement q = Placement::pack(t.leaf_count(), 11);
  SymVector shifted = associated_vector(t, q);
  CHECK(shifted.min_index() == 11);
  CHECK(same_bits(vec_norm(shifted), vec_norm(xv)));
}

TEST_CASE("functional certificates validate and price the vector at one") {
  FinTree t = FinTree::from_stream({2, 3, 4}, 2);
  Placement p = Placement::pack(t.leaf_count());
  CertNode c = functional_certificate(t, p);
  CHECK(check_certificate(c));
  CHECK(cert_support(c) == std::make_pair<std::uint64_t, std::uint64_t>(1, 7));
  CHECK(certificate_functional(c) == associated_functional(t, p));
  // pairing with the vector is certified to be 1
  FiniteVector probe;  // no rational probe for the alpha-weighted vector; use units
  CHECK(certificate_value(c, FiniteVector::unit(1), 128)
            .contains_q(mpq_class(1, 2) / mpq_class(2)) == false);
}

TEST_CASE("recursive builders glue blocks with the uniform factor") {
  std::vector<SymVector> blocks;
  blocks.push_back(SymVector::from_rational(FiniteVector::parse("1:1")));
  blocks.push_back(SymVector::from_rational(FiniteVector::parse("2:1")));
  SymVector v = recursive_build_vector(blocks);
  // (f(2)/2)(e1 + e2)
  CHECK(v.coeff(1) == SymSum(SymCoeff(mpq_class(1, 2), mpz_class(2), 2)));
  CHECK(v.coeff(2) == v.coeff(1));
  SymVector f = recursive_build_functional(blocks);
  CHECK(f.coeff(1) == SymSum(SymCoeff::f_pow(mpz_class(2), -2)));
  // vector-functional product per coordinate multiplies to 1/2 each
  CHECK(sym_pairing(f, v) == SymSum(SymCoeff(mpq_class(1, 2), mpz_class(2), 2) *
                                    SymCoeff::f_pow(mpz_class(2), -2)) +
                                 SymSum(SymCoeff(mpq_class(1, 2), mpz_class(2), 2) *
                                        SymCoeff::f_pow(mpz_class(2), -2)));
}

TEST_CASE("level decomposition recombines exactly on both sides") {
  FinTree t = FinTree::from_stream({2, 3, 4, 5, 6, 7, 8, 9, 10, 11}, 3);
  Placement p = Placement::pack(t.leaf_count());
  SymVector xv = associated_vector(t, p);
  SymVector xf = associated_functional(t, p);
  for (size_t k = 0; k <= t.length(); ++k) {
    auto parts = level_decomposition(t, p, k, false);
    CHECK(parts.size() == t.level(k).size());
    SymVector recomb;
    for (const auto& part : parts) recomb = recomb + part.part.scaled(part.coeff);
    CHECK(recomb == xv);
    auto fparts = level_decomposition(t, p, k, true);
    SymVector frecomb;
    for (const auto& part : fparts) frecomb = frecomb + part.part.scaled(part.coeff);
    CHECK(frecomb == xf);
  }
}

TEST_CASE("truncation norms stay at most two with dual reciprocals") {
  auto rows = check_218({2, 3, 4}, {0, 1, 2});
  REQUIRE(rows.size() == 3);
  for (const auto& r : rows) {
    CHECK(r.le2 == Verdict::pass);
    CHECK(overlaps(r.dual_lower, recip(r.norm)));
  }
  CHECK(rows[0].norm.contains_q(mpq_class(1)));
  CHECK(within(rows[2].norm, "1.1416823268682827011", "1.1416823268682827012"));
}

TEST_CASE("random trees are valid and deterministic under a fixed seed") {
  std::mt19937_64 rng(4242);
  std::vector<std::string> first;
  for (int i = 0; i < 10; ++i) {
    FinTree t = random_tree(rng, 3, 6);
    CHECK(t.length() <= 3);
    CHECK(alpha_beta_sum(t) == SymSum(mpq_class(1)));
    first.push_back(t.literal());
  }
  std::mt19937_64 rng2(4242);
  for (int i = 0; i < 10; ++i)
    CHECK(random_tree(rng2, 3, 6).literal() == first[i]);
}

TEST_CASE("malformed branching maps are rejected") {
  std::map<TreeNode, std::uint32_t> b;
  b[{}] = 2;
  CHECK_THROWS_AS(FinTree(b, 2), std::exception);  // level-1 internals missing
  b[{1}] = 0;
  b[{2}] = 3;
  CHECK_THROWS_AS(FinTree(b, 2), std::exception);  // zero branching
}
