#include "sgm/certificate.hpp"

#include "sgm/snorm.hpp"

#include <stdexcept>

namespace sgm {

std::pair<std::uint64_t, std::uint64_t> cert_support(const CertNode& n) {
  if (n.leaf()) return {n.index, n.index};
  auto lo = cert_support(n.kids.front());
  auto hi = cert_support(n.kids.back());
  return {lo.first, hi.second};
}

bool check_certificate(const CertNode& n) {
  if (n.leaf()) {
    if (n.index == 0) throw std::domain_error("certificate leaf needs index >= 1");
    if (abs(n.weight) > 1) throw std::domain_error("certificate leaf weight exceeds 1");
    return true;
  }
  if (n.weight != 0)
    throw std::domain_error("certificate internal node carries a leaf weight");
  for (auto& kid : n.kids)
    if (!check_certificate(kid)) return false;
  for (size_t i = 0; i + 1 < n.kids.size(); i++)
    if (cert_support(n.kids[i]).second >= cert_support(n.kids[i + 1]).first) return false;
  return true;
}

SymSum certificate_apply(const CertNode& n, const FiniteVector& x) {
  if (n.leaf()) return SymSum(SymCoeff(n.weight * x.coeff(n.index)));
  SymSum s;
  for (auto& kid : n.kids) s = s + certificate_apply(kid, x);
  return s * SymCoeff::f_pow(mpz_class(static_cast<unsigned long>(n.kids.size())), -2);
}

Interval certificate_value(const CertNode& n, const FiniteVector& x, mpfr_prec_t prec) {
  mpfr_prec_t wp = prec + kGuardBits;
  struct Rec {
    const FiniteVector& x;
    mpfr_prec_t wp;
    Interval run(const CertNode& n) const {
      if (n.leaf()) return Interval::from_q(n.weight * x.coeff(n.index), wp);
      Interval acc(wp);
      for (auto& kid : n.kids) {
        Interval t(wp);
        add_into(t, acc, run(kid));
        acc = t;
      }
      return mul(acc, recip(f_of_ui(n.kids.size(), wp)));
    }
  } rec{x, wp};
  return round_to(rec.run(n), prec);
}

SymVector certificate_functional(const CertNode& n) {
  if (n.leaf()) {
    SymVector v;
    v.set(n.index, SymSum(SymCoeff(n.weight)));
    return v;
  }
  SymVector s;
  for (auto& kid : n.kids) s = s + certificate_functional(kid);
  return s.scaled(SymCoeff::f_pow(mpz_class(static_cast<unsigned long>(n.kids.size())), -2));
}

namespace {

CertNode witness_node(const SNormDP& dp, const FiniteVector& x, size_t a, size_t b) {
  int k = dp.choice_k(a, b);
  if (k == 0) {
    size_t p = dp.choice_sup(a, b);
    CertNode leaf;
    leaf.index = x.coords()[p].first;
    leaf.weight = x.coords()[p].second > 0 ? 1 : -1;
    return leaf;
  }
  CertNode node;
  for (auto& part : dp.k_split(static_cast<size_t>(k), a, b))
    node.kids.push_back(witness_node(dp, x, part.first, part.second));
  return node;
}

}  // namespace

CertNode norm_certificate(const FiniteVector& x, mpfr_prec_t prec) {
  if (x.empty()) throw std::domain_error("no certificate for the zero vector");
  SNormDP dp(magnitudes(x, prec + kGuardBits), prec + kGuardBits, true);
  return witness_node(dp, x, 0, x.support_size() - 1);
}

std::string cert_str(const CertNode& n) {
  if (n.leaf()) return rational_str(n.weight) + "*e" + std::to_string(n.index) + "*";
  std::string s = "(1/f(" + std::to_string(n.kids.size()) + "))[";
  for (size_t i = 0; i < n.kids.size(); i++) {
    if (i) s += " ";
    s += cert_str(n.kids[i]);
  }
  return s + "]";
}

}  // namespace sgm
