#pragma once
// Structural certificates for membership in the dual unit ball: a formation
// tree whose leaves are weighted basis functionals w * e*_i with |w| <= 1 and
// whose internal nodes combine k successive-support children with the factor
// 1/f(k).  Validity is purely structural (no norm computation) and implies
// that the represented functional has dual norm at most 1, so its pairing
// with any x is a certified lower bound for the norm of x.

#include "sgm/interval.hpp"
#include "sgm/symbolic.hpp"
#include "sgm/vector.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace sgm {

struct CertNode {
  // leaf when kids empty: the functional weight * e*_index
  std::uint64_t index = 0;
  mpq_class weight = 0;
  std::vector<CertNode> kids;

  bool leaf() const { return kids.empty(); }
};

// support window [lo, hi] of the functional the node represents
std::pair<std::uint64_t, std::uint64_t> cert_support(const CertNode& n);

// true iff every internal node combines nonempty successive-support children;
// throws on malformed input (|weight| > 1 on a leaf, zero-index leaf)
bool check_certificate(const CertNode& n);

// exact symbolic value of the functional applied to x
SymSum certificate_apply(const CertNode& n, const FiniteVector& x);

// enclosure of the functional applied to x
Interval certificate_value(const CertNode& n, const FiniteVector& x, mpfr_prec_t prec = 128);

// the functional itself, coordinate by coordinate
SymVector certificate_functional(const CertNode& n);

// extract a certificate from the norm DP witness tables: pairing with x
// reproduces the certified lower norm bound (up to directed rounding)
CertNode norm_certificate(const FiniteVector& x, mpfr_prec_t prec = 128);

std::string cert_str(const CertNode& n);

}  // namespace sgm
