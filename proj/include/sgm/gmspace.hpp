#pragma once
// Depth-bounded evaluation of the GM norming set.  Functionals are formation
// trees built from three rules applied to interval restrictions of previously
// formed functionals:
//
//   1. convex combinations  sum alpha_i z*_i  with  sum |alpha_i| <= 1,
//   2. averages  (1/f(l)) sum z*_i  over successive z*_1 < ... < z*_l,
//   3. special combinations  (1/sqrt(f(l))) sum z*_i  whose groups
//      z*_i = (1/f(m_i)) sum_j z*_{i,j}  have rational coordinates, group
//      sizes m_1 = j_{2l} (a member of the lacunary set) and
//      m_{i+1} = sigma(z*_1..z*_i) from the registry.
//
// Every materialized functional carries exact symbolic coefficients, so the
// decomposition identity of each into an S*-ball part T_0 plus parts T_j
// indexed by registry values is decidable coordinate by coordinate.

#include "sgm/certificate.hpp"
#include "sgm/interval.hpp"
#include "sgm/params.hpp"
#include "sgm/snorm.hpp"
#include "sgm/symbolic.hpp"
#include "sgm/vector.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace sgm {

enum class GMKind { Atom, Restrict, Convex, Average, Special };

struct GMNode {
  GMKind kind = GMKind::Atom;
  // Atom: weight * e*_index with |weight| <= 1
  std::uint64_t index = 0;
  mpq_class weight = 0;
  // Restrict: the interval [lo, hi], one child
  std::uint64_t lo = 0, hi = 0;
  // Convex: one coefficient per child, sum of |alphas| <= 1
  std::vector<mpq_class> alphas;
  // Special: group sizes m_1, ..., m_l; children stored flat in group order
  std::vector<std::uint64_t> ms;
  std::vector<GMNode> kids;

  static GMNode atom(std::uint64_t n, const mpq_class& w);
  static GMNode restrict_to(std::uint64_t lo, std::uint64_t hi, GMNode kid);
  static GMNode convex(std::vector<mpq_class> alphas, std::vector<GMNode> kids);
  static GMNode average(std::vector<GMNode> kids);
  static GMNode special(std::vector<std::uint64_t> ms, std::vector<GMNode> kids);
};

struct GMFunctional {
  GMNode root;
  SymVector coeffs;           // exact materialization
  size_t depth = 0;           // formation depth (atoms at depth 0)
  bool uses_rule3 = false;    // labeled: only emitted by surrogate systems
  std::string describe() const;
};

// exact coefficient vector of a formation tree (no validation)
SymVector materialize_gm(const GMNode& n);

// structural validation against the system (throws std::domain_error):
// convex mass, successiveness, group sizes, the j_{2l} head rule, the sigma
// rule for subsequent group sizes, and rationality of special groups
void check_gm_node(const GMNode& n, const ParameterSystem& sys);

struct GMBudget {
  std::uint64_t max_ell = 3;       // cap for rule-2 average length
  std::size_t max_emit = 4096;     // overall emission cap
  std::size_t max_special_ell = 1; // rule-3 outer length cap (surrogate only)
  bool halves = true;              // include +-1/2 in the atom coefficient grid
  bool restrictions = true;        // emit window-halving restrictions (rule 1)
};

// a sound finite subset of the depth-k norming set over the support window;
// rule 3 is only emitted when the system is a surrogate (labeled uses_rule3)
std::vector<GMFunctional> enumerate_gm(std::size_t depth, std::uint64_t wlo,
                                       std::uint64_t whi, const GMBudget& budget,
                                       const ParameterSystem& sys);

// the norm dynamic program's optimal functional as a formation tree
// (averages and atoms only), giving the certified S-norm lower bound
GMFunctional witness_functional(const FiniteVector& x, mpfr_prec_t prec = 128);

struct GMLower {
  Interval value{128};        // best pairing; .lo is the certified lower bound
  GMFunctional witness;
  std::size_t enumerated = 0;
  bool witness_injected = false;  // true when the DP witness won
};
GMLower gm_lower_bound(const FiniteVector& x, std::size_t depth,
                       const GMBudget& budget, const ParameterSystem& sys,
                       mpfr_prec_t prec = 128);

struct GMUpper {
  Interval value{128};       // ||x||_S + sum over J of ||x||_l, outward
  Interval s_part{128};
  Interval j_part{128};
  std::uint64_t split = 0;   // members below this support size use exact norms
  std::size_t exact_members = 0;
  Interval remainder{128};   // beyond-materialized tail (zero for surrogates)
  std::vector<CheckRow> rows;
};
GMUpper gm_upper_bound(const FiniteVector& x, const ParameterSystem& sys,
                       mpfr_prec_t prec = 128);

// registry values whose defining sequence ends inside [lo, hi): strict on the
// right boundary
std::vector<SigmaRecord> J_of_interval(std::uint64_t lo, std::uint64_t hi,
                                       const ParameterSystem& sys);
std::vector<SigmaRecord> J_of_functional(const GMFunctional& f,
                                         const ParameterSystem& sys);

// decomposition of a functional into an S*-ball part plus parts indexed by
// registry values, following the three formation cases; reconstruction is an
// exact symbolic identity and part index sets merge disjointly except under
// convex combination
struct SGMDecomposition {
  SymVector T0;
  std::map<std::uint64_t, SymVector> parts;
  // aco certificates: per part, the scaling coefficients of the base
  // (1/f(j))-averages it combines; their absolute sum must stay <= 1
  std::map<std::uint64_t, std::vector<SymCoeff>> part_scales;
  std::vector<CheckRow> audit;
  Verdict reconstruction = Verdict::unknown;
  Verdict supports = Verdict::unknown;
};
SGMDecomposition sgm_decompose(const GMFunctional& f, const ParameterSystem& sys);

struct SpreadingGap {
  Interval coarse_bound{128};    // k max|lambda| * (total 1/f over the index set)
  Interval registry_bound{128};  // registered-and-unused refinement, monotone in N
  Interval s_norm_base{128};     // norm of the unshifted vector
  Interval upper_shifted{128};   // sandwich upper bound for the shifted copy
  Interval width{128};           // upper_shifted - s_norm_base lower
  std::vector<std::uint64_t> placement;
  std::vector<CheckRow> rows;
};
// gap between the shifted-vector sandwich and the base norm: the analytic
// bound k max|lambda_i| sum_{l in J([N,inf))} 1/f(l) in rigorous arithmetic,
// plus the measured width for the copy placed at N, N+1, ...
SpreadingGap spreading_gap(const std::vector<mpq_class>& lambdas, std::uint64_t N,
                           const ParameterSystem& sys, mpfr_prec_t prec = 128);

}  // namespace sgm
