#pragma once
// Certified evaluation of the implicitly defined norm
//
//   ||x|| = max( ||x||_inf ,  sup_{k >= 2} sup_{E_1 < ... < E_k} (1/f(k)) sum_j ||E_j x|| )
//
// with f(k) = log2(k+1), together with the slot-constrained variants
//
//   ||x||_l   = (1/f(l)) sup over at most l successive parts of sum ||E_j x||
//   |||x|||_r = sup_{l >= r} ||x||_l
//
// The supremum over successive finite sets is attained on consecutive support
// partitions (enlarging a set can only increase the inner norms), so a cubic-
// state interval dynamic program over support windows computes certified
// enclosures.  A brutally exponential reference recursion over all consecutive
// partitions is kept as the independent serial oracle.

#include "sgm/interval.hpp"
#include "sgm/vector.hpp"

#include <cstdint>
#include <memory>
#include <vector>

namespace sgm {

// extra working bits on top of the requested output precision; covers the
// rounding error of all DP arithmetic so that width <= 2^(2-p) * hi holds
inline constexpr mpfr_prec_t kGuardBits = 32;
inline constexpr size_t kMaxDPSupport = 300;

struct PartitionWitness {
  std::uint64_t slots = 0;                                  // l of the l-norm
  std::vector<std::pair<std::uint64_t, std::uint64_t>> parts;  // index windows
  Interval value{128};                                      // certified enclosure
};

struct TailNormResult {
  Interval value{128};
  std::uint64_t witness_l = 0;
};

// Dynamic-programming tables over support positions 0..m-1.  N holds block
// norms, B[t][k-2] the best sum over exactly-k-part splits of window t.
class SNormDP {
 public:
  SNormDP(std::vector<Interval> mags, mpfr_prec_t work_prec, bool witness);

  size_t m() const { return m_; }
  const Interval& block_norm(size_t a, size_t b) const { return N_[tri(a, b)]; }
  const Interval& best_sum(size_t k, size_t a, size_t b) const;  // k >= 1
  const Interval& full_norm() const { return N_[tri(0, m_ - 1)]; }

  // witness accessors (only when built with witness = true)
  int choice_k(size_t a, size_t b) const { return nchoice_k_[tri(a, b)]; }
  size_t choice_sup(size_t a, size_t b) const { return nchoice_t_[tri(a, b)]; }
  size_t split_at(size_t k, size_t a, size_t b) const;
  // best split of [a..b] into exactly k parts, as position boundaries
  std::vector<std::pair<size_t, size_t>> k_split(size_t k, size_t a, size_t b) const;

  mpfr_prec_t work_prec() const { return wp_; }

 private:
  size_t tri(size_t a, size_t b) const { return b * (b + 1) / 2 + a; }
  void fill();

  size_t m_;
  mpfr_prec_t wp_;
  bool witness_;
  std::vector<Interval> mags_;
  std::vector<Interval> invf_;                 // 1/f(k), k = 0..m (0,1 unused)
  std::vector<Interval> N_;
  std::vector<std::vector<Interval>> B_;       // per window, k = 2..len
  std::vector<std::vector<std::uint32_t>> split_;
  std::vector<int> nchoice_k_;                 // 0 = sup, else part count
  std::vector<std::uint32_t> nchoice_t_;
};

// magnitudes (absolute values as enclosures) of a rational vector, exact
std::vector<Interval> magnitudes(const FiniteVector& x, mpfr_prec_t prec);

Interval s_norm(const FiniteVector& x, mpfr_prec_t prec = 128);
Interval s_norm_mags(const std::vector<Interval>& mags, mpfr_prec_t prec);
Interval ell_norm(const FiniteVector& x, std::uint64_t l, mpfr_prec_t prec = 128);
Interval ell_norm_mags(const std::vector<Interval>& mags, std::uint64_t l, mpfr_prec_t prec);
TailNormResult tail_norm(const FiniteVector& x, const mpq_class& r, mpfr_prec_t prec = 128);
PartitionWitness best_partition(const FiniteVector& x, std::uint64_t l, mpfr_prec_t prec = 128);
// re-evaluate a witness: (1/f(l)) * sum of part norms
Interval eval_partition(const FiniteVector& x, const PartitionWitness& w, mpfr_prec_t prec = 128);

// independent exponential reference: recursion over all consecutive
// partitions, no memoization; used as the testing oracle (support <= cap)
Interval brute_force_norm(const FiniteVector& x, mpfr_prec_t prec = 128, size_t support_cap = 9);

}  // namespace sgm
