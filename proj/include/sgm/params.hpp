#pragma once
// Growth-parameter systems: the fast-growing scale sequence (k_i) with its
// rigorous growth checks, the gain function G, the cost scale C, the lacunary
// index set J (split alternately into K and L), and the injective
// special-index assignment sigma.
//
// Two presets are provided.  The "honest" system uses the true astronomical
// scales (k_1 = 2^1024, then k_{i+1} = 2^(k_i^2)); every quantity is carried
// either as a TowerReal or as a plain interval in the log2 domain, and every
// verdict is certified by directed rounding.  The "toy" system uses small
// literal scales so that downstream harnesses can exercise the same code paths
// at desk scale; checks that genuinely fail for small scales report fail.

#include "sgm/interval.hpp"
#include "sgm/tower.hpp"
#include "sgm/vector.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace sgm {

// one row of a verdict report: a named condition with enclosures of both sides
struct CheckRow {
  std::string condition;
  Verdict verdict = Verdict::unknown;
  std::string lhs;
  std::string rhs;
  std::string note;
};

struct SigmaRecord {
  std::string key;               // serialized functional sequence
  std::size_t position = 0;      // 1-based position within L
  TowerReal value;
  std::uint64_t support_size = 0;
  std::uint64_t end_index = 0;   // max support index of the defining sequence
  bool constraint_certified = false;
};

class ParameterSystem {
 public:
  // canonical huge-scale system: k_1 = 2^1024, k_{i+1} = 2^(k_i^2)
  static std::shared_ptr<ParameterSystem> honest(std::size_t count = 5,
                                                 mpfr_prec_t prec = 2304);
  // small surrogate system with literal k values
  static std::shared_ptr<ParameterSystem> toy(
      const std::vector<unsigned long>& ks = {2, 4, 16}, mpfr_prec_t prec = 192);

  // config-driven construction: rule selects the preset, the remaining fields
  // override individual knobs before the derived constants are computed
  struct Config {
    std::string rule = "toy";                 // "toy" or "honest"
    std::vector<unsigned long> ks;            // toy scales (empty = {2, 4, 16})
    std::size_t count = 5;                    // honest scale count
    mpfr_prec_t prec = 0;                     // 0 = preset default
    std::optional<mpq_class> eps_scale;       // E in eps_i = E * 2^(-i)
    std::optional<unsigned long> c_override;  // split constant (default search)
    std::optional<unsigned long> d_override;  // default 4c^3
    std::optional<std::vector<unsigned long>> Ls;  // surrogate L members
  };
  static std::shared_ptr<ParameterSystem> from_config(const Config& cfg);

  const std::string& name() const { return name_; }
  bool surrogate() const { return surrogate_; }
  mpfr_prec_t prec() const { return prec_; }

  std::size_t k_count() const { return ks_.size(); }
  const TowerReal& k(std::size_t i) const;        // 1-based
  Interval k_value(std::size_t i) const;          // plain, saturating
  const TowerReal& f_k(std::size_t i) const;      // f(k_i) as a tower
  const Interval& log2_f_k(std::size_t i) const;  // plain iff flagged below
  bool log2_f_k_plain(std::size_t i) const;
  // log2(f(k_s)/k_s), a negative plain quantity; lower endpoint may saturate
  const Interval& log2_q(std::size_t i) const;
  bool log2_q_plain(std::size_t i) const;

  mpq_class eps(std::size_t i) const;             // eps_i = E * 2^(-i)
  const mpq_class& eps_scale() const { return eps_scale_; }
  std::uint64_t L_cutoff(std::uint64_t n) const { return n + 3; }

  unsigned long c() const { return c_; }          // grid-certified split constant
  unsigned long d() const { return d_; }          // 4c^3
  const TowerReal& m0() const { return m0_; }
  // least scale at or beyond m0 where sqrt(G) certifiably reaches c
  const std::optional<TowerReal>& C_threshold() const { return threshold_; }

  std::size_t J_count() const { return J_.size(); }
  const TowerReal& J_at(std::size_t t) const;     // 1-based
  bool J_member_in_L(std::size_t t) const { return t % 2 == 0; }
  std::size_t L_count() const { return J_.size() / 2; }
  const TowerReal& L_at(std::size_t p) const;     // 1-based position in L
  // plain enclosure of 1/f(j_t) (underflow-sound for huge members)
  Interval inv_f_J(std::size_t t, mpfr_prec_t prec = 128) const;
  // sum of 1/f(l) over materialized l in J with l >= lo (enclosure)
  Interval inv_f_J_tail(const TowerReal& lo, mpfr_prec_t prec = 128) const;
  Interval inv_f_J_total(mpfr_prec_t prec = 128) const;

  // sigma: registry-backed injective assignment of functional sequences to
  // members of L subject to the support-size constraint
  //   (1/20) f(sigma^(1/40)) >= #supp of the summed sequence.
  // Strict systems throw std::runtime_error("sigma: extend L") when no
  // materialized member qualifies; surrogate systems assign anyway and mark
  // the record as not certified.
  SigmaRecord sigma(const std::vector<FiniteVector>& seq) const;
  std::vector<SigmaRecord> sigma_snapshot() const;
  std::vector<CheckRow> sigma_check() const;

 private:
  ParameterSystem() = default;
  void finish_scales();
  void init_constants();
  void build_canonical_J(std::size_t members);
  void build_surrogate_J();
  void build_surrogate_J_from(const std::vector<unsigned long>& js);

  std::string name_;
  bool surrogate_ = false;
  mpfr_prec_t prec_ = 192;
  std::vector<TowerReal> ks_;
  std::vector<TowerReal> f_ks_;
  std::vector<Interval> log2_f_ks_;
  std::vector<bool> log2_f_plain_;
  std::vector<Interval> log2_qs_;
  std::vector<bool> log2_q_plain_;
  mpq_class eps_scale_ = 2;
  unsigned long c_ = 0, d_ = 0;
  TowerReal m0_;
  std::optional<TowerReal> threshold_;
  std::vector<TowerReal> J_;
  std::vector<Interval> inv_f_J_;  // cached plain enclosures of 1/f(j_t)

  mutable std::mutex sigma_mu_;
  mutable std::map<std::string, std::size_t> sigma_index_;  // key -> record pos
  mutable std::vector<SigmaRecord> sigma_records_;
  mutable std::vector<bool> sigma_used_;  // L positions already assigned
};

// ---- growth condition checks -------------------------------------------

// growth-base: (2/3) f((3/4) f(k1)) >= 1  and  ln k1 >= 3
std::vector<CheckRow> check_growth_base(const ParameterSystem& sys);
// power-growth: f(r^a) >= (3/4) a f(r) for r > k1, a > 1; analytic sufficient
// bound f(r^a) >= a f(r) (1 - 1/ln r) (valid for r >= 2) plus a sample grid
std::vector<CheckRow> check_power_growth(const ParameterSystem& sys,
                                         std::size_t grid = 6);
// eps-budget at index j: the two-summand bound against eps_j
std::vector<CheckRow> check_eps_budget(const ParameterSystem& sys, std::size_t j);

// ---- the gain function G ------------------------------------------------

struct GainResult {
  Interval log2_value;     // plain signed enclosure of log2 G(r)
  Interval value;          // exp2 of the above (saturating)
  std::size_t argmax = 0;  // 1-based index attaining the max
  std::size_t terms = 0;   // number of terms enumerated
  Verdict cutoff = Verdict::unknown;           // tail beyond terms certified?
  Verdict within_L_cutoff = Verdict::unknown;  // argmax <= L_{floor(f(f(r)))}
};
GainResult gain_of(const TowerReal& r, const ParameterSystem& sys);

// monotonicity of G on a grid, and the subsequence comparison
std::vector<CheckRow> check_gain_monotone(const ParameterSystem& sys,
                                          const std::vector<TowerReal>& r_grid,
                                          const std::vector<std::size_t>& subseq);

// ---- m_i, the descent iterates, and the summability check ---------------

TowerReal m_of(std::size_t i, const ParameterSystem& sys);

// r_0 = r, r_{l+1} = r_l^{f(r_l)}; exact shortcuts for r = 2^t and r+1 = 2^t
std::vector<TowerReal> r_sequence(const TowerReal& r0, std::size_t count,
                                  mpfr_prec_t prec = 128);

struct GainSeriesResult {
  std::size_t bracket = 0;  // the index i with m_{i-1} <= r < m_i
  Interval lhs_prefix;      // sum over the first `terms` iterates
  Interval lhs_upper;       // prefix plus the geometric tail bound
  mpq_class rhs;            // eps budget for the bracket and beyond
  Verdict verdict = Verdict::unknown;
  std::vector<CheckRow> rows;
};
GainSeriesResult check_gain_series(const TowerReal& r, const ParameterSystem& sys,
                                   std::size_t terms = 4);

// ---- the cost scale C ---------------------------------------------------

struct CostResult {
  Interval value;        // plain enclosure (saturating)
  Interval log2_value;   // plain enclosure of log2 C
  bool below_threshold = false;
  Verdict classified = Verdict::unknown;  // threshold comparison decidable?
};
CostResult cost_of(const TowerReal& ell, const ParameterSystem& sys);

struct CostSumResult {
  Interval prefix_sum;
  Interval total_upper;  // prefix plus tail bound; +inf if tail unbounded
  Verdict verdict = Verdict::unknown;
  std::vector<CheckRow> rows;
};
CostSumResult sum_inv_cost_over_J(const ParameterSystem& sys, std::size_t prefix,
                                  const mpq_class& budget);

// ---- the lacunary set J -------------------------------------------------

std::vector<CheckRow> check_J(const ParameterSystem& sys);

}  // namespace sgm
