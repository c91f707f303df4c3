#include "sgm/snorm.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

#ifdef SGM_HAVE_OPENMP
#include <omp.h>
#endif

namespace sgm {

std::vector<Interval> magnitudes(const FiniteVector& x, mpfr_prec_t prec) {
  std::vector<Interval> out;
  out.reserve(x.support_size());
  for (auto& c : x.coords()) out.push_back(Interval::from_q(abs(c.second), prec));
  return out;
}

SNormDP::SNormDP(std::vector<Interval> mags, mpfr_prec_t work_prec, bool witness)
    : m_(mags.size()), wp_(work_prec), witness_(witness) {
  if (m_ > kMaxDPSupport)
    throw std::domain_error("support too large for the certified DP (cap " +
                            std::to_string(kMaxDPSupport) + ")");
  mags_.reserve(m_);
  for (auto& g : mags) {
    if (mpfr_sgn(g.lo()) < 0)
      throw std::domain_error("norm DP expects nonnegative magnitudes");
    mags_.push_back(round_to(g, wp_));
  }
  invf_.assign(m_ + 1, Interval(wp_));
  for (size_t k = 2; k <= m_; k++) invf_[k] = recip(f_of_ui(k, wp_));
  if (m_ == 0) return;
  size_t cells = m_ * (m_ + 1) / 2;
  N_.assign(cells, Interval(wp_));
  B_.resize(cells);
  if (witness_) {
    split_.resize(cells);
    nchoice_k_.assign(cells, 0);
    nchoice_t_.assign(cells, 0);
  }
  for (size_t b = 0; b < m_; b++)
    for (size_t a = 0; a <= b; a++) {
      size_t len = b - a + 1;
      if (len >= 2) {
        B_[tri(a, b)].assign(len - 1, Interval(wp_));
        if (witness_) split_[tri(a, b)].assign(len - 1, 0);
      }
    }
  fill();
}

const Interval& SNormDP::best_sum(size_t k, size_t a, size_t b) const {
  if (k == 1) return N_[tri(a, b)];
  return B_[tri(a, b)][k - 2];
}

size_t SNormDP::split_at(size_t k, size_t a, size_t b) const {
  return split_[tri(a, b)][k - 2];
}

std::vector<std::pair<size_t, size_t>> SNormDP::k_split(size_t k, size_t a, size_t b) const {
  std::vector<std::pair<size_t, size_t>> parts;
  while (k > 1) {
    size_t c = split_at(k, a, b);
    parts.push_back({c + 1, b});
    b = c;
    k--;
  }
  parts.push_back({a, b});
  std::reverse(parts.begin(), parts.end());
  return parts;
}

void SNormDP::fill() {
  for (size_t len = 1; len <= m_; len++) {
    const long n_windows = static_cast<long>(m_ - len + 1);
#ifdef SGM_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic, 4) if (m_ >= 28 && len >= 2)
#endif
    for (long aa = 0; aa < n_windows; aa++) {
      size_t a = static_cast<size_t>(aa);
      size_t b = a + len - 1;
      size_t t = tri(a, b);
      Interval scratch(wp_);
      // sup part: pointwise max of magnitudes, argmax-by-lo for the witness
      Interval cur = mags_[a];
      size_t sup_pos = a;
      for (size_t p = a + 1; p <= b; p++) {
        if (mpfr_cmp(mags_[p].lo(), mags_[sup_pos].lo()) > 0) sup_pos = p;
        max_into(cur, cur, mags_[p]);
      }
      int ch_k = 0;
      for (size_t k = 2; k <= len; k++) {
        Interval& acc = B_[t][k - 2];
        std::uint32_t best_c = 0;
        bool first = true;
        for (size_t c = a + k - 2; c + 1 <= b; c++) {
          const Interval& left = (k == 2) ? N_[tri(a, c)] : B_[tri(a, c)][k - 3];
          add_into(scratch, left, N_[tri(c + 1, b)]);
          if (first) {
            set_interval(acc, scratch);
            best_c = static_cast<std::uint32_t>(c);
            first = false;
          } else {
            if (mpfr_cmp(scratch.lo(), acc.lo()) > 0) best_c = static_cast<std::uint32_t>(c);
            max_into(acc, acc, scratch);
          }
        }
        if (witness_) split_[t][k - 2] = best_c;
        // candidate (1/f(k)) * best k-part sum
        mpfr_mul(scratch.lo_mut(), acc.lo(), invf_[k].lo(), MPFR_RNDD);
        mpfr_mul(scratch.hi_mut(), acc.hi(), invf_[k].hi(), MPFR_RNDU);
        if (mpfr_cmp(scratch.lo(), cur.lo()) >= 0) ch_k = static_cast<int>(k);
        max_into(cur, cur, scratch);
      }
      N_[t] = cur;
      if (witness_) {
        nchoice_k_[t] = ch_k;
        nchoice_t_[t] = static_cast<std::uint32_t>(sup_pos);
      }
    }
  }
}

Interval s_norm_mags(const std::vector<Interval>& mags, mpfr_prec_t prec) {
  if (mags.empty()) return Interval(prec);
  SNormDP dp(mags, prec + kGuardBits, false);
  return round_to(dp.full_norm(), prec);
}

Interval s_norm(const FiniteVector& x, mpfr_prec_t prec) {
  return s_norm_mags(magnitudes(x, prec + kGuardBits), prec);
}

static Interval ell_from_dp(const SNormDP& dp, std::uint64_t l, mpfr_prec_t prec) {
  size_t m = dp.m();
  mpfr_prec_t wp = dp.work_prec();
  size_t kmax = std::min<std::uint64_t>(l, m);
  Interval best = dp.best_sum(1, 0, m - 1);
  for (size_t k = 2; k <= kmax; k++) best = max_i(best, dp.best_sum(k, 0, m - 1));
  Interval invfl = recip(f_of_ui(l, wp));
  return round_to(mul(best, invfl), prec);
}

Interval ell_norm_mags(const std::vector<Interval>& mags, std::uint64_t l, mpfr_prec_t prec) {
  if (l < 1) throw std::domain_error("l-norm requires l >= 1");
  if (mags.empty()) return Interval(prec);
  SNormDP dp(mags, prec + kGuardBits, false);
  return ell_from_dp(dp, l, prec);
}

Interval ell_norm(const FiniteVector& x, std::uint64_t l, mpfr_prec_t prec) {
  return ell_norm_mags(magnitudes(x, prec + kGuardBits), l, prec);
}

TailNormResult tail_norm(const FiniteVector& x, const mpq_class& r, mpfr_prec_t prec) {
  if (r < 2) throw std::domain_error("tail norm requires r >= 2");
  mpz_class lc;
  mpz_cdiv_q(lc.get_mpz_t(), r.get_num().get_mpz_t(), r.get_den().get_mpz_t());
  if (!lc.fits_ulong_p()) throw std::domain_error("tail norm threshold too large");
  std::uint64_t l0 = lc.get_ui();
  TailNormResult res;
  res.witness_l = l0;
  if (x.empty()) {
    res.value = Interval(prec);
    return res;
  }
  size_t m = x.support_size();
  SNormDP dp(magnitudes(x, prec + kGuardBits), prec + kGuardBits, false);
  // for l >= #supp the value is ||x||_1 / f(l), strictly decreasing in l,
  // so the scan can stop at max(l0, m)
  std::uint64_t l1 = std::max<std::uint64_t>(l0, m);
  Interval best = ell_from_dp(dp, l0, prec);
  for (std::uint64_t l = l0 + 1; l <= l1; l++) {
    Interval v = ell_from_dp(dp, l, prec);
    if (mpfr_cmp(v.lo(), best.lo()) > 0) res.witness_l = l;
    best = max_i(best, v);
  }
  res.value = best;
  return res;
}

PartitionWitness best_partition(const FiniteVector& x, std::uint64_t l, mpfr_prec_t prec) {
  if (l < 1) throw std::domain_error("best_partition requires l >= 1");
  PartitionWitness w;
  w.slots = l;
  w.value = Interval(prec);
  if (x.empty()) return w;
  size_t m = x.support_size();
  SNormDP dp(magnitudes(x, prec + kGuardBits), prec + kGuardBits, true);
  size_t kmax = std::min<std::uint64_t>(l, m);
  // ties prefer larger k (iterate ascending, replace on >=)
  size_t kbest = 1;
  Interval best = dp.best_sum(1, 0, m - 1);
  for (size_t k = 2; k <= kmax; k++) {
    const Interval& c = dp.best_sum(k, 0, m - 1);
    if (mpfr_cmp(c.lo(), best.lo()) >= 0) kbest = k;
    best = max_i(best, c);
  }
  auto pos_parts = dp.k_split(kbest, 0, m - 1);
  for (auto& p : pos_parts)
    w.parts.push_back({x.coords()[p.first].first, x.coords()[p.second].first});
  w.value = round_to(mul(best, recip(f_of_ui(l, dp.work_prec()))), prec);
  return w;
}

Interval eval_partition(const FiniteVector& x, const PartitionWitness& w, mpfr_prec_t prec) {
  if (w.parts.empty()) return Interval(prec);
  mpfr_prec_t wp = prec + kGuardBits;
  SNormDP dp(magnitudes(x, wp), wp, false);
  // locate part boundaries as support positions and re-sum left to right, in
  // the same association order as the DP accumulator
  Interval acc(wp);
  bool first = true;
  for (auto& part : w.parts) {
    size_t a = 0, b = 0;
    bool found_a = false;
    for (size_t i = 0; i < x.coords().size(); i++) {
      if (x.coords()[i].first == part.first) {
        a = i;
        found_a = true;
      }
      if (x.coords()[i].first == part.second) b = i;
    }
    if (!found_a) throw std::domain_error("witness part does not start on the support");
    if (first) {
      acc = dp.block_norm(a, b);
      first = false;
    } else {
      Interval t(wp);
      add_into(t, acc, dp.block_norm(a, b));
      acc = t;
    }
  }
  return round_to(mul(acc, recip(f_of_ui(w.slots, wp))), prec);
}

namespace {

struct BruteCtx {
  const std::vector<Interval>* mags;
  std::vector<Interval> invf;
  mpfr_prec_t wp;
};

Interval brute_block(const BruteCtx& ctx, size_t a, size_t b);

Interval brute_best_k_sum(const BruteCtx& ctx, size_t a, size_t b, size_t k) {
  if (k == 1) return brute_block(ctx, a, b);
  Interval best(ctx.wp);
  bool first = true;
  for (size_t c = a; c + k - 1 <= b; c++) {
    Interval cand = add(brute_block(ctx, a, c), brute_best_k_sum(ctx, c + 1, b, k - 1));
    best = first ? cand : max_i(best, cand);
    first = false;
  }
  return best;
}

Interval brute_block(const BruteCtx& ctx, size_t a, size_t b) {
  Interval best = (*ctx.mags)[a];
  for (size_t p = a + 1; p <= b; p++) best = max_i(best, (*ctx.mags)[p]);
  size_t len = b - a + 1;
  for (size_t k = 2; k <= len; k++)
    best = max_i(best, mul(brute_best_k_sum(ctx, a, b, k), ctx.invf[k]));
  return best;
}

}  // namespace

Interval brute_force_norm(const FiniteVector& x, mpfr_prec_t prec, size_t support_cap) {
  if (x.empty()) return Interval(prec);
  if (x.support_size() > support_cap)
    throw std::domain_error("brute-force oracle limited to support <= " +
                            std::to_string(support_cap));
  BruteCtx ctx;
  ctx.wp = prec + kGuardBits;
  auto mags = magnitudes(x, ctx.wp);
  ctx.mags = &mags;
  ctx.invf.assign(x.support_size() + 1, Interval(ctx.wp));
  for (size_t k = 2; k <= x.support_size(); k++) ctx.invf[k] = recip(f_of_ui(k, ctx.wp));
  return round_to(brute_block(ctx, 0, x.support_size() - 1), prec);
}

}  // namespace sgm
