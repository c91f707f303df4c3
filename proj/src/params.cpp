#include "sgm/params.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace sgm {

namespace {

std::string fmt(const Interval& x) {
  return "[" + dec_lo(x, 8) + ", " + dec_hi(x, 8) + "]";
}

std::string fmt_q(const mpq_class& q) { return q.get_str(); }

bool finite_iv(const Interval& x) {
  return mpfr_number_p(x.lo()) != 0 && mpfr_number_p(x.hi()) != 0;
}

// [-log2 3, 0]: when the larger of f(r), f(k) is divided out of f(r k), the
// quotient lies in [1/3, 1] because f(r k) <= f(r) + f(k) + 1 <= 3 max and
// f(r k) >= max (f is increasing and subadditive up to the +1 term).
Interval dominance_window(mpfr_prec_t prec) {
  Interval l3 = log2_i(Interval::from_si(3, prec));
  return Interval::hull_of(neg(l3), Interval::from_si(0, prec));
}

// S = sum_{l >= 0} ((8/3) k1)^(-l/2) = 1/(1 - q) with q = ((8/3) k1)^(-1/2)
Interval geometric_sum(const Interval& k1_value, mpfr_prec_t prec) {
  Interval base = mul(round_to(k1_value, prec),
                      div(Interval::from_si(8, prec), Interval::from_si(3, prec)));
  Interval q = recip(sqrt_i(base));
  Interval one = Interval::from_si(1, prec);
  if (cmp_lt(q, one) != Verdict::pass)
    throw std::domain_error("geometric sum: ratio not certified below 1");
  return recip(sub(one, q));
}

Interval tower_log2_value(const TowerReal& t, mpfr_prec_t prec) {
  if (t.height() == 0) return log2_i(round_to(t.top(), prec));
  return tower_log2(t, prec).value_interval(prec);
}

}  // namespace

// ---- ParameterSystem construction ---------------------------------------

const TowerReal& ParameterSystem::k(std::size_t i) const {
  if (i == 0 || i > ks_.size()) throw std::out_of_range("k index");
  return ks_[i - 1];
}

Interval ParameterSystem::k_value(std::size_t i) const {
  return k(i).value_interval(prec_);
}

const TowerReal& ParameterSystem::f_k(std::size_t i) const {
  if (i == 0 || i > f_ks_.size()) throw std::out_of_range("k index");
  return f_ks_[i - 1];
}

const Interval& ParameterSystem::log2_f_k(std::size_t i) const {
  if (i == 0 || i > log2_f_ks_.size()) throw std::out_of_range("k index");
  return log2_f_ks_[i - 1];
}

bool ParameterSystem::log2_f_k_plain(std::size_t i) const {
  if (i == 0 || i > log2_f_plain_.size()) throw std::out_of_range("k index");
  return log2_f_plain_[i - 1];
}

const Interval& ParameterSystem::log2_q(std::size_t i) const {
  if (i == 0 || i > log2_qs_.size()) throw std::out_of_range("k index");
  return log2_qs_[i - 1];
}

bool ParameterSystem::log2_q_plain(std::size_t i) const {
  if (i == 0 || i > log2_q_plain_.size()) throw std::out_of_range("k index");
  return log2_q_plain_[i - 1];
}

mpq_class ParameterSystem::eps(std::size_t i) const {
  return eps_scale_ / mpq_class(mpz_class(1) << i);
}

const TowerReal& ParameterSystem::J_at(std::size_t t) const {
  if (t == 0 || t > J_.size()) throw std::out_of_range("J index");
  return J_[t - 1];
}

const TowerReal& ParameterSystem::L_at(std::size_t p) const {
  if (p == 0 || 2 * p > J_.size()) throw std::out_of_range("L index");
  return J_[2 * p - 1];
}

Interval ParameterSystem::inv_f_J(std::size_t t, mpfr_prec_t prec) const {
  if (t == 0 || t > inv_f_J_.size()) throw std::out_of_range("J index");
  return round_to(inv_f_J_[t - 1], prec);
}

Interval ParameterSystem::inv_f_J_tail(const TowerReal& lo, mpfr_prec_t prec) const {
  Interval total = Interval::from_si(0, prec);
  Interval zero = Interval::from_si(0, prec);
  for (std::size_t t = 1; t <= J_.size(); ++t) {
    if (tower_cert_le(lo, J_[t - 1])) {
      total = add(total, inv_f_J(t, prec));
    } else if (tower_cert_lt(J_[t - 1], lo)) {
      continue;
    } else {
      // membership undecidable: a hull with 0 keeps the enclosure sound
      total = add(total, Interval::hull_of(zero, inv_f_J(t, prec)));
    }
  }
  return total;
}

Interval ParameterSystem::inv_f_J_total(mpfr_prec_t prec) const {
  Interval total = Interval::from_si(0, prec);
  for (std::size_t t = 1; t <= J_.size(); ++t) total = add(total, inv_f_J(t, prec));
  return total;
}

void ParameterSystem::init_constants() {
  // split constant: smallest power of two with c/(c-1) <= f(2); the ratio
  // condition is tightest at the smallest scale because f is increasing
  Interval f2 = f_of_ui(2, 96);
  for (unsigned long cand = 2; cand <= 64 && c_ == 0; cand *= 2) {
    Interval ratio = div(Interval::from_ui(cand, 96), Interval::from_ui(cand - 1, 96));
    if (cmp_le(ratio, f2) == Verdict::pass) c_ = cand;
  }
  if (c_ == 0) throw std::logic_error("split constant search failed");
  if (d_ == 0) d_ = 4 * c_ * c_ * c_;
  unsigned long e0 = 2 * d_ * d_;
  m0_ = TowerReal::exp2_of(TowerReal::from_ui(e0, prec_));
  if (m0_.height() != 0) throw std::logic_error("base scale not plain");
  if (cmp_ge_q(f_interval(m0_.top()), mpq_class(e0)) != Verdict::pass)
    throw std::logic_error("base scale growth not certified");
  if (!tower_cert_lt(k(1), m0_))
    throw std::logic_error("base scale does not dominate k1");

  // per-scale sanity: f(k_i) < k_i certified for every materialized scale
  for (std::size_t i = 1; i <= k_count(); ++i) {
    if (!tower_cert_lt(f_k(i), k(i)))
      throw std::logic_error("f(k) < k not certified");
  }

  // cost threshold: either sqrt(G) reaches c at the base scale (then the
  // threshold is the base scale, G being increasing), or sup G stays below
  // c^2 over every scale (then the cost stays 1 everywhere)
  GainResult g = gain_of(m0_, *this);
  Interval lc = log2_i(Interval::from_ui(c_, 96));
  Interval two_lc = add(lc, lc);
  if (cmp_ge(g.log2_value, two_lc) == Verdict::pass) {
    threshold_ = m0_;
    return;
  }
  // sup over r of each term is at most f(k_i) * prod_{s<i} f(k_s)/k_s
  // (since f(r)/f(r k) <= 1); take the max upper bound over the scales
  Interval sup_log = Interval::from_si(-1000, prec_);
  Interval acc = Interval::from_si(0, prec_);
  for (std::size_t i = 1; i <= k_count(); ++i) {
    sup_log = max_i(sup_log, add(log2_f_k(i), acc));
    acc = add(acc, log2_q(i));
  }
  if (cmp_le(sup_log, two_lc) == Verdict::pass) {
    threshold_.reset();
    return;
  }
  throw std::logic_error("cost threshold undecidable");
}

void ParameterSystem::build_canonical_J(std::size_t members) {
  mpz_class j1z = (mpz_class(1) << 256) - 1;
  J_.push_back(TowerReal::from_z(j1z, prec_));
  if (members >= 2) {
    mpz_class c1 = 4 * j1z * j1z;
    TowerReal t = TowerReal::from_z(c1, prec_);
    for (int e = 0; e < 3; ++e) t = TowerReal::exp2_of(t);
    J_.push_back(t);
  }
  for (std::size_t t = 3; t <= members; ++t) {
    const TowerReal& prev = J_[t - 2];
    TowerReal w = tower_mul(tower_mul(prev, prev, prec_),
                            TowerReal::from_ui(4, prec_), prec_);
    // round the top up to a singleton so the triple exponential certifiably
    // dominates 4 * prev^2 (greedy minimal at this representation granularity)
    Interval s = round_to(w.top(), w.top().prec());
    mpfr_set(s.lo_mut(), s.hi(), MPFR_RNDU);
    TowerReal b(w.height(), s);
    for (int e = 0; e < 3; ++e) b = TowerReal::exp2_of(b);
    J_.push_back(b);
  }
  for (std::size_t t = 1; t <= J_.size(); ++t) {
    TowerReal ft = tower_f(J_[t - 1], prec_);
    inv_f_J_.push_back(recip(ft.value_interval(192)));
  }
}

void ParameterSystem::build_surrogate_J() {
  build_surrogate_J_from({3ul, 7ul, 15ul, 31ul, 63ul, 127ul});
}

void ParameterSystem::build_surrogate_J_from(const std::vector<unsigned long>& js) {
  for (unsigned long v : js) {
    J_.push_back(TowerReal::from_ui(v, prec_));
    inv_f_J_.push_back(recip(f_of_ui(v, 192)));
  }
}

void ParameterSystem::finish_scales() {
  for (const TowerReal& ki : ks_) {
    TowerReal fki = tower_f(ki, prec_);
    f_ks_.push_back(fki);
    Interval lf = tower_log2_value(fki, prec_);
    log2_f_ks_.push_back(lf);
    log2_f_plain_.push_back(finite_iv(lf));
    Interval lk = tower_log2_value(ki, prec_);
    // f(k) < k is certified in init_constants, so the log-quotient is <= 0
    Interval lq = min_i(sub(lf, lk), Interval::from_si(0, prec_));
    log2_qs_.push_back(lq);
    log2_q_plain_.push_back(finite_iv(lq));
  }
}

std::shared_ptr<ParameterSystem> ParameterSystem::honest(std::size_t count,
                                                         mpfr_prec_t prec) {
  if (count < 2 || count > 6) throw std::invalid_argument("scale count");
  auto sys = std::shared_ptr<ParameterSystem>(new ParameterSystem());
  sys->name_ = "honest";
  sys->surrogate_ = false;
  sys->prec_ = prec;
  TowerReal k = TowerReal::exp2_of(TowerReal::from_ui(1024, prec));
  sys->ks_.push_back(k);
  for (std::size_t i = 2; i <= count; ++i) {
    k = TowerReal::exp2_of(tower_mul(k, k, prec));
    sys->ks_.push_back(k);
  }
  sys->finish_scales();
  sys->init_constants();
  sys->build_canonical_J(6);
  return sys;
}

std::shared_ptr<ParameterSystem> ParameterSystem::toy(
    const std::vector<unsigned long>& ks, mpfr_prec_t prec) {
  if (ks.size() < 2) throw std::invalid_argument("scale count");
  for (std::size_t i = 1; i < ks.size(); ++i)
    if (ks[i] <= ks[i - 1]) throw std::invalid_argument("scales must increase");
  if (ks.front() < 2) throw std::invalid_argument("scales start at 2");
  auto sys = std::shared_ptr<ParameterSystem>(new ParameterSystem());
  sys->name_ = "toy";
  sys->surrogate_ = true;
  sys->prec_ = prec;
  for (unsigned long v : ks) sys->ks_.push_back(TowerReal::from_ui(v, prec));
  sys->finish_scales();
  sys->init_constants();
  sys->build_surrogate_J();
  return sys;
}

std::shared_ptr<ParameterSystem> ParameterSystem::from_config(const Config& cfg) {
  if (cfg.rule != "toy" && cfg.rule != "honest")
    throw std::invalid_argument("system rule must be toy or honest");
  const bool toy_rule = cfg.rule == "toy";
  if (!toy_rule && (!cfg.ks.empty() || cfg.Ls.has_value()))
    throw std::invalid_argument("ks/Ls lists apply to the toy rule only");
  auto sys = std::shared_ptr<ParameterSystem>(new ParameterSystem());
  sys->name_ = cfg.rule;
  sys->surrogate_ = toy_rule;
  sys->prec_ = cfg.prec > 0 ? cfg.prec : (toy_rule ? 192 : 2304);
  if (cfg.eps_scale) {
    if (*cfg.eps_scale <= 0) throw std::invalid_argument("eps scale must be positive");
    sys->eps_scale_ = *cfg.eps_scale;
  }
  if (cfg.c_override) {
    if (*cfg.c_override < 2) throw std::invalid_argument("c must be at least 2");
    sys->c_ = *cfg.c_override;
  }
  if (cfg.d_override) {
    if (*cfg.d_override < 1) throw std::invalid_argument("d must be positive");
    sys->d_ = *cfg.d_override;
  }
  if (toy_rule) {
    std::vector<unsigned long> ks = cfg.ks.empty()
                                        ? std::vector<unsigned long>{2, 4, 16}
                                        : cfg.ks;
    if (ks.size() < 2) throw std::invalid_argument("scale count");
    for (std::size_t i = 1; i < ks.size(); ++i)
      if (ks[i] <= ks[i - 1]) throw std::invalid_argument("scales must increase");
    if (ks.front() < 2) throw std::invalid_argument("scales start at 2");
    for (unsigned long v : ks) sys->ks_.push_back(TowerReal::from_ui(v, sys->prec_));
  } else {
    std::size_t count = cfg.count;
    if (count < 2 || count > 6) throw std::invalid_argument("scale count");
    TowerReal k = TowerReal::exp2_of(TowerReal::from_ui(1024, sys->prec_));
    sys->ks_.push_back(k);
    for (std::size_t i = 2; i <= count; ++i) {
      k = TowerReal::exp2_of(tower_mul(k, k, sys->prec_));
      sys->ks_.push_back(k);
    }
  }
  sys->finish_scales();
  sys->init_constants();
  if (!toy_rule) {
    sys->build_canonical_J(6);
  } else if (cfg.Ls) {
    // interleave a companion ahead of each L member so J alternates K, L;
    // floor halving reproduces the default companions for members 2^t - 1
    std::vector<unsigned long> js;
    unsigned long prev = 0;
    for (unsigned long l : *cfg.Ls) {
      unsigned long companion = l / 2;
      if (l < 3 || companion <= prev)
        throw std::invalid_argument("L members must leave room for companions");
      js.push_back(companion);
      js.push_back(l);
      prev = l;
    }
    if (js.empty()) throw std::invalid_argument("empty L list");
    sys->build_surrogate_J_from(js);
  } else {
    sys->build_surrogate_J();
  }
  return sys;
}

// ---- sigma --------------------------------------------------------------

namespace {

bool sigma_constraint_certified(const TowerReal& cand, std::uint64_t s,
                                mpfr_prec_t prec) {
  if (s == 0) return true;
  // (1/20) f(cand^(1/40)) >= s  <=>  f(cand^(1/40)) >= 20 s
  TowerReal root = tower_pow(cand, Interval::from_q(mpq_class(1, 40), prec), prec);
  TowerReal froot = tower_f(root, prec);
  return tower_cert_le(TowerReal::from_ui(20 * s, prec), froot);
}

}  // namespace

SigmaRecord ParameterSystem::sigma(const std::vector<FiniteVector>& seq) const {
  std::string key;
  std::set<std::uint64_t> supp;
  std::uint64_t end = 0;
  for (const FiniteVector& v : seq) {
    key += v.literal();
    key += '|';
    for (const auto& co : v.coords()) {
      supp.insert(co.first);
      end = std::max(end, co.first);
    }
  }
  std::uint64_t s = supp.size();
  std::lock_guard<std::mutex> guard(sigma_mu_);
  auto it = sigma_index_.find(key);
  if (it != sigma_index_.end()) return sigma_records_[it->second];
  if (sigma_used_.size() < L_count()) sigma_used_.resize(L_count(), false);
  for (std::size_t p = 1; p <= L_count(); ++p) {
    if (sigma_used_[p - 1]) continue;
    const TowerReal& cand = L_at(p);
    bool ok = sigma_constraint_certified(cand, s, prec_);
    if (!ok && !surrogate_) continue;
    SigmaRecord rec;
    rec.key = key;
    rec.position = p;
    rec.value = cand;
    rec.support_size = s;
    rec.end_index = end;
    rec.constraint_certified = ok;
    sigma_used_[p - 1] = true;
    sigma_index_[key] = sigma_records_.size();
    sigma_records_.push_back(rec);
    return rec;
  }
  throw std::runtime_error(
      "sigma: extend L (no unused materialized member certifies the support "
      "constraint)");
}

std::vector<SigmaRecord> ParameterSystem::sigma_snapshot() const {
  std::lock_guard<std::mutex> guard(sigma_mu_);
  return sigma_records_;
}

std::vector<CheckRow> ParameterSystem::sigma_check() const {
  std::vector<CheckRow> rows;
  std::vector<SigmaRecord> recs = sigma_snapshot();
  std::set<std::size_t> positions;
  for (const auto& r : recs) positions.insert(r.position);
  CheckRow inj;
  inj.condition = "sigma-injective";
  inj.verdict = positions.size() == recs.size() ? Verdict::pass : Verdict::fail;
  inj.lhs = std::to_string(positions.size());
  inj.rhs = std::to_string(recs.size());
  rows.push_back(inj);
  for (const auto& r : recs) {
    CheckRow row;
    row.condition = "sigma-constraint position=" + std::to_string(r.position);
    row.verdict = r.constraint_certified ? Verdict::pass : Verdict::fail;
    row.lhs = "support " + std::to_string(r.support_size);
    row.rhs = "member " + r.value.str(6);
    if (!r.constraint_certified && surrogate_)
      row.note = "surrogate assignment kept without certificate";
    rows.push_back(row);
  }
  return rows;
}

// ---- growth condition checks --------------------------------------------

std::vector<CheckRow> check_growth_base(const ParameterSystem& sys) {
  std::vector<CheckRow> rows;
  if (sys.k(1).height() != 0)
    throw std::logic_error("first scale must be plain");
  Interval v = sys.k_value(1);
  Interval fk1 = f_interval(v);
  Interval inner = mul_q(fk1, mpq_class(3, 4));
  Interval lhs = mul_q(f_interval(inner), mpq_class(2, 3));
  CheckRow r1;
  r1.condition = "growth-base-f";
  r1.verdict = cmp_ge_q(lhs, 1);
  r1.lhs = fmt(lhs);
  r1.rhs = "1";
  rows.push_back(r1);
  Interval ln1 = log_i(v);
  CheckRow r2;
  r2.condition = "growth-base-ln";
  r2.verdict = cmp_ge_q(ln1, 3);
  r2.lhs = fmt(ln1);
  r2.rhs = "3";
  rows.push_back(r2);
  return rows;
}

std::vector<CheckRow> check_power_growth(const ParameterSystem& sys,
                                         std::size_t grid) {
  std::vector<CheckRow> rows;
  Interval v = sys.k_value(1);
  // analytic sufficient bound: f(r^a) >= a f(r) (1 - 1/ln r) for r >= 2, and
  // 1 - 1/ln r is increasing in r, so certifying it >= 3/4 at r = k1 settles
  // every larger scale
  Interval margin = sub(Interval::from_si(1, 96), recip(log_i(v)));
  CheckRow ra;
  ra.condition = "power-growth-analytic";
  ra.verdict = cmp_ge_q(margin, mpq_class(3, 4));
  ra.lhs = fmt(margin);
  ra.rhs = "3/4";
  if (ra.verdict != Verdict::pass)
    ra.note = "analytic margin inconclusive at this scale; see grid rows";
  rows.push_back(ra);
  const mpq_class exps[] = {mpq_class(3, 2), mpq_class(2), mpq_class(4)};
  for (std::size_t s = 1; s <= grid; ++s) {
    Interval r = mul_2exp(v, static_cast<long>(s));
    Interval fr = f_interval(r);
    Interval lr = log2_i(r);
    for (const mpq_class& a : exps) {
      // f(r^a) >= log2(r^a) = a log2 r, compared against (3/4) a f(r)
      Interval lhs = mul_q(lr, a);
      Interval rhs = mul_q(fr, a * mpq_class(3, 4));
      CheckRow row;
      row.condition = "power-growth r=k1*2^" + std::to_string(s) + " a=" + a.get_str();
      row.verdict = cmp_ge(lhs, rhs);
      row.lhs = fmt(lhs);
      row.rhs = fmt(rhs);
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<CheckRow> check_eps_budget(const ParameterSystem& sys, std::size_t j) {
  if (j == 0 || j > sys.k_count()) throw std::out_of_range("scale index");
  std::vector<CheckRow> rows;
  const mpfr_prec_t prec = sys.prec();
  mpq_class eps_j = sys.eps(j);

  bool plain = sys.log2_f_k_plain(j);
  for (std::size_t s = 1; s < j && plain; ++s)
    if (!sys.log2_q_plain(s)) plain = false;

  if (plain) {
    Interval S = geometric_sum(sys.k_value(1), prec);
    Interval sum_nlq = Interval::from_si(0, prec);
    for (std::size_t s = 1; s < j; ++s) sum_nlq = add(sum_nlq, neg(sys.log2_q(s)));
    const Interval& lf = sys.log2_f_k(j);
    Interval log2_a = mul_q(add_q(sub(sum_nlq, lf), 1), mpq_class(1, 2));
    Interval a_part = mul(exp2_i(log2_a), S);
    Interval log2_b = add_q(
        add(sub(log2_i(lf), mul_q(lf, mpq_class(1, 2))), mul_q(sum_nlq, mpq_class(1, 2))),
        1);
    Interval b_part = exp2_i(log2_b);
    Interval lhs = add(a_part, b_part);
    CheckRow row;
    row.condition = "eps-budget j=" + std::to_string(j);
    row.verdict = cmp_lt(lhs, Interval::from_q(eps_j, prec));
    row.lhs = fmt(lhs);
    row.rhs = fmt_q(eps_j);
    rows.push_back(row);
    return rows;
  }

  // structural path for scales whose logs leave the plain range: three
  // certified tower inequalities force both summands below 2^(-2^58)
  TowerReal sum_lk = tower_log2(sys.k(1), prec);
  for (std::size_t s = 2; s + 1 < j; ++s)
    sum_lk = tower_add(sum_lk, tower_log2(sys.k(s), prec), prec);
  TowerReal lk_prev = tower_log2(sys.k(j - 1), prec);
  // (1) sum_{s<=j-2} log2 k_s <= (1/2) log2 k_{j-1}: the product of the lower
  // scales is dominated by the square root of the top one
  bool g1 = tower_cert_le(tower_mul(sum_lk, TowerReal::from_ui(2, prec), prec), lk_prev);
  CheckRow r1;
  r1.condition = "eps-budget-support j=" + std::to_string(j);
  r1.verdict = g1 ? Verdict::pass : Verdict::unknown;
  r1.lhs = "2 * sum log2 k_(s<=" + std::to_string(j - 2) + ")";
  r1.rhs = "log2 k_" + std::to_string(j - 1);
  rows.push_back(r1);
  // (2) log2 k_{j-1} >= 2^62: the margin itself is astronomically large
  bool g2 = tower_ge_pow2(lk_prev, (std::uint64_t(1) << 62) - 1);
  CheckRow r2;
  r2.condition = "eps-budget-margin j=" + std::to_string(j);
  r2.verdict = g2 ? Verdict::pass : Verdict::unknown;
  r2.lhs = "log2 k_" + std::to_string(j - 1);
  r2.rhs = "2^62";
  rows.push_back(r2);
  // (3) 8 (1 + log2 log2 f(k_j)) <= log2 k_{j-1}: the logarithmic factor in
  // the second summand is negligible against the square-root decay
  TowerReal llf = tower_log2(tower_log2(sys.f_k(j), prec), prec);
  TowerReal lhs3 = tower_mul(tower_add(llf, TowerReal::from_ui(1, prec), prec),
                             TowerReal::from_ui(8, prec), prec);
  bool g3 = tower_cert_le(lhs3, lk_prev);
  CheckRow r3;
  r3.condition = "eps-budget-logfactor j=" + std::to_string(j);
  r3.verdict = g3 ? Verdict::pass : Verdict::unknown;
  r3.lhs = "8 (1 + log2 log2 f(k_j))";
  r3.rhs = "log2 k_" + std::to_string(j - 1);
  rows.push_back(r3);

  CheckRow fin;
  fin.condition = "eps-budget j=" + std::to_string(j);
  if (g1 && g2 && g3) {
    // with (1)-(3): the first summand is at most sqrt(2) S 2^(-2^60) and the
    // second at most 2^(1 - 2^59); both are below 2^(-2^58)
    Interval bound = exp2_i(Interval::from_si(-(long(1) << 58), prec));
    Interval lhs = Interval::hull_of(Interval::from_si(0, prec), bound);
    fin.verdict = cmp_lt(lhs, Interval::from_q(eps_j, prec));
    fin.lhs = fmt(lhs);
  } else {
    fin.verdict = Verdict::unknown;
    fin.lhs = "(uncertified)";
  }
  fin.rhs = fmt_q(eps_j);
  rows.push_back(fin);
  return rows;
}

// ---- gain function ------------------------------------------------------

namespace {

GainResult gain_indexed(const TowerReal& r, const ParameterSystem& sys,
                        const std::vector<std::size_t>& idx) {
  const mpfr_prec_t prec = sys.prec();
  GainResult res;
  TowerReal fr = tower_f(r, prec);
  Interval lfr = tower_log2_value(fr, prec);
  bool lfr_plain = finite_iv(lfr);
  Interval win = dominance_window(prec);
  Interval sum_lq = Interval::from_si(0, prec);
  Interval hull;
  Interval best_lo;
  bool have_any = false;
  bool all_bounded = true;
  for (std::size_t i : idx) {
    Interval lterm;
    bool have = false;
    if (lfr_plain && sys.log2_f_k_plain(i)) {
      TowerReal rk = tower_mul(r, sys.k(i), prec);
      TowerReal frk = tower_f(rk, prec);
      Interval lfrk = tower_log2_value(frk, prec);
      if (finite_iv(lfrk)) {
        lterm = add(sub(add(lfr, sys.log2_f_k(i)), lfrk), sum_lq);
        have = true;
      }
    }
    if (!have) {
      TowerCmp cmp = tower_compare(fr, sys.f_k(i));
      if (cmp == TowerCmp::less && lfr_plain) {
        lterm = add(add(lfr, sum_lq), win);
        have = true;
      } else if (cmp == TowerCmp::greater && sys.log2_f_k_plain(i)) {
        lterm = add(add(sys.log2_f_k(i), sum_lq), win);
        have = true;
      }
    }
    if (have) {
      ++res.terms;
      if (!have_any) {
        hull = lterm;
        best_lo = lterm;
        res.argmax = i;
        have_any = true;
      } else {
        hull = max_i(hull, lterm);
        if (mpfr_cmp(lterm.lo(), best_lo.lo()) > 0) {
          best_lo = lterm;
          res.argmax = i;
        }
      }
    } else {
      all_bounded = false;
    }
    sum_lq = add(sum_lq, sys.log2_q(i));
  }
  if (!have_any) throw std::domain_error("gain: no term evaluable");

  // every term beyond the enumerated scales is at most f(r) * prod q
  res.cutoff = Verdict::unknown;
  bool hi_sound = all_bounded;
  if (sys.surrogate()) {
    // a surrogate system is a literal finite scale list: no tail exists
    res.cutoff = Verdict::pass;
  } else if (lfr_plain) {
    Interval tail_log = add(lfr, sum_lq);
    if (mpfr_cmp(tail_log.hi(), hull.lo()) <= 0) {
      res.cutoff = Verdict::pass;
    } else {
      // the tail bound caps unenumerated terms from above only; the
      // enumerated maximum remains a valid lower endpoint
      res.cutoff = Verdict::fail;
      if (mpfr_cmp(tail_log.hi(), hull.hi()) > 0)
        mpfr_set(hull.hi_mut(), tail_log.hi(), MPFR_RNDU);
    }
  } else {
    hi_sound = false;
  }
  res.log2_value = hull;
  if (!hi_sound) mpfr_set_inf(res.log2_value.hi_mut(), 1);
  res.value = exp2_i(res.log2_value);

  // enumeration stayed within the cutoff L_n for n = floor(f(f(r)))
  if (fr.height() == 0) {
    Interval ffr = f_interval(fr.top());
    long nlo = -1, nhi = -2;
    if (finite_iv(ffr)) {
      mpfr_t fl;
      mpfr_init2(fl, 64);
      mpfr_floor(fl, ffr.lo());
      nlo = mpfr_get_si(fl, MPFR_RNDN);
      mpfr_floor(fl, ffr.hi());
      nhi = mpfr_get_si(fl, MPFR_RNDN);
      mpfr_clear(fl);
    }
    if (nlo == nhi && nlo >= 0) {
      res.within_L_cutoff =
          res.argmax <= sys.L_cutoff(static_cast<std::uint64_t>(nlo))
              ? Verdict::pass
              : Verdict::fail;
    }
  } else {
    // f(f(r)) exceeds 2^60 here, so the cutoff allows every materialized index
    res.within_L_cutoff = Verdict::pass;
  }
  return res;
}

}  // namespace

GainResult gain_of(const TowerReal& r, const ParameterSystem& sys) {
  std::vector<std::size_t> idx(sys.k_count());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i + 1;
  return gain_indexed(r, sys, idx);
}

std::vector<CheckRow> check_gain_monotone(const ParameterSystem& sys,
                                          const std::vector<TowerReal>& r_grid,
                                          const std::vector<std::size_t>& subseq) {
  std::vector<CheckRow> rows;
  std::vector<GainResult> gs;
  gs.reserve(r_grid.size());
  for (const TowerReal& r : r_grid) gs.push_back(gain_of(r, sys));
  for (std::size_t i = 0; i + 1 < gs.size(); ++i) {
    CheckRow row;
    row.condition = "gain-monotone step=" + std::to_string(i + 1);
    row.verdict = cmp_le(gs[i].log2_value, gs[i + 1].log2_value);
    row.lhs = fmt(gs[i].value);
    row.rhs = fmt(gs[i + 1].value);
    rows.push_back(row);
  }
  if (!subseq.empty() && !r_grid.empty()) {
    GainResult sub = gain_indexed(r_grid.front(), sys, subseq);
    CheckRow row;
    row.condition = "gain-subsequence";
    row.verdict = cmp_le(gs.front().log2_value, sub.log2_value);
    row.lhs = fmt(gs.front().value);
    row.rhs = fmt(sub.value);
    row.note = "thinning the scale sequence can only increase the gain";
    rows.push_back(row);
  }
  return rows;
}

// ---- m_i and the descent iterates ---------------------------------------

TowerReal m_of(std::size_t i, const ParameterSystem& sys) {
  if (i == 0 || i > sys.k_count()) throw std::out_of_range("scale index");
  const mpfr_prec_t prec = sys.prec();
  const TowerReal& ki = sys.k(i);
  if (ki.height() == 0) {
    Interval kv = round_to(ki.top(), prec);
    if (kv.exact() && mpfr_integer_p(kv.lo()) && mpfr_cmp_ui(kv.lo(), 1 << 20) < 0) {
      // small literal scale: (2^k - 1)/k exactly
      unsigned long kk = mpfr_get_ui(kv.lo(), MPFR_RNDN);
      mpq_class m((mpz_class(1) << kk) - 1, kk);
      m.canonicalize();
      return TowerReal::from_q(m, std::max<mpfr_prec_t>(prec, kk + 8));
    }
    // plain huge scale: (2^k - 1)/k = 2^(k - log2 k) * (1 - 2^-k); the inner
    // exponent is exact and the parenthetical factor is covered by a 2^-60
    // downward slack on it
    Interval lk = log2_i(kv);
    Interval e = sub(kv, lk);
    Interval slack = Interval::hull_of(Interval::from_q(mpq_class(mpz_class(-1), mpz_class(1) << 60), 96),
                                       Interval::from_si(0, 96));
    return TowerReal(1, add(e, slack));
  }
  // tower scale: m_i lies in [2^(k_i) / k_i^2, 2^(k_i)]; lowering the top of
  // k_i by 2^-60 shrinks the value by far more than the k_i^2 divisor once
  // k_i >= 2^63 (certified), so the shifted top is a sound lower endpoint
  if (!tower_ge_pow2(ki, 63))
    throw std::logic_error("tower scale too small for slack covering");
  if (ki.height() == 1) {
    TowerReal lk = tower_log2(ki, prec);
    if (!tower_cert_le(tower_mul(lk, TowerReal::exp2_of(TowerReal::from_ui(62, prec)), prec), ki))
      throw std::logic_error("slack covering not certified");
  }
  Interval slack = Interval::hull_of(Interval::from_q(mpq_class(mpz_class(-1), mpz_class(1) << 60), 96),
                                     Interval::from_si(0, 96));
  TowerReal lowered(ki.height(), add(round_to(ki.top(), prec), slack));
  return TowerReal::exp2_of(lowered);
}

std::vector<TowerReal> r_sequence(const TowerReal& r0, std::size_t count,
                                  mpfr_prec_t prec) {
  std::vector<TowerReal> out;
  if (count == 0) return out;
  out.push_back(r0);
  while (out.size() < count) {
    const TowerReal& cur = out.back();
    bool advanced = false;
    if (cur.height() == 0 && cur.top().exact() && mpfr_integer_p(cur.top().lo()) &&
        mpfr_number_p(cur.top().lo()) && mpfr_cmp_ui(cur.top().lo(), 2) >= 0 &&
        mpfr_get_exp(cur.top().lo()) < (1 << 22)) {
      mpz_class z;
      mpfr_get_z(z.get_mpz_t(), cur.top().lo(), MPFR_RNDN);
      mpz_class zp1 = z + 1;
      if (mpz_popcount(z.get_mpz_t()) == 1) {
        // r = 2^t: f(r) = log2(2^t + 1) and r^f(r) = (2^t + 1)^t exactly
        unsigned long t = mpz_sizeinbase(z.get_mpz_t(), 2) - 1;
        if (t >= 1 && t * mpz_sizeinbase(zp1.get_mpz_t(), 2) <= (1u << 22)) {
          mpz_class nxt;
          mpz_pow_ui(nxt.get_mpz_t(), zp1.get_mpz_t(), t);
          out.push_back(TowerReal::from_z(nxt, mpz_sizeinbase(nxt.get_mpz_t(), 2) + 8));
          advanced = true;
        }
      } else if (mpz_popcount(zp1.get_mpz_t()) == 1) {
        // r + 1 = 2^s: f(r) = s and r^s is exact
        unsigned long s = mpz_sizeinbase(zp1.get_mpz_t(), 2) - 1;
        if (s * mpz_sizeinbase(z.get_mpz_t(), 2) <= (1u << 22)) {
          mpz_class nxt;
          mpz_pow_ui(nxt.get_mpz_t(), z.get_mpz_t(), s);
          out.push_back(TowerReal::from_z(nxt, mpz_sizeinbase(nxt.get_mpz_t(), 2) + 8));
          advanced = true;
        }
      }
    }
    if (!advanced) {
      TowerReal fr = tower_f(cur, prec);
      if (fr.height() == 0)
        out.push_back(tower_pow(cur, fr.top(), prec));
      else
        out.push_back(tower_pow(cur, fr, prec));
    }
  }
  return out;
}

GainSeriesResult check_gain_series(const TowerReal& r, const ParameterSystem& sys,
                                   std::size_t terms) {
  const mpfr_prec_t prec = sys.prec();
  GainSeriesResult res;
  for (std::size_t i = 2; i <= sys.k_count(); ++i) {
    if (tower_cert_le(m_of(i - 1, sys), r) && tower_cert_lt(r, m_of(i, sys))) {
      res.bracket = i;
      break;
    }
  }
  if (res.bracket == 0)
    throw std::domain_error("gain series: scale outside every certified window");
  {
    CheckRow row;
    row.condition = "gain-series-window";
    row.verdict = Verdict::pass;
    row.lhs = "window index " + std::to_string(res.bracket);
    row.rhs = "scale " + r.str(6);
    res.rows.push_back(row);
  }

  std::vector<TowerReal> iterates = r_sequence(r, terms, prec);
  Interval prefix = Interval::from_si(0, prec);
  for (std::size_t l = 0; l < iterates.size(); ++l) {
    GainResult g = gain_of(iterates[l], sys);
    Interval contrib = exp2_i(mul_q(g.log2_value, mpq_class(-1, 2)));
    prefix = add(prefix, contrib);
    CheckRow row;
    row.condition = "gain-series-term l=" + std::to_string(l);
    row.verdict = Verdict::pass;
    row.lhs = fmt(contrib);
    row.rhs = "gain " + fmt(g.value);
    res.rows.push_back(row);
  }
  res.lhs_prefix = prefix;

  // geometric tail: each remaining term is bounded by A q^l with
  // A = ((16/3) / f(k_{i-1}) * prod_{s<=i-2} k_s/f(k_s))^(1/2) and
  // q = ((8/3) k_1)^(-1/2); the gain is increasing, so the bound persists
  // after the iterates leave the window
  std::size_t i = res.bracket;
  if (!sys.log2_f_k_plain(i - 1))
    throw std::logic_error("gain series: tail factor leaves the plain range");
  Interval sum_nlq = Interval::from_si(0, prec);
  for (std::size_t s = 1; s + 1 < i; ++s) sum_nlq = add(sum_nlq, neg(sys.log2_q(s)));
  Interval l163 = log2_i(div(Interval::from_si(16, prec), Interval::from_si(3, prec)));
  Interval la = mul_q(add(l163, sub(sum_nlq, sys.log2_f_k(i - 1))), mpq_class(1, 2));
  Interval l83 = log2_i(div(Interval::from_si(8, prec), Interval::from_si(3, prec)));
  Interval lq_geo = neg(mul_q(add(l83, log2_i(sys.k_value(1))), mpq_class(1, 2)));
  Interval S = geometric_sum(sys.k_value(1), prec);
  Interval tail = mul(exp2_i(add(la, mul_q(lq_geo, mpq_class(static_cast<long>(terms))))), S);
  {
    CheckRow row;
    row.condition = "gain-series-tail";
    row.verdict = Verdict::pass;
    row.lhs = fmt(tail);
    row.rhs = "geometric from l=" + std::to_string(terms);
    res.rows.push_back(row);
  }
  res.lhs_upper = add(prefix, tail);
  res.rhs = 3 * sys.eps_scale() / mpq_class(mpz_class(1) << (i - 1));
  res.verdict = cmp_le_q(res.lhs_upper, res.rhs);
  {
    CheckRow row;
    row.condition = "gain-series-total";
    row.verdict = res.verdict;
    row.lhs = fmt(res.lhs_upper);
    row.rhs = fmt_q(res.rhs);
    if (res.verdict != Verdict::pass && sys.surrogate())
      row.note = "surrogate scales violate the eps budget premise";
    res.rows.push_back(row);
  }
  {
    // stricter single-window comparison against eps_{i-1} + eps_i
    mpq_class run = sys.eps(i - 1) + sys.eps(i);
    CheckRow row;
    row.condition = "gain-series-window-run";
    row.verdict = cmp_le_q(res.lhs_upper, run);
    row.lhs = fmt(res.lhs_upper);
    row.rhs = fmt_q(run);
    res.rows.push_back(row);
  }
  return res;
}

// ---- cost scale ---------------------------------------------------------

CostResult cost_of(const TowerReal& ell, const ParameterSystem& sys) {
  const mpfr_prec_t prec = sys.prec();
  CostResult res;
  if (!sys.C_threshold()) {
    res.below_threshold = true;
    res.classified = Verdict::pass;
    res.value = Interval::from_si(1, prec);
    res.log2_value = Interval::from_si(0, prec);
    return res;
  }
  const TowerReal& thr = *sys.C_threshold();
  if (tower_cert_lt(ell, thr)) {
    res.below_threshold = true;
    res.classified = Verdict::pass;
    res.value = Interval::from_si(1, prec);
    res.log2_value = Interval::from_si(0, prec);
    return res;
  }
  if (tower_cert_le(thr, ell)) {
    GainResult g = gain_of(ell, sys);
    Interval lc = log2_i(Interval::from_ui(sys.c(), prec));
    res.log2_value = sub(mul_q(g.log2_value, mpq_class(1, 2)), lc);
    res.value = exp2_i(res.log2_value);
    res.below_threshold = false;
    res.classified = Verdict::pass;
    return res;
  }
  res.classified = Verdict::unknown;
  res.log2_value = Interval::hull_of(Interval::from_si(0, prec),
                                     Interval::from_si(1, prec));
  mpfr_set_inf(res.log2_value.hi_mut(), 1);
  res.value = exp2_i(res.log2_value);
  return res;
}

CostSumResult sum_inv_cost_over_J(const ParameterSystem& sys, std::size_t prefix,
                                  const mpq_class& budget) {
  const mpfr_prec_t prec = 192;
  CostSumResult res;
  Interval total = Interval::from_si(0, prec);
  std::size_t P = std::min(prefix, sys.J_count());
  bool diverges = false;
  bool provable_divergence = false;
  for (std::size_t t = 1; t <= P; ++t) {
    CostResult cr = cost_of(sys.J_at(t), sys);
    Interval contrib;
    if (cr.below_threshold) {
      contrib = Interval::from_si(1, prec);
    } else if (cr.classified == Verdict::pass) {
      // 1/C = c / sqrt(G): only the certified lower gain bound is needed
      Interval ub = mul(Interval::from_ui(sys.c(), prec),
                        exp2_i(mul_q(cr.log2_value, mpq_class(-1, 1))));
      contrib = Interval::hull_of(Interval::from_si(0, prec), ub);
    } else {
      contrib = Interval::hull_of(Interval::from_si(0, prec),
                                  Interval::from_si(1, prec));
    }
    total = add(total, contrib);
    CheckRow row;
    row.condition = "cost-sum-term t=" + std::to_string(t);
    row.verdict = Verdict::pass;
    row.lhs = fmt(contrib);
    row.rhs = cr.below_threshold ? "below threshold" : "above threshold";
    res.rows.push_back(row);
  }
  res.prefix_sum = total;

  if (!sys.C_threshold()) {
    // the cost is identically 1, so the series over the infinite index set
    // diverges: report an honest half-infinite enclosure
    diverges = true;
    provable_divergence = true;
    CheckRow row;
    row.condition = "cost-sum-tail";
    row.verdict = Verdict::fail;
    row.lhs = "+inf";
    row.rhs = "cost scale identically 1";
    res.rows.push_back(row);
  } else {
    // tail domination: every member beyond the prefix sits beyond the last
    // certified window, each step of the index set dominates one descent
    // iterate, and the gain-series budget bounds the remaining reciprocals
    bool located = tower_cert_le(m_of(sys.k_count(), sys), sys.J_at(P));
    CheckRow loc;
    loc.condition = "cost-tail-location";
    loc.verdict = located ? Verdict::pass : Verdict::unknown;
    loc.lhs = "member " + std::to_string(P);
    loc.rhs = "beyond window " + std::to_string(sys.k_count());
    res.rows.push_back(loc);
    bool steps = true;
    for (std::size_t t = P; t < sys.J_count(); ++t) {
      const TowerReal& jt = sys.J_at(t);
      TowerReal step = tower_mul(tower_f(jt, sys.prec()), tower_log2(jt, sys.prec()),
                                 sys.prec());
      bool ok = tower_cert_le(step, tower_log2(sys.J_at(t + 1), sys.prec()));
      steps = steps && ok;
      CheckRow row;
      row.condition = "cost-tail-step t=" + std::to_string(t);
      row.verdict = ok ? Verdict::pass : Verdict::unknown;
      row.lhs = "f * log2 at member " + std::to_string(t);
      row.rhs = "log2 member " + std::to_string(t + 1);
      res.rows.push_back(row);
    }
    if (located && steps) {
      std::size_t i0 = sys.k_count() + 1;
      mpq_class tail_q = mpq_class(sys.c()) * 3 * sys.eps_scale() /
                         mpq_class(mpz_class(1) << (i0 - 1));
      CheckRow row;
      row.condition = "cost-sum-tail";
      row.verdict = Verdict::pass;
      row.lhs = fmt_q(tail_q);
      row.rhs = "c * eps budget beyond window " + std::to_string(i0 - 1);
      res.rows.push_back(row);
      total = add(total, Interval::from_q(tail_q, prec));
    } else {
      diverges = true;
      CheckRow row;
      row.condition = "cost-sum-tail";
      row.verdict = Verdict::unknown;
      row.lhs = "(uncertified)";
      row.rhs = "domination chain incomplete";
      res.rows.push_back(row);
    }
  }
  res.total_upper = total;
  if (diverges) mpfr_set_inf(res.total_upper.hi_mut(), 1);
  res.verdict =
      provable_divergence ? Verdict::fail : cmp_le_q(res.total_upper, budget);
  CheckRow fin;
  fin.condition = "cost-sum-total";
  fin.verdict = res.verdict;
  fin.lhs = fmt(res.total_upper);
  fin.rhs = fmt_q(budget);
  res.rows.push_back(fin);
  return res;
}

// ---- lacunary index set -------------------------------------------------

std::vector<CheckRow> check_J(const ParameterSystem& sys) {
  std::vector<CheckRow> rows;
  const mpfr_prec_t prec = sys.prec();
  {
    TowerReal fmin = tower_f(sys.J_at(1), prec);
    CheckRow row;
    row.condition = "J-min-scale";
    bool ok = tower_cert_le(TowerReal::from_ui(256, prec), fmin);
    row.verdict = ok ? Verdict::pass : Verdict::fail;
    row.lhs = "f(min) = " + fmin.str(8);
    row.rhs = "256";
    if (!ok && sys.surrogate()) row.note = "surrogate members below canonical floor";
    rows.push_back(row);
  }
  for (std::size_t t = 1; t < sys.J_count(); ++t) {
    const TowerReal& jt = sys.J_at(t);
    TowerReal w = tower_mul(tower_mul(jt, jt, prec), TowerReal::from_ui(4, prec), prec);
    CheckRow row;
    row.condition = "J-lacunary t=" + std::to_string(t);
    try {
      TowerReal lll = tower_log2(tower_log2(tower_log2(sys.J_at(t + 1), prec), prec), prec);
      bool ok = tower_cert_le(w, lll);
      row.verdict = ok ? Verdict::pass : Verdict::fail;
      row.lhs = "4 j_t^2";
      row.rhs = "log2 log2 log2 j_(t+1)";
    } catch (const std::exception&) {
      row.verdict = Verdict::fail;
      row.lhs = "4 j_t^2";
      row.rhs = "(iterated log leaves the domain)";
    }
    rows.push_back(row);
  }
  {
    CheckRow row;
    row.condition = "J-alternating-split";
    row.verdict = Verdict::pass;
    row.lhs = "K members " + std::to_string(sys.J_count() - sys.L_count());
    row.rhs = "L members " + std::to_string(sys.L_count());
    rows.push_back(row);
  }
  {
    Interval total = sys.inv_f_J_total(192);
    mpq_class lo(1, 256);
    mpq_class hi = lo + mpq_class(1, 1000000000);
    CheckRow row;
    row.condition = "J-inv-f-total";
    bool ok = cmp_ge_q(total, lo) == Verdict::pass &&
              cmp_le_q(total, hi) == Verdict::pass;
    row.verdict = ok ? Verdict::pass : Verdict::fail;
    row.lhs = fmt(total);
    row.rhs = "[1/256, 1/256 + 1e-9]";
    if (!ok && sys.surrogate()) row.note = "surrogate members below canonical floor";
    rows.push_back(row);
  }
  return rows;
}

}  // namespace sgm
