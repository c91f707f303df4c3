#include "sgm/block_operator.hpp"

#include <algorithm>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace sgm {

namespace {

std::string fmt(const Interval& v, int digits = 8) {
  return "[" + dec_lo(v, digits) + ", " + dec_hi(v, digits) + "]";
}

SymSum pair_sym(const SymVector& fstar, const SymVector& x) {
  SymSum acc;
  for (auto& [idx, c] : fstar.coords()) {
    const SymSum& xc = x.coeff(idx);
    if (!xc.is_zero()) acc = acc + c * xc;
  }
  return acc;
}

// certified S-norm of a symbolic vector through its coordinate enclosures
Interval mags_norm(const SymVector& v, mpfr_prec_t wp) {
  if (v.empty()) return Interval::from_si(0, wp);
  std::vector<Interval> mags = v.eval_coords(wp);
  for (auto& m : mags) m = abs_i(m);
  return s_norm_mags(mags, wp);
}

const SymSum& sym_one() {
  static const SymSum one{SymCoeff::one()};
  return one;
}

}  // namespace

// ---- construction -------------------------------------------------------

XStarSequence build_xstars(const std::vector<std::uint64_t>& k_stream,
                           const std::vector<std::size_t>& lengths,
                           mpfr_prec_t prec) {
  if (lengths.empty())
    throw std::domain_error("block sequence: at least one item required");
  for (size_t i = 0; i + 1 < k_stream.size(); i++)
    if (k_stream[i] >= k_stream[i + 1])
      throw std::domain_error("block sequence: stream must be strictly increasing");
  const mpfr_prec_t wp = prec + kGuardBits;
  XStarSequence xs;
  xs.k_stream = k_stream;
  xs.prec = prec;
  std::uint64_t offset = 1;
  for (size_t n = 0; n < lengths.size(); n++) {
    XStarItem it;
    it.length = lengths[n];
    it.tree = FinTree::from_stream(k_stream, lengths[n]);
    const size_t lc = it.tree.leaf_count();
    if (lc > kMaxDPSupport)
      throw std::domain_error("block sequence: item support exceeds the DP cap");
    it.placement = Placement::pack(lc, offset);
    it.vector = associated_vector(it.tree, it.placement);
    it.functional = associated_functional(it.tree, it.placement);
    it.certificate = functional_certificate(it.tree, it.placement);
    it.lo = it.placement.slots.front();
    it.hi = it.placement.slots.back();
    it.pairing = pair_sym(it.functional, it.vector);
    if (it.pairing != sym_one())
      throw std::logic_error("block sequence: pairing does not reduce to 1");
    Interval vn = mags_norm(it.vector, wp);
    it.vec_norm = round_to(vn, prec);
    it.vec_le2 = cmp_le_q(vn, mpq_class(2));
    it.dual_lower = round_to(recip(vn), prec);
    offset = it.hi + 1;
    xs.items.push_back(std::move(it));
  }
  return xs;
}

// ---- the operator --------------------------------------------------------

SymVector apply_T(const XStarSequence& xs, const FiniteVector& x) {
  SymVector out;
  for (size_t n = 0; n < xs.count(); n++) {
    SymSum p = sym_pairing(xs.items[n].functional, x);
    if (!p.is_zero()) out.set(n + 1, p);
  }
  return out;
}

SymVector apply_T(const XStarSequence& xs, const SymVector& x) {
  SymVector out;
  for (size_t n = 0; n < xs.count(); n++) {
    SymSum p = pair_sym(xs.items[n].functional, x);
    if (!p.is_zero()) out.set(n + 1, p);
  }
  return out;
}

SymVector apply_T_nu(const XStarSequence& xs, const std::vector<mpq_class>& nu,
                     const FiniteVector& x) {
  SymVector out;
  for (size_t n = 0; n < xs.count(); n++) {
    if (n >= nu.size() || nu[n] == 0) continue;
    SymSum p = sym_pairing(xs.items[n].functional, x) * SymCoeff(nu[n]);
    if (!p.is_zero()) out.set(n + 1, p);
  }
  return out;
}

// ---- block decomposition -------------------------------------------------

BlockDecomposition decompose_blocks(const XStarSequence& xs, const FiniteVector& x) {
  if (xs.count() == 0)
    throw std::invalid_argument("block decomposition: empty sequence");
  std::vector<std::vector<FiniteVector::Coord>> buckets(xs.count());
  for (auto& [idx, q] : x.coords()) {
    size_t n = 0;
    while (n < xs.count() && xs.items[n].hi < idx) n++;
    if (n == xs.count()) n = xs.count() - 1;  // trailing coordinates: last slot
    buckets[n].emplace_back(idx, q);
  }
  BlockDecomposition res;
  SymVector acc;
  for (size_t n = 0; n < xs.count(); n++) {
    BlockPiece piece;
    piece.slot = n + 1;
    if (buckets[n].empty()) {
      // the slot's own normalized vector stands in with coefficient zero
      piece.filler = true;
    } else {
      FiniteVector fb(buckets[n]);
      piece.body = SymVector::from_rational(fb);
      piece.pairing = sym_pairing(xs.items[n].functional, fb);
      if (piece.pairing.is_zero())
        throw std::domain_error(
            "block decomposition: a nonzero piece pairs to zero, the block form "
            "x = sum lambda_i z_i degenerates");
      acc = acc + piece.body;
    }
    res.pieces.push_back(std::move(piece));
  }
  res.reconstruction =
      (acc == SymVector::from_rational(x)) ? Verdict::pass : Verdict::fail;
  return res;
}

// ---- the basis domination check ------------------------------------------

namespace {

void validate_blocks(const XStarSequence& xs, const std::vector<SymVector>& zs,
                     const std::vector<mpq_class>& lambdas) {
  if (zs.size() != lambdas.size())
    throw std::invalid_argument("blocks: zs and lambdas sizes differ");
  if (zs.size() > xs.count())
    throw std::invalid_argument("blocks: more blocks than items");
  for (size_t i = 0; i < zs.size(); i++) {
    const XStarItem& it = xs.items[i];
    if (zs[i].empty())
      throw std::invalid_argument("blocks: empty block vector");
    if (zs[i].min_index() < it.lo || zs[i].max_index() > it.hi)
      throw std::invalid_argument("blocks: block leaves its slot window");
    if (pair_sym(it.functional, zs[i]) != sym_one())
      throw std::invalid_argument(
          "blocks: block not normalized against its functional");
  }
}

}  // namespace

Check21Result check_21(const XStarSequence& xs, const std::vector<SymVector>& zs,
                       const std::vector<mpq_class>& lambdas, std::uint64_t ell,
                       const mpq_class& one_over_C, mpfr_prec_t prec) {
  validate_blocks(xs, zs, lambdas);
  if (ell == 0) throw std::invalid_argument("blocks: l must be >= 1");
  const mpfr_prec_t wp = prec + kGuardBits;
  Check21Result res;
  {
    CheckRow row;
    row.condition = "block-validation";
    row.verdict = Verdict::pass;
    row.note = "supports nested in slot windows, pairings exactly 1";
    res.rows.push_back(row);
  }
  std::vector<FiniteVector::Coord> lamco;
  for (size_t i = 0; i < lambdas.size(); i++)
    if (lambdas[i] != 0) lamco.emplace_back(i + 1, lambdas[i]);
  res.coarse = Interval::from_ui(lamco.size(), prec);
  if (lamco.empty()) {
    res.lhs = Interval::from_si(0, prec);
    res.rhs = Interval::from_si(0, prec);
    res.scaled_rhs = Interval::from_si(0, prec);
    res.verdict = Verdict::pass;
    CheckRow row;
    row.condition = "basis-vs-blocks l=" + std::to_string(ell);
    row.verdict = Verdict::pass;
    row.note = "all coefficients zero";
    res.rows.push_back(row);
    return res;
  }
  FiniteVector lv(lamco);
  Interval lhs = ell_norm(lv, ell, wp);
  SymVector acc;
  for (size_t i = 0; i < zs.size(); i++)
    if (lambdas[i] != 0) acc = acc + zs[i].scaled(SymCoeff(lambdas[i]));
  Interval rhs = mags_norm(acc, wp);
  Interval scaled = mul_q(rhs, one_over_C);
  res.verdict = cmp_le(lhs, scaled);
  res.lhs = round_to(lhs, prec);
  res.rhs = round_to(rhs, prec);
  res.scaled_rhs = round_to(scaled, prec);
  {
    CheckRow row;
    row.condition = "basis-vs-blocks l=" + std::to_string(ell);
    row.verdict = res.verdict;
    row.lhs = fmt(res.lhs);
    row.rhs = fmt(res.scaled_rhs);
    row.note = "multiplier " + one_over_C.get_str();
    res.rows.push_back(row);
  }
  {
    CheckRow row;
    row.condition = "coarse-ratio";
    row.verdict = (mpfr_sgn(rhs.lo()) > 0) ? cmp_le(div(lhs, rhs), res.coarse)
                                           : Verdict::unknown;
    row.lhs = mpfr_sgn(rhs.lo()) > 0 ? fmt(round_to(div(lhs, rhs), prec)) : "n/a";
    row.rhs = fmt(res.coarse);
    row.note = "ratio never exceeds the nonzero coefficient count";
    res.rows.push_back(row);
  }
  return res;
}

// ---- the descent lower bound ---------------------------------------------

DescentResult check_descent(const XStarSequence& xs,
                            const std::vector<mpq_class>& lambdas, std::uint64_t m,
                            const ParameterSystem& sys, mpfr_prec_t prec) {
  (void)sys;  // the gain of m is the only system-dependent ingredient below
  if (lambdas.size() > xs.count())
    throw std::invalid_argument("descent: more coefficients than items");
  if (m == 0) throw std::invalid_argument("descent: m must be >= 1");
  const mpfr_prec_t wp = prec + kGuardBits;
  DescentResult res;
  std::vector<size_t> I;
  for (size_t i = 0; i < lambdas.size(); i++) {
    if (lambdas[i] < 0)
      throw std::domain_error("descent: nonnegative coefficients required");
    if (lambdas[i] > 0) I.push_back(i);
  }
  res.lhs_measured = Interval::from_si(0, prec);
  res.lhs_witness = Interval::from_si(0, prec);
  res.rhs = Interval::from_si(0, prec);
  if (I.empty()) {
    res.verdict = Verdict::pass;
    CheckRow row;
    row.condition = "descent-trivial";
    row.verdict = Verdict::pass;
    row.note = "all coefficients zero";
    res.rows.push_back(row);
    return res;
  }
  if (I.size() > m)
    throw std::domain_error("descent: more items than the scale allows");

  mpq_class sumlam = 0;
  for (size_t i : I) sumlam += lambdas[i];
  std::uint64_t minlo = xs.items[I.front()].lo;
  size_t Lmin = xs.items[I.front()].length;
  size_t longest = I.front();
  for (size_t i : I) {
    minlo = std::min(minlo, xs.items[i].lo);
    Lmin = std::min(Lmin, xs.items[i].length);
    if (xs.items[i].length > xs.items[longest].length) longest = i;
  }
  {
    Interval ffm = f_interval(f_of_z(mpz_class(static_cast<unsigned long>(m)), wp));
    Verdict v = cmp_le(ffm, Interval::from_ui(minlo, wp));
    CheckRow row;
    row.condition = "descent-pre f(f(m)) <= min support";
    row.verdict = v;
    row.lhs = fmt(round_to(ffm, prec));
    row.rhs = std::to_string(minlo);
    res.rows.push_back(row);
    if (v != Verdict::pass)
      throw std::domain_error("descent: support starts below f(f(m))");
  }

  // the vector under study and the exact per-level witness functionals
  SymVector X;
  for (size_t i : I) X = X + xs.items[i].vector.scaled(SymCoeff(lambdas[i]));
  const size_t cnt = I.size();
  const SymCoeff haircut = cnt == 1
                               ? SymCoeff::one()
                               : SymCoeff::f_pow(mpz_class(static_cast<unsigned long>(cnt)), -2);
  const FinTree& shape = xs.items[longest].tree;
  TreeNode path;
  Interval best_witness = Interval::from_si(0, wp);
  for (size_t lev = 0; lev <= Lmin; lev++) {
    SymVector g;
    for (size_t i : I) {
      auto parts = level_decomposition(xs.items[i].tree, xs.items[i].placement,
                                       lev, true);
      bool found = false;
      for (auto& lp : parts)
        if (lp.mu == path) {
          g = g + lp.part;
          found = true;
          break;
        }
      if (!found)
        throw std::logic_error("descent: shared node missing from an item");
    }
    g = g.scaled(haircut);
    SymSum act = pair_sym(g, X);
    SymSum expected{SymCoeff(sumlam) * alpha(shape, path) * haircut};
    Interval av = act.eval(wp);
    best_witness = max_i(best_witness, av);
    CheckRow row;
    row.condition = "descent-level " + std::to_string(lev);
    row.verdict = (act == expected) ? Verdict::pass : Verdict::fail;
    row.lhs = fmt(round_to(av, prec));
    row.rhs = "alpha(path) * sum lambda / f(#items), exact";
    row.note = lev < Lmin
                   ? "children capture equal mass; tie broken to the smallest index"
                   : "deepest shared level";
    res.rows.push_back(row);
    if (lev < Lmin) path.push_back(1);
  }
  res.depth = Lmin;

  // measured column, when the combined support fits the DP cap
  bool measured_ok = X.coords().size() <= kMaxDPSupport;
  Interval measured = Interval::from_si(0, wp);
  if (measured_ok) {
    measured = mags_norm(X, wp);
    res.lhs_measured = round_to(measured, prec);
  } else {
    CheckRow row;
    row.condition = "descent-measure";
    row.verdict = Verdict::unknown;
    row.note = "combined support exceeds the DP cap; witness column only";
    res.rows.push_back(row);
  }
  res.lhs_witness = round_to(best_witness, prec);

  GainResult G = gain_of(TowerReal::from_ui(m, wp), sys);
  res.gain_argmax = G.argmax;
  {
    CheckRow row;
    row.condition = "descent-gain cutoff";
    row.verdict = G.cutoff;
    row.lhs = fmt(round_to(G.value, prec));
    row.rhs = "argmax " + std::to_string(G.argmax);
    res.rows.push_back(row);
  }
  Interval rhs = mul_q(div(G.value, f_of_z(mpz_class(static_cast<unsigned long>(m)), wp)), sumlam);
  res.rhs = round_to(rhs, prec);
  Interval best_lower = measured_ok ? max_i(measured, best_witness) : best_witness;
  res.verdict = cmp_le(rhs, best_lower);
  {
    CheckRow row;
    row.condition = "descent-conclusion";
    row.verdict = res.verdict;
    row.lhs = fmt(res.rhs);
    row.rhs = fmt(round_to(best_lower, prec));
    row.note = "(G(m)/f(m)) sum lambda <= certified lower bound";
    res.rows.push_back(row);
  }
  return res;
}

// ---- tail-norm localization ----------------------------------------------

TailLocalization check_tail_localization(const FiniteVector& x, const mpq_class& r,
                                         std::size_t head_count,
                                         const ParameterSystem& sys, bool certified,
                                         mpfr_prec_t prec) {
  const mpfr_prec_t wp = prec + kGuardBits;
  TailLocalization res;
  res.tail_value = Interval::from_si(0, prec);
  res.certified_bound = Interval::from_si(0, prec);
  if (x.empty()) {
    res.bounded = Verdict::pass;
    CheckRow row;
    row.condition = "tail-trivial";
    row.verdict = Verdict::pass;
    row.note = "empty vector";
    res.rows.push_back(row);
    return res;
  }
  TailNormResult tail = tail_norm(x, r, wp);
  res.tail_value = round_to(tail.value, prec);
  res.witness_l = tail.witness_l;
  {
    CheckRow row;
    row.condition = "tail-witness";
    row.verdict = Verdict::pass;
    row.lhs = fmt(res.tail_value);
    row.rhs = "attained at l = " + std::to_string(tail.witness_l);
    res.rows.push_back(row);
  }

  // the leading coordinates and the best split of the remainder
  std::vector<FiniteVector::Coord> coords(x.coords().begin(), x.coords().end());
  std::sort(coords.begin(), coords.end(),
            [](const FiniteVector::Coord& a, const FiniteVector::Coord& b) {
              mpq_class aa = abs(a.second), ab = abs(b.second);
              if (aa != ab) return aa > ab;
              return a.first < b.first;
            });
  mpq_class head_mass = 0;
  for (size_t i = 0; i < coords.size() && i < head_count; i++) {
    res.head.push_back(coords[i].first);
    head_mass += abs(coords[i].second);
  }
  std::sort(res.head.begin(), res.head.end());
  {
    CheckRow row;
    row.condition = "head-mass";
    row.verdict = Verdict::pass;
    row.lhs = fmt(Interval::from_q(head_mass, prec));
    row.rhs = "l1 mass of the " + std::to_string(res.head.size()) +
              " largest coordinates";
    res.rows.push_back(row);
  }
  std::vector<FiniteVector::Coord> rest(
      coords.begin() + std::min(coords.size(), head_count), coords.end());
  if (!rest.empty()) {
    FiniteVector comp(rest);
    std::uint64_t slots = std::max<std::uint64_t>(
        1, std::min<std::uint64_t>(tail.witness_l, comp.support_size()));
    res.complement_split = best_partition(comp, slots, wp);
    CheckRow row;
    row.condition = "complement-split";
    row.verdict = Verdict::pass;
    row.lhs = fmt(round_to(res.complement_split.value, prec));
    row.rhs = std::to_string(res.complement_split.parts.size()) + " parts at l = " +
              std::to_string(slots);
    res.rows.push_back(row);
  }

  // regularity of r against the split constant, and the marker-growth ladder
  Interval fr = f_interval(Interval::from_q(r, wp));
  const mpq_class d2 = mpq_class(sys.d()) * mpq_class(sys.d());
  Verdict reg = cmp_ge_q(fr, d2);
  {
    CheckRow row;
    row.condition = "regularity f(r) > d^2";
    row.verdict = reg;
    row.lhs = fmt(round_to(fr, prec));
    row.rhs = d2.get_str();
    res.rows.push_back(row);
  }
  if (r >= 2) {
    std::vector<TowerReal> rs = r_sequence(TowerReal::from_q(r, wp), 3, wp);
    for (size_t l = 0; l + 1 < rs.size(); l++) {
      Interval fl = tower_f(rs[l], wp).value_interval(wp);
      Interval fl1 = tower_f(rs[l + 1], wp).value_interval(wp);
      Interval want = mul_q(mul(fl, fl), mpq_class(3, 4));
      CheckRow row;
      row.condition = "marker-growth step " + std::to_string(l);
      row.verdict = cmp_ge(fl1, want);
      row.lhs = fmt(round_to(fl1, prec));
      row.rhs = fmt(round_to(want, prec));
      res.rows.push_back(row);
    }
  }

  // the singleton-split bound |x|_1 / f(r) dominates every slot count >= r
  Interval sharp = div(Interval::from_q(x.l1(), wp), fr);
  if (certified) {
    if (reg != Verdict::pass)
      throw std::domain_error("tail localization: certified mode requires f(r) > d^2");
    Interval pref =
        recip(sub(Interval::from_si(1, wp),
                  div(Interval::from_ui(sys.d(), wp), sqrt_i(fr))));
    Interval bound = mul(pref, sharp);
    res.certified_bound = round_to(bound, prec);
    res.bounded = cmp_le(tail.value, bound);
  } else {
    res.bounded = cmp_le(tail.value, sharp);
  }
  {
    CheckRow row;
    row.condition = "tail-le-l1-over-f";
    row.verdict = res.bounded;
    row.lhs = fmt(res.tail_value);
    row.rhs = fmt(round_to(sharp, prec));
    row.note = certified ? "with the closing prefactor" : "sharp singleton split";
    res.rows.push_back(row);
  }
  return res;
}

// ---- the cost-scale comparison -------------------------------------------

CostCompareResult check_cost_compare(const XStarSequence& xs,
                                     const std::vector<SymVector>& zs,
                                     const std::vector<mpq_class>& lambdas,
                                     std::uint64_t m, const ParameterSystem& sys,
                                     bool certified, mpfr_prec_t prec) {
  validate_blocks(xs, zs, lambdas);
  if (m == 0) throw std::invalid_argument("cost compare: m must be >= 1");
  const mpfr_prec_t wp = prec + kGuardBits;
  CostCompareResult res;
  std::vector<FiniteVector::Coord> lamco;
  for (size_t i = 0; i < lambdas.size(); i++)
    if (lambdas[i] != 0) lamco.emplace_back(i + 1, lambdas[i]);
  if (lamco.empty()) {
    res.lhs = Interval::from_si(0, prec);
    res.rhs = Interval::from_si(0, prec);
    res.c_product = Interval::from_si(1, prec);
    res.verdict = Verdict::pass;
    CheckRow row;
    row.condition = "cost-trivial";
    row.verdict = Verdict::pass;
    row.note = "all coefficients zero";
    res.rows.push_back(row);
    return res;
  }
  FiniteVector lv(lamco);
  Interval lhs = ell_norm(lv, m, wp);
  SymVector acc;
  for (size_t i = 0; i < zs.size(); i++)
    if (lambdas[i] != 0) acc = acc + zs[i].scaled(SymCoeff(lambdas[i]));
  Interval bn = mags_norm(acc, wp);

  GainResult G = gain_of(TowerReal::from_ui(m, wp), sys);
  Interval sqrtG = sqrt_i(G.value);
  {
    CheckRow row;
    row.condition = "cost-gain cutoff";
    row.verdict = G.cutoff;
    row.lhs = fmt(round_to(G.value, prec));
    row.rhs = "argmax " + std::to_string(G.argmax);
    res.rows.push_back(row);
  }
  res.above_threshold =
      sys.C_threshold() &&
      tower_cert_le(*sys.C_threshold(), TowerReal::from_ui(m, wp));
  {
    CheckRow row;
    row.condition = "cost-threshold";
    row.verdict = res.above_threshold ? Verdict::pass : Verdict::fail;
    row.note = "the cost scale is identically 1 below the threshold";
    res.rows.push_back(row);
  }

  // the convergent product over the iterates of m
  Interval product = Interval::from_si(1, wp);
  bool product_valid = true;
  std::vector<TowerReal> rs = r_sequence(TowerReal::from_ui(m, wp), 3, wp);
  const mpq_class d2 = mpq_class(sys.d()) * mpq_class(sys.d());
  for (size_t l = 0; l < rs.size(); l++) {
    GainResult gl = gain_of(rs[l], sys);
    Interval fl = tower_f(rs[l], wp).value_interval(wp);
    Interval sq = sqrt_i(gl.value);
    CheckRow row;
    row.condition = "c-product factor " + std::to_string(l);
    if (cmp_ge_q(fl, d2) != Verdict::pass ||
        cmp_ge_q(sq, mpq_class(1)) != Verdict::pass ||
        !(mpfr_cmp_ui(sq.lo(), 1) > 0)) {
      row.verdict = Verdict::fail;
      row.note = "factor undefined: sqrt gain <= 1 or f(iterate) <= d^2";
      product_valid = false;
    } else {
      Interval one = Interval::from_si(1, wp);
      Interval pref = recip(sub(one, div(Interval::from_ui(sys.d(), wp), sqrt_i(fl))));
      Interval mid = div(mul(f_interval(fl), sq), fl);
      Interval lastt = recip(sub(sq, one));
      Interval factor = mul(pref, add(add(one, mid), lastt));
      product = mul(product, factor);
      row.verdict = Verdict::pass;
      row.lhs = fmt(round_to(factor, prec));
    }
    res.rows.push_back(row);
  }
  {
    CheckRow row;
    row.condition = "c-product tail";
    if (product_valid && tower_ge_pow2(tower_f(rs.back(), wp), 62)) {
      Interval tailf = Interval::from_si(1, wp);
      mpfr_t eps;
      mpfr_init2(eps, 64);
      mpfr_set_ui_2exp(eps, 1, -28, MPFR_RNDU);
      mpfr_add(tailf.hi_mut(), tailf.hi(), eps, MPFR_RNDU);
      mpfr_clear(eps);
      product = mul(product, tailf);
      row.verdict = Verdict::pass;
      row.note = "remaining factors within [1, 1 + 2^-28]";
    } else {
      row.verdict = Verdict::fail;
      row.note = "tail not certified; product upper endpoint unbounded";
      mpfr_set_inf(product.hi_mut(), 1);
      product_valid = false;
    }
    res.rows.push_back(row);
  }
  res.c_product = round_to(product, prec);

  Interval rhs;
  if (certified) {
    if (!res.above_threshold)
      throw std::domain_error("cost compare: certified mode requires the threshold");
    if (!product_valid)
      throw std::domain_error("cost compare: certified mode requires the product");
    rhs = mul(div(product, sqrtG), bn);
  } else {
    rhs = mul(mul_q(recip(sqrtG), mpq_class(sys.c())), bn);
  }
  res.verdict = cmp_le(lhs, rhs);
  res.lhs = round_to(lhs, prec);
  res.rhs = round_to(rhs, prec);
  {
    CheckRow row;
    row.condition = "cost-conclusion m=" + std::to_string(m);
    row.verdict = res.verdict;
    row.lhs = fmt(res.lhs);
    row.rhs = fmt(res.rhs);
    row.note = certified ? "product-closed constant" : "system constant c";
    res.rows.push_back(row);
  }
  return res;
}

// ---- the operator report -------------------------------------------------

OperatorReport operator_norm_report(const XStarSequence& xs,
                                    const std::vector<FiniteVector>& probes,
                                    const std::vector<mpq_class>& nu,
                                    const ParameterSystem& sys, mpfr_prec_t prec) {
  const mpfr_prec_t wp = prec + kGuardBits;
  OperatorReport res;
  {
    bool all_one = true;
    for (auto& it : xs.items) all_one = all_one && (it.pairing == sym_one());
    CheckRow row;
    row.condition = "pairing-identity";
    row.verdict = all_one ? Verdict::pass : Verdict::fail;
    row.note = "x*_n(x_n) reduces to 1 symbolically for every item";
    res.checks.push_back(row);
  }
  {
    bool disjoint = true;
    for (size_t n = 0; n + 1 < xs.count(); n++)
      disjoint = disjoint && (xs.items[n].hi < xs.items[n + 1].lo);
    CheckRow row;
    row.condition = "biorthogonality";
    row.verdict = disjoint ? Verdict::pass : Verdict::fail;
    row.note = "slot windows disjoint, so x*_i(x_j) = 0 off the diagonal";
    res.checks.push_back(row);
  }

  Interval sup_ratio = Interval::from_si(0, wp);
  for (size_t p = 0; p < probes.size(); p++) {
    const FiniteVector& x = probes[p];
    if (x.empty() || x.support_size() > kMaxDPSupport) continue;
    OperatorRow row;
    row.label = "probe " + std::to_string(p + 1);
    Interval xn = s_norm(x, wp);
    Interval txn = mags_norm(apply_T(xs, x), wp);
    Interval ratio = div(txn, xn);
    row.x_norm = round_to(xn, prec);
    row.tx_norm = round_to(txn, prec);
    row.ratio_upper = round_to(ratio, prec);
    row.gm_upper = gm_upper_bound(x, sys, prec).value;
    sup_ratio = max_i(sup_ratio, ratio);
    res.rows.push_back(std::move(row));
  }
  res.sup_ratio = round_to(sup_ratio, prec);

  Interval dual_inf = xs.items.front().dual_lower;
  for (auto& it : xs.items) dual_inf = min_i(dual_inf, it.dual_lower);
  res.dual_inf = round_to(dual_inf, prec);

  mpq_class maxnu = 0;
  Interval tnu_lower = Interval::from_si(0, wp);
  for (size_t n = 0; n < nu.size() && n < xs.count(); n++) {
    maxnu = std::max(maxnu, mpq_class(abs(nu[n])));
    tnu_lower = max_i(tnu_lower, mul_q(xs.items[n].dual_lower, abs(nu[n])));
  }
  res.tnu_lower = round_to(tnu_lower, prec);
  Interval costsum =
      sum_inv_cost_over_J(sys, sys.J_count(), mpq_class(1)).total_upper;
  res.tnu_upper = round_to(mul_q(add(sup_ratio, costsum), maxnu), prec);
  {
    CheckRow row;
    row.condition = "diagonal-sandwich";
    row.verdict = cmp_le(tnu_lower, mul_q(add(sup_ratio, costsum), maxnu));
    row.lhs = fmt(res.tnu_lower);
    row.rhs = fmt(res.tnu_upper);
    row.note = "upper side uses the probe supremum, not a global certificate";
    res.checks.push_back(row);
  }
  {
    CheckRow row;
    row.condition = "non-compactness-indicator";
    row.verdict = cmp_ge_q(dual_inf, mpq_class(1, 2));
    row.lhs = fmt(res.dual_inf);
    row.rhs = "1/2";
    row.note = "dual functionals stay uniformly bounded away from zero";
    res.checks.push_back(row);
  }
  return res;
}

}  // namespace sgm
