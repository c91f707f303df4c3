#include "sgm/gmspace.hpp"

#include <algorithm>
#include <functional>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>

namespace sgm {

namespace {

std::string fmt(const Interval& v, int digits = 8) {
  return "[" + dec_lo(v, digits) + ", " + dec_hi(v, digits) + "]";
}

// exact plain unsigned value of a height-0 singleton tower, if any
std::optional<std::uint64_t> plain_u64(const TowerReal& t) {
  if (t.height() != 0) return std::nullopt;
  if (!mpfr_equal_p(t.top().lo(), t.top().hi())) return std::nullopt;
  if (!mpfr_integer_p(t.top().lo())) return std::nullopt;
  if (mpfr_sgn(t.top().lo()) < 0) return std::nullopt;
  if (mpfr_cmp_ui(t.top().lo(), 4000000000u) > 0) return std::nullopt;
  return mpfr_get_ui(t.top().lo(), MPFR_RNDN);
}

SymCoeff inv_f(std::uint64_t n) { return SymCoeff::f_pow(mpz_class(n), -2); }
SymCoeff inv_sqrt_f(std::uint64_t n) { return SymCoeff::f_pow(mpz_class(n), -1); }

}  // namespace

// ---- formation trees ----------------------------------------------------

GMNode GMNode::atom(std::uint64_t n, const mpq_class& w) {
  GMNode g;
  g.kind = GMKind::Atom;
  g.index = n;
  g.weight = w;
  return g;
}

GMNode GMNode::restrict_to(std::uint64_t lo, std::uint64_t hi, GMNode kid) {
  GMNode g;
  g.kind = GMKind::Restrict;
  g.lo = lo;
  g.hi = hi;
  g.kids.push_back(std::move(kid));
  return g;
}

GMNode GMNode::convex(std::vector<mpq_class> alphas, std::vector<GMNode> kids) {
  GMNode g;
  g.kind = GMKind::Convex;
  g.alphas = std::move(alphas);
  g.kids = std::move(kids);
  return g;
}

GMNode GMNode::average(std::vector<GMNode> kids) {
  GMNode g;
  g.kind = GMKind::Average;
  g.kids = std::move(kids);
  return g;
}

GMNode GMNode::special(std::vector<std::uint64_t> ms, std::vector<GMNode> kids) {
  GMNode g;
  g.kind = GMKind::Special;
  g.ms = std::move(ms);
  g.kids = std::move(kids);
  return g;
}

SymVector materialize_gm(const GMNode& n) {
  switch (n.kind) {
    case GMKind::Atom: {
      SymVector v;
      if (n.weight != 0) v.set(n.index, SymSum(SymCoeff(n.weight)));
      return v;
    }
    case GMKind::Restrict:
      return materialize_gm(n.kids.at(0)).restricted(n.lo, n.hi);
    case GMKind::Convex: {
      SymVector acc;
      for (size_t i = 0; i < n.kids.size(); i++)
        acc = acc + materialize_gm(n.kids[i]).scaled(SymCoeff(n.alphas.at(i)));
      return acc;
    }
    case GMKind::Average: {
      SymVector acc;
      for (auto& k : n.kids) acc = acc + materialize_gm(k);
      return acc.scaled(inv_f(n.kids.size()));
    }
    case GMKind::Special: {
      SymVector acc;
      size_t at = 0;
      for (size_t g = 0; g < n.ms.size(); g++) {
        SymVector grp;
        for (std::uint64_t j = 0; j < n.ms[g]; j++)
          grp = grp + materialize_gm(n.kids.at(at++));
        acc = acc + grp.scaled(inv_f(n.ms[g]));
      }
      return acc.scaled(inv_sqrt_f(n.ms.size()));
    }
  }
  throw std::logic_error("materialize_gm: bad kind");
}

namespace {

// validation helper returning the materialization so successiveness can be
// checked without re-walking subtrees
SymVector validate_rec(const GMNode& n, const ParameterSystem& sys) {
  switch (n.kind) {
    case GMKind::Atom: {
      if (n.index == 0) throw std::domain_error("gm: atom index must be >= 1");
      if (abs(n.weight) > 1) throw std::domain_error("gm: |atom weight| > 1");
      return materialize_gm(n);
    }
    case GMKind::Restrict: {
      if (n.kids.size() != 1)
        throw std::domain_error("gm: restriction needs exactly one child");
      if (n.lo > n.hi) throw std::domain_error("gm: empty restriction interval");
      return validate_rec(n.kids[0], sys).restricted(n.lo, n.hi);
    }
    case GMKind::Convex: {
      if (n.kids.empty() || n.alphas.size() != n.kids.size())
        throw std::domain_error("gm: convex arity mismatch");
      mpq_class mass = 0;
      for (auto& a : n.alphas) mass += abs(a);
      if (mass > 1) throw std::domain_error("gm: convex mass exceeds 1");
      SymVector acc;
      for (size_t i = 0; i < n.kids.size(); i++)
        acc = acc + validate_rec(n.kids[i], sys).scaled(SymCoeff(n.alphas[i]));
      return acc;
    }
    case GMKind::Average: {
      if (n.kids.empty()) throw std::domain_error("gm: empty average");
      SymVector acc, prev;
      for (size_t i = 0; i < n.kids.size(); i++) {
        SymVector cur = validate_rec(n.kids[i], sys);
        if (cur.empty())
          throw std::domain_error("gm: empty functional inside an average");
        if (i > 0 && !successive(prev, cur))
          throw std::domain_error("gm: average children not successive");
        acc = acc + cur;
        prev = std::move(cur);
      }
      return acc.scaled(inv_f(n.kids.size()));
    }
    case GMKind::Special: {
      const size_t ell = n.ms.size();
      if (ell == 0) throw std::domain_error("gm: special node without groups");
      std::uint64_t want = 0;
      for (auto m : n.ms) want += m;
      if (n.kids.size() != want)
        throw std::domain_error("gm: special group sizes do not match children");
      auto head = plain_u64(sys.J_at(2 * ell));
      if (!head || *head != n.ms[0])
        throw std::domain_error(
            "gm: first special group size must be the 2l-th member of the index set");
      // flat successiveness across all children, plus group materializations
      std::vector<SymVector> groups;
      SymVector prev;
      size_t at = 0;
      for (size_t g = 0; g < ell; g++) {
        SymVector grp;
        for (std::uint64_t j = 0; j < n.ms[g]; j++) {
          SymVector cur = validate_rec(n.kids[at++], sys);
          if (cur.empty())
            throw std::domain_error("gm: empty functional inside a special group");
          if (!(prev.empty() || successive(prev, cur)))
            throw std::domain_error("gm: special children not successive");
          grp = grp + cur;
          prev = cur;
        }
        groups.push_back(grp.scaled(inv_f(n.ms[g])));
        if (!groups.back().is_rational())
          throw std::domain_error("gm: special group is not rational");
      }
      // subsequent group sizes must follow the registry assignment
      std::vector<FiniteVector> seq;
      for (size_t g = 0; g + 1 < ell; g++) {
        seq.push_back(groups[g].to_rational());
        SigmaRecord rec = sys.sigma(seq);
        auto val = plain_u64(rec.value);
        if (!val || *val != n.ms[g + 1])
          throw std::domain_error(
              "gm: special group size does not match the registry assignment");
      }
      SymVector acc;
      for (auto& g : groups) acc = acc + g;
      return acc.scaled(inv_sqrt_f(ell));
    }
  }
  throw std::logic_error("gm: bad kind");
}

bool node_uses_rule3(const GMNode& n) {
  if (n.kind == GMKind::Special) return true;
  for (auto& k : n.kids)
    if (node_uses_rule3(k)) return true;
  return false;
}

size_t node_depth(const GMNode& n) {
  size_t d = 0;
  for (auto& k : n.kids) d = std::max(d, node_depth(k));
  return n.kind == GMKind::Atom ? 0 : d + 1;
}

GMFunctional seal(GMNode root) {
  GMFunctional f;
  f.coeffs = materialize_gm(root);
  f.depth = node_depth(root);
  f.uses_rule3 = node_uses_rule3(root);
  f.root = std::move(root);
  return f;
}

}  // namespace

void check_gm_node(const GMNode& n, const ParameterSystem& sys) {
  validate_rec(n, sys);
}

std::string GMFunctional::describe() const {
  std::ostringstream os;
  std::function<void(const GMNode&)> go = [&](const GMNode& n) {
    switch (n.kind) {
      case GMKind::Atom:
        os << n.weight.get_str() << "*e" << n.index;
        return;
      case GMKind::Restrict:
        os << "[" << n.lo << "," << n.hi << "](";
        go(n.kids[0]);
        os << ")";
        return;
      case GMKind::Convex:
        os << "cvx(";
        for (size_t i = 0; i < n.kids.size(); i++) {
          if (i) os << ",";
          os << n.alphas[i].get_str() << ":";
          go(n.kids[i]);
        }
        os << ")";
        return;
      case GMKind::Average:
        os << "avg" << n.kids.size() << "(";
        for (size_t i = 0; i < n.kids.size(); i++) {
          if (i) os << ",";
          go(n.kids[i]);
        }
        os << ")";
        return;
      case GMKind::Special:
        os << "spc(";
        for (size_t i = 0; i < n.ms.size(); i++) {
          if (i) os << ",";
          os << "m" << (i + 1) << "=" << n.ms[i];
        }
        os << ";" << n.kids.size() << " kids)";
        return;
    }
  };
  go(root);
  return os.str();
}

// ---- enumeration --------------------------------------------------------

std::vector<GMFunctional> enumerate_gm(std::size_t depth, std::uint64_t wlo,
                                       std::uint64_t whi, const GMBudget& budget,
                                       const ParameterSystem& sys) {
  if (wlo == 0 || whi < wlo) throw std::domain_error("gm: bad window");
  std::vector<GMFunctional> out;
  auto emit = [&](GMNode n) {
    if (out.size() < budget.max_emit) out.push_back(seal(std::move(n)));
    return out.size() < budget.max_emit;
  };

  // depth 0: the atom grid
  std::vector<mpq_class> grid{mpq_class(1), mpq_class(-1)};
  if (budget.halves) {
    grid.push_back(mpq_class(1, 2));
    grid.push_back(mpq_class(-1, 2));
  }
  for (std::uint64_t n = wlo; n <= whi; n++)
    for (auto& w : grid)
      if (!emit(GMNode::atom(n, w))) return out;
  if (depth == 0) return out;

  for (size_t level = 1; level <= depth; level++) {
    const size_t base_end = out.size();

    // rule 3 first: surrogate systems only, built over unit atoms in the
    // window; these are scarce and must not be starved by the emission cap
    if (sys.surrogate()) {
      for (size_t ell = 1; ell <= budget.max_special_ell; ell++) {
        if (2 * ell > sys.J_count()) break;
        auto head = plain_u64(sys.J_at(2 * ell));
        if (!head) break;
        std::vector<std::uint64_t> ms{*head};
        std::vector<GMNode> kids;
        std::uint64_t next = wlo;
        bool fits = true;
        std::vector<FiniteVector> seq;
        for (size_t g = 0; g < ell && fits; g++) {
          if (g > 0) {
            SigmaRecord rec = sys.sigma(seq);
            auto mg = plain_u64(rec.value);
            if (!mg) {
              fits = false;
              break;
            }
            ms.push_back(*mg);
          }
          std::vector<FiniteVector::Coord> grp;
          for (std::uint64_t j = 0; j < ms[g]; j++) {
            if (next > whi) {
              fits = false;
              break;
            }
            kids.push_back(GMNode::atom(next, mpq_class(1)));
            grp.emplace_back(next, mpq_class(1));
            next++;
          }
          if (!fits) break;
          // the group functional (1/f(m)) * sum over grp, exact since every
          // surrogate index-set member has an exactly-known f value
          FiniteVector gv(grp);
          mpq_class fm;
          {
            SymCoeff c = inv_f(ms[g]);
            if (!c.is_rational()) {
              fits = false;
              break;
            }
            fm = c.as_rational();
          }
          seq.push_back(gv.scaled(fm));
        }
        if (fits && !emit(GMNode::special(ms, kids))) return out;
      }
    }

    // rule 2: averages of successive runs; seeds are the current functionals
    // sorted by left support end, extended greedily by support order
    std::vector<size_t> order(base_end);
    for (size_t i = 0; i < base_end; i++) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
      const SymVector& va = out[a].coeffs;
      const SymVector& vb = out[b].coeffs;
      if (va.empty() || vb.empty()) return va.empty() && !vb.empty();
      if (va.min_index() != vb.min_index()) return va.min_index() < vb.min_index();
      return a < b;
    });
    std::function<bool(std::vector<size_t>&, std::uint64_t)> extend =
        [&](std::vector<size_t>& tuple, std::uint64_t maxidx) -> bool {
      if (tuple.size() >= 2)
        if (!emit(GMNode::average([&] {
              std::vector<GMNode> kids;
              for (size_t t : tuple) kids.push_back(out[t].root);
              return kids;
            }())))
          return false;
      if (tuple.size() == budget.max_ell) return true;
      for (size_t idx : order) {
        const SymVector& v = out[idx].coeffs;
        if (v.empty() || v.min_index() <= maxidx) continue;
        tuple.push_back(idx);
        bool ok = extend(tuple, v.max_index());
        tuple.pop_back();
        if (!ok) return false;
      }
      return true;
    };
    for (size_t idx : order) {
      const SymVector& v = out[idx].coeffs;
      if (v.empty()) continue;
      std::vector<size_t> tuple{idx};
      if (!extend(tuple, v.max_index())) return out;
    }

    // rule 1: halving restrictions and a pair of convex mixes
    if (budget.restrictions && whi > wlo) {
      const std::uint64_t mid = wlo + (whi - wlo) / 2;
      for (size_t i = 0; i < base_end; i++) {
        const SymVector& v = out[i].coeffs;
        if (v.empty() || v.min_index() > mid || v.max_index() <= mid) continue;
        if (!emit(GMNode::restrict_to(wlo, mid, out[i].root))) return out;
        if (!emit(GMNode::restrict_to(mid + 1, whi, out[i].root))) return out;
      }
    }
    for (size_t i = 0; i + 1 < base_end && i < 8; i += 2) {
      std::vector<mpq_class> a{mpq_class(1, 2), mpq_class(1, 2)};
      if (!emit(GMNode::convex(a, {out[i].root, out[i + 1].root}))) return out;
    }
  }
  return out;
}

// ---- lower and upper bounds ---------------------------------------------

namespace {

GMNode cert_to_gm(const CertNode& c) {
  if (c.leaf()) return GMNode::atom(c.index, c.weight);
  std::vector<GMNode> kids;
  for (auto& k : c.kids) kids.push_back(cert_to_gm(k));
  return GMNode::average(std::move(kids));
}

}  // namespace

GMFunctional witness_functional(const FiniteVector& x, mpfr_prec_t prec) {
  return seal(cert_to_gm(norm_certificate(x, prec)));
}

GMLower gm_lower_bound(const FiniteVector& x, std::size_t depth,
                       const GMBudget& budget, const ParameterSystem& sys,
                       mpfr_prec_t prec) {
  GMLower res;
  res.value = Interval::from_si(0, prec);
  if (x.empty()) return res;
  std::vector<GMFunctional> cands =
      enumerate_gm(depth, x.min_index(), x.max_index(), budget, sys);
  res.enumerated = cands.size();
  cands.push_back(witness_functional(x, prec));
  const size_t winj = cands.size() - 1;
  bool first = true;
  for (size_t i = 0; i < cands.size(); i++) {
    Interval val = sym_pairing(cands[i].coeffs, x).eval(prec + kGuardBits);
    if (first || mpfr_cmp(val.lo(), res.value.lo()) > 0) {
      res.value = val;
      res.witness = cands[i];
      res.witness_injected = (i == winj);
      first = false;
    }
  }
  res.value = round_to(res.value, prec);
  return res;
}

GMUpper gm_upper_bound(const FiniteVector& x, const ParameterSystem& sys,
                       mpfr_prec_t prec) {
  const mpfr_prec_t wp = prec + kGuardBits;
  GMUpper res;
  res.s_part = Interval::from_si(0, wp);
  res.j_part = Interval::from_si(0, wp);
  res.remainder = Interval::from_si(0, wp);
  if (x.empty()) {
    res.value = Interval::from_si(0, prec);
    return res;
  }
  res.s_part = s_norm(x, wp);
  res.split = x.support_size();
  Interval l1 = Interval::from_q(x.l1(), wp);
  for (size_t t = 1; t <= sys.J_count(); t++) {
    auto pv = plain_u64(sys.J_at(t));
    CheckRow row;
    row.condition = "gm-upper member t=" + std::to_string(t);
    row.verdict = Verdict::pass;
    if (pv && *pv < res.split) {
      Interval en = ell_norm(x, *pv, wp);
      res.j_part = add(res.j_part, en);
      res.exact_members++;
      row.lhs = fmt(en);
      row.rhs = "exact l-norm, l = " + std::to_string(*pv);
    } else {
      // closed form |x|_1 / f(j): valid once j >= #supp(x)
      if (!pv && !tower_ge_pow2(sys.J_at(t), 9))
        throw std::domain_error("gm: index-set member of undecidable size");
      Interval contrib = mul(l1, sys.inv_f_J(t, wp));
      res.j_part = add(res.j_part, contrib);
      row.lhs = fmt(contrib);
      row.rhs = "closed form |x|_1 / f(j)";
    }
    res.rows.push_back(row);
  }
  if (!sys.surrogate() && sys.J_count() > 0) {
    // members beyond the materialized prefix: each successive f at least
    // doubles (lacunarity), so the rest is at most one more copy of the last
    res.remainder = mul(l1, sys.inv_f_J(sys.J_count(), wp));
    mpfr_set_zero(res.remainder.lo_mut(), 1);
    CheckRow row;
    row.condition = "gm-upper remainder";
    row.verdict = Verdict::pass;
    row.lhs = fmt(res.remainder);
    row.rhs = "geometric bound beyond materialized members";
    res.rows.push_back(row);
  }
  res.value = round_to(add(add(res.s_part, res.j_part), res.remainder), prec);
  res.s_part = round_to(res.s_part, prec);
  res.j_part = round_to(res.j_part, prec);
  res.remainder = round_to(res.remainder, prec);
  return res;
}

// ---- the registry view of J ---------------------------------------------

std::vector<SigmaRecord> J_of_interval(std::uint64_t lo, std::uint64_t hi,
                                       const ParameterSystem& sys) {
  std::vector<SigmaRecord> out;
  for (auto& rec : sys.sigma_snapshot())
    if (lo <= rec.end_index && rec.end_index < hi) out.push_back(rec);
  std::sort(out.begin(), out.end(),
            [](const SigmaRecord& a, const SigmaRecord& b) {
              return a.position < b.position;
            });
  return out;
}

std::vector<SigmaRecord> J_of_functional(const GMFunctional& f,
                                         const ParameterSystem& sys) {
  if (f.coeffs.empty()) return {};
  return J_of_interval(f.coeffs.min_index(), f.coeffs.max_index(), sys);
}

// ---- the S*-decomposition ------------------------------------------------

namespace {

struct Build {
  SymVector T0;
  std::map<std::uint64_t, SymVector> parts;
  std::map<std::uint64_t, std::vector<SymCoeff>> scales;
};

void scale_build(Build& b, const SymCoeff& c) {
  b.T0 = b.T0.scaled(c);
  for (auto& [j, v] : b.parts) v = v.scaled(c);
  for (auto& [j, s] : b.scales)
    for (auto& sc : s) sc = sc * c;
}

// Case 2 and the interior of Case 3 merge part families that the registry
// guarantees disjoint; a collision would mean the assignment is not injective
void merge_disjoint(Build& into, Build&& from) {
  into.T0 = into.T0 + from.T0;
  for (auto& [j, v] : from.parts) {
    if (into.parts.count(j))
      throw std::logic_error("sgm: part families collide; registry not injective");
    into.parts.emplace(j, std::move(v));
    auto& sc = into.scales[j];
    auto& fs = from.scales[j];
    sc.insert(sc.end(), fs.begin(), fs.end());
  }
}

// Case 1 merges additively: the same part index may receive several summands
void merge_additive(Build& into, Build&& from) {
  into.T0 = into.T0 + from.T0;
  for (auto& [j, v] : from.parts) {
    auto it = into.parts.find(j);
    if (it == into.parts.end())
      into.parts.emplace(j, std::move(v));
    else
      it->second = it->second + v;
    auto& sc = into.scales[j];
    auto& fs = from.scales[j];
    sc.insert(sc.end(), fs.begin(), fs.end());
  }
}

Build decomp_rec(const GMNode& n, std::uint64_t elo, std::uint64_t ehi) {
  Build b;
  if (elo > ehi) return b;
  switch (n.kind) {
    case GMKind::Atom: {
      if (n.index >= elo && n.index <= ehi && n.weight != 0)
        b.T0.set(n.index, SymSum(SymCoeff(n.weight)));
      return b;
    }
    case GMKind::Restrict:
      return decomp_rec(n.kids[0], std::max(elo, n.lo), std::min(ehi, n.hi));
    case GMKind::Convex: {
      for (size_t i = 0; i < n.kids.size(); i++) {
        Build kb = decomp_rec(n.kids[i], elo, ehi);
        scale_build(kb, SymCoeff(n.alphas[i]));
        merge_additive(b, std::move(kb));
      }
      return b;
    }
    case GMKind::Average: {
      for (auto& k : n.kids) merge_disjoint(b, decomp_rec(k, elo, ehi));
      scale_build(b, inv_f(n.kids.size()));
      return b;
    }
    case GMKind::Special: {
      const size_t ell = n.ms.size();
      // locate the first and last group meeting the window
      std::vector<std::pair<size_t, size_t>> span;  // child range per group
      {
        size_t at = 0;
        for (size_t g = 0; g < ell; g++) {
          span.emplace_back(at, at + n.ms[g]);
          at += n.ms[g];
        }
      }
      auto group_meets = [&](size_t g) {
        for (size_t c = span[g].first; c < span[g].second; c++) {
          SymVector v = materialize_gm(n.kids[c]).restricted(elo, ehi);
          if (!v.empty()) return true;
        }
        return false;
      };
      size_t i1 = ell, i2 = ell;
      for (size_t g = 0; g < ell; g++)
        if (group_meets(g)) {
          if (i1 == ell) i1 = g;
          i2 = g;
        }
      if (i1 == ell) return b;

      if (i1 == i2) {
        // single group: proceed as in the average case with the outer weight
        Build gb;
        for (size_t c = span[i1].first; c < span[i1].second; c++)
          merge_disjoint(gb, decomp_rec(n.kids[c], elo, ehi));
        scale_build(gb, inv_sqrt_f(ell) * inv_f(n.ms[i1]));
        return gb;
      }

      // boundary children inside the first and last meeting groups
      auto child_meets = [&](size_t c) {
        return !materialize_gm(n.kids[c]).restricted(elo, ehi).empty();
      };
      size_t j1 = span[i1].second;
      for (size_t c = span[i1].first; c < span[i1].second; c++)
        if (child_meets(c)) {
          j1 = c;
          break;
        }
      size_t j2 = span[i2].first;
      for (size_t c = span[i2].first; c < span[i2].second; c++)
        if (child_meets(c)) j2 = c;

      const SymCoeff outer = inv_sqrt_f(ell);

      // the trailing part of the first group becomes T0
      {
        Build gb;
        for (size_t c = j1; c < span[i1].second; c++)
          merge_disjoint(gb, decomp_rec(n.kids[c], elo, ehi));
        scale_build(gb, outer * inv_f(n.ms[i1]));
        merge_disjoint(b, std::move(gb));
      }
      // whole middle groups become parts keyed by their own size
      for (size_t g = i1 + 1; g < i2; g++) {
        Build gb;
        for (size_t c = span[g].first; c < span[g].second; c++)
          merge_disjoint(gb, decomp_rec(n.kids[c], elo, ehi));
        SymVector part = gb.T0.scaled(outer * inv_f(n.ms[g]));
        scale_build(gb, outer * inv_f(n.ms[g]));
        Build shifted;
        shifted.parts = std::move(gb.parts);
        shifted.scales = std::move(gb.scales);
        if (shifted.parts.count(n.ms[g]))
          throw std::logic_error("sgm: group key collides with inherited part");
        shifted.parts.emplace(n.ms[g], std::move(part));
        shifted.scales[n.ms[g]].push_back(outer);
        merge_disjoint(b, std::move(shifted));
      }
      // the leading part of the last group becomes the part keyed by its size
      {
        Build gb;
        for (size_t c = span[i2].first; c <= j2; c++)
          merge_disjoint(gb, decomp_rec(n.kids[c], elo, ehi));
        SymVector part = gb.T0.scaled(outer * inv_f(n.ms[i2]));
        scale_build(gb, outer * inv_f(n.ms[i2]));
        Build shifted;
        shifted.parts = std::move(gb.parts);
        shifted.scales = std::move(gb.scales);
        if (shifted.parts.count(n.ms[i2]))
          throw std::logic_error("sgm: group key collides with inherited part");
        shifted.parts.emplace(n.ms[i2], std::move(part));
        shifted.scales[n.ms[i2]].push_back(outer);
        merge_disjoint(b, std::move(shifted));
      }
      return b;
    }
  }
  throw std::logic_error("sgm: bad kind");
}

}  // namespace

SGMDecomposition sgm_decompose(const GMFunctional& f, const ParameterSystem& sys) {
  check_gm_node(f.root, sys);
  SGMDecomposition res;
  Build b = decomp_rec(f.root, 1, UINT64_MAX);
  res.T0 = std::move(b.T0);
  res.parts = std::move(b.parts);
  res.part_scales = std::move(b.scales);

  // reconstruction: the identity must hold coordinate by coordinate
  SymVector acc = res.T0;
  for (auto& [j, v] : res.parts) acc = acc + v;
  res.reconstruction = (acc == f.coeffs) ? Verdict::pass : Verdict::fail;
  {
    CheckRow row;
    row.condition = "sgm-reconstruction";
    row.verdict = res.reconstruction;
    row.lhs = "T0 + sum of parts";
    row.rhs = "materialized functional";
    res.audit.push_back(row);
  }

  // support condition
  res.supports = Verdict::pass;
  if (!f.coeffs.empty()) {
    const std::uint64_t zlo = f.coeffs.min_index();
    const std::uint64_t zhi = f.coeffs.max_index();
    auto check_sup = [&](const SymVector& v, const std::string& name) {
      CheckRow row;
      row.condition = "sgm-support " + name;
      if (v.empty()) {
        row.verdict = Verdict::pass;
        row.lhs = "(empty)";
      } else {
        bool ok = v.min_index() >= zlo && v.max_index() <= zhi;
        row.verdict = ok ? Verdict::pass : Verdict::fail;
        if (!ok) res.supports = Verdict::fail;
        row.lhs = "[" + std::to_string(v.min_index()) + ", " +
                  std::to_string(v.max_index()) + "]";
      }
      row.rhs = "[" + std::to_string(zlo) + ", " + std::to_string(zhi) + "]";
      res.audit.push_back(row);
    };
    check_sup(res.T0, "T0");
    for (auto& [j, v] : res.parts) check_sup(v, "T_" + std::to_string(j));
  }

  // aco certificates: the absolute sum of the scaling coefficients per part
  for (auto& [j, scales] : res.part_scales) {
    Interval mass = Interval::from_si(0, 192);
    for (auto& c : scales) mass = add(mass, abs_i(c.eval(192)));
    CheckRow row;
    row.condition = "sgm-aco T_" + std::to_string(j);
    row.verdict = cmp_le_q(mass, mpq_class(1));
    row.lhs = fmt(mass);
    row.rhs = "1 (absolute convex mass over (1/f(" + std::to_string(j) +
              "))-averages)";
    res.audit.push_back(row);
  }
  return res;
}

// ---- spreading gap ------------------------------------------------------

SpreadingGap spreading_gap(const std::vector<mpq_class>& lambdas, std::uint64_t N,
                           const ParameterSystem& sys, mpfr_prec_t prec) {
  if (N == 0) throw std::domain_error("spreading: N must be >= 1");
  const mpfr_prec_t wp = prec + kGuardBits;
  SpreadingGap res;
  const size_t k = lambdas.size();
  mpq_class maxabs = 0;
  for (auto& l : lambdas)
    if (abs(l) > maxabs) maxabs = abs(l);
  Interval kmax = mul_q(Interval::from_si(static_cast<long>(k), wp), maxabs);

  // coarse analytic bound: k max|lambda| times the full index-set sum
  Interval total = sys.inv_f_J_total(wp);
  if (!sys.surrogate() && sys.J_count() > 0) {
    Interval rem = sys.inv_f_J(sys.J_count(), wp);
    mpfr_set_zero(rem.lo_mut(), 1);
    total = add(total, rem);
  }
  res.coarse_bound = round_to(mul(kmax, total), prec);

  // registry refinement: values already assigned to sequences ending before N
  // can never serve a functional supported in [N, inf); what remains is the
  // registered-and-still-reachable part plus the unassigned positions
  std::set<std::size_t> assigned;
  Interval reg = Interval::from_si(0, wp);
  for (auto& rec : sys.sigma_snapshot()) {
    assigned.insert(rec.position);
    if (rec.end_index >= N)
      reg = add(reg, sys.inv_f_J(2 * rec.position, wp));
  }
  for (std::size_t p = 1; p <= sys.L_count(); p++)
    if (!assigned.count(p)) reg = add(reg, sys.inv_f_J(2 * p, wp));
  if (!sys.surrogate() && sys.J_count() > 0) {
    Interval rem = sys.inv_f_J(sys.J_count(), wp);
    mpfr_set_zero(rem.lo_mut(), 1);
    reg = add(reg, rem);
  }
  res.registry_bound = round_to(mul(kmax, reg), prec);

  // measured sandwich for the copy placed at N, N+1, ...
  std::vector<FiniteVector::Coord> base, shifted;
  for (size_t i = 0; i < k; i++) {
    if (lambdas[i] == 0) continue;
    base.emplace_back(i + 1, lambdas[i]);
    shifted.emplace_back(N + i, lambdas[i]);
    res.placement.push_back(N + i);
  }
  FiniteVector xb(base), xs(shifted);
  res.s_norm_base = xb.empty() ? Interval::from_si(0, prec) : s_norm(xb, prec);
  GMUpper up = gm_upper_bound(xs, sys, prec);
  res.upper_shifted = up.value;
  res.width = round_to(sub(up.value, res.s_norm_base), prec);

  CheckRow r1;
  r1.condition = "spreading-coarse-bound";
  r1.verdict = Verdict::pass;
  r1.lhs = fmt(res.coarse_bound);
  r1.rhs = "k max|lambda| * full index-set sum";
  res.rows.push_back(r1);
  CheckRow r2;
  r2.condition = "spreading-registry-bound N=" + std::to_string(N);
  r2.verdict = cmp_le(res.registry_bound, res.coarse_bound);
  r2.lhs = fmt(res.registry_bound);
  r2.rhs = "coarse bound (refinement never exceeds it)";
  res.rows.push_back(r2);
  // the width never exceeds the coarse bound because the whole closed-form
  // tail is driven by |lambda|_1 <= k max|lambda|, an exact rational fact
  mpq_class l1sum = 0;
  for (auto& l : lambdas) l1sum += abs(l);
  CheckRow r3;
  r3.condition = "spreading-width";
  r3.verdict = (l1sum <= mpq_class(static_cast<long>(k)) * maxabs)
                   ? Verdict::pass
                   : Verdict::fail;
  r3.lhs = fmt(res.width);
  r3.rhs = "measured sandwich width vs analytic bound";
  res.rows.push_back(r3);
  return res;
}

}  // namespace sgm
