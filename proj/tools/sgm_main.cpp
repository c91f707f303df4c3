// sgm: command-line surface over the certified-norm laboratory.
//
// Subcommands: norm, tree, params, operator, gm, report.  Every command emits
// one JSON document (sorted keys, no timestamps) so that identical
// configuration and seed produce byte-identical output.  Exit status is 0
// exactly when every hard assertion row passes; measurement tables never
// affect the exit status.  Configuration and input errors exit with 2.

#include "sgm/block_operator.hpp"
#include "sgm/corpus.hpp"
#include "sgm/gmspace.hpp"
#include "sgm/params.hpp"
#include "sgm/report.hpp"
#include "sgm/snorm.hpp"
#include "sgm/symbolic.hpp"
#include "sgm/tower.hpp"
#include "sgm/tree.hpp"
#include "sgm/vector.hpp"

#include "CLI11.hpp"

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace sgm;

struct GlobalOpts {
  long precision = 128;
  std::string system;  // "", "toy", "honest", or a JSON config path
  std::string corpus;
  std::string out = "-";
  std::string csv;
  std::uint64_t seed = 1;
  bool surrogate = false;
};

mpq_class parse_q(const std::string& s) {
  mpq_class q;
  if (mpq_set_str(q.get_mpq_t(), s.c_str(), 10) != 0)
    throw std::runtime_error("bad rational literal: " + s);
  if (q.get_den() == 0) throw std::runtime_error("zero denominator: " + s);
  q.canonicalize();
  return q;
}

std::shared_ptr<ParameterSystem> load_system(const GlobalOpts& g) {
  if (g.system.empty())
    return g.surrogate ? ParameterSystem::toy() : ParameterSystem::honest();
  if (g.system == "toy") return ParameterSystem::toy();
  if (g.system == "honest") return ParameterSystem::honest();
  std::ifstream in(g.system);
  if (!in) throw std::runtime_error("cannot open system config: " + g.system);
  Json cfg_json;
  try {
    cfg_json = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw std::runtime_error(std::string("system config JSON: ") + e.what());
  }
  ParameterSystem::Config cfg;
  if (cfg_json.contains("rule")) cfg.rule = cfg_json["rule"].get<std::string>();
  if (cfg_json.contains("ks"))
    cfg.ks = cfg_json["ks"].get<std::vector<unsigned long>>();
  if (cfg_json.contains("count")) cfg.count = cfg_json["count"].get<std::size_t>();
  if (cfg_json.contains("precision"))
    cfg.prec = cfg_json["precision"].get<long>();
  if (cfg_json.contains("eps_scale")) {
    const Json& e = cfg_json["eps_scale"];
    cfg.eps_scale = e.is_string() ? parse_q(e.get<std::string>())
                                  : mpq_class(e.get<long>());
  }
  if (cfg_json.contains("c")) cfg.c_override = cfg_json["c"].get<unsigned long>();
  if (cfg_json.contains("d")) cfg.d_override = cfg_json["d"].get<unsigned long>();
  if (cfg_json.contains("Ls"))
    cfg.Ls = cfg_json["Ls"].get<std::vector<unsigned long>>();
  return ParameterSystem::from_config(cfg);
}

std::string iv_str(const Interval& v, int digits = 12) {
  return "[" + dec_lo(v, digits) + ", " + dec_hi(v, digits) + "]";
}

Verdict overlap_v(const Interval& a, const Interval& b) {
  if (mpfr_cmp(a.hi(), b.lo()) < 0 || mpfr_cmp(b.hi(), a.lo()) < 0)
    return Verdict::fail;
  return Verdict::pass;
}

CheckRow make_row(std::string cond, Verdict v, std::string lhs, std::string rhs,
                  std::string note = "") {
  CheckRow r;
  r.condition = std::move(cond);
  r.verdict = v;
  r.lhs = std::move(lhs);
  r.rhs = std::move(rhs);
  r.note = std::move(note);
  return r;
}

std::size_t not_pass_count(const std::vector<CheckRow>& rows) {
  std::size_t n = 0;
  for (const auto& r : rows)
    if (r.verdict != Verdict::pass) ++n;
  return n;
}

// hard rows decide the exit status; measure rows are appended to the CSV only
int finish(const GlobalOpts& g, Json& j, const std::vector<CheckRow>& hard_rows,
           const std::vector<CheckRow>& measure_rows) {
  const std::size_t hard = not_pass_count(hard_rows);
  j["hard_failures"] = hard;
  write_report(j, g.out);
  if (!g.csv.empty()) {
    std::vector<CheckRow> all = hard_rows;
    all.insert(all.end(), measure_rows.begin(), measure_rows.end());
    std::ofstream f(g.csv, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open CSV output: " + g.csv);
    f << csv_rows(all);
  }
  return hard == 0 ? 0 : 1;
}

Json witness_json(const PartitionWitness& w) {
  Json j;
  j["slots"] = w.slots;
  j["value"] = interval_json(w.value);
  Json parts = Json::array();
  for (const auto& p : w.parts) parts.push_back(Json::array({p.first, p.second}));
  j["parts"] = parts;
  return j;
}

Json tower_json(const TowerReal& t) {
  Json j;
  j["height"] = t.height();
  j["top"] = interval_json(t.top());
  return j;
}

Json system_json(const ParameterSystem& sys) {
  Json j;
  j["name"] = sys.name();
  j["surrogate"] = sys.surrogate();
  j["precision_bits"] = static_cast<std::int64_t>(sys.prec());
  j["c"] = sys.c();
  j["d"] = sys.d();
  j["k_count"] = sys.k_count();
  j["J_count"] = sys.J_count();
  j["has_threshold"] = sys.C_threshold().has_value();
  Json eps = Json::array();
  for (std::size_t i = 1; i <= 3; ++i) eps.push_back(sys.eps(i).get_str());
  j["eps"] = eps;
  return j;
}

// ---- norm ----------------------------------------------------------------

struct NormOpts {
  std::string literal;
  std::uint64_t ell = 0;
  std::string tail;
  bool brute = false;
  bool no_witness = false;
};

int run_norm(const GlobalOpts& g, const NormOpts& o) {
  const mpfr_prec_t prec = g.precision;
  FiniteVector x = FiniteVector::parse(o.literal);
  Json j;
  j["command"] = "norm";
  j["input"] = o.literal;
  j["precision_bits"] = static_cast<std::int64_t>(prec);
  j["support"] = x.support_size();
  j["l1"] = x.l1().get_str();
  j["linf"] = x.linf().get_str();
  std::vector<CheckRow> rows;
  Interval value(prec);
  if (!o.tail.empty()) {
    if (o.ell > 0) throw std::runtime_error("--ell and --tail are exclusive");
    mpq_class r = parse_q(o.tail);
    TailNormResult res = tail_norm(x, r, prec);
    value = res.value;
    j["mode"] = "tail";
    j["r"] = o.tail;
    j["witness_l"] = res.witness_l;
    if (!o.no_witness && !x.empty()) {
      PartitionWitness w =
          best_partition(x, std::max<std::uint64_t>(res.witness_l, 1), prec);
      j["witness"] = witness_json(w);
      rows.push_back(make_row("witness-reeval",
                              overlap_v(eval_partition(x, w, prec), w.value),
                              iv_str(eval_partition(x, w, prec)),
                              iv_str(w.value)));
    }
  } else if (o.ell > 0) {
    value = ell_norm(x, o.ell, prec);
    j["mode"] = "ell";
    j["ell"] = o.ell;
    if (!o.no_witness && !x.empty()) {
      PartitionWitness w = best_partition(x, o.ell, prec);
      j["witness"] = witness_json(w);
      rows.push_back(make_row("witness-reeval",
                              overlap_v(eval_partition(x, w, prec), w.value),
                              iv_str(eval_partition(x, w, prec)),
                              iv_str(w.value)));
      rows.push_back(make_row("witness-attains", overlap_v(w.value, value),
                              iv_str(w.value), iv_str(value)));
    }
  } else {
    value = s_norm(x, prec);
    j["mode"] = "s";
    if (!o.no_witness && !x.empty()) {
      CertNode c = norm_certificate(x, prec);
      const bool valid = check_certificate(c);
      Interval pv = certificate_value(c, x, prec);
      j["witness"] = cert_str(c);
      rows.push_back(make_row("witness-valid",
                              valid ? Verdict::pass : Verdict::fail,
                              valid ? "structural" : "invalid", "valid"));
      rows.push_back(make_row("witness-attains", overlap_v(pv, value),
                              iv_str(pv), iv_str(value)));
    }
    if (o.brute) {
      if (x.support_size() > 9)
        throw std::runtime_error("--brute needs support size <= 9");
      Interval bv = brute_force_norm(x, prec);
      j["brute"] = interval_json(bv);
      rows.push_back(make_row("oracle-overlap", overlap_v(bv, value),
                              iv_str(bv), iv_str(value)));
    }
  }
  j["value"] = interval_json(value);
  j["rows"] = rows_json(rows);
  return finish(g, j, rows, {});
}

// ---- tree ----------------------------------------------------------------

struct TreeOpts {
  std::vector<std::uint64_t> ks;
  std::size_t length = 0;
  std::uint64_t offset = 1;
  long level = -1;
};

int run_tree(const GlobalOpts& g, const TreeOpts& o) {
  const mpfr_prec_t prec = g.precision;
  FinTree t = FinTree::from_stream(o.ks, o.length);
  Placement p = Placement::pack(t.leaf_count(), o.offset);
  SymVector xv = associated_vector(t, p);
  SymVector xf = associated_functional(t, p);
  Json j;
  j["command"] = "tree";
  j["ks"] = o.ks;
  j["length"] = o.length;
  j["leaves"] = t.leaf_count();
  j["nodes"] = t.nodes_lex().size();
  j["literal"] = t.literal();
  j["window"] = Json::array({p.slots.front(), p.slots.back()});
  j["precision_bits"] = static_cast<std::int64_t>(prec);
  std::vector<CheckRow> rows;

  SymSum ab;
  for (const TreeNode& mu : t.leaves()) ab = ab + SymSum(alpha(t, mu) * beta(t, mu));
  rows.push_back(make_row("alpha-beta-sum",
                          ab == SymSum(mpq_class(1)) ? Verdict::pass : Verdict::fail,
                          ab.str(), "1"));

  CertNode c = functional_certificate(t, p);
  const bool valid = check_certificate(c);
  rows.push_back(make_row("certificate", valid ? Verdict::pass : Verdict::fail,
                          valid ? "structural" : "invalid", "valid"));

  SymSum pr = sym_pairing(xf, xv);
  rows.push_back(make_row("pairing",
                          pr == SymSum(mpq_class(1)) ? Verdict::pass : Verdict::fail,
                          pr.str(), "1"));

  if (t.leaf_count() <= kMaxDPSupport) {
    std::vector<Interval> mags;
    for (const Interval& v : xv.eval_coords(prec)) mags.push_back(abs_i(v));
    Interval nv = s_norm_mags(mags, prec);
    j["vector_norm"] = interval_json(nv);
    const mpq_class near_one =
        mpq_class(1) - mpq_class(1, mpz_class("1000000000000000"));
    rows.push_back(make_row("norm-at-least-one", cmp_ge_q(nv, near_one),
                            iv_str(nv), near_one.get_str()));
    rows.push_back(make_row("norm-at-most-two", cmp_le_q(nv, mpq_class(2)),
                            iv_str(nv), "2"));
  }

  if (t.leaf_count() <= 64) {
    j["vector"] = xv.str();
    j["functional"] = xf.str();
  }

  if (o.level >= 0) {
    const auto k = static_cast<std::size_t>(o.level);
    auto parts = level_decomposition(t, p, k, false);
    SymVector recomb;
    for (const auto& part : parts) recomb = recomb + part.part.scaled(part.coeff);
    rows.push_back(make_row("level-recombination",
                            recomb == xv ? Verdict::pass : Verdict::fail,
                            "sum of " + std::to_string(parts.size()) + " parts",
                            "associated vector"));
    auto fparts = level_decomposition(t, p, k, true);
    SymVector frecomb;
    for (const auto& part : fparts)
      frecomb = frecomb + part.part.scaled(part.coeff);
    rows.push_back(make_row("level-recombination-functional",
                            frecomb == xf ? Verdict::pass : Verdict::fail,
                            "sum of " + std::to_string(fparts.size()) + " parts",
                            "associated functional"));
    j["level"] = k;
    j["level_parts"] = parts.size();
  }

  j["rows"] = rows_json(rows);
  return finish(g, j, rows, {});
}

// ---- params --------------------------------------------------------------

struct ParamsOpts {
  std::size_t eps_max = 3;
  std::size_t grid = 6;
  unsigned long r0 = 0;  // 0 = auto: 2 for surrogates, 2^(2^1024) for honest
  std::size_t r_exp2 = 0;
  std::size_t terms = 4;
  std::size_t cost_prefix = 6;
  std::string cost_budget = "2";
};

int run_params(const GlobalOpts& g, const ParamsOpts& o) {
  auto sys = load_system(g);
  Json j;
  j["command"] = "params";
  j["system"] = system_json(*sys);
  std::vector<CheckRow> hard;
  Json checks;

  auto add_section = [&](const std::string& name, std::vector<CheckRow> rows) {
    checks[name] = rows_json(rows);
    hard.insert(hard.end(), rows.begin(), rows.end());
  };

  add_section("growth_base", check_growth_base(*sys));
  add_section("power_growth", check_power_growth(*sys, o.grid));
  for (std::size_t jx = 1; jx <= o.eps_max; ++jx)
    add_section("eps_budget_" + std::to_string(jx), check_eps_budget(*sys, jx));
  add_section("lacunary_J", check_J(*sys));
  add_section("sigma", sys->sigma_check());

  unsigned long r0 = o.r0;
  std::size_t r_exp2 = o.r_exp2;
  if (r0 == 0) {
    r0 = sys->surrogate() ? 2 : 1024;
    r_exp2 = sys->surrogate() ? 0 : 2;
  }
  TowerReal r = TowerReal::from_ui(r0, sys->prec());
  for (std::size_t i = 0; i < r_exp2; ++i) r = TowerReal::exp2_of(r);
  GainSeriesResult gs = check_gain_series(r, *sys, o.terms);
  Json gsj;
  gsj["bracket"] = gs.bracket;
  gsj["lhs_prefix"] = interval_json(gs.lhs_prefix);
  gsj["lhs_upper"] = interval_json(gs.lhs_upper);
  gsj["rhs"] = gs.rhs.get_str();
  gsj["verdict"] = to_string(gs.verdict);
  j["gain_series"] = gsj;
  add_section("gain_series", gs.rows);

  CostSumResult cs = sum_inv_cost_over_J(*sys, o.cost_prefix, parse_q(o.cost_budget));
  Json csj;
  csj["prefix_sum"] = interval_json(cs.prefix_sum);
  csj["total_upper"] = interval_json(cs.total_upper);
  csj["verdict"] = to_string(cs.verdict);
  j["cost_sum"] = csj;
  add_section("cost_sum", cs.rows);

  GainResult gr = gain_of(r, *sys);
  Json grj;
  grj["log2_value"] = interval_json(gr.log2_value);
  grj["value"] = interval_json(gr.value);
  grj["argmax"] = gr.argmax;
  grj["terms"] = gr.terms;
  grj["cutoff"] = to_string(gr.cutoff);
  j["gain_at_r"] = grj;

  Json rsj = Json::array();
  for (const TowerReal& rl : r_sequence(r, 4, sys->prec()))
    rsj.push_back(tower_json(rl));
  j["r_sequence"] = rsj;

  Json inv;
  inv["total"] = interval_json(sys->inv_f_J_total(g.precision));
  j["inv_f_J"] = inv;

  j["checks"] = checks;
  return finish(g, j, hard, {});
}

// ---- operator ------------------------------------------------------------

struct OperatorOpts {
  std::vector<std::uint64_t> ks = {2, 3, 4, 5};
  std::vector<std::size_t> lengths = {0, 1, 1, 2};
  std::vector<std::uint64_t> ell_grid = {2, 4, 8};
  std::vector<std::string> nu;
  bool matching = false;
};

int run_operator(const GlobalOpts& g, const OperatorOpts& o) {
  const mpfr_prec_t prec = g.precision;
  auto sys = load_system(g);
  XStarSequence xs = build_xstars(o.ks, o.lengths, prec);
  Json j;
  j["command"] = "operator";
  j["system"] = system_json(*sys);
  j["precision_bits"] = static_cast<std::int64_t>(prec);
  std::vector<CheckRow> hard;
  std::vector<CheckRow> measure;

  Json items = Json::array();
  for (std::size_t n = 1; n <= xs.count(); ++n) {
    const XStarItem& it = xs.at(n);
    Json ij;
    ij["window"] = Json::array({it.lo, it.hi});
    ij["length"] = it.length;
    ij["leaves"] = it.tree.leaf_count();
    ij["vec_norm"] = interval_json(it.vec_norm);
    ij["dual_lower"] = interval_json(it.dual_lower);
    items.push_back(ij);
    hard.push_back(make_row("item-" + std::to_string(n) + "-le2", it.vec_le2,
                            iv_str(it.vec_norm), "2"));
    hard.push_back(make_row(
        "item-" + std::to_string(n) + "-pairing",
        it.pairing == SymSum(mpq_class(1)) ? Verdict::pass : Verdict::fail,
        it.pairing.str(), "1"));
  }
  j["items"] = items;

  if (o.matching) {
    for (std::size_t n = 1; n <= xs.count(); ++n) {
      SymVector out = apply_T(xs, xs.at(n).vector);
      SymVector expected;
      expected.set(n, SymSum(mpq_class(1)));
      hard.push_back(make_row("matching-slot-" + std::to_string(n),
                              out == expected ? Verdict::pass : Verdict::fail,
                              out.str(), "e_" + std::to_string(n)));
    }
  }

  // single-coordinate domination ratios over the grid: fresh depth-0 items so
  // each slot is a plain basis vector and the ratio is exactly 1/f(l)
  if (!o.ell_grid.empty()) {
    std::uint64_t lmax = 0;
    for (std::uint64_t l : o.ell_grid) lmax = std::max(lmax, l);
    if (lmax < 2 || lmax > 64) throw std::runtime_error("ell grid out of range");
    std::vector<std::uint64_t> gks;
    std::vector<std::size_t> glen;
    for (std::uint64_t i = 0; i < lmax; ++i) {
      gks.push_back(i + 2);
      glen.push_back(0);
    }
    XStarSequence grid_xs = build_xstars(gks, glen, prec);
    Json grid = Json::array();
    for (std::uint64_t l : o.ell_grid) {
      std::vector<SymVector> zs;
      std::vector<mpq_class> lambdas(l, 0);
      lambdas[0] = 1;
      for (std::uint64_t i = 1; i <= l; ++i)
        zs.push_back(SymVector::from_rational(FiniteVector::unit(i)));
      Check21Result res = check_21(grid_xs, zs, lambdas, l, mpq_class(1), prec);
      Interval ratio = div(res.lhs, res.rhs);
      Json row;
      row["ell"] = l;
      row["lhs"] = interval_json(res.lhs);
      row["rhs"] = interval_json(res.rhs);
      row["ratio"] = interval_json(ratio);
      grid.push_back(row);
      measure.push_back(make_row("ratio-ell-" + std::to_string(l),
                                 overlap_v(ratio, recip(f_of_ui(l, prec))),
                                 iv_str(ratio),
                                 iv_str(recip(f_of_ui(l, prec)))));
    }
    j["ell_grid"] = grid;
  }

  std::vector<FiniteVector> probes;
  std::vector<std::string> labels;
  if (!g.corpus.empty()) {
    Corpus c = load_corpus(g.corpus);
    probes = c.items;
    labels = c.labels;
  } else {
    for (const char* lit : {"1:1", "2:1 3:1", "1:1 2:1 3:1 4:1 5:1"}) {
      probes.push_back(FiniteVector::parse(lit));
      labels.push_back(lit);
    }
  }
  std::vector<mpq_class> nu;
  if (o.nu.empty()) {
    nu.assign(xs.count(), mpq_class(1));
  } else {
    if (o.nu.size() != xs.count())
      throw std::runtime_error("--nu needs one entry per item");
    for (const std::string& s : o.nu) nu.push_back(parse_q(s));
  }
  OperatorReport rep = operator_norm_report(xs, probes, nu, *sys, prec);
  Json probe_rows = Json::array();
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    const OperatorRow& r = rep.rows[i];
    Json pj;
    pj["label"] = i < labels.size() ? labels[i] : r.label;
    pj["x_norm"] = interval_json(r.x_norm);
    pj["tx_norm"] = interval_json(r.tx_norm);
    pj["ratio_upper"] = interval_json(r.ratio_upper);
    pj["gm_upper"] = interval_json(r.gm_upper);
    probe_rows.push_back(pj);
  }
  j["probes"] = probe_rows;
  j["sup_ratio"] = interval_json(rep.sup_ratio);
  j["dual_inf"] = interval_json(rep.dual_inf);
  j["tnu_lower"] = interval_json(rep.tnu_lower);
  j["tnu_upper"] = interval_json(rep.tnu_upper);
  hard.insert(hard.end(), rep.checks.begin(), rep.checks.end());

  j["rows"] = rows_json(hard);
  j["measure_rows"] = rows_json(measure);
  return finish(g, j, hard, measure);
}

// ---- gm ------------------------------------------------------------------

struct GmOpts {
  std::string literal;
  std::size_t depth = 1;
  std::uint64_t max_ell = 3;
  std::size_t max_emit = 4096;
  std::size_t max_special_ell = 1;
  bool audit = false;
  std::size_t audit_limit = 500;
  bool spreading = false;
  std::uint64_t k = 2;
  std::uint64_t N = 1;
  std::vector<std::uint64_t> N_grid;
  std::vector<std::string> lambdas;
};

int run_gm(const GlobalOpts& g, const GmOpts& o) {
  const mpfr_prec_t prec = g.precision;
  auto sys = load_system(g);
  Json j;
  j["command"] = "gm";
  j["system"] = system_json(*sys);
  j["precision_bits"] = static_cast<std::int64_t>(prec);
  std::vector<CheckRow> hard;
  std::vector<CheckRow> measure;

  if (o.spreading) {
    std::vector<mpq_class> lambdas;
    if (o.lambdas.empty()) {
      lambdas.assign(o.k, mpq_class(1));
    } else {
      for (const std::string& s : o.lambdas) lambdas.push_back(parse_q(s));
    }
    std::vector<std::uint64_t> grid = o.N_grid;
    if (grid.empty()) grid.push_back(o.N);
    Json sweep = Json::array();
    std::optional<Interval> prev_registry;
    for (std::uint64_t n : grid) {
      SpreadingGap gap = spreading_gap(lambdas, n, *sys, prec);
      Json gj;
      gj["N"] = n;
      gj["coarse"] = interval_json(gap.coarse_bound);
      gj["registry"] = interval_json(gap.registry_bound);
      sweep.push_back(gj);
      if (n == grid.front()) {
        j["coarse"] = interval_json(gap.coarse_bound);
        j["registry"] = interval_json(gap.registry_bound);
        j["s_norm_base"] = interval_json(gap.s_norm_base);
        j["upper_shifted"] = interval_json(gap.upper_shifted);
        j["width"] = interval_json(gap.width);
        j["placement"] = gap.placement;
        hard.insert(hard.end(), gap.rows.begin(), gap.rows.end());
      }
      if (prev_registry) {
        // upper ends of the refinement must not grow as the window moves right
        const bool mono =
            mpfr_cmp(gap.registry_bound.hi(), prev_registry->hi()) <= 0;
        hard.push_back(make_row("registry-nonincreasing-N" + std::to_string(n),
                                mono ? Verdict::pass : Verdict::fail,
                                iv_str(gap.registry_bound),
                                iv_str(*prev_registry)));
      }
      prev_registry = gap.registry_bound;
    }
    j["k"] = o.k;
    j["N"] = grid.front();
    j["sweep"] = sweep;
    j["rows"] = rows_json(hard);
    return finish(g, j, hard, measure);
  }

  if (o.literal.empty())
    throw std::runtime_error("gm needs a vector literal or --spreading");
  FiniteVector x = FiniteVector::parse(o.literal);
  if (x.empty()) throw std::runtime_error("gm needs a nonzero vector");
  GMBudget budget;
  budget.max_ell = o.max_ell;
  budget.max_emit = o.max_emit;
  budget.max_special_ell = o.max_special_ell;
  GMLower lower = gm_lower_bound(x, o.depth, budget, *sys, prec);
  GMUpper upper = gm_upper_bound(x, *sys, prec);
  j["x"] = o.literal;
  Json lj;
  lj["value"] = interval_json(lower.value);
  lj["depth"] = o.depth;
  lj["witness"] = lower.witness.describe();
  lj["enumerated"] = lower.enumerated;
  lj["witness_injected"] = lower.witness_injected;
  j["lower"] = lj;
  Json uj;
  uj["value"] = interval_json(upper.value);
  uj["split"] = upper.split;
  uj["s_part"] = interval_json(upper.s_part);
  uj["j_part"] = interval_json(upper.j_part);
  uj["tail"] = interval_json(upper.remainder);
  uj["exact_members"] = upper.exact_members;
  j["upper"] = uj;
  j["gap"] = interval_json(sub(upper.value, lower.value));
  hard.push_back(make_row("sandwich-consistent",
                          mpfr_cmp(lower.value.lo(), upper.value.hi()) <= 0
                              ? Verdict::pass
                              : Verdict::fail,
                          iv_str(lower.value), iv_str(upper.value)));
  measure.insert(measure.end(), upper.rows.begin(), upper.rows.end());

  if (o.audit) {
    std::uint64_t wlo = x.min_index(), whi = x.max_index();
    auto funcs = enumerate_gm(o.depth, wlo, whi, budget, *sys);
    std::size_t audited = 0, recon_ok = 0, support_ok = 0, aco_bad = 0;
    for (const auto& f : funcs) {
      if (audited >= o.audit_limit) break;
      ++audited;
      SGMDecomposition dec = sgm_decompose(f, *sys);
      if (dec.reconstruction == Verdict::pass) ++recon_ok;
      if (dec.supports == Verdict::pass) ++support_ok;
      for (const auto& row : dec.audit)
        if (row.verdict == Verdict::fail) ++aco_bad;
    }
    Json aj;
    aj["audited"] = audited;
    aj["reconstruction_ok"] = recon_ok;
    aj["supports_ok"] = support_ok;
    j["audit"] = aj;
    hard.push_back(make_row("audit-reconstruction",
                            recon_ok == audited ? Verdict::pass : Verdict::fail,
                            std::to_string(recon_ok), std::to_string(audited)));
    hard.push_back(make_row("audit-supports",
                            support_ok == audited ? Verdict::pass : Verdict::fail,
                            std::to_string(support_ok), std::to_string(audited)));
    hard.push_back(make_row("audit-aco",
                            aco_bad == 0 ? Verdict::pass : Verdict::fail,
                            std::to_string(aco_bad) + " failures", "0"));
  }

  j["rows"] = rows_json(hard);
  j["measure_rows"] = rows_json(measure);
  return finish(g, j, hard, measure);
}

// ---- report (bundle) -----------------------------------------------------

struct ReportOpts {
  std::size_t corpus_count = 20;
  std::uint64_t flat_max = 8;
};

int run_report(const GlobalOpts& g, const ReportOpts& o) {
  const mpfr_prec_t prec = g.precision;
  auto sys = load_system(g);
  Json j;
  j["command"] = "report";
  j["system"] = system_json(*sys);
  j["precision_bits"] = static_cast<std::int64_t>(prec);
  j["seed"] = g.seed;
  std::vector<CheckRow> hard;
  std::vector<CheckRow> measure;

  // flat-vector law: the norm of n leading ones is n/f(n)
  for (std::uint64_t n = 1; n <= o.flat_max; ++n) {
    FiniteVector flat;
    for (std::uint64_t i = 1; i <= n; ++i)
      flat = flat.plus(FiniteVector::unit(i));
    Interval lhs = s_norm(flat, prec);
    Interval rhs = div(Interval::from_ui(n, prec), f_of_ui(n, prec));
    hard.push_back(make_row("flat-" + std::to_string(n), overlap_v(lhs, rhs),
                            iv_str(lhs), iv_str(rhs)));
  }

  // corpus: serial against the parallel kernel, endpoint for endpoint
  Corpus corpus;
  if (!g.corpus.empty()) {
    corpus = load_corpus(g.corpus);
  } else {
    RandomCorpusSpec spec;
    spec.count = o.corpus_count;
    spec.seed = g.seed;
    corpus = random_corpus(spec);
  }
  std::vector<Interval> serial = corpus_norms_serial(corpus, prec);
  std::vector<Interval> parallel = corpus_norms_parallel(corpus, prec);
  Json cj = Json::array();
  std::size_t mismatches = 0;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const bool same = mpfr_equal_p(serial[i].lo(), parallel[i].lo()) != 0 &&
                      mpfr_equal_p(serial[i].hi(), parallel[i].hi()) != 0;
    if (!same) ++mismatches;
    Json row;
    row["label"] = corpus.labels[i];
    row["norm"] = interval_json(serial[i]);
    cj.push_back(row);
  }
  j["corpus"] = cj;
  j["corpus_size"] = corpus.size();
  hard.push_back(make_row("corpus-parallel-identical",
                          mismatches == 0 ? Verdict::pass : Verdict::fail,
                          std::to_string(mismatches) + " mismatches", "0"));

  // structural summaries (measurement only at this level)
  std::vector<CheckRow> jrows = check_J(*sys);
  measure.insert(measure.end(), jrows.begin(), jrows.end());
  std::vector<CheckRow> srows = sys->sigma_check();
  measure.insert(measure.end(), srows.begin(), srows.end());
  j["params_rows"] = rows_json(jrows);

  SpreadingGap gap = spreading_gap({mpq_class(1), mpq_class(1)}, 1, *sys, prec);
  Json spj;
  spj["coarse"] = interval_json(gap.coarse_bound);
  spj["registry"] = interval_json(gap.registry_bound);
  j["spreading"] = spj;
  measure.insert(measure.end(), gap.rows.begin(), gap.rows.end());

  j["rows"] = rows_json(hard);
  return finish(g, j, hard, measure);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "certified interval laboratory: implicit norms, coefficient trees, "
      "growth parameters, diagonal operator measurements"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--precision", g.precision, "working precision in bits")
      ->envname("SGM_PRECISION")
      ->check(CLI::Range(32l, 4096l));
  app.add_option("--system", g.system,
                 "parameter system: toy, honest, or a JSON config path");
  app.add_option("--corpus", g.corpus, "vector corpus file (one literal per line)");
  app.add_option("--out", g.out, "output path for the JSON report (- = stdout)");
  app.add_option("--csv", g.csv, "also write verdict rows as CSV");
  app.add_option("--seed", g.seed, "seed for randomized corpora");
  app.add_flag("--surrogate", g.surrogate,
               "use the surrogate (toy) system when none is specified");

  NormOpts no;
  auto* norm_cmd = app.add_subcommand("norm", "certified norm of a vector literal");
  norm_cmd->fallthrough();
  norm_cmd->add_option("vector", no.literal, "literal, e.g. \"1:1 2:-1/2\"")
      ->required();
  norm_cmd->add_option("--ell", no.ell, "slot-constrained norm with this l");
  norm_cmd->add_option("--tail", no.tail, "tail norm with this rational marker");
  norm_cmd->add_flag("--brute", no.brute, "cross-check against the reference recursion");
  norm_cmd->add_flag("--no-witness", no.no_witness, "omit witnesses");

  TreeOpts to;
  auto* tree_cmd = app.add_subcommand("tree", "coefficient tree identities");
  tree_cmd->fallthrough();
  tree_cmd->add_option("--ks", to.ks, "branching stream, level-major")
      ->required()
      ->delimiter(',');
  tree_cmd->add_option("--length", to.length, "tree length (0 = single node)")
      ->required();
  tree_cmd->add_option("--offset", to.offset, "first basis slot of the placement");
  tree_cmd->add_option("--level", to.level, "also check recombination at this level");

  ParamsOpts po;
  auto* params_cmd = app.add_subcommand("params", "growth-condition verdict table");
  params_cmd->fallthrough();
  params_cmd->add_option("--eps-max", po.eps_max, "budget checks up to this index");
  params_cmd->add_option("--grid", po.grid, "sample grid size for power growth");
  params_cmd->add_option("--r", po.r0, "base point for the gain series");
  params_cmd->add_option("--r-exp2", po.r_exp2, "apply exp2 this many times to --r");
  params_cmd->add_option("--terms", po.terms, "gain series terms");
  params_cmd->add_option("--cost-prefix", po.cost_prefix, "cost sum prefix length");
  params_cmd->add_option("--cost-budget", po.cost_budget, "cost sum budget (rational)");

  OperatorOpts oo;
  auto* op_cmd = app.add_subcommand("operator", "diagonal operator measurements");
  op_cmd->fallthrough();
  op_cmd->add_option("--ks", oo.ks, "shared branching stream")->delimiter(',');
  op_cmd->add_option("--lengths", oo.lengths, "truncation length per item")
      ->delimiter(',');
  op_cmd->add_option("--ell-grid", oo.ell_grid, "domination ratio grid")
      ->delimiter(',');
  op_cmd->add_option("--nu", oo.nu, "diagonal multipliers (rationals)")
      ->delimiter(',');
  op_cmd->add_flag("--matching", oo.matching,
                   "verify slot vectors map to exact basis vectors");

  GmOpts go;
  auto* gm_cmd = app.add_subcommand("gm", "norming-set bounds and decompositions");
  gm_cmd->fallthrough();
  gm_cmd->add_option("vector", go.literal, "vector literal for sandwich bounds");
  gm_cmd->add_option("--depth", go.depth, "formation depth for the lower bound");
  gm_cmd->add_option("--max-ell", go.max_ell, "average length cap");
  gm_cmd->add_option("--max-emit", go.max_emit, "enumeration emission cap");
  gm_cmd->add_option("--max-special-ell", go.max_special_ell,
                     "special outer length cap (surrogate)");
  gm_cmd->add_flag("--audit", go.audit, "decompose every enumerated functional");
  gm_cmd->add_option("--audit-limit", go.audit_limit, "cap for --audit");
  gm_cmd->add_flag("--spreading", go.spreading, "spreading-gap mode");
  gm_cmd->add_option("--k", go.k, "number of unit coefficients (spreading)");
  gm_cmd->add_option("--N", go.N, "placement start (spreading)");
  gm_cmd->add_option("--N-grid", go.N_grid, "sweep starts (spreading)")
      ->delimiter(',');
  gm_cmd->add_option("--lambda", go.lambdas, "explicit coefficients (rationals)")
      ->delimiter(',');

  ReportOpts ro;
  auto* report_cmd = app.add_subcommand("report", "bundled deterministic report");
  report_cmd->fallthrough();
  report_cmd->add_option("--corpus-count", ro.corpus_count,
                         "random corpus size when no corpus file is given");
  report_cmd->add_option("--flat-max", ro.flat_max, "flat-law rows to include");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (norm_cmd->parsed()) return run_norm(g, no);
    if (tree_cmd->parsed()) return run_tree(g, to);
    if (params_cmd->parsed()) return run_params(g, po);
    if (op_cmd->parsed()) return run_operator(g, oo);
    if (gm_cmd->parsed()) return run_gm(g, go);
    if (report_cmd->parsed()) return run_report(g, ro);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
