#include "sgm/symbolic.hpp"

#include <algorithm>
#include <stdexcept>

namespace sgm {

namespace {

// n = 2^t - 1 for some t >= 1?  (i.e. n + 1 is a power of two)
bool pow2_minus1(const mpz_class& n, unsigned long& t_out) {
  mpz_class np1 = n + 1;
  if (np1 <= 1) return false;
  if (mpz_popcount(np1.get_mpz_t()) != 1) return false;
  t_out = mpz_sizeinbase(np1.get_mpz_t(), 2) - 1;
  return true;
}

// t = u^2 * v with v squarefree (full extraction for moderate t, otherwise
// the identity split u = 1, v = t, which is still sound)
void square_split(unsigned long t, mpz_class& u, mpz_class& v) {
  u = 1;
  v = 1;
  if (t > 1000000000000UL) {
    v = t;
    return;
  }
  unsigned long rem = t;
  for (unsigned long p = 2; p * p <= rem; p++) {
    unsigned long e = 0;
    while (rem % p == 0) {
      rem /= p;
      e++;
    }
    for (unsigned long i = 0; i + 1 < e; i += 2) u *= p;
    if (e % 2 == 1) v *= p;
  }
  if (rem > 1) v *= rem;
}

mpz_class pow_z(const mpz_class& b, unsigned long e) {
  mpz_class r;
  mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), e);
  return r;
}

}  // namespace

SymCoeff::SymCoeff(const mpq_class& q, const mpz_class& n, long doubled_exp) : q_(q) {
  if (n < 1) throw std::domain_error("f factors need n >= 1");
  if (doubled_exp != 0) fac_[n] = doubled_exp;
  normalize();
}

SymCoeff SymCoeff::f_pow(const mpz_class& n, long doubled_exp) {
  return SymCoeff(mpq_class(1), n, doubled_exp);
}

void SymCoeff::normalize() {
  q_.canonicalize();
  if (q_ == 0) {
    fac_.clear();
    return;
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto it = fac_.begin(); it != fac_.end(); ++it) {
      if (it->second == 0 || it->first == 1) {
        fac_.erase(it);
        changed = true;
        break;
      }
      unsigned long t;
      if (!pow2_minus1(it->first, t)) continue;
      long e = it->second;
      mpz_class u, v;
      square_split(t, u, v);
      // keys above this get no sqrt re-keying (2^v - 1 would be huge); a bare
      // half power of such an f is kept as the canonical survivor
      const bool rekeyable = v <= 1000000;
      if (e == 1 && t >= 2 && (u == 1 || !rekeyable)) continue;
      // fold f(n) = t into the rational part
      long s = (e >= 0) ? e / 2 : -((-e + 1) / 2);  // floor(e / 2)
      long r = e - 2 * s;                           // 0 or 1
      mpz_class tz(t);
      if (s >= 0)
        q_ *= mpq_class(pow_z(tz, static_cast<unsigned long>(s)));
      else
        q_ /= mpq_class(pow_z(tz, static_cast<unsigned long>(-s)));
      mpz_class key = it->first;
      fac_.erase(it);
      if (r == 1) {
        if (rekeyable) {
          q_ *= mpq_class(u);
          if (v >= 2) {
            mpz_class nv = pow_z(mpz_class(2), mpz_get_ui(v.get_mpz_t())) - 1;
            fac_[nv] += 1;  // may cascade; next pass folds even exponents
          }
        } else {
          fac_[key] += 1;  // keep sqrt(f) under the original key
        }
      }
      changed = true;
      break;
    }
    q_.canonicalize();
    if (q_ == 0) {
      fac_.clear();
      return;
    }
  }
}

mpq_class SymCoeff::as_rational() const {
  if (!is_rational()) throw std::domain_error("coefficient is irrational: " + str());
  return q_;
}

SymCoeff SymCoeff::reciprocal() const {
  if (is_zero()) throw std::domain_error("reciprocal of zero coefficient");
  SymCoeff r;
  r.q_ = 1 / q_;
  for (auto& [n, e] : fac_) r.fac_[n] = -e;
  r.normalize();
  return r;
}

SymCoeff SymCoeff::negated() const {
  SymCoeff r = *this;
  r.q_ = -r.q_;
  return r;
}

SymCoeff operator*(const SymCoeff& a, const SymCoeff& b) {
  SymCoeff r;
  r.q_ = a.q_ * b.q_;
  r.fac_ = a.fac_;
  for (auto& [n, e] : b.fac_) r.fac_[n] += e;
  r.normalize();
  return r;
}

Interval SymCoeff::eval(mpfr_prec_t prec) const {
  Interval r = Interval::from_q(q_, prec);
  for (auto& [n, e] : fac_) {
    Interval fn = f_of_z(n, prec);
    unsigned long ae = static_cast<unsigned long>(e < 0 ? -e : e);
    Interval p = ipow(fn, ae / 2);
    if (ae % 2 == 1) p = mul(p, sqrt_i(fn));
    if (e < 0) p = recip(p);
    r = mul(r, p);
  }
  return r;
}

namespace {

std::string factor_base_str(const mpz_class& n) {
  // compact forms for the two structured families of keys
  mpz_class np1 = n + 1;
  if (n >= 3 && mpz_popcount(np1.get_mpz_t()) == 1)
    return "f(2^" + std::to_string(mpz_sizeinbase(np1.get_mpz_t(), 2) - 1) + "-1)";
  if (n >= 4 && mpz_popcount(n.get_mpz_t()) == 1)
    return "f(2^" + std::to_string(mpz_sizeinbase(n.get_mpz_t(), 2) - 1) + ")";
  return "f(" + n.get_str() + ")";
}

std::string exp_str(long e) {
  if (e == 2) return "";
  if (e % 2 == 0) return "^(" + std::to_string(e / 2) + ")";
  return "^(" + std::to_string(e) + "/2)";
}

}  // namespace

std::string SymCoeff::str() const {
  std::string s = rational_str(q_);
  for (auto& [n, e] : fac_) s += "*" + factor_base_str(n) + exp_str(e);
  return s;
}

int cmp_factor_maps(const std::map<mpz_class, long>& a, const std::map<mpz_class, long>& b) {
  auto ia = a.begin();
  auto ib = b.begin();
  for (; ia != a.end() && ib != b.end(); ++ia, ++ib) {
    if (ia->first != ib->first) return ia->first < ib->first ? -1 : 1;
    if (ia->second != ib->second) return ia->second < ib->second ? -1 : 1;
  }
  if (ia != a.end()) return 1;
  if (ib != b.end()) return -1;
  return 0;
}

void SymSum::insert(const SymCoeff& c) {
  if (c.is_zero()) return;
  auto it = std::lower_bound(terms_.begin(), terms_.end(), c,
                             [](const SymCoeff& x, const SymCoeff& y) {
                               return cmp_factor_maps(x.factors(), y.factors()) < 0;
                             });
  if (it != terms_.end() && cmp_factor_maps(it->factors(), c.factors()) == 0) {
    mpq_class qsum = it->rational_part() + c.rational_part();
    if (qsum == 0) {
      terms_.erase(it);
      return;
    }
    // rebuild with the shared (already canonical) factor map
    SymCoeff fresh(qsum);
    for (auto& [n, e] : it->factors()) fresh = fresh * SymCoeff::f_pow(n, e);
    *it = fresh;
    return;
  }
  terms_.insert(it, c);
}

bool SymSum::is_rational() const {
  if (terms_.empty()) return true;
  return terms_.size() == 1 && terms_[0].is_rational();
}

mpq_class SymSum::as_rational() const {
  if (terms_.empty()) return mpq_class(0);
  if (!is_rational()) throw std::domain_error("sum is irrational: " + str());
  return terms_[0].as_rational();
}

SymSum SymSum::negated() const {
  SymSum r;
  for (auto& t : terms_) r.terms_.push_back(t.negated());
  return r;
}

SymSum operator+(const SymSum& a, const SymSum& b) {
  SymSum r = a;
  for (auto& t : b.terms_) r.insert(t);
  return r;
}

SymSum operator*(const SymSum& a, const SymCoeff& c) {
  SymSum r;
  for (auto& t : a.terms_) r.insert(t * c);
  return r;
}

SymSum operator*(const SymSum& a, const SymSum& b) {
  SymSum r;
  for (auto& ta : a.terms_)
    for (auto& tb : b.terms_) r.insert(ta * tb);
  return r;
}

Interval SymSum::eval(mpfr_prec_t prec) const {
  Interval r(prec);
  for (auto& t : terms_) {
    Interval v = t.eval(prec);
    Interval s(prec);
    add_into(s, r, v);
    r = s;
  }
  return r;
}

std::string SymSum::str() const {
  if (terms_.empty()) return "0";
  std::string s;
  for (size_t i = 0; i < terms_.size(); i++) {
    if (i) s += " + ";
    s += terms_[i].str();
  }
  return s;
}

SymVector SymVector::from_rational(const FiniteVector& x) {
  SymVector r;
  for (auto& [i, q] : x.coords()) r.coords_.emplace(i, SymSum(SymCoeff(q)));
  return r;
}

void SymVector::set(std::uint64_t idx, const SymSum& s) {
  if (s.is_zero())
    coords_.erase(idx);
  else
    coords_[idx] = s;
}

void SymVector::add_to(std::uint64_t idx, const SymSum& s) {
  auto it = coords_.find(idx);
  if (it == coords_.end()) {
    set(idx, s);
    return;
  }
  SymSum t = it->second + s;
  if (t.is_zero())
    coords_.erase(it);
  else
    it->second = t;
}

const SymSum& SymVector::coeff(std::uint64_t idx) const {
  static const SymSum kZero;
  auto it = coords_.find(idx);
  return it == coords_.end() ? kZero : it->second;
}

std::uint64_t SymVector::min_index() const {
  if (coords_.empty()) throw std::domain_error("empty vector has no support");
  return coords_.begin()->first;
}

std::uint64_t SymVector::max_index() const {
  if (coords_.empty()) throw std::domain_error("empty vector has no support");
  return coords_.rbegin()->first;
}

SymVector operator+(const SymVector& a, const SymVector& b) {
  SymVector r = a;
  for (auto& [i, s] : b.coords_) r.add_to(i, s);
  return r;
}

SymVector SymVector::scaled(const SymCoeff& c) const {
  SymVector r;
  if (c.is_zero()) return r;
  for (auto& [i, s] : coords_) r.set(i, s * c);
  return r;
}

SymVector SymVector::scaled(const SymSum& s) const {
  SymVector r;
  if (s.is_zero()) return r;
  for (auto& [i, t] : coords_) r.set(i, t * s);
  return r;
}

SymVector SymVector::restricted(std::uint64_t lo, std::uint64_t hi) const {
  SymVector r;
  for (auto& [i, s] : coords_)
    if (i >= lo && i <= hi) r.coords_.emplace(i, s);
  return r;
}

bool SymVector::is_rational() const {
  for (auto& [i, s] : coords_)
    if (!s.is_rational()) return false;
  return true;
}

FiniteVector SymVector::to_rational() const {
  std::vector<FiniteVector::Coord> cs;
  for (auto& [i, s] : coords_) cs.push_back({i, s.as_rational()});
  return FiniteVector(std::move(cs));
}

std::vector<Interval> SymVector::eval_coords(mpfr_prec_t prec) const {
  std::vector<Interval> out;
  out.reserve(coords_.size());
  for (auto& [i, s] : coords_) out.push_back(s.eval(prec));
  return out;
}

std::string SymVector::str() const {
  if (coords_.empty()) return "0";
  std::string s;
  bool first = true;
  for (auto& [i, c] : coords_) {
    if (!first) s += "  ";
    first = false;
    s += std::to_string(i) + ":[" + c.str() + "]";
  }
  return s;
}

SymSum sym_pairing(const SymVector& fstar, const SymVector& x) {
  SymSum r;
  auto ia = fstar.coords().begin();
  auto ib = x.coords().begin();
  while (ia != fstar.coords().end() && ib != x.coords().end()) {
    if (ia->first < ib->first)
      ++ia;
    else if (ib->first < ia->first)
      ++ib;
    else {
      r = r + ia->second * ib->second;
      ++ia;
      ++ib;
    }
  }
  return r;
}

SymSum sym_pairing(const SymVector& fstar, const FiniteVector& x) {
  return sym_pairing(fstar, SymVector::from_rational(x));
}

bool successive(const SymVector& a, const SymVector& b) {
  if (a.empty() || b.empty()) return false;
  return a.max_index() < b.min_index();
}

}  // namespace sgm
