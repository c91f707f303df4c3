#include "sgm/vector.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace sgm {

mpq_class parse_rational(const std::string& s, size_t col_base) {
  if (s.empty()) throw ParseError("empty rational", col_base);
  size_t slash = s.find('/');
  auto check_int = [&](const std::string& part, size_t off) {
    if (part.empty()) throw ParseError("empty integer", col_base + off);
    size_t i = (part[0] == '-' || part[0] == '+') ? 1 : 0;
    if (i == part.size()) throw ParseError("sign without digits", col_base + off);
    for (; i < part.size(); i++)
      if (!std::isdigit(static_cast<unsigned char>(part[i])))
        throw ParseError("invalid digit '" + std::string(1, part[i]) + "'",
                         col_base + off + i);
  };
  mpq_class q;
  if (slash == std::string::npos) {
    check_int(s, 0);
    q = mpq_class(s);
  } else {
    std::string num = s.substr(0, slash), den = s.substr(slash + 1);
    check_int(num, 0);
    check_int(den, slash + 1);
    if (!den.empty() && (den[0] == '-' || den[0] == '+'))
      throw ParseError("denominator must be unsigned", col_base + slash + 1);
    q = mpq_class(num + "/" + den);
    if (q.get_den() == 0) throw ParseError("zero denominator", col_base + slash + 1);
  }
  q.canonicalize();
  return q;
}

std::string rational_str(const mpq_class& q) {
  std::ostringstream os;
  os << q.get_num();
  if (q.get_den() != 1) os << "/" << q.get_den();
  return os.str();
}

FiniteVector::FiniteVector(std::vector<Coord> coords) : coords_(std::move(coords)) {
  std::sort(coords_.begin(), coords_.end(),
            [](const Coord& a, const Coord& b) { return a.first < b.first; });
  std::vector<Coord> merged;
  for (auto& c : coords_) {
    if (c.first == 0) throw std::domain_error("vector index must be >= 1");
    if (!merged.empty() && merged.back().first == c.first)
      merged.back().second += c.second;
    else
      merged.push_back(c);
  }
  coords_.clear();
  for (auto& c : merged)
    if (c.second != 0) coords_.push_back(std::move(c));
}

FiniteVector FiniteVector::unit(std::uint64_t i, const mpq_class& c) {
  if (c == 0) return FiniteVector();
  return FiniteVector({{i, c}});
}

FiniteVector FiniteVector::parse(const std::string& literal) {
  std::vector<Coord> out;
  size_t i = 0;
  while (i < literal.size()) {
    while (i < literal.size() && std::isspace(static_cast<unsigned char>(literal[i]))) i++;
    if (i >= literal.size()) break;
    size_t start = i;
    while (i < literal.size() && !std::isspace(static_cast<unsigned char>(literal[i]))) i++;
    std::string tok = literal.substr(start, i - start);
    size_t colon = tok.find(':');
    if (colon == std::string::npos)
      throw ParseError("expected idx:coeff token", start + 1);
    std::string idx_s = tok.substr(0, colon);
    if (idx_s.empty()) throw ParseError("missing index", start + 1);
    for (size_t j = 0; j < idx_s.size(); j++)
      if (!std::isdigit(static_cast<unsigned char>(idx_s[j])))
        throw ParseError("index must be a positive integer", start + 1 + j);
    std::uint64_t idx = std::stoull(idx_s);
    if (idx == 0) throw ParseError("index must be >= 1", start + 1);
    mpq_class q = parse_rational(tok.substr(colon + 1), start + colon + 2);
    out.push_back({idx, q});
  }
  // reject duplicate indices in the external format (likely a typo)
  std::vector<Coord> sorted = out;
  std::sort(sorted.begin(), sorted.end(),
            [](const Coord& a, const Coord& b) { return a.first < b.first; });
  for (size_t j = 1; j < sorted.size(); j++)
    if (sorted[j].first == sorted[j - 1].first)
      throw ParseError("duplicate index " + std::to_string(sorted[j].first), 1);
  return FiniteVector(std::move(out));
}

std::uint64_t FiniteVector::min_index() const {
  if (coords_.empty()) throw std::domain_error("empty vector has no support");
  return coords_.front().first;
}

std::uint64_t FiniteVector::max_index() const {
  if (coords_.empty()) throw std::domain_error("empty vector has no support");
  return coords_.back().first;
}

mpq_class FiniteVector::coeff(std::uint64_t i) const {
  auto it = std::lower_bound(
      coords_.begin(), coords_.end(), i,
      [](const Coord& c, std::uint64_t v) { return c.first < v; });
  if (it != coords_.end() && it->first == i) return it->second;
  return 0;
}

mpq_class FiniteVector::l1() const {
  mpq_class s = 0;
  for (auto& c : coords_) s += abs(c.second);
  return s;
}

mpq_class FiniteVector::linf() const {
  mpq_class s = 0;
  for (auto& c : coords_) {
    mpq_class a = abs(c.second);
    if (a > s) s = a;
  }
  return s;
}

FiniteVector FiniteVector::scaled(const mpq_class& c) const {
  if (c == 0) return FiniteVector();
  std::vector<Coord> out = coords_;
  for (auto& p : out) p.second *= c;
  return FiniteVector(std::move(out));
}

FiniteVector FiniteVector::plus(const FiniteVector& o) const {
  std::vector<Coord> out = coords_;
  out.insert(out.end(), o.coords_.begin(), o.coords_.end());
  return FiniteVector(std::move(out));
}

FiniteVector FiniteVector::restrict_to(std::uint64_t a, std::uint64_t b) const {
  std::vector<Coord> out;
  for (auto& c : coords_)
    if (c.first >= a && c.first <= b) out.push_back(c);
  return FiniteVector(std::move(out));
}

FiniteVector FiniteVector::spread(const std::vector<std::uint64_t>& new_indices) const {
  if (new_indices.size() != coords_.size())
    throw std::domain_error("spread: index list size mismatch");
  for (size_t i = 1; i < new_indices.size(); i++)
    if (new_indices[i] <= new_indices[i - 1])
      throw std::domain_error("spread: indices must be strictly increasing");
  std::vector<Coord> out;
  for (size_t i = 0; i < coords_.size(); i++)
    out.push_back({new_indices[i], coords_[i].second});
  return FiniteVector(std::move(out));
}

FiniteVector FiniteVector::flip_signs(const std::vector<bool>& flips) const {
  if (flips.size() != coords_.size())
    throw std::domain_error("flip_signs: flag list size mismatch");
  std::vector<Coord> out = coords_;
  for (size_t i = 0; i < out.size(); i++)
    if (flips[i]) out[i].second = -out[i].second;
  return FiniteVector(std::move(out));
}

std::string FiniteVector::literal() const {
  std::ostringstream os;
  bool first = true;
  for (auto& c : coords_) {
    if (!first) os << ' ';
    first = false;
    os << c.first << ':' << c.second.get_num();
    os << '/' << c.second.get_den();
  }
  return os.str();
}

mpq_class pairing(const FiniteVector& xstar, const FiniteVector& x) {
  mpq_class s = 0;
  auto i = xstar.coords().begin(), e1 = xstar.coords().end();
  auto j = x.coords().begin(), e2 = x.coords().end();
  while (i != e1 && j != e2) {
    if (i->first < j->first)
      ++i;
    else if (j->first < i->first)
      ++j;
    else {
      s += i->second * j->second;
      ++i;
      ++j;
    }
  }
  return s;
}

bool successive(const FiniteVector& a, const FiniteVector& b) {
  if (a.empty() || b.empty()) return true;
  return a.max_index() < b.min_index();
}

}  // namespace sgm
