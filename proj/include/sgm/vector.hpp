#pragma once
// Finitely supported rational vectors over the unit-vector basis, plus the
// external text format "idx:num/den idx:num/den ...".

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sgm {

struct ParseError : std::runtime_error {
  size_t column;  // 1-based offset into the input text
  ParseError(const std::string& msg, size_t col)
      : std::runtime_error(msg + " (column " + std::to_string(col) + ")"),
        column(col) {}
};

// exact rational from "p", "-p", "p/q"; throws ParseError on malformed input
mpq_class parse_rational(const std::string& s, size_t col_base = 1);
std::string rational_str(const mpq_class& q);

class FiniteVector {
 public:
  // coordinates sorted by strictly increasing index, all coefficients nonzero
  using Coord = std::pair<std::uint64_t, mpq_class>;

  FiniteVector() = default;
  explicit FiniteVector(std::vector<Coord> coords);  // validates + normalizes

  static FiniteVector unit(std::uint64_t i, const mpq_class& c = 1);
  static FiniteVector parse(const std::string& literal);

  const std::vector<Coord>& coords() const { return coords_; }
  bool empty() const { return coords_.empty(); }
  size_t support_size() const { return coords_.size(); }
  std::uint64_t min_index() const;  // throws on empty
  std::uint64_t max_index() const;
  mpq_class coeff(std::uint64_t i) const;  // 0 when outside support

  mpq_class l1() const;
  mpq_class linf() const;

  FiniteVector scaled(const mpq_class& c) const;
  FiniteVector plus(const FiniteVector& o) const;
  // coordinate projection onto the index window [a, b]
  FiniteVector restrict_to(std::uint64_t a, std::uint64_t b) const;
  // map index i -> new index; map must be strictly increasing on the support
  FiniteVector spread(const std::vector<std::uint64_t>& new_indices) const;
  FiniteVector flip_signs(const std::vector<bool>& flips) const;

  std::string literal() const;

  bool operator==(const FiniteVector& o) const { return coords_ == o.coords_; }

 private:
  std::vector<Coord> coords_;
};

// dual pairing <x*, x> = sum of coordinatewise products, exact
mpq_class pairing(const FiniteVector& xstar, const FiniteVector& x);

// a < b in the block sense: max supp(a) < min supp(b); empty vectors compare true
bool successive(const FiniteVector& a, const FiniteVector& b);

}  // namespace sgm
