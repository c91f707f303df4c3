#pragma once
// Finitely branching trees of uniform length: the carrier of the coefficient
// calculus.  A tree is stored as its branching map (internal node -> number of
// children); every non-maximal node mu has children (mu,1)..(mu,k_mu) and all
// maximal nodes sit at the same depth.  The alpha/beta coefficients
//
//   alpha(mu) = prod f(k_p)/k_p ,   beta(mu) = prod 1/f(k_p)
//
// over the proper prefixes p of mu define the associated vector (alpha-weighted
// leaves) and associated functional (beta-weighted leaves), once the leaves
// are placed on strictly increasing basis indices in lexicographic order.

#include "sgm/certificate.hpp"
#include "sgm/interval.hpp"
#include "sgm/symbolic.hpp"

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace sgm {

using TreeNode = std::vector<std::uint32_t>;  // 1-based child indices; empty = root

inline constexpr size_t kMaxTreeNodes = 1u << 20;

class FinTree {
 public:
  FinTree() : length_(0) {}  // the single-node tree
  FinTree(std::map<TreeNode, std::uint32_t> branching, size_t length);

  // literal grammar: "()" length 0; "(3)" length 1; "(2:(3)(4))" nested
  static FinTree parse(const std::string& s);
  // assign branching numbers to internal nodes in lexicographic order
  static FinTree from_stream(const std::vector<std::uint64_t>& ks, size_t length);

  size_t length() const { return length_; }
  bool contains(const TreeNode& mu) const;
  std::uint32_t branching_at(const TreeNode& mu) const;  // throws on maximal/missing
  const std::map<TreeNode, std::uint32_t>& branching() const { return branching_; }

  std::vector<TreeNode> level(size_t k) const;  // lexicographic order
  std::vector<TreeNode> nodes_lex() const;      // all nodes, level by level
  std::vector<TreeNode> leaves() const { return level(length_); }
  size_t leaf_count() const;

  FinTree subtree(const TreeNode& mu) const;
  FinTree truncated(size_t L) const;
  // k_mu strictly increasing along the lexicographic order of internal nodes?
  bool stream_increasing() const;

  std::string literal() const;
  bool operator==(const FinTree& o) const {
    return length_ == o.length_ && branching_ == o.branching_;
  }

 private:
  void validate() const;
  std::map<TreeNode, std::uint32_t> branching_;
  size_t length_;
};

SymCoeff alpha(const FinTree& t, const TreeNode& mu);
SymCoeff beta(const FinTree& t, const TreeNode& mu);

struct Placement {
  std::vector<std::uint64_t> slots;  // one index per leaf, lex order, strictly increasing
  static Placement pack(size_t leaf_count, std::uint64_t offset = 1);
};

SymVector associated_vector(const FinTree& t, const Placement& p);
SymVector associated_functional(const FinTree& t, const Placement& p);
// the formation tree of the associated functional (valid by construction)
CertNode functional_certificate(const FinTree& t, const Placement& p);

// glue k successive blocks: (f(k)/k) * sum, resp. (1/f(k)) * sum
SymVector recursive_build_vector(const std::vector<SymVector>& blocks);
SymVector recursive_build_functional(const std::vector<SymVector>& blocks);

struct LevelPart {
  TreeNode mu;
  SymCoeff coeff;  // alpha(mu) or beta(mu)
  SymVector part;  // associated to the subtree at mu, on the sliced placement
};
std::vector<LevelPart> level_decomposition(const FinTree& t, const Placement& p, size_t k,
                                           bool functional_side = false);

struct Check218Row {
  size_t length = 0;
  Interval norm{128};
  Verdict le2 = Verdict::unknown;
  Interval dual_lower{128};  // 1 / norm, a lower bound for the dual functional
};
// builds the associated vector of each truncation of the stream tree and
// reports whether its norm stays <= 2
std::vector<Check218Row> check_218(const std::vector<std::uint64_t>& k_stream,
                                   const std::vector<size_t>& lengths, mpfr_prec_t prec = 128);

FinTree random_tree(std::mt19937_64& rng, size_t max_length, std::uint32_t max_k);

}  // namespace sgm
