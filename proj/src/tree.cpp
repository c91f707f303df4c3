#include "sgm/tree.hpp"

#include "sgm/snorm.hpp"

#include <algorithm>
#include <stdexcept>

namespace sgm {

FinTree::FinTree(std::map<TreeNode, std::uint32_t> branching, size_t length)
    : branching_(std::move(branching)), length_(length) {
  validate();
}

void FinTree::validate() const {
  if (length_ == 0) {
    if (!branching_.empty())
      throw std::domain_error("length-0 tree cannot have internal nodes");
    return;
  }
  size_t total = 1;
  std::vector<TreeNode> cur{TreeNode{}};
  for (size_t depth = 0; depth < length_; depth++) {
    std::vector<TreeNode> next;
    for (auto& mu : cur) {
      auto it = branching_.find(mu);
      if (it == branching_.end())
        throw std::domain_error("missing branching number at depth " + std::to_string(depth));
      if (it->second == 0) throw std::domain_error("branching numbers must be >= 1");
      for (std::uint32_t i = 1; i <= it->second; i++) {
        TreeNode child = mu;
        child.push_back(i);
        next.push_back(std::move(child));
      }
      total += it->second;
      if (total > kMaxTreeNodes) throw std::domain_error("tree too large");
    }
    cur = std::move(next);
  }
  // no spurious keys: every key must have been visited as an internal node
  size_t internal = 0;
  std::vector<TreeNode> walk{TreeNode{}};
  for (size_t depth = 0; depth < length_; depth++) {
    std::vector<TreeNode> next;
    for (auto& mu : walk) {
      internal++;
      std::uint32_t k = branching_.at(mu);
      for (std::uint32_t i = 1; i <= k; i++) {
        TreeNode child = mu;
        child.push_back(i);
        next.push_back(std::move(child));
      }
    }
    walk = std::move(next);
  }
  if (internal != branching_.size())
    throw std::domain_error("branching map has keys outside the tree");
}

bool FinTree::contains(const TreeNode& mu) const {
  if (mu.size() > length_) return false;
  TreeNode prefix;
  for (size_t i = 0; i < mu.size(); i++) {
    auto it = branching_.find(prefix);
    if (it == branching_.end() || mu[i] == 0 || mu[i] > it->second) return false;
    prefix.push_back(mu[i]);
  }
  return true;
}

std::uint32_t FinTree::branching_at(const TreeNode& mu) const {
  if (!contains(mu)) throw std::domain_error("node not in tree");
  auto it = branching_.find(mu);
  if (it == branching_.end()) throw std::domain_error("node is maximal");
  return it->second;
}

std::vector<TreeNode> FinTree::level(size_t k) const {
  if (k > length_) throw std::domain_error("level beyond tree length");
  std::vector<TreeNode> cur{TreeNode{}};
  for (size_t depth = 0; depth < k; depth++) {
    std::vector<TreeNode> next;
    for (auto& mu : cur) {
      std::uint32_t b = branching_.at(mu);
      for (std::uint32_t i = 1; i <= b; i++) {
        TreeNode child = mu;
        child.push_back(i);
        next.push_back(std::move(child));
      }
    }
    cur = std::move(next);
  }
  return cur;
}

std::vector<TreeNode> FinTree::nodes_lex() const {
  std::vector<TreeNode> out;
  for (size_t k = 0; k <= length_; k++) {
    auto lv = level(k);
    out.insert(out.end(), lv.begin(), lv.end());
  }
  return out;
}

size_t FinTree::leaf_count() const { return level(length_).size(); }

FinTree FinTree::subtree(const TreeNode& mu) const {
  if (!contains(mu)) throw std::domain_error("node not in tree");
  std::map<TreeNode, std::uint32_t> sub;
  for (auto& [node, k] : branching_) {
    if (node.size() < mu.size()) continue;
    if (!std::equal(mu.begin(), mu.end(), node.begin())) continue;
    sub.emplace(TreeNode(node.begin() + mu.size(), node.end()), k);
  }
  return FinTree(std::move(sub), length_ - mu.size());
}

FinTree FinTree::truncated(size_t L) const {
  size_t newlen = std::min(L, length_);
  std::map<TreeNode, std::uint32_t> keep;
  for (auto& [node, k] : branching_)
    if (node.size() < newlen) keep.emplace(node, k);
  return FinTree(std::move(keep), newlen);
}

bool FinTree::stream_increasing() const {
  std::uint64_t prev = 0;
  for (size_t k = 0; k < length_; k++)
    for (auto& mu : level(k)) {
      std::uint32_t b = branching_.at(mu);
      if (b <= prev) return false;
      prev = b;
    }
  return true;
}

namespace {

FinTree parse_rec(const std::string& s, size_t& pos) {
  auto fail = [&](const std::string& msg) {
    throw ParseError(msg, pos + 1);
  };
  if (pos >= s.size() || s[pos] != '(') fail("expected '('");
  pos++;
  if (pos < s.size() && s[pos] == ')') {  // "()" = length 0
    pos++;
    return FinTree();
  }
  std::uint64_t k = 0;
  size_t digits = 0;
  while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') {
    k = k * 10 + (s[pos] - '0');
    if (k > kMaxTreeNodes) fail("branching number too large");
    pos++;
    digits++;
  }
  if (digits == 0) fail("expected branching number");
  if (k == 0) fail("branching numbers must be >= 1");
  if (pos < s.size() && s[pos] == ')') {  // "(k)" = length 1
    pos++;
    std::map<TreeNode, std::uint32_t> b{{TreeNode{}, static_cast<std::uint32_t>(k)}};
    return FinTree(std::move(b), 1);
  }
  if (pos >= s.size() || s[pos] != ':') fail("expected ')' or ':'");
  pos++;
  std::vector<FinTree> kids;
  for (std::uint64_t i = 0; i < k; i++) {
    while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) pos++;
    kids.push_back(parse_rec(s, pos));
  }
  while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) pos++;
  if (pos >= s.size() || s[pos] != ')') fail("expected ')'");
  pos++;
  size_t kid_len = kids[0].length();
  std::map<TreeNode, std::uint32_t> b{{TreeNode{}, static_cast<std::uint32_t>(k)}};
  for (std::uint64_t i = 0; i < k; i++) {
    if (kids[i].length() != kid_len)
      throw ParseError("subtrees must have equal length", pos);
    for (auto& [node, kk] : kids[i].branching()) {
      TreeNode shifted;
      shifted.push_back(static_cast<std::uint32_t>(i + 1));
      shifted.insert(shifted.end(), node.begin(), node.end());
      b.emplace(std::move(shifted), kk);
    }
  }
  return FinTree(std::move(b), kid_len + 1);
}

}  // namespace

FinTree FinTree::parse(const std::string& s) {
  size_t pos = 0;
  while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) pos++;
  FinTree t = parse_rec(s, pos);
  while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) pos++;
  if (pos != s.size()) throw ParseError("trailing characters", pos + 1);
  return t;
}

FinTree FinTree::from_stream(const std::vector<std::uint64_t>& ks, size_t length) {
  std::map<TreeNode, std::uint32_t> b;
  std::vector<TreeNode> cur{TreeNode{}};
  size_t pos = 0;
  size_t total = 1;
  for (size_t depth = 0; depth < length; depth++) {
    std::vector<TreeNode> next;
    for (auto& mu : cur) {
      if (pos >= ks.size()) throw std::domain_error("branching stream exhausted");
      std::uint64_t k = ks[pos++];
      if (k == 0 || k > kMaxTreeNodes) throw std::domain_error("branching number out of range");
      b.emplace(mu, static_cast<std::uint32_t>(k));
      total += k;
      if (total > kMaxTreeNodes) throw std::domain_error("tree too large");
      for (std::uint32_t i = 1; i <= k; i++) {
        TreeNode child = mu;
        child.push_back(i);
        next.push_back(std::move(child));
      }
    }
    cur = std::move(next);
  }
  return FinTree(std::move(b), length);
}

std::string FinTree::literal() const {
  if (length_ == 0) return "()";
  std::uint32_t k = branching_.at(TreeNode{});
  if (length_ == 1) return "(" + std::to_string(k) + ")";
  std::string s = "(" + std::to_string(k) + ":";
  for (std::uint32_t i = 1; i <= k; i++) s += subtree(TreeNode{i}).literal();
  return s + ")";
}

SymCoeff alpha(const FinTree& t, const TreeNode& mu) {
  if (!t.contains(mu)) throw std::domain_error("node not in tree");
  SymCoeff a = SymCoeff::one();
  TreeNode prefix;
  for (size_t i = 0; i < mu.size(); i++) {
    std::uint32_t k = t.branching_at(prefix);
    a = a * SymCoeff(mpq_class(1, k), mpz_class(k), 2);  // f(k)/k
    prefix.push_back(mu[i]);
  }
  return a;
}

SymCoeff beta(const FinTree& t, const TreeNode& mu) {
  if (!t.contains(mu)) throw std::domain_error("node not in tree");
  SymCoeff b = SymCoeff::one();
  TreeNode prefix;
  for (size_t i = 0; i < mu.size(); i++) {
    std::uint32_t k = t.branching_at(prefix);
    b = b * SymCoeff::f_pow(mpz_class(k), -2);  // 1/f(k)
    prefix.push_back(mu[i]);
  }
  return b;
}

Placement Placement::pack(size_t leaf_count, std::uint64_t offset) {
  if (offset == 0) throw std::domain_error("indices start at 1");
  Placement p;
  p.slots.resize(leaf_count);
  for (size_t i = 0; i < leaf_count; i++) p.slots[i] = offset + i;
  return p;
}

namespace {

void check_placement(const FinTree& t, const Placement& p) {
  if (p.slots.size() != t.leaf_count())
    throw std::domain_error("placement size does not match leaf count");
  for (size_t i = 0; i + 1 < p.slots.size(); i++)
    if (p.slots[i] >= p.slots[i + 1])
      throw std::domain_error("placement must be strictly increasing");
  if (!p.slots.empty() && p.slots[0] == 0) throw std::domain_error("indices start at 1");
}

SymVector associated_impl(const FinTree& t, const Placement& p, bool functional) {
  check_placement(t, p);
  SymVector v;
  auto lv = t.leaves();
  for (size_t i = 0; i < lv.size(); i++) {
    SymCoeff c = functional ? beta(t, lv[i]) : alpha(t, lv[i]);
    v.set(p.slots[i], SymSum(c));
  }
  return v;
}

}  // namespace

SymVector associated_vector(const FinTree& t, const Placement& p) {
  return associated_impl(t, p, false);
}

SymVector associated_functional(const FinTree& t, const Placement& p) {
  return associated_impl(t, p, true);
}

namespace {

CertNode cert_rec(const FinTree& t, const TreeNode& mu, const Placement& p, size_t& leaf_pos) {
  if (mu.size() == t.length()) {
    CertNode leaf;
    leaf.index = p.slots[leaf_pos++];
    leaf.weight = 1;
    return leaf;
  }
  CertNode node;
  std::uint32_t k = t.branching_at(mu);
  for (std::uint32_t i = 1; i <= k; i++) {
    TreeNode child = mu;
    child.push_back(i);
    node.kids.push_back(cert_rec(t, child, p, leaf_pos));
  }
  return node;
}

}  // namespace

CertNode functional_certificate(const FinTree& t, const Placement& p) {
  check_placement(t, p);
  size_t leaf_pos = 0;
  return cert_rec(t, TreeNode{}, p, leaf_pos);
}

namespace {

SymVector build_impl(const std::vector<SymVector>& blocks, bool functional) {
  if (blocks.empty()) throw std::domain_error("need at least one block");
  for (size_t i = 0; i < blocks.size(); i++) {
    if (blocks[i].empty()) throw std::domain_error("blocks must be nonzero");
    if (i + 1 < blocks.size() && !successive(blocks[i], blocks[i + 1]))
      throw std::domain_error("blocks must be successive");
  }
  SymVector sum;
  for (auto& b : blocks) sum = sum + b;
  unsigned long k = blocks.size();
  SymCoeff c = functional ? SymCoeff::f_pow(mpz_class(k), -2)
                          : SymCoeff(mpq_class(1, k), mpz_class(k), 2);
  return sum.scaled(c);
}

}  // namespace

SymVector recursive_build_vector(const std::vector<SymVector>& blocks) {
  return build_impl(blocks, false);
}

SymVector recursive_build_functional(const std::vector<SymVector>& blocks) {
  return build_impl(blocks, true);
}

std::vector<LevelPart> level_decomposition(const FinTree& t, const Placement& p, size_t k,
                                           bool functional_side) {
  if (k > t.length()) throw std::domain_error("level beyond tree length");
  check_placement(t, p);
  std::vector<LevelPart> out;
  size_t off = 0;
  for (auto& mu : t.level(k)) {
    FinTree sub = t.subtree(mu);
    size_t n = sub.leaf_count();
    Placement slice;
    slice.slots.assign(p.slots.begin() + off, p.slots.begin() + off + n);
    off += n;
    LevelPart part;
    part.mu = mu;
    part.coeff = functional_side ? beta(t, mu) : alpha(t, mu);
    part.part = functional_side ? associated_functional(sub, slice)
                                : associated_vector(sub, slice);
    out.push_back(std::move(part));
  }
  return out;
}

std::vector<Check218Row> check_218(const std::vector<std::uint64_t>& k_stream,
                                   const std::vector<size_t>& lengths, mpfr_prec_t prec) {
  for (size_t i = 0; i + 1 < k_stream.size(); i++)
    if (k_stream[i] >= k_stream[i + 1])
      throw std::domain_error("branching stream must be strictly increasing");
  std::vector<Check218Row> rows;
  for (size_t L : lengths) {
    FinTree t = FinTree::from_stream(k_stream, L);
    Placement p = Placement::pack(t.leaf_count());
    SymVector x = associated_vector(t, p);
    Check218Row row;
    row.length = L;
    row.norm = s_norm_mags(x.eval_coords(prec + kGuardBits), prec);
    if (mpfr_cmp_ui(row.norm.hi(), 2) <= 0)
      row.le2 = Verdict::pass;
    else if (mpfr_cmp_ui(row.norm.lo(), 2) > 0)
      row.le2 = Verdict::fail;
    else
      row.le2 = Verdict::unknown;
    row.dual_lower = round_to(recip(row.norm), prec);
    rows.push_back(std::move(row));
  }
  return rows;
}

FinTree random_tree(std::mt19937_64& rng, size_t max_length, std::uint32_t max_k) {
  std::uniform_int_distribution<size_t> len_d(0, max_length);
  std::uniform_int_distribution<std::uint32_t> k_d(1, max_k);
  size_t length = len_d(rng);
  std::map<TreeNode, std::uint32_t> b;
  std::vector<TreeNode> cur{TreeNode{}};
  for (size_t depth = 0; depth < length; depth++) {
    std::vector<TreeNode> next;
    for (auto& mu : cur) {
      std::uint32_t k = k_d(rng);
      b.emplace(mu, k);
      for (std::uint32_t i = 1; i <= k; i++) {
        TreeNode child = mu;
        child.push_back(i);
        next.push_back(std::move(child));
      }
    }
    cur = std::move(next);
  }
  return FinTree(std::move(b), length);
}

}  // namespace sgm
