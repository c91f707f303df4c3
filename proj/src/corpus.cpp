#include "sgm/corpus.hpp"

#include "sgm/snorm.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

namespace sgm {

Corpus parse_corpus(const std::string& text) {
  Corpus c;
  std::istringstream in(text);
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    lineno++;
    size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    try {
      c.items.push_back(FiniteVector::parse(line));
    } catch (const ParseError& e) {
      throw std::runtime_error("corpus line " + std::to_string(lineno) + ": " +
                               e.what());
    }
    c.labels.push_back("line " + std::to_string(lineno));
  }
  return c;
}

Corpus load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("corpus: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_corpus(buf.str());
}

Corpus random_corpus(const RandomCorpusSpec& spec) {
  if (spec.max_support == 0 || spec.max_index < spec.max_support ||
      spec.coeff_range < 1 || spec.max_den < 1)
    throw std::invalid_argument("random corpus: degenerate spec");
  std::mt19937_64 rng(spec.seed);
  Corpus c;
  for (size_t n = 0; n < spec.count; n++) {
    const size_t supp = 1 + static_cast<size_t>(rng() % spec.max_support);
    std::set<std::uint64_t> idx;
    while (idx.size() < supp) idx.insert(1 + rng() % spec.max_index);
    std::vector<FiniteVector::Coord> coords;
    for (std::uint64_t i : idx) {
      long num = static_cast<long>(rng() % (2 * spec.coeff_range)) - spec.coeff_range;
      if (num >= 0) num++;  // skip zero, keep the range symmetric
      unsigned long den = 1 + rng() % spec.max_den;
      coords.emplace_back(i, mpq_class(num, den));
    }
    c.items.push_back(FiniteVector(coords));
    c.labels.push_back("random " + std::to_string(n + 1));
  }
  return c;
}

std::vector<Interval> corpus_norms_serial(const Corpus& c, mpfr_prec_t prec) {
  std::vector<Interval> out(c.items.size(), Interval(prec));
  for (size_t i = 0; i < c.items.size(); i++) out[i] = s_norm(c.items[i], prec);
  return out;
}

std::vector<Interval> corpus_norms_parallel(const Corpus& c, mpfr_prec_t prec) {
  std::vector<Interval> out(c.items.size(), Interval(prec));
#if defined(SGM_HAVE_OPENMP)
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < static_cast<long>(c.items.size()); i++)
    out[static_cast<size_t>(i)] = s_norm(c.items[static_cast<size_t>(i)], prec);
#else
  for (size_t i = 0; i < c.items.size(); i++) out[i] = s_norm(c.items[i], prec);
#endif
  return out;
}

}  // namespace sgm
