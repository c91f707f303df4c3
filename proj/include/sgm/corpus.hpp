#pragma once
// Probe-vector corpora: the line-oriented literal format, seeded random
// generation, and the corpus norm runner.  The parallel runner and the serial
// reference fill one pre-sized slot per item and must agree bit for bit,
// since every evaluation is a pure function of the item and the precision.

#include "sgm/interval.hpp"
#include "sgm/vector.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace sgm {

struct Corpus {
  std::vector<FiniteVector> items;
  std::vector<std::string> labels;
  std::size_t size() const { return items.size(); }
};

// one vector literal per line ("idx:num/den" pairs, whitespace-separated);
// blank lines and lines starting with '#' are skipped
Corpus parse_corpus(const std::string& text);
Corpus load_corpus(const std::string& path);  // throws std::runtime_error

struct RandomCorpusSpec {
  std::size_t count = 100;
  std::size_t max_support = 6;
  std::uint64_t max_index = 40;
  long coeff_range = 2;        // numerators drawn from [-range, range] \ {0}
  unsigned long max_den = 4;   // denominators drawn from [1, max_den]
  std::uint64_t seed = 1;
};
// deterministic for a fixed spec: indices and coefficients are reduced from
// raw mt19937_64 words, avoiding distribution objects with unspecified output
Corpus random_corpus(const RandomCorpusSpec& spec);

// S-norm of every item at the given precision
std::vector<Interval> corpus_norms_serial(const Corpus& c, mpfr_prec_t prec);
std::vector<Interval> corpus_norms_parallel(const Corpus& c, mpfr_prec_t prec);

}  // namespace sgm
