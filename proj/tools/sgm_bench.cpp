// Benchmark: the OpenMP corpus-norm kernel against the serial reference.
// Both runs must produce bit-identical enclosures; any mismatch is a hard
// failure.  Timings are wall clock and informational only.

#include "sgm/corpus.hpp"
#include "sgm/interval.hpp"

#include "CLI11.hpp"

#if defined(SGM_HAVE_OPENMP)
#include <omp.h>
#endif

#include <chrono>
#include <cstdio>
#include <vector>

namespace {

template <typename F>
double time_ms(F&& f, int repeat) {
  double best = 1e300;
  for (int i = 0; i < repeat; ++i) {
    auto t0 = std::chrono::steady_clock::now();
    f();
    auto t1 = std::chrono::steady_clock::now();
    best = std::min(
        best, std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"corpus-norm kernel benchmark: serial reference vs parallel"};
  sgm::RandomCorpusSpec spec;
  spec.count = 400;
  spec.max_support = 24;
  spec.max_index = 60;
  long precision = 128;
  int repeat = 3;
  app.add_option("--count", spec.count, "corpus size");
  app.add_option("--support", spec.max_support, "max support size per vector");
  app.add_option("--max-index", spec.max_index, "max basis index");
  app.add_option("--seed", spec.seed, "corpus seed");
  app.add_option("--precision", precision, "working precision in bits");
  app.add_option("--repeat", repeat, "timing repetitions (best of)");
  CLI11_PARSE(app, argc, argv);

  sgm::Corpus corpus = sgm::random_corpus(spec);
  const mpfr_prec_t prec = precision;

  std::vector<sgm::Interval> serial, parallel;
  const double serial_ms =
      time_ms([&] { serial = sgm::corpus_norms_serial(corpus, prec); }, repeat);
  const double parallel_ms = time_ms(
      [&] { parallel = sgm::corpus_norms_parallel(corpus, prec); }, repeat);

  std::size_t mismatches = 0;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (mpfr_equal_p(serial[i].lo(), parallel[i].lo()) == 0 ||
        mpfr_equal_p(serial[i].hi(), parallel[i].hi()) == 0)
      ++mismatches;
  }

  int threads = 1;
#if defined(SGM_HAVE_OPENMP)
  threads = omp_get_max_threads();
#endif
  std::printf("items        %zu\n", corpus.size());
  std::printf("precision    %ld bits\n", precision);
  std::printf("threads      %d\n", threads);
  std::printf("serial       %10.3f ms\n", serial_ms);
  std::printf("parallel     %10.3f ms\n", parallel_ms);
  std::printf("speedup      %10.2fx\n",
              parallel_ms > 0 ? serial_ms / parallel_ms : 0.0);
  std::printf("bit-identical %s (%zu mismatches)\n",
              mismatches == 0 ? "yes" : "NO", mismatches);
  return mismatches == 0 ? 0 : 1;
}
