// Times the serial reference coverage pass against the OpenMP kernel on a
// synthetic corpus and verifies they agree.

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "evipath/evidence_eval.hpp"
#include "synthetic.hpp"

using namespace evipath;
using Clock = std::chrono::steady_clock;

namespace {

double time_seconds(const std::function<void()>& fn, int repeats) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const auto start = Clock::now();
    fn();
    best = std::min(best, std::chrono::duration<double>(Clock::now() - start).count());
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  int n_docs = 1500;
  int repeats = 3;
  if (argc > 1) n_docs = std::atoi(argv[1]);
  if (argc > 2) repeats = std::atoi(argv[2]);

  std::mt19937 rng(99);
  testing::SyntheticSpec spec;
  spec.min_sentences = 6;
  spec.max_sentences = 10;
  spec.min_entities = 8;
  spec.max_entities = 16;
  spec.max_mentions = 4;
  spec.max_instances = 12;
  const std::vector<Document> corpus = testing::random_corpus(rng, n_docs, spec);
  const RuleConfig config;

  std::cout << "corpus: " << corpus.size() << " documents\n";

  CoverageReport serial_report;
  const double serial = time_seconds([&] { serial_report = coverage_report_serial(corpus, config); },
                                     repeats);
  std::cout << "serial reference      " << serial << " s  (coverage "
            << serial_report.coverage * 100.0 << "%)\n";

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  std::vector<int> job_counts{1, 2, 4, static_cast<int>(hw)};
  std::sort(job_counts.begin(), job_counts.end());
  job_counts.erase(std::unique(job_counts.begin(), job_counts.end()), job_counts.end());
  for (int jobs : job_counts) {
    if (jobs > static_cast<int>(hw) && jobs != 1) continue;
    CoverageReport parallel_report;
    const double elapsed =
        time_seconds([&] { parallel_report = coverage_report(corpus, config, jobs); }, repeats);
    const bool same = parallel_report == serial_report;
    std::cout << "omp kernel, jobs=" << jobs << (jobs < 10 ? "     " : "    ") << elapsed
              << " s  speedup " << serial / elapsed << (same ? "" : "  MISMATCH") << "\n";
    if (!same) return 1;
  }
  return 0;
}
