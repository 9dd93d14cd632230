// Serial reference vs OpenMP execution of the parallel kernels: wall time
// and agreement of the results.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <functional>

#include "qlattice/harness.hpp"

using namespace qlattice;
using namespace qlattice::harness;

namespace {

template <class F>
double seconds(F&& f) {
  auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

nlohmann::json strip(nlohmann::json r) {
  r.erase("seconds");
  r["config"].erase("execution");
  return r;
}

void row(const char* name, double ts, double tp, bool same) {
  std::printf("%-34s %9.3f %9.3f %8.2fx  %s\n", name, ts, tp, ts / tp, same ? "identical" : "DIFFERENT");
}

void bench_suite(const char* label, const std::string& suite, SpaceShape shape, int trials) {
  SuiteConfig cfg;
  cfg.suite = suite;
  cfg.shape = shape;
  cfg.trials = trials;
  Report rs, rp;
  cfg.execution = Execution::serial;
  const double ts = seconds([&] { rs = run_suite(cfg); });
  cfg.execution = Execution::parallel;
  const double tp = seconds([&] { rp = run_suite(cfg); });
  row(label, ts, tp, strip(rs.to_json()) == strip(rp.to_json()));
}

}  // namespace

int main(int argc, char** argv) {
  const int scale = argc > 1 ? std::max(1, std::atoi(argv[1])) : 1;
  std::printf("OpenMP threads: %d\n\n", omp_get_max_threads());
  std::printf("%-34s %9s %9s %9s  %s\n", "kernel", "serial s", "omp s", "speedup", "results");

  VolumeEstimate vs, vp;
  const SpaceShape s22 = SpaceShape::bipartite(2, 2);
  const double ts = seconds([&] { vs = separable_volume(s22, 20000 * scale, 7, Execution::serial); });
  const double tp = seconds([&] { vp = separable_volume(s22, 20000 * scale, 7, Execution::parallel); });
  row("volume estimator (2x2)", ts, tp, vs.separable == vp.separable);

  bench_suite("trial runner: modularity (n=3)", "modularity", SpaceShape::simple(3), 200 * scale);
  bench_suite("trial runner: separability (2x3)", "separability", SpaceShape::bipartite(2, 3), 30 * scale);
  bench_suite("oracle sampling (n=3)", "oracle", SpaceShape::simple(3), 10 * scale);
  return 0;
}
