// Times the production kernels against the serial reference implementations
// that the test suite uses as oracles: generalized convolution and the
// per-variable transform. The production kernels parallelize with OpenMP when
// built with it; the reference is always straight-line serial code.

#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#include "cfgraph/algebra.hpp"
#include "cfgraph/reference.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace cfgraph;

namespace {

Factor random_factor(const std::vector<Variable>& scope, std::mt19937_64& rng) {
  std::size_t n = 1;
  for (const auto& v : scope) n *= static_cast<std::size_t>(v.size);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::vector<cplx> values(n);
  for (auto& v : values) v = cplx(unif(rng), unif(rng));
  return Factor(scope, std::move(values));
}

template <typename Fn>
double time_best_of(int reps, Fn&& fn) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
  }
  return best;
}

double max_dev(const Factor& a, const Factor& b) {
  double dev = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    dev = std::max(dev, std::abs(a.values()[i] - b.values()[i]));
  return dev;
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("kernels: OpenMP, %d thread(s); reference: serial\n", omp_get_max_threads());
#else
  std::printf("kernels: serial build (no OpenMP); reference: serial\n");
#endif
  std::printf("%-28s %12s %12s %8s %10s\n", "case", "ref[s]", "kernel[s]", "speedup",
              "max_dev");

  std::mt19937_64 rng(7);
  const int reps = 3;

  // convolution: two factors sharing one variable, at growing sizes
  for (int A : {16, 32, 64, 96}) {
    Variable a{1, "a", A}, b{2, "b", A}, c{3, "c", A};
    Factor f = random_factor({a, b}, rng);
    Factor g = random_factor({b, c}, rng);
    Factor rk, rr;
    double tk = time_best_of(reps, [&] { rk = convolve(f, g); });
    double tr = time_best_of(reps, [&] { rr = ref::convolve(f, g); });
    char label[64];
    std::snprintf(label, sizeof(label), "convolve shared A=%d", A);
    std::printf("%-28s %12.6f %12.6f %8.2f %10.2e\n", label, tr, tk, tr / tk,
                max_dev(rk, rr));
  }

  // transform: two-variable tables, power-of-two and Bluestein sizes
  for (int A : {64, 100, 256, 243}) {
    Variable a{1, "a", A}, b{2, "b", A};
    Factor f = random_factor({a, b}, rng);
    Factor rk, rr;
    double tk = time_best_of(reps, [&] { rk = dft(f, Direction::Forward); });
    double tr = time_best_of(reps, [&] { rr = ref::dft(f, Direction::Forward); });
    char label[64];
    std::snprintf(label, sizeof(label), "dft %dx%d", A, A);
    std::printf("%-28s %12.6f %12.6f %8.2f %10.2e\n", label, tr, tk, tr / tk,
                max_dev(rk, rr));
  }
  return 0;
}
