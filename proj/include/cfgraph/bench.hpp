#ifndef CFGRAPH_BENCH_HPP
#define CFGRAPH_BENCH_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "cfgraph/inference.hpp"

namespace cfgraph {

enum class BenchTemplate { Chain, Star };

struct BenchRow {
  int domain = 0;          // A
  double t_direct = 0.0;   // seconds, median over reps, cfg_eliminate path
  double t_fft = 0.0;      // seconds, median over reps, fft_query path
  double ratio = 0.0;      // t_direct / t_fft
  double predicted = 0.0;  // A / log2(A)
  double max_dev = 0.0;    // relative L-inf between the two answers
};

struct BenchReport {
  BenchTemplate tmpl = BenchTemplate::Chain;
  int length = 4;
  int reps = 0;
  std::vector<BenchRow> rows;
};

/// Random positive instance of one benchmark template at a given domain size.
///
/// chain: variables x0..xL over Z_A, factors f_i(x_{i-1}, x_i); the query
/// fixes x0, x1 and xL and retains the other interiors, so the direct path
/// performs genuine convolutions over the retained variables.
/// star: one hub variable with `length` univariate factors attached; the query
/// fixes the hub, the direct path is a chain of 1-D convolutions and the dual
/// path a pointwise product.
FactorGraph make_bench_graph(BenchTemplate tmpl, int length, int domain, std::uint64_t seed);
Query make_bench_query(BenchTemplate tmpl, const FactorGraph& g, std::uint64_t seed);

/// Times the same query via cfg_eliminate and via fft_query, median over
/// `reps`, after checking the two answers agree to 1e-6 relative L-infinity.
BenchReport run_bench(BenchTemplate tmpl, int length, const std::vector<int>& sizes, int reps,
                      std::uint64_t seed);

std::string bench_table(const BenchReport& report);
std::string bench_csv(const BenchReport& report);

}  // namespace cfgraph

#endif
