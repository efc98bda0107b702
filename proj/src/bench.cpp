#include "cfgraph/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include "cfgraph/errors.hpp"

namespace cfgraph {

namespace {

Factor random_positive(const std::vector<Variable>& scope, std::mt19937_64& rng) {
  std::size_t n = 1;
  for (const auto& v : scope) n *= static_cast<std::size_t>(v.size);
  std::uniform_real_distribution<double> unif(0.5, 1.5);
  std::vector<cplx> values(n);
  double total = 0.0;
  for (auto& v : values) {
    double x = unif(rng);
    v = cplx(x, 0.0);
    total += x;
  }
  for (auto& v : values) v /= total;
  return Factor(scope, values);
}

template <typename Fn>
double time_seconds(Fn&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  fn();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(t1 - t0).count();
}

double median(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  return xs[xs.size() / 2];
}

double rel_linf(const Factor& a, const Factor& b) {
  double dev = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dev = std::max(dev, std::abs(a.values()[i] - b.values()[i]));
    scale = std::max(scale, std::abs(a.values()[i]));
  }
  return dev / std::max(scale, 1e-300);
}

}  // namespace

FactorGraph make_bench_graph(BenchTemplate tmpl, int length, int domain, std::uint64_t seed) {
  if (length < 2) throw ValidationError("bench: template length must be >= 2");
  std::mt19937_64 rng(seed);
  FactorGraph g;
  g.semantics = Semantics::Convolutional;
  if (tmpl == BenchTemplate::Chain) {
    for (int i = 0; i <= length; ++i)
      g.variables.push_back({i + 1, "x" + std::to_string(i), domain});
    for (int i = 1; i <= length; ++i) {
      std::vector<Variable> scope{g.variables[static_cast<std::size_t>(i - 1)],
                                  g.variables[static_cast<std::size_t>(i)]};
      g.factors.push_back({"f" + std::to_string(i), random_positive(scope, rng)});
    }
  } else {
    g.variables.push_back({1, "hub", domain});
    for (int i = 1; i <= length; ++i)
      g.factors.push_back({"f" + std::to_string(i), random_positive({g.variables[0]}, rng)});
  }
  return g;
}

Query make_bench_query(BenchTemplate tmpl, const FactorGraph& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
  Query q;
  if (tmpl == BenchTemplate::Chain) {
    // observe x0, x1 and the last variable, retain the other interiors: the
    // direct path then convolves the surviving factors over the retained
    // variables (A^3 each for the pairwise chain factors) while the dual path
    // replaces those convolutions with pointwise products between transforms
    // (A^2 log A). Note the retained table has A^(length-2) entries.
    auto pick = [&](const Variable& v) {
      q.evidence[v.id] = static_cast<int>(rng() % static_cast<std::uint64_t>(v.size));
    };
    pick(g.variables[0]);
    pick(g.variables[1]);
    pick(g.variables.back());
  } else {
    const Variable& hub = g.variables[0];
    q.evidence[hub.id] =
        static_cast<int>(rng() % static_cast<std::uint64_t>(hub.size));
  }
  return q;
}

BenchReport run_bench(BenchTemplate tmpl, int length, const std::vector<int>& sizes, int reps,
                      std::uint64_t seed) {
  for (std::size_t i = 1; i < sizes.size(); ++i)
    if (sizes[i] <= sizes[i - 1]) throw ValidationError("bench: sizes must be ascending");
  if (reps < 1) throw ValidationError("bench: reps must be >= 1");

  BenchReport report;
  report.tmpl = tmpl;
  report.length = length;
  report.reps = reps;

  for (int A : sizes) {
    FactorGraph g = make_bench_graph(tmpl, length, A, seed + static_cast<std::uint64_t>(A));
    Query q = make_bench_query(tmpl, g, seed + static_cast<std::uint64_t>(A));

    // correctness gate before any timing
    Factor direct = answer(g, q, Method::Elimination);
    Factor via_fft = answer(g, q, Method::Fft);
    const double dev = rel_linf(direct, via_fft);
    if (dev > 1e-6)
      throw std::runtime_error("bench: direct and FFT answers disagree at A=" +
                               std::to_string(A) + " (rel dev " + std::to_string(dev) + ")");

    std::vector<double> td, tf;
    for (int r = 0; r < reps; ++r) {
      td.push_back(time_seconds([&] { (void)answer(g, q, Method::Elimination); }));
      tf.push_back(time_seconds([&] { (void)answer(g, q, Method::Fft); }));
    }

    BenchRow row;
    row.domain = A;
    row.t_direct = median(td);
    row.t_fft = median(tf);
    row.ratio = row.t_direct / row.t_fft;
    row.predicted = static_cast<double>(A) / std::log2(static_cast<double>(A));
    row.max_dev = dev;
    report.rows.push_back(row);
  }
  return report;
}

std::string bench_table(const BenchReport& report) {
  std::ostringstream os;
  os << "template=" << (report.tmpl == BenchTemplate::Chain ? "chain" : "star")
     << " length=" << report.length << " reps=" << report.reps << "\n";
  os << "     A   t_direct[s]      t_fft[s]      ratio   A/log2(A)    max_dev\n";
  for (const auto& r : report.rows) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%6d  %12.6f  %12.6f  %9.3f  %10.2f  %9.2e\n", r.domain,
                  r.t_direct, r.t_fft, r.ratio, r.predicted, r.max_dev);
    os << buf;
  }
  return os.str();
}

std::string bench_csv(const BenchReport& report) {
  std::ostringstream os;
  os << "A,t_direct,t_fft,ratio,a_over_log2a,max_dev\n";
  for (const auto& r : report.rows)
    os << r.domain << "," << r.t_direct << "," << r.t_fft << "," << r.ratio << ","
       << r.predicted << "," << r.max_dev << "\n";
  return os.str();
}

}  // namespace cfgraph
