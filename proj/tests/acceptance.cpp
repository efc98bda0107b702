// Acceptance gate: one printed pass/fail line per criterion. Exits nonzero if
// any criterion fails. Deliberately independent of the doctest suite; every
// expected value here is either computed by the serial reference
// implementations or derived by hand.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>
#include <vector>

#include "cfgraph/bench.hpp"
#include "cfgraph/errors.hpp"
#include "cfgraph/inference.hpp"
#include "cfgraph/io.hpp"
#include "cfgraph/models.hpp"
#include "cfgraph/reference.hpp"

using namespace cfgraph;

namespace {

int failures = 0;

void report(int idx, const char* name, bool ok, const std::string& detail) {
  std::printf("criterion %d %-34s %s  (%s)\n", idx, name, ok ? "PASS" : "FAIL",
              detail.c_str());
  if (!ok) ++failures;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", x);
  return buf;
}

Factor random_factor(const std::vector<Variable>& scope, std::mt19937_64& rng,
                     bool positive = false) {
  std::size_t n = 1;
  for (const auto& v : scope) n *= static_cast<std::size_t>(v.size);
  std::uniform_real_distribution<double> unif(positive ? 0.05 : -1.0, 1.0);
  std::vector<cplx> values(n);
  for (auto& v : values) v = cplx(positive ? unif(rng) + 0.05 : unif(rng), 0.0);
  return Factor(scope, std::move(values));
}

FactorGraph random_cfg(std::mt19937_64& rng, int max_vars, int max_domain, int max_factors) {
  FactorGraph g;
  g.semantics = Semantics::Convolutional;
  std::uniform_int_distribution<int> nv(2, max_vars), dom(2, max_domain);
  const int n = nv(rng);
  for (int i = 1; i <= n; ++i) g.variables.push_back({i, "x" + std::to_string(i), dom(rng)});
  std::uniform_int_distribution<int> nf(1, max_factors);
  std::set<int> covered;
  const int m = nf(rng);
  for (int j = 0; j < m; ++j) {
    std::uniform_int_distribution<int> k(1, std::min(3, n));
    std::set<int> chosen;
    const int want = k(rng);
    while (static_cast<int>(chosen.size()) < want)
      chosen.insert(1 + static_cast<int>(rng() % static_cast<std::uint64_t>(n)));
    std::vector<Variable> scope;
    for (int id : chosen) {
      scope.push_back(g.variables[static_cast<std::size_t>(id - 1)]);
      covered.insert(id);
    }
    g.factors.push_back({"f" + std::to_string(j + 1), random_factor(scope, rng, true)});
  }
  int extra = 0;
  for (const auto& v : g.variables)
    if (!covered.count(v.id))
      g.factors.push_back({"cover" + std::to_string(++extra), random_factor({v}, rng, true)});
  return g;
}

double rel_linf(const Factor& a, const Factor& b) {
  double dev = 0.0, scale = 1e-300;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dev = std::max(dev, std::abs(a.values()[i] - b.values()[i]));
    scale = std::max(scale, std::abs(b.values()[i]));
  }
  return dev / scale;
}

std::vector<int> scope_ids(const Factor& f) {
  std::vector<int> ids;
  for (const auto& v : f.scope()) ids.push_back(v.id);
  return ids;
}

// 1. Oracle equivalence fuzz: 200 random CFGs x random queries.
void criterion1() {
  std::mt19937_64 rng(101);
  double worst = 0.0;
  int runs = 0;
  for (int trial = 0; trial < 200; ++trial) {
    auto g = random_cfg(rng, 6, 5, 5);
    Query q;
    for (const auto& v : g.variables) {
      switch (rng() % 3) {
        case 0: q.marginalize.insert(v.id); break;
        case 1:
          q.evidence[v.id] = static_cast<int>(rng() % static_cast<std::uint64_t>(v.size));
          break;
        default: break;
      }
    }
    auto want = answer(g, q, Method::Oracle);
    worst = std::max(worst, rel_linf(answer(g, q, Method::Elimination), want));
    worst = std::max(worst, rel_linf(answer(g, q, Method::Fft), want));
    ++runs;
  }
  report(1, "oracle equivalence fuzz", worst <= 1e-9,
         std::to_string(runs) + " graphs, max rel dev " + fmt(worst));
}

// 2. Convolution theorem, factor-level and graph-level.
void criterion2() {
  std::mt19937_64 rng(102);
  double worst_f = 0.0;
  Variable a{1, "a", 4}, b{2, "b", 3}, c{3, "c", 5};
  for (int i = 0; i < 100; ++i) {
    auto f = random_factor({a, b}, rng);
    auto g = random_factor({b, c}, rng);
    auto lhs = dft(convolve(f, g), Direction::Forward);
    auto rhs = multiply(dft(f, Direction::Forward), dft(g, Direction::Forward));
    worst_f = std::max(worst_f, rel_linf(lhs, rhs));
  }
  double worst_g = 0.0;
  for (int i = 0; i < 25; ++i) {
    auto g = random_cfg(rng, 4, 4, 3);
    worst_g = std::max(worst_g, rel_linf(dft(joint(g), Direction::Forward),
                                         joint(dualize(g))));
  }
  report(2, "convolution theorem", worst_f <= 1e-10 && worst_g <= 1e-9,
         "factor dev " + fmt(worst_f) + ", graph dev " + fmt(worst_g));
}

// 3. Algebra laws on 100 random triples; exact disjoint degeneration.
void criterion3() {
  std::mt19937_64 rng(103);
  Variable a{1, "a", 3}, b{2, "b", 3}, c{3, "c", 3}, d{4, "d", 3};
  double worst = 0.0;
  bool exact = true;
  for (int i = 0; i < 100; ++i) {
    auto f = random_factor({a, b}, rng);
    auto g = random_factor({b, c}, rng);
    auto h = random_factor({a, c}, rng);
    auto comm = [&](const Factor& x, const Factor& y) {
      auto xy = convolve(x, y);
      return rel_linf(reorder_scope(convolve(y, x), scope_ids(xy)), xy);
    };
    worst = std::max(worst, comm(f, g));
    auto lhs = convolve(convolve(f, g), h);
    auto rhs = reorder_scope(convolve(f, convolve(g, h)), scope_ids(lhs));
    worst = std::max(worst, rel_linf(rhs, lhs));
    // disjoint scopes: convolution must equal multiplication bit-for-bit
    auto u = random_factor({a}, rng);
    auto v = random_factor({d}, rng);
    auto cv = convolve(u, v);
    auto mu = multiply(u, v);
    for (std::size_t k = 0; k < cv.size(); ++k)
      if (cv.values()[k] != mu.values()[k]) exact = false;
  }
  report(3, "algebra laws", worst <= 1e-12 && exact,
         "max law dev " + fmt(worst) + std::string(exact ? ", disjoint exact" : ", disjoint NOT exact"));
}

// 4. For random f,g sharing y: p_X == f(x,+)/sum f(x,+) and X indep Z under
// the normalized convolved joint.
void criterion4() {
  std::mt19937_64 rng(104);
  Variable x{1, "x", 3}, y{2, "y", 4}, z{3, "z", 3};
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    auto f = random_factor({x, y}, rng, true);
    auto g = random_factor({y, z}, rng, true);
    auto p = normalize(convolve(f, g));  // scope (x, y, z)

    auto px = marginalize(p, {2, 3});
    auto fx = normalize(marginalize(f, {2}));
    worst = std::max(worst, rel_linf(px, fx));

    auto pxz = marginalize(p, {2});
    auto indep = multiply(px, marginalize(p, {1, 2}));
    worst = std::max(worst, rel_linf(reorder_scope(indep, scope_ids(pxz)), pxz));
  }
  report(4, "latent-shared-variable marginals", worst <= 1e-9, "max rel dev " + fmt(worst));
}

// 5. Latent-sum construction: exact scopes and Monte-Carlo agreement.
void criterion5() {
  std::mt19937_64 rng(105);
  auto var2 = [](int id) { return Variable{id, "x" + std::to_string(id), 2}; };
  auto prob = [&](std::vector<Variable> scope) {
    return normalize(random_factor(scope, rng, true));
  };
  LatentSumSpec spec;
  for (int i = 1; i <= 9; ++i) spec.latents.push_back(var2(i));
  spec.blocks.push_back({{1, 2}, prob({var2(1), var2(2)})});
  spec.blocks.push_back({{3, 4, 5, 6}, prob({var2(3), var2(4), var2(5), var2(6)})});
  spec.blocks.push_back({{7, 8, 9}, prob({var2(7), var2(8), var2(9)})});
  spec.sums = {{2, 4, 8}, {6, 9}};

  auto g = build_latent_sum(spec);
  bool scopes_ok = g.factors.size() == 3 &&
                   scope_ids(g.factors[0].factor) == std::vector<int>{1, 10} &&
                   scope_ids(g.factors[1].factor) == std::vector<int>{3, 10, 5, 11} &&
                   scope_ids(g.factors[2].factor) == std::vector<int>{7, 10, 11};

  auto exact = normalize(joint(g));
  auto emp = latent_sum_sample(spec, 1'000'000, 555);
  double tv = 0.0;
  for (std::size_t i = 0; i < exact.size(); ++i)
    tv += 0.5 * std::abs(emp.values()[i].real() - exact.values()[i].real());
  report(5, "latent-sum model", scopes_ok && tv <= 0.02,
         std::string(scopes_ok ? "scopes exact" : "scopes WRONG") + ", MC TV " + fmt(tv));
}

// 6. Separation implies marginal independence; non-separated pairs show
// genuine dependence.
void criterion6() {
  std::mt19937_64 rng(106);
  double worst = 0.0;
  int separated_checked = 0, counterexamples = 0, attempts = 0;
  while ((separated_checked < 100 || counterexamples < 10) && attempts < 20000) {
    ++attempts;
    auto g = random_cfg(rng, 5, 3, 4);
    std::vector<int> ids;
    for (const auto& v : g.variables) ids.push_back(v.id);
    std::shuffle(ids.begin(), ids.end(), rng);
    if (ids.size() < 2) continue;
    std::set<int> A{ids[0]}, B{ids[1]}, S;
    for (std::size_t i = 2; i < ids.size(); ++i)
      if (rng() % 2) S.insert(ids[i]);
    if (separates(g, A, B, S)) {
      if (separated_checked >= 100) continue;
      // S only blocks paths; marginal independence needs no conditioning,
      // so check the full-complement separation the proposition uses
      std::set<int> rest;
      for (int id : ids)
        if (!A.count(id) && !B.count(id)) rest.insert(id);
      if (!separates(g, A, B, rest)) continue;
      auto r = check_marginal_independence(g, A, B);
      worst = std::max(worst, r.max_deviation);
      ++separated_checked;
    } else if (counterexamples < 10) {
      std::set<int> rest;
      for (int id : ids)
        if (!A.count(id) && !B.count(id)) rest.insert(id);
      if (separates(g, A, B, rest)) continue;  // still separated by the rest
      auto r = check_marginal_independence(g, A, B);
      if (r.max_deviation > 1e-3) ++counterexamples;
    }
  }
  report(6, "separation => independence", separated_checked >= 100 && worst <= 1e-9 &&
                                              counterexamples >= 10,
         std::to_string(separated_checked) + " separated (max dev " + fmt(worst) + "), " +
             std::to_string(counterexamples) + " counterexamples > 1e-3");
}

// 7. Covariance-graph factorization: clique pattern, round trips, sampler.
void criterion7() {
  CovarianceModel ex;
  ex.names = {"y1", "y2", "y3", "y4", "y5", "y6"};
  ex.mean = Eigen::VectorXd::Zero(6);
  ex.cov = Eigen::MatrixXd::Identity(6, 6) * 4.0;
  for (auto [a, b] : std::vector<std::pair<int, int>>{{1, 5}, {2, 3}, {2, 5}, {2, 6},
                                                      {3, 5}, {3, 6}, {4, 5}, {4, 6}, {5, 6}}) {
    ex.cov(a - 1, b - 1) = 0.5;
    ex.cov(b - 1, a - 1) = 0.5;
  }
  auto cliques = maximal_cliques(covariance_graph(ex));
  const bool cliques_ok =
      cliques == std::vector<std::vector<int>>{{0, 4}, {1, 2, 4, 5}, {3, 4, 5}};

  std::mt19937_64 rng(107);
  std::normal_distribution<double> norm;
  int done = 0, tried = 0;
  double worst = 0.0;
  while (done < 50 && tried < 5000) {
    ++tried;
    const int n = 3 + static_cast<int>(rng() % 4);
    Eigen::MatrixXd B(n, n + 2);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n + 2; ++j) B(i, j) = (rng() % 3 == 0) ? norm(rng) : 0.0;
    CovarianceModel m;
    for (int i = 0; i < n; ++i) m.names.push_back("y" + std::to_string(i + 1));
    m.mean = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) m.mean(i) = norm(rng);
    m.cov = B * B.transpose() + 0.5 * Eigen::MatrixXd::Identity(n, n);
    std::vector<GaussianFactor> fs;
    try {
      fs = gaussian_decompose(m);
    } catch (const DecomposeError&) {
      continue;
    }
    auto back = gaussian_compose(fs, n);
    worst = std::max(worst, (back.cov - m.cov).cwiseAbs().maxCoeff());
    worst = std::max(worst, (back.mean - m.mean).cwiseAbs().maxCoeff());
    ++done;
  }

  CovarianceModel path;
  path.names = {"y1", "y2", "y3"};
  path.mean = Eigen::VectorXd::Zero(3);
  path.cov.resize(3, 3);
  path.cov << 1, 0.5, 0, 0.5, 2, 0.5, 0, 0.5, 1;
  const double dev = gaussian_sample_check(path, gaussian_decompose(path), 1'000'000, 77);

  report(7, "gaussian factorization", cliques_ok && done >= 50 && worst <= 1e-12 && dev < 0.02,
         std::string(cliques_ok ? "cliques exact" : "cliques WRONG") + ", " +
             std::to_string(done) + " round trips (max " + fmt(worst) + "), sampler dev " +
             fmt(dev));
}

// 8. Independent-factor model vs brute-force enumeration; structural shape.
void criterion8() {
  std::mt19937_64 rng(108);
  const int N = 3, L = 2, m = 2;
  double worst = 0.0;
  bool structure_ok = true;
  for (int trial = 0; trial < 20; ++trial) {
    IFSpec spec;
    spec.domain = N;
    spec.mixing.assign(L, std::vector<int>(m));
    for (auto& row : spec.mixing)
      for (auto& h : row) h = static_cast<int>(rng() % 7);
    auto rand_dist = [&](int len) {
      std::vector<double> p(static_cast<std::size_t>(len));
      double tot = 0;
      for (auto& v : p) { v = 0.05 + static_cast<double>(rng() % 100); tot += v; }
      for (auto& v : p) v /= tot;
      return p;
    };
    spec.sources = {rand_dist(N), rand_dist(N)};
    spec.noise = rand_dist(N * N);
    auto g = build_if_model(spec);

    if (g.factors.size() != m + 1 || g.variables.size() != L) structure_ok = false;
    for (const auto& nf : g.factors)
      if (nf.factor.rank() != L) structure_ok = false;

    std::vector<double> want(static_cast<std::size_t>(N * N), 0.0);
    for (int x1 = 0; x1 < N; ++x1)
      for (int x2 = 0; x2 < N; ++x2)
        for (int u = 0; u < N * N; ++u) {
          const int y1 = (spec.mixing[0][0] * x1 + spec.mixing[0][1] * x2 + u / N) % N;
          const int y2 = (spec.mixing[1][0] * x1 + spec.mixing[1][1] * x2 + u % N) % N;
          want[static_cast<std::size_t>(y1 * N + y2)] +=
              spec.sources[0][static_cast<std::size_t>(x1)] *
              spec.sources[1][static_cast<std::size_t>(x2)] *
              spec.noise[static_cast<std::size_t>(u)];
        }
    auto j = joint(g);
    for (int k = 0; k < N * N; ++k)
      worst = std::max(worst, std::abs(j.values()[static_cast<std::size_t>(k)] -
                                       cplx(want[static_cast<std::size_t>(k)], 0)));
  }
  report(8, "independent-factor model", structure_ok && worst <= 1e-12,
         std::string(structure_ok ? "structure ok" : "structure WRONG") + ", max abs dev " +
             fmt(worst));
}

// 9. Measured speedup trend: chain CFG with evidence, A=16 vs A=1024.
void criterion9() {
  const auto t0 = std::chrono::steady_clock::now();
  auto rep = run_bench(BenchTemplate::Chain, 4, {16, 1024}, 1, 9);
  const auto t1 = std::chrono::steady_clock::now();
  const double ratio16 = rep.rows[0].ratio, ratio1024 = rep.rows[1].ratio;
  const double dev = std::max(rep.rows[0].max_dev, rep.rows[1].max_dev);
  const double secs = std::chrono::duration<double>(t1 - t0).count();
  report(9, "fft speedup trend", ratio1024 >= 4.0 * ratio16 && dev <= 1e-6,
         "ratio(16)=" + fmt(ratio16) + ", ratio(1024)=" + fmt(ratio1024) + ", dev " +
             fmt(dev) + ", " + fmt(secs) + " s");
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  if (failures) std::printf("%d criterion(s) FAILED\n", failures);
  else std::printf("all 9 criteria passed\n");
  return failures ? 1 : 0;
}
