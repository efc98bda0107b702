#include "cfgraph/models.hpp"

#include <algorithm>
#include <bit>
#include <random>
#include <sstream>

#include "cfgraph/errors.hpp"

namespace cfgraph {

namespace {

bool is_probability_factor(const Factor& f, double tol = 1e-9) {
  double total = 0.0;
  for (const auto& v : f.values()) {
    if (std::abs(v.imag()) > tol || v.real() < -tol) return false;
    total += v.real();
  }
  return std::abs(total - 1.0) <= tol;
}

}  // namespace

void validate_latent_sum(const LatentSumSpec& spec) {
  std::set<int> ids;
  for (const auto& v : spec.latents) {
    if (v.size < 1) throw ValidationError("latent '" + v.name + "' has non-positive domain");
    if (!ids.insert(v.id).second)
      throw ValidationError("duplicate latent id " + std::to_string(v.id));
  }
  const int u = static_cast<int>(spec.latents.size());
  for (int a = 1; a <= u; ++a)
    if (!ids.count(a)) throw ValidationError("latent ids must be exactly 1..|U|");

  std::set<int> in_blocks;
  for (const auto& b : spec.blocks) {
    std::set<int> bids(b.ids.begin(), b.ids.end());
    if (bids.size() != b.ids.size()) throw ValidationError("duplicate id within a block");
    for (int a : b.ids) {
      if (!ids.count(a)) throw ValidationError("block references unknown latent id");
      if (!in_blocks.insert(a).second)
        throw ValidationError("latent id " + std::to_string(a) + " appears in two blocks");
    }
    if (b.joint.rank() != b.ids.size())
      throw ValidationError("block joint scope does not match the block");
    for (std::size_t i = 0; i < b.ids.size(); ++i) {
      const auto& sv = b.joint.scope()[i];
      if (sv.id != b.ids[i])
        throw ValidationError("block joint scope must list the block ids in order");
      const Variable* lv = nullptr;
      for (const auto& cand : spec.latents)
        if (cand.id == sv.id) lv = &cand;
      if (!lv || lv->size != sv.size)
        throw ValidationError("block joint domain disagrees with latent declaration");
    }
    if (!is_probability_factor(b.joint))
      throw ValidationError("block joint is not a probability factor");
  }
  if (in_blocks.size() != ids.size())
    throw ValidationError("blocks do not cover every latent id");

  std::set<int> in_sums;
  for (const auto& vl : spec.sums) {
    if (vl.empty()) throw ValidationError("empty sum set");
    int domain = -1;
    for (int a : vl) {
      if (!ids.count(a)) throw ValidationError("sum set references unknown latent id");
      if (!in_sums.insert(a).second)
        throw ValidationError("latent id " + std::to_string(a) + " appears in two sum sets");
      for (const auto& v : spec.latents)
        if (v.id == a) {
          if (domain < 0) domain = v.size;
          if (domain != v.size)
            throw ValidationError("sum set mixes domain sizes; mod-N addition undefined");
        }
    }
    // repartition constraint: no two members of one sum set share a block
    for (const auto& b : spec.blocks) {
      int hits = 0;
      for (int a : vl)
        if (std::find(b.ids.begin(), b.ids.end(), a) != b.ids.end()) ++hits;
      if (hits > 1)
        throw ValidationError(
            "repartition constraint violated: a sum set has two members in one block");
    }
  }
}

std::map<int, int> latent_sum_mapping(const LatentSumSpec& spec) {
  std::map<int, int> t;
  const int u = static_cast<int>(spec.latents.size());
  for (const auto& v : spec.latents) t[v.id] = v.id;
  for (std::size_t l = 0; l < spec.sums.size(); ++l)
    for (int a : spec.sums[l]) t[a] = u + static_cast<int>(l) + 1;
  return t;
}

namespace {

std::vector<Variable> observed_variables(const LatentSumSpec& spec) {
  const int u = static_cast<int>(spec.latents.size());
  std::set<int> summed;
  for (const auto& vl : spec.sums)
    for (int a : vl) summed.insert(a);

  std::vector<Variable> vars;
  std::vector<Variable> sorted = spec.latents;
  std::sort(sorted.begin(), sorted.end(),
            [](const Variable& a, const Variable& b) { return a.id < b.id; });
  for (const auto& v : sorted)
    if (!summed.count(v.id)) vars.push_back(v);
  for (std::size_t l = 0; l < spec.sums.size(); ++l) {
    int id = u + static_cast<int>(l) + 1;
    int size = 0;
    for (const auto& v : spec.latents)
      if (v.id == spec.sums[l].front()) size = v.size;
    vars.push_back({id, "x" + std::to_string(id), size});
  }
  return vars;
}

}  // namespace

FactorGraph build_latent_sum(const LatentSumSpec& spec) {
  validate_latent_sum(spec);
  auto t = latent_sum_mapping(spec);

  FactorGraph g;
  g.semantics = Semantics::Convolutional;
  g.variables = observed_variables(spec);

  for (std::size_t i = 0; i < spec.blocks.size(); ++i) {
    const auto& b = spec.blocks[i];
    std::vector<Variable> scope;
    for (const auto& sv : b.joint.scope()) {
      const Variable* mapped = nullptr;
      for (const auto& ov : g.variables)
        if (ov.id == t.at(sv.id)) mapped = &ov;
      scope.push_back(*mapped);
    }
    g.factors.push_back({"f" + std::to_string(i + 1), Factor(scope, b.joint.values())});
  }
  return g;
}

std::string export_chain_graph(const LatentSumSpec& spec) {
  validate_latent_sum(spec);
  const int u = static_cast<int>(spec.latents.size());
  std::set<int> summed;
  for (const auto& vl : spec.sums)
    for (int a : vl) summed.insert(a);

  auto name_of = [&](int id) -> std::string {
    for (const auto& v : spec.latents)
      if (v.id == id) return v.name;
    return "x" + std::to_string(id);
  };

  std::ostringstream os;
  os << "digraph chain_graph {\n";
  os << "  node [shape=circle fontsize=11];\n";
  for (const auto& v : spec.latents) {
    os << "  \"" << v.name << "\"";
    if (summed.count(v.id)) os << " [style=\"\" label=\"" << v.name << "\"]";
    else os << " [style=filled fillcolor=lightgray]";
    os << ";\n";
  }
  for (std::size_t l = 0; l < spec.sums.size(); ++l) {
    int id = u + static_cast<int>(l) + 1;
    os << "  \"x" << id << "\" [style=filled fillcolor=lightgray];\n";
  }
  // complete undirected component per block (rendered as arrowless edges)
  for (const auto& b : spec.blocks)
    for (std::size_t i = 0; i < b.ids.size(); ++i)
      for (std::size_t j = i + 1; j < b.ids.size(); ++j)
        os << "  \"" << name_of(b.ids[i]) << "\" -> \"" << name_of(b.ids[j])
           << "\" [dir=none];\n";
  for (std::size_t l = 0; l < spec.sums.size(); ++l) {
    int id = u + static_cast<int>(l) + 1;
    for (int a : spec.sums[l])
      os << "  \"" << name_of(a) << "\" -> \"x" << id << "\";\n";
  }
  os << "}\n";
  return os.str();
}

Factor latent_sum_sample(const LatentSumSpec& spec, std::size_t samples, std::uint64_t seed) {
  validate_latent_sum(spec);
  auto t = latent_sum_mapping(spec);
  std::vector<Variable> vars = observed_variables(spec);

  std::size_t total = 1;
  for (const auto& v : vars) total *= static_cast<std::size_t>(v.size);
  std::vector<std::size_t> strides(vars.size(), 1);
  for (int i = static_cast<int>(vars.size()) - 2; i >= 0; --i)
    strides[static_cast<std::size_t>(i)] =
        strides[static_cast<std::size_t>(i) + 1] *
        static_cast<std::size_t>(vars[static_cast<std::size_t>(i) + 1].size);
  std::map<int, std::size_t> axis_of;
  for (std::size_t a = 0; a < vars.size(); ++a) axis_of[vars[a].id] = a;

  // per-block sampling tables
  struct BlockSampler {
    const LatentBlock* block;
    std::vector<double> cdf;
  };
  std::vector<BlockSampler> bs;
  for (const auto& b : spec.blocks) {
    BlockSampler s{&b, {}};
    double acc = 0.0;
    for (const auto& v : b.joint.values()) {
      acc += std::max(0.0, v.real());
      s.cdf.push_back(acc);
    }
    bs.push_back(std::move(s));
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<std::size_t> counts(total, 0);
  for (std::size_t s = 0; s < samples; ++s) {
    std::vector<int> observed(vars.size(), 0);
    for (const auto& sampler : bs) {
      const double r = unif(rng) * sampler.cdf.back();
      std::size_t flat = static_cast<std::size_t>(
          std::lower_bound(sampler.cdf.begin(), sampler.cdf.end(), r) - sampler.cdf.begin());
      if (flat >= sampler.cdf.size()) flat = sampler.cdf.size() - 1;
      // decode latent values and fold them into the observed tuple
      const auto& scope = sampler.block->joint.scope();
      const auto bstr = sampler.block->joint.strides();
      for (std::size_t i = 0; i < scope.size(); ++i) {
        int value = static_cast<int>(flat / bstr[i]);
        flat %= bstr[i];
        std::size_t axis = axis_of.at(t.at(scope[i].id));
        observed[axis] = (observed[axis] + value) % vars[axis].size;
      }
    }
    std::size_t off = 0;
    for (std::size_t a = 0; a < vars.size(); ++a)
      off += static_cast<std::size_t>(observed[a]) * strides[a];
    ++counts[off];
  }

  std::vector<cplx> values(total);
  for (std::size_t i = 0; i < total; ++i)
    values[i] = cplx(static_cast<double>(counts[i]) / static_cast<double>(samples), 0.0);
  return Factor(vars, std::move(values));
}

// ---------------------------------------------------------------------------

UndirectedGraph covariance_graph(const CovarianceModel& model) {
  const int n = static_cast<int>(model.cov.rows());
  if (model.cov.cols() != n) throw ValidationError("covariance matrix must be square");
  if ((model.cov - model.cov.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw ValidationError("covariance matrix must be symmetric");
  for (int i = 0; i < n; ++i)
    if (model.cov(i, i) < 0.0) throw ValidationError("negative diagonal entry");

  UndirectedGraph g;
  g.n = n;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::abs(model.cov(i, j)) > 1e-12) g.edges.emplace_back(i, j);
  return g;
}

namespace {

void bron_kerbosch(std::uint64_t r, std::uint64_t p, std::uint64_t x,
                   const std::vector<std::uint64_t>& adj,
                   std::vector<std::vector<int>>& out) {
  if (p == 0 && x == 0) {
    std::vector<int> clique;
    for (int v = 0; v < 64; ++v)
      if (r & (std::uint64_t{1} << v)) clique.push_back(v);
    out.push_back(std::move(clique));
    return;
  }
  // pivot: vertex of P|X with most neighbours in P
  std::uint64_t px = p | x;
  int pivot = -1, best = -1;
  for (int v = 0; v < 64; ++v)
    if (px & (std::uint64_t{1} << v)) {
      int cnt = static_cast<int>(std::popcount(p & adj[static_cast<std::size_t>(v)]));
      if (cnt > best) {
        best = cnt;
        pivot = v;
      }
    }
  std::uint64_t candidates = p & ~adj[static_cast<std::size_t>(pivot)];
  for (int v = 0; v < 64; ++v) {
    std::uint64_t bit = std::uint64_t{1} << v;
    if (!(candidates & bit)) continue;
    bron_kerbosch(r | bit, p & adj[static_cast<std::size_t>(v)],
                  x & adj[static_cast<std::size_t>(v)], adj, out);
    p &= ~bit;
    x |= bit;
  }
}

}  // namespace

std::vector<std::vector<int>> maximal_cliques(const UndirectedGraph& g, int vertex_cap) {
  if (g.n > vertex_cap)
    throw CapExceeded("maximal_cliques: graph has " + std::to_string(g.n) +
                      " vertices, cap is " + std::to_string(vertex_cap));
  std::vector<std::uint64_t> adj(static_cast<std::size_t>(g.n), 0);
  for (const auto& [i, j] : g.edges) {
    adj[static_cast<std::size_t>(i)] |= std::uint64_t{1} << j;
    adj[static_cast<std::size_t>(j)] |= std::uint64_t{1} << i;
  }
  std::vector<std::vector<int>> out;
  std::uint64_t all = (g.n == 64) ? ~std::uint64_t{0} : ((std::uint64_t{1} << g.n) - 1);
  if (g.n > 0) bron_kerbosch(0, all, 0, adj, out);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<GaussianFactor> gaussian_decompose(const CovarianceModel& model) {
  const int n = static_cast<int>(model.cov.rows());
  if (model.mean.size() != n) throw ValidationError("mean dimension mismatch");
  {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(model.cov);
    if (es.eigenvalues().minCoeff() < -1e-10)
      throw ValidationError("covariance matrix is not positive semidefinite");
  }
  auto cliques = maximal_cliques(covariance_graph(model));

  // membership counts for the equal split
  std::vector<int> vertex_count(static_cast<std::size_t>(n), 0);
  Eigen::MatrixXi pair_count = Eigen::MatrixXi::Zero(n, n);
  for (const auto& c : cliques) {
    for (int v : c) ++vertex_count[static_cast<std::size_t>(v)];
    for (std::size_t a = 0; a < c.size(); ++a)
      for (std::size_t b = a + 1; b < c.size(); ++b) {
        ++pair_count(c[a], c[b]);
        ++pair_count(c[b], c[a]);
      }
  }

  std::vector<GaussianFactor> out;
  for (const auto& c : cliques) {
    GaussianFactor f;
    f.scope = c;
    const int k = static_cast<int>(c.size());
    f.mean = Eigen::VectorXd::Zero(k);
    f.cov = Eigen::MatrixXd::Zero(k, k);
    for (int a = 0; a < k; ++a) {
      f.mean(a) = model.mean(c[static_cast<std::size_t>(a)]) /
                  vertex_count[static_cast<std::size_t>(c[static_cast<std::size_t>(a)])];
      f.cov(a, a) = model.cov(c[static_cast<std::size_t>(a)], c[static_cast<std::size_t>(a)]) /
                    vertex_count[static_cast<std::size_t>(c[static_cast<std::size_t>(a)])];
      for (int b = a + 1; b < k; ++b) {
        int i = c[static_cast<std::size_t>(a)], j = c[static_cast<std::size_t>(b)];
        double share =
            (std::abs(model.cov(i, j)) > 1e-12) ? model.cov(i, j) / pair_count(i, j) : 0.0;
        f.cov(a, b) = f.cov(b, a) = share;
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(f.cov);
    if (es.eigenvalues().minCoeff() < -1e-10) {
      std::ostringstream os;
      os << "equal-split clique covariance is not PSD on clique {";
      for (std::size_t a = 0; a < c.size(); ++a) os << (a ? "," : "") << c[a];
      os << "}; a convolutional factorization still exists, this construction "
            "just cannot find it";
      throw DecomposeError(os.str());
    }
    out.push_back(std::move(f));
  }
  return out;
}

CovarianceModel gaussian_compose(const std::vector<GaussianFactor>& factors, int n) {
  CovarianceModel m;
  m.mean = Eigen::VectorXd::Zero(n);
  m.cov = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) m.names.push_back("y" + std::to_string(i + 1));
  for (const auto& f : factors) {
    const int k = static_cast<int>(f.scope.size());
    for (int a = 0; a < k; ++a) {
      if (f.scope[static_cast<std::size_t>(a)] < 0 ||
          f.scope[static_cast<std::size_t>(a)] >= n)
        throw ValidationError("gaussian factor scope out of range");
      m.mean(f.scope[static_cast<std::size_t>(a)]) += f.mean(a);
      for (int b = 0; b < k; ++b)
        m.cov(f.scope[static_cast<std::size_t>(a)], f.scope[static_cast<std::size_t>(b)]) +=
            f.cov(a, b);
    }
  }
  return m;
}

double gaussian_sample_check(const CovarianceModel& model,
                             const std::vector<GaussianFactor>& factors, std::size_t samples,
                             std::uint64_t seed) {
  const int n = static_cast<int>(model.cov.rows());
  // per-factor sqrt of the covariance (eigen route, tolerant of PSD-singular)
  struct Sampler {
    const GaussianFactor* f;
    Eigen::MatrixXd root;
  };
  std::vector<Sampler> ss;
  for (const auto& f : factors) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(f.cov);
    Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    ss.push_back({&f, es.eigenvectors() * lam.asDiagonal()});
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(n);
  Eigen::MatrixXd outer = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd x(n), z;
  for (std::size_t s = 0; s < samples; ++s) {
    x.setZero();
    for (const auto& sampler : ss) {
      const int k = static_cast<int>(sampler.f->scope.size());
      Eigen::VectorXd g(k);
      for (int i = 0; i < k; ++i) g(i) = gauss(rng);
      z = sampler.f->mean + sampler.root * g;
      for (int i = 0; i < k; ++i) x(sampler.f->scope[static_cast<std::size_t>(i)]) += z(i);
    }
    sum += x;
    outer += x * x.transpose();
  }
  const double ns = static_cast<double>(samples);
  Eigen::VectorXd mean = sum / ns;
  Eigen::MatrixXd cov = outer / ns - mean * mean.transpose();
  return (cov - model.cov).cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------------------

void validate_if_spec(const IFSpec& spec) {
  if (spec.domain < 1) throw ValidationError("IF model: domain size must be >= 1");
  const std::size_t L = spec.mixing.size();
  if (L == 0) throw ValidationError("IF model: at least one sensor required");
  const std::size_t m = spec.sources.size();
  for (const auto& row : spec.mixing)
    if (row.size() != m) throw ValidationError("IF model: mixing matrix must be L x m");
  const std::size_t N = static_cast<std::size_t>(spec.domain);
  for (const auto& src : spec.sources) {
    if (src.size() != N) throw ValidationError("IF model: source distribution length != N");
    double total = 0.0;
    for (double p : src) {
      if (p < -1e-9) throw ValidationError("IF model: negative source probability");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-9)
      throw ValidationError("IF model: source distribution not normalized");
  }
  std::size_t want = 1;
  for (std::size_t j = 0; j < L; ++j) want *= N;
  if (spec.noise.size() != want)
    throw ValidationError("IF model: noise table must have N^L entries");
  double total = 0.0;
  for (double p : spec.noise) {
    if (p < -1e-9) throw ValidationError("IF model: negative noise probability");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw ValidationError("IF model: noise distribution not normalized");
}

FactorGraph build_if_model(const IFSpec& spec) {
  validate_if_spec(spec);
  const int N = spec.domain;
  const int L = static_cast<int>(spec.mixing.size());
  const int m = static_cast<int>(spec.sources.size());

  FactorGraph g;
  g.semantics = Semantics::Convolutional;
  for (int j = 0; j < L; ++j)
    g.variables.push_back({j + 1, "y" + std::to_string(j + 1), N});

  std::size_t total = 1;
  for (int j = 0; j < L; ++j) total *= static_cast<std::size_t>(N);
  std::vector<std::size_t> strides(static_cast<std::size_t>(L), 1);
  for (int j = L - 2; j >= 0; --j)
    strides[static_cast<std::size_t>(j)] =
        strides[static_cast<std::size_t>(j) + 1] * static_cast<std::size_t>(N);

  // one line-supported factor per source: mass p_i(x) at (H_{1,i} x, ..., H_{L,i} x)
  for (int i = 0; i < m; ++i) {
    std::vector<cplx> values(total, cplx(0.0, 0.0));
    for (int x = 0; x < N; ++x) {
      std::size_t off = 0;
      for (int j = 0; j < L; ++j) {
        int h = ((spec.mixing[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] % N) +
                 N) %
                N;
        off += static_cast<std::size_t>((h * x) % N) * strides[static_cast<std::size_t>(j)];
      }
      values[off] += cplx(spec.sources[static_cast<std::size_t>(i)][static_cast<std::size_t>(x)], 0.0);
    }
    g.factors.push_back({"src" + std::to_string(i + 1), Factor(g.variables, std::move(values))});
  }

  std::vector<cplx> noise(total);
  for (std::size_t t = 0; t < total; ++t) noise[t] = cplx(spec.noise[t], 0.0);
  g.factors.push_back({"noise", Factor(g.variables, std::move(noise))});
  return g;
}

}  // namespace cfgraph
