#ifndef CFGRAPH_MODELS_HPP
#define CFGRAPH_MODELS_HPP

#include <Eigen/Dense>
#include <cstdint>

#include "cfgraph/graph.hpp"

namespace cfgraph {

// ---------------------------------------------------------------------------
// Latent-sum models: observed variables are sums of independent latent blocks.
// ---------------------------------------------------------------------------

/// One independent block of latent variables with its joint distribution.
struct LatentBlock {
  std::vector<int> ids;  // latent variable ids, a subset of 1..|U|
  Factor joint;          // probability factor over exactly these ids
};

/// Partition/repartition data: blocks U(1..m) with attached joints, and sum
/// sets V(1..K-1). V(K) is implicit: every latent id not in any sum set is
/// observed directly. Sum variable l gets id |U|+l.
struct LatentSumSpec {
  std::vector<Variable> latents;       // ids 1..|U|
  std::vector<LatentBlock> blocks;
  std::vector<std::vector<int>> sums;  // V(l) for l <= K-1
};

/// Throws ValidationError unless the blocks partition the latent ids, the sum
/// sets are disjoint, no sum set touches one block twice, every sum set shares
/// one domain, and every block joint is a probability factor.
void validate_latent_sum(const LatentSumSpec& spec);

/// The id each latent maps to: itself when observed directly, else its sum
/// variable's id.
std::map<int, int> latent_sum_mapping(const LatentSumSpec& spec);

/// Convolutional graph over the observed variables with one factor per block,
/// the block joint re-scoped through the mapping.
FactorGraph build_latent_sum(const LatentSumSpec& spec);

/// DOT chain graph: a complete undirected component per block, directed edges
/// into each sum vertex, latent vertices hollow.
std::string export_chain_graph(const LatentSumSpec& spec);

/// Seeded Monte-Carlo simulation of the latent model: samples every block,
/// applies the sums, and returns the empirical distribution over the observed
/// variables (same scope order as build_latent_sum's joint).
Factor latent_sum_sample(const LatentSumSpec& spec, std::size_t samples, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Gaussian covariance-graph factorization, in closed (moment) form.
// ---------------------------------------------------------------------------

struct GaussianFactor {
  std::vector<int> scope;  // 0-based variable indices
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

struct CovarianceModel {
  std::vector<std::string> names;
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

struct UndirectedGraph {
  int n = 0;
  std::vector<std::pair<int, int>> edges;  // i < j
};

/// Edge iff |C_ij| > 1e-12, i != j.
UndirectedGraph covariance_graph(const CovarianceModel& model);

/// Exact maximal-clique enumeration (Bron-Kerbosch with pivoting). Throws
/// CapExceeded for graphs beyond `vertex_cap`. Cliques and their members are
/// sorted for determinism.
std::vector<std::vector<int>> maximal_cliques(const UndirectedGraph& g, int vertex_cap = 24);

/// Equal-split construction: each off-diagonal entry is divided among the
/// maximal cliques containing both endpoints, each diagonal entry and mean
/// component among the cliques containing the vertex. Throws DecomposeError
/// when a clique matrix fails the PSD check (heuristic limit, not proof of
/// non-existence).
std::vector<GaussianFactor> gaussian_decompose(const CovarianceModel& model);

/// Sum of padded means and covariances; inverse of gaussian_decompose on its
/// success domain.
CovarianceModel gaussian_compose(const std::vector<GaussianFactor>& factors, int n);

/// Draws independent clique Gaussians, sums them per coordinate, and returns
/// the L-infinity deviation of the empirical covariance from model.cov.
double gaussian_sample_check(const CovarianceModel& model,
                             const std::vector<GaussianFactor>& factors, std::size_t samples,
                             std::uint64_t seed);

// ---------------------------------------------------------------------------
// Independent factor model, discretized over Z_N.
// ---------------------------------------------------------------------------

struct IFSpec {
  int domain = 2;                            // N
  std::vector<std::vector<int>> mixing;      // L x m, entries taken mod N
  std::vector<std::vector<double>> sources;  // m distributions of length N
  std::vector<double> noise;                 // joint over L sensors, N^L row-major
};

void validate_if_spec(const IFSpec& spec);

/// Convolutional graph over the L sensor variables with m line-supported
/// source factors plus the noise factor, every factor on the full sensor
/// scope.
FactorGraph build_if_model(const IFSpec& spec);

}  // namespace cfgraph

#endif
