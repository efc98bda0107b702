#ifndef CFGRAPH_GRAPH_HPP
#define CFGRAPH_GRAPH_HPP

#include <set>
#include <string>
#include <vector>

#include "cfgraph/algebra.hpp"

namespace cfgraph {

struct NamedFactor {
  std::string name;
  Factor factor;
};

/// Bipartite variable/factor structure with a product semantics. Adjacency is
/// derived: variable x_i is adjacent to factor f_j iff x_i is in f_j's scope.
/// Immutable after construction by convention; all operations are pure.
struct FactorGraph {
  std::vector<Variable> variables;
  std::vector<NamedFactor> factors;
  Semantics semantics = Semantics::Multiplicative;

  int position_of(int id) const {
    for (std::size_t i = 0; i < variables.size(); ++i)
      if (variables[i].id == id) return static_cast<int>(i);
    return -1;
  }
  const Variable* find_variable(int id) const {
    int p = position_of(id);
    return p < 0 ? nullptr : &variables[static_cast<std::size_t>(p)];
  }
  /// Indices of factors whose scope contains the variable.
  std::vector<std::size_t> factors_adjacent_to(int id) const {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < factors.size(); ++j)
      if (factors[j].factor.in_scope(id)) out.push_back(j);
    return out;
  }
};

constexpr std::size_t kDefaultJointCap = 10'000'000;

/// Checks every structural invariant and returns the full violation list
/// (empty means valid): scope coverage, union coverage, id/name uniqueness,
/// domain agreement between factor scopes and the declared variables.
std::vector<std::string> validate(const FactorGraph& g);

/// Structurally identical graph of the opposite semantics whose factors are
/// transformed: Forward when g is convolutional, Inverse when multiplicative,
/// so dualize(dualize(g)) == g under the fixed scaling convention.
FactorGraph dualize(const FactorGraph& g);

/// True iff every bipartite path from A to B passes through a variable vertex
/// of S. A, B, S must be pairwise disjoint variable id sets.
bool separates(const FactorGraph& g, const std::set<int>& A, const std::set<int>& B,
               const std::set<int>& S);

/// Brute-force product of all factors under g's semantics, scope in
/// declaration order. Throws CapExceeded when the table would exceed `cap`.
Factor joint(const FactorGraph& g, std::size_t cap = kDefaultJointCap);

struct IndependenceReport {
  bool independent = false;
  double max_deviation = 0.0;
};

/// Normalizes the joint of the graph, marginalizes to A and B and
/// tests p(A,B) == p(A) p(B) in L-infinity at 1e-9.
IndependenceReport check_marginal_independence(const FactorGraph& g, const std::set<int>& A,
                                               const std::set<int>& B,
                                               std::size_t cap = kDefaultJointCap);

/// DOT rendering of the bipartite graph: variables as circles, factors as
/// squares.
std::string to_dot(const FactorGraph& g);

}  // namespace cfgraph

#endif
