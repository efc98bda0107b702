#ifndef CFGRAPH_INFERENCE_HPP
#define CFGRAPH_INFERENCE_HPP

#include <optional>

#include "cfgraph/graph.hpp"

namespace cfgraph {

/// The generic inference problem: sum out M, fix E at the evidence values,
/// keep R = V \ (M u E).
struct Query {
  std::set<int> marginalize;
  Assignment evidence;
};

enum class Method { Auto, Elimination, Fft, Oracle };

using EliminationOrder = std::vector<int>;

struct TraceStep {
  int variable = 0;
  std::vector<std::string> absorbed;     // names of the factors combined
  std::string produced;                  // name of the installed factor
  std::vector<int> new_scope;            // scope ids of the installed factor
};
using Trace = std::vector<TraceStep>;

/// Leaf-first greedy order: repeatedly pick the target variable adjacent to
/// the fewest factors in the progressively reduced graph, ties by id.
EliminationOrder default_order(const FactorGraph& g, const std::set<int>& targets);

/// Sum out M by successive elimination on a multiplicative graph; returns the
/// product of all surviving factors. Evidence must already be pushed.
Factor mfg_eliminate(const FactorGraph& g, const std::set<int>& M,
                     const EliminationOrder& order, Trace* trace = nullptr);

/// Slice every factor at its evidenced variables and drop the evidenced
/// variable vertices.
FactorGraph mfg_push_evidence(const FactorGraph& g, const Assignment& evidence);

/// Marginalize every factor over its scope's intersection with M and drop the
/// M vertices; on a convolutional graph this commutes with the joint.
FactorGraph cfg_push_marginalization(const FactorGraph& g, const std::set<int>& M);

/// Evaluate at the evidence by successive elimination on a convolutional
/// graph: for each evidenced variable, convolve the adjacent factors and take
/// the slice at the evidence value. Marginalization must already be pushed.
/// Returns the convolutional product of the surviving factors.
Factor cfg_eliminate(const FactorGraph& g, const Assignment& evidence,
                     const EliminationOrder& order, Trace* trace = nullptr);

/// The dual pipeline: push marginalization, forward-transform every factor,
/// fold each evidenced variable's character e^{+j2 pi k xbar/N}/N into one
/// adjacent factor, eliminate the dual evidence variables on the resulting
/// multiplicative graph, and inverse-transform the survivors.
Factor fft_query(const FactorGraph& g, const Query& query, Trace* trace = nullptr);

/// Dispatch: returns sum_{x_M} joint(g) evaluated at the evidence, scope = R
/// in declaration order. Auto picks Fft for convolutional graphs with
/// evidence, Elimination otherwise.
Factor answer(const FactorGraph& g, const Query& query, Method method = Method::Auto,
              std::size_t oracle_cap = kDefaultJointCap, Trace* trace = nullptr);

}  // namespace cfgraph

#endif
