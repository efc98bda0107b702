#include "cfgraph/graph.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

#include "cfgraph/errors.hpp"

namespace cfgraph {

std::vector<std::string> validate(const FactorGraph& g) {
  std::vector<std::string> violations;

  std::set<int> ids;
  std::set<std::string> names;
  for (const auto& v : g.variables) {
    if (!ids.insert(v.id).second)
      violations.push_back("duplicate variable id " + std::to_string(v.id));
    if (!names.insert(v.name).second)
      violations.push_back("duplicate variable name '" + v.name + "'");
    if (v.size < 1)
      violations.push_back("variable '" + v.name + "' has non-positive domain size");
  }

  std::set<std::string> fnames;
  std::set<int> covered;
  for (const auto& nf : g.factors) {
    if (nf.name.empty())
      violations.push_back("factor with empty name");
    else if (!fnames.insert(nf.name).second)
      violations.push_back("duplicate factor name '" + nf.name + "'");
    for (const auto& sv : nf.factor.scope()) {
      const Variable* declared = g.find_variable(sv.id);
      if (!declared) {
        violations.push_back("factor '" + nf.name + "' references undeclared variable id " +
                             std::to_string(sv.id));
        continue;
      }
      if (declared->size != sv.size)
        violations.push_back("factor '" + nf.name + "' disagrees with variable '" +
                             declared->name + "' on domain size");
      covered.insert(sv.id);
    }
  }
  for (const auto& v : g.variables)
    if (!covered.count(v.id))
      violations.push_back("variable '" + v.name + "' appears in no factor scope");

  return violations;
}

FactorGraph dualize(const FactorGraph& g) {
  FactorGraph d;
  d.variables = g.variables;
  d.semantics = (g.semantics == Semantics::Convolutional) ? Semantics::Multiplicative
                                                          : Semantics::Convolutional;
  const Direction dir =
      (g.semantics == Semantics::Convolutional) ? Direction::Forward : Direction::Inverse;
  d.factors.reserve(g.factors.size());
  for (const auto& nf : g.factors) d.factors.push_back({nf.name, dft(nf.factor, dir)});
  return d;
}

bool separates(const FactorGraph& g, const std::set<int>& A, const std::set<int>& B,
               const std::set<int>& S) {
  auto disjoint = [](const std::set<int>& x, const std::set<int>& y) {
    for (int v : x)
      if (y.count(v)) return false;
    return true;
  };
  if (!disjoint(A, B) || !disjoint(A, S) || !disjoint(B, S))
    throw ValidationError("separates: A, B, S must be pairwise disjoint");

  // BFS over the bipartite graph starting from A; S variable vertices are
  // removed, factor vertices are never cut.
  std::set<int> seen_vars;
  std::set<std::size_t> seen_factors;
  std::deque<int> frontier;
  for (int a : A) {
    if (g.position_of(a) < 0) throw ValidationError("separates: unknown variable id");
    seen_vars.insert(a);
    frontier.push_back(a);
  }
  for (int b : B)
    if (g.position_of(b) < 0) throw ValidationError("separates: unknown variable id");
  for (int s : S)
    if (g.position_of(s) < 0) throw ValidationError("separates: unknown variable id");

  while (!frontier.empty()) {
    int v = frontier.front();
    frontier.pop_front();
    for (std::size_t j : g.factors_adjacent_to(v)) {
      if (!seen_factors.insert(j).second) continue;
      for (const auto& sv : g.factors[j].factor.scope()) {
        if (S.count(sv.id) || seen_vars.count(sv.id)) continue;
        if (B.count(sv.id)) return false;
        seen_vars.insert(sv.id);
        frontier.push_back(sv.id);
      }
    }
  }
  return true;
}

Factor joint(const FactorGraph& g, std::size_t cap) {
  std::size_t total = 1;
  for (const auto& v : g.variables) {
    total *= static_cast<std::size_t>(v.size);
    if (total > cap)
      throw CapExceeded("joint table would exceed the size cap of " + std::to_string(cap));
  }
  std::vector<Factor> fs;
  fs.reserve(g.factors.size());
  for (const auto& nf : g.factors) fs.push_back(nf.factor);
  Factor j = product_all(fs, g.semantics);
  std::vector<int> order;
  for (const auto& v : g.variables)
    if (j.in_scope(v.id)) order.push_back(v.id);
  return reorder_scope(j, order);
}

IndependenceReport check_marginal_independence(const FactorGraph& g, const std::set<int>& A,
                                               const std::set<int>& B, std::size_t cap) {
  for (int a : A)
    if (B.count(a)) throw ValidationError("A and B must be disjoint");
  if (A.empty() || B.empty()) return {true, 0.0};

  Factor p = normalize(joint(g, cap));
  std::set<int> drop;
  for (const auto& v : g.variables)
    if (!A.count(v.id) && !B.count(v.id)) drop.insert(v.id);
  Factor pab = marginalize(p, drop);

  std::set<int> bids(B.begin(), B.end()), aids(A.begin(), A.end());
  Factor pa = marginalize(pab, bids);
  Factor pb = marginalize(pab, aids);
  Factor prod = multiply(pa, pb);

  std::vector<int> order;
  for (const auto& v : pab.scope()) order.push_back(v.id);
  prod = reorder_scope(prod, order);

  double dev = 0.0;
  for (std::size_t i = 0; i < pab.size(); ++i)
    dev = std::max(dev, std::abs(pab.values()[i] - prod.values()[i]));
  return {dev <= 1e-9, dev};
}

std::string to_dot(const FactorGraph& g) {
  std::ostringstream os;
  os << "graph factor_graph {\n";
  os << "  node [fontsize=11];\n";
  for (const auto& v : g.variables)
    os << "  \"" << v.name << "\" [shape=circle];\n";
  for (const auto& nf : g.factors)
    os << "  \"" << nf.name << "\" [shape=square];\n";
  for (const auto& nf : g.factors)
    for (const auto& sv : nf.factor.scope()) {
      const Variable* v = g.find_variable(sv.id);
      os << "  \"" << (v ? v->name : std::to_string(sv.id)) << "\" -- \"" << nf.name
         << "\";\n";
    }
  os << "}\n";
  return os.str();
}

}  // namespace cfgraph
