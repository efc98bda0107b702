#include "cfgraph/inference.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cfgraph/errors.hpp"

namespace cfgraph {

namespace {

void check_query(const FactorGraph& g, const Query& q) {
  for (int id : q.marginalize) {
    if (g.position_of(id) < 0)
      throw ValidationError("query marginalizes unknown variable id " + std::to_string(id));
    if (q.evidence.count(id))
      throw ValidationError("variable id " + std::to_string(id) +
                            " appears in both marginalize set and evidence");
  }
  for (const auto& [id, val] : q.evidence) {
    const Variable* v = g.find_variable(id);
    if (!v) throw ValidationError("evidence on unknown variable id " + std::to_string(id));
    if (val < 0 || val >= v->size)
      throw ValidationError("evidence value out of domain for variable '" + v->name + "'");
  }
}

std::set<int> keys_of(const Assignment& a) {
  std::set<int> s;
  for (const auto& [id, val] : a) s.insert(id);
  return s;
}

void check_order(const EliminationOrder& order, const std::set<int>& targets,
                 const char* what) {
  std::set<int> seen;
  for (int id : order) {
    if (!targets.count(id))
      throw ValidationError(std::string(what) + ": order contains non-target variable id " +
                            std::to_string(id));
    if (!seen.insert(id).second)
      throw ValidationError(std::string(what) + ": duplicate variable id in order");
  }
  if (seen.size() != targets.size())
    throw ValidationError(std::string(what) + ": order does not cover the target set");
}

std::vector<int> retained_declaration_order(const FactorGraph& g, const Factor& f) {
  std::vector<int> order;
  for (const auto& v : g.variables)
    if (f.in_scope(v.id)) order.push_back(v.id);
  return order;
}

// Elimination working set: factors keyed by running index so new factors get
// the f_{m+i} names from the pseudocode.
struct WorkingSet {
  std::vector<NamedFactor> factors;
  std::size_t next_index;

  explicit WorkingSet(const FactorGraph& g)
      : factors(g.factors), next_index(g.factors.size() + 1) {}

  std::vector<std::size_t> adjacent(int id) const {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < factors.size(); ++j)
      if (factors[j].factor.in_scope(id)) out.push_back(j);
    return out;
  }

  void replace(const std::vector<std::size_t>& absorbed, NamedFactor nf) {
    std::vector<NamedFactor> next;
    next.reserve(factors.size() + 1 - absorbed.size());
    for (std::size_t j = 0; j < factors.size(); ++j)
      if (std::find(absorbed.begin(), absorbed.end(), j) == absorbed.end())
        next.push_back(std::move(factors[j]));
    next.push_back(std::move(nf));
    factors = std::move(next);
  }

  std::string fresh_name() { return "f_" + std::to_string(next_index++); }
};

void record(Trace* trace, int var, const WorkingSet& ws,
            const std::vector<std::size_t>& absorbed, const NamedFactor& produced) {
  if (!trace) return;
  TraceStep step;
  step.variable = var;
  for (std::size_t j : absorbed) step.absorbed.push_back(ws.factors[j].name);
  step.produced = produced.name;
  for (const auto& v : produced.factor.scope()) step.new_scope.push_back(v.id);
  trace->push_back(step);
}

}  // namespace

EliminationOrder default_order(const FactorGraph& g, const std::set<int>& targets) {
  for (int id : targets)
    if (g.position_of(id) < 0)
      throw ValidationError("default_order: unknown variable id " + std::to_string(id));

  // Simulate elimination on scopes only: when a variable goes, its adjacent
  // factors merge into one cluster over the union of their scopes minus it.
  std::vector<std::set<int>> scopes;
  for (const auto& nf : g.factors) {
    std::set<int> s;
    for (const auto& v : nf.factor.scope()) s.insert(v.id);
    scopes.push_back(std::move(s));
  }

  std::set<int> remaining = targets;
  EliminationOrder order;
  while (!remaining.empty()) {
    int best = -1;
    std::size_t best_degree = 0;
    for (int id : remaining) {
      std::size_t deg = 0;
      for (const auto& s : scopes) deg += s.count(id) ? 1 : 0;
      if (best < 0 || deg < best_degree || (deg == best_degree && id < best)) {
        best = id;
        best_degree = deg;
      }
    }
    order.push_back(best);
    remaining.erase(best);

    std::set<int> cluster;
    std::vector<std::set<int>> next;
    for (auto& s : scopes) {
      if (s.count(best)) {
        cluster.insert(s.begin(), s.end());
      } else {
        next.push_back(std::move(s));
      }
    }
    cluster.erase(best);
    next.push_back(std::move(cluster));
    scopes = std::move(next);
  }
  return order;
}

Factor mfg_eliminate(const FactorGraph& g, const std::set<int>& M,
                     const EliminationOrder& order, Trace* trace) {
  if (g.semantics != Semantics::Multiplicative)
    throw MethodError("mfg_eliminate requires a multiplicative graph");
  check_order(order, M, "mfg_eliminate");

  WorkingSet ws(g);
  for (int var : order) {
    auto adjacent = ws.adjacent(var);
    NamedFactor produced;
    produced.name = ws.fresh_name();
    if (adjacent.empty()) {
      // variable already absent from every factor; summing contributes N
      const Variable* v = g.find_variable(var);
      produced.factor = Factor::scalar(cplx(static_cast<double>(v->size), 0.0));
    } else if (adjacent.size() == 1) {
      produced.factor = marginalize(ws.factors[adjacent[0]].factor, {var});
    } else {
      // multiply all but the last, then contract the summed variable away
      Factor cluster = ws.factors[adjacent[0]].factor;
      for (std::size_t k = 1; k + 1 < adjacent.size(); ++k)
        cluster = multiply(cluster, ws.factors[adjacent[k]].factor);
      produced.factor = contract(cluster, ws.factors[adjacent.back()].factor, var);
    }
    record(trace, var, ws, adjacent, produced);
    ws.replace(adjacent, std::move(produced));
  }

  Factor result = Factor::scalar(cplx(1.0, 0.0));
  for (const auto& nf : ws.factors) result = multiply(result, nf.factor);
  return result;
}

FactorGraph mfg_push_evidence(const FactorGraph& g, const Assignment& evidence) {
  if (g.semantics != Semantics::Multiplicative)
    throw MethodError("mfg_push_evidence requires a multiplicative graph");
  for (const auto& [id, val] : evidence) {
    const Variable* v = g.find_variable(id);
    if (!v) throw ValidationError("evidence on unknown variable id " + std::to_string(id));
    if (val < 0 || val >= v->size)
      throw ValidationError("evidence value out of domain for variable '" + v->name + "'");
  }

  FactorGraph out;
  out.semantics = g.semantics;
  for (const auto& v : g.variables)
    if (!evidence.count(v.id)) out.variables.push_back(v);
  for (const auto& nf : g.factors) {
    Assignment local;
    for (const auto& [id, val] : evidence)
      if (nf.factor.in_scope(id)) local[id] = val;
    out.factors.push_back({nf.name, evaluate(nf.factor, local)});
  }
  return out;
}

FactorGraph cfg_push_marginalization(const FactorGraph& g, const std::set<int>& M) {
  if (g.semantics != Semantics::Convolutional)
    throw MethodError("cfg_push_marginalization requires a convolutional graph");
  for (int id : M)
    if (g.position_of(id) < 0)
      throw ValidationError("marginalize set contains unknown variable id " +
                            std::to_string(id));

  FactorGraph out;
  out.semantics = g.semantics;
  for (const auto& v : g.variables)
    if (!M.count(v.id)) out.variables.push_back(v);
  for (const auto& nf : g.factors) {
    std::set<int> local;
    for (const auto& v : nf.factor.scope())
      if (M.count(v.id)) local.insert(v.id);
    out.factors.push_back({nf.name, marginalize(nf.factor, local)});
  }
  return out;
}

Factor cfg_eliminate(const FactorGraph& g, const Assignment& evidence,
                     const EliminationOrder& order, Trace* trace) {
  if (g.semantics != Semantics::Convolutional)
    throw MethodError("cfg_eliminate requires a convolutional graph");
  check_order(order, keys_of(evidence), "cfg_eliminate");
  for (const auto& [id, val] : evidence) {
    const Variable* v = g.find_variable(id);
    if (!v) throw ValidationError("evidence on unknown variable id " + std::to_string(id));
    if (val < 0 || val >= v->size)
      throw ValidationError("evidence value out of domain for variable '" + v->name + "'");
  }

  WorkingSet ws(g);
  for (int var : order) {
    const int value = evidence.at(var);
    auto adjacent = ws.adjacent(var);
    NamedFactor produced;
    produced.name = ws.fresh_name();
    if (adjacent.empty()) {
      // the variable vanished from every factor in an earlier step; its
      // evaluation slice is already accounted for
      produced.factor = Factor::scalar(cplx(1.0, 0.0));
    } else if (adjacent.size() == 1) {
      produced.factor = evaluate(ws.factors[adjacent[0]].factor, {{var, value}});
    } else {
      // convolve the cluster; the last pairwise step takes the evidence slice
      // directly so the eliminated variable never materializes in the output
      Factor cluster = ws.factors[adjacent[0]].factor;
      for (std::size_t k = 1; k + 1 < adjacent.size(); ++k)
        cluster = convolve(cluster, ws.factors[adjacent[k]].factor);
      produced.factor = convolve_at(cluster, ws.factors[adjacent.back()].factor, var, value);
    }
    record(trace, var, ws, adjacent, produced);
    ws.replace(adjacent, std::move(produced));
  }

  // Fold the survivors largest-rank first: convolving two disjoint low-rank
  // factors before a wide one that shares variables with both would pay for
  // the shared volume twice.
  std::vector<const Factor*> survivors;
  for (const auto& nf : ws.factors) survivors.push_back(&nf.factor);
  std::stable_sort(survivors.begin(), survivors.end(),
                   [](const Factor* a, const Factor* b) { return a->rank() > b->rank(); });
  Factor result = Factor::scalar(cplx(1.0, 0.0));
  for (const Factor* f : survivors) result = convolve(result, *f);
  return result;
}

Factor fft_query(const FactorGraph& g, const Query& query, Trace* trace) {
  if (g.semantics != Semantics::Convolutional)
    throw MethodError("fft_query requires a convolutional graph");
  check_query(g, query);

  FactorGraph reduced = cfg_push_marginalization(g, query.marginalize);

  FactorGraph dual;
  dual.semantics = Semantics::Multiplicative;
  dual.variables = reduced.variables;
  for (const auto& nf : reduced.factors)
    dual.factors.push_back({nf.name, dft(nf.factor, Direction::Forward)});

  // Attach each evidenced variable's character e^{+j2 pi k xbar/N}/N to one
  // adjacent transformed factor (once per variable, slice-projection scaling).
  for (const auto& [id, value] : query.evidence) {
    bool attached = false;
    for (auto& nf : dual.factors) {
      int pos = nf.factor.position_of(id);
      if (pos < 0) continue;
      const int n = nf.factor.scope()[static_cast<std::size_t>(pos)].size;
      const std::size_t stride = nf.factor.strides()[static_cast<std::size_t>(pos)];
      const std::size_t inner = stride;
      const std::size_t block = static_cast<std::size_t>(n) * inner;
      std::vector<cplx> chi(static_cast<std::size_t>(n));
      for (int k = 0; k < n; ++k) {
        double ang = 2.0 * std::numbers::pi * static_cast<double>(k) *
                     static_cast<double>(value) / static_cast<double>(n);
        chi[static_cast<std::size_t>(k)] =
            cplx(std::cos(ang), std::sin(ang)) / static_cast<double>(n);
      }
      cplx* data = nf.factor.values().data();
      for (std::size_t base = 0; base < nf.factor.size(); base += block)
        for (int k = 0; k < n; ++k)
          for (std::size_t i = 0; i < inner; ++i)
            data[base + static_cast<std::size_t>(k) * inner + i] *=
                chi[static_cast<std::size_t>(k)];
      attached = true;
      break;
    }
    if (!attached)
      throw ValidationError("evidence variable id " + std::to_string(id) +
                            " appears in no factor");
  }

  std::set<int> dual_targets = keys_of(query.evidence);
  Factor hat = mfg_eliminate(dual, dual_targets, default_order(dual, dual_targets), trace);
  return dft(hat, Direction::Inverse);
}

Factor answer(const FactorGraph& g, const Query& query, Method method, std::size_t oracle_cap,
              Trace* trace) {
  check_query(g, query);

  if (method == Method::Auto) {
    method = (g.semantics == Semantics::Convolutional && !query.evidence.empty())
                 ? Method::Fft
                 : Method::Elimination;
  }

  Factor result;
  switch (method) {
    case Method::Oracle: {
      Factor j = joint(g, oracle_cap);
      result = marginalize(evaluate(j, query.evidence), query.marginalize);
      break;
    }
    case Method::Fft:
      result = fft_query(g, query, trace);
      break;
    case Method::Elimination: {
      if (g.semantics == Semantics::Multiplicative) {
        FactorGraph reduced = mfg_push_evidence(g, query.evidence);
        result = mfg_eliminate(reduced, query.marginalize,
                               default_order(reduced, query.marginalize), trace);
      } else {
        FactorGraph reduced = cfg_push_marginalization(g, query.marginalize);
        result = cfg_eliminate(reduced, query.evidence,
                               default_order(reduced, keys_of(query.evidence)), trace);
      }
      break;
    }
    case Method::Auto:
      throw MethodError("unreachable");
  }
  return reorder_scope(result, retained_declaration_order(g, result));
}

}  // namespace cfgraph
