// Command-line front end: inference, independence checks, dualization, DOT
// export, model builders, and the direct-vs-FFT benchmark.
//
// Exit codes: 0 ok, 2 parse error, 3 validation error, 4 method/semantics
// mismatch, 5 size cap exceeded. Result JSON goes to stdout, diagnostics to
// stderr.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>

#include "cfgraph/bench.hpp"
#include "cfgraph/errors.hpp"
#include "cfgraph/io.hpp"

using namespace cfgraph;
using nlohmann::json;

namespace {

std::vector<std::string> scope_names(const FactorGraph& g, const Factor& f) {
  std::vector<std::string> names;
  for (const auto& v : f.scope()) {
    const Variable* decl = g.find_variable(v.id);
    names.push_back(decl ? decl->name : v.name);
  }
  return names;
}

std::set<int> resolve_names(const FactorGraph& g, const std::vector<std::string>& names) {
  std::set<int> ids;
  for (const auto& name : names) {
    bool found = false;
    for (const auto& v : g.variables)
      if (v.name == name) {
        if (!ids.insert(v.id).second)
          throw ValidationError("duplicate variable '" + name + "'");
        found = true;
      }
    if (!found) throw ValidationError("unknown variable name '" + name + "'");
  }
  return ids;
}

void print_trace(const Trace& trace) {
  for (const auto& step : trace) {
    std::cerr << "eliminate x" << step.variable << ": absorb {";
    for (std::size_t i = 0; i < step.absorbed.size(); ++i)
      std::cerr << (i ? ", " : "") << step.absorbed[i];
    std::cerr << "} -> " << step.produced << " over {";
    for (std::size_t i = 0; i < step.new_scope.size(); ++i)
      std::cerr << (i ? ", " : "") << "x" << step.new_scope[i];
    std::cerr << "}\n";
  }
}

int cmd_infer(const std::string& model_path, const std::string& query_path,
              const std::string& method_flag, std::size_t oracle_cap, bool verbose_trace) {
  auto g = io::load_model(model_path);
  io::QueryFile qf;
  if (query_path.empty()) {
    qf.query = Query{};  // full joint
  } else {
    qf = io::load_query(query_path, g);
  }
  if (!method_flag.empty()) {
    json override_method{{"method", method_flag}};
    qf.method = io::parse_query(override_method, g).method;
  }
  Trace trace;
  Factor result = answer(g, qf.query, qf.method, oracle_cap,
                         verbose_trace ? &trace : nullptr);
  if (verbose_trace) print_trace(trace);

  json out = io::serialize_factor(result, scope_names(g, result));
  if (qf.check_against_oracle) {
    Factor want = answer(g, qf.query, Method::Oracle, oracle_cap);
    double dev = 0.0, scale = 1e-300;
    for (std::size_t i = 0; i < want.size(); ++i) {
      dev = std::max(dev, std::abs(result.values()[i] - want.values()[i]));
      scale = std::max(scale, std::abs(want.values()[i]));
    }
    out["oracle_max_deviation"] = dev / scale;
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_check_indep(const std::string& model_path, const std::vector<std::string>& A,
                    const std::vector<std::string>& B, std::size_t cap) {
  auto g = io::load_model(model_path);
  auto a = resolve_names(g, A);
  auto b = resolve_names(g, B);
  for (int id : a)
    if (b.count(id)) throw ValidationError("A and B must be disjoint");
  std::set<int> rest;
  for (const auto& v : g.variables)
    if (!a.count(v.id) && !b.count(v.id)) rest.insert(v.id);
  auto report = check_marginal_independence(g, a, b, cap);
  json out{{"separated", separates(g, a, b, rest)},
           {"independent", report.independent},
           {"max_deviation", report.max_deviation}};
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_dualize(const std::string& model_path, const std::string& out_path) {
  auto g = io::load_model(model_path);
  io::save_model(dualize(g), out_path);
  std::cerr << "wrote " << out_path << "\n";
  return 0;
}

int cmd_export_dot(const std::string& model_path) {
  std::cout << to_dot(io::load_model(model_path));
  return 0;
}

int cmd_build_model(const std::string& spec_path, const std::string& out_path,
                    const std::string& dot_path) {
  const json j = io::read_json_file(spec_path);
  const std::string type = j.value("type", "");
  if (type == "latent_sum") {
    auto spec = io::parse_latent_sum_spec(j);
    io::save_model(build_latent_sum(spec), out_path);
    if (!dot_path.empty()) {
      std::ofstream out(dot_path);
      out << export_chain_graph(spec);
    }
  } else if (type == "gaussian") {
    auto model = io::parse_covariance_model(j);
    auto factors = gaussian_decompose(model);
    json out = json::array();
    for (const auto& f : factors) {
      json jf;
      jf["scope"] = json::array();
      for (int i : f.scope) jf["scope"].push_back(model.names[static_cast<std::size_t>(i)]);
      jf["mean"] = std::vector<double>(f.mean.data(), f.mean.data() + f.mean.size());
      std::vector<double> flat;
      for (Eigen::Index r = 0; r < f.cov.rows(); ++r)
        for (Eigen::Index c = 0; c < f.cov.cols(); ++c) flat.push_back(f.cov(r, c));
      jf["covariance"] = flat;
      out.push_back(std::move(jf));
    }
    std::ofstream of(out_path);
    if (!of) throw ParseError("cannot write " + out_path);
    of << out.dump(2) << "\n";
  } else if (type == "if") {
    io::save_model(build_if_model(io::parse_if_spec(j)), out_path);
  } else {
    throw ParseError("spec 'type' must be latent_sum, gaussian, or if");
  }
  std::cerr << "wrote " << out_path << "\n";
  return 0;
}

int cmd_bench(const std::string& tmpl_name, int length, std::vector<int> sizes, int reps,
              std::uint64_t seed, bool csv) {
  BenchTemplate tmpl;
  if (tmpl_name == "chain")
    tmpl = BenchTemplate::Chain;
  else if (tmpl_name == "star")
    tmpl = BenchTemplate::Star;
  else
    throw ParseError("template must be 'chain' or 'star'");
  for (std::size_t i = 1; i < sizes.size(); ++i)
    if (sizes[i] <= sizes[i - 1]) throw ValidationError("sizes must be ascending");
  auto report = run_bench(tmpl, length, sizes, reps, seed);
  std::cout << (csv ? bench_csv(report) : bench_table(report));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Factor-graph inference over cyclic-group domains: direct "
               "convolution, elimination, and FFT-dual methods"};
  app.require_subcommand(1);

  std::string model_path, query_path, out_path, dot_path, spec_path;
  std::string method_flag, tmpl_name = "chain";
  std::vector<std::string> A, B;
  std::size_t oracle_cap = kDefaultJointCap;
  bool verbose_trace = false, csv = false;
  int length = 4, reps = 3;
  std::uint64_t seed = 1;
  std::vector<int> sizes{16, 64, 256, 1024};

  auto* infer = app.add_subcommand("infer", "Answer a marginalization/evidence query");
  infer->add_option("model", model_path, "model JSON file")->required();
  infer->add_option("query", query_path, "query JSON file (omit for the full joint)");
  infer->add_option("--method", method_flag, "auto|elimination|fft|oracle");
  infer->add_option("--oracle-cap", oracle_cap, "joint-size cap for oracle paths");
  infer->add_flag("--verbose-trace", verbose_trace, "print elimination steps to stderr");

  auto* indep = app.add_subcommand("check-indep", "Test marginal independence of two sets");
  indep->add_option("model", model_path, "model JSON file")->required();
  indep->add_option("--A", A, "first variable set")->required();
  indep->add_option("--B", B, "second variable set")->required();
  indep->add_option("--oracle-cap", oracle_cap, "joint-size cap");

  auto* dual = app.add_subcommand("dualize", "Write the transformed dual model");
  dual->add_option("model", model_path, "model JSON file")->required();
  dual->add_option("out", out_path, "output model path")->required();

  auto* dot = app.add_subcommand("export-dot", "Print the bipartite graph as DOT");
  dot->add_option("model", model_path, "model JSON file")->required();

  auto* build = app.add_subcommand("build-model",
                                   "Build a model from a latent_sum/gaussian/if spec");
  build->add_option("spec", spec_path, "spec JSON file")->required();
  build->add_option("out", out_path, "output path")->required();
  build->add_option("--chain-dot", dot_path, "also write the chain graph DOT here");

  auto* bench = app.add_subcommand("bench", "Time direct convolution vs the FFT path");
  bench->add_option("--template", tmpl_name, "chain|star");
  bench->add_option("--length", length, "factor count");
  bench->add_option("--sizes", sizes, "ascending domain sizes A");
  bench->add_option("--reps", reps, "repetitions per timing");
  bench->add_option("--seed", seed, "instance seed");
  bench->add_flag("--csv", csv, "emit CSV instead of a table");

  CLI11_PARSE(app, argc, argv);

  try {
    if (infer->parsed())
      return cmd_infer(model_path, query_path, method_flag, oracle_cap, verbose_trace);
    if (indep->parsed()) return cmd_check_indep(model_path, A, B, oracle_cap);
    if (dual->parsed()) return cmd_dualize(model_path, out_path);
    if (dot->parsed()) return cmd_export_dot(model_path);
    if (build->parsed()) return cmd_build_model(spec_path, out_path, dot_path);
    if (bench->parsed()) return cmd_bench(tmpl_name, length, sizes, reps, seed, csv);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const CapExceeded& e) {
    std::cerr << "cap exceeded: " << e.what() << "\n";
    return 5;
  } catch (const MethodError& e) {
    std::cerr << "method error: " << e.what() << "\n";
    return 4;
  } catch (const DecomposeError& e) {
    std::cerr << "decompose error: " << e.what() << "\n";
    return 4;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
