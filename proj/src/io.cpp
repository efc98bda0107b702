#include "cfgraph/io.hpp"

#include <fstream>
#include <nlohmann/json.hpp>

#include "cfgraph/errors.hpp"

namespace cfgraph::io {

namespace {

std::vector<cplx> parse_values(const json& jf, std::size_t want) {
  const bool complex_flag = jf.value("complex", false);
  const auto& jv = jf.at("values");
  if (!jv.is_array()) throw ParseError("factor values must be an array");
  if (jv.size() != want)
    throw ValidationError("factor value count " + std::to_string(jv.size()) +
                          " does not match scope size " + std::to_string(want));
  std::vector<cplx> out;
  out.reserve(jv.size());
  for (const auto& e : jv) {
    if (complex_flag) {
      if (!e.is_array() || e.size() != 2)
        throw ParseError("complex values must be [re, im] pairs");
      out.emplace_back(e[0].get<double>(), e[1].get<double>());
    } else {
      out.emplace_back(e.get<double>(), 0.0);
    }
  }
  return out;
}

int resolve_name(const FactorGraph& g, const std::string& name) {
  for (const auto& v : g.variables)
    if (v.name == name) return v.id;
  throw ValidationError("unknown variable name '" + name + "'");
}

}  // namespace

FactorGraph parse_model(const json& j) {
  FactorGraph g;
  const std::string sem = j.at("semantics").get<std::string>();
  if (sem == "convolutional")
    g.semantics = Semantics::Convolutional;
  else if (sem == "multiplicative")
    g.semantics = Semantics::Multiplicative;
  else
    throw ParseError("semantics must be 'convolutional' or 'multiplicative'");

  int next_id = 1;
  for (const auto& jv : j.at("variables")) {
    Variable v;
    v.id = next_id++;
    v.name = jv.at("name").get<std::string>();
    v.size = jv.at("size").get<int>();
    g.variables.push_back(std::move(v));
  }

  for (const auto& jf : j.at("factors")) {
    std::vector<Variable> scope;
    std::size_t want = 1;
    for (const auto& jn : jf.at("scope")) {
      const std::string name = jn.get<std::string>();
      const Variable* v = nullptr;
      for (const auto& cand : g.variables)
        if (cand.name == name) v = &cand;
      if (!v) throw ValidationError("factor scope references unknown variable '" + name + "'");
      scope.push_back(*v);
      want *= static_cast<std::size_t>(v->size);
    }
    NamedFactor nf;
    nf.name = jf.at("name").get<std::string>();
    nf.factor = Factor(scope, parse_values(jf, want));
    g.factors.push_back(std::move(nf));
  }

  auto violations = validate(g);
  if (!violations.empty()) {
    std::string msg = "invalid model:";
    for (const auto& v : violations) msg += "\n  - " + v;
    throw ValidationError(msg);
  }
  return g;
}

json serialize_model(const FactorGraph& g) {
  json j;
  j["semantics"] =
      g.semantics == Semantics::Convolutional ? "convolutional" : "multiplicative";
  j["variables"] = json::array();
  for (const auto& v : g.variables) j["variables"].push_back({{"name", v.name}, {"size", v.size}});
  j["factors"] = json::array();
  for (const auto& nf : g.factors) {
    json jf;
    jf["name"] = nf.name;
    jf["scope"] = json::array();
    for (const auto& sv : nf.factor.scope()) {
      const Variable* v = g.find_variable(sv.id);
      jf["scope"].push_back(v ? v->name : std::to_string(sv.id));
    }
    bool complex_flag = false;
    for (const auto& v : nf.factor.values())
      if (v.imag() != 0.0) complex_flag = true;
    jf["complex"] = complex_flag;
    jf["values"] = json::array();
    for (const auto& v : nf.factor.values()) {
      if (complex_flag)
        jf["values"].push_back({v.real(), v.imag()});
      else
        jf["values"].push_back(v.real());
    }
    j["factors"].push_back(std::move(jf));
  }
  return j;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file: " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ParseError("JSON parse failure in " + path + ": " + e.what());
  }
  return j;
}

FactorGraph load_model(const std::string& path) {
  const json j = read_json_file(path);
  try {
    return parse_model(j);
  } catch (const json::exception& e) {
    throw ParseError("malformed model file " + path + ": " + e.what());
  }
}

void save_model(const FactorGraph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open file for writing: " + path);
  out << serialize_model(g).dump(2) << "\n";
}

QueryFile parse_query(const json& j, const FactorGraph& g) {
  QueryFile qf;
  if (j.contains("marginalize"))
    for (const auto& jn : j.at("marginalize"))
      qf.query.marginalize.insert(resolve_name(g, jn.get<std::string>()));
  if (j.contains("evidence"))
    for (const auto& [name, value] : j.at("evidence").items())
      qf.query.evidence[resolve_name(g, name)] = value.get<int>();
  for (const auto& [id, value] : qf.query.evidence)
    if (qf.query.marginalize.count(id))
      throw ValidationError("variable appears in both marginalize and evidence");
  const std::string method = j.value("method", "auto");
  if (method == "auto")
    qf.method = Method::Auto;
  else if (method == "elimination")
    qf.method = Method::Elimination;
  else if (method == "fft")
    qf.method = Method::Fft;
  else if (method == "oracle")
    qf.method = Method::Oracle;
  else
    throw ParseError("unknown method '" + method + "'");
  qf.check_against_oracle = j.value("check_against_oracle", false);
  return qf;
}

QueryFile load_query(const std::string& path, const FactorGraph& g) {
  const json j = read_json_file(path);
  try {
    return parse_query(j, g);
  } catch (const json::exception& e) {
    throw ParseError("malformed query file " + path + ": " + e.what());
  }
}

LatentSumSpec parse_latent_sum_spec(const json& j) {
  LatentSumSpec spec;
  int next_id = 1;
  for (const auto& jv : j.at("latents")) {
    Variable v;
    v.id = next_id++;
    v.name = jv.at("name").get<std::string>();
    v.size = jv.at("size").get<int>();
    spec.latents.push_back(std::move(v));
  }
  auto id_of = [&](const std::string& name) {
    for (const auto& v : spec.latents)
      if (v.name == name) return v.id;
    throw ValidationError("unknown latent name '" + name + "'");
  };
  for (const auto& jb : j.at("blocks")) {
    LatentBlock b;
    std::vector<Variable> scope;
    std::size_t want = 1;
    for (const auto& jn : jb.at("ids")) {
      int id = id_of(jn.get<std::string>());
      b.ids.push_back(id);
      for (const auto& v : spec.latents)
        if (v.id == id) {
          scope.push_back(v);
          want *= static_cast<std::size_t>(v.size);
        }
    }
    b.joint = Factor(scope, parse_values(jb, want));
    spec.blocks.push_back(std::move(b));
  }
  if (j.contains("sums"))
    for (const auto& js : j.at("sums")) {
      std::vector<int> vl;
      for (const auto& jn : js) vl.push_back(id_of(jn.get<std::string>()));
      spec.sums.push_back(std::move(vl));
    }
  validate_latent_sum(spec);
  return spec;
}

CovarianceModel parse_covariance_model(const json& j) {
  CovarianceModel m;
  for (const auto& jn : j.at("names")) m.names.push_back(jn.get<std::string>());
  const int n = static_cast<int>(m.names.size());
  m.mean = Eigen::VectorXd::Zero(n);
  if (j.contains("mean")) {
    if (static_cast<int>(j.at("mean").size()) != n)
      throw ValidationError("mean length does not match names");
    for (int i = 0; i < n; ++i) m.mean(i) = j.at("mean")[static_cast<std::size_t>(i)].get<double>();
  }
  const auto& jc = j.at("covariance");
  if (static_cast<int>(jc.size()) != n * n)
    throw ValidationError("covariance must be a flat row-major list of n*n entries");
  m.cov = Eigen::MatrixXd(n, n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      m.cov(i, k) = jc[static_cast<std::size_t>(i * n + k)].get<double>();
  return m;
}

IFSpec parse_if_spec(const json& j) {
  IFSpec spec;
  spec.domain = j.at("domain_size").get<int>();
  for (const auto& jr : j.at("mixing")) {
    std::vector<int> row;
    for (const auto& je : jr) row.push_back(je.get<int>());
    spec.mixing.push_back(std::move(row));
  }
  for (const auto& js : j.at("sources")) {
    std::vector<double> src;
    for (const auto& je : js) src.push_back(je.get<double>());
    spec.sources.push_back(std::move(src));
  }
  for (const auto& je : j.at("noise")) spec.noise.push_back(je.get<double>());
  validate_if_spec(spec);
  return spec;
}

json serialize_factor(const Factor& f, const std::vector<std::string>& scope_names) {
  json j;
  j["scope"] = scope_names;
  bool complex_flag = false;
  for (const auto& v : f.values())
    if (std::abs(v.imag()) > 1e-12) complex_flag = true;
  j["complex"] = complex_flag;
  j["values"] = json::array();
  for (const auto& v : f.values()) {
    if (complex_flag)
      j["values"].push_back({v.real(), v.imag()});
    else
      j["values"].push_back(v.real());
  }
  return j;
}

}  // namespace cfgraph::io
