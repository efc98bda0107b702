#ifndef CFGRAPH_IO_HPP
#define CFGRAPH_IO_HPP

#include <nlohmann/json_fwd.hpp>
#include <string>

#include "cfgraph/inference.hpp"
#include "cfgraph/models.hpp"

namespace cfgraph::io {

using json = nlohmann::json;

// Model files. Layout:
//   { "semantics": "convolutional"|"multiplicative",
//     "variables": [ {"name": "x1", "size": 2}, ... ],
//     "factors":   [ {"name": "f1", "scope": ["x1","x2"],
//                     "complex": false, "values": [ ... ]}, ... ] }
// Values are flat, row-major, first scope variable slowest; with
// "complex": true each value is a [re, im] pair. Variable ids are assigned
// from declaration order (1-based).
FactorGraph parse_model(const json& j);
json serialize_model(const FactorGraph& g);

FactorGraph load_model(const std::string& path);   // ParseError / ValidationError
void save_model(const FactorGraph& g, const std::string& path);

// Query files:
//   { "marginalize": ["x2"], "evidence": {"x1": 1},
//     "method": "auto"|"elimination"|"fft"|"oracle",
//     "check_against_oracle": false }
struct QueryFile {
  Query query;
  Method method = Method::Auto;
  bool check_against_oracle = false;
};
QueryFile parse_query(const json& j, const FactorGraph& g);
QueryFile load_query(const std::string& path, const FactorGraph& g);

// Builder specs, dispatched on "type": "latent_sum" | "gaussian" | "if".
LatentSumSpec parse_latent_sum_spec(const json& j);
CovarianceModel parse_covariance_model(const json& j);
IFSpec parse_if_spec(const json& j);

json serialize_factor(const Factor& f, const std::vector<std::string>& scope_names);
json read_json_file(const std::string& path);

}  // namespace cfgraph::io

#endif
