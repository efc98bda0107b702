#ifndef CFGRAPH_ERRORS_HPP
#define CFGRAPH_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace cfgraph {

/// Malformed input file or JSON.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Structurally invalid model, query, or spec.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Method not applicable to the graph's semantics.
struct MethodError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Requested table larger than the configured cap.
struct CapExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The equal-split Gaussian factorization produced a non-PSD clique matrix.
/// This signals the heuristic's limit, not non-existence of a factorization.
struct DecomposeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace cfgraph

#endif
