#ifndef CFGRAPH_ALGEBRA_HPP
#define CFGRAPH_ALGEBRA_HPP

#include <set>
#include <vector>

#include "cfgraph/factor.hpp"

namespace cfgraph {

enum class Semantics { Convolutional, Multiplicative };
enum class Direction { Forward, Inverse };

/// Pointwise product. Scope of the result is f's scope followed by g's new
/// variables; shared variables are matched by id and must agree on domain size.
Factor multiply(const Factor& f, const Factor& g);

/// Generalized convolution: sum over a full tuple y_T of the shared variables
/// T with componentwise subtraction mod N,
///   (f*g)(x) = sum_{y_T} f(x_{f\T}, x_T - y_T) g(y_T, x_{g\T}).
/// With empty T this reduces to multiply(f, g). Scope ordering as in multiply.
Factor convolve(const Factor& f, const Factor& g);

/// The slice of convolve(f, g) at `id = value`, computed without building the
/// full convolution. `id` must be shared by f and g; the result drops it.
Factor convolve_at(const Factor& f, const Factor& g, int id, int value);

/// sum_{id} multiply(f, g): the product with `id` contracted away. `id` must
/// be shared by f and g; the result drops it.
Factor contract(const Factor& f, const Factor& g, int id);

/// Left fold of convolve or multiply; the empty product is the scalar 1.
Factor product_all(const std::vector<Factor>& factors, Semantics semantics);

/// Sum out the given variables; marginalizing the full scope yields a scalar.
Factor marginalize(const Factor& f, const std::set<int>& ids);

/// Slice at the evidence coordinates; evidenced variables leave the scope.
Factor evaluate(const Factor& f, const Assignment& evidence);

/// Per-variable discrete Fourier transform over every scope variable.
/// Forward kernel e^{-j2*pi*k*x/N} with no scaling; Inverse applies 1/N per
/// variable, so Inverse(Forward(f)) == f and dft(f*g) == dft(f)·dft(g).
Factor dft(const Factor& f, Direction direction);

/// Scale a real non-negative factor so its values sum to 1.
Factor normalize(const Factor& f);

/// Permute the scope to the given id order (must be exactly the scope ids).
Factor reorder_scope(const Factor& f, const std::vector<int>& id_order);

}  // namespace cfgraph

#endif
