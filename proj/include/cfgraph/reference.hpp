#ifndef CFGRAPH_REFERENCE_HPP
#define CFGRAPH_REFERENCE_HPP

#include "cfgraph/algebra.hpp"

// Serial reference implementations, written as directly as possible from the
// defining sums. They share no code with the production kernels and exist so
// tests and the kernel benchmark have an independent route to the same values.
namespace cfgraph::ref {

Factor multiply(const Factor& f, const Factor& g);
Factor convolve(const Factor& f, const Factor& g);

/// Naive O(N^2)-per-line transform over every scope variable, same
/// sign/scaling convention as cfgraph::dft.
Factor dft(const Factor& f, Direction direction);

}  // namespace cfgraph::ref

#endif
