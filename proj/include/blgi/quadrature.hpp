#pragma once

#include <cstddef>
#include <vector>

namespace blgi {

/// Gauss-Hermite rule for the weight exp(-x^2): sum_i w_i f(x_i) ~ int f(x) exp(-x^2) dx.
/// Weights that underflow are returned as zero.
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Cached per order; safe to call concurrently.
const GaussHermiteRule& gauss_hermite(std::size_t order);

}  // namespace blgi
