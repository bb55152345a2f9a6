#include "blgi/quadrature.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "blgi/errors.hpp"

namespace blgi {

namespace {

GaussHermiteRule build(std::size_t order) {
  gsl_set_error_handler_off();
  std::unique_ptr<gsl_integration_fixed_workspace, decltype(&gsl_integration_fixed_free)> ws(
      gsl_integration_fixed_alloc(gsl_integration_fixed_hermite, order, 0.0, 1.0, 0.0, 0.0),
      &gsl_integration_fixed_free);
  if (!ws) throw NumericalError("could not build Gauss-Hermite rule of order " +
                                std::to_string(order));
  const double* x = gsl_integration_fixed_nodes(ws.get());
  const double* w = gsl_integration_fixed_weights(ws.get());
  return GaussHermiteRule{std::vector<double>(x, x + order), std::vector<double>(w, w + order)};
}

}  // namespace

const GaussHermiteRule& gauss_hermite(std::size_t order) {
  if (order == 0) throw InvalidArgument("quadrature order must be positive");
  static std::mutex mutex;
  static std::map<std::size_t, std::unique_ptr<GaussHermiteRule>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[order];
  if (!slot) slot = std::make_unique<GaussHermiteRule>(build(order));
  return *slot;
}

}  // namespace blgi
