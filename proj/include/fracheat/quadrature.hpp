#pragma once

#include <functional>
#include <vector>

namespace fracheat {

/// Nodes and weights of a one-dimensional quadrature rule.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

/// Gauss-Jacobi rule on [-1, 1] for the weight (1 - x)^alpha (1 + x)^beta,
/// computed by Golub-Welsch.  alpha, beta > -1.
QuadratureRule gauss_jacobi(int order, double alpha, double beta);

/// Gauss-Legendre rule on [a, b].
QuadratureRule gauss_legendre(int order, double a, double b);

/// Rule for \int_0^b r^gamma g(r) dr: the weight r^gamma is absorbed into the
/// returned weights, so the integral is sum_i w_i g(r_i).
QuadratureRule gauss_radial(int order, double gamma, double b);

/// Adaptive 15-point Gauss-Kronrod on [a, b] by bisection.  A panel is
/// accepted when |K15 - G7| <= max(rel_tol |value|, abs_tol share).  `error`
/// receives the summed estimate.
double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, double rel_tol, double* error = nullptr,
                          unsigned max_depth = 24, double abs_tol = 0.0);

}  // namespace fracheat
