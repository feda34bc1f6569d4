#include "fracheat/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <stdexcept>

namespace fracheat {

QuadratureRule gauss_jacobi(int order, double alpha, double beta) {
  if (order < 1) throw std::invalid_argument("gauss_jacobi: order must be >= 1");
  if (alpha <= -1.0 || beta <= -1.0)
    throw std::invalid_argument("gauss_jacobi: exponents must exceed -1");

  const int n = order;
  Eigen::VectorXd diag(n);
  Eigen::VectorXd sub(std::max(n - 1, 1));
  const double ab = alpha + beta;
  for (int k = 0; k < n; ++k) {
    const double t = 2.0 * k + ab;
    if (k == 0) {
      diag(k) = (beta - alpha) / (ab + 2.0);
    } else {
      diag(k) = (beta * beta - alpha * alpha) / (t * (t + 2.0));
    }
  }
  for (int k = 1; k < n; ++k) {
    const double t = 2.0 * k + ab;
    const double num = 4.0 * k * (k + alpha) * (k + beta) * (k + ab);
    const double den = t * t * (t + 1.0) * (t - 1.0);
    sub(k - 1) = std::sqrt(num / den);
  }

  // mu0 = int_{-1}^{1} (1-x)^alpha (1+x)^beta dx
  const double log_mu0 = (ab + 1.0) * std::log(2.0) + std::lgamma(alpha + 1.0) +
                         std::lgamma(beta + 1.0) - std::lgamma(ab + 2.0);
  const double mu0 = std::exp(log_mu0);

  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  if (n == 1) {
    rule.nodes[0] = diag(0);
    rule.weights[0] = mu0;
    return rule;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub.head(n - 1), Eigen::ComputeEigenvectors);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = solver.eigenvalues()(i);
    const double v0 = solver.eigenvectors()(0, i);
    rule.weights[i] = mu0 * v0 * v0;
  }
  return rule;
}

QuadratureRule gauss_legendre(int order, double a, double b) {
  QuadratureRule rule = gauss_jacobi(order, 0.0, 0.0);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (b + a);
  for (std::size_t i = 0; i < rule.size(); ++i) {
    rule.nodes[i] = mid + half * rule.nodes[i];
    rule.weights[i] *= half;
  }
  return rule;
}

QuadratureRule gauss_radial(int order, double gamma, double b) {
  QuadratureRule rule = gauss_jacobi(order, 0.0, gamma);
  const double scale = std::pow(0.5 * b, gamma + 1.0);
  for (std::size_t i = 0; i < rule.size(); ++i) {
    rule.nodes[i] = 0.5 * b * (1.0 + rule.nodes[i]);
    rule.weights[i] *= scale;
  }
  return rule;
}

namespace {

struct Panel {
  double value;
  double error;
};

Panel kronrod_panel(const std::function<double(double)>& f, double a, double b) {
  const double k = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 0, 0.0);
  const double g = boost::math::quadrature::gauss<double, 7>::integrate(f, a, b);
  return {k, std::abs(k - g)};
}

Panel adapt(const std::function<double(double)>& f, double a, double b, const Panel& whole,
            double rel_tol, double abs_tol, unsigned depth) {
  if (depth == 0 || whole.error <= std::max(rel_tol * std::abs(whole.value), abs_tol))
    return whole;
  const double m = 0.5 * (a + b);
  const Panel left = adapt(f, a, m, kronrod_panel(f, a, m), rel_tol, 0.5 * abs_tol, depth - 1);
  const Panel right = adapt(f, m, b, kronrod_panel(f, m, b), rel_tol, 0.5 * abs_tol, depth - 1);
  return {left.value + right.value, left.error + right.error};
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol, double* error, unsigned max_depth, double abs_tol) {
  if (b <= a) {
    if (error) *error = 0.0;
    return 0.0;
  }
  const Panel result = adapt(f, a, b, kronrod_panel(f, a, b), rel_tol, abs_tol, max_depth);
  if (error) *error = result.error;
  return result.value;
}

}  // namespace fracheat
