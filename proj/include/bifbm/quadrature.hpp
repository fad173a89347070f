#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

namespace bifbm {

struct QuadratureSpec {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  unsigned max_levels = 15;
};

/// Adaptive Gauss-Kronrod on [a,b] for smooth-ish integrands.
inline double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                 const QuadratureSpec& spec = {}) {
  double error = 0.0;
  const double v = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      f, a, b, spec.max_levels, spec.rel_tol, &error);
  if (!(std::isfinite(v)))
    throw std::runtime_error("integrate_adaptive: non-finite result");
  return v;
}

/// tanh-sinh on (a,b); tolerates integrable endpoint singularities.
inline double integrate_singular(const std::function<double(double)>& f, double a, double b,
                                 const QuadratureSpec& spec = {}) {
  boost::math::quadrature::tanh_sinh<double> integ(spec.max_levels);
  const double v = integ.integrate(f, a, b, spec.rel_tol);
  if (!(std::isfinite(v)))
    throw std::runtime_error("integrate_singular: non-finite result");
  return v;
}

struct QuadRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss rules from the Jacobi matrix of the orthogonal-polynomial recurrence.
inline QuadRule golub_welsch(const std::vector<double>& offdiag, double mu0) {
  const std::size_t n = offdiag.size() + 1;
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    J(i, i + 1) = offdiag[i];
    J(i + 1, i) = offdiag[i];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  QuadRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    rule.nodes[i] = es.eigenvalues()(static_cast<Eigen::Index>(i));
    const double v0 = es.eigenvectors()(0, static_cast<Eigen::Index>(i));
    rule.weights[i] = mu0 * v0 * v0;
  }
  return rule;
}

/// Gauss-Legendre on [-1,1]; cached per order.
inline const QuadRule& gauss_legendre(std::size_t n) {
  static std::map<std::size_t, QuadRule> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<double> off(n - 1);
  for (std::size_t i = 1; i < n; ++i) {
    const double k = static_cast<double>(i);
    off[i - 1] = k / std::sqrt(4.0 * k * k - 1.0);
  }
  return cache.emplace(n, golub_welsch(off, 2.0)).first->second;
}

/// Gauss rule for E[f(N)] with N standard normal (probabilists' Hermite).
inline const QuadRule& gauss_hermite(std::size_t n) {
  static std::map<std::size_t, QuadRule> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<double> off(n - 1);
  for (std::size_t i = 1; i < n; ++i) off[i - 1] = std::sqrt(static_cast<double>(i));
  return cache.emplace(n, golub_welsch(off, 1.0)).first->second;
}

/// Fixed-order Gauss-Legendre of f over [a,b].
inline double integrate_gl(const std::function<double(double)>& f, double a, double b,
                           std::size_t order = 64) {
  const QuadRule& r = gauss_legendre(order);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double s = 0.0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i)
    s += r.weights[i] * f(mid + half * r.nodes[i]);
  return s * half;
}

/// E[f(N(0, var))] by Gauss-Hermite.
inline double gaussian_expectation(const std::function<double(double)>& f, double var,
                                   std::size_t order = 64) {
  if (!(var >= 0.0)) throw std::invalid_argument("gaussian_expectation: var must be >= 0");
  if (var == 0.0) return f(0.0);
  const QuadRule& r = gauss_hermite(order);
  const double sd = std::sqrt(var);
  double s = 0.0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * f(sd * r.nodes[i]);
  return s;
}

}  // namespace bifbm
