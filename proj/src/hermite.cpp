#include "bifbm/hermite.hpp"

#include <cmath>

#include "bifbm/quadrature.hpp"

namespace bifbm {

double gauss_kernel(double var, double y) {
  if (!(var > 0.0)) throw std::domain_error("gauss_kernel: variance must be > 0");
  return std::exp(-y * y / (2.0 * var)) / std::sqrt(6.283185307179586476925286766559 * var);
}

double hermite(std::size_t n, double x) {
  if (n == 0) return 1.0;
  double prev = 1.0, cur = x;
  for (std::size_t k = 1; k < n; ++k) {
    const double next = (x * cur - prev) / static_cast<double>(k + 1);
    prev = cur;
    cur = next;
  }
  return cur;
}

double hermite_gauss(std::size_t n, double y) {
  // phi(y) H_n(y); seeding the recurrence with phi keeps every iterate in
  // range (the product decays like phi(y) y^n / n! even when H_n overflows)
  const double phi = std::exp(-0.5 * y * y) / std::sqrt(6.283185307179586476925286766559);
  if (phi == 0.0 || n == 0) return phi;
  double prev = phi, cur = y * phi;
  for (std::size_t k = 1; k < n; ++k) {
    const double next = (y * cur - prev) / static_cast<double>(k + 1);
    prev = cur;
    cur = next;
  }
  return cur;
}

double hermite_orthogonality(std::size_t n, std::size_t m, std::size_t max_order) {
  if (n > max_order || m > max_order)
    throw std::invalid_argument("hermite_orthogonality: order beyond quadrature validity");
  // Gauss-Hermite with enough nodes to integrate degree n+m exactly
  const std::size_t q = (n + m) / 2 + 8;
  return gaussian_expectation(
      [&](double x) { return hermite(n, x) * hermite(m, x); }, 1.0, q);
}

double mollifier_prime(const MollifierParam& eps, double z) {
  return std::erf(z / std::sqrt(2.0 * eps.epsilon));
}

double mollifier(const MollifierParam& eps, double z) {
  // int_0^z erf(y / sqrt(2 eps)) dy in closed form
  const double s = std::sqrt(2.0 * eps.epsilon);
  return z * std::erf(z / s) +
         s / std::sqrt(3.14159265358979323846264338328) * (std::exp(-z * z / (s * s)) - 1.0);
}

}  // namespace bifbm
