#pragma once

#include <cstddef>
#include <stdexcept>

namespace bifbm {

/// Mollifier width; epsilon is a variance.
struct MollifierParam {
  double epsilon;
  explicit MollifierParam(double eps) : epsilon(eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("MollifierParam: epsilon must be > 0");
  }
};

/// Gaussian density with variance var at y.
double gauss_kernel(double var, double y);

/// Normalized Hermite polynomial H_n = He_n / n!, with the recurrence
/// (n+1) H_{n+1}(x) = x H_n(x) - H_{n-1}(x), H_0 = 1, H_1(x) = x.
double hermite(std::size_t n, double x);

/// phi(y) H_n(y) with phi the standard normal density; stays finite for every
/// (n, y) where the bare polynomial would overflow.
double hermite_gauss(std::size_t n, double y);

/// Gauss-Hermite estimate of E[H_n(N) H_m(N)]; equals delta_{nm}/n!.
double hermite_orthogonality(std::size_t n, std::size_t m, std::size_t max_order = 64);

/// F'_eps(z) = 2 Phi_eps(z) - 1 = erf(z / sqrt(2 eps)); odd, in [-1,1].
double mollifier_prime(const MollifierParam& eps, double z);

/// F_eps(z) = int_0^z F'_eps; 0 <= F_eps(z) <= |z|, -> |z| as eps -> 0.
double mollifier(const MollifierParam& eps, double z);

}  // namespace bifbm
