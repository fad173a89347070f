#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "bifbm/params.hpp"
#include "bifbm/quadrature.hpp"
#include "bifbm/simulate.hpp"

namespace bifbm {

/// Twice the d-dimensional Newtonian (d >= 3) or logarithmic (d = 2) kernel.
double newtonian_U(std::size_t d, const Eigen::VectorXd& z);

/// Gaussian-mollified kernel U_eps = p_eps^d * U; closed form for d = 2, 3,
/// tensor Gauss-Hermite convolution otherwise (also exposed for cross-checks).
double mollified_U(std::size_t d, double eps, const Eigen::VectorXd& w);
double mollified_U_quadrature(std::size_t d, double eps, const Eigen::VectorXd& w,
                              std::size_t order = 48);

/// Scaled-kernel spec: dimensions, exponent theta, level x; gamma must be > 0.
struct PotentialSpec {
  MultiParams mp;
  double theta;
  Eigen::VectorXd x;

  PotentialSpec(MultiParams mp_, double theta_, Eigen::VectorXd x_);

  std::size_t dims() const { return mp.dims(); }
  double gamma() const;
};

/// Ubar(s, z) = prod_j (2 H_j K_j)^{-1/2} s^theta U(c(s) (z - x)) with
/// c_i(s) = (2 H_i K_i)^{-1/2} s^{1/2 - H_i K_i}.
double u_bar(const PotentialSpec& spec, double s, const Eigen::VectorXd& z);

struct UBarDerivatives {
  double d_s;
  Eigen::VectorXd grad;
  Eigen::VectorXd diag_second;
};

UBarDerivatives u_bar_derivatives(const PotentialSpec& spec, double s, const Eigen::VectorXd& z);

/// Residual of (1/2) sum a_i^{-2} d2 V_eps / dz_i^2 = p_eps^d(a_1 z_1, ..., a_d z_d)
/// with V_eps(z) = (p_eps^d * U)(a_1 z_1, ..., a_d z_d).
double laplace_identity_residual(std::size_t d, const Eigen::VectorXd& a, double eps,
                                 const Eigen::VectorXd& z);

/// 5-point-stencil Laplacian of the raw kernel (vanishes away from 0).
double stencil_laplacian_U(std::size_t d, const Eigen::VectorXd& z, double h = 1e-4);

struct EnvelopeReport {
  double c_gradient;   // sup |d_i Ubar| / (s^{(1-d)/2+theta} |scaled|^{1-d})
  double c_time;       // sup |d_s Ubar| / (s^{-d/2+theta} |scaled|^{2-d})
  double c_value;      // sup |Ubar| / (s^{(2-d)/2+theta} |scaled|^{2-d})
  bool log_factor_flagged;  // d = 2: |Ubar| envelope fitted against |log|scaled||
};

EnvelopeReport envelope_checks(const PotentialSpec& spec,
                               const std::vector<std::pair<double, Eigen::VectorXd>>& samples);

/// Time-dependent d-dimensional C^{1,2} test function.
struct MultiTestFunction {
  std::function<double(double, const Eigen::VectorXd&)> f;
  std::function<double(double, const Eigen::VectorXd&)> d_s;
  std::function<double(double, const Eigen::VectorXd&, std::size_t)> d_i;
  std::function<double(double, const Eigen::VectorXd&, std::size_t)> d2_i;
};

/// Deterministic expectation form of the d-dimensional Ito formula; requires
/// 2 H_i K_i > 1 for every component.
double multidim_ito_residual(const MultiParams& mp, const MultiTestFunction& tf, double t,
                             const QuadratureSpec& quad = {});

struct MultiTanakaReport {
  double l2_residual;
  double residual_se;
  double mean_i2;            // MC mean of the weighted-kernel term I_2^eps
  double i2_order0_quad;     // quadrature of the order-0 beta product
  double u_bar_origin_limit; // Ubar_eps along s -> 0 at the path start
};

/// MC check of the mollified multidimensional Tanaka identity at fixed eps.
MultiTanakaReport mollified_multidim_tanaka(const PathEnsemble& ens, const PotentialSpec& spec,
                                            double eps);

}  // namespace bifbm
