#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "bifbm/params.hpp"
#include "bifbm/quadrature.hpp"

namespace bifbm {

/// E[I_n(1_{[0,s]}^{otimes n}) I_n(1_{[0,r]}^{otimes n})] = n! R(s,r)^n.
double multiple_integral_inner(const HurstParams& p, std::size_t n, double s, double r);

/// Order-n coefficient of the weighted local time chaos expansion:
/// 2HK p_{s^{2HK}}(x) s^{-((n-2)HK+1)} H_n(x / s^{HK}).
double local_time_coeff_1d(const HurstParams& p, std::size_t n, double s, double x);

/// Partial sums S_0..S_N of the truncated second moment
/// E[(L_t^x)^2] = sum_n n! intint c_n(s) c_n(r) R(s,r)^n ds dr.
/// `eps` > 0 evaluates the mollified-estimator coefficients instead.
std::vector<double> local_time_chaos_moment(const HurstParams& p, double t, double x,
                                            std::size_t N, double eps = 0.0,
                                            const QuadratureSpec& quad = {});

/// Per-order norm a_n = n! intint c_n c_n R^n (the N-th partial-sum increments).
std::vector<double> local_time_chaos_norms(const HurstParams& p, double t, double x,
                                           std::size_t N, double eps = 0.0,
                                           const QuadratureSpec& quad = {});

/// Multidimensional local-time coefficient of Theorem-style form:
/// prod_i p_{s^{2H_iK_i}}(x_i) s^{-(1/2+(n_i-1)H_iK_i)} H_{n_i}(x_i/s^{H_iK_i}) * s^theta.
double multi_local_time_coeff(const MultiParams& mp, const std::vector<std::size_t>& n, double s,
                              const std::vector<double>& x, double theta);

/// Shell norms a_m = sum_{|n|=m} prod_i n_i! intint c_n(s) c_n(r) prod R_i^{n_i}.
std::vector<double> multi_chaos_shell_norms(const MultiParams& mp, double t,
                                            const std::vector<double>& x, double theta,
                                            std::size_t max_total_order,
                                            const QuadratureSpec& quad = {});

/// Mollified Strook coefficient factor beta_{n,eps}(s) for one component.
double beta_coeff(const HurstParams& p, std::size_t n, double eps, double s, double x);

struct WatanabeIndex {
  double alpha;
  double threshold;  // 1/(2 (HK)^*) - d/2

  WatanabeIndex(double alpha_, const MultiParams& mp)
      : alpha(alpha_),
        threshold(1.0 / (2.0 * mp.hk_star()) - 0.5 * static_cast<double>(mp.dims())) {}
};

/// Partial sums S_N = sum_{n<=N} (1+n)^alpha a_n.
std::vector<double> watanabe_partial_norm(const WatanabeIndex& idx,
                                          const std::vector<double>& a, std::size_t N);

struct TailFit {
  double slope;            // rho in a_n ~ n^rho
  double slope_stderr;
  double implied_alpha_bound;  // series converges for alpha < -rho - 1
};

/// Least-squares slope of log a_n vs log n over orders [n_lo, n_hi].
TailFit tail_exponent_estimate(const std::vector<double>& a, std::size_t n_lo, std::size_t n_hi);

/// CSV coefficient table (order, s, value) for plotting.
void export_coefficient_table(const HurstParams& p, double x, std::size_t max_order,
                              const std::vector<double>& s_grid, const std::string& path);

}  // namespace bifbm
