#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "bifbm/params.hpp"
#include "bifbm/quadrature.hpp"
#include "bifbm/simulate.hpp"

namespace bifbm {

/// C^2 test function with explicit derivatives; optionally time-dependent.
struct TestFunction {
  std::function<double(double)> f;
  std::function<double(double)> f_prime;
  std::function<double(double)> f_second;
  // time-dependent form f(s, x)
  std::function<double(double, double)> ft;
  std::function<double(double, double)> ft_s;
  std::function<double(double, double)> ft_x;
  std::function<double(double, double)> ft_xx;

  bool time_dependent() const { return static_cast<bool>(ft); }

  /// Finite-difference consistency of the derivative slots at random points.
  void validate(double rel_tol = 1e-4, std::uint64_t seed = 12345) const;
};

struct LocalTimeEstimate {
  double x;
  double t;
  double epsilon;
  Eigen::VectorXd per_path;
  double mean;
  double standard_error;
};

struct McEstimate {
  double mean;
  double standard_error;
};

/// Sum of squared increments of one path over its grid.
double quadratic_variation(const Eigen::VectorXd& path, const TimeGrid& grid);

/// E V_t^n as the exact variogram telescoping sum over the uniform grid.
double expected_qv(const HurstParams& p, double t, std::size_t n);

/// Same expectation through the critical-regime identity
/// E V_t^n = (t/n) sum h(j) + t 2^{1-K}; requires 2HK = 1.
double expected_qv_h_route(const HurstParams& p, double t, std::size_t n);

/// Increment covariance theta_n(i,j) on the uniform grid, closed form.
double increment_cov_theta(const HurstParams& p, double t, std::size_t n, std::size_t i,
                           std::size_t j);

/// Critical-regime trace constants (1/2 - 2^{-K}, 2^{-K}); their sum is HK = 1/2.
std::pair<double, double> critical_trace_constants(const HurstParams& p);

/// | E f(B_t) - f(0) - HK int_0^t E f''(B_s) s^{2HK-1} ds |, expectations over
/// N(0, s^{2HK}).  Time-dependent functions add the int E d_s f term.
double ito_deterministic_residual(const HurstParams& p, const TestFunction& tf, double t,
                                  const QuadratureSpec& quad = {});

/// Per-path Skorohod estimate: forward Riemann sum minus the covariance
/// correction sum f''(B_{t_{j-1}}) (R(t_{j-1},t_j) - R(t_{j-1},t_{j-1})).
Eigen::VectorXd skorohod_estimate(const PathEnsemble& ens, const TestFunction& tf, double t);

McEstimate mc_mean(const Eigen::VectorXd& values);

struct PathwiseResidual {
  double l2_error;          // sqrt E |residual|^2
  double standard_error;    // SE of the squared-residual mean, propagated
};

PathwiseResidual ito_pathwise_residual(const PathEnsemble& ens, const TestFunction& tf, double t);

LocalTimeEstimate weighted_local_time(const PathEnsemble& ens, double x, double eps);

/// Closed-form mean of the mollified weighted local time,
/// 2HK int_0^t p_{s^{2HK}+eps}(x) s^{2HK-1} ds  (eps = 0 gives the limit law).
double weighted_local_time_mean(const HurstParams& p, double t, double x, double eps = 0.0);

struct OccupationCheck {
  double mean_relative_error;
  double max_relative_error;
};

/// Compares int g(x) L_t^x dx against 2HK int_0^t g(B_s) s^{2HK-1} ds per path.
OccupationCheck occupation_identity_check(const PathEnsemble& ens,
                                          const std::function<double(double)>& g, double eps,
                                          std::optional<std::pair<double, double>> level_range =
                                              std::nullopt,
                                          std::size_t n_levels = 0);

struct TanakaResidual {
  double l2_error;
  double standard_error;
  double mean_mollified_value;  // E F_eps(B_t - x)
  double mean_local_time;       // E of the local-time term
  double mean_skorohod;         // E of the divergence term
};

TanakaResidual tanaka_residual(const PathEnsemble& ens, double x, double eps);

}  // namespace bifbm
