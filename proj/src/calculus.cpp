#include "bifbm/calculus.hpp"

#include <cmath>
#include <stdexcept>

#include "bifbm/covariance.hpp"
#include "bifbm/hermite.hpp"
#include "bifbm/rng.hpp"

namespace bifbm {

void TestFunction::validate(double rel_tol, std::uint64_t seed) const {
  NormalStream rng(seed, 0, 0);
  const double h = 1e-5;
  for (int i = 0; i < 10; ++i) {
    const double x = 3.0 * rng.normal();
    if (f && f_prime) {
      const double fd = (f(x + h) - f(x - h)) / (2.0 * h);
      const double an = f_prime(x);
      if (std::abs(fd - an) > rel_tol * (1.0 + std::abs(an)))
        throw std::invalid_argument("TestFunction: f_prime inconsistent with f");
    }
    if (f_prime && f_second) {
      const double fd = (f_prime(x + h) - f_prime(x - h)) / (2.0 * h);
      const double an = f_second(x);
      if (std::abs(fd - an) > rel_tol * (1.0 + std::abs(an)))
        throw std::invalid_argument("TestFunction: f_second inconsistent with f_prime");
    }
    if (ft && ft_s && ft_x) {
      const double s = 0.1 + 0.9 * std::abs(rng.normal());
      const double fd_s = (ft(s + h, x) - ft(s - h, x)) / (2.0 * h);
      if (std::abs(fd_s - ft_s(s, x)) > rel_tol * (1.0 + std::abs(ft_s(s, x))))
        throw std::invalid_argument("TestFunction: ft_s inconsistent with ft");
      const double fd_x = (ft(s, x + h) - ft(s, x - h)) / (2.0 * h);
      if (std::abs(fd_x - ft_x(s, x)) > rel_tol * (1.0 + std::abs(ft_x(s, x))))
        throw std::invalid_argument("TestFunction: ft_x inconsistent with ft");
    }
  }
}

double quadratic_variation(const Eigen::VectorXd& path, const TimeGrid& grid) {
  if (path.size() != static_cast<Eigen::Index>(grid.size()))
    throw std::invalid_argument("quadratic_variation: path/grid size mismatch");
  double s = 0.0;
  for (Eigen::Index j = 1; j < path.size(); ++j) {
    const double d = path(j) - path(j - 1);
    s += d * d;
  }
  return s;
}

double expected_qv(const HurstParams& p, double t, std::size_t n) {
  if (n < 1) throw std::invalid_argument("expected_qv: n must be >= 1");
  double s = 0.0;
  for (std::size_t j = 1; j <= n; ++j) {
    const double tj = static_cast<double>(j) * t / static_cast<double>(n);
    const double tj1 = static_cast<double>(j - 1) * t / static_cast<double>(n);
    s += variogram(p, tj, tj1);
  }
  return s;
}

double expected_qv_h_route(const HurstParams& p, double t, std::size_t n) {
  if (p.regime() != Regime::critical)
    throw std::domain_error("expected_qv_h_route: requires 2HK = 1");
  double hsum = 0.0;
  for (std::size_t j = 1; j <= n; ++j) hsum += h_fn(p, static_cast<double>(j));
  return t / static_cast<double>(n) * hsum + t * std::pow(2.0, 1.0 - p.k);
}

double increment_cov_theta(const HurstParams& p, double t, std::size_t n, std::size_t i,
                           std::size_t j) {
  if (i < 1 || i > n || j < 1 || j > n)
    throw std::out_of_range("increment_cov_theta: indices must be in [1, n]");
  const double H = p.h, K = p.k, two_hk = 2.0 * p.hk();
  auto spk = [&](double a, double b) { return std::pow(std::pow(a, 2.0 * H) + std::pow(b, 2.0 * H), K); };
  const double di = static_cast<double>(i), dj = static_cast<double>(j);
  const double gap = std::abs(dj - di);
  double bracket = spk(di, dj) - spk(di, dj - 1.0) - spk(di - 1.0, dj) + spk(di - 1.0, dj - 1.0) -
                   2.0 * std::pow(gap, two_hk) + std::pow(std::abs(dj - di - 1.0), two_hk) +
                   std::pow(std::abs(dj - di + 1.0), two_hk);
  // i or j = 1 has a vanishing 0^{2H} term inside spk; pow(0, ...) = 0 handles it
  return std::pow(t / static_cast<double>(n), two_hk) * bracket / std::pow(2.0, K);
}

std::pair<double, double> critical_trace_constants(const HurstParams& p) {
  if (p.regime() != Regime::critical)
    throw std::domain_error("critical_trace_constants: requires 2HK = 1");
  const double two_mk = std::pow(2.0, -p.k);
  return {0.5 - two_mk, two_mk};
}

double ito_deterministic_residual(const HurstParams& p, const TestFunction& tf, double t,
                                  const QuadratureSpec& quad) {
  if (!(t > 0.0)) throw std::invalid_argument("ito_deterministic_residual: t must be > 0");
  // the heat-kernel identity is regime-free: the v = s^{2HK} substitution
  // absorbs the weight even when s^{2HK-1} blows up at 0
  const double two_hk = 2.0 * p.hk();
  const std::size_t gh = 80;
  if (tf.time_dependent()) {
    const double lhs = gaussian_expectation([&](double x) { return tf.ft(t, x); },
                                            std::pow(t, two_hk), gh) -
                       tf.ft(0.0, 0.0);
    const double drift = integrate_adaptive(
        [&](double s) {
          return gaussian_expectation([&](double x) { return tf.ft_s(s, x); },
                                      std::pow(s, two_hk), gh);
        },
        0.0, t, quad);
    // substitution v = s^{2HK} turns the weighted trace term into a smooth integral
    const double trace = 0.5 * integrate_adaptive(
                                   [&](double v) {
                                     const double s = std::pow(v, 1.0 / two_hk);
                                     return gaussian_expectation(
                                         [&](double x) { return tf.ft_xx(s, x); }, v, gh);
                                   },
                                   0.0, std::pow(t, two_hk), quad);
    return std::abs(lhs - drift - trace);
  }
  const double lhs =
      gaussian_expectation(tf.f, std::pow(t, two_hk), gh) - tf.f(0.0);
  const double trace = 0.5 * integrate_adaptive(
                                 [&](double v) {
                                   return gaussian_expectation(tf.f_second, v, gh);
                                 },
                                 0.0, std::pow(t, two_hk), quad);
  return std::abs(lhs - trace);
}

namespace {

// trapezoid of w(s) g(s) over the ensemble grid with the first cell integrated
// in closed form against the weight s^{2HK-1}
double weighted_time_integral(const HurstParams& p, const TimeGrid& grid,
                              const std::function<double(std::size_t)>& g_at) {
  const auto& ts = grid.times();
  const double two_hk = 2.0 * p.hk();
  double acc = 0.5 * (g_at(0) + g_at(1)) * std::pow(ts[1], two_hk) / two_hk;
  for (std::size_t j = 2; j < ts.size(); ++j) {
    const double w0 = std::pow(ts[j - 1], two_hk - 1.0);
    const double w1 = std::pow(ts[j], two_hk - 1.0);
    acc += 0.5 * (g_at(j - 1) * w0 + g_at(j) * w1) * (ts[j] - ts[j - 1]);
  }
  return acc;
}

void require_horizon(const PathEnsemble& ens, double t) {
  if (std::abs(ens.grid.horizon() - t) > 1e-12 * std::max(1.0, t))
    throw std::invalid_argument("ensemble horizon does not match requested t");
}

}  // namespace

Eigen::VectorXd skorohod_estimate(const PathEnsemble& ens, const TestFunction& tf, double t) {
  require_horizon(ens, t);
  const HurstParams& p = ens.params.params.at(0);
  if (!(2.0 * p.hk() >= 1.0)) throw std::domain_error("skorohod_estimate: requires 2HK >= 1");
  const auto& ts = ens.grid.times();
  const auto& vals = ens.dim(0);
  const std::size_t n = ens.grid.steps();
  // covariance corrections <1_{(0,t_{j-1}]}, 1_{(t_{j-1},t_j]}> = R(t_{j-1},t_j) - R(t_{j-1},t_{j-1})
  std::vector<double> corr(n + 1, 0.0);
  for (std::size_t j = 1; j <= n; ++j)
    corr[j] = covariance(p, ts[j - 1], ts[j]) - covariance(p, ts[j - 1], ts[j - 1]);
  Eigen::VectorXd out(vals.cols());
  for (Eigen::Index pth = 0; pth < vals.cols(); ++pth) {
    double fwd = 0.0, cor = 0.0;
    for (std::size_t j = 1; j <= n; ++j) {
      const double prev = vals(static_cast<Eigen::Index>(j - 1), pth);
      fwd += tf.f_prime(prev) * (vals(static_cast<Eigen::Index>(j), pth) - prev);
      cor += tf.f_second(prev) * corr[j];
    }
    out(pth) = fwd - cor;
  }
  return out;
}

McEstimate mc_mean(const Eigen::VectorXd& values) {
  const double n = static_cast<double>(values.size());
  const double mean = values.mean();
  const double var = (values.array() - mean).square().sum() / (n - 1.0);
  return {mean, std::sqrt(var / n)};
}

PathwiseResidual ito_pathwise_residual(const PathEnsemble& ens, const TestFunction& tf, double t) {
  require_horizon(ens, t);
  const HurstParams& p = ens.params.params.at(0);
  const Eigen::VectorXd sk = skorohod_estimate(ens, tf, t);
  const auto& vals = ens.dim(0);
  const std::size_t last = ens.grid.steps();
  Eigen::VectorXd sq(vals.cols());
  for (Eigen::Index pth = 0; pth < vals.cols(); ++pth) {
    const double trace_term =
        p.hk() * weighted_time_integral(p, ens.grid, [&](std::size_t j) {
          return tf.f_second(vals(static_cast<Eigen::Index>(j), pth));
        });
    const double r = tf.f(vals(static_cast<Eigen::Index>(last), pth)) - tf.f(0.0) - sk(pth) -
                     trace_term;
    sq(pth) = r * r;
  }
  const McEstimate m = mc_mean(sq);
  return {std::sqrt(m.mean), m.standard_error};
}

LocalTimeEstimate weighted_local_time(const PathEnsemble& ens, double x, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("weighted_local_time: eps must be > 0");
  const HurstParams& p = ens.params.params.at(0);
  if (!(2.0 * p.hk() >= 1.0)) throw std::domain_error("weighted_local_time: requires 2HK >= 1");
  const auto& vals = ens.dim(0);
  LocalTimeEstimate est{};
  est.x = x;
  est.t = ens.grid.horizon();
  est.epsilon = eps;
  est.per_path.resize(vals.cols());
  for (Eigen::Index pth = 0; pth < vals.cols(); ++pth) {
    est.per_path(pth) =
        2.0 * p.hk() * weighted_time_integral(p, ens.grid, [&](std::size_t j) {
          return gauss_kernel(eps, vals(static_cast<Eigen::Index>(j), pth) - x);
        });
  }
  const McEstimate m = mc_mean(est.per_path);
  est.mean = m.mean;
  est.standard_error = m.standard_error;
  return est;
}

double weighted_local_time_mean(const HurstParams& p, double t, double x, double eps) {
  const double two_hk = 2.0 * p.hk();
  // v = s^{2HK}: integral becomes int_0^{t^{2HK}} p_{v+eps}(x) dv
  // tanh-sinh never evaluates the endpoint, so the eps = 0, x = 0 case is safe
  return integrate_singular([&](double v) { return gauss_kernel(v + eps, x); }, 0.0,
                            std::pow(t, two_hk));
}

OccupationCheck occupation_identity_check(const PathEnsemble& ens,
                                          const std::function<double(double)>& g, double eps,
                                          std::optional<std::pair<double, double>> level_range,
                                          std::size_t n_levels) {
  const HurstParams& p = ens.params.params.at(0);
  const auto& vals = ens.dim(0);
  const double sd = std::sqrt(eps);
  double lo, hi;
  if (level_range) {
    lo = level_range->first;
    hi = level_range->second;
  } else {
    lo = vals.minCoeff() - 10.0 * sd;
    hi = vals.maxCoeff() + 10.0 * sd;
  }
  if (n_levels == 0)
    n_levels = static_cast<std::size_t>(std::ceil((hi - lo) / (0.5 * sd))) + 1;
  const double dx = (hi - lo) / static_cast<double>(n_levels - 1);

  OccupationCheck chk{0.0, 0.0};
  for (Eigen::Index pth = 0; pth < vals.cols(); ++pth) {
    // rhs: 2HK int g(B_s) s^{2HK-1} ds
    const double rhs = 2.0 * p.hk() * weighted_time_integral(p, ens.grid, [&](std::size_t j) {
                         return g(vals(static_cast<Eigen::Index>(j), pth));
                       });
    // lhs: trapezoid over levels of g(x) Lhat(x) with the same time rule
    double lhs = 0.0;
    for (std::size_t k = 0; k < n_levels; ++k) {
      const double x = lo + static_cast<double>(k) * dx;
      const double lt = 2.0 * p.hk() * weighted_time_integral(p, ens.grid, [&](std::size_t j) {
                          return gauss_kernel(eps, vals(static_cast<Eigen::Index>(j), pth) - x);
                        });
      const double w = (k == 0 || k + 1 == n_levels) ? 0.5 : 1.0;
      lhs += w * g(x) * lt;
    }
    lhs *= dx;
    const double rel = std::abs(lhs - rhs) / std::max(1e-300, std::abs(rhs));
    chk.mean_relative_error += rel;
    chk.max_relative_error = std::max(chk.max_relative_error, rel);
  }
  chk.mean_relative_error /= static_cast<double>(vals.cols());
  return chk;
}

TanakaResidual tanaka_residual(const PathEnsemble& ens, double x, double eps) {
  const HurstParams& p = ens.params.params.at(0);
  if (!(2.0 * p.hk() >= 1.0)) throw std::domain_error("tanaka_residual: requires 2HK >= 1");
  const MollifierParam mp(eps);
  TestFunction tf;
  tf.f = [&, x](double z) { return mollifier(mp, z - x); };
  tf.f_prime = [&, x](double z) { return mollifier_prime(mp, z - x); };
  tf.f_second = [&, x](double z) { return 2.0 * gauss_kernel(eps, z - x); };
  const double t = ens.grid.horizon();
  const Eigen::VectorXd sk = skorohod_estimate(ens, tf, t);
  const LocalTimeEstimate lt = weighted_local_time(ens, x, eps);
  const auto& vals = ens.dim(0);
  const Eigen::Index last = static_cast<Eigen::Index>(ens.grid.steps());
  Eigen::VectorXd sq(vals.cols()), mv(vals.cols());
  for (Eigen::Index pth = 0; pth < vals.cols(); ++pth) {
    mv(pth) = mollifier(mp, vals(last, pth) - x);
    const double r = mv(pth) - mollifier(mp, -x) - sk(pth) - lt.per_path(pth);
    sq(pth) = r * r;
  }
  const McEstimate m = mc_mean(sq);
  TanakaResidual out{};
  out.l2_error = std::sqrt(m.mean);
  out.standard_error = m.standard_error;
  out.mean_mollified_value = mv.mean();
  out.mean_local_time = lt.mean;
  out.mean_skorohod = sk.mean();
  return out;
}

}  // namespace bifbm
