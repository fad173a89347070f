#include "bifbm/potential.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <boost/math/special_functions/expint.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "bifbm/covariance.hpp"
#include "bifbm/hermite.hpp"

namespace bifbm {

namespace {

constexpr double pi = std::numbers::pi;

double kernel_prefactor(std::size_t d) {
  // d >= 3: -Gamma(d/2 - 1) / (2 pi^{d/2})
  const double dd = static_cast<double>(d);
  return -boost::math::tgamma(0.5 * dd - 1.0) / (2.0 * std::pow(pi, 0.5 * dd));
}

double radial_U(std::size_t d, double r) {
  if (d == 2) return std::log(r) / pi;
  return kernel_prefactor(d) * std::pow(r, 2.0 - static_cast<double>(d));
}

// radial mollified kernel value u_eps(r) with U_eps(w) = u_eps(|w|)
double radial_mollified_U(std::size_t d, double eps, double r) {
  if (d == 3) {
    if (r == 0.0) return -1.0 / (pi * std::sqrt(2.0 * pi * eps));
    return -std::erf(r / std::sqrt(2.0 * eps)) / (2.0 * pi * r);
  }
  if (d == 2) {
    if (r == 0.0)
      return 0.5 * (std::log(2.0 * eps) - std::numbers::egamma) / pi;
    // (log r + E1(r^2 / 2 eps) / 2) / pi
    return (std::log(r) + 0.5 * boost::math::expint(1, r * r / (2.0 * eps))) / pi;
  }
  throw std::invalid_argument("radial_mollified_U: closed form only for d = 2, 3");
}

// first and second radial derivatives of u_eps
void radial_mollified_derivs(std::size_t d, double eps, double r, double& u1, double& u2) {
  const double g = std::exp(-r * r / (2.0 * eps));  // shared Gaussian factor
  if (d == 3) {
    const double e = std::erf(r / std::sqrt(2.0 * eps));
    const double gp = std::sqrt(2.0 / (pi * eps)) * g;  // d erf(r/sqrt(2 eps)) / dr
    u1 = (e / (r * r) - gp / r) / (2.0 * pi);
    u2 = (-2.0 * e / (r * r * r) + 2.0 * gp / (r * r) + gp / eps) / (2.0 * pi);
    return;
  }
  if (d == 2) {
    // E1'(x) = -e^{-x}/x with x = r^2/(2 eps)
    u1 = (1.0 - g) / (pi * r);
    u2 = (-(1.0 - g) / (r * r) + g / eps) / pi;
    return;
  }
  throw std::invalid_argument("radial_mollified_derivs: closed form only for d = 2, 3");
}

double gauss_kernel_multi(std::size_t d, double eps, const Eigen::VectorXd& w) {
  return std::pow(2.0 * pi * eps, -0.5 * static_cast<double>(d)) *
         std::exp(-w.squaredNorm() / (2.0 * eps));
}

}  // namespace

double newtonian_U(std::size_t d, const Eigen::VectorXd& z) {
  if (d < 2) throw std::invalid_argument("newtonian_U: d must be >= 2");
  if (static_cast<std::size_t>(z.size()) != d)
    throw std::invalid_argument("newtonian_U: dimension mismatch");
  const double r = z.norm();
  if (r == 0.0) throw std::domain_error("newtonian_U: singular at the origin");
  return radial_U(d, r);
}

double mollified_U(std::size_t d, double eps, const Eigen::VectorXd& w) {
  if (!(eps > 0.0)) throw std::domain_error("mollified_U: eps must be > 0");
  if (static_cast<std::size_t>(w.size()) != d)
    throw std::invalid_argument("mollified_U: dimension mismatch");
  if (d == 2 || d == 3) return radial_mollified_U(d, eps, w.norm());
  return mollified_U_quadrature(d, eps, w);
}

double mollified_U_quadrature(std::size_t d, double eps, const Eigen::VectorXd& w,
                              std::size_t order) {
  // tensor Gauss-Hermite over y ~ N(0, eps I): E U(w - y)
  const auto& gh = gauss_hermite(order);
  const double sd = std::sqrt(eps);
  std::vector<std::size_t> idx(d, 0);
  double acc = 0.0;
  for (;;) {
    Eigen::VectorXd y(d);
    double wprod = 1.0;
    for (std::size_t i = 0; i < d; ++i) {
      y[i] = w[i] - sd * gh.nodes[idx[i]];
      wprod *= gh.weights[idx[i]];
    }
    const double r = y.norm();
    if (r > 0.0) acc += wprod * radial_U(d, r);
    std::size_t i = 0;
    while (i < d && ++idx[i] == gh.nodes.size()) idx[i++] = 0;
    if (i == d) break;
  }
  return acc;
}

PotentialSpec::PotentialSpec(MultiParams mp_, double theta_, Eigen::VectorXd x_)
    : mp(std::move(mp_)), theta(theta_), x(std::move(x_)) {
  if (mp.dims() < 2) throw std::invalid_argument("PotentialSpec: needs d >= 2");
  if (static_cast<std::size_t>(x.size()) != mp.dims())
    throw std::invalid_argument("PotentialSpec: level dimension mismatch");
  if (!(gamma() > 0.0)) throw std::domain_error("PotentialSpec: gamma must be > 0");
}

double PotentialSpec::gamma() const {
  const double d = static_cast<double>(mp.dims());
  double sum_hk = 0.0;
  for (const auto& p : mp.params) sum_hk += p.hk();
  return 0.5 * (2.0 - d) + theta + (d - 2.0) * mp.hk_star() - sum_hk;
}

namespace {

double scale_factor(const PotentialSpec& spec) {
  double pref = 1.0;
  for (const auto& p : spec.mp.params) pref /= std::sqrt(2.0 * p.hk());
  return pref;
}

Eigen::VectorXd scaled_arg(const PotentialSpec& spec, double s, const Eigen::VectorXd& z) {
  Eigen::VectorXd w(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double hk = spec.mp.params[static_cast<std::size_t>(i)].hk();
    w[i] = (z[i] - spec.x[i]) * std::pow(s, 0.5 - hk) / std::sqrt(2.0 * hk);
  }
  return w;
}

}  // namespace

double u_bar(const PotentialSpec& spec, double s, const Eigen::VectorXd& z) {
  if (!(s > 0.0)) throw std::domain_error("u_bar: s must be > 0");
  return scale_factor(spec) * std::pow(s, spec.theta) *
         newtonian_U(spec.dims(), scaled_arg(spec, s, z));
}

UBarDerivatives u_bar_derivatives(const PotentialSpec& spec, double s, const Eigen::VectorXd& z) {
  if (!(s > 0.0)) throw std::domain_error("u_bar_derivatives: s must be > 0");
  const std::size_t d = spec.dims();
  const Eigen::VectorXd w = scaled_arg(spec, s, z);
  const double r = w.norm();
  if (r == 0.0) throw std::domain_error("u_bar_derivatives: singular at the level");
  const double pref = scale_factor(spec) * std::pow(s, spec.theta);

  // radial derivatives of U
  double u0, u1, u2;
  if (d == 2) {
    u0 = std::log(r) / pi;
    u1 = 1.0 / (pi * r);
    u2 = -1.0 / (pi * r * r);
  } else {
    const double cd = kernel_prefactor(d);
    const double dd = static_cast<double>(d);
    u0 = cd * std::pow(r, 2.0 - dd);
    u1 = cd * (2.0 - dd) * std::pow(r, 1.0 - dd);
    u2 = cd * (2.0 - dd) * (1.0 - dd) * std::pow(r, -dd);
  }

  UBarDerivatives out;
  out.grad.resize(static_cast<Eigen::Index>(d));
  out.diag_second.resize(static_cast<Eigen::Index>(d));
  double s_term = spec.theta / s * u0;
  for (std::size_t i = 0; i < d; ++i) {
    const double hk = spec.mp.params[i].hk();
    const double ci = std::pow(s, 0.5 - hk) / std::sqrt(2.0 * hk);
    const double wi = w[static_cast<Eigen::Index>(i)];
    const double ni = wi / r;  // unit direction component
    out.grad[static_cast<Eigen::Index>(i)] = pref * u1 * ni * ci;
    out.diag_second[static_cast<Eigen::Index>(i)] =
        pref * ci * ci * (u2 * ni * ni + u1 * (1.0 - ni * ni) / r);
    // chain rule through c_i(s): d w_i / ds = (1/2 - hk) w_i / s
    s_term += (0.5 - hk) * wi / s * u1 * ni;
  }
  out.d_s = pref * s_term;
  return out;
}

double laplace_identity_residual(std::size_t d, const Eigen::VectorXd& a, double eps,
                                 const Eigen::VectorXd& z) {
  if (static_cast<std::size_t>(a.size()) != d || static_cast<std::size_t>(z.size()) != d)
    throw std::invalid_argument("laplace_identity_residual: dimension mismatch");
  Eigen::VectorXd w(d);
  for (std::size_t i = 0; i < d; ++i) w[static_cast<Eigen::Index>(i)] = a[i] * z[i];
  const double r = w.norm();
  if (r == 0.0) throw std::domain_error("laplace_identity_residual: singular point");
  double u1, u2;
  radial_mollified_derivs(d, eps, r, u1, u2);
  // (1/2) sum_i a_i^{-2} d^2/dz_i^2 [u_eps(|A z|)] = (1/2) Lap u_eps at |w|
  const double lhs = 0.5 * (u2 + (static_cast<double>(d) - 1.0) * u1 / r);
  const double rhs = gauss_kernel_multi(d, eps, w);
  return lhs - rhs;
}

double stencil_laplacian_U(std::size_t d, const Eigen::VectorXd& z, double h) {
  double acc = -2.0 * static_cast<double>(d) * newtonian_U(d, z);
  for (std::size_t i = 0; i < d; ++i) {
    Eigen::VectorXd zp = z, zm = z;
    zp[static_cast<Eigen::Index>(i)] += h;
    zm[static_cast<Eigen::Index>(i)] -= h;
    acc += newtonian_U(d, zp) + newtonian_U(d, zm);
  }
  return acc / (h * h);
}

EnvelopeReport envelope_checks(const PotentialSpec& spec,
                               const std::vector<std::pair<double, Eigen::VectorXd>>& samples) {
  if (samples.empty()) throw std::invalid_argument("envelope_checks: no samples");
  const double d = static_cast<double>(spec.dims());
  EnvelopeReport rep{0.0, 0.0, 0.0, spec.dims() == 2};
  for (const auto& [s, z] : samples) {
    const Eigen::VectorXd w = scaled_arg(spec, s, z);
    const double r = w.norm();
    if (r == 0.0) continue;
    const UBarDerivatives der = u_bar_derivatives(spec, s, z);
    const double grad_env = std::pow(s, 0.5 * (1.0 - d) + spec.theta) * std::pow(r, 1.0 - d);
    const double time_env = std::pow(s, -0.5 * d + spec.theta) * std::pow(r, 2.0 - d);
    const double value_env =
        spec.dims() == 2
            ? std::pow(s, spec.theta) * std::max(1.0, std::abs(std::log(r)))
            : std::pow(s, 0.5 * (2.0 - d) + spec.theta) * std::pow(r, 2.0 - d);
    for (Eigen::Index i = 0; i < der.grad.size(); ++i)
      rep.c_gradient = std::max(rep.c_gradient, std::abs(der.grad[i]) / grad_env);
    rep.c_time = std::max(rep.c_time, std::abs(der.d_s) / time_env);
    rep.c_value = std::max(rep.c_value, std::abs(u_bar(spec, s, z)) / value_env);
  }
  return rep;
}

double multidim_ito_residual(const MultiParams& mp, const MultiTestFunction& tf, double t,
                             const QuadratureSpec& quad) {
  const std::size_t d = mp.dims();
  for (const auto& p : mp.params)
    if (p.regime() != Regime::supercritical)
      throw std::domain_error("multidim_ito_residual: requires 2 H_i K_i > 1 per component");
  const auto& gh = gauss_hermite(40);

  // E g(B_s) with B_s^i ~ N(0, s^{2 h_i k_i}) independent, tensor quadrature
  auto expectation = [&](double s, const std::function<double(const Eigen::VectorXd&)>& g) {
    std::vector<double> sd(d);
    for (std::size_t i = 0; i < d; ++i) sd[i] = std::pow(s, mp.params[i].hk());
    std::vector<std::size_t> idx(d, 0);
    double acc = 0.0;
    Eigen::VectorXd zv(d);
    for (;;) {
      double wprod = 1.0;
      for (std::size_t i = 0; i < d; ++i) {
        zv[static_cast<Eigen::Index>(i)] = sd[i] * gh.nodes[idx[i]];
        wprod *= gh.weights[idx[i]];
      }
      acc += wprod * g(zv);
      std::size_t i = 0;
      while (i < d && ++idx[i] == gh.nodes.size()) idx[i++] = 0;
      if (i == d) break;
    }
    return acc;
  };

  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
  double rhs = tf.f(0.0, zero);
  rhs += integrate_adaptive(
      [&](double s) { return expectation(s, [&](const Eigen::VectorXd& z) { return tf.d_s(s, z); }); },
      0.0, t, quad);
  for (std::size_t i = 0; i < d; ++i) {
    const double hk = mp.params[i].hk();
    // v = s^{2 hk} flattens the weight s^{2hk-1}: hk int f'' s^{2hk-1} ds = (1/2) int f'' dv
    auto g = [&](double v) {
      const double s = std::pow(v, 1.0 / (2.0 * hk));
      return expectation(s, [&](const Eigen::VectorXd& z) { return tf.d2_i(s, z, i); });
    };
    rhs += 0.5 * integrate_adaptive(g, 0.0, std::pow(t, 2.0 * hk), quad);
  }
  const double lhs = expectation(t, [&](const Eigen::VectorXd& z) { return tf.f(t, z); });
  return std::abs(lhs - rhs);
}

MultiTanakaReport mollified_multidim_tanaka(const PathEnsemble& ens, const PotentialSpec& spec,
                                            double eps) {
  if (!(eps > 0.0)) throw std::domain_error("mollified_multidim_tanaka: eps must be > 0");
  const std::size_t d = spec.dims();
  if (ens.values.size() != d)
    throw std::invalid_argument("mollified_multidim_tanaka: ensemble dimension mismatch");
  const auto& times = ens.grid.times();
  const std::size_t m = times.size();
  const std::size_t n_paths = static_cast<std::size_t>(ens.values[0].cols());
  const double t = ens.grid.horizon();
  const double pref = scale_factor(spec);

  auto u_bar_eps = [&](double s, const Eigen::VectorXd& z) {
    Eigen::VectorXd w = scaled_arg(spec, s, z);
    return pref * std::pow(s, spec.theta) * radial_mollified_U(d, eps, w.norm());
  };

  // Tanaka identity started at the first positive grid time t1:
  //   Ubar_eps(t, B_t) = Ubar_eps(t1, B_t1) + int_{t1}^t d_s Ubar_eps ds
  //     + sum_i int_{t1}^t d_i Ubar_eps dB^i  + I_2^eps(t1, t)
  // where the Skorohod term is estimated by the forward sum with covariance
  // correction and I_2^eps = pref int p_eps^d(c(s)(B_s - x)) s^theta ds.
  const double fd_s = 1e-5, fd_z = 1e-4;
  Eigen::VectorXd residual(n_paths), i2_vals(n_paths);
  Eigen::VectorXd zl(d), zr(d), zc(d);
  for (std::size_t pth = 0; pth < n_paths; ++pth) {
    double skorohod = 0.0, time_drift = 0.0, i2 = 0.0;
    for (std::size_t j = 2; j < m; ++j) {
      const double s0 = times[j - 1], s1 = times[j], ds = s1 - s0;
      for (std::size_t i = 0; i < d; ++i)
        zc[static_cast<Eigen::Index>(i)] = ens.values[i](static_cast<Eigen::Index>(j - 1),
                                                         static_cast<Eigen::Index>(pth));
      // ds-drift, midpoint in time
      const double sm = 0.5 * (s0 + s1);
      time_drift +=
          ds * (u_bar_eps(sm + fd_s, zc) - u_bar_eps(sm - fd_s, zc)) / (2.0 * fd_s);
      const Eigen::VectorXd wc = scaled_arg(spec, s0, zc);
      i2 += ds * pref * std::pow(s0, spec.theta) * gauss_kernel_multi(d, eps, wc);
      for (std::size_t i = 0; i < d; ++i) {
        const auto& p = spec.mp.params[i];
        const double db = ens.values[i](static_cast<Eigen::Index>(j),
                                        static_cast<Eigen::Index>(pth)) -
                          zc[static_cast<Eigen::Index>(i)];
        zl = zc;
        zr = zc;
        zl[static_cast<Eigen::Index>(i)] -= fd_z;
        zr[static_cast<Eigen::Index>(i)] += fd_z;
        const double di = (u_bar_eps(s0, zr) - u_bar_eps(s0, zl)) / (2.0 * fd_z);
        const double d2i = (u_bar_eps(s0, zr) - 2.0 * u_bar_eps(s0, zc) + u_bar_eps(s0, zl)) /
                           (fd_z * fd_z);
        const double corr = covariance(p, s0, s1) - covariance(p, s0, s0);
        skorohod += di * db - d2i * corr;
      }
    }
    for (std::size_t i = 0; i < d; ++i) {
      zc[static_cast<Eigen::Index>(i)] =
          ens.values[i](static_cast<Eigen::Index>(m - 1), static_cast<Eigen::Index>(pth));
      zl[static_cast<Eigen::Index>(i)] =
          ens.values[i](1, static_cast<Eigen::Index>(pth));
    }
    residual[static_cast<Eigen::Index>(pth)] =
        u_bar_eps(t, zc) - u_bar_eps(times[1], zl) - time_drift - skorohod - i2;
    i2_vals[static_cast<Eigen::Index>(pth)] = i2;
  }

  MultiTanakaReport rep;
  const Eigen::VectorXd sq = residual.array().square();
  const double mean_sq = sq.mean();
  rep.l2_residual = std::sqrt(mean_sq);
  const double var_sq = (sq.array() - mean_sq).square().sum() / (sq.size() - 1.0);
  rep.residual_se = std::sqrt(var_sq / sq.size()) / (2.0 * std::max(rep.l2_residual, 1e-300));
  rep.mean_i2 = i2_vals.mean();

  // order-0 term of E I_2^eps over (t1, t): p_eps(c(s)(b-x)) = (1/c) p_{eps/c^2}(b-x),
  // so E I_2 = pref int s^theta prod_i (1/c_i) p_{s^{2hk_i}+eps/c_i^2}(x_i) ds
  rep.i2_order0_quad = pref * integrate_adaptive(
                                  [&](double s) {
                                    double prod = std::pow(s, spec.theta);
                                    for (std::size_t i = 0; i < d; ++i) {
                                      const double hk = spec.mp.params[i].hk();
                                      const double ci =
                                          std::pow(s, 0.5 - hk) / std::sqrt(2.0 * hk);
                                      const double var =
                                          std::pow(s, 2.0 * hk) + eps / (ci * ci);
                                      prod *= gauss_kernel(var,
                                                           spec.x[static_cast<Eigen::Index>(i)]) /
                                              ci;
                                    }
                                    return prod;
                                  },
                                  times[1], t, {});

  // gamma > 0 makes Ubar_eps(s, B_s) vanish along s -> 0 at any fixed point
  Eigen::VectorXd z0(d);
  for (std::size_t i = 0; i < d; ++i)
    z0[static_cast<Eigen::Index>(i)] = ens.values[i](1, 0);
  rep.u_bar_origin_limit = u_bar_eps(times[1] * 1e-4, z0);
  return rep;
}

}  // namespace bifbm
