#include "bifbm/chaos.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <stdexcept>

#include "bifbm/covariance.hpp"
#include "bifbm/hermite.hpp"

namespace bifbm {

namespace {

double factorial(std::size_t n) {
  double f = 1.0;
  for (std::size_t k = 2; k <= n; ++k) f *= static_cast<double>(k);
  return f;
}

// R(1, z) for z in [0, 1]; expm1/log1p form survives z near 0
double cov_unit(const HurstParams& p, double z) {
  if (z == 0.0) return 0.0;
  return (std::expm1(p.k * std::log1p(std::pow(z, 2.0 * p.h))) -
          std::expm1(2.0 * p.hk() * std::log1p(-z))) /
         std::pow(2.0, p.k);
}

// mollified 1-d coefficient: variance s^{2HK} + eps
double coeff_1d(const HurstParams& p, std::size_t n, double s, double x, double eps) {
  const double two_hk = 2.0 * p.hk();
  const double var = std::pow(s, two_hk) + eps;
  return two_hk * gauss_kernel(var, x) * std::pow(var, -0.5 * static_cast<double>(n)) *
         hermite(n, x / std::sqrt(var)) * std::pow(s, two_hk - 1.0);
}

}  // namespace

double multiple_integral_inner(const HurstParams& p, std::size_t n, double s, double r) {
  if (n == 0) return 1.0;
  return factorial(n) * std::pow(covariance(p, s, r), static_cast<double>(n));
}

double local_time_coeff_1d(const HurstParams& p, std::size_t n, double s, double x) {
  if (!(s > 0.0)) throw std::domain_error("local_time_coeff_1d: s must be > 0");
  return coeff_1d(p, n, s, x, 0.0);
}

std::vector<double> local_time_chaos_norms(const HurstParams& p, double t, double x,
                                           std::size_t N, double eps,
                                           const QuadratureSpec& quad) {
  if (N > 120) throw std::invalid_argument("local_time_chaos_norms: order cap exceeded");
  const double hk = p.hk();
  const double two_hk = 2.0 * hk;
  std::vector<double> a(N + 1, 0.0);
  for (std::size_t n = 0; n <= N; ++n) {
    if (x == 0.0 && n % 2 == 1) continue;  // odd Hermite at 0
    const double nd = static_cast<double>(n);
    // 2 n! int_0^t dr c_n(r) r^{2HK n + 1} int_0^1 dz c_n(rz) Rtilde(z)^n
    if (eps == 0.0) {
      // c_n(s) = 2HK G_n(x s^{-HK}) s^{HK(1-n)-1} with G_n = phi H_n, so the
      // raw s-powers combine to r^{2HK-1} outside and z^{e} inside; pulling
      // z^{q n} out of Rtilde^n keeps every factor in double range.
      const double q = std::min(1.0, 2.0 * p.h);
      const double e_z = q * nd + hk * (1.0 - nd) - 1.0;
      auto arg = [&](double s) { return x == 0.0 ? 0.0 : x * std::pow(s, -hk); };
      auto outer = [&](double r) {
        const double gr = hermite_gauss(n, arg(r));
        if (gr == 0.0) return 0.0;
        auto inner = [&](double z) {
          if (z < 1e-250) return 0.0;
          const double ratio = cov_unit(p, z) * std::pow(z, -q);
          return hermite_gauss(n, arg(r * z)) * std::pow(ratio, nd) *
                 std::pow(z, e_z);
        };
        const double zint = integrate_singular(inner, 0.0, 1.0, quad);
        return gr * std::pow(r, two_hk - 1.0) * zint;
      };
      a[n] = 2.0 * factorial(n) * two_hk * two_hk * integrate_singular(outer, 0.0, t, quad);
    } else {
      auto outer = [&](double r) {
        const double cr = coeff_1d(p, n, r, x, eps);
        if (cr == 0.0) return 0.0;
        auto inner = [&](double z) {
          return coeff_1d(p, n, r * z, x, eps) *
                 std::pow(cov_unit(p, z), nd);
        };
        const double zint = integrate_singular(inner, 0.0, 1.0, quad);
        return cr * std::pow(r, two_hk * nd + 1.0) * zint;
      };
      a[n] = 2.0 * factorial(n) * integrate_singular(outer, 0.0, t, quad);
    }
  }
  return a;
}

std::vector<double> local_time_chaos_moment(const HurstParams& p, double t, double x,
                                            std::size_t N, double eps,
                                            const QuadratureSpec& quad) {
  const std::vector<double> a = local_time_chaos_norms(p, t, x, N, eps, quad);
  std::vector<double> partial(a.size());
  double acc = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) {
    acc += a[n];
    partial[n] = acc;
  }
  return partial;
}

double multi_local_time_coeff(const MultiParams& mp, const std::vector<std::size_t>& n, double s,
                              const std::vector<double>& x, double theta) {
  if (!(s > 0.0)) throw std::domain_error("multi_local_time_coeff: s must be > 0");
  if (n.size() != mp.dims() || x.size() != mp.dims())
    throw std::invalid_argument("multi_local_time_coeff: dimension mismatch");
  double prod = std::pow(s, theta);
  for (std::size_t i = 0; i < mp.dims(); ++i) {
    const double hk = mp.params[i].hk();
    const double var = std::pow(s, 2.0 * hk);
    prod *= gauss_kernel(var, x[i]) *
            std::pow(s, -(0.5 + (static_cast<double>(n[i]) - 1.0) * hk)) *
            hermite(n[i], x[i] / std::pow(s, hk));
  }
  return prod;
}

namespace {

void enumerate_shell(std::size_t dims, std::size_t total, std::vector<std::size_t>& cur,
                     const std::function<void(const std::vector<std::size_t>&)>& visit) {
  if (cur.size() + 1 == dims) {
    cur.push_back(total);
    visit(cur);
    cur.pop_back();
    return;
  }
  for (std::size_t v = 0; v <= total; ++v) {
    cur.push_back(v);
    enumerate_shell(dims, total - v, cur, visit);
    cur.pop_back();
  }
}

}  // namespace

std::vector<double> multi_chaos_shell_norms(const MultiParams& mp, double t,
                                            const std::vector<double>& x, double theta,
                                            std::size_t max_total_order,
                                            const QuadratureSpec& quad) {
  const std::size_t d = mp.dims();
  std::vector<double> shells(max_total_order + 1, 0.0);
  for (std::size_t m = 0; m <= max_total_order; ++m) {
    double shell = 0.0;
    std::vector<std::size_t> cur;
    enumerate_shell(d, m, cur, [&](const std::vector<std::size_t>& nv) {
      bool vanishes = false;
      double nfact = 1.0;
      for (std::size_t i = 0; i < d; ++i) {
        if (x[i] == 0.0 && nv[i] % 2 == 1) vanishes = true;
        nfact *= factorial(nv[i]);
      }
      if (vanishes) return;
      // c_nv(s) = s^{theta - d/2 - sum n_i HK_i} prod_i G_{n_i}(x_i s^{-HK_i});
      // combining both coefficients with r^{sum 2 HK_i n_i + 1} leaves
      // r^{2 theta - d + 1} outside and z^{e_z} inside after pulling z^{q_i n_i}
      // out of each Rtilde_i^{n_i}.
      double e_z = theta - 0.5 * static_cast<double>(d);
      std::vector<double> q(d);
      for (std::size_t i = 0; i < d; ++i) {
        q[i] = std::min(1.0, 2.0 * mp.params[i].h);
        e_z += (q[i] - mp.params[i].hk()) * static_cast<double>(nv[i]);
      }
      const double e_r = 2.0 * theta - static_cast<double>(d) + 1.0;
      auto gprod = [&](double s) {
        double g = 1.0;
        for (std::size_t i = 0; i < d; ++i) {
          const double arg = x[i] == 0.0 ? 0.0 : x[i] * std::pow(s, -mp.params[i].hk());
          g *= hermite_gauss(nv[i], arg);
          if (g == 0.0) return 0.0;
        }
        return g;
      };
      auto outer = [&](double r) {
        const double gr = gprod(r);
        if (gr == 0.0) return 0.0;
        auto inner = [&](double z) {
          if (z < 1e-250) return 0.0;
          double ratio_pow = 1.0;
          for (std::size_t i = 0; i < d; ++i)
            ratio_pow *= std::pow(cov_unit(mp.params[i], z) * std::pow(z, -q[i]),
                                  static_cast<double>(nv[i]));
          return gprod(r * z) * ratio_pow * std::pow(z, e_z);
        };
        const double zint = integrate_singular(inner, 0.0, 1.0, quad);
        return gr * std::pow(r, e_r) * zint;
      };
      shell += 2.0 * nfact * integrate_singular(outer, 0.0, t, quad);
    });
    shells[m] = shell;
  }
  return shells;
}

double beta_coeff(const HurstParams& p, std::size_t n, double eps, double s, double x) {
  if (!(s > 0.0)) throw std::domain_error("beta_coeff: s must be > 0");
  if (eps < 0.0) throw std::domain_error("beta_coeff: eps must be >= 0");
  const double hk = p.hk();
  const double c = std::pow(s, 0.5 - hk) / std::sqrt(2.0 * hk);
  const double var = std::pow(s, 2.0 * hk) + eps / (c * c);
  return std::pow(var, -0.5 * static_cast<double>(n)) * gauss_kernel(var, x) *
         hermite(n, x / std::sqrt(var));
}

std::vector<double> watanabe_partial_norm(const WatanabeIndex& idx, const std::vector<double>& a,
                                          std::size_t N) {
  for (double v : a)
    if (v < 0.0) throw std::invalid_argument("watanabe_partial_norm: a_n must be >= 0");
  const std::size_t top = std::min(N, a.empty() ? 0 : a.size() - 1);
  std::vector<double> out(top + 1);
  double acc = 0.0;
  for (std::size_t n = 0; n <= top; ++n) {
    acc += std::pow(1.0 + static_cast<double>(n), idx.alpha) * a[n];
    out[n] = acc;
  }
  return out;
}

TailFit tail_exponent_estimate(const std::vector<double>& a, std::size_t n_lo, std::size_t n_hi) {
  if (n_lo < 1 || n_hi >= a.size() || n_lo >= n_hi)
    throw std::invalid_argument("tail_exponent_estimate: bad fit range");
  std::vector<double> lx, ly;
  for (std::size_t n = n_lo; n <= n_hi; ++n) {
    if (a[n] < 0.0)
      throw std::invalid_argument("tail_exponent_estimate: negative entry in fit range");
    if (a[n] == 0.0) continue;  // structurally vanishing orders carry no tail information
    lx.push_back(std::log(static_cast<double>(n)));
    ly.push_back(std::log(a[n]));
  }
  if (lx.size() < 3)
    throw std::invalid_argument("tail_exponent_estimate: too few positive entries in fit range");
  const double n = static_cast<double>(lx.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  const double denom = n * sxx - sx * sx;
  const double slope = (n * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / n;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = ly[i] - (intercept + slope * lx[i]);
    ss_res += r * r;
  }
  const double var_slope = lx.size() > 2 ? ss_res / (n - 2.0) * n / denom : 0.0;
  return {slope, std::sqrt(std::max(0.0, var_slope)), -slope - 1.0};
}

void export_coefficient_table(const HurstParams& p, double x, std::size_t max_order,
                              const std::vector<double>& s_grid, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("export_coefficient_table: cannot open " + path);
  out << "order,s,value\n";
  char buf[80];
  for (std::size_t n = 0; n <= max_order; ++n)
    for (double s : s_grid) {
      std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g\n", n, s, local_time_coeff_1d(p, n, s, x));
      out << buf;
    }
}

}  // namespace bifbm
