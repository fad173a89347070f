#include "bifbm/covariance.hpp"

#include <cmath>
#include <stdexcept>

namespace bifbm {

namespace {

// (t^{2H} + s^{2H})^K in log domain: a^{2HK} (1 + (b/a)^{2H})^K with a = max.
double sum_pow_k(const HurstParams& p, double t, double s) {
  const double a = std::max(t, s);
  const double b = std::min(t, s);
  if (a == 0.0) return 0.0;
  if (b == 0.0) return std::pow(a, 2.0 * p.hk());
  const double ratio_pow = std::exp(2.0 * p.h * std::log(b / a));
  return std::exp(2.0 * p.hk() * std::log(a) + p.k * std::log1p(ratio_pow));
}

}  // namespace

double covariance(const HurstParams& p, double t, double s) {
  if (t < 0.0 || s < 0.0) throw std::domain_error("covariance: times must be nonnegative");
  if (t == 0.0 || s == 0.0) return 0.0;
  const double two_hk = 2.0 * p.hk();
  return (sum_pow_k(p, t, s) - std::pow(std::abs(t - s), two_hk)) / std::pow(2.0, p.k);
}

double variogram(const HurstParams& p, double t, double s) {
  if (t == s) return 0.0;
  return covariance(p, t, t) + covariance(p, s, s) - 2.0 * covariance(p, t, s);
}

std::pair<double, double> quasi_helix_bounds(const HurstParams& p, double t, double s) {
  if (t < 0.0 || s < 0.0) throw std::domain_error("quasi_helix_bounds: times must be nonnegative");
  const double gap = std::pow(std::abs(t - s), 2.0 * p.hk());
  return {std::pow(2.0, -p.k) * gap, std::pow(2.0, 1.0 - p.k) * gap};
}

double mixed_partial(const HurstParams& p, double t, double s) {
  if (t <= 0.0 || s <= 0.0) throw std::domain_error("mixed_partial: times must be positive");
  if (t == s) throw std::domain_error("mixed_partial: singular on the diagonal");
  const double H = p.h, K = p.k, hk = p.hk();
  const double sum2h = std::pow(t, 2.0 * H) + std::pow(s, 2.0 * H);
  const double term1 =
      4.0 * H * H * K * (K - 1.0) * std::pow(t * s, 2.0 * H - 1.0) * std::pow(sum2h, K - 2.0);
  const double term2 = 2.0 * hk * (2.0 * hk - 1.0) * std::pow(std::abs(t - s), 2.0 * hk - 2.0);
  return (term1 + term2) / std::pow(2.0, K);
}

double h_fn(const HurstParams& p, double y) {
  if (y < 1.0) throw std::domain_error("h_fn: y must be >= 1");
  const double H = p.h, K = p.k, two_hk = 2.0 * p.hk();
  if (y == 1.0) return 1.0 - std::pow(2.0, 1.0 - K);
  // h(y) = y^{2HK} [ (1 + u^{2HK}) - 2 ((1 + u^{2H})/2)^K ], u = 1 - 1/y.
  // Both bracket terms are near 1 for large y; assemble from expm1/log1p to
  // keep the O(1/y^2) difference.
  const double lu = std::log1p(-1.0 / y);               // log(1 - 1/y)
  const double a = std::expm1(two_hk * lu);             // u^{2HK} - 1
  const double u2h_m1 = std::expm1(2.0 * H * lu);       // u^{2H} - 1
  const double b = 2.0 * std::expm1(K * std::log1p(0.5 * u2h_m1));  // 2((1+u^{2H})/2)^K - 2
  return std::pow(y, two_hk) * (a - b);
}

HNorm abs_h_norm(const std::function<double(double)>& f, double T, const HurstParams& p,
                 const QuadratureSpec& quad) {
  if (!(2.0 * p.hk() > 1.0))
    throw std::domain_error("abs_h_norm: requires 2HK > 1 (integrable diagonal)");
  const double H = p.h, K = p.k, hk = p.hk();
  const double pref = std::pow(2.0, -K);
  const double psing = 2.0 * hk - 1.0;  // substitution exponent for the |u-v| term

  auto inner = [&](double v, bool absolute) {
    if (v < 1e-100) return 0.0;  // contributes O(v^{2HK-1}) dv; below tolerance
    const double fv = absolute ? std::abs(f(v)) : f(v);
    if (fv == 0.0 && absolute) return 0.0;
    // smooth part of the kernel over u in (0, v)
    auto smooth = [&](double u) {
      const double fu = absolute ? std::abs(f(u)) : f(u);
      const double sum2h = std::pow(u, 2.0 * H) + std::pow(v, 2.0 * H);
      if (sum2h == 0.0) return 0.0;  // underflow guard for u, v both tiny
      return fu * 4.0 * H * H * K * (K - 1.0) * std::pow(u * v, 2.0 * H - 1.0) *
             std::pow(sum2h, K - 2.0);
    };
    double part1 = v > 0.0 ? integrate_singular(smooth, 0.0, v, quad) : 0.0;
    // |v-u|^{2HK-2} part: w = (v-u)^{2HK-1} absorbs the singularity
    auto desing = [&](double w) {
      const double u = v - std::pow(w, 1.0 / psing);
      const double fu = absolute ? std::abs(f(u)) : f(u);
      return fu;
    };
    double part2 = 0.0;
    if (v > 0.0)
      part2 = 2.0 * hk * integrate_singular(desing, 0.0, std::pow(v, psing), quad);
    return fv * pref * (part1 + part2);
  };

  HNorm out{};
  out.signed_value =
      2.0 * integrate_singular([&](double v) { return inner(v, false); }, 0.0, T, quad);
  out.absolute_value =
      2.0 * integrate_singular([&](double v) { return inner(v, true); }, 0.0, T, quad);
  return out;
}

}  // namespace bifbm
