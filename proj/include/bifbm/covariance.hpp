#pragma once

#include <functional>
#include <utility>

#include "bifbm/params.hpp"
#include "bifbm/quadrature.hpp"

namespace bifbm {

/// R(t,s) = 2^{-K} ( (t^{2H} + s^{2H})^K - |t-s|^{2HK} ).
double covariance(const HurstParams& p, double t, double s);

/// E (B_t - B_s)^2 = R(t,t) + R(s,s) - 2 R(t,s).
double variogram(const HurstParams& p, double t, double s);

/// Quasi-helix sandwich: 2^{-K} |t-s|^{2HK} <= variogram <= 2^{1-K} |t-s|^{2HK}.
std::pair<double, double> quasi_helix_bounds(const HurstParams& p, double t, double s);

/// d^2 R / dt ds away from the diagonal; singular on t = s when 2HK < 2.
double mixed_partial(const HurstParams& p, double t, double s);

/// h(y) = y^{2HK} + (y-1)^{2HK} - 2^{1-K} (y^{2H} + (y-1)^{2H})^K on [1, inf).
/// Evaluated in a cancellation-safe form; h(y) -> 0 and, when 2HK = 1,
/// y h(y) -> (1 - 2H)/4.
double h_fn(const HurstParams& p, double y);

inline double scaled_h(const HurstParams& p, double y) { return y * h_fn(p, y); }

struct HNorm {
  double signed_value;
  double absolute_value;
};

/// |H|-norm style double integral of f against d^2R/dudv over [0,T]^2.
/// signed_value uses f(u) f(v); absolute_value uses |f(u)| |f(v)|.
/// Requires 2HK > 1 so the diagonal singularity is integrable.
HNorm abs_h_norm(const std::function<double(double)>& f, double T, const HurstParams& p,
                 const QuadratureSpec& quad = {});

}  // namespace bifbm
