#pragma once

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace bifbm {

enum class Regime { subcritical, critical, supercritical };

/// Exponent pair (H, K) of a bifractional Brownian motion.
/// H in (0,1), K in (0,1]; K = 1 is fBm, K = 1 and H = 1/2 is Brownian motion.
struct HurstParams {
  double h;
  double k;

  HurstParams(double h_, double k_) : h(h_), k(k_) {
    if (!(h > 0.0 && h < 1.0))
      throw std::invalid_argument("HurstParams: H must be in (0,1)");
    if (!(k > 0.0 && k <= 1.0))
      throw std::invalid_argument("HurstParams: K must be in (0,1]");
  }

  double hk() const { return h * k; }

  Regime regime() const {
    const double two_hk = 2.0 * h * k;
    if (two_hk < 1.0) return Regime::subcritical;
    if (two_hk > 1.0) return Regime::supercritical;
    return Regime::critical;
  }
};

/// Component-wise exponents of a d-dimensional bifBm with independent components.
struct MultiParams {
  std::vector<HurstParams> params;

  explicit MultiParams(std::vector<HurstParams> p) : params(std::move(p)) {
    if (params.empty())
      throw std::invalid_argument("MultiParams: need at least one component");
  }

  std::size_t dims() const { return params.size(); }

  double hk_star() const {
    double m = 0.0;
    for (const auto& p : params) m = std::max(m, p.hk());
    return m;
  }
};

inline std::string regime_name(Regime r) {
  switch (r) {
    case Regime::subcritical: return "subcritical";
    case Regime::critical: return "critical";
    default: return "supercritical";
  }
}

}  // namespace bifbm
