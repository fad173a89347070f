#pragma once

#include <cmath>
#include <cstdint>

namespace bifbm {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Deterministic substream keyed by (master seed, dimension, path).
/// Normal variates come from Box-Muller on explicit doubles, so output is
/// stable across standard libraries.
class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::uint64_t dim, std::uint64_t path) {
    std::uint64_t s = seed;
    (void)splitmix64(s);
    s ^= (dim + 1) * 0xA24BAED4963EE407ULL;
    (void)splitmix64(s);
    s ^= (path + 1) * 0x9FB21C651E98DF25ULL;
    (void)splitmix64(s);
    state_ = s;
  }

  double uniform() {
    // (0,1], never exactly 0 so log() below is safe
    return (static_cast<double>(splitmix64(state_) >> 11) + 1.0) * 0x1.0p-53;
  }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace bifbm
