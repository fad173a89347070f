#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace bifbm {

/// Ordered evaluation times, always starting at 0.
class TimeGrid {
 public:
  explicit TimeGrid(std::vector<double> times) : times_(std::move(times)) {
    if (times_.empty() || times_.front() != 0.0)
      throw std::invalid_argument("TimeGrid: times must start at 0");
    for (std::size_t i = 1; i < times_.size(); ++i)
      if (!(times_[i] > times_[i - 1]))
        throw std::invalid_argument("TimeGrid: times must be strictly increasing");
  }

  /// Uniform grid {j t / n : j = 0..n}.
  static TimeGrid uniform(double t, std::size_t n) {
    if (!(t > 0.0) || n == 0)
      throw std::invalid_argument("TimeGrid::uniform: need t > 0 and n >= 1");
    std::vector<double> ts(n + 1);
    for (std::size_t j = 0; j <= n; ++j) ts[j] = static_cast<double>(j) * t / static_cast<double>(n);
    return TimeGrid(std::move(ts));
  }

  const std::vector<double>& times() const { return times_; }
  std::size_t size() const { return times_.size(); }
  std::size_t steps() const { return times_.size() - 1; }
  double horizon() const { return times_.back(); }
  double operator[](std::size_t i) const { return times_[i]; }

 private:
  std::vector<double> times_;
};

}  // namespace bifbm
