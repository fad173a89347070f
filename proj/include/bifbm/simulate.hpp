#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bifbm/grid.hpp"
#include "bifbm/params.hpp"

namespace bifbm {

struct NotPositiveSemidefinite : std::runtime_error {
  std::size_t pivot;
  explicit NotPositiveSemidefinite(std::size_t pivot_)
      : std::runtime_error("matrix not positive semidefinite within jitter cap, pivot " +
                           std::to_string(pivot_)),
        pivot(pivot_) {}
};

/// Covariance matrix over the positive grid times (t = 0 row dropped).
Eigen::MatrixXd covariance_matrix(const HurstParams& p, const TimeGrid& grid);

struct CholeskyFactor {
  Eigen::MatrixXd lower;
  double jitter;  // absolute diagonal shift that was applied
};

/// Cholesky with escalating jitter, 1e-14..1e-8 times the max diagonal.
CholeskyFactor factorize(const Eigen::MatrixXd& matrix);

/// Sampled ensemble; values[d] is (grid.size() x n_paths), first row exactly 0.
struct PathEnsemble {
  MultiParams params;
  TimeGrid grid;
  std::vector<Eigen::MatrixXd> values;
  std::uint64_t seed;
  std::size_t n_paths;

  const Eigen::MatrixXd& dim(std::size_t d) const { return values.at(d); }
};

PathEnsemble sample_paths(const MultiParams& mp, const TimeGrid& grid, std::size_t n_paths,
                          std::uint64_t seed);

struct SelfSimilarityReport {
  double c;
  double max_standardized_discrepancy;
  std::vector<double> variance_ratios;  // empirical Var B_{ct_j} / Var B_{t_j}
  double expected_ratio;                // c^{2HK}
};

SelfSimilarityReport self_similarity_check(const HurstParams& p, double c, const TimeGrid& grid,
                                           std::size_t n_paths, std::uint64_t seed);

/// CSV matrix per dimension (row = path, column = grid time) plus a JSON
/// sidecar <prefix>_meta.json carrying params/seed/grid.
void dump_ensemble(const PathEnsemble& ens, const std::string& prefix);

}  // namespace bifbm
