#include "bifbm/simulate.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

#include "bifbm/covariance.hpp"
#include "bifbm/rng.hpp"

namespace bifbm {

Eigen::MatrixXd covariance_matrix(const HurstParams& p, const TimeGrid& grid) {
  const auto& ts = grid.times();
  const Eigen::Index n = static_cast<Eigen::Index>(grid.steps());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double v = covariance(p, ts[static_cast<std::size_t>(i) + 1],
                                  ts[static_cast<std::size_t>(j) + 1]);
      m(i, j) = v;
      m(j, i) = v;
    }
  return m;
}

namespace {

// plain Cholesky, returns the failing pivot (or n on success)
std::size_t cholesky_pivot(const Eigen::MatrixXd& a) {
  const Eigen::Index n = a.rows();
  Eigen::MatrixXd l = a;
  for (Eigen::Index j = 0; j < n; ++j) {
    double d = l(j, j);
    for (Eigen::Index k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 0.0)) return static_cast<std::size_t>(j);
    const double sq = std::sqrt(d);
    l(j, j) = sq;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      double v = l(i, j);
      for (Eigen::Index k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
      l(i, j) = v / sq;
    }
  }
  return static_cast<std::size_t>(n);
}

}  // namespace

CholeskyFactor factorize(const Eigen::MatrixXd& matrix) {
  if (matrix.rows() != matrix.cols())
    throw std::invalid_argument("factorize: matrix must be square");
  const double max_diag = matrix.diagonal().maxCoeff();
  std::vector<double> jitters{0.0};
  for (double j = 1e-14; j <= 1.001e-8; j *= 10.0) jitters.push_back(j * max_diag);
  for (double jit : jitters) {
    Eigen::MatrixXd shifted = matrix;
    if (jit > 0.0) shifted.diagonal().array() += jit;
    Eigen::LLT<Eigen::MatrixXd> llt(shifted);
    if (llt.info() == Eigen::Success)
      return CholeskyFactor{Eigen::MatrixXd(llt.matrixL()), jit};
  }
  Eigen::MatrixXd shifted = matrix;
  shifted.diagonal().array() += jitters.back();
  throw NotPositiveSemidefinite(cholesky_pivot(shifted));
}

PathEnsemble sample_paths(const MultiParams& mp, const TimeGrid& grid, std::size_t n_paths,
                          std::uint64_t seed) {
  if (n_paths < 1) throw std::invalid_argument("sample_paths: n_paths must be >= 1");
  PathEnsemble ens{mp, grid, {}, seed, n_paths};
  const Eigen::Index n = static_cast<Eigen::Index>(grid.steps());
  const Eigen::Index np = static_cast<Eigen::Index>(n_paths);
  for (std::size_t d = 0; d < mp.dims(); ++d) {
    const CholeskyFactor fac = factorize(covariance_matrix(mp.params[d], grid));
    Eigen::MatrixXd z(n, np);
    for (Eigen::Index pth = 0; pth < np; ++pth) {
      NormalStream rng(seed, d, static_cast<std::uint64_t>(pth));
      for (Eigen::Index i = 0; i < n; ++i) z(i, pth) = rng.normal();
    }
    Eigen::MatrixXd vals(n + 1, np);
    vals.row(0).setZero();
    vals.bottomRows(n).noalias() = fac.lower * z;
    ens.values.push_back(std::move(vals));
  }
  return ens;
}

SelfSimilarityReport self_similarity_check(const HurstParams& p, double c, const TimeGrid& grid,
                                           std::size_t n_paths, std::uint64_t seed) {
  if (!(c > 0.0)) throw std::invalid_argument("self_similarity_check: c must be > 0");
  std::vector<double> scaled(grid.times());
  for (double& t : scaled) t *= c;
  const MultiParams mp({p});
  const PathEnsemble base = sample_paths(mp, grid, n_paths, seed);
  const PathEnsemble stretched = sample_paths(mp, TimeGrid(std::move(scaled)), n_paths, seed);

  SelfSimilarityReport rep{};
  rep.c = c;
  rep.expected_ratio = std::pow(c, 2.0 * p.hk());
  rep.max_standardized_discrepancy = 0.0;
  const Eigen::Index n = static_cast<Eigen::Index>(grid.steps());
  const double npd = static_cast<double>(n_paths);
  for (Eigen::Index i = 1; i <= n; ++i) {
    const auto row_b = base.dim(0).row(i);
    const auto row_s = stretched.dim(0).row(i);
    const double m2_b = row_b.array().square().mean();
    const double m2_s = row_s.array().square().mean();
    rep.variance_ratios.push_back(m2_s / m2_b);
    // Var of a second-moment estimate of N(0, v) is 2 v^2 / npaths
    const double diff = m2_s - rep.expected_ratio * m2_b;
    const double se = std::sqrt(2.0 * (m2_s * m2_s + rep.expected_ratio * rep.expected_ratio *
                                                         m2_b * m2_b) / npd);
    rep.max_standardized_discrepancy =
        std::max(rep.max_standardized_discrepancy, se > 0.0 ? std::abs(diff) / se : 0.0);
  }
  if (c == 1.0) rep.max_standardized_discrepancy = 0.0;
  return rep;
}

void dump_ensemble(const PathEnsemble& ens, const std::string& prefix) {
  for (std::size_t d = 0; d < ens.values.size(); ++d) {
    std::ofstream out(prefix + "_dim" + std::to_string(d) + ".csv");
    if (!out) throw std::runtime_error("dump_ensemble: cannot open output file");
    out << "path";
    for (double t : ens.grid.times()) {
      char buf[40];
      std::snprintf(buf, sizeof(buf), ",t=%.17g", t);
      out << buf;
    }
    out << "\n";
    const auto& m = ens.dim(d);
    for (Eigen::Index pth = 0; pth < m.cols(); ++pth) {
      out << pth;
      for (Eigen::Index i = 0; i < m.rows(); ++i) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), ",%.17g", m(i, pth));
        out << buf;
      }
      out << "\n";
    }
  }
  nlohmann::ordered_json meta;
  meta["seed"] = ens.seed;
  meta["n_paths"] = ens.n_paths;
  meta["grid"] = ens.grid.times();
  meta["h"] = nlohmann::json::array();
  meta["k"] = nlohmann::json::array();
  for (const auto& p : ens.params.params) {
    meta["h"].push_back(p.h);
    meta["k"].push_back(p.k);
  }
  std::ofstream meta_out(prefix + "_meta.json");
  if (!meta_out) throw std::runtime_error("dump_ensemble: cannot open sidecar file");
  meta_out << meta.dump(2) << "\n";
}

}  // namespace bifbm
