#include <doctest.h>

#include <cmath>

#include "bifbm/calculus.hpp"
#include "bifbm/covariance.hpp"

using namespace bifbm;

namespace {

TestFunction quadratic() {
  return {[](double z) { return z * z; }, [](double z) { return 2.0 * z; },
          [](double) { return 2.0; }};
}

TestFunction cosine() {
  return {[](double z) { return std::cos(z); }, [](double z) { return -std::sin(z); },
          [](double z) { return -std::cos(z); }};
}

PathEnsemble make_ensemble(const HurstParams& p, double t, std::size_t n, std::size_t paths,
                           std::uint64_t seed) {
  return sample_paths(MultiParams{{p}}, TimeGrid::uniform(t, n), paths, seed);
}

}  // namespace

TEST_CASE("TestFunction::validate catches a wrong derivative") {
  auto good = quadratic();
  CHECK_NOTHROW(good.validate());
  TestFunction bad{[](double z) { return z * z; }, [](double z) { return 3.0 * z; },
                   [](double) { return 2.0; }};
  CHECK_THROWS(bad.validate());
}

TEST_CASE("expected_qv: h-sum route equals variogram route in the critical regime") {
  const HurstParams p{0.8, 0.625};
  for (std::size_t n : {64, 256, 1024}) {
    CHECK(expected_qv(p, 1.0, n) ==
          doctest::Approx(expected_qv_h_route(p, 1.0, n)).epsilon(1e-12));
  }
  CHECK_THROWS(expected_qv_h_route({0.6, 0.8}, 1.0, 64));
}

TEST_CASE("expected_qv tends to t 2^{1-K} in the critical regime") {
  const HurstParams p{0.8, 0.625};
  const double limit = std::pow(2.0, 1.0 - p.k);
  double prev_gap = 1e9;
  for (std::size_t n = 64; n <= 16384; n *= 4) {
    const double gap = std::abs(expected_qv(p, 1.0, n) - limit);
    CHECK(gap < prev_gap);
    prev_gap = gap;
  }
  CHECK(prev_gap < 1e-3);
}

TEST_CASE("increment_cov_theta: closed form matches covariance telescoping") {
  const HurstParams p{0.8, 0.625};
  const std::size_t n = 64;
  const auto grid = TimeGrid::uniform(1.0, n);
  const auto& tt = grid.times();
  for (auto [i, j] : {std::pair<std::size_t, std::size_t>{3, 10}, {1, 1}, {30, 31}, {64, 2}}) {
    const double tele = covariance(p, tt[i], tt[j]) - covariance(p, tt[i], tt[j - 1]) -
                        covariance(p, tt[i - 1], tt[j]) + covariance(p, tt[i - 1], tt[j - 1]);
    CHECK(increment_cov_theta(p, 1.0, n, i, j) == doctest::Approx(tele).epsilon(1e-11));
  }
}

TEST_CASE("critical trace constants split HK = 1/2") {
  const HurstParams p{0.8, 0.625};
  const auto [a, b] = critical_trace_constants(p);
  CHECK(b == doctest::Approx(std::pow(2.0, -p.k)).epsilon(1e-14));
  CHECK(a + b == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("deterministic Ito residual vanishes for polynomials and cos") {
  for (auto p : {HurstParams{0.75, 0.8}, HurstParams{0.8, 0.625}, HurstParams{0.7, 0.8}}) {
    CHECK(ito_deterministic_residual(p, quadratic(), 1.0) < 1e-10);
    CHECK(ito_deterministic_residual(p, cosine(), 1.0) < 1e-8);
  }
}

TEST_CASE("time-dependent Ito residual vanishes for f(s,x) = s x^2") {
  TestFunction tf;
  tf.ft = [](double s, double z) { return s * z * z; };
  tf.ft_s = [](double, double z) { return z * z; };
  tf.ft_x = [](double s, double z) { return 2.0 * s * z; };
  tf.ft_xx = [](double s, double) { return 2.0 * s; };
  CHECK(ito_deterministic_residual({0.75, 0.8}, tf, 1.0) < 1e-6);
  CHECK(ito_deterministic_residual({0.8, 0.625}, tf, 1.0) < 1e-6);
}

TEST_CASE("skorohod estimate is centered for f' = x") {
  const HurstParams p{0.75, 0.8};
  const auto ens = make_ensemble(p, 1.0, 256, 4000, 21);
  const Eigen::VectorXd est = skorohod_estimate(ens, quadratic(), 1.0);
  // quadratic has f' = 2x; divergence of a linear integrand is centered
  const auto mc = mc_mean(est);
  CHECK(std::abs(mc.mean) < 3.0 * mc.standard_error);
}

TEST_CASE("pathwise Ito residual shrinks with the grid") {
  const HurstParams p{0.75, 0.8};
  TestFunction cubic{[](double z) { return z * z * z; }, [](double z) { return 3.0 * z * z; },
                     [](double z) { return 6.0 * z; }};
  const double coarse = ito_pathwise_residual(make_ensemble(p, 1.0, 64, 600, 3), cubic, 1.0)
                            .l2_error;
  const double fine = ito_pathwise_residual(make_ensemble(p, 1.0, 1024, 600, 3), cubic, 1.0)
                          .l2_error;
  CHECK(fine < coarse);
}

TEST_CASE("weighted local time mean: closed form at x = 0 and MC agreement") {
  const HurstParams p{0.75, 0.8};
  CHECK(weighted_local_time_mean(p, 1.0, 0.0) ==
        doctest::Approx(0.7978845608028654).epsilon(1e-10));

  const auto ens = make_ensemble(p, 1.0, 512, 3000, 31);
  const double eps = 1e-2;
  const auto lt = weighted_local_time(ens, 0.0, eps);
  CHECK(std::abs(lt.mean - weighted_local_time_mean(p, 1.0, 0.0, eps)) <
        3.0 * lt.standard_error + 0.01);
}

TEST_CASE("occupation identity: g = 1 recovers t^{2HK} exactly per path") {
  const HurstParams p{0.75, 0.8};
  const auto ens = make_ensemble(p, 1.0, 256, 50, 41);
  const auto chk = occupation_identity_check(ens, [](double) { return 1.0; }, 1e-2);
  CHECK(chk.max_relative_error < 1e-2);
}

TEST_CASE("occupation identity: Gaussian bump within 2%") {
  const HurstParams p{0.8, 0.625};
  const auto ens = make_ensemble(p, 1.0, 2048, 40, 43);
  auto bump = [](double y) { return std::exp(-y * y); };
  const auto chk = occupation_identity_check(ens, bump, 1e-3);
  CHECK(chk.mean_relative_error < 0.02);
}

TEST_CASE("mollified Tanaka residual is small and terms balance") {
  const HurstParams p{0.75, 0.8};
  const auto ens = make_ensemble(p, 1.0, 512, 1500, 47);
  const auto res = tanaka_residual(ens, 0.0, 1e-2);
  CHECK(res.l2_error < 0.1);
  CHECK(res.mean_mollified_value ==
        doctest::Approx(res.mean_local_time + res.mean_skorohod).epsilon(0.2));
}

TEST_CASE("large-eps Tanaka residual is tiny: every term is smooth") {
  const HurstParams p{0.75, 0.8};
  const auto ens = make_ensemble(p, 1.0, 1024, 400, 53);
  const auto res = tanaka_residual(ens, 0.0, 100.0);
  CHECK(res.l2_error < 1e-3);
}
