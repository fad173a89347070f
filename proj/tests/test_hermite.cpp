#include <doctest.h>

#include <cmath>

#include "bifbm/hermite.hpp"
#include "bifbm/quadrature.hpp"

using namespace bifbm;

TEST_CASE("gauss_kernel normalization and peak value") {
  CHECK(gauss_kernel(1.0, 0.0) == doctest::Approx(0.3989422804014327).epsilon(1e-12));
  const double mass = integrate_adaptive([](double y) { return gauss_kernel(2.0, y); },
                                         -40.0, 40.0, {});
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS(gauss_kernel(0.0, 1.0));
}

TEST_CASE("normalized Hermite values") {
  CHECK(hermite(0, 3.7) == doctest::Approx(1.0));
  CHECK(hermite(1, -0.4) == doctest::Approx(-0.4));
  CHECK(hermite(2, 0.0) == doctest::Approx(-0.5).epsilon(1e-14));   // (x^2-1)/2
  CHECK(hermite(3, 1.0) == doctest::Approx(-1.0 / 3.0).epsilon(1e-14));  // (x^3-3x)/6
}

TEST_CASE("Hermite recurrence against explicit low-order forms") {
  for (double x : {-2.3, -0.5, 0.0, 0.8, 1.9}) {
    CHECK(hermite(4, x) ==
          doctest::Approx((x * x * x * x - 6.0 * x * x + 3.0) / 24.0).epsilon(1e-12));
  }
}

TEST_CASE("orthogonality under the standard Gaussian: E H_n H_m = delta/n!") {
  CHECK(hermite_orthogonality(2, 2) == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(hermite_orthogonality(3, 1) == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(hermite_orthogonality(5, 5) == doctest::Approx(1.0 / 120.0).epsilon(1e-10));
  CHECK(hermite_orthogonality(6, 4) == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("hermite_gauss equals phi * H_n where both are representable") {
  const double phi0 = 0.3989422804014327;
  CHECK(hermite_gauss(2, 0.0) == doctest::Approx(-0.5 * phi0).epsilon(1e-12));
  for (double y : {-3.0, 0.7, 5.0}) {
    const double phi = phi0 * std::exp(-0.5 * y * y);
    CHECK(hermite_gauss(7, y) == doctest::Approx(phi * hermite(7, y)).epsilon(1e-10));
  }
  // bare H_40(60) overflows the naive product; the weighted form stays finite
  CHECK(std::isfinite(hermite_gauss(40, 60.0)));
  CHECK(hermite_gauss(40, 1e8) == 0.0);
}

TEST_CASE("mollifier limits") {
  const MollifierParam eps{1e-6};
  CHECK(mollifier_prime(eps, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(mollifier_prime(eps, -1.0) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(mollifier(eps, -2.0) == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(mollifier(eps, 0.0) == doctest::Approx(0.0));
  CHECK_THROWS(MollifierParam{0.0});
}

TEST_CASE("mollifier equals quadrature of its derivative") {
  const MollifierParam eps{0.05};
  for (double z : {-1.2, 0.3, 2.0}) {
    const double quad = integrate_adaptive(
        [&](double y) { return mollifier_prime(eps, y); }, 0.0, z, {});
    CHECK(mollifier(eps, z) == doctest::Approx(quad).epsilon(1e-10));
  }
}
