#include <cmath>
#include <random>

#include "doctest.h"
#include "wavefront/charfun.hpp"
#include "wavefront/error.hpp"
#include "wavefront/kernel.hpp"

using namespace wavefront;

namespace {

// chi(z) = 1 - L e^{-zhc} / (1 + cz - z^2) as a one-atom problem.
CharacteristicFunction local_chi(double c, double L, double h = 0.0) {
  return CharacteristicFunction({{KernelComponent::piecewise_green(c, 1.0, c * h), L}});
}

cplx local_closed(cplx z, double c, double L) { return 1.0 - L / (1.0 + c * z - z * z); }

}  // namespace

TEST_CASE("chi values") {
  CHECK(local_chi(2.5, 2.0)(0.0) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(std::abs(local_chi(2.5, 2.0)(0.5)) < 1e-13);
  const cplx z(1.0, 1.0);
  const cplx v = local_chi(2.5, 2.0)(z);
  CHECK(std::abs(v - local_closed(z, 2.5, 2.0)) < 1e-13);
  CHECK(std::abs(v) > 0.1);
  CHECK_THROWS_AS(local_chi(2.5, 2.0)(cplx(10.0, 0.0)), Error);
}

TEST_CASE("real roots: dichotomy of the local model") {
  SUBCASE("noncritical") {
    const auto sd = real_roots(local_chi(2.5, 2.0));
    CHECK(sd.lambda_l == doctest::Approx(0.5).epsilon(1e-10));
    REQUIRE(sd.lambda_r.has_value());
    CHECK(*sd.lambda_r == doctest::Approx(2.0).epsilon(1e-10));
    CHECK_FALSE(sd.critical);
    CHECK(sd.gamma_K > 2.0);
  }
  SUBCASE("critical") {
    const auto sd = real_roots(local_chi(2.0, 2.0));
    CHECK(sd.critical);
    CHECK(sd.lambda_l == doctest::Approx(1.0).epsilon(1e-4));
  }
  SUBCASE("no roots") {
    try {
      real_roots(local_chi(1.0, 2.0));
      FAIL("expected NoRoots");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NoRoots);
    }
  }
  SUBCASE("chi(0) >= 0 is rejected") {
    CHECK_THROWS_AS(real_roots(local_chi(2.5, 0.5)), Error);
  }
}

TEST_CASE("real roots vanish and are ordered") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> cd(2.1, 6.0), Ld(1.5, 5.0);
  for (int i = 0; i < 30; ++i) {
    const double L = Ld(rng);
    const double c = 2.0 * std::sqrt(L - 1.0) + cd(rng) - 2.0;
    const auto cf = local_chi(c, L);
    const auto sd = real_roots(cf);
    CHECK(std::abs(cf(sd.lambda_l)) < 1e-10);
    REQUIRE(sd.lambda_r.has_value());
    CHECK(std::abs(cf(*sd.lambda_r)) < 1e-10);
    CHECK(sd.lambda_l <= *sd.lambda_r);
    CHECK(sd.lambda_l <= sd.gamma_K);
    // oracle: roots of z^2 - cz + L - 1
    const double disc = std::sqrt(c * c - 4.0 * (L - 1.0));
    CHECK(sd.lambda_l == doctest::Approx((c - disc) / 2.0).epsilon(1e-9));
  }
}

TEST_CASE("concavity on random triples") {
  std::mt19937_64 rng(11);
  const auto cf = CharacteristicFunction({{KernelComponent::gaussian(1.0), 1.0},
                                          {KernelComponent::exponential_onesided(2.0, Direction::Right), 2.0}});
  const double gamma = cf.strip().gamma;
  std::uniform_real_distribution<double> xd(-1.5, std::min(gamma - 1e-3, 4.0));
  for (int i = 0; i < 100; ++i) {
    double x[3] = {xd(rng), xd(rng), xd(rng)};
    std::sort(x, x + 3);
    if (x[2] - x[0] < 1e-6) continue;
    const double w = (x[1] - x[0]) / (x[2] - x[0]);
    const double chord = (1.0 - w) * cf(x[0]) + w * cf(x[2]);
    CHECK(cf(x[1]) >= chord - 1e-9);
    const double h = 1e-4;
    const double second = (cf(x[1] + h) - 2.0 * cf(x[1]) + cf(x[1] - h)) / (h * h);
    CHECK(second < 0.0);
  }
}

TEST_CASE("min speed of the local model") {
  const double L = 2.0;
  ModelChi f = [&](double z, double c) { return local_chi(c, L)(z); };
  auto gamma = [](double c) { return (c + std::sqrt(c * c + 4.0)) / 2.0; };
  const auto ms = min_speed(f, gamma, {1.0, 4.0});
  CHECK(ms.c_star == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(ms.z_star == doctest::Approx(1.0).epsilon(1e-6));
  CHECK_THROWS_AS(min_speed(f, gamma, {3.0, 4.0}), Error);

  // coherence with real_roots
  CHECK(real_roots(local_chi(ms.c_star, L)).critical);
  const auto sd = real_roots(local_chi(1.1 * ms.c_star, L));
  CHECK_FALSE(sd.critical);
  CHECK(sd.lambda_l < *sd.lambda_r);
}

TEST_CASE("strip zero scan") {
  const auto cf = local_chi(2.5, 2.0);
  const auto sd = real_roots(cf);
  const auto rep = strip_zero_scan(cf, sd);
  CHECK(rep.pass);
  CHECK(rep.min_abs_chi > 1e-3);
  CHECK(rep.boundary_min_abs_chi > 0.0);
  CHECK(rep.x_min == doctest::Approx(0.501));
  CHECK(rep.x_max == doctest::Approx(1.999));
  // oracle: the closed form on an independent grid
  double brute = kInf;
  for (int i = 0; i <= 200; ++i) {
    for (int j = 0; j <= 400; ++j) {
      const cplx z(0.501 + 1.498 * i / 200.0, -50.0 + 100.0 * j / 400.0);
      if (std::abs(z.imag()) < 1e-3) continue;
      brute = std::min(brute, std::abs(local_closed(z, 2.5, 2.0)));
    }
  }
  CHECK(brute > 1e-3);
  CHECK(rep.min_abs_chi <= brute + 1e-12);

  ScanOptions empty;
  empty.y_max = 0.0;
  const auto e = strip_zero_scan(cf, sd, empty);
  CHECK(e.empty);
  CHECK(e.pass);
}

TEST_CASE("chi1 margin") {
  const auto cf = local_chi(2.5, 2.0);
  const auto sd = real_roots(cf);
  const auto m = chi1_margin(cf, sd);
  REQUIRE(m.has_value());
  CHECK(m->m == doctest::Approx(1.25).epsilon(1e-7));
  CHECK(m->value == doctest::Approx(1.0 - 2.0 / 2.5625).epsilon(1e-10));

  // subtangential: chi1 = chi, nonnegative max exists iff chi has a root
  const auto critical = local_chi(2.0, 2.0);
  const auto sdc = real_roots(critical);
  const auto mc = chi1_margin(critical, sdc);
  REQUIRE(mc.has_value());
  CHECK(mc->value >= 0.0);

  // c = 1: chi1 negative throughout (sd borrowed from the c = 2.5 strip)
  CHECK_FALSE(chi1_margin(local_chi(1.0, 2.0), sd).has_value());
}

TEST_CASE("dominance of lipschitz weights") {
  const auto cf = local_chi(3.0, 2.0);
  const auto cf1 = local_chi(3.0, 2.6);
  for (double x = 0.0; x < 3.0; x += 0.05) CHECK(cf1(x) <= cf(x));
}
