#include <cmath>
#include <fstream>
#include <random>

#include "doctest.h"
#include "wavefront/error.hpp"
#include "wavefront/grid_convolution.hpp"
#include "wavefront/kernel.hpp"
#include "wavefront/quadrature.hpp"

using namespace wavefront;

namespace {

bool close(cplx a, cplx b, double tol) { return std::abs(a - b) <= tol * (1.0 + std::abs(b)); }

// Brute-force oracle: truncated trapezoid sum of value(s) e^{-zs}.
cplx trapezoid_laplace(const KernelComponent& k, cplx z, double lo, double hi, int n) {
  const double h = (hi - lo) / n;
  cplx sum = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double s = lo + h * i;
    const double w = (i == 0 || i == n) ? 0.5 : 1.0;
    sum += w * k.value(s) * std::exp(-z * s);
  }
  return sum * h;
}

}  // namespace

TEST_CASE("gaussian transform") {
  const auto g = KernelComponent::gaussian(1.0);
  CHECK(g.laplace(1.0) == doctest::Approx(std::exp(0.5)).epsilon(1e-14));
  CHECK(std::abs(laplace_quadrature(g, cplx(1.0, 0.0)) - std::exp(0.5)) < 1e-10);
  // Independent route: plain trapezoid on [-12, 12].
  CHECK(std::abs(trapezoid_laplace(g, 1.0, -12.0, 13.0, 20000) - std::exp(0.5)) < 1e-7);
  const Strip s = g.abscissas();
  CHECK(std::isinf(s.sigma));
  CHECK(std::isinf(s.gamma));
}

TEST_CASE("one-sided exponential transform") {
  const double c = 1.0, beta = 0.0;
  const auto k = KernelComponent::exponential_onesided((1.0 + beta) / c, Direction::Right, 0.0, 1.0 / c);
  CHECK(k.laplace(0.0) == doctest::Approx(1.0));
  CHECK(k.laplace(0.5) == doctest::Approx(1.0 / 1.5).epsilon(1e-14));
  CHECK(k.abscissas().sigma == doctest::Approx(-1.0));
  CHECK(std::isinf(k.abscissas().gamma));
  CHECK_THROWS_AS(k.laplace(-1.5), Error);

  const auto left = KernelComponent::exponential_onesided(2.0, Direction::Left, 0.3);
  CHECK(std::isinf(left.abscissas().sigma));
  CHECK(left.abscissas().gamma == doctest::Approx(2.0));
  CHECK(std::abs(left.laplace(cplx(0.7, 1.3)) - laplace_quadrature(left, cplx(0.7, 1.3))) < 1e-10);
}

TEST_CASE("piecewise green strip and mass") {
  const auto g = KernelComponent::piecewise_green(2.5, 1.0);
  const Strip s = g.abscissas();
  CHECK(s.sigma == doctest::Approx((2.5 - std::sqrt(10.25)) / 2).epsilon(1e-14));
  CHECK(s.gamma == doctest::Approx((2.5 + std::sqrt(10.25)) / 2).epsilon(1e-14));
  CHECK(g.mass() == doctest::Approx(1.0).epsilon(1e-14));
  auto f = [&](double x) { return g.value(x); };
  CHECK(quad::integrate_pieces(f, -kInf, kInf, {0.0}).value == doctest::Approx(1.0).epsilon(1e-11));
  // nu, mu solve z^2 - c z - q = 0
  for (double z : {s.sigma, s.gamma}) CHECK(std::abs(z * z - 2.5 * z - 1.0) < 1e-13);

  const auto gk = GreenKernel::second_order(3.0, 2.0);
  CHECK(gk.sigma == doctest::Approx(gk.mu - gk.nu).epsilon(1e-14));
  CHECK(gk.nu * gk.mu == doctest::Approx(-2.0).epsilon(1e-14));
  CHECK(gk.as_kernel().mass() == doctest::Approx(gk.mass()).epsilon(1e-14));
}

TEST_CASE("closed forms agree with quadrature at random strip points") {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::vector<KernelComponent> kernels{
      KernelComponent::gaussian(1.0),
      KernelComponent::gaussian(0.4, -0.7, 2.0),
      KernelComponent::exponential_onesided(1.5, Direction::Right, 0.4),
      KernelComponent::exponential_onesided(0.8, Direction::Left, -0.2, 3.0),
      KernelComponent::piecewise_green(2.5, 1.0),
      KernelComponent::piecewise_green(-1.0, 2.0, 0.5),
  };
  for (const auto& k : kernels) {
    const Strip s = k.abscissas();
    const double lo = std::isfinite(s.sigma) ? s.sigma : -3.0;
    const double hi = std::isfinite(s.gamma) ? s.gamma : 3.0;
    for (int i = 0; i < 40; ++i) {
      const double x = lo + (0.05 + 0.9 * unit(rng)) * (hi - lo);
      const cplx z(x, -4.0 + 8.0 * unit(rng));
      const cplx closed = k.laplace(z);
      CHECK_MESSAGE(close(closed, laplace_quadrature(k, z), 1e-8), k.shape_name() << " at " << z);
    }
  }
}

TEST_CASE("real transform is positive and log-convex") {
  const auto k = KernelComponent::piecewise_green(2.5, 1.0);
  const double h = 1e-3;
  for (double x = -0.3; x < 2.8; x += 0.05) {
    const double l0 = std::log(k.laplace(x - h)), l1 = std::log(k.laplace(x)), l2 = std::log(k.laplace(x + h));
    CHECK(k.laplace(x) > 0.0);
    CHECK(l0 - 2 * l1 + l2 >= -1e-9);
  }
}

TEST_CASE("derivatives match finite differences") {
  const std::vector<KernelComponent> kernels{
      KernelComponent::gaussian(0.5, 0.3),
      KernelComponent::exponential_onesided(1.5, Direction::Right, 0.4),
      KernelComponent::exponential_onesided(1.5, Direction::Left, 0.4),
      KernelComponent::piecewise_green(2.0, 1.0, 0.7),
      KernelComponent::dirac_comb({-1.0, 0.5}, {0.3, 0.7}),
      KernelComponent::convolved(KernelComponent::gaussian(1.0), KernelComponent::piecewise_green(2.5, 1.0)),
  };
  for (const auto& k : kernels) {
    const double x = 0.4, h = 1e-5;
    const double fd = (k.laplace(x + h) - k.laplace(x - h)) / (2 * h);
    CHECK_MESSAGE(k.laplace_derivative(x) == doctest::Approx(fd).epsilon(1e-7), k.shape_name());
  }
}

TEST_CASE("dirac comb") {
  const auto d = KernelComponent::dirac_comb({-1.0, 0.0, 1.0}, {1.0, 1.0, 1.0});
  CHECK(std::isinf(d.abscissas().sigma));
  CHECK(std::isinf(d.abscissas().gamma));
  CHECK(d.laplace(0.3) == doctest::Approx(std::exp(0.3) + 1.0 + std::exp(-0.3)));
  CHECK(d.mass_above(0.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(d.value(0.0), Error);
  CHECK_THROWS_AS(KernelComponent::dirac_comb({0.0}, {-1.0}), Error);
}

TEST_CASE("convolve_green") {
  const auto green = GreenKernel::second_order(2.5, 1.0);
  SUBCASE("identity comb") {
    const auto conv = convolve_green(KernelComponent::dirac_comb({0.0}, {1.0}), green);
    const auto g = green.as_kernel();
    for (double s : {-2.0, -0.1, 0.3, 4.0}) CHECK(conv.value(s) == doctest::Approx(g.value(s)).epsilon(1e-14));
    CHECK(std::abs(conv.laplace(cplx(0.5, 0.2)) - g.laplace(cplx(0.5, 0.2))) < 1e-15);
  }
  SUBCASE("gaussian factor") {
    const auto k = KernelComponent::gaussian(1.0);
    const auto conv = convolve_green(k, green);
    CHECK(conv.laplace(0.5) == doctest::Approx(std::exp(0.125) / 2.0).epsilon(1e-14));
    CHECK(conv.mass() == doctest::Approx(1.0));
    const Strip s = conv.abscissas();
    CHECK(s.sigma == doctest::Approx(green.nu));
    CHECK(s.gamma == doctest::Approx(green.mu));
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
      const cplx z(green.nu + (0.05 + 0.9 * u(rng)) * (green.mu - green.nu), -3.0 + 6.0 * u(rng));
      CHECK(std::abs(conv.laplace(z) - k.laplace(z) * green.as_kernel().laplace(z)) <= 1e-8 * (1 + std::abs(conv.laplace(z))));
    }
    // Lazy pointwise value integrates back to the product transform.
    CHECK(std::abs(laplace_quadrature(conv, cplx(0.5, 0.0), 1e-10) - conv.laplace(0.5)) < 1e-8);
  }
  SUBCASE("disjoint strips") {
    // A comb whose declared (untruncated) strip lies right of the green strip.
    const auto comb = KernelComponent::dirac_comb({0.0}, {1.0}, Strip{5.0, kInf});
    CHECK_THROWS_AS(convolve_green(comb, green), Error);
    try {
      convolve_green(comb, green);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::EmptyStrip);
    }
  }
}

TEST_CASE("tabulated kernel") {
  std::vector<double> t, v;
  for (int i = 0; i <= 400; ++i) {
    const double s = -4.0 + 0.02 * i;
    t.push_back(s);
    v.push_back(std::exp(-0.5 * s * s) / std::sqrt(2 * M_PI));
  }
  const auto k = KernelComponent::tabulated(t, v);
  CHECK(k.abscissas().compact_support_surrogate);
  CHECK(k.mass() == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(k.laplace(0.5) == doctest::Approx(std::exp(0.125)).epsilon(1e-3));
  CHECK(k.value(5.0) == 0.0);

  const auto path = std::string(WAVEFRONT_TEST_DATA) + "/../../build_tmp_kernel.csv";
  {
    std::ofstream out(path);
    out << "# t,value\n";
    for (std::size_t i = 0; i < t.size(); ++i) out << t[i] << "," << v[i] << "\n";
  }
  const auto loaded = load_tabulated_csv(path);
  CHECK(loaded.mass() == doctest::Approx(k.mass()).epsilon(1e-5));
  std::remove(path.c_str());
  CHECK_THROWS_AS(KernelComponent::tabulated({0.0, 0.0}, {1.0, 1.0}), Error);
}

TEST_CASE("cauchy-hadamard estimate") {
  std::vector<double> b;
  for (int k = 1; k <= 60; ++k) b.push_back(std::pow(0.3, k));
  CHECK(cauchy_hadamard_gamma(b) == doctest::Approx(-std::log(0.3)).epsilon(1e-12));
  CHECK(std::isinf(cauchy_hadamard_gamma(std::vector<double>(10, 0.0))));
}

TEST_CASE("grid convolution matches direct quadrature") {
  const double h = 0.05;
  GridSignal f;
  f.t0 = -10.0;
  f.step = h;
  for (int i = 0; i < 400; ++i) {
    const double t = f.t(i);
    f.values.push_back(1.0 / (1.0 + std::exp(-t)) + 0.1 * std::sin(t));
  }
  f.right_value = f.values.back();
  const std::vector<KernelComponent> kernels{
      KernelComponent::exponential_onesided(1.3, Direction::Right, 0.37),
      KernelComponent::exponential_onesided(0.9, Direction::Left, -0.21, 2.0),
      KernelComponent::piecewise_green(2.5, 1.0, 1.234),
      KernelComponent::gaussian(0.7, 0.3),
      KernelComponent::dirac_comb({-1.0, 0.5}, {0.4, 0.6}),
  };
  for (const auto& k : kernels) {
    GridConvolution conv(k, h);
    const auto out = conv.apply(f);
    for (int i : {0, 57, 200, 333, 399}) {
      const double t = f.t(i);
      double direct;
      if (const auto* d = std::get_if<DiracComb>(&k.shape())) {
        direct = 0.0;
        for (std::size_t j = 0; j < d->offsets.size(); ++j) direct += d->weights[j] * f.at(t - d->offsets[j]);
      } else {
        // Direct route: \int K(s) f(t - s) ds with f the same piecewise-linear signal.
        std::vector<double> br = k.breakpoints();
        for (int j = -1; j <= 400; ++j) br.push_back(t - f.t(0) - h * j);
        auto [lo, hi] = k.support_window(1e-15);
        auto g = [&](double s) { return k.value(s) * f.at(t - s); };
        quad::Options o;
        o.rel_tol = 1e-11;
        o.max_segments = 100000;
        direct = quad::integrate_pieces(g, lo, hi, br, o).value;
      }
      CHECK_MESSAGE(out[i] == doctest::Approx(direct).epsilon(1e-8), k.shape_name() << " i=" << i);
    }
  }
}

TEST_CASE("sequential convolution of factors is second-order accurate") {
  // Each stage re-samples its output on the grid, so a product kernel is exact
  // only up to O(h^2). Interior points, away from the truncated left edge.
  const std::vector<KernelComponent> kernels{
      KernelComponent::convolved(KernelComponent::dirac_comb({-1.0, 1.0}, {1.0, 1.0}),
                                 KernelComponent::exponential_onesided(3.0, Direction::Right)),
      KernelComponent::convolved(KernelComponent::gaussian(1.0),
                                 KernelComponent::exponential_onesided(2.0, Direction::Right, 0.0, 1.0)),
  };
  auto signal = [](double t) { return 1.0 / (1.0 + std::exp(-t)) + 0.1 * std::sin(t); };
  for (const auto& k : kernels) {
    double errs[2];
    for (int level = 0; level < 2; ++level) {
      const double h = 0.05 / (1 << level);
      GridSignal f;
      f.t0 = -20.0;
      f.step = h;
      const int n = static_cast<int>(std::lround(30.0 / h)) + 1;
      for (int i = 0; i < n; ++i) f.values.push_back(signal(f.t(i)));
      f.right_value = f.values.back();
      const auto out = GridConvolution(k, h).apply(f);
      const int i = static_cast<int>(std::lround(20.0 / h));  // t = 0
      auto [lo, hi] = k.support_window(1e-15);
      auto g = [&](double s) { return k.value(s) * signal(-s); };
      quad::Options o;
      o.rel_tol = 1e-12;
      const double direct = quad::integrate_pieces(g, lo, hi, k.breakpoints(), o).value;
      errs[level] = std::abs(out[i] - direct);
    }
    CHECK_MESSAGE(errs[0] < 1e-4, k.shape_name());
    CHECK_MESSAGE(errs[1] < 0.35 * errs[0], k.shape_name());
  }
}
