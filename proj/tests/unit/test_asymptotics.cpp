#include <cmath>
#include <functional>
#include <optional>

#include "doctest.h"
#include "wavefront/asymptotics.hpp"
#include "wavefront/error.hpp"

using namespace wavefront;

namespace {

std::optional<ErrorCode> code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

void sample(const std::function<double(double)>& f, double lo, double hi, int n, std::vector<double>& t,
            std::vector<double>& v) {
  t.clear();
  v.clear();
  for (int i = 0; i < n; ++i) {
    t.push_back(lo + (hi - lo) * i / (n - 1));
    v.push_back(f(t.back()));
  }
}

// logistic sigmoid of height kappa
WaveProfile sigmoid_profile(double kappa, double rate, double shift, Grid g = Grid{}) {
  WaveProfile p;
  p.grid = g;
  p.plateau = kappa;
  for (int i = 0; i < g.n; ++i) p.values.push_back(kappa / (1.0 + std::exp(-rate * (g.t(i) - shift))));
  return p;
}

}  // namespace

TEST_CASE("pure exponential tail fits k = 0") {
  std::vector<double> t, v;
  sample([](double x) { return 3.0 * std::exp(0.5 * x); }, -60, -10, 500, t, v);
  const auto f = fit_decay(t, v, {-60, -10});
  CHECK(f.k_hat == 0);
  CHECK(f.lambda_hat == doctest::Approx(0.5).epsilon(1e-9));
  // 3 e^{0.5 t} = e^{0.5 (t - m)}
  CHECK(f.m == doctest::Approx(-2.0 * std::log(3.0)).epsilon(1e-8));
  CHECK(f.points == 500);
}

TEST_CASE("polynomially corrected tail fits k = 1") {
  std::vector<double> t, v;
  sample([](double x) { return (1.0 - x) * std::exp(x); }, -60, -5, 600, t, v);
  const auto f = fit_decay(t, v, {-60, -5});
  CHECK(f.k_hat == 1);
  CHECK(std::abs(f.lambda_hat - 1.0) < 1e-3);
  CHECK(f.residual_l2_k1 < 0.9 * f.residual_l2_k0);
}

TEST_CASE("fit input validation") {
  std::vector<double> t, v;
  sample([](double x) { return std::exp(x); }, -10, -5, 20, t, v);
  CHECK(code_of([&] { fit_decay(t, v, {-10, -5}); }) == ErrorCode::TailUnresolved);
  sample([](double x) { return x < -7 ? 0.0 : std::exp(x); }, -10, -5, 100, t, v);
  CHECK(code_of([&] { fit_decay(t, v, {-10, -5}); }) == ErrorCode::NonPositiveTail);
  // a profile that never decays below 0.01 kappa
  WaveProfile flat = sigmoid_profile(0.5, 0.01, 0.0);
  CHECK(code_of([&] { default_window(flat); }) == ErrorCode::TailUnresolved);
}

TEST_CASE("decay fit is translation equivariant") {
  const auto p0 = sigmoid_profile(0.5, 0.7, 0.0);
  const auto p1 = sigmoid_profile(0.5, 0.7, 4.0);
  const auto f0 = fit_decay(p0), f1 = fit_decay(p1);
  CHECK(f0.k_hat == 0);
  CHECK(f1.k_hat == 0);
  CHECK(f0.lambda_hat == doctest::Approx(0.7).epsilon(1e-3));
  CHECK(f1.lambda_hat == doctest::Approx(f0.lambda_hat).epsilon(1e-4));
  CHECK(f1.m - f0.m == doctest::Approx(4.0).epsilon(1e-3));
}

TEST_CASE("representation on synthetic two-term tails") {
  std::vector<double> t, v;
  sample([](double x) { return std::exp(0.5 * x) + std::exp(1.0 * x); }, -60, -5, 2000, t, v);
  const Window w{-60, -5};
  // r = e^{(0.5 - delta) t}: bounded at -inf iff delta <= 0.5
  const auto ok = check_representation(t, v, 0.5, 0, 1.0, 0.0, 0.25, w);
  CHECK(ok.pass);
  CHECK(ok.slope == doctest::Approx(0.25).epsilon(1e-6));
  const auto edge = check_representation(t, v, 0.5, 0, 1.0, 0.0, 0.5, w);
  CHECK(edge.bounded);
  const auto bad = check_representation(t, v, 0.5, 0, 1.0, 0.0, 0.75, w);
  CHECK_FALSE(bad.pass);
  CHECK(bad.slope == doctest::Approx(-0.25).epsilon(1e-6));

  sample([](double x) { return (2.0 - x) * std::exp(x) + std::exp(1.5 * x); }, -60, -5, 2000, t, v);
  CHECK(check_representation(t, v, 1.0, 1, 1.0, 2.0, 0.4, w).pass);
  // wrong a leaves an e^{lambda t} remainder
  CHECK_FALSE(check_representation(t, v, 1.0, 1, 1.0, 2.5, 0.4, w).pass);
}

TEST_CASE("psi integral of a sigmoid") {
  // \int_{-inf}^t kappa / (1 + e^{-s}) ds = kappa log(1 + e^t)
  const auto p = sigmoid_profile(0.5, 1.0, 0.0, Grid::make(-40, 30, 8192));
  const auto psi = psi_integral(p, 1.0);
  const double h = p.grid.step();
  for (int i = 0; i < p.grid.n; i += 97) {
    const double exact = 0.5 * std::log1p(std::exp(p.t(i)));
    CHECK(std::abs(psi[i] - exact) <= 1e-5 * std::max(1.0, exact) + h * h);
  }
  // psi is nondecreasing
  for (int i = 1; i < p.grid.n; ++i) CHECK(psi[i] >= psi[i - 1]);
}

TEST_CASE("psi integral uses the tail closure") {
  Grid g = Grid::make(-20, 20, 4096);
  WaveProfile p;
  p.grid = g;
  p.plateau = 1.0;
  p.closure = {1.0, 1, 1.0, 3.0};  // (3 - t) e^t
  for (int i = 0; i < g.n; ++i) p.values.push_back(std::min(1.0, p.closure(g.t(i))));
  const auto psi = psi_integral(p);
  // \int_{-inf}^{t} (3 - s) e^s ds = (4 - t) e^t
  const double t0 = g.t(0);
  CHECK(psi[0] == doctest::Approx((4.0 - t0) * std::exp(t0)).epsilon(1e-12));
  const int i = 1000;
  CHECK(psi[i] == doctest::Approx((4.0 - g.t(i)) * std::exp(g.t(i))).epsilon(1e-5));
}
