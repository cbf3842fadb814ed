#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <random>

#include "doctest.h"
#include "wavefront/error.hpp"
#include "wavefront/models.hpp"
#include "wavefront/wavesolver.hpp"

using namespace wavefront;

namespace {

ModelSpec local_model(double L = 2.0) { return ModelSpec{LocalDelayedRD{Nonlinearity::logistic(L), L, 0.0}}; }

const WaveProfile& noncritical_profile() {
  static const WaveProfile prof = [] {
    auto p = to_convolution_form(local_model(), 2.5);
    p.analyze();
    return solve_profile(p, Grid{});
  }();
  return prof;
}

std::optional<ErrorCode> code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

}  // namespace

TEST_CASE("grid validation") {
  CHECK_NOTHROW(Grid::make(-10, 10, 64));
  CHECK(code_of([] { Grid::make(1, 10, 100); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { Grid::make(-10, -1, 100); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { Grid::make(-10, 10, 10); }) == ErrorCode::InvalidArgument);
  const Grid g = Grid::make(-60, 40, 4096);
  CHECK(g.t(0) == -60.0);
  CHECK(g.t(4095) == doctest::Approx(40.0).epsilon(1e-14));
}

TEST_CASE("plateau of the local logistic model") {
  auto p = to_convolution_form(local_model(), 2.5);
  CHECK(plateau(p) == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("constant states are fixed points of the discrete operator") {
  auto p = to_convolution_form(local_model(), 2.5);
  const Grid g = Grid::make(-30, 30, 1024);
  WaveProfile phi;
  phi.grid = g;
  for (double u : {0.0, 0.5}) {
    phi.values.assign(g.n, u);
    TailClosure cl;
    WaveOperator op(p, g, 120.0);
    // constant left closure through a flat exponential
    cl.lambda = 0.0;
    cl.A = u;
    const auto out = op.apply(phi.values, cl);
    for (int i = 0; i < g.n; ++i) CHECK(out[i] == doctest::Approx(u).epsilon(1e-9));
  }
}

TEST_CASE("zero init gives NoWave") {
  auto p = to_convolution_form(local_model(), 2.5);
  p.analyze();
  CHECK(code_of([&] { solve_profile(p, Grid::make(-30, 30, 512), Init::zero()); }) == ErrorCode::NoWave);
}

TEST_CASE("no wave below the minimal speed") {
  auto p = to_convolution_form(local_model(), 1.0);
  CHECK(code_of([&] { p.analyze(); }) == ErrorCode::NoRoots);
  CHECK(code_of([&] { solve_profile(p, Grid{}, Init::capped_exponential(1.0)); }) == ErrorCode::NoWave);
}

TEST_CASE("capped exponential init needs a rate") {
  auto p = to_convolution_form(local_model(), 1.0);
  CHECK(code_of([&] { solve_profile(p, Grid{}); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("noncritical solve converges to a monotone nonnegative front") {
  const auto& prof = noncritical_profile();
  auto p = to_convolution_form(local_model(), 2.5);
  CHECK(prof.convergence.converged);
  CHECK(prof.plateau == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(residual(p, prof) < 1e-8);
  CHECK(std::abs(prof.values.back() - 0.5) < 1e-4);
  CHECK(*std::min_element(prof.values.begin(), prof.values.end()) >= 0.0);
  // increasing on the left tail
  const int mid = prof.grid.n / 3;
  for (int i = 1; i < mid; ++i) CHECK(prof.values[i] > prof.values[i - 1]);
  // tail closure rate is the grid-consistent zero near lambda_l
  CHECK(prof.closure.active());
  CHECK(std::abs(prof.closure.lambda - 0.5) < 1e-3);
}

TEST_CASE("the capped exponential is an upper solution") {
  // N[min(e^{lambda t}, kappa)] <= min(e^{lambda t}, kappa) for g(u) <= g'(0) u
  auto p = to_convolution_form(local_model(), 2.5);
  p.analyze();
  const Grid g = Grid::make(-40, 40, 2048);
  WaveProfile phi;
  phi.grid = g;
  for (int i = 0; i < g.n; ++i) phi.values.push_back(std::min(std::exp(0.5 * g.t(i)), 0.5));
  const auto out = apply_operator(p, phi);
  for (int i = 0; i < g.n; ++i) CHECK(out[i] <= phi.values[i] + 1e-6);
}

TEST_CASE("a spike is far from a fixed point") {
  auto p = to_convolution_form(local_model(), 2.5);
  const Grid g = Grid::make(-30, 30, 1024);
  WaveProfile phi;
  phi.grid = g;
  phi.values.assign(g.n, 0.0);
  phi.values[g.n / 2] = 0.5;
  CHECK(residual(p, phi) >= 0.05);
}

TEST_CASE("grid refinement changes the profile little") {
  auto p = to_convolution_form(local_model(), 2.5);
  p.analyze();
  const auto coarse = solve_profile(p, Grid::make(-60, 40, 2048));
  const auto& fine = noncritical_profile();
  // compare after aligning the kappa/2 crossings
  const double s = *fine.crossing(0.25) - *coarse.crossing(0.25);
  double diff = 0.0;
  for (int i = 0; i < fine.grid.n; i += 7) {
    const double t = fine.t(i);
    if (t < -40 || t > 30) continue;
    diff = std::max(diff, std::abs(fine.values[i] - coarse.at(t - s)));
  }
  CHECK(diff < 1e-3);
}

TEST_CASE("solves are translation covariant") {
  auto p = to_convolution_form(local_model(), 2.5);
  p.analyze();
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> sd(-5.0, 5.0);
  const auto& base = noncritical_profile();
  for (int rep = 0; rep < 2; ++rep) {
    Init init = Init::capped_exponential();
    init.shift = sd(rng);
    const auto prof = solve_profile(p, Grid{}, init);
    const double s = *prof.crossing(0.25) - *base.crossing(0.25);
    double diff = 0.0;
    for (int i = 0; i < base.grid.n; i += 5) {
      const double t = base.t(i);
      if (t < -45 || t > 25) continue;
      diff = std::max(diff, std::abs(base.values[i] - prof.at(t + s)));
    }
    CHECK(diff < 1e-3);
  }
}

TEST_CASE("solver options are validated") {
  auto p = to_convolution_form(local_model(), 2.5);
  p.analyze();
  SolveOptions o;
  o.damping = 0.0;
  CHECK(code_of([&] { solve_profile(p, Grid{}, {}, o); }) == ErrorCode::InvalidArgument);
  o.damping = 0.5;
  o.max_iter = 3;
  try {
    solve_profile(p, Grid{}, {}, o);
    FAIL("expected MaxIterError");
  } catch (const MaxIterError& e) {
    CHECK(e.code() == ErrorCode::MaxIterExceeded);
    CHECK(e.profile().values.size() == 4096u);
    CHECK(e.profile().convergence.iterations == 3);
    CHECK_FALSE(e.profile().convergence.converged);
  }
}

TEST_CASE("warm start from a previous profile converges immediately") {
  auto p = to_convolution_form(local_model(), 2.5);
  p.analyze();
  const auto& base = noncritical_profile();
  const auto again = solve_profile(p, base.grid, Init::previous(base));
  CHECK(again.convergence.iterations < 50);
}

TEST_CASE("nonlocal families solve above their minimal speed") {
  SUBCASE("KPP") {
    ModelSpec m{NonlocalKPP{KernelComponent::gaussian(1.0), Nonlinearity::logistic(2.0)}};
    m.bound = 1.5;
    auto p = to_convolution_form(m, 3.0);
    p.analyze();
    const auto prof = solve_profile(p, Grid{});
    CHECK(prof.plateau == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(residual(p, prof) < 1e-8);
    CHECK(*std::min_element(prof.values.begin(), prof.values.end()) >= 0.0);
  }
  SUBCASE("lattice") {
    ModelSpec m{NonlocalLattice{1.0, 1.0, 0.0, {0.0}, {1.0}, std::nullopt, 0.0, Nonlinearity::logistic(2.0)}};
    auto p = to_convolution_form(m, 2.5);
    p.analyze();
    const auto prof = solve_profile(p, Grid{});
    CHECK(prof.plateau == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(residual(p, prof) < 1e-8);
  }
}
