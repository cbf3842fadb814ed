#include "wavefront/models.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <sstream>

#include "wavefront/error.hpp"

namespace wavefront {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

[[noreturn]] void hypothesis(const std::string& what) {
  throw Error(ErrorCode::HypothesisViolation, what);
}

// Quantities that depend on the model but not on c.
struct Precomputed {
  double beta = 0.0;
  double lip_birth = 0.0;    // Lipschitz weight of the reproduction atom
  double inf_fprime = 0.0;   // nonlocal delayed RD only
};

double lattice_beta_sum(const NonlocalLattice& l) {
  return std::accumulate(l.beta.begin(), l.beta.end(), 0.0);
}

Precomputed precompute(const ModelSpec& m) {
  Precomputed p;
  const double M = m.bound;
  std::visit(overloaded{
                 [&](const LocalDelayedRD& f) { p.lip_birth = f.L > 0.0 ? f.L : f.g.gprime0(); },
                 [&](const NonlocalKPP& f) {
                   p.beta = beta_select_birth(f.g, M, m.beta_margin);
                   const auto gb = Nonlinearity::shifted(f.g, p.beta);
                   p.lip_birth = std::max(gb.gprime0(), gb.lipschitz_on(M));
                 },
                 [&](const NonlocalLattice& f) {
                   p.lip_birth = std::max(f.g.gprime0(), f.g.lipschitz_on(M));
                 },
                 [&](const NonlocalDelayedRD& f) {
                   p.beta = beta_select_damping(f.f, M, m.beta_margin);
                   p.lip_birth = std::max(f.g.gprime0(), f.g.lipschitz_on(M));
                   p.inf_fprime = f.f.derivative_range(0.0, 10.0 * M).inf;
                 },
             },
             m.family);
  return p;
}

ConvolutionProblem assemble(const ModelSpec& m, double c, const Precomputed& pre) {
  if (c == 0.0) throw Error(ErrorCode::ZeroSpeed, "stationary fronts (c = 0) are out of scope");
  if (c < 0.0 && !std::holds_alternative<NonlocalKPP>(m.family)) {
    hypothesis("negative speeds are supported for nonlocal_kpp only");
  }
  ConvolutionProblem p;
  p.family = m.family_name();
  p.c = c;
  p.bound = m.bound;
  p.beta_used = pre.beta;
  std::visit(
      overloaded{
          [&](const LocalDelayedRD& f) {
            auto K = KernelComponent::piecewise_green(c, 1.0, c * f.h);
            p.atoms.push_back({K, f.g, f.g.gprime0(), pre.lip_birth, "green*g"});
          },
          [&](const NonlocalKPP& f) {
            const double beta = pre.beta;
            const double rate = (1.0 + beta) / std::abs(c);
            const Direction dir = c > 0.0 ? Direction::Right : Direction::Left;
            auto k = KernelComponent::exponential_onesided(rate, dir, 0.0, 1.0 / std::abs(c));
            p.atoms.push_back({KernelComponent::convolved(k, f.J), Nonlinearity::identity(), 1.0, 1.0, "k*J"});
            const auto gb = Nonlinearity::shifted(f.g, beta);
            p.atoms.push_back({k, gb, gb.gprime0(), pre.lip_birth, "k*g_beta"});
          },
          [&](const NonlocalLattice& f) {
            const double rate = (2.0 * f.D + f.d) / c;
            auto H = KernelComponent::exponential_onesided(rate, Direction::Right, 0.0, 1.0 / c);
            auto neighbours = KernelComponent::dirac_comb({-1.0, 1.0}, {f.D, f.D});
            p.atoms.push_back({KernelComponent::convolved(neighbours, H), Nonlinearity::identity(), 1.0, 1.0,
                               "D(H_-1+H_1)"});
            std::vector<double> offsets(f.k.size());
            for (std::size_t i = 0; i < f.k.size(); ++i) offsets[i] = f.k[i] + c * f.r;
            std::optional<Strip> declared;
            if (f.declared_strip) {
              // The delay shift c r does not move the strip of the series.
              declared = f.declared_strip;
            }
            auto comb = KernelComponent::dirac_comb(offsets, f.beta, declared, f.truncation_error);
            p.atoms.push_back({KernelComponent::convolved(comb, H), f.g, f.g.gprime0(), pre.lip_birth,
                               "sum beta(k) H_{k+cr}"});
          },
          [&](const NonlocalDelayedRD& f) {
            const double beta = pre.beta;
            const auto green = GreenKernel::second_order(c, beta);
            KernelComponent kh = f.k;
            if (f.h != 0.0) kh = KernelComponent::convolved(KernelComponent::dirac_comb({c * f.h}, {1.0}), f.k);
            p.atoms.push_back({convolve_green(kh, green), f.g, f.g.gprime0(), pre.lip_birth, "green*k_h*g"});
            const auto fb = Nonlinearity::damping_shift(f.f, beta);
            p.atoms.push_back({green.as_kernel(), fb, fb.gprime0(), beta - pre.inf_fprime, "green*f_beta"});
          },
      },
      m.family);
  return p;
}

}  // namespace

std::string ModelSpec::family_name() const {
  return std::visit(overloaded{
                        [](const LocalDelayedRD&) { return std::string("local_delayed_rd"); },
                        [](const NonlocalKPP&) { return std::string("nonlocal_kpp"); },
                        [](const NonlocalLattice&) { return std::string("nonlocal_lattice"); },
                        [](const NonlocalDelayedRD&) { return std::string("nonlocal_delayed_rd"); },
                    },
                    family);
}

const Nonlinearity& ModelSpec::birth() const {
  return std::visit([](const auto& f) -> const Nonlinearity& { return f.g; }, family);
}

NonlocalLattice lattice_geometric(double D, double d, double r, double rho, const std::string& side,
                                  const Nonlinearity& g) {
  if (!(rho > 0.0 && rho < 1.0)) throw Error(ErrorCode::InvalidArgument, "geometric rho must lie in (0, 1)");
  const bool neg = side == "negative" || side == "both";
  const bool pos = side == "positive" || side == "both";
  if (!neg && !pos) throw Error(ErrorCode::InvalidArgument, "geometric side must be negative|positive|both");
  NonlocalLattice l{D, d, r, {}, {}, std::nullopt, 0.0, g};
  l.k.push_back(0.0);
  l.beta.push_back(1.0);
  double dropped = 0.0;
  for (int j = 1;; ++j) {
    const double w = std::pow(rho, j);
    if (w < 1e-15) {
      dropped = w / (1.0 - rho) * ((neg && pos) ? 2.0 : 1.0);
      break;
    }
    if (neg) {
      l.k.push_back(-j);
      l.beta.push_back(w);
    }
    if (pos) {
      l.k.push_back(j);
      l.beta.push_back(w);
    }
  }
  Strip s;
  // sum_j rho^j e^{j z} converges for z < -ln rho; e^{-j z} for z > ln rho.
  if (neg) s.gamma = -std::log(rho);
  if (pos) s.sigma = std::log(rho);
  l.declared_strip = s;
  l.truncation_error = dropped;
  return l;
}

CharacteristicFunction ConvolutionProblem::chi(WeightKind kind) const {
  std::vector<WeightedKernel> comps;
  for (const auto& a : atoms) {
    comps.push_back({a.kernel, kind == WeightKind::Derivative ? a.weight_derivative : a.weight_lipschitz});
  }
  return CharacteristicFunction(std::move(comps), kind);
}

double ConvolutionProblem::constant_map(double u) const {
  double sum = 0.0;
  for (const auto& a : atoms) sum += a.kernel.mass() * a.g(u);
  return sum;
}

const SpectralData& ConvolutionProblem::analyze(const RootOptions& opts) {
  spectral = real_roots(chi(WeightKind::Derivative), opts);
  return *spectral;
}

double beta_select_birth(const Nonlinearity& g, double M, double margin) {
  if (!(M > 0.0)) throw Error(ErrorCode::DegenerateRange, "bound M must be positive");
  const auto r = g.derivative_range(0.0, M);
  return std::max(0.0, (-r.inf - g.gprime0()) / 2.0) + margin;
}

double beta_select_damping(const Nonlinearity& f, double M, double margin) {
  if (!(M > 0.0)) throw Error(ErrorCode::DegenerateRange, "bound M must be positive");
  const auto on_range = f.derivative_range(0.0, M);
  const double inf_all = f.derivative_range(0.0, 10.0 * M).inf;
  double ratio = f.gprime0();
  const int samples = 10000;
  for (int i = 1; i <= samples; ++i) {
    const double s = M * i / samples;
    ratio = std::max(ratio, f(s) / s);
  }
  const double beta = std::max({f.gprime0(), ratio, 0.5 * (on_range.sup + inf_all)});
  return beta + margin;
}

void check_standing_hypothesis(const ModelSpec& m) {
  std::ostringstream msg;
  std::visit(overloaded{
                 [&](const LocalDelayedRD& f) {
                   if (!(f.g.gprime0() > 1.0)) {
                     msg << "local_delayed_rd requires g'(0) > 1 (got " << f.g.gprime0() << ")";
                     hypothesis(msg.str());
                   }
                   if (f.L > 0.0 && f.L < f.g.gprime0()) {
                     msg << "local_delayed_rd requires L >= g'(0) (got L = " << f.L << ")";
                     hypothesis(msg.str());
                   }
                   if (f.h < 0.0) hypothesis("local_delayed_rd requires h >= 0");
                 },
                 [&](const NonlocalKPP& f) {
                   if (!(1.0 - f.J.mass() < f.g.gprime0())) {
                     msg << "nonlocal_kpp requires 1 - \\int J < g'(0) (got \\int J = " << f.J.mass()
                         << ", g'(0) = " << f.g.gprime0() << ")";
                     hypothesis(msg.str());
                   }
                 },
                 [&](const NonlocalLattice& f) {
                   if (!(f.D > 0.0) || !(f.d > 0.0) || f.r < 0.0) {
                     hypothesis("nonlocal_lattice requires D > 0, d > 0, r >= 0");
                   }
                   if (!(f.g.gprime0() * lattice_beta_sum(f) > f.d)) {
                     msg << "nonlocal_lattice requires g'(0) sum beta(k) > d (got "
                         << f.g.gprime0() * lattice_beta_sum(f) << " <= " << f.d << ")";
                     hypothesis(msg.str());
                   }
                 },
                 [&](const NonlocalDelayedRD& f) {
                   if (!(f.h > 0.0)) hypothesis("nonlocal_delayed_rd requires h > 0");
                   if (!(f.g.gprime0() * f.k.mass() > f.f.gprime0())) {
                     msg << "nonlocal_delayed_rd requires g'(0) \\int k > f'(0) (got "
                         << f.g.gprime0() * f.k.mass() << " <= " << f.f.gprime0() << ")";
                     hypothesis(msg.str());
                   }
                   if (!(f.f.derivative_range(0.0, m.bound).inf > 0.0)) {
                     hypothesis("nonlocal_delayed_rd requires f strictly increasing on [0, M]");
                   }
                 },
             },
             m.family);
}

ConvolutionProblem to_convolution_form(const ModelSpec& m, double c) {
  check_standing_hypothesis(m);
  return assemble(m, c, precompute(m));
}

ConvolutionProblem to_convolution_form(const ModelSpec& m, double c, double beta) {
  check_standing_hypothesis(m);
  Precomputed pre = precompute(m);
  if (std::holds_alternative<NonlocalKPP>(m.family)) {
    const auto& f = std::get<NonlocalKPP>(m.family);
    pre.beta = beta;
    const auto gb = Nonlinearity::shifted(f.g, beta);
    pre.lip_birth = std::max(gb.gprime0(), gb.lipschitz_on(m.bound));
  } else if (std::holds_alternative<NonlocalDelayedRD>(m.family)) {
    pre.beta = beta;
  }
  return assemble(m, c, pre);
}

double model_beta(const ModelSpec& m) { return precompute(m).beta; }

cplx tilde_chi(const ModelSpec& m, cplx z, double c, WeightKind kind) {
  const Precomputed pre = precompute(m);
  const bool lip = kind == WeightKind::Lipschitz;
  return std::visit(
      overloaded{
          [&](const LocalDelayedRD& f) -> cplx {
            const double w = lip ? pre.lip_birth : f.g.gprime0();
            return 1.0 - w * std::exp(-z * f.h * c) / (1.0 + c * z - z * z);
          },
          [&](const NonlocalKPP& f) -> cplx {
            const double w = lip ? pre.lip_birth - pre.beta : f.g.gprime0();
            return 1.0 - w + c * z - f.J.laplace(z);
          },
          [&](const NonlocalLattice& f) -> cplx {
            const double w = lip ? pre.lip_birth : f.g.gprime0();
            cplx sum = 0.0;
            for (std::size_t i = 0; i < f.k.size(); ++i) sum += f.beta[i] * std::exp(-f.k[i] * z);
            return f.d + 2.0 * f.D + c * z - f.D * (std::exp(z) + std::exp(-z)) -
                   w * std::exp(-c * f.r * z) * sum;
          },
          [&](const NonlocalDelayedRD& f) -> cplx {
            const double w = lip ? pre.lip_birth : f.g.gprime0();
            const double fp = lip ? pre.inf_fprime : f.f.gprime0();
            return c * z - z * z + fp - w * std::exp(-z * c * f.h) * f.k.laplace(z);
          },
      },
      m.family);
}

cplx chi_denominator(const ModelSpec& m, cplx z, double c, double beta) {
  return std::visit(overloaded{
                        [&](const LocalDelayedRD&) -> cplx { return 1.0; },
                        [&](const NonlocalKPP&) -> cplx { return 1.0 + beta + c * z; },
                        [&](const NonlocalLattice& f) -> cplx { return 2.0 * f.D + f.d + c * z; },
                        [&](const NonlocalDelayedRD&) -> cplx { return beta + c * z - z * z; },
                    },
                    m.family);
}

CharacteristicFunction model_chi(const ModelSpec& m, double c, WeightKind kind) {
  return to_convolution_form(m, c).chi(kind);
}

namespace {

MinSpeed threshold_speed(const ModelSpec& m, WeightKind kind) {
  check_standing_hypothesis(m);
  const Precomputed pre = precompute(m);
  struct Cache {
    double c = std::numeric_limits<double>::quiet_NaN();
    std::optional<CharacteristicFunction> cf;
  };
  auto cache = std::make_shared<Cache>();
  auto cf_at = [=, &m](double c) -> const CharacteristicFunction& {
    if (!(cache->c == c)) {
      cache->cf = assemble(m, c, pre).chi(kind);
      cache->c = c;
    }
    return *cache->cf;
  };
  ModelChi f = [=](double z, double c) { return cf_at(c)(z); };
  ModelChi df = [=](double z, double c) { return cf_at(c).derivative(z); };
  auto gamma = [=](double c) { return cf_at(c).strip().gamma; };

  auto max_at = [&](double c) {
    const double g = gamma(c);
    if (!(g > 0.0)) return -kInf;
    return concave_max_on_strip([&](double z) { return f(z, c); }, [&](double z) { return df(z, c); }, g).value;
  };
  const double lo = 1e-6;
  double hi = 1.0;
  int guard = 0;
  while (max_at(hi) < 0.0) {
    hi *= 2.0;
    if (++guard > 60) throw Error(ErrorCode::BracketFailure, "no admissible speed below 2^60");
  }
  return min_speed(f, gamma, {lo, hi}, df);
}

}  // namespace

MinSpeed model_min_speed(const ModelSpec& m) { return threshold_speed(m, WeightKind::Derivative); }

MinSpeed uniqueness_speed(const ModelSpec& m) { return threshold_speed(m, WeightKind::Lipschitz); }

}  // namespace wavefront
