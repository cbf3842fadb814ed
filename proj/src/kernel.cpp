#include "wavefront/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>

#include "wavefront/error.hpp"
#include "wavefront/quadrature.hpp"

namespace wavefront {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::InvalidKernel, what); }

double tabulated_value(const Tabulated& tab, double s) {
  const auto& t = tab.t;
  if (s < t.front() || s > t.back()) return 0.0;
  auto it = std::upper_bound(t.begin(), t.end(), s);
  if (it == t.end()) return tab.values.back();
  const std::size_t j = static_cast<std::size_t>(it - t.begin());
  const std::size_t i = j - 1;
  const double w = (s - t[i]) / (t[j] - t[i]);
  return (1.0 - w) * tab.values[i] + w * tab.values[j];
}

double trapezoid_mass(const Tabulated& tab) {
  double m = 0.0;
  for (std::size_t i = 0; i + 1 < tab.t.size(); ++i) {
    m += 0.5 * (tab.values[i] + tab.values[i + 1]) * (tab.t[i + 1] - tab.t[i]);
  }
  return m;
}

// \int_{x}^{inf} of the piecewise-linear interpolant.
double tabulated_mass_above(const Tabulated& tab, double x) {
  const auto& t = tab.t;
  if (x <= t.front()) return trapezoid_mass(tab);
  if (x >= t.back()) return 0.0;
  double m = 0.0;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    const double a = std::max(t[i], x);
    const double b = t[i + 1];
    if (b <= a) continue;
    m += 0.5 * (tabulated_value(tab, a) + tabulated_value(tab, b)) * (b - a);
  }
  return m;
}

void check_in_strip(const Strip& strip, cplx z) {
  if (!strip.contains(z.real())) {
    std::ostringstream msg;
    msg << "Re z = " << z.real() << " outside (" << strip.sigma << ", " << strip.gamma << ")";
    throw Error(ErrorCode::OutOfStrip, msg.str());
  }
}

}  // namespace

Strip intersect(const Strip& a, const Strip& b) {
  return Strip{std::max(a.sigma, b.sigma), std::min(a.gamma, b.gamma),
               a.compact_support_surrogate || b.compact_support_surrogate};
}

KernelComponent::KernelComponent(Shape shape) : shape_(std::move(shape)) {
  mass_ = std::visit(
      overloaded{
          [](const Gaussian& g) { return g.mass; },
          [](const OneSidedExponential& e) { return e.amplitude / e.rate; },
          [](const PiecewiseGreen& g) { return 1.0 / g.q; },
          [](const DiracComb& d) { return std::accumulate(d.weights.begin(), d.weights.end(), 0.0); },
          [](const Tabulated& t) { return trapezoid_mass(t); },
          [](const Convolved& c) { return c.first->mass() * c.second->mass(); },
      },
      shape_);
  if (!(mass_ > 0.0) || !std::isfinite(mass_)) invalid("kernel mass must be positive and finite");
}

KernelComponent KernelComponent::gaussian(double variance, double mean, double mass) {
  if (!(variance > 0.0)) invalid("gaussian variance must be positive");
  if (!(mass > 0.0)) invalid("gaussian mass must be positive");
  return KernelComponent(Gaussian{variance, mean, mass});
}

KernelComponent KernelComponent::exponential_onesided(double rate, Direction direction,
                                                      double shift,
                                                      std::optional<double> amplitude) {
  if (!(rate > 0.0)) invalid("exponential rate must be positive");
  const double amp = amplitude.value_or(rate);
  if (!(amp > 0.0)) invalid("exponential amplitude must be positive");
  return KernelComponent(OneSidedExponential{amp, rate, direction, shift});
}

KernelComponent KernelComponent::piecewise_green(double c, double q, double shift) {
  const auto g = GreenKernel::second_order(c, q, shift);
  return KernelComponent(PiecewiseGreen{g.c, g.q, g.shift, g.nu, g.mu, g.sigma});
}

KernelComponent KernelComponent::dirac_comb(std::vector<double> offsets,
                                            std::vector<double> weights,
                                            std::optional<Strip> declared_strip,
                                            double truncation_error) {
  if (offsets.size() != weights.size() || offsets.empty()) {
    invalid("dirac comb needs matching, non-empty offsets and weights");
  }
  for (double w : weights) {
    if (!(w >= 0.0)) invalid("dirac comb weights must be nonnegative");
  }
  return KernelComponent(
      DiracComb{std::move(offsets), std::move(weights), declared_strip, truncation_error});
}

KernelComponent KernelComponent::tabulated(std::vector<double> t, std::vector<double> values) {
  if (t.size() != values.size() || t.size() < 2) invalid("tabulated kernel needs >= 2 points");
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    if (!(t[i + 1] > t[i])) invalid("tabulated kernel grid must be strictly increasing");
  }
  for (double v : values) {
    if (!(v >= 0.0) || !std::isfinite(v)) invalid("tabulated kernel values must be nonnegative");
  }
  return KernelComponent(Tabulated{std::move(t), std::move(values)});
}

KernelComponent KernelComponent::convolved(const KernelComponent& first,
                                           const KernelComponent& second) {
  return KernelComponent(Convolved{std::make_shared<const KernelComponent>(first),
                                   std::make_shared<const KernelComponent>(second)});
}

std::string KernelComponent::shape_name() const {
  return std::visit(overloaded{
                        [](const Gaussian&) { return std::string("gaussian"); },
                        [](const OneSidedExponential&) { return std::string("exponential_onesided"); },
                        [](const PiecewiseGreen&) { return std::string("piecewise_green"); },
                        [](const DiracComb&) { return std::string("dirac_comb"); },
                        [](const Tabulated&) { return std::string("tabulated"); },
                        [](const Convolved&) { return std::string("convolved"); },
                    },
                    shape_);
}

Strip KernelComponent::abscissas() const {
  return std::visit(
      overloaded{
          [](const Gaussian&) { return Strip{}; },
          [](const OneSidedExponential& e) {
            return e.direction == Direction::Right ? Strip{-e.rate, kInf} : Strip{-kInf, e.rate};
          },
          [](const PiecewiseGreen& g) { return Strip{g.nu, g.mu}; },
          [](const DiracComb& d) { return d.declared_strip.value_or(Strip{}); },
          [](const Tabulated&) { return Strip{-kInf, kInf, true}; },
          [](const Convolved& c) { return intersect(c.first->abscissas(), c.second->abscissas()); },
      },
      shape_);
}

cplx KernelComponent::laplace(cplx z) const {
  check_in_strip(abscissas(), z);
  return std::visit(
      overloaded{
          [&](const Gaussian& g) { return g.mass * std::exp(-z * g.mean + 0.5 * g.variance * z * z); },
          [&](const OneSidedExponential& e) {
            const cplx phase = std::exp(-z * e.shift);
            return e.direction == Direction::Right ? e.amplitude * phase / (e.rate + z)
                                                   : e.amplitude * phase / (e.rate - z);
          },
          [&](const PiecewiseGreen& g) {
            return std::exp(-z * g.shift) / (g.q + g.c * z - z * z);
          },
          [&](const DiracComb& d) {
            cplx sum = 0.0;
            for (std::size_t i = 0; i < d.offsets.size(); ++i) {
              sum += d.weights[i] * std::exp(-z * d.offsets[i]);
            }
            return sum;
          },
          [&](const Tabulated& tab) {
            cplx sum = 0.0;
            for (std::size_t i = 0; i + 1 < tab.t.size(); ++i) {
              auto f = [&](double s) { return tabulated_value(tab, s) * std::exp(-z * s); };
              sum += quad::integrate(f, tab.t[i], tab.t[i + 1]).value;
            }
            return sum;
          },
          [&](const Convolved& c) { return c.first->laplace(z) * c.second->laplace(z); },
      },
      shape_);
}

cplx KernelComponent::laplace_derivative(cplx z) const {
  check_in_strip(abscissas(), z);
  return std::visit(
      overloaded{
          [&](const Gaussian& g) { return (g.variance * z - g.mean) * laplace(z); },
          [&](const OneSidedExponential& e) {
            const cplx l = laplace(z);
            return e.direction == Direction::Right ? -e.shift * l - l / (e.rate + z)
                                                   : -e.shift * l + l / (e.rate - z);
          },
          [&](const PiecewiseGreen& g) {
            const cplx denom = g.q + g.c * z - z * z;
            const cplx l = std::exp(-z * g.shift) / denom;
            return -g.shift * l + l * (2.0 * z - g.c) / denom;
          },
          [&](const DiracComb& d) {
            cplx sum = 0.0;
            for (std::size_t i = 0; i < d.offsets.size(); ++i) {
              sum -= d.offsets[i] * d.weights[i] * std::exp(-z * d.offsets[i]);
            }
            return sum;
          },
          [&](const Tabulated& tab) {
            cplx sum = 0.0;
            for (std::size_t i = 0; i + 1 < tab.t.size(); ++i) {
              auto f = [&](double s) { return -s * tabulated_value(tab, s) * std::exp(-z * s); };
              sum += quad::integrate(f, tab.t[i], tab.t[i + 1]).value;
            }
            return sum;
          },
          [&](const Convolved& c) {
            return c.first->laplace_derivative(z) * c.second->laplace(z) +
                   c.first->laplace(z) * c.second->laplace_derivative(z);
          },
      },
      shape_);
}

bool KernelComponent::has_density() const {
  return std::visit(overloaded{
                        [](const DiracComb&) { return false; },
                        [](const Convolved& c) {
                          return c.first->has_density() || c.second->has_density();
                        },
                        [](const auto&) { return true; },
                    },
                    shape_);
}

double KernelComponent::value(double s) const {
  return std::visit(
      overloaded{
          [&](const Gaussian& g) {
            const double d = s - g.mean;
            return g.mass * std::exp(-0.5 * d * d / g.variance) /
                   std::sqrt(2.0 * std::numbers::pi * g.variance);
          },
          [&](const OneSidedExponential& e) {
            const double d = s - e.shift;
            if (e.direction == Direction::Right) return d >= 0.0 ? e.amplitude * std::exp(-e.rate * d) : 0.0;
            return d <= 0.0 ? e.amplitude * std::exp(e.rate * d) : 0.0;
          },
          [&](const PiecewiseGreen& g) {
            const double d = s - g.shift;
            return (d >= 0.0 ? std::exp(g.nu * d) : std::exp(g.mu * d)) / g.sigma;
          },
          [&](const DiracComb&) -> double {
            throw Error(ErrorCode::InvalidKernel, "a dirac comb has no pointwise density");
          },
          [&](const Tabulated& tab) { return tabulated_value(tab, s); },
          [&](const Convolved& c) -> double {
            const auto* comb_first = std::get_if<DiracComb>(&c.first->shape());
            const auto* comb_second = std::get_if<DiracComb>(&c.second->shape());
            if (comb_first && comb_second) {
              throw Error(ErrorCode::InvalidKernel, "convolution of two combs has no density");
            }
            if (comb_first || comb_second) {
              const DiracComb& comb = comb_first ? *comb_first : *comb_second;
              const KernelComponent& other = comb_first ? *c.second : *c.first;
              double sum = 0.0;
              for (std::size_t i = 0; i < comb.offsets.size(); ++i) {
                sum += comb.weights[i] * other.value(s - comb.offsets[i]);
              }
              return sum;
            }
            const KernelComponent& a = *c.first;
            const KernelComponent& b = *c.second;
            auto [lo, hi] = a.support_window(1e-16);
            auto [blo, bhi] = b.support_window(1e-16);
            lo = std::max(lo, s - bhi);
            hi = std::min(hi, s - blo);
            if (!(hi > lo)) return 0.0;
            std::vector<double> breaks = a.breakpoints();
            for (double x : b.breakpoints()) breaks.push_back(s - x);
            auto f = [&](double u) { return a.value(u) * b.value(s - u); };
            quad::Options opts;
            opts.rel_tol = 1e-11;
            return quad::integrate_pieces(f, lo, hi, breaks, opts).value;
          },
      },
      shape_);
}

double KernelComponent::mass_above(double x) const {
  return std::visit(
      overloaded{
          [&](const Gaussian& g) {
            return g.mass * 0.5 * std::erfc((x - g.mean) / std::sqrt(2.0 * g.variance));
          },
          [&](const OneSidedExponential& e) {
            const double total = e.amplitude / e.rate;
            if (e.direction == Direction::Right) {
              return x <= e.shift ? total : total * std::exp(-e.rate * (x - e.shift));
            }
            return x >= e.shift ? 0.0 : total * (-std::expm1(-e.rate * (e.shift - x)));
          },
          [&](const PiecewiseGreen& g) {
            const double right = 1.0 / (g.sigma * -g.nu);
            const double left = 1.0 / (g.sigma * g.mu);
            if (x >= g.shift) return right * std::exp(g.nu * (x - g.shift));
            return right + left * (-std::expm1(-g.mu * (g.shift - x)));
          },
          [&](const DiracComb& d) {
            double sum = 0.0;
            for (std::size_t i = 0; i < d.offsets.size(); ++i) {
              if (d.offsets[i] > x) sum += d.weights[i];
            }
            return sum;
          },
          [&](const Tabulated& tab) { return tabulated_mass_above(tab, x); },
          [&](const Convolved& c) {
            const KernelComponent& a = *c.first;
            const KernelComponent& b = *c.second;
            if (const auto* comb = std::get_if<DiracComb>(&a.shape())) {
              double sum = 0.0;
              for (std::size_t i = 0; i < comb->offsets.size(); ++i) {
                sum += comb->weights[i] * b.mass_above(x - comb->offsets[i]);
              }
              return sum;
            }
            auto [lo, hi] = a.support_window(1e-16);
            auto f = [&](double u) { return a.value(u) * b.mass_above(x - u); };
            quad::Options opts;
            opts.rel_tol = 1e-11;
            return quad::integrate_pieces(f, lo, hi, a.breakpoints(), opts).value;
          },
      },
      shape_);
}

std::vector<double> KernelComponent::breakpoints() const {
  return std::visit(overloaded{
                        [](const Gaussian&) { return std::vector<double>{}; },
                        [](const OneSidedExponential& e) { return std::vector<double>{e.shift}; },
                        [](const PiecewiseGreen& g) { return std::vector<double>{g.shift}; },
                        [](const DiracComb& d) { return d.offsets; },
                        [](const Tabulated& t) { return t.t; },
                        [](const Convolved& c) {
                          std::vector<double> out;
                          auto a = c.first->breakpoints();
                          auto b = c.second->breakpoints();
                          if (a.empty()) return b;
                          if (b.empty()) return a;
                          for (double x : a) {
                            for (double y : b) out.push_back(x + y);
                          }
                          std::sort(out.begin(), out.end());
                          out.erase(std::unique(out.begin(), out.end()), out.end());
                          return out;
                        },
                    },
                    shape_);
}

std::pair<double, double> KernelComponent::support_window(double eps) const {
  const double log_inv = std::log(1.0 / eps);
  return std::visit(
      overloaded{
          [&](const Gaussian& g) {
            const double w = std::sqrt(g.variance) * (std::sqrt(2.0 * log_inv) + 1.0);
            return std::pair{g.mean - w, g.mean + w};
          },
          [&](const OneSidedExponential& e) {
            const double w = log_inv / e.rate;
            return e.direction == Direction::Right ? std::pair{e.shift, e.shift + w}
                                                   : std::pair{e.shift - w, e.shift};
          },
          [&](const PiecewiseGreen& g) {
            return std::pair{g.shift - log_inv / g.mu, g.shift + log_inv / -g.nu};
          },
          [&](const DiracComb& d) {
            auto [lo, hi] = std::minmax_element(d.offsets.begin(), d.offsets.end());
            return std::pair{*lo, *hi};
          },
          [&](const Tabulated& t) { return std::pair{t.t.front(), t.t.back()}; },
          [&](const Convolved& c) {
            auto [alo, ahi] = c.first->support_window(eps);
            auto [blo, bhi] = c.second->support_window(eps);
            return std::pair{alo + blo, ahi + bhi};
          },
      },
      shape_);
}

cplx laplace_quadrature(const KernelComponent& k, cplx z, double rel_tol) {
  const Strip strip = k.abscissas();
  check_in_strip(strip, z);
  if (const auto* comb = std::get_if<DiracComb>(&k.shape())) {
    cplx sum = 0.0;
    for (std::size_t i = 0; i < comb->offsets.size(); ++i) {
      sum += comb->weights[i] * std::exp(-z * comb->offsets[i]);
    }
    return sum;
  }
  if (const auto* conv = std::get_if<Convolved>(&k.shape())) {
    if (!conv->first->has_density() || !conv->second->has_density()) {
      return laplace_quadrature(*conv->first, z, rel_tol) *
             laplace_quadrature(*conv->second, z, rel_tol);
    }
  }
  auto f = [&](double s) -> cplx {
    const double v = k.value(s);
    if (v == 0.0) return 0.0;
    return v * std::exp(-z * s);
  };
  quad::Options opts;
  opts.rel_tol = rel_tol;
  opts.max_segments = 20000;
  std::vector<double> breaks = k.breakpoints();
  // Anchor the infinite maps near the bulk of the tilted kernel.
  auto [lo, hi] = k.support_window(1e-3);
  breaks.push_back(lo);
  breaks.push_back(hi);
  if (const auto* g = std::get_if<Gaussian>(&k.shape())) {
    breaks.push_back(g->mean + g->variance * -z.real());
  }
  return quad::integrate_pieces(f, -kInf, kInf, breaks, opts).value;
}

GreenKernel GreenKernel::second_order(double c, double q, double shift) {
  if (!(q > 0.0)) throw Error(ErrorCode::InvalidKernel, "green kernel needs q > 0");
  GreenKernel g;
  g.order = Order::Second;
  g.c = c;
  g.q = q;
  g.shift = shift;
  g.sigma = std::sqrt(c * c + 4.0 * q);
  g.nu = 0.5 * (c - g.sigma);
  g.mu = 0.5 * (c + g.sigma);
  // Recompute the small root from the product nu*mu = -q to avoid cancellation.
  if (c > 0.0) {
    g.nu = -q / g.mu;
  } else if (c < 0.0) {
    g.mu = -q / g.nu;
  }
  return g;
}

GreenKernel GreenKernel::first_order(double c, double q, double shift) {
  if (!(q > 0.0)) throw Error(ErrorCode::InvalidKernel, "green kernel needs q > 0");
  if (c == 0.0) throw Error(ErrorCode::ZeroSpeed, "first-order green kernel needs c != 0");
  GreenKernel g;
  g.order = Order::First;
  g.c = c;
  g.q = q;
  g.shift = shift;
  g.nu = g.mu = -q / c;
  g.sigma = std::abs(c);
  return g;
}

KernelComponent GreenKernel::as_kernel() const {
  if (order == Order::Second) return KernelComponent::piecewise_green(c, q, shift);
  const double rate = q / std::abs(c);
  const Direction dir = c > 0.0 ? Direction::Right : Direction::Left;
  return KernelComponent::exponential_onesided(rate, dir, shift, 1.0 / std::abs(c));
}

KernelComponent convolve_green(const KernelComponent& k, const GreenKernel& green) {
  const KernelComponent g = green.as_kernel();
  if (intersect(k.abscissas(), g.abscissas()).empty()) {
    throw Error(ErrorCode::EmptyStrip, "kernel and green kernel strips do not overlap");
  }
  return KernelComponent::convolved(k, g);
}

KernelComponent load_tabulated_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open kernel file " + path.string());
  std::vector<double> t, v;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw Error(ErrorCode::Schema,
                  path.string() + ":" + std::to_string(lineno) + ": expected 't,value'");
    }
    try {
      std::size_t used = 0;
      const std::string a = line.substr(0, comma);
      const std::string b = line.substr(comma + 1);
      const double tv = std::stod(a, &used);
      const double vv = std::stod(b);
      t.push_back(tv);
      v.push_back(vv);
    } catch (const std::exception&) {
      // A header row such as "t,value" is tolerated on the first data line.
      if (t.empty()) continue;
      throw Error(ErrorCode::Schema,
                  path.string() + ":" + std::to_string(lineno) + ": not a number");
    }
  }
  return KernelComponent::tabulated(std::move(t), std::move(v));
}

double cauchy_hadamard_gamma(const std::vector<double>& beta_negative_tail) {
  const std::size_t n = beta_negative_tail.size();
  double best = kInf;
  for (std::size_t k = std::max<std::size_t>(1, n / 2); k <= n; ++k) {
    const double b = beta_negative_tail[k - 1];
    if (b > 0.0) best = std::min(best, -std::log(b) / static_cast<double>(k));
  }
  return best;
}

}  // namespace wavefront
