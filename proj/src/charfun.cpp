#include "wavefront/charfun.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "wavefront/error.hpp"
#include "wavefront/roots.hpp"

namespace wavefront {

CharacteristicFunction::CharacteristicFunction(std::vector<WeightedKernel> components,
                                               WeightKind kind)
    : components_(std::move(components)), kind_(kind) {
  if (components_.empty()) throw Error(ErrorCode::InvalidArgument, "no kernel components");
  for (const auto& c : components_) {
    if (!(c.weight >= 0.0)) throw Error(ErrorCode::InvalidArgument, "weights must be nonnegative");
    strip_ = intersect(strip_, c.kernel.abscissas());
  }
}

cplx CharacteristicFunction::operator()(cplx z) const {
  cplx sum = 1.0;
  for (const auto& c : components_) {
    if (c.weight != 0.0) sum -= c.weight * c.kernel.laplace(z);
  }
  return sum;
}

double CharacteristicFunction::operator()(double x) const { return (*this)(cplx(x, 0.0)).real(); }

double CharacteristicFunction::derivative(double x) const {
  double sum = 0.0;
  for (const auto& c : components_) {
    if (c.weight != 0.0) sum -= c.weight * c.kernel.laplace_derivative(x);
  }
  return sum;
}

ConcaveMax concave_max_on_strip(const std::function<double(double)>& f,
                                const std::function<double(double)>& df, double gamma,
                                double cap) {
  if (!(gamma > 0.0)) throw Error(ErrorCode::StripTooNarrow, "gamma_K <= 0");
  std::function<double(double)> d;
  if (df) {
    d = [&](double x) {
      const double v = df(x);
      return std::isnan(v) ? -kInf : v;
    };
  }
  auto increasing_at = [&](double x, double prev) {
    if (d) return d(x) > 0.0;
    return f(x) > prev;
  };

  double upper;
  if (std::isfinite(gamma)) {
    double delta = 1e-9 * std::max(1.0, gamma);
    upper = gamma - delta;
    for (int tries = 0; tries < 8; ++tries) {
      try {
        const double v = f(upper);
        if (std::isfinite(v) || v == -kInf) break;
      } catch (const Error&) {
      }
      delta *= 10.0;
      upper = gamma - delta;
    }
  } else {
    upper = 1.0;
    double prev = f(0.5);
    while (upper < cap && increasing_at(upper, prev)) {
      prev = f(upper);
      upper *= 2.0;
    }
    upper = std::min(upper, cap);
  }

  const auto best = roots::maximize_concave(f, d, 0.0, upper);
  ConcaveMax out;
  out.x = best.x;
  out.value = best.value;
  out.upper = upper;
  out.at_upper = best.x >= upper * (1.0 - 1e-12);
  return out;
}

SpectralData real_roots(const CharacteristicFunction& cf, const RootOptions& opts) {
  const Strip& strip = cf.strip();
  if (!(strip.gamma > 0.0)) throw Error(ErrorCode::StripTooNarrow, "gamma_K <= 0");
  const double chi0 = cf(0.0);
  if (!(chi0 < 0.0)) {
    std::ostringstream msg;
    msg << "chi(0) = " << chi0 << " is not negative";
    throw Error(ErrorCode::HypothesisViolation, msg.str());
  }
  auto f = [&](double x) { return cf(x); };
  auto df = [&](double x) { return cf.derivative(x); };
  const ConcaveMax mx = concave_max_on_strip(f, df, strip.gamma, opts.doubling_cap);

  SpectralData sd;
  sd.gamma_K = strip.gamma;
  sd.sigma_K = strip.sigma;
  sd.argmax = mx.x;
  sd.chi_max = mx.value;
  if (strip.compact_support_surrogate) {
    sd.gamma_limit = "undetermined";
  } else if (std::isfinite(strip.gamma)) {
    sd.gamma_limit = "resolved";
  }

  if (mx.value < -opts.root_tol || (mx.x <= 0.0 && mx.value < 0.0)) {
    std::ostringstream msg;
    msg << "max chi = " << mx.value << " at x = " << mx.x << " on (0, " << strip.gamma << ")";
    throw Error(ErrorCode::NoRoots, msg.str());
  }
  if (std::abs(mx.value) <= opts.root_tol) {
    sd.lambda_l = mx.x;
    sd.lambda_r = mx.x;
  } else {
    sd.lambda_l = roots::bisect(f, 0.0, mx.x);
    const double fu = f(mx.upper);
    if (fu < 0.0) {
      sd.lambda_r = roots::bisect(f, mx.x, mx.upper);
    }
  }
  sd.lambda_rK = sd.lambda_r.value_or(strip.gamma);
  sd.gamma_phi = sd.lambda_l;
  sd.chi_prime_at_ll = cf.derivative(sd.lambda_l);
  sd.critical = sd.lambda_r.has_value() &&
                (*sd.lambda_r - sd.lambda_l) < opts.multiplicity_tol * std::max(1.0, sd.lambda_l);
  return sd;
}

MinSpeed min_speed(const ModelChi& model_chi, const std::function<double(double c)>& gamma_of_c,
                   std::pair<double, double> c_bracket, const ModelChi& dchi_dz) {
  auto inner = [&](double c) {
    auto f = [&](double z) { return model_chi(z, c); };
    std::function<double(double)> df;
    if (dchi_dz) df = [&](double z) { return dchi_dz(z, c); };
    const double gamma = gamma_of_c(c);
    if (!(gamma > 0.0)) return ConcaveMax{0.0, model_chi(0.0, c), false, 0.0};
    return concave_max_on_strip(f, df, gamma);
  };
  auto g = [&](double c) { return inner(c).value; };
  const double lo = c_bracket.first, hi = c_bracket.second;
  const double glo = g(lo), ghi = g(hi);
  if (!(glo < 0.0) || !(ghi >= 0.0)) {
    std::ostringstream msg;
    msg << "max_z chi(z, c) = " << glo << " at c = " << lo << " and " << ghi << " at c = " << hi
        << " does not change sign";
    throw Error(ErrorCode::BracketFailure, msg.str());
  }
  roots::BisectOptions bo;
  bo.x_tol = 2e-16;
  bo.max_iter = 200;
  const double c_star = roots::bisect(g, lo, hi, bo);
  return {c_star, inner(c_star).x};
}

ScanReport strip_zero_scan(const CharacteristicFunction& cf, const SpectralData& sd,
                           const ScanOptions& opts) {
  ScanReport rep;
  rep.y_max = opts.y_max;
  rep.eps = opts.eps;
  rep.nx = opts.nx;
  rep.ny = opts.ny;
  const Strip& strip = cf.strip();
  double right = sd.lambda_rK;
  if (!std::isfinite(right)) right = sd.lambda_l + opts.open_width;
  // A boundary at gamma_K itself is not evaluable; back off by eps.
  const bool right_on_strip_edge = right >= strip.gamma;
  if (right_on_strip_edge) right = strip.gamma - opts.eps;
  rep.x_min = sd.lambda_l + opts.eps;
  rep.x_max = right_on_strip_edge ? right : right - opts.eps;

  if (!(opts.y_max > 0.0) || opts.ny < 1) {
    rep.empty = true;
    rep.pass = true;
    rep.min_abs_chi = kInf;
    rep.boundary_min_abs_chi = kInf;
    return rep;
  }

  auto y_at = [&](int j) {
    return opts.ny == 1 ? opts.y_max : -opts.y_max + 2.0 * opts.y_max * j / (opts.ny - 1);
  };
  if (rep.x_max > rep.x_min) {
    for (int i = 0; i < opts.nx; ++i) {
      const double x = opts.nx == 1 ? rep.x_min : rep.x_min + (rep.x_max - rep.x_min) * i / (opts.nx - 1);
      for (int j = 0; j < opts.ny; ++j) {
        const double y = y_at(j);
        if (std::abs(y) < opts.eps) continue;
        const double a = std::abs(cf(cplx(x, y)));
        if (a < rep.min_abs_chi) {
          rep.min_abs_chi = a;
          rep.argmin = cplx(x, y);
        }
      }
    }
  }

  rep.boundary_lines = {sd.lambda_l, right_on_strip_edge ? right : sd.lambda_rK};
  if (!std::isfinite(sd.lambda_rK)) rep.boundary_lines.pop_back();
  for (double x : rep.boundary_lines) {
    for (int j = 0; j < opts.ny; ++j) {
      const double y = y_at(j);
      if (std::abs(y) < opts.boundary_eps) continue;
      const double a = std::abs(cf(cplx(x, y)));
      if (a < rep.boundary_min_abs_chi) {
        rep.boundary_min_abs_chi = a;
        rep.boundary_argmin = cplx(x, y);
      }
    }
  }
  rep.empty = !std::isfinite(rep.min_abs_chi) && !std::isfinite(rep.boundary_min_abs_chi);
  rep.pass = rep.min_abs_chi > opts.zero_tol && rep.boundary_min_abs_chi > opts.boundary_tol;
  return rep;
}

std::optional<Margin> chi1_margin(const CharacteristicFunction& cf1, const SpectralData& sd) {
  const double gamma = std::min(sd.lambda_rK, cf1.strip().gamma);
  if (!(gamma > 0.0)) return std::nullopt;
  auto f = [&](double x) { return cf1(x); };
  auto df = [&](double x) { return cf1.derivative(x); };
  ConcaveMax mx;
  if (sd.lambda_r && *sd.lambda_r < cf1.strip().gamma) {
    // lambda_r is a point of the strip: search the closed interval.
    const auto best = roots::maximize_concave(f, df, 0.0, *sd.lambda_r);
    mx.x = best.x;
    mx.value = best.value;
  } else {
    mx = concave_max_on_strip(f, df, gamma);
  }
  if (mx.value >= 0.0) return Margin{mx.x, mx.value};
  return std::nullopt;
}

}  // namespace wavefront
