#include "wavefront/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "wavefront/error.hpp"

namespace wavefront {

namespace {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double l2 = 0.0;
  double sup = 0.0;
};

// Least squares y ~ slope * x + intercept.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - f.slope * x[i] - f.intercept;
    ss += r * r;
    f.sup = std::max(f.sup, std::abs(r));
  }
  f.l2 = std::sqrt(ss / n);
  return f;
}

LineFit fit_with_a(const std::vector<double>& t, const std::vector<double>& y, double a) {
  std::vector<double> z(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) z[i] = y[i] - std::log(a - t[i]);
  return fit_line(t, z);
}

void window_samples(const std::vector<double>& t, const std::vector<double>& v, Window w, std::vector<double>& tw,
                    std::vector<double>& vw) {
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] >= w.t_a && t[i] <= w.t_b) {
      tw.push_back(t[i]);
      vw.push_back(v[i]);
    }
  }
}

std::vector<double> grid_points(const WaveProfile& phi) {
  std::vector<double> t(phi.grid.n);
  for (int i = 0; i < phi.grid.n; ++i) t[i] = phi.t(i);
  return t;
}

}  // namespace

Window default_window(const WaveProfile& phi) {
  const double level = 0.01 * phi.plateau;
  const int first = 10;
  if (phi.grid.n <= first || !(phi.values[first] < level)) {
    std::ostringstream msg;
    msg << "phi(t_min + 10 step) = " << (phi.grid.n > first ? phi.values[first] : NAN)
        << " is not below 0.01 kappa = " << level;
    throw Error(ErrorCode::TailUnresolved, msg.str());
  }
  Window w{phi.t(first), phi.grid.t_max};
  for (int i = first; i < phi.grid.n; ++i) {
    if (phi.values[i] > level) {
      w.t_b = phi.t(i - 1);
      break;
    }
  }
  return w;
}

DecayFit fit_decay(const WaveProfile& phi, std::optional<Window> window) {
  return fit_decay(grid_points(phi), phi.values, window.value_or(default_window(phi)));
}

DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& v, Window window) {
  std::vector<double> tw, vw;
  window_samples(t, v, window, tw, vw);
  if (tw.size() < 30) {
    std::ostringstream msg;
    msg << "decay window [" << window.t_a << ", " << window.t_b << "] holds " << tw.size() << " < 30 points";
    throw Error(ErrorCode::TailUnresolved, msg.str());
  }
  std::vector<double> y(vw.size());
  for (std::size_t i = 0; i < vw.size(); ++i) {
    if (!(vw[i] > 0.0)) {
      std::ostringstream msg;
      msg << "phi(" << tw[i] << ") = " << vw[i] << " <= 0 inside the decay window";
      throw Error(ErrorCode::NonPositiveTail, msg.str());
    }
    y[i] = std::log(vw[i]);
  }

  const LineFit f0 = fit_line(tw, y);
  const double tb = tw.back();
  const double len = tb - tw.front();

  // k = 1: scan a = t_b + d on a log grid of d, then golden-section in log d.
  auto cost = [&](double logd) { return fit_with_a(tw, y, tb + std::exp(logd)).l2; };
  double best = std::log(1e-3), best_cost = cost(best);
  const int scan = 300;
  for (int i = 1; i <= scan; ++i) {
    const double ld = std::log(1e-3) + (std::log(1e4) - std::log(1e-3)) * i / scan;
    const double c = cost(ld);
    if (c < best_cost) {
      best_cost = c;
      best = ld;
    }
  }
  const double step = (std::log(1e4) - std::log(1e-3)) / scan;
  double lo = best - step, hi = best + step;
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int i = 0; i < 100; ++i) {
    const double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    (cost(x1) < cost(x2) ? hi : lo) = (cost(x1) < cost(x2) ? x2 : x1);
  }
  const double a1 = tb + std::exp(0.5 * (lo + hi));
  const LineFit f1 = fit_with_a(tw, y, a1);

  DecayFit out;
  out.window = {tw.front(), tb};
  out.points = static_cast<int>(tw.size());
  out.residual_l2_k0 = f0.l2;
  out.residual_l2_k1 = f1.l2;
  // k = 1 degenerates to k = 0 as a -> infinity; only accept a nearby a.
  const bool take_k1 = f1.l2 < 0.9 * f0.l2 && a1 - tb <= 2.0 * len;
  const LineFit& f = take_k1 ? f1 : f0;
  out.k_hat = take_k1 ? 1 : 0;
  out.lambda_hat = f.slope;
  out.m = -f.intercept / f.slope;
  out.a = take_k1 ? a1 - out.m : 0.0;
  out.residual_l2 = f.l2;
  out.residual_sup = f.sup;
  return out;
}

RepresentationReport check_representation(const std::vector<double>& t, const std::vector<double>& v,
                                          double lambda, int k, double A, double a, double delta,
                                          Window window, const RepresentationOptions& opts) {
  RepresentationReport rep;
  rep.delta = delta;
  rep.lambda = lambda;
  rep.k = k;
  rep.A = A;
  rep.a = a;
  rep.window = window;
  std::vector<double> tw, vw;
  window_samples(t, v, window, tw, vw);
  if (tw.size() < 30) throw Error(ErrorCode::TailUnresolved, "representation window holds < 30 points");

  auto r_at = [&](double ti, double vi) {
    double lead = A * std::exp(lambda * ti);
    if (k > 0) lead *= std::pow(a - ti, k);
    return (vi - lead) * std::exp(-(lambda + delta) * ti);
  };
  std::vector<double> r(tw.size()), xs, ls;
  for (std::size_t i = 0; i < tw.size(); ++i) {
    r[i] = r_at(tw[i], vw[i]);
    rep.sup_r = std::max(rep.sup_r, std::abs(r[i]));
    if (r[i] != 0.0) {
      xs.push_back(tw[i]);
      ls.push_back(std::log(std::abs(r[i])));
    }
  }
  const double h = tw[1] - tw[0];
  double ss = 0.0, ss_even = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    ss += r[i] * r[i] * h;
    if (i % 2 == 0) ss_even += r[i] * r[i] * 2.0 * h;
  }
  rep.l2 = std::sqrt(ss);
  rep.l2_ref = std::sqrt(ss_even);
  rep.stability_source = "subsample";
  rep.slope = xs.size() >= 2 ? fit_line(xs, ls).slope : 0.0;
  rep.bounded = std::isfinite(rep.sup_r) && rep.slope >= -opts.slope_eps;
  rep.stable = std::isfinite(rep.l2) && std::isfinite(rep.l2_ref) &&
               std::abs(rep.l2 - rep.l2_ref) <= opts.stability_tol * std::max(rep.l2, rep.l2_ref);
  rep.pass = rep.bounded && rep.stable;
  return rep;
}

RepresentationReport check_representation(const WaveProfile& phi, const SpectralData& sd, double delta,
                                          const WaveProfile* refined, const RepresentationOptions& opts) {
  if (!(delta > 0.0)) throw Error(ErrorCode::InvalidArgument, "delta must be positive");
  const Window w = default_window(phi);
  const double lambda = phi.closure.active() ? phi.closure.lambda : sd.lambda_l;
  const int k = sd.critical ? 1 : 0;
  // otherwise the leading term is fitted at fixed rate on the leftmost quarter of the window
  const double t_fit = w.t_a + 0.25 * (w.t_b - w.t_a);
  std::vector<double> xs, ys;
  for (int i = 0; i < phi.grid.n; ++i) {
    const double ti = phi.t(i);
    if (ti < w.t_a || ti > t_fit) continue;
    xs.push_back(ti);
    ys.push_back(k ? phi.values[i] * std::exp(-lambda * ti) : std::log(phi.values[i]) - lambda * ti);
  }
  if (xs.size() < 8) throw Error(ErrorCode::TailUnresolved, "too few points to fit the leading term");
  double A = 0.0, a = 0.0;
  if (k == 0 && phi.closure.active() && phi.closure.k == 0) {
    A = phi.closure.A;
  } else if (k == 0) {
    double sum = 0.0;
    for (double y : ys) sum += y;
    A = std::exp(sum / static_cast<double>(ys.size()));
  } else {
    const auto line = fit_line(xs, ys);
    A = -line.slope;
    if (!(A > 0.0)) throw Error(ErrorCode::TailUnresolved, "critical tail is not of the form (a - t) e^{lambda t}");
    a = line.intercept / A;
  }
  RepresentationReport rep = check_representation(grid_points(phi), phi.values, lambda, k, A, a, delta, w, opts);
  if (refined) {
    const RepresentationReport fine =
        check_representation(grid_points(*refined), refined->values, lambda, k, A, a, delta, w, opts);
    rep.l2_ref = fine.l2;
    rep.stability_source = "refined";
    rep.stable = std::isfinite(rep.l2) && std::isfinite(rep.l2_ref) &&
                 std::abs(rep.l2 - rep.l2_ref) <= opts.stability_tol * std::max(rep.l2, rep.l2_ref);
    rep.pass = rep.bounded && rep.stable;
  }
  return rep;
}

std::vector<double> psi_integral(const WaveProfile& phi, std::optional<double> lambda_hat) {
  if (!(phi.values.front() < 0.01 * phi.plateau)) {
    throw Error(ErrorCode::TailUnresolved, "phi(t_min) is not below 0.01 kappa");
  }
  double left;
  const TailClosure& cl = phi.closure;
  if (cl.active()) {
    const double t0 = phi.grid.t_min, e = cl.A * std::exp(cl.lambda * t0);
    left = cl.k == 0 ? e / cl.lambda : e * ((cl.a - t0) / cl.lambda + 1.0 / (cl.lambda * cl.lambda));
  } else {
    const double lam = lambda_hat ? *lambda_hat : fit_decay(phi).lambda_hat;
    left = phi.values.front() / lam;
  }
  std::vector<double> psi(phi.grid.n);
  psi[0] = left;
  const double h = phi.grid.step();
  for (int i = 1; i < phi.grid.n; ++i) psi[i] = psi[i - 1] + 0.5 * h * (phi.values[i - 1] + phi.values[i]);
  return psi;
}

}  // namespace wavefront
