#include "wavefront/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "wavefront/error.hpp"
#include "wavefront/roots.hpp"

namespace wavefront {

namespace {

// 4-point Lagrange interpolation on the uniform grid, constant outside it.
double cubic_at(const WaveProfile& p, double x) {
  const int n = p.grid.n;
  if (x <= p.grid.t_min) return p.values.front();
  if (x >= p.grid.t_max) return p.values.back();
  const double u = (x - p.grid.t_min) / p.grid.step();
  int i = std::clamp(static_cast<int>(u) - 1, 0, n - 4);
  const double s = u - i;  // position relative to node i, in [0, 3]
  const double* y = p.values.data() + i;
  return y[0] * (s - 1) * (s - 2) * (s - 3) / -6.0 + y[1] * s * (s - 2) * (s - 3) / 2.0 +
         y[2] * s * (s - 1) * (s - 3) / -2.0 + y[3] * s * (s - 1) * (s - 2) / 6.0;
}

double cubic_crossing(const WaveProfile& p, double level) {
  for (int i = 0; i < p.grid.n; ++i) {
    if (p.values[i] >= level) {
      if (i == 0) return p.grid.t_min;
      if (p.values[i] == level) return p.t(i);
      return roots::bisect([&](double x) { return cubic_at(p, x) - level; }, p.t(i - 1), p.t(i));
    }
  }
  throw Error(ErrorCode::NoCrossing, "profile never reaches kappa/2");
}

Check make(std::string name, Verdict v, std::string anchor, std::string details) {
  Check c;
  c.name = std::move(name);
  c.verdict = v;
  c.anchor = std::move(anchor);
  c.details = std::move(details);
  return c;
}

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(6);
  s << x;
  return s.str();
}

// sup of K(s) e^{-x s} over the kernel's support window; bounded if the
// weighted density does not increase toward either window edge.
std::optional<std::pair<double, bool>> weighted_sup(const KernelComponent& k, double x) {
  if (!k.has_density()) return std::nullopt;
  const auto [lo, hi] = k.support_window(1e-12);
  const int n = 4000;
  std::vector<double> f(n + 1);
  double sup = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double s = lo + (hi - lo) * i / n;
    f[i] = k.value(s) * std::exp(-x * s);
    if (!std::isfinite(f[i])) return std::make_pair(kInf, false);
    sup = std::max(sup, f[i]);
  }
  const int edge = n / 20;
  bool ok = true;
  for (int i = 0; i < edge; ++i) {
    if (f[i] > f[i + 1] * (1.0 + 1e-9) + 1e-300) ok = false;
    if (f[n - i] > f[n - i - 1] * (1.0 + 1e-9) + 1e-300) ok = false;
  }
  return std::make_pair(sup, ok);
}

}  // namespace

std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::Pass:
      return "PASS";
    case Verdict::Fail:
      return "FAIL";
    case Verdict::Undetermined:
      return "UNDETERMINED";
  }
  return "UNDETERMINED";
}

std::string_view to_string(Admissibility a) noexcept {
  switch (a) {
    case Admissibility::BelowCStar:
      return "below_c_star";
    case Admissibility::Critical:
      return "critical";
    case Admissibility::Noncritical:
      return "noncritical";
  }
  return "below_c_star";
}

Verdict VerifyReport::summary() const {
  bool undetermined = false;
  for (const auto& c : checks) {
    if (c.verdict == Verdict::Fail) return Verdict::Fail;
    if (c.verdict == Verdict::Undetermined) undetermined = true;
  }
  return undetermined ? Verdict::Undetermined : Verdict::Pass;
}

int VerifyReport::exit_code() const {
  switch (summary()) {
    case Verdict::Pass:
      return 0;
    case Verdict::Fail:
      return 1;
    case Verdict::Undetermined:
      return 2;
  }
  return 1;
}

std::string VerifyReport::text() const {
  std::ostringstream out;
  out << title << "\n";
  for (const auto& c : checks) {
    out << "  [" << to_string(c.verdict) << "] " << c.name << " (" << c.anchor << ")";
    if (!c.details.empty()) out << ": " << c.details;
    out << "\n";
  }
  if (aborted) out << "  probe aborted\n";
  out << "summary: " << to_string(summary()) << "\n";
  return out.str();
}

Check mollison_check(const ConvolutionProblem& p) {
  double premise = 0.0;
  bool right_mass = false;
  for (const auto& a : p.atoms) {
    premise += a.weight_derivative * a.kernel.mass();
    if (a.kernel.mass_above(0.0) > 0.0) right_mass = true;
  }
  const double gamma = p.chi().strip().gamma;
  Check c;
  c.name = "mollison";
  c.anchor = "Mollison condition: finite transform for some z > 0 and kernel mass on s > 0";
  c.values = {{"premise_mass", premise}, {"gamma_K", gamma}};
  if (!(premise > 1.0) || !std::isfinite(premise)) {
    c.verdict = Verdict::Undetermined;
    c.details = "premise fails: sum g'(0) mass = " + fmt(premise) + " is not in (1, inf)";
    return c;
  }
  const bool ok = gamma > 0.0 && right_mass;
  c.verdict = ok ? Verdict::Pass : Verdict::Fail;
  std::ostringstream d;
  d << "gamma_K = " << gamma << (gamma > 0.0 ? " > 0" : " <= 0") << "; kernel mass on s > 0 "
    << (right_mass ? "present" : "absent");
  if (!ok) d << "; no semi-wavefront with phi(-inf) = 0";
  c.details = d.str();
  return c;
}

AdmissibilityResult speed_admissibility(const ModelSpec& m, double c) {
  AdmissibilityResult r;
  r.c = c;
  try {
    r.c_star = model_min_speed(m).c_star;
  } catch (const Error&) {
  }
  check_standing_hypothesis(m);
  if (!(c > 0.0)) return r;
  try {
    auto p = to_convolution_form(m, c);
    r.spectral = p.analyze();
    r.kind = r.spectral->critical ? Admissibility::Critical : Admissibility::Noncritical;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoRoots) throw;
    r.kind = Admissibility::BelowCStar;
  }
  return r;
}

AuditResult audit_hypotheses(const ConvolutionProblem& p, double M, const SpectralData* sd_in) {
  AuditResult out;
  std::optional<SpectralData> sd;
  if (sd_in) {
    sd = *sd_in;
  } else if (p.spectral) {
    sd = p.spectral;
  } else {
    try {
      sd = real_roots(p.chi());
    } catch (const Error&) {
    }
  }

  bool all_gvt = true, all_glc = true, all_holder = true, all_dom = true, all_ec = true;
  bool dom_known = true, ec_known = true;
  for (std::size_t j = 0; j < p.atoms.size(); ++j) {
    const Atom& a = p.atoms[j];
    const std::string tag = "atom " + std::to_string(j) + " (" + a.label + ")";
    const auto range = a.g.derivative_range(0.0, M);
    const double lip = std::max(std::abs(range.inf), std::abs(range.sup));
    const double g0 = a.g.gprime0();

    const bool gvt = lip <= g0 * (1.0 + 1e-9);
    Check c1 = make("subtangential_lipschitz", gvt ? Verdict::Pass : Verdict::Fail,
                    "|g(u) - g(v)| <= g'(0) |u - v| on [0, M]",
                    tag + ": sup|g'| = " + fmt(lip) + (gvt ? " <= " : " > ") + "g'(0) = " + fmt(g0));
    c1.values = {{"lipschitz", lip}, {"gprime0", g0}};
    out.checks.push_back(c1);
    all_gvt = all_gvt && gvt;

    const bool glc = std::isfinite(lip);
    Check c2 = make("lipschitz_bound", glc ? Verdict::Pass : Verdict::Fail, "|g(u) - g(v)| <= L |u - v| on [0, M]",
                    tag + ": L = " + fmt(lip));
    c2.values = {{"L", lip}};
    out.checks.push_back(c2);
    all_glc = all_glc && glc;

    const bool lae = range.sup <= g0 * (1.0 + 1e-9);
    out.checks.push_back(make("derivative_below_initial_slope", lae ? Verdict::Pass : Verdict::Fail,
                              "g'(s) <= g'(0) on [0, M]", tag + ": sup g' = " + fmt(range.sup)));

    // Holder bound |g(u) - g'(0) u| <= C u^{1+alpha} near 0 by log-log regression.
    const double sigma = 0.1 * std::min(1.0, M);
    std::vector<double> lx, ly;
    bool linear = true;
    for (int i = 0; i < 50; ++i) {
      const double u = sigma * std::pow(1e-3, 1.0 - i / 49.0);
      const double d = std::abs(a.g(u) - g0 * u);
      if (d > 1e-12 * u) linear = false;
      if (d > 0.0) {
        lx.push_back(std::log(u));
        ly.push_back(std::log(d));
      }
    }
    Check c3;
    c3.name = "holder_at_zero";
    c3.anchor = "|g(u) - g'(0) u| <= C u^{1+alpha} on (0, sigma]";
    if (linear || lx.size() < 10) {
      c3.verdict = Verdict::Pass;
      c3.details = tag + ": exactly linear near 0, fit skipped";
    } else {
      double mx = 0, my = 0;
      for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
      }
      mx /= lx.size();
      my /= ly.size();
      double sxx = 0, sxy = 0;
      for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
      }
      const double slope = sxy / sxx;
      const double alpha = slope - 1.0;
      const double C = std::exp(my - slope * mx);
      c3.verdict = alpha > 0.0 ? Verdict::Pass : Verdict::Fail;
      c3.details = tag + ": alpha = " + fmt(alpha) + ", C = " + fmt(C) + " on (0, " + fmt(sigma) + "]";
      c3.values = {{"alpha", alpha}, {"C", C}, {"sigma", sigma}};
      all_holder = all_holder && alpha > 0.0;
    }
    out.checks.push_back(c3);

    if (sd) {
      auto dom = weighted_sup(a.kernel, 0.5 * sd->lambda_l);
      Check c4;
      c4.name = "kernel_exponential_bound";
      c4.anchor = "K(s) <= d e^{eps s} for some eps in (0, lambda_l)";
      if (!dom) {
        c4.verdict = Verdict::Undetermined;
        c4.details = tag + ": kernel has atoms, bound not sampled";
        dom_known = false;
      } else {
        c4.verdict = dom->second ? Verdict::Pass : Verdict::Fail;
        c4.details = tag + ": sup K(s) e^{-eps s} = " + fmt(dom->first) + " at eps = " + fmt(0.5 * sd->lambda_l);
        all_dom = all_dom && dom->second;
      }
      out.checks.push_back(c4);

      const double x = std::isfinite(sd->lambda_rK) ? sd->lambda_rK * (1.0 - 1e-3) : kInf;
      Check c5;
      c5.name = "kernel_bound_near_lambda_rK";
      c5.anchor = "K(s) <= d e^{x s} for x just below lambda_rK";
      auto ec = std::isfinite(x) ? weighted_sup(a.kernel, x) : std::nullopt;
      if (!ec) {
        c5.verdict = Verdict::Undetermined;
        c5.details = tag + (std::isfinite(x) ? ": kernel has atoms" : ": lambda_rK infinite") +
                     "; derivative-transform alternative assumed";
        ec_known = false;
      } else {
        c5.verdict = ec->second ? Verdict::Pass : Verdict::Fail;
        c5.details = tag + ": sup K(s) e^{-x s} = " + fmt(ec->first) + " at x = " + fmt(x);
        all_ec = all_ec && ec->second;
      }
      out.checks.push_back(c5);
    }
  }

  if (!sd) {
    out.checks.push_back(make("route", Verdict::Undetermined, "uniqueness route",
                              "no positive zero of chi; uniqueness theory does not apply"));
    out.route = "none";
    return out;
  }

  const bool strip_gap = sd->gamma_limit != "undetermined";
  const auto margin = chi1_margin(p.chi(WeightKind::Lipschitz), *sd);
  Check route;
  route.name = "route";
  route.anchor = "uniqueness route";
  if (all_gvt && all_holder) {
    out.route = "subtangential";
    route.verdict = strip_gap ? Verdict::Pass : Verdict::Undetermined;
    route.details = "subtangential Lipschitz bound with Holder regularity at 0";
    if (!strip_gap) route.details += "; chi(gamma_K-) != 0 undetermined";
  } else if (all_glc && all_holder && margin && all_dom && all_ec) {
    out.route = "lipschitz_margin";
    route.verdict = (dom_known && ec_known) ? Verdict::Pass : Verdict::Undetermined;
    route.details = "Lipschitz bound with chi_1(" + fmt(margin->m) + ") = " + fmt(margin->value) + " >= 0";
    route.values = {{"m", margin->m}, {"chi1_m", margin->value}};
  } else {
    out.route = "none";
    route.verdict = Verdict::Fail;
    route.details = margin ? "hypotheses incomplete" : "chi_1 < 0 on (0, lambda_rK)";
  }
  out.checks.push_back(route);
  return out;
}

double default_delta(const SpectralData& sd, double alpha) {
  double gap = alpha * sd.lambda_l;
  if (sd.lambda_r && !sd.critical) gap = std::min(gap, *sd.lambda_r - sd.lambda_l);
  return 0.5 * gap;
}

Check representation_check(const ConvolutionProblem& p, const WaveProfile& phi, const SpectralData& sd,
                           double delta, const RepresentationOptions& opts) {
  const std::string anchor = "phi(t + m) = (a - t)^k e^{lambda_l t} + e^{(lambda_l + delta) t} r(t), r in L2";
  const RepresentationReport rr = check_representation(phi, sd, delta, nullptr, opts);
  Check c = make("representation", rr.pass ? Verdict::Pass : Verdict::Fail, anchor,
                 "delta = " + fmt(delta) + ", log|r| slope = " + fmt(rr.slope));
  c.values = {{"delta", delta}, {"slope", rr.slope}, {"l2", rr.l2}, {"l2_ref", rr.l2_ref}, {"k", rr.k}};
  if (sd.critical && !rr.pass) {
    // the grid operator resolves the double root only if 1 - transform reaches 0 near lambda_l
    WaveOperator op(p, phi.grid, 40.0 / sd.lambda_l);
    double best = -kInf;
    for (int i = 0; i <= 40; ++i) {
      const double z = sd.lambda_l * (0.95 + 0.1 * i / 40.0);
      best = std::max(best, 1.0 - op.discrete_transform(z));
    }
    c.values["grid_chi_max"] = best;
    if (best < 0.0) {
      c.verdict = Verdict::Undetermined;
      c.details += "; grid operator has no real root near lambda_l (max 1 - transform = " + fmt(best) +
                   "), refine the grid";
    }
  }
  return c;
}

Alignment align_translate(const WaveProfile& phi1, const WaveProfile& phi2) {
  Alignment al;
  al.t1 = cubic_crossing(phi1, 0.5 * phi1.plateau);
  al.t2 = cubic_crossing(phi2, 0.5 * phi2.plateau);
  al.shift = al.t2 - al.t1;
  const double margin1 = 10.0 * phi1.grid.step(), margin2 = 10.0 * phi2.grid.step();
  const double lo = std::max(phi1.grid.t_min + margin1, phi2.grid.t_min + margin2 - al.shift);
  const double hi = std::min(phi1.grid.t_max - margin1, phi2.grid.t_max - margin2 - al.shift);
  for (int i = 0; i < phi1.grid.n; ++i) {
    const double t = phi1.t(i);
    if (t < lo || t > hi) continue;
    al.sup_diff = std::max(al.sup_diff, std::abs(phi1.values[i] - cubic_at(phi2, t + al.shift)));
  }
  try {
    al.fitted_shift = fit_decay(phi2).m - fit_decay(phi1).m;
  } catch (const Error&) {
  }
  return al;
}

VerifyReport uniqueness_probe(const ModelSpec& m, double c, const Grid& grid, const std::vector<Init>& inits,
                              const ProbeOptions& opts, std::vector<WaveProfile>* profiles_out) {
  VerifyReport rep;
  std::ostringstream title;
  title << "uniqueness probe: " << m.family_name() << ", c = " << c << ", " << inits.size() << " inits";
  rep.title = title.str();
  if (inits.size() < 2) throw Error(ErrorCode::InvalidArgument, "uniqueness probe needs at least two inits");

  const auto adm = speed_admissibility(m, c);
  Check ac = make("speed_admissibility", adm.kind == Admissibility::BelowCStar ? Verdict::Fail : Verdict::Pass,
                  "admissible speeds satisfy c >= c_*", std::string(to_string(adm.kind)));
  ac.values = {{"c", c}};
  if (adm.c_star) {
    ac.values["c_star"] = *adm.c_star;
    ac.details += ", c_* = " + fmt(*adm.c_star);
  }
  rep.checks.push_back(ac);
  if (adm.kind == Admissibility::BelowCStar) {
    rep.aborted = true;
    return rep;
  }

  auto p = to_convolution_form(m, c);
  const SpectralData sd = p.analyze();
  rep.checks.push_back(mollison_check(p));
  const auto audit = audit_hypotheses(p, m.bound, &sd);
  for (const auto& ch : audit.checks) {
    if (ch.name == "route") rep.checks.push_back(ch);
  }

  std::vector<WaveProfile> profs;
  for (std::size_t i = 0; i < inits.size(); ++i) {
    try {
      profs.push_back(solve_profile(p, grid, inits[i], opts.solve));
    } catch (const MaxIterError& e) {
      Check st = make("solve_" + std::to_string(i), opts.accept_stalled ? Verdict::Undetermined : Verdict::Fail,
                      "damped fixed-point iteration", e.what());
      rep.checks.push_back(st);
      if (!opts.accept_stalled) {
        rep.aborted = true;
        return rep;
      }
      profs.push_back(e.profile());
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoWave && e.code() != ErrorCode::NegativeValues) throw;
      rep.checks.push_back(make("solve_" + std::to_string(i), Verdict::Fail, "damped fixed-point iteration", e.what()));
      rep.aborted = true;
      return rep;
    }
  }

  double worst = 0.0;
  for (std::size_t i = 0; i < profs.size(); ++i) {
    for (std::size_t j = i + 1; j < profs.size(); ++j) {
      worst = std::max(worst, align_translate(profs[i], profs[j]).sup_diff);
    }
  }
  std::ostringstream d;
  d << "max sup_diff after alignment = " << worst << "; ";
  d << (worst <= opts.tol ? "consistent with uniqueness modulo translation at tolerance "
                          : "profiles differ beyond tolerance ")
    << opts.tol << " (route: " << audit.route << ")";
  Check uc = make("translation_aligned_agreement", worst <= opts.tol ? Verdict::Pass : Verdict::Fail,
                  "at most one semi-wavefront up to translation", d.str());
  uc.values = {{"sup_diff", worst}, {"tol", opts.tol}};
  rep.checks.push_back(uc);

  for (std::size_t i = 0; i < profs.size(); ++i) {
    Check dc;
    dc.name = "decay_law_" + std::to_string(i);
    dc.anchor = "phi ~ (a - t)^k e^{lambda_l t} at -inf, k = 1 iff lambda_l is a double root";
    try {
      const auto f = fit_decay(profs[i]);
      const double rel = std::abs(f.lambda_hat - sd.lambda_l) / sd.lambda_l;
      const double bound = sd.critical ? 0.03 : 0.02;
      dc.verdict = rel <= bound ? Verdict::Pass : Verdict::Fail;
      std::ostringstream s;
      s << "lambda_hat = " << f.lambda_hat << " vs lambda_l = " << sd.lambda_l << ", k_hat = " << f.k_hat;
      if ((f.k_hat == 1) != sd.critical) s << " (warning: k_hat disagrees with the criticality flag)";
      dc.details = s.str();
      dc.values = {{"lambda_hat", f.lambda_hat}, {"k_hat", f.k_hat}, {"lambda_l", sd.lambda_l}};
    } catch (const Error& e) {
      dc.verdict = Verdict::Undetermined;
      dc.details = e.what();
    }
    rep.checks.push_back(dc);
  }
  if (profiles_out) *profiles_out = std::move(profs);
  return rep;
}

}  // namespace wavefront
