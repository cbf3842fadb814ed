#pragma once

// Decay law of a profile at -infinity:
//   phi(t + m) = (a - t)^k e^{lambda t} + e^{(lambda + delta) t} r(t).

#include <optional>
#include <string>
#include <vector>

#include "wavefront/charfun.hpp"
#include "wavefront/wavesolver.hpp"

namespace wavefront {

struct Window {
  double t_a = 0.0;
  double t_b = 0.0;
};

struct DecayFit {
  double lambda_hat = 0.0;
  int k_hat = 0;
  double a = 0.0;  ///< 0 when k_hat = 0
  double m = 0.0;
  Window window;
  double residual_sup = 0.0;  ///< of log phi against the selected model
  double residual_l2 = 0.0;
  double residual_l2_k0 = 0.0;
  double residual_l2_k1 = 0.0;
  int points = 0;
};

/// [t_min + 10 step, first t with phi > 0.01 kappa]. Throws Error(TailUnresolved)
/// when phi is not below 0.01 kappa at the left end.
Window default_window(const WaveProfile& phi);

DecayFit fit_decay(const WaveProfile& phi, std::optional<Window> window = std::nullopt);
/// Fit on samples (t_i, v_i) restricted to the window (>= 30 points required).
DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& v, Window window);

struct RepresentationOptions {
  double slope_eps = 0.02;      ///< log|r| slope must be >= -slope_eps
  double stability_tol = 0.2;   ///< relative change of the discrete L2 norm
};

struct RepresentationReport {
  double delta = 0.0;
  double lambda = 0.0;
  int k = 0;
  double A = 0.0;
  double a = 0.0;
  Window window;
  double slope = 0.0;  ///< least-squares slope of log|r| against t
  double sup_r = 0.0;
  double l2 = 0.0;
  double l2_ref = 0.0;
  std::string stability_source;  ///< "refined" or "subsample"
  bool bounded = false;
  bool stable = false;
  bool pass = false;
};

/// k = 1 iff sd.critical. For k = 0 the leading term comes from the tail closure
/// when present; otherwise A (and a) are fitted at fixed rate on the left quarter
/// of the default window. `refined` (same problem, finer grid) is used for the
/// stability check when given.
RepresentationReport check_representation(const WaveProfile& phi, const SpectralData& sd, double delta,
                                          const WaveProfile* refined = nullptr,
                                          const RepresentationOptions& opts = {});

/// Same on samples with an explicit leading term A (a - t)^k e^{lambda t}.
RepresentationReport check_representation(const std::vector<double>& t, const std::vector<double>& v,
                                          double lambda, int k, double A, double a, double delta,
                                          Window window, const RepresentationOptions& opts = {});

/// psi(t_i) = \int_{-inf}^{t_i} phi. The part left of t_min is the exact
/// integral of the tail closure, or phi(t_min) / lambda_hat without one.
std::vector<double> psi_integral(const WaveProfile& phi, std::optional<double> lambda_hat = std::nullopt);

}  // namespace wavefront
