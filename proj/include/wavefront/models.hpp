#pragma once

// Reductions of four reaction-diffusion type models to the scalar
// convolution form  phi = sum_tau K(., tau) * g(phi, tau), with the
// closed-form characteristic functions used as cross-checks.

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "wavefront/charfun.hpp"
#include "wavefront/kernel.hpp"
#include "wavefront/nonlinearity.hpp"

namespace wavefront {

/// u_t = u_xx - u + g(u(t - h, x)); Lipschitz constant L >= g'(0).
struct LocalDelayedRD {
  Nonlinearity g;
  double L = 0.0;  ///< 0 means "use g'(0)"
  double h = 0.0;
};

/// u_t = J * u - u + g(u).
struct NonlocalKPP {
  KernelComponent J;
  Nonlinearity g;
};

/// u_n' = D (u_{n+1} + u_{n-1} - 2 u_n) - d u_n + sum_k beta(k) g(u_{n-k}(t - r)).
struct NonlocalLattice {
  double D = 1.0;
  double d = 1.0;
  double r = 0.0;
  std::vector<double> k;     ///< lattice offsets (integers)
  std::vector<double> beta;  ///< beta(k) >= 0
  std::optional<Strip> declared_strip;  ///< strip of the untruncated series, if infinite
  double truncation_error = 0.0;
  Nonlinearity g;
};

/// u_t = u_xx - f(u) + \int k(y) g(u(t - h, x - y)) dy.
struct NonlocalDelayedRD {
  Nonlinearity f;
  Nonlinearity g;
  KernelComponent k;
  double h = 0.0;
};

using Family = std::variant<LocalDelayedRD, NonlocalKPP, NonlocalLattice, NonlocalDelayedRD>;

struct ModelSpec {
  Family family;
  double bound = 2.0;        ///< M: range [0, M] covering the solution
  double beta_margin = 1.0;  ///< margin added by beta_select
  std::optional<double> c;   ///< default speed from the model file

  std::string family_name() const;
  /// Nonlinearity of the reproduction term.
  const Nonlinearity& birth() const;
};

/// Geometric dispersal weights beta(k) = rho^{|k|} on one or both sides,
/// truncated where rho^{|k|} < 1e-15; the declared strip is that of the
/// full series.
NonlocalLattice lattice_geometric(double D, double d, double r, double rho,
                                  const std::string& side, const Nonlinearity& g);

struct Atom {
  KernelComponent kernel;
  Nonlinearity g;
  double weight_derivative;  ///< g'(0, tau)
  double weight_lipschitz;   ///< Lipschitz constant of g(., tau) on [0, M]
  std::string label;
};

struct ConvolutionProblem {
  std::string family;
  std::vector<Atom> atoms;
  double c = 0.0;
  double beta_used = 0.0;
  double bound = 2.0;
  std::optional<SpectralData> spectral;

  CharacteristicFunction chi(WeightKind kind = WeightKind::Derivative) const;
  /// sum_tau mass(K_tau) g(u, tau): constant states solve F(kappa) = kappa.
  double constant_map(double u) const;
  /// Computes and stores spectral data (throws as real_roots does).
  const SpectralData& analyze(const RootOptions& opts = {});
};

/// Shift for a birth term: g_beta = g + beta s is Lipschitz with constant
/// g'(0) + beta on [0, M]. Throws Error(DegenerateRange) for M <= 0.
double beta_select_birth(const Nonlinearity& g, double M, double margin = 1.0);
/// Shift for a damping term: f_beta = beta s - f >= 0 with Lipschitz
/// constant beta - inf f' on [0, M].
double beta_select_damping(const Nonlinearity& f, double M, double margin = 1.0);

/// Throws Error(HypothesisViolation) naming the failed standing hypothesis.
void check_standing_hypothesis(const ModelSpec& m);

/// Throws Error(ZeroSpeed) for c = 0 and Error(HypothesisViolation) when the
/// family hypothesis fails or c < 0 is requested outside the nonlocal KPP family.
ConvolutionProblem to_convolution_form(const ModelSpec& m, double c);
/// Same with an explicit shift beta (ignored by families without one).
ConvolutionProblem to_convolution_form(const ModelSpec& m, double c, double beta);

/// Shift chosen by to_convolution_form (0 for families without one).
double model_beta(const ModelSpec& m);

/// Closed-form numerator tilde_chi(z, c) and the positive normalizer with
/// chi = tilde_chi / denominator. `beta` is the shift used by the assembly.
cplx tilde_chi(const ModelSpec& m, cplx z, double c, WeightKind kind = WeightKind::Derivative);
cplx chi_denominator(const ModelSpec& m, cplx z, double c, double beta);

CharacteristicFunction model_chi(const ModelSpec& m, double c,
                                 WeightKind kind = WeightKind::Derivative);

/// c_* : smallest speed with a positive zero of chi (derivative weights).
MinSpeed model_min_speed(const ModelSpec& m);
/// Same threshold for the Lipschitz-weighted chi_1.
MinSpeed uniqueness_speed(const ModelSpec& m);

}  // namespace wavefront
