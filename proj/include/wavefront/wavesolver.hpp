#pragma once

// Semi-wavefront profiles by damped fixed-point iteration of
//   N[phi](t) = sum_tau \int K(s, tau) g(phi(t - s), tau) ds
// on a truncated uniform grid.

#include <memory>
#include <optional>
#include <vector>

#include "wavefront/error.hpp"
#include "wavefront/grid_convolution.hpp"
#include "wavefront/models.hpp"

namespace wavefront {

struct Grid {
  double t_min = -60.0;
  double t_max = 40.0;
  int n = 4096;

  /// Throws Error(InvalidArgument) unless t_min < 0 < t_max and n >= 64.
  static Grid make(double t_min, double t_max, int n);
  double step() const { return (t_max - t_min) / (n - 1); }
  double t(int i) const { return t_min + step() * i; }
};

/// Left tail phi(t) = A (a - t)^k e^{lambda t} fed to the operator for t < t_min.
/// A = 0 means zero closure.
struct TailClosure {
  double lambda = 0.0;
  int k = 0;
  double A = 0.0;
  double a = 0.0;

  bool active() const { return A > 0.0; }
  double operator()(double t) const;
};

struct Convergence {
  int iterations = 0;
  double final_residual = 0.0;
  double damping_used = 0.5;
  bool converged = false;
};

struct WaveProfile {
  Grid grid;
  std::vector<double> values;
  double c = 0.0;
  double plateau = 0.0;  ///< kappa: smallest positive constant state
  Convergence convergence;
  TailClosure closure;

  double t(int i) const { return grid.t(i); }
  /// Linear interpolation; tail closure on the left, constant on the right.
  double at(double t) const;
  /// First crossing of `level` by linear interpolation.
  std::optional<double> crossing(double level) const;
};

struct Init {
  enum class Kind { CappedExponential, Tabulated, Zero };
  Kind kind = Kind::CappedExponential;
  double lambda = 0.0;  ///< 0 means lambda_l of the problem
  double cap = 0.0;     ///< 0 means kappa / 2
  double shift = 0.0;   ///< init(t) is evaluated at t - shift
  std::vector<double> t, v;

  static Init capped_exponential(double lambda = 0.0, double cap = 0.0);
  static Init tabulated(std::vector<double> t, std::vector<double> v);
  static Init previous(const WaveProfile& p);
  static Init zero();
};

struct SolveOptions {
  double damping = 0.5;
  double tol = 1e-10;
  int max_iter = 200000;
  int check_every = 50;
  /// Anchor a tail closure at -infinity (needs p.spectral); otherwise zero closure.
  bool tail_closure = true;
};

/// Thrown by solve_profile when max_iter is reached; carries the last iterate.
class MaxIterError : public Error {
 public:
  MaxIterError(const std::string& what, WaveProfile last)
      : Error(ErrorCode::MaxIterExceeded, what), profile_(std::make_shared<WaveProfile>(std::move(last))) {}
  const WaveProfile& profile() const { return *profile_; }

 private:
  std::shared_ptr<WaveProfile> profile_;
};

/// Operator plan for one problem on one grid (convolution weights are reused).
class WaveOperator {
 public:
  WaveOperator(const ConvolutionProblem& p, const Grid& grid, double left_pad = 0.0);

  /// N[phi] on the grid. Left of t_min the closure supplies phi (zero when
  /// inactive); right of t_max phi is held at its last value.
  std::vector<double> apply(const std::vector<double>& phi, const TailClosure& closure = {}) const;

  /// Ratio N_lin[e^{lambda t}] / e^{lambda t} of the discretized linear operator
  /// with derivative weights, taken mid-grid.
  double discrete_transform(double lambda) const;

  const Grid& grid() const { return grid_; }
  int pad_points() const { return pad_; }

 private:
  const ConvolutionProblem* problem_;
  Grid grid_;
  int pad_ = 0;
  std::vector<GridConvolution> plans_;
};

/// N[phi] with zero left closure (or the profile's own closure when `use_closure`).
std::vector<double> apply_operator(const ConvolutionProblem& p, const WaveProfile& phi,
                                   bool use_closure = false);

/// Smallest positive root of kappa = sum mass(K_tau) g(kappa, tau) on (0, bound].
/// Throws Error(NoWave) when there is none.
double plateau(const ConvolutionProblem& p);

/// Root of the discrete characteristic ratio near lambda_l, so the tail
/// closure is consistent with the grid. Falls back to lambda_l.
double grid_consistent_lambda(const WaveOperator& op, const SpectralData& sd);

WaveProfile solve_profile(const ConvolutionProblem& p, const Grid& grid, const Init& init = {},
                          const SolveOptions& opts = {});

/// sup |phi - N[phi]| over grid points at least 10 steps from either end.
double residual(const ConvolutionProblem& p, const WaveProfile& phi);

}  // namespace wavefront
