#pragma once

// Nonnegative convolution kernels K(s) on the real line, their bilateral
// Laplace transforms  L(z) = \int e^{-zs} K(s) ds  and convergence strips.

#include <complex>
#include <filesystem>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace wavefront {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

using cplx = std::complex<double>;

/// Open vertical strip sigma < Re z < gamma on which a transform converges.
/// Endpoints are extended reals; infinite ends are stored as IEEE infinities.
struct Strip {
  double sigma = -kInf;
  double gamma = kInf;
  /// Set when the strip is that of a compactly supported surrogate (tabulated
  /// data) rather than a property of the underlying kernel.
  bool compact_support_surrogate = false;

  bool contains(double x) const { return x > sigma && x < gamma; }
  bool empty() const { return !(sigma < gamma); }
};

Strip intersect(const Strip& a, const Strip& b);

enum class Direction {
  Right,  ///< supported on s >= shift, decaying as s -> +inf
  Left,   ///< supported on s <= shift, decaying as s -> -inf
};

struct Gaussian {
  double variance = 1.0;
  double mean = 0.0;
  double mass = 1.0;
};

/// amplitude * exp(-rate |s - shift|) on one side of `shift`.
struct OneSidedExponential {
  double amplitude = 1.0;
  double rate = 1.0;
  Direction direction = Direction::Right;
  double shift = 0.0;
};

/// Green's function of y'' - c y' - q y = -delta, shifted:
///   sigma^{-1} e^{nu (s-shift)} for s >= shift,  sigma^{-1} e^{mu (s-shift)} for s < shift,
/// where nu < 0 < mu solve z^2 - c z - q = 0 and sigma = mu - nu.
struct PiecewiseGreen {
  double c = 0.0;
  double q = 1.0;
  double shift = 0.0;
  double nu = 0.0;
  double mu = 0.0;
  double sigma = 0.0;
};

/// Discrete measure  sum_k w_k delta(s - o_k).
struct DiracComb {
  std::vector<double> offsets;
  std::vector<double> weights;
  /// Strip of the untruncated lattice sum when the comb is a truncation of an
  /// infinite sequence (Cauchy-Hadamard); absent for genuinely finite combs.
  std::optional<Strip> declared_strip;
  /// Total weight dropped by truncation.
  double truncation_error = 0.0;
};

/// Piecewise-linear kernel on a strictly increasing grid, zero outside it.
struct Tabulated {
  std::vector<double> t;
  std::vector<double> values;
};

class KernelComponent;

struct Convolved {
  std::shared_ptr<const KernelComponent> first;
  std::shared_ptr<const KernelComponent> second;
};

class KernelComponent {
 public:
  using Shape = std::variant<Gaussian, OneSidedExponential, PiecewiseGreen, DiracComb, Tabulated,
                             Convolved>;

  static KernelComponent gaussian(double variance, double mean = 0.0, double mass = 1.0);
  /// Amplitude defaults to `rate`, i.e. a unit-mass exponential.
  static KernelComponent exponential_onesided(double rate, Direction direction, double shift = 0.0,
                                              std::optional<double> amplitude = std::nullopt);
  static KernelComponent piecewise_green(double c, double q, double shift = 0.0);
  static KernelComponent dirac_comb(std::vector<double> offsets, std::vector<double> weights,
                                    std::optional<Strip> declared_strip = std::nullopt,
                                    double truncation_error = 0.0);
  static KernelComponent tabulated(std::vector<double> t, std::vector<double> values);
  static KernelComponent convolved(const KernelComponent& first, const KernelComponent& second);

  const Shape& shape() const { return shape_; }
  std::string shape_name() const;

  /// \int K(s) ds, computed once at construction.
  double mass() const { return mass_; }

  /// Maximal open strip of convergence of the Laplace transform.
  Strip abscissas() const;

  /// Bilateral Laplace transform. Closed form for analytic shapes, exact sum
  /// for combs, quadrature for tabulated data, product for convolutions.
  /// Throws Error(OutOfStrip) outside the strip.
  cplx laplace(cplx z) const;
  double laplace(double x) const { return laplace(cplx(x, 0.0)).real(); }

  /// d/dz of the transform.
  cplx laplace_derivative(cplx z) const;
  double laplace_derivative(double x) const { return laplace_derivative(cplx(x, 0.0)).real(); }

  /// Pointwise density value. Throws Error(InvalidKernel) for pure combs.
  double value(double s) const;
  bool has_density() const;

  /// \int_{s > x} K(s) ds.
  double mass_above(double x) const;

  /// Points where the density has kinks or jumps (finite set).
  std::vector<double> breakpoints() const;

  /// Interval outside of which at most eps * mass of the kernel lives.
  std::pair<double, double> support_window(double eps = 1e-14) const;

 private:
  explicit KernelComponent(Shape shape);
  Shape shape_;
  double mass_ = 0.0;
};

/// Independent quadrature route for the transform: integrates value(s) e^{-zs}
/// over the real line. Combs are handled by their exact sum.
cplx laplace_quadrature(const KernelComponent& k, cplx z, double rel_tol = 1e-12);

/// Green's kernels of the linear operators used by the model reductions.
struct GreenKernel {
  enum class Order {
    First,   ///< c v' = -q v + delta  (one-sided exponential)
    Second,  ///< v'' - c v' - q v = -delta (two-sided exponential)
  };

  Order order = Order::Second;
  double c = 0.0;
  double q = 1.0;
  double shift = 0.0;
  double nu = 0.0;     ///< negative root (second order) or pole -q/c (first order)
  double mu = 0.0;     ///< positive root (second order) or pole -q/c (first order)
  double sigma = 0.0;  ///< mu - nu = sqrt(c^2 + 4q) (second order); |c| (first order)

  static GreenKernel second_order(double c, double q, double shift = 0.0);
  static GreenKernel first_order(double c, double q, double shift = 0.0);

  double mass() const { return 1.0 / q; }
  KernelComponent as_kernel() const;
};

/// k * green as a lazily evaluated convolution. Throws Error(EmptyStrip) when
/// the two transforms have no common strip.
KernelComponent convolve_green(const KernelComponent& k, const GreenKernel& green);

/// Two-column CSV (t, value); '#' comment lines and blank lines are skipped.
KernelComponent load_tabulated_csv(const std::filesystem::path& path);

/// Cauchy-Hadamard estimate  -limsup_{k->inf} k^{-1} ln beta(-k)  from the
/// tail of a sampled sequence beta(-k), k = 1..n (entries may be zero).
double cauchy_hadamard_gamma(const std::vector<double>& beta_negative_tail);

}  // namespace wavefront
