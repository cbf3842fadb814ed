#pragma once

// Characteristic function chi(z) = 1 - sum_tau w(tau) K(z, tau), its real
// zeros, minimal speeds by the double-root condition, and a zero scan of the
// strip between the real zeros.

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wavefront/kernel.hpp"

namespace wavefront {

enum class WeightKind {
  Derivative,  ///< w = g'(0, tau)
  Lipschitz,   ///< w = lambda(tau), a Lipschitz constant of g(., tau)
};

struct WeightedKernel {
  KernelComponent kernel;
  double weight;
};

class CharacteristicFunction {
 public:
  explicit CharacteristicFunction(std::vector<WeightedKernel> components,
                                  WeightKind kind = WeightKind::Derivative);

  const std::vector<WeightedKernel>& components() const { return components_; }
  WeightKind kind() const { return kind_; }
  /// Intersection of the component strips.
  const Strip& strip() const { return strip_; }

  cplx operator()(cplx z) const;
  double operator()(double x) const;
  double derivative(double x) const;

 private:
  std::vector<WeightedKernel> components_;
  WeightKind kind_;
  Strip strip_;
};

inline cplx chi(const CharacteristicFunction& cf, cplx z) { return cf(z); }

struct SpectralData {
  double lambda_l = 0.0;
  std::optional<double> lambda_r;
  double lambda_rK = 0.0;  ///< lambda_r when present, gamma_K otherwise
  double gamma_K = kInf;
  double sigma_K = -kInf;
  double gamma_phi = 0.0;  ///< predicted abscissa of the profile, equal to lambda_l
  bool critical = false;
  double chi_prime_at_ll = 0.0;
  double argmax = 0.0;  ///< maximizer of chi on (0, gamma_K)
  double chi_max = 0.0;
  /// Whether chi(gamma_K-) is known to be nonzero: "infinite_strip",
  /// "resolved" or "undetermined" (compact-support surrogate strips).
  std::string gamma_limit = "infinite_strip";
};

struct RootOptions {
  double root_tol = 1e-10;          ///< |chi| tolerance for a double root at the maximizer
  double multiplicity_tol = 1e-5;   ///< critical iff lambda_r - lambda_l < tol * max(1, lambda_l)
  double doubling_cap = 1e6;        ///< upper search limit when gamma_K = +inf
};

/// Real zeros 0 < lambda_l <= lambda_r of a concave chi with chi(0) < 0.
/// Throws Error(NoRoots) when chi < 0 on (0, gamma_K), Error(StripTooNarrow)
/// when gamma_K <= 0 and Error(HypothesisViolation) when chi(0) >= 0.
SpectralData real_roots(const CharacteristicFunction& cf, const RootOptions& opts = {});

/// Maximum of a concave function of z on (0, gamma). Used by real_roots and
/// min_speed. `df` may be empty.
struct ConcaveMax {
  double x = 0.0;
  double value = 0.0;
  bool at_upper = false;   ///< maximizer sits at the upper search limit
  double upper = 0.0;      ///< upper search limit used
};
ConcaveMax concave_max_on_strip(const std::function<double(double)>& f,
                                const std::function<double(double)>& df, double gamma,
                                double cap = 1e6);

using ModelChi = std::function<double(double z, double c)>;

struct MinSpeed {
  double c_star = 0.0;
  double z_star = 0.0;
};

/// Smallest c with max_z chi(z, c) >= 0, by bisection on c with the inner
/// concave maximization. `strip_of_c` gives gamma_K(c); `dchi_dz` is optional.
/// Throws Error(BracketFailure) if the bracket does not straddle the change.
MinSpeed min_speed(const ModelChi& model_chi, const std::function<double(double c)>& gamma_of_c,
                   std::pair<double, double> c_bracket, const ModelChi& dchi_dz = {});

struct ScanOptions {
  double y_max = 50.0;
  int nx = 201;
  int ny = 2001;
  double eps = 1e-3;           ///< inset of the interior grid and |Im z| band excluded
  double zero_tol = 1e-3;
  double boundary_eps = 0.1;   ///< |Im z| band excluded on the boundary lines
  double boundary_tol = 1e-12;
  double open_width = 10.0;    ///< scan width used when lambda_rK = +inf
};

struct ScanReport {
  double min_abs_chi = kInf;
  cplx argmin{};
  double boundary_min_abs_chi = kInf;
  cplx boundary_argmin{};
  double x_min = 0.0, x_max = 0.0;
  double y_max = 0.0;
  int nx = 0, ny = 0;
  double eps = 0.0;
  std::vector<double> boundary_lines;
  bool empty = false;
  bool pass = false;
};

ScanReport strip_zero_scan(const CharacteristicFunction& cf, const SpectralData& sd,
                           const ScanOptions& opts = {});

struct Margin {
  double m;
  double value;
};

/// Maximizer of chi_1 on (0, lambda_rK) when chi_1 there is >= 0.
std::optional<Margin> chi1_margin(const CharacteristicFunction& cf1, const SpectralData& sd);

}  // namespace wavefront
