#pragma once

// Scalar bracketing tools used by the characteristic-function and speed
// computations. All routines assume the caller supplies a valid bracket.

#include <cmath>
#include <functional>
#include <optional>

namespace wavefront::roots {

struct BisectOptions {
  double x_tol = 1e-15;
  int max_iter = 400;
};

/// Bisection for a sign change of f on [lo, hi]. f(lo) and f(hi) must have
/// opposite signs (or one of them vanish). Returns the midpoint of the final
/// bracket.
double bisect(const std::function<double(double)>& f, double lo, double hi,
              const BisectOptions& opts = {});

struct Maximum {
  double x;
  double value;
};

/// Golden-section search for the maximizer of a unimodal f on [lo, hi].
Maximum golden_section_max(const std::function<double(double)>& f, double lo, double hi,
                           double x_tol = 1e-12, int max_iter = 500);

/// Maximizer of a concave function on [lo, hi]. With a derivative the
/// stationary point is located by bisection on f' (decreasing); without one,
/// golden-section search is used. Boundary maxima are returned as-is.
Maximum maximize_concave(const std::function<double(double)>& f,
                         const std::function<double(double)>& df, double lo, double hi);

/// Extends hi by doubling (starting from `start`) until f starts decreasing or
/// `cap` is exceeded. Returns the bracket end, or nullopt when f is still
/// increasing at `cap`.
std::optional<double> bracket_concave_max(const std::function<double(double)>& f,
                                          const std::function<double(double)>& df, double start,
                                          double cap);

}  // namespace wavefront::roots
