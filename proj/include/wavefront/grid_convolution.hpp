#pragma once

// Convolution of a kernel with a piecewise-linear signal sampled on a uniform
// grid:  out(t_i) = \int K(s) f(t_i - s) ds.
//
// The signal is zero left of the first node and equal to `right_value` right
// of the last node. Exponential and Green shapes use exact recursive filters;
// smooth densities use precomputed hat-function weights; combs interpolate.

#include <cstddef>
#include <memory>
#include <vector>

#include "wavefront/kernel.hpp"

namespace wavefront {

struct GridSignal {
  double t0 = 0.0;
  double step = 1.0;
  std::vector<double> values;
  double right_value = 0.0;

  std::size_t size() const { return values.size(); }
  double t(std::size_t i) const { return t0 + step * static_cast<double>(i); }
  /// Piecewise-linear evaluation with the closures described above.
  double at(double x) const;
};

/// Reusable convolution plan for one kernel on one grid spacing. Hat weights
/// for density shapes are computed once at construction.
class GridConvolution {
 public:
  struct Stage;

  GridConvolution(const KernelComponent& kernel, double step);

  std::vector<double> apply(const GridSignal& f) const;

  const KernelComponent& kernel() const { return kernel_; }

 private:
  KernelComponent kernel_;
  double step_;
  std::vector<std::shared_ptr<const Stage>> stages_;
};

}  // namespace wavefront
