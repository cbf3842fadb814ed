#include "wavefront/roots.hpp"

#include <algorithm>
#include <limits>

#include "wavefront/error.hpp"

namespace wavefront::roots {

double bisect(const std::function<double(double)>& f, double lo, double hi,
              const BisectOptions& opts) {
  double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (std::signbit(flo) == std::signbit(fhi)) {
    throw Error(ErrorCode::BracketFailure, "bisect: no sign change on bracket");
  }
  for (int i = 0; i < opts.max_iter; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi || hi - lo <= opts.x_tol * std::max(1.0, std::abs(mid))) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if (std::signbit(fm) == std::signbit(flo)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

Maximum golden_section_max(const std::function<double(double)>& f, double lo, double hi,
                           double x_tol, int max_iter) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < max_iter && (b - a) > x_tol * std::max(1.0, std::abs(a) + std::abs(b)); ++i) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    }
  }
  Maximum best{0.5 * (a + b), f(0.5 * (a + b))};
  for (double x : {lo, hi}) {
    const double v = f(x);
    if (std::isfinite(v) && v > best.value) best = {x, v};
  }
  return best;
}

Maximum maximize_concave(const std::function<double(double)>& f,
                         const std::function<double(double)>& df, double lo, double hi) {
  if (!df) return golden_section_max(f, lo, hi);
  const double dlo = df(lo);
  const double dhi = df(hi);
  if (dlo <= 0.0) return {lo, f(lo)};
  if (dhi >= 0.0) return {hi, f(hi)};
  const double x = bisect(df, lo, hi);
  return {x, f(x)};
}

std::optional<double> bracket_concave_max(const std::function<double(double)>& f,
                                          const std::function<double(double)>& df, double start,
                                          double cap) {
  double x = std::max(start, 1e-3);
  double prev = f(x * 0.5);
  while (x <= cap) {
    if (df) {
      if (df(x) < 0.0) return x;
    } else {
      const double v = f(x);
      if (v < prev) return x;
      prev = v;
    }
    x *= 2.0;
  }
  return std::nullopt;
}

}  // namespace wavefront::roots
