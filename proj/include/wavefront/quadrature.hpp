#pragma once

// Adaptive Gauss-Kronrod (7/15) integration for real and complex integrands,
// with maps for semi-infinite and infinite ranges.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <queue>
#include <sstream>
#include <vector>

#include "wavefront/error.hpp"

namespace wavefront::quad {

struct Options {
  double rel_tol = 1e-12;
  double abs_tol = 0.0;
  int max_segments = 4000;
};

template <class T>
struct Result {
  T value{};
  double error = 0.0;
  int segments = 0;
};

namespace detail {

inline constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const std::complex<double>& v) { return std::abs(v); }

template <class T>
struct Segment {
  double a, b;
  T value;
  double error;
  double abs_value;
  bool operator<(const Segment& other) const { return error < other.error; }
};

template <class T, class F>
Segment<T> gk15(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const T fc = f(center);
  T kronrod = fc * kWgk[7];
  T gauss = fc * kWg[3];
  double abs_sum = magnitude(fc) * kWgk[7];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const T f1 = f(center - dx);
    const T f2 = f(center + dx);
    kronrod += (f1 + f2) * kWgk[j];
    abs_sum += (magnitude(f1) + magnitude(f2)) * kWgk[j];
    if (j % 2 == 1) gauss += (f1 + f2) * kWg[j / 2];
  }
  Segment<T> s{a, b, kronrod * half, magnitude(kronrod - gauss) * std::abs(half),
               abs_sum * std::abs(half)};
  return s;
}

}  // namespace detail

/// Globally adaptive integration of f over the finite interval [a, b].
/// Throws Error(QuadratureFailure) when the tolerance cannot be met within
/// opts.max_segments subdivisions.
template <class F>
auto integrate(F&& f, double a, double b, const Options& opts = {})
    -> Result<decltype(f(a))> {
  using T = decltype(f(a));
  if (a == b) return {};
  if (!std::isfinite(a) || !std::isfinite(b)) {
    throw Error(ErrorCode::QuadratureFailure, "integrate: non-finite limits");
  }
  std::priority_queue<detail::Segment<T>> heap;
  auto first = detail::gk15<T>(f, a, b);
  T total = first.value;
  double total_err = first.error;
  double total_abs = first.abs_value;
  heap.push(first);
  int segments = 1;
  const double roundoff = 50.0 * std::numeric_limits<double>::epsilon();
  auto tolerance = [&] {
    return std::max({opts.abs_tol, opts.rel_tol * detail::magnitude(total), roundoff * total_abs});
  };
  while (total_err > tolerance()) {
    if (segments >= opts.max_segments) {
      std::ostringstream msg;
      msg << "tolerance not met on [" << a << ", " << b << "] after " << segments
          << " segments (error estimate " << total_err << ")";
      throw Error(ErrorCode::QuadratureFailure, msg.str());
    }
    auto worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    auto left = detail::gk15<T>(f, worst.a, mid);
    auto right = detail::gk15<T>(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    total_abs += left.abs_value + right.abs_value - worst.abs_value;
    heap.push(left);
    heap.push(right);
    ++segments;
    if (!std::isfinite(total_err)) {
      throw Error(ErrorCode::QuadratureFailure, "integrate: non-finite integrand");
    }
  }
  // Re-sum from the segments to shed accumulated cancellation in `total`.
  T resum{};
  double err = 0.0;
  while (!heap.empty()) {
    resum += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  return {resum, err, segments};
}

/// Integral over [a, +inf) via s = a + u/(1-u).
template <class F>
auto integrate_upper(F&& f, double a, const Options& opts = {}) -> Result<decltype(f(a))> {
  using T = decltype(f(a));
  auto mapped = [&](double u) -> T {
    const double one_minus = 1.0 - u;
    const double s = a + u / one_minus;
    const T v = f(s);
    if (detail::magnitude(v) == 0.0) return T{};
    return v / (one_minus * one_minus);
  };
  return integrate(mapped, 0.0, 1.0, opts);
}

/// Integral over (-inf, b] via s = b - u/(1-u).
template <class F>
auto integrate_lower(F&& f, double b, const Options& opts = {}) -> Result<decltype(f(b))> {
  using T = decltype(f(b));
  auto mapped = [&](double u) -> T {
    const double one_minus = 1.0 - u;
    const double s = b - u / one_minus;
    const T v = f(s);
    if (detail::magnitude(v) == 0.0) return T{};
    return v / (one_minus * one_minus);
  };
  return integrate(mapped, 0.0, 1.0, opts);
}

/// Integral over an arbitrary (possibly infinite) interval, split at the
/// supplied finite breakpoints so kinks never fall inside a panel.
template <class F>
auto integrate_pieces(F&& f, double a, double b, std::vector<double> breaks,
                      const Options& opts = {}) -> Result<decltype(f(0.0))> {
  using T = decltype(f(0.0));
  std::erase_if(breaks, [&](double x) { return !(x > a && x < b) || !std::isfinite(x); });
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  std::vector<double> nodes;
  nodes.push_back(a);
  nodes.insert(nodes.end(), breaks.begin(), breaks.end());
  nodes.push_back(b);
  if (!std::isfinite(a) && !std::isfinite(b) && nodes.size() == 2) {
    nodes = {a, 0.0, b};
  }
  Result<T> out;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    const double lo = nodes[i];
    const double hi = nodes[i + 1];
    Result<T> part;
    if (std::isinf(lo) && std::isinf(hi)) {
      throw Error(ErrorCode::QuadratureFailure, "integrate_pieces: doubly infinite panel");
    } else if (std::isinf(lo)) {
      part = integrate_lower(f, hi, opts);
    } else if (std::isinf(hi)) {
      part = integrate_upper(f, lo, opts);
    } else {
      part = integrate(f, lo, hi, opts);
    }
    out.value += part.value;
    out.error += part.error;
    out.segments += part.segments;
  }
  return out;
}

}  // namespace wavefront::quad
