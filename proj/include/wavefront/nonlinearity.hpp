#pragma once

// Birth and damping functions g(u) >= 0 with g(0) = 0 and their derivative
// statistics on bounded ranges.

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace wavefront {

class Nonlinearity {
 public:
  using Fn = std::function<double(double)>;

  /// rate * u * (1 - u / capacity)
  static Nonlinearity logistic(double rate, double capacity = 1.0);
  /// p * u / (1 + u^n)
  static Nonlinearity mackey_glass(double p, double n);
  static Nonlinearity linear(double slope);
  /// Piecewise-linear through (u_i, g_i); u_0 must be 0 with g_0 = 0.
  /// Constant extension beyond the last node.
  static Nonlinearity tabulated(std::vector<double> u, std::vector<double> g);
  static Nonlinearity identity() { return linear(1.0); }
  /// g(u) + beta u
  static Nonlinearity shifted(const Nonlinearity& g, double beta);
  /// beta u - f(u)
  static Nonlinearity damping_shift(const Nonlinearity& f, double beta);
  /// Arbitrary callable; `derivative` may be empty (central differences are used).
  static Nonlinearity custom(std::string kind, Fn value, Fn derivative = {});

  double operator()(double u) const { return value_(u); }
  /// Analytic derivative when registered, else a central difference with step 1e-6.
  double derivative(double u) const;
  double gprime0() const { return gprime0_; }
  bool has_analytic_derivative() const { return static_cast<bool>(derivative_); }
  bool is_linear() const { return linear_; }

  const std::string& kind() const { return kind_; }
  const std::map<std::string, double>& params() const { return params_; }

  struct Range {
    double inf;
    double sup;
  };
  /// inf and sup of g' over [lo, hi] from `samples` uniform points.
  Range derivative_range(double lo, double hi, int samples = 10000) const;
  /// sup |g'| on [0, M] (sampled).
  double lipschitz_on(double M, int samples = 10000) const;
  /// max of g on [0, M] (sampled).
  double max_on(double M, int samples = 10000) const;

 private:
  Nonlinearity() = default;
  std::string kind_;
  std::map<std::string, double> params_;
  Fn value_;
  Fn derivative_;
  double gprime0_ = 0.0;
  bool linear_ = false;
};

}  // namespace wavefront
