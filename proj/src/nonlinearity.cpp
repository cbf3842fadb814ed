#include "wavefront/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "wavefront/error.hpp"

namespace wavefront {

namespace {

constexpr double kDiffStep = 1e-6;

}  // namespace

Nonlinearity Nonlinearity::logistic(double rate, double capacity) {
  if (!(rate > 0.0) || !(capacity > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "logistic needs rate > 0 and capacity > 0");
  }
  Nonlinearity g;
  g.kind_ = "logistic";
  g.params_ = {{"rate", rate}, {"capacity", capacity}};
  g.value_ = [=](double u) { return rate * u * (1.0 - u / capacity); };
  g.derivative_ = [=](double u) { return rate * (1.0 - 2.0 * u / capacity); };
  g.gprime0_ = rate;
  return g;
}

Nonlinearity Nonlinearity::mackey_glass(double p, double n) {
  if (!(p > 0.0) || !(n > 0.0)) throw Error(ErrorCode::InvalidArgument, "mackey_glass needs p, n > 0");
  Nonlinearity g;
  g.kind_ = "mackey_glass";
  g.params_ = {{"p", p}, {"n", n}};
  g.value_ = [=](double u) { return p * u / (1.0 + std::pow(u, n)); };
  g.derivative_ = [=](double u) {
    const double un = std::pow(u, n);
    return p * (1.0 + (1.0 - n) * un) / ((1.0 + un) * (1.0 + un));
  };
  g.gprime0_ = p;
  return g;
}

Nonlinearity Nonlinearity::linear(double slope) {
  Nonlinearity g;
  g.kind_ = "linear";
  g.params_ = {{"slope", slope}};
  g.value_ = [=](double u) { return slope * u; };
  g.derivative_ = [=](double) { return slope; };
  g.gprime0_ = slope;
  g.linear_ = true;
  return g;
}

Nonlinearity Nonlinearity::tabulated(std::vector<double> u, std::vector<double> v) {
  if (u.size() != v.size() || u.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "tabulated nonlinearity needs >= 2 matching points");
  }
  if (u.front() != 0.0 || v.front() != 0.0) {
    throw Error(ErrorCode::InvalidArgument, "tabulated nonlinearity must start at (0, 0)");
  }
  for (std::size_t i = 0; i + 1 < u.size(); ++i) {
    if (!(u[i + 1] > u[i])) throw Error(ErrorCode::InvalidArgument, "tabulated u must increase");
  }
  Nonlinearity g;
  g.kind_ = "tabulated";
  auto uu = std::make_shared<std::vector<double>>(std::move(u));
  auto vv = std::make_shared<std::vector<double>>(std::move(v));
  g.value_ = [uu, vv](double x) {
    const auto& a = *uu;
    const auto& b = *vv;
    if (x <= 0.0) return (b[1] - b[0]) / (a[1] - a[0]) * x;
    if (x >= a.back()) return b.back();
    const auto it = std::upper_bound(a.begin(), a.end(), x);
    const std::size_t j = static_cast<std::size_t>(it - a.begin());
    const double w = (x - a[j - 1]) / (a[j] - a[j - 1]);
    return (1.0 - w) * b[j - 1] + w * b[j];
  };
  g.derivative_ = [uu, vv](double x) {
    const auto& a = *uu;
    const auto& b = *vv;
    if (x >= a.back()) return 0.0;
    if (x < a[1]) return (b[1] - b[0]) / (a[1] - a[0]);
    const auto it = std::upper_bound(a.begin(), a.end(), x);
    const std::size_t j = static_cast<std::size_t>(it - a.begin());
    return (b[j] - b[j - 1]) / (a[j] - a[j - 1]);
  };
  g.gprime0_ = ((*vv)[1] - (*vv)[0]) / ((*uu)[1] - (*uu)[0]);
  g.params_ = {{"points", static_cast<double>(uu->size())}};
  return g;
}

Nonlinearity Nonlinearity::shifted(const Nonlinearity& base, double beta) {
  Nonlinearity g;
  g.kind_ = "shifted(" + base.kind_ + ")";
  g.params_ = base.params_;
  g.params_["beta"] = beta;
  const Nonlinearity b = base;
  g.value_ = [b, beta](double u) { return b(u) + beta * u; };
  g.derivative_ = [b, beta](double u) { return b.derivative(u) + beta; };
  g.gprime0_ = base.gprime0_ + beta;
  g.linear_ = base.linear_;
  return g;
}

Nonlinearity Nonlinearity::damping_shift(const Nonlinearity& f, double beta) {
  Nonlinearity g;
  g.kind_ = "damping_shift(" + f.kind_ + ")";
  g.params_ = f.params_;
  g.params_["beta"] = beta;
  const Nonlinearity b = f;
  g.value_ = [b, beta](double u) { return beta * u - b(u); };
  g.derivative_ = [b, beta](double u) { return beta - b.derivative(u); };
  g.gprime0_ = beta - f.gprime0_;
  g.linear_ = f.linear_;
  return g;
}

Nonlinearity Nonlinearity::custom(std::string kind, Fn value, Fn derivative) {
  Nonlinearity g;
  g.kind_ = std::move(kind);
  g.value_ = std::move(value);
  g.derivative_ = std::move(derivative);
  if (g.derivative_) {
    g.gprime0_ = g.derivative_(0.0);
  } else {
    g.gprime0_ = (g.value_(kDiffStep) - g.value_(0.0)) / kDiffStep;
  }
  return g;
}

double Nonlinearity::derivative(double u) const {
  if (derivative_) return derivative_(u);
  const double lo = std::max(0.0, u - kDiffStep);
  return (value_(u + kDiffStep) - value_(lo)) / (u + kDiffStep - lo);
}

Nonlinearity::Range Nonlinearity::derivative_range(double lo, double hi, int samples) const {
  Range r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (int i = 0; i <= samples; ++i) {
    const double u = lo + (hi - lo) * i / samples;
    const double d = derivative(u);
    r.inf = std::min(r.inf, d);
    r.sup = std::max(r.sup, d);
  }
  return r;
}

double Nonlinearity::lipschitz_on(double M, int samples) const {
  const Range r = derivative_range(0.0, M, samples);
  return std::max(std::abs(r.inf), std::abs(r.sup));
}

double Nonlinearity::max_on(double M, int samples) const {
  double m = 0.0;
  for (int i = 0; i <= samples; ++i) m = std::max(m, value_(M * i / samples));
  return m;
}

}  // namespace wavefront
