#include "wavefront/wavesolver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "wavefront/roots.hpp"

namespace wavefront {

namespace {

constexpr double kTailDecades = 36.0;  // pad so the fed tail drops by e^{-36}

double pad_length(const Grid& g, const TailClosure& cl) {
  if (!cl.active() || !(cl.lambda > 0.0)) return 0.0;
  return std::min(kTailDecades / cl.lambda, 4.0 * (g.t_max - g.t_min));
}

double interp(const std::vector<double>& t, const std::vector<double>& v, double x) {
  if (x <= t.front()) return x < t.front() ? 0.0 : v.front();
  if (x >= t.back()) return v.back();
  const auto it = std::upper_bound(t.begin(), t.end(), x);
  const std::size_t j = static_cast<std::size_t>(it - t.begin());
  const double w = (x - t[j - 1]) / (t[j] - t[j - 1]);
  return (1.0 - w) * v[j - 1] + w * v[j];
}

double init_value(const Init& init, double t, double kappa, double lambda_l) {
  const double x = t - init.shift;
  switch (init.kind) {
    case Init::Kind::CappedExponential: {
      const double lam = init.lambda > 0.0 ? init.lambda : lambda_l;
      const double cap = init.cap > 0.0 ? init.cap : 0.5 * kappa;
      return std::min(std::exp(lam * x), cap);
    }
    case Init::Kind::Tabulated:
      return interp(init.t, init.v, x);
    case Init::Kind::Zero:
      return 0.0;
  }
  return 0.0;
}

double sup_abs_diff(const std::vector<double>& a, const std::vector<double>& b, std::size_t margin = 0) {
  double d = 0.0;
  for (std::size_t i = margin; i + margin < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

[[noreturn]] void no_wave(const std::string& why, int iter) {
  std::ostringstream msg;
  msg << why << " (iteration " << iter << ")";
  throw Error(ErrorCode::NoWave, msg.str());
}

}  // namespace

Grid Grid::make(double t_min, double t_max, int n) {
  if (!(t_min < 0.0 && t_max > 0.0)) throw Error(ErrorCode::InvalidArgument, "grid needs t_min < 0 < t_max");
  if (n < 64) throw Error(ErrorCode::InvalidArgument, "grid needs n >= 64");
  return Grid{t_min, t_max, n};
}

double TailClosure::operator()(double t) const {
  if (!active()) return 0.0;
  double v = A * std::exp(lambda * t);
  if (k > 0) v *= std::pow(std::max(a - t, 0.0), k);
  return v;
}

double WaveProfile::at(double x) const {
  if (x < grid.t_min) return closure(x);
  if (x >= grid.t_max) return values.back();
  const double u = (x - grid.t_min) / grid.step();
  const int i = std::min(static_cast<int>(u), grid.n - 2);
  const double w = u - i;
  return (1.0 - w) * values[i] + w * values[i + 1];
}

std::optional<double> WaveProfile::crossing(double level) const {
  for (int i = 0; i < grid.n; ++i) {
    if (values[i] >= level) {
      if (i == 0) return grid.t_min;
      const double w = (level - values[i - 1]) / (values[i] - values[i - 1]);
      return grid.t(i - 1) + w * grid.step();
    }
  }
  return std::nullopt;
}

Init Init::capped_exponential(double lambda, double cap) {
  Init i;
  i.kind = Kind::CappedExponential;
  i.lambda = lambda;
  i.cap = cap;
  return i;
}

Init Init::tabulated(std::vector<double> t, std::vector<double> v) {
  if (t.size() != v.size() || t.size() < 2) throw Error(ErrorCode::InvalidArgument, "tabulated init needs >= 2 points");
  for (std::size_t j = 0; j < v.size(); ++j) {
    if (j + 1 < t.size() && !(t[j + 1] > t[j])) throw Error(ErrorCode::InvalidArgument, "init abscissas must increase");
    if (v[j] < 0.0) throw Error(ErrorCode::InvalidArgument, "init must be nonnegative");
  }
  Init i;
  i.kind = Kind::Tabulated;
  i.t = std::move(t);
  i.v = std::move(v);
  return i;
}

Init Init::previous(const WaveProfile& p) {
  std::vector<double> t(p.grid.n);
  for (int i = 0; i < p.grid.n; ++i) t[i] = p.t(i);
  return tabulated(std::move(t), p.values);
}

Init Init::zero() {
  Init i;
  i.kind = Kind::Zero;
  return i;
}

WaveOperator::WaveOperator(const ConvolutionProblem& p, const Grid& grid, double left_pad)
    : problem_(&p), grid_(grid) {
  pad_ = left_pad > 0.0 ? static_cast<int>(std::ceil(left_pad / grid.step())) : 0;
  for (const auto& a : p.atoms) plans_.emplace_back(a.kernel, grid.step());
}

std::vector<double> WaveOperator::apply(const std::vector<double>& phi, const TailClosure& closure) const {
  const double h = grid_.step();
  const std::size_t n = phi.size();
  std::vector<double> u(n + pad_);
  for (int i = 0; i < pad_; ++i) u[i] = closure(grid_.t_min - h * (pad_ - i));
  std::copy(phi.begin(), phi.end(), u.begin() + pad_);

  std::vector<double> out(n, 0.0);
  GridSignal sig;
  sig.t0 = grid_.t_min - h * pad_;
  sig.step = h;
  sig.values.resize(u.size());
  for (std::size_t j = 0; j < plans_.size(); ++j) {
    const auto& g = problem_->atoms[j].g;
    for (std::size_t i = 0; i < u.size(); ++i) sig.values[i] = g(u[i]);
    sig.right_value = g(phi.back());
    const auto r = plans_[j].apply(sig);
    for (std::size_t i = 0; i < n; ++i) out[i] += r[i + pad_];
  }
  return out;
}

double WaveOperator::discrete_transform(double lambda) const {
  const double h = grid_.step();
  // exponent kept within +-40 to avoid overflow in the recursions
  const double half = std::abs(lambda) > 0.0 ? 40.0 / (std::abs(lambda) * h) : 1e9;
  const std::size_t m = static_cast<std::size_t>(std::min<double>(grid_.n + pad_, 2.0 * half));
  GridSignal sig;
  sig.t0 = grid_.t_min - h * pad_;
  sig.step = h;
  sig.values.resize(m);
  const std::size_t mid = m / 2;
  for (std::size_t i = 0; i < m; ++i) sig.values[i] = std::exp(lambda * h * (static_cast<double>(i) - mid));
  sig.right_value = sig.values.back();
  double sum = 0.0;
  for (std::size_t j = 0; j < plans_.size(); ++j) {
    sum += problem_->atoms[j].weight_derivative * plans_[j].apply(sig)[mid];
  }
  return sum;
}

std::vector<double> apply_operator(const ConvolutionProblem& p, const WaveProfile& phi, bool use_closure) {
  const TailClosure cl = use_closure ? phi.closure : TailClosure{};
  WaveOperator op(p, phi.grid, pad_length(phi.grid, cl));
  return op.apply(phi.values, cl);
}

double plateau(const ConvolutionProblem& p) {
  const double M = p.bound;
  auto F = [&](double u) { return p.constant_map(u) - u; };
  const int samples = 4000;
  double prev_u = 0.0;
  for (int i = 1; i <= samples; ++i) {
    const double u = M * i / samples;
    const double f = F(u);
    if (f == 0.0) return u;
    if (f < 0.0) {
      if (i == 1) break;
      return roots::bisect(F, prev_u, u);
    }
    prev_u = u;
  }
  throw Error(ErrorCode::NoWave, "no positive constant state kappa = F(kappa) in (0, M]");
}

double grid_consistent_lambda(const WaveOperator& op, const SpectralData& sd) {
  if (sd.critical) return sd.lambda_l;
  auto f = [&](double x) { return 1.0 - op.discrete_transform(x); };
  const double lo = 0.9 * sd.lambda_l, hi = sd.argmax;
  try {
    if (f(lo) < 0.0 && f(hi) > 0.0) return roots::bisect(f, lo, hi);
  } catch (const Error&) {
  }
  return sd.lambda_l;
}

WaveProfile solve_profile(const ConvolutionProblem& p, const Grid& grid, const Init& init,
                          const SolveOptions& opts) {
  if (!(opts.damping > 0.0 && opts.damping <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "damping must lie in (0, 1]");
  }
  const double kappa = plateau(p);
  const bool have_tail = opts.tail_closure && p.spectral.has_value();
  const double lambda_l = p.spectral ? p.spectral->lambda_l : 0.0;
  if (init.kind == Init::Kind::CappedExponential && !(init.lambda > 0.0) && !(lambda_l > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "capped exponential init needs lambda_l or an explicit rate");
  }

  WaveProfile prof;
  prof.grid = grid;
  prof.c = p.c;
  prof.plateau = kappa;
  prof.convergence.damping_used = opts.damping;
  prof.values.resize(grid.n);
  for (int i = 0; i < grid.n; ++i) prof.values[i] = init_value(init, grid.t(i), kappa, lambda_l);

  TailClosure cl;
  const auto tc = prof.crossing(0.5 * kappa);
  if (have_tail && tc) {
    cl.lambda = lambda_l;
    cl.k = p.spectral->critical ? 1 : 0;
    cl.a = *tc + 1.0;
    cl.A = 1.0;  // provisional, so pad_length sees an active closure
  }
  WaveOperator op(p, grid, pad_length(grid, cl));
  if (cl.active()) {
    cl.lambda = grid_consistent_lambda(op, *p.spectral);
    cl.A = 0.5 * kappa * std::exp(-cl.lambda * *tc) / std::pow(cl.a - *tc, cl.k);
  }
  prof.closure = cl;

  const double span = grid.t_max - grid.t_min;
  auto& phi = prof.values;
  for (int it = 1; it <= opts.max_iter; ++it) {
    const auto next = op.apply(phi, cl);
    const double update = sup_abs_diff(next, phi);
    double lo = kInf, hi = -kInf;
    for (int i = 0; i < grid.n; ++i) {
      phi[i] = (1.0 - opts.damping) * phi[i] + opts.damping * next[i];
      lo = std::min(lo, phi[i]);
      hi = std::max(hi, phi[i]);
    }
    prof.convergence.iterations = it;
    if (lo < -1e-12 * kappa) {
      std::ostringstream msg;
      msg << "profile value " << lo << " < 0 at iteration " << it;
      throw Error(ErrorCode::NegativeValues, msg.str());
    }
    const bool done = update < opts.tol;
    if (done || it == 1 || it % opts.check_every == 0) {
      if (hi < 1e-3 * kappa) no_wave("profile collapsed to zero", it);
      if (hi - lo < 1e-3 * kappa) no_wave("profile converged to a constant", it);
      const auto x = prof.crossing(0.5 * kappa);
      if (!x) no_wave("profile never reaches kappa/2", it);
      if (phi.front() > 1e-3 * kappa) no_wave("front pinned at the left boundary", it);
      if (*x > grid.t_max - 0.1 * span) no_wave("front drifted to the right boundary", it);
    }
    if (done) {
      prof.convergence.converged = true;
      break;
    }
  }
  prof.convergence.final_residual = residual(p, prof);
  if (!prof.convergence.converged) {
    std::ostringstream msg;
    msg << "no convergence after " << opts.max_iter << " iterations (residual "
        << prof.convergence.final_residual << ")";
    throw MaxIterError(msg.str(), prof);
  }
  return prof;
}

double residual(const ConvolutionProblem& p, const WaveProfile& phi) {
  const auto n = apply_operator(p, phi, true);
  return sup_abs_diff(n, phi.values, 10);
}

}  // namespace wavefront
