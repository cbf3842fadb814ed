#include "wavefront/grid_convolution.hpp"

#include <cmath>

#include "wavefront/error.hpp"
#include "wavefront/quadrature.hpp"

namespace wavefront {

namespace {

// \int_0^L e^{-r v} dv  and  \int_0^L (v/L) e^{-r v} dv.
double moment0(double r, double L) {
  const double rho = r * L;
  if (std::abs(rho) < 1e-8) return L * (1.0 - 0.5 * rho);
  return -std::expm1(-rho) / r;
}

double moment1(double r, double L) {
  const double rho = r * L;
  if (std::abs(rho) < 1e-3) {
    return L * (0.5 - rho / 3.0 + rho * rho / 8.0 - rho * rho * rho / 30.0 +
                rho * rho * rho * rho / 144.0);
  }
  return L * (1.0 - (1.0 + rho) * std::exp(-rho)) / (rho * rho);
}

// Causal step: \int_{x}^{x+L} e^{-r(x+L-u)} f(u) du, f linear from fa to fb.
double causal_step(double r, double L, double fa, double fb) {
  return fb * moment0(r, L) + (fa - fb) * moment1(r, L);
}

// Anti-causal step: \int_{x}^{x+L} e^{-r(u-x)} f(u) du.
double anticausal_step(double r, double L, double fa, double fb) {
  return fa * moment0(r, L) + (fb - fa) * moment1(r, L);
}

struct ShiftIndex {
  long offset;  // floor(-shift / h)
  double theta; // fractional part in [0, 1)
};

ShiftIndex split_shift(double shift, double h) {
  const double q = -shift / h;
  double fl = std::floor(q);
  double theta = q - fl;
  if (theta > 1.0 - 1e-12) {
    fl += 1.0;
    theta = 0.0;
  }
  return {static_cast<long>(fl), theta};
}

}  // namespace

double GridSignal::at(double x) const {
  const std::size_t n = values.size();
  if (n == 0) return 0.0;
  const double q = (x - t0) / step;
  if (q < -1.0) return 0.0;
  if (q < 0.0) return (1.0 + q) * values[0];
  if (q >= static_cast<double>(n - 1)) return right_value;
  const auto j = static_cast<std::size_t>(q);
  const double w = q - static_cast<double>(j);
  return (1.0 - w) * values[j] + w * values[j + 1];
}

struct GridConvolution::Stage {
  enum class Kind { Exponential, Comb, Hat } kind;
  double mass = 0.0;
  // Exponential
  double amplitude = 0.0, rate = 0.0, shift = 0.0;
  Direction direction = Direction::Right;
  // Comb
  std::vector<double> offsets, weights;
  // Hat
  long m_lo = 0;
  std::vector<double> hat;        // W_m, m = m_lo ..
  std::vector<double> hat_cumul;  // partial sums of hat

  GridSignal apply(const GridSignal& f, double h) const;
};

namespace {

using StagePtr = std::shared_ptr<const GridConvolution::Stage>;

}  // namespace

GridSignal GridConvolution::Stage::apply(const GridSignal& f, double h) const {
  const std::size_t n = f.size();
  GridSignal out{f.t0, f.step, std::vector<double>(n, 0.0), mass * f.right_value};
  const double R = f.right_value;
  switch (kind) {
    case Kind::Comb: {
      for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (std::size_t k = 0; k < offsets.size(); ++k) sum += weights[k] * f.at(f.t(i) - offsets[k]);
        out.values[i] = sum;
      }
      break;
    }
    case Kind::Hat: {
      const long nn = static_cast<long>(n);
      const long m_hi = m_lo + static_cast<long>(hat.size()) - 1;
      const auto& v = f.values;
      for (long i = 0; i < nn; ++i) {
        double sum = 0.0;
        // Nodes j >= n carry the right closure value.
        const long m_right = std::min(i - nn, m_hi);
        if (m_right >= m_lo) sum += R * hat_cumul[static_cast<std::size_t>(m_right - m_lo)];
        const long m_start = std::max(m_lo, i - nn + 1);
        const long m_end = std::min(m_hi, i);
        for (long m = m_start; m <= m_end; ++m) {
          sum += hat[static_cast<std::size_t>(m - m_lo)] * v[static_cast<std::size_t>(i - m)];
        }
        out.values[i] = sum;
      }
      break;
    }
    case Kind::Exponential: {
      // Work on the signal extended by one zero node at t0 - h, so the left
      // closure is continuous (matches GridSignal::at and the hat weights).
      std::vector<double> v(n + 1, 0.0);
      std::copy(f.values.begin(), f.values.end(), v.begin() + 1);
      const double r = rate;
      const double decay = std::exp(-r * h);
      ShiftIndex si = split_shift(shift, h);
      si.offset += 1;
      const long nn = static_cast<long>(n) + 1;
      std::vector<double> node(n + 1, 0.0);
      if (direction == Direction::Right) {
        for (std::size_t i = 0; i < n; ++i) {
          node[i + 1] = decay * node[i] + causal_step(r, h, v[i], v[i + 1]);
        }
        const double Lf = si.theta * h;
        const double dec_f = std::exp(-r * Lf);
        for (long i = 0; i + 1 < nn; ++i) {
          const long j = i + si.offset;
          double e;
          if (j < 0) {
            e = 0.0;
          } else if (j >= nn - 1) {
            const double dx = static_cast<double>(j - (nn - 1)) * h + Lf;
            e = node[n] * std::exp(-r * dx) + R * moment0(r, dx);
          } else {
            const auto ju = static_cast<std::size_t>(j);
            const double fx = v[ju] + si.theta * (v[ju + 1] - v[ju]);
            e = node[ju] * dec_f + causal_step(r, Lf, v[ju], fx);
          }
          out.values[static_cast<std::size_t>(i)] = amplitude * e;
        }
      } else {
        node[n] = R / r;
        for (std::size_t i = n; i-- > 0;) {
          node[i] = decay * node[i + 1] + anticausal_step(r, h, v[i], v[i + 1]);
        }
        const double Lb = (1.0 - si.theta) * h;
        const double dec_b = std::exp(-r * Lb);
        for (long i = 0; i + 1 < nn; ++i) {
          const long j = i + si.offset;
          double g;
          if (j >= nn - 1) {
            g = R / r;
          } else if (j < 0) {
            const double dx = static_cast<double>(-j) * h - si.theta * h;
            g = node[0] * std::exp(-r * dx);
          } else {
            const auto ju = static_cast<std::size_t>(j);
            if (si.theta == 0.0) {
              g = node[ju];
            } else {
              const double fx = v[ju] + si.theta * (v[ju + 1] - v[ju]);
              g = dec_b * node[ju + 1] + anticausal_step(r, Lb, fx, v[ju + 1]);
            }
          }
          out.values[static_cast<std::size_t>(i)] = amplitude * g;
        }
      }
      break;
    }
  }
  return out;
}

namespace {

void flatten(const KernelComponent& k, double h, std::vector<StagePtr>& out) {
  using Stage = GridConvolution::Stage;
  const auto& shape = k.shape();
  if (const auto* c = std::get_if<Convolved>(&shape)) {
    flatten(*c->first, h, out);
    flatten(*c->second, h, out);
    return;
  }
  if (const auto* e = std::get_if<OneSidedExponential>(&shape)) {
    auto s = std::make_shared<Stage>();
    s->kind = Stage::Kind::Exponential;
    s->mass = k.mass();
    s->amplitude = e->amplitude;
    s->rate = e->rate;
    s->shift = e->shift;
    s->direction = e->direction;
    out.push_back(s);
    return;
  }
  if (const auto* g = std::get_if<PiecewiseGreen>(&shape)) {
    // Right- plus left-decaying exponential, both fed the same input.
    auto right = std::make_shared<Stage>();
    right->kind = Stage::Kind::Exponential;
    right->amplitude = 1.0 / g->sigma;
    right->rate = -g->nu;
    right->shift = g->shift;
    right->direction = Direction::Right;
    right->mass = right->amplitude / right->rate;
    auto left = std::make_shared<Stage>(*right);
    left->rate = g->mu;
    left->direction = Direction::Left;
    left->mass = left->amplitude / left->rate;
    // Marker: a null entry followed by two stages means "sum of the next two".
    out.push_back(nullptr);
    out.push_back(right);
    out.push_back(left);
    return;
  }
  if (const auto* d = std::get_if<DiracComb>(&shape)) {
    auto s = std::make_shared<Stage>();
    s->kind = Stage::Kind::Comb;
    s->mass = k.mass();
    s->offsets = d->offsets;
    s->weights = d->weights;
    out.push_back(s);
    return;
  }
  // Density shapes: hat-function weights W_m = \int K(s) hat(m - s/h) ds.
  auto s = std::make_shared<Stage>();
  s->kind = Stage::Kind::Hat;
  s->mass = k.mass();
  auto [lo, hi] = k.support_window(1e-16);
  const long m_lo = static_cast<long>(std::floor(lo / h)) - 1;
  const long m_hi = static_cast<long>(std::ceil(hi / h)) + 1;
  s->m_lo = m_lo;
  const auto breaks = k.breakpoints();
  quad::Options opts;
  opts.rel_tol = 1e-12;
  opts.abs_tol = 1e-18;
  double cumul = 0.0;
  for (long m = m_lo; m <= m_hi; ++m) {
    const double a = (static_cast<double>(m) - 1.0) * h;
    const double b = (static_cast<double>(m) + 1.0) * h;
    std::vector<double> br{static_cast<double>(m) * h};
    for (double x : breaks) {
      if (x > a && x < b) br.push_back(x);
    }
    auto f = [&](double x) { return k.value(x) * (1.0 - std::abs(x / h - static_cast<double>(m))); };
    const double w = quad::integrate_pieces(f, a, b, br, opts).value;
    s->hat.push_back(w);
    cumul += w;
    s->hat_cumul.push_back(cumul);
  }
  out.push_back(s);
}

}  // namespace

GridConvolution::GridConvolution(const KernelComponent& kernel, double step)
    : kernel_(kernel), step_(step) {
  if (!(step > 0.0)) throw Error(ErrorCode::InvalidArgument, "grid step must be positive");
  flatten(kernel_, step_, stages_);
}

std::vector<double> GridConvolution::apply(const GridSignal& f) const {
  GridSignal cur = f;
  for (std::size_t i = 0; i < stages_.size(); ++i) {
    if (!stages_[i]) {
      GridSignal a = stages_[i + 1]->apply(cur, step_);
      const GridSignal b = stages_[i + 2]->apply(cur, step_);
      for (std::size_t j = 0; j < a.values.size(); ++j) a.values[j] += b.values[j];
      a.right_value += b.right_value;
      cur = std::move(a);
      i += 2;
      continue;
    }
    cur = stages_[i]->apply(cur, step_);
  }
  return cur.values;
}

}  // namespace wavefront
