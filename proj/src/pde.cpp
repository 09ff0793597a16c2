#include "wavefront/pde.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace wavefront {

namespace {

/// Past time slices at uniform step spacing, newest last; lookups are
/// cubic Lagrange in time over the four slices around the query.
class SliceRing {
 public:
  SliceRing(size_t depth, double dt) : depth_(std::max<size_t>(depth, 4)), dt_(dt) {}

  void push(double t, std::vector<double> u) {
    times_.push_back(t);
    slices_.push_back(std::move(u));
    while (slices_.size() > depth_) {
      slices_.pop_front();
      times_.pop_front();
    }
  }

  /// Interpolated value of component c at grid index i and time tq;
  /// queries beyond the newest slice extrapolate the last window.
  double at(double tq, size_t i, int n, int c) const {
    const size_t m = times_.size();
    long k = static_cast<long>(std::floor((tq - times_.front()) / dt_));
    k = std::clamp<long>(k - 1, 0, static_cast<long>(m) - 4);
    double w[4], ts[4];
    for (int a = 0; a < 4; ++a) ts[a] = times_[k + a];
    for (int a = 0; a < 4; ++a) {
      double p = 1.0;
      for (int b = 0; b < 4; ++b)
        if (b != a) p *= (tq - ts[b]) / (ts[a] - ts[b]);
      w[a] = p;
    }
    double v = 0.0;
    for (int a = 0; a < 4; ++a) v += w[a] * slices_[k + a][i * n + c];
    return v;
  }

 private:
  size_t depth_;
  double dt_;
  std::deque<double> times_;
  std::deque<std::vector<double>> slices_;
};

/// History of one grid point during a Runge-Kutta stage: theta = 0 is the
/// stage vector itself, the past comes from the slice ring.
class PointHistory final : public History {
 public:
  PointHistory(const SliceRing& ring, const std::vector<double>& stage, double ts, size_t i,
               int n, double tau, double dt)
      : ring_(ring), stage_(stage), ts_(ts), i_(i), n_(n), tau_(tau), dt_(dt) {}

  Vec operator()(double theta) const override {
    Vec v(n_);
    if (theta >= -1e-12 * std::max(dt_, 1.0)) {
      for (int c = 0; c < n_; ++c) v[c] = stage_[i_ * n_ + c];
      return v;
    }
    for (int c = 0; c < n_; ++c) v[c] = ring_.at(ts_ + theta, i_, n_, c);
    return v;
  }
  int dim() const override { return n_; }
  double tau() const override { return tau_; }

 private:
  const SliceRing& ring_;
  const std::vector<double>& stage_;
  double ts_;
  size_t i_;
  int n_;
  double tau_, dt_;
};

}  // namespace

PdeResult simulate(const Model& m, const PdeOptions& opt) {
  if (!opt.init) throw ConfigError("pde simulation needs an initial history");
  if (!(opt.dx > 0.0) || !(opt.X > opt.dx)) throw ConfigError("bad pde grid");
  if (!(opt.t_end > 0.0)) throw ConfigError("bad pde horizon");
  const int N = m.n;
  const Vec d = m.diffusion.size() ? m.diffusion : Vec::Ones(N);
  const double dmax = d.maxCoeff();

  const size_t nx = static_cast<size_t>(std::floor(opt.X / opt.dx + 0.5)) + 1;
  const double dx = opt.X / static_cast<double>(nx - 1);

  double dt0 = opt.dt > 0.0 ? opt.dt : opt.cfl * dx * dx / dmax;
  if (opt.dt <= 0.0 && m.tau > 0.0) dt0 = std::min(dt0, m.tau / 8.0);
  const long steps = std::max<long>(1, static_cast<long>(std::ceil(opt.t_end / dt0 - 1e-12)));
  const double dt = opt.t_end / static_cast<double>(steps);

  PdeResult res;
  res.n = N;
  res.dt = dt;
  res.x.resize(nx);
  for (size_t i = 0; i < nx; ++i) res.x[i] = dx * static_cast<double>(i);

  const size_t depth = static_cast<size_t>(std::ceil(std::max(m.tau, 0.0) / dt)) + 4;
  SliceRing ring(depth, dt);
  std::vector<double> u(nx * N);
  for (size_t k = 0; k < depth; ++k) {
    const double t = -dt * static_cast<double>(depth - 1 - k);
    const double theta = std::max(t, -m.tau);
    std::vector<double> slice(nx * N);
    for (size_t i = 0; i < nx; ++i) {
      const Vec v = opt.init(theta, res.x[i]);
      if (v.size() != N) throw ConfigError("initial history has wrong dimension");
      for (int c = 0; c < N; ++c) slice[i * N + c] = v[c];
    }
    if (k + 1 == depth) u = slice;
    ring.push(t, std::move(slice));
  }

  const double level =
      opt.front_level >= 0.0
          ? opt.front_level
          : (m.has_equilibrium ? 0.5 * m.K[opt.front_comp] : 0.5);
  const int stride = opt.record_every > 0
                         ? opt.record_every
                         : std::max<long>(1, steps / 400);

  std::vector<double> targets = opt.snapshot_times;
  std::sort(targets.begin(), targets.end());

  auto record_front = [&](double t) {
    res.front_t.push_back(t);
    res.front_x.push_back(front_position(res.x, u, N, opt.front_comp, level));
  };
  auto maybe_snapshot = [&](double t, bool force) {
    bool want = force;
    for (double ts : targets)
      if (std::abs(ts - t) <= 0.5 * dt) want = true;
    if (want && (res.snapshots.empty() || res.snapshots.back().t < t - 0.5 * dt))
      res.snapshots.push_back({t, u});
  };

  // RK4 stage derivative: centered Laplacian with mirrored ghosts plus
  // the delayed reaction read through the point histories.
  std::vector<double> k1(nx * N), k2(nx * N), k3(nx * N), k4(nx * N), stage(nx * N);
  auto rhs = [&](double ts, const std::vector<double>& y, std::vector<double>& out) {
    for (size_t i = 0; i < nx; ++i) {
      PointHistory hist(ring, y, ts, i, N, m.tau, dt);
      const Vec fv = m.f(hist);
      for (int c = 0; c < N; ++c) {
        const double yl = i == 0 ? y[N + c] : y[(i - 1) * N + c];
        const double yr = i + 1 == nx ? y[(nx - 2) * N + c] : y[(i + 1) * N + c];
        out[i * N + c] = d[c] * (yl - 2.0 * y[i * N + c] + yr) / (dx * dx) + fv[c];
      }
    }
  };

  record_front(0.0);
  maybe_snapshot(0.0, true);
  double t = 0.0;
  const size_t len = nx * N;
  for (long s = 0; s < steps; ++s) {
    rhs(t, u, k1);
    for (size_t q = 0; q < len; ++q) stage[q] = u[q] + 0.5 * dt * k1[q];
    rhs(t + 0.5 * dt, stage, k2);
    for (size_t q = 0; q < len; ++q) stage[q] = u[q] + 0.5 * dt * k2[q];
    rhs(t + 0.5 * dt, stage, k3);
    for (size_t q = 0; q < len; ++q) stage[q] = u[q] + dt * k3[q];
    rhs(t + dt, stage, k4);
    for (size_t q = 0; q < len; ++q)
      u[q] += dt / 6.0 * (k1[q] + 2.0 * k2[q] + 2.0 * k3[q] + k4[q]);
    t = dt * static_cast<double>(s + 1);

    double amax = 0.0;
    for (double v : u) amax = std::max(amax, std::abs(v));
    if (!std::isfinite(amax) || amax > 1e8)
      throw ConvergenceError("pde state blew up");

    ring.push(t, u);
    if ((s + 1) % stride == 0 || s + 1 == steps) record_front(t);
    maybe_snapshot(t, s + 1 == steps);
  }
  return res;
}

double front_position(const std::vector<double>& x, const std::vector<double>& u, int n,
                      int comp, double level) {
  for (size_t i = 0; i < x.size(); ++i) {
    const double v = u[i * n + comp];
    if (v >= level) {
      if (i == 0) return x[0];
      const double prev = u[(i - 1) * n + comp];
      const double w = (level - prev) / (v - prev);
      return x[i - 1] + w * (x[i] - x[i - 1]);
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

SpeedFit front_speed(const std::vector<double>& t, const std::vector<double>& x,
                     double tail_frac) {
  SpeedFit fit;
  if (t.empty()) return fit;
  const double t_cut = t.back() - tail_frac * (t.back() - t.front());
  double st = 0, sx = 0, stt = 0, stx = 0, n = 0;
  for (size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t_cut || !std::isfinite(x[i])) continue;
    st += t[i];
    sx += x[i];
    stt += t[i] * t[i];
    stx += t[i] * x[i];
    n += 1;
  }
  if (n < 3) return fit;
  fit.points = static_cast<int>(n);
  fit.speed = (n * stx - st * sx) / (n * stt - st * st);
  const double xb = sx / n, tb = st / n;
  double ss_res = 0, ss_tot = 0;
  for (size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t_cut || !std::isfinite(x[i])) continue;
    const double pred = xb + fit.speed * (t[i] - tb);
    ss_res += (x[i] - pred) * (x[i] - pred);
    ss_tot += (x[i] - xb) * (x[i] - xb);
  }
  fit.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

double trapezoid_mass(const std::vector<double>& x, const std::vector<double>& u, int n,
                      int comp) {
  double s = 0.0;
  for (size_t i = 0; i + 1 < x.size(); ++i)
    s += 0.5 * (x[i + 1] - x[i]) * (u[i * n + comp] + u[(i + 1) * n + comp]);
  return s;
}

TranslationFit translation_error(const PdeResult& r, size_t snap, const WaveProfile& psi,
                                 double c, double x0) {
  const PdeField& f = r.snapshots.at(snap);
  const int N = r.n;
  const size_t nx = r.x.size();

  auto sq_err = [&](double s) {
    double num = 0.0;
    for (size_t i = 0; i < nx; ++i) {
      const double arg = (r.x[i] - x0 + c * f.t) / c + s;
      const Vec pv = psi.eval(arg);
      for (int cc = 0; cc < N; ++cc) {
        const double dvv = f.u[i * N + cc] - pv[cc];
        num += dvv * dvv;
      }
    }
    return num;
  };

  // Coarse scan then golden-section refinement of the shift.
  double best_s = 0.0, best = std::numeric_limits<double>::infinity();
  for (int k = -40; k <= 40; ++k) {
    const double s = 0.1 * k;
    const double e = sq_err(s);
    if (e < best) {
      best = e;
      best_s = s;
    }
  }
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = best_s - 0.15, b = best_s + 0.15;
  double s1 = b - gr * (b - a), s2 = a + gr * (b - a);
  double e1 = sq_err(s1), e2 = sq_err(s2);
  for (int it = 0; it < 60; ++it) {
    if (e1 < e2) {
      b = s2;
      s2 = s1;
      e2 = e1;
      s1 = b - gr * (b - a);
      e1 = sq_err(s1);
    } else {
      a = s1;
      s1 = s2;
      e1 = e2;
      s2 = a + gr * (b - a);
      e2 = sq_err(s2);
    }
  }
  TranslationFit out;
  out.shift = 0.5 * (a + b);
  double den = 0.0;
  for (size_t i = 0; i < nx; ++i) {
    const double arg = (r.x[i] - x0 + c * f.t) / c + out.shift;
    const Vec pv = psi.eval(arg);
    for (int cc = 0; cc < N; ++cc) den += pv[cc] * pv[cc];
  }
  out.rel_l2 = den > 0 ? std::sqrt(sq_err(out.shift) / den) : 0.0;
  return out;
}

}  // namespace wavefront
