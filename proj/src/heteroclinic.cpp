#include "wavefront/heteroclinic.hpp"

#include <algorithm>
#include <cmath>

namespace wavefront {

namespace {

size_t locate(const Trajectory& tr, double t) {
  const double s = (t - tr.t0) / tr.h;
  auto i = static_cast<std::ptrdiff_t>(std::floor(s));
  i = std::clamp<std::ptrdiff_t>(i, 0, static_cast<std::ptrdiff_t>(tr.u.size()) - 2);
  return static_cast<size_t>(i);
}

// History view during one RK stage: completed nodes by Hermite dense
// output, the overlap (t_complete, t_stage) by extrapolating the last
// completed piece, theta = 0 by the stage vector itself.
class StageHistory final : public History {
 public:
  StageHistory(const Trajectory& tr, size_t last_node, double t_stage, const Vec& y_stage,
               double tau)
      : tr_(tr), last_(last_node), t_stage_(t_stage), y_(y_stage), tau_(tau) {}

  Vec operator()(double theta) const override {
    if (theta >= -1e-12) return y_;
    const double t = t_stage_ + theta;
    const double t_done = tr_.time(last_);
    size_t i = (t >= t_done) ? last_ - 1 : locate(tr_, t);
    if (i >= last_) i = last_ - 1;
    return hermite_eval(t, tr_.time(i), tr_.time(i + 1), tr_.u[i], tr_.u[i + 1], tr_.du[i],
                        tr_.du[i + 1]);
  }
  int dim() const override { return static_cast<int>(y_.size()); }
  double tau() const override { return tau_; }

 private:
  const Trajectory& tr_;
  size_t last_;
  double t_stage_;
  const Vec& y_;
  double tau_;
};

}  // namespace

Vec Trajectory::eval(double t) const {
  if (t < t0 - 1e-9 || t > t_end() + 1e-9)
    throw ConfigError("trajectory evaluated outside its grid");
  const size_t i = locate(*this, t);
  return hermite_eval(t, time(i), time(i + 1), u[i], u[i + 1], du[i], du[i + 1]);
}

Vec Trajectory::eval_deriv(double t) const {
  if (t < t0 - 1e-9 || t > t_end() + 1e-9)
    throw ConfigError("trajectory evaluated outside its grid");
  const size_t i = locate(*this, t);
  return hermite_eval_deriv(t, time(i), time(i + 1), u[i], u[i + 1], du[i], du[i + 1]);
}

Trajectory integrate_dde(const Model& m, const HistorySegment& init, double t_start,
                         double t_end, const IntegrateOptions& opt) {
  if (init.dim() != m.n) throw ConfigError("history dimension does not match model");
  if (t_end <= t_start) throw ConfigError("t_end must exceed t_start");

  // The step divides tau exactly so history nodes align with the grid, and
  // stays below one eighth of the true delay span so every delayed stage
  // lookup lands behind the step under construction.
  const double eff = m.delay_horizon;
  double h = opt.h;
  if (h <= 0) h = (eff > 0) ? m.tau / 40.0 : 0.01;
  int per_tau = std::max(2, static_cast<int>(std::lround(m.tau / h)));
  if (eff > 0)
    per_tau = std::max(per_tau, static_cast<int>(std::ceil(8.0 * m.tau / eff - 1e-9)));
  h = m.tau / per_tau;

  Trajectory tr;
  tr.t0 = t_start - m.tau;
  tr.h = h;
  tr.tau = m.tau;
  const auto n_hist = static_cast<size_t>(std::lround(m.tau / h));
  const auto n_run =
      static_cast<size_t>(std::ceil((t_end - t_start) / h - 1e-9));
  tr.u.reserve(n_hist + n_run + 1);
  tr.du.reserve(n_hist + n_run + 1);
  for (size_t i = 0; i <= n_hist; ++i) {
    const double theta = -m.tau + h * i;
    tr.u.push_back(init(std::min(0.0, theta)));
    tr.du.push_back(init.deriv(std::min(0.0, theta)));
  }
  // Node derivative = f at the node, consistent with the dense output the
  // integration produces; the seed's own slope is replaced by the field.
  {
    StageHistory view(tr, n_hist, tr.time(n_hist), tr.u[n_hist], m.tau);
    tr.du[n_hist] = m.f(view);
  }

  for (size_t j = n_hist; j < n_hist + n_run; ++j) {
    const double t = tr.time(j);
    const Vec& y = tr.u[j];
    const Vec& k1 = tr.du[j];

    Vec y2 = y + (0.5 * h) * k1;
    StageHistory v2(tr, j, t + 0.5 * h, y2, m.tau);
    Vec k2 = m.f(v2);

    Vec y3 = y + (0.5 * h) * k2;
    StageHistory v3(tr, j, t + 0.5 * h, y3, m.tau);
    Vec k3 = m.f(v3);

    Vec y4 = y + h * k3;
    StageHistory v4(tr, j, t + h, y4, m.tau);
    Vec k4 = m.f(v4);

    Vec next = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    const double nn = max_norm(next);
    if (!std::isfinite(nn) || nn > opt.blowup)
      throw ConvergenceError("solution blow-up during integration");
    if (next.minCoeff() < opt.box_lo || next.maxCoeff() > opt.box_hi)
      throw HypothesisError("trajectory left the admissible box");

    tr.u.push_back(std::move(next));
    StageHistory vn(tr, j + 1, tr.time(j + 1), tr.u[j + 1], m.tau);
    tr.du.push_back(m.f(vn));

    if (opt.stop && opt.stop(tr, j + 1)) break;
  }
  return tr;
}

HeteroResult compute_heteroclinic(const Model& m, const DominantRoot& dom,
                                  const HeteroOptions& opt) {
  if (!m.has_equilibrium) throw HypothesisError("model has no positive equilibrium");
  const double knorm = max_norm(m.K);
  const double c0 = opt.seed_amp_rel * knorm;
  const double lam = dom.lambda0;
  const Vec v = dom.v;

  const int seed_nodes = std::max(33, 2 * static_cast<int>(std::lround(m.tau / 0.02)) + 1);
  HistorySegment seed = HistorySegment::sample(
      m.tau, seed_nodes, [&](double th) { return Vec(c0 * std::exp(lam * th) * v); });

  const double t_max = opt.t_max_factor * std::max(m.tau, 1.0);

  IntegrateOptions io;
  io.h = opt.h;
  io.box_lo = -1e-9 * knorm;
  io.box_hi = opt.box_factor * knorm;
  io.stop = [&](const Trajectory& tr, size_t j) {
    const size_t w = std::max<size_t>(2, static_cast<size_t>(opt.window_tau * m.tau / tr.h));
    if (j + 1 < w) return false;
    for (size_t i = j + 1 - w; i <= j; ++i)
      if (max_norm(tr.u[i] - m.K) > opt.tol_K) return false;
    return true;
  };

  Trajectory tr = integrate_dde(m, seed, 0.0, t_max, io);

  const size_t last = tr.u.size() - 1;
  if (max_norm(tr.u[last] - m.K) > opt.tol_K)
    throw ConvergenceError("orbit did not settle at the positive equilibrium by t_max");

  // Gauge: first sup-norm crossing of ||K||/2 becomes t = 0.
  const double level = 0.5 * knorm;
  double t_half = tr.t_end();
  for (size_t i = 0; i + 1 < tr.u.size(); ++i) {
    if (max_norm(tr.u[i + 1]) >= level && max_norm(tr.u[i]) < level) {
      double a = tr.time(i), b = tr.time(i + 1);
      for (int k = 0; k < 60; ++k) {
        const double mid = 0.5 * (a + b);
        (max_norm(tr.eval(mid)) < level ? a : b) = mid;
      }
      t_half = 0.5 * (a + b);
      break;
    }
  }
  tr.shift(-t_half);

  HeteroResult out;
  out.t_converged = tr.t_end();
  out.traj = std::move(tr);
  out.lambda0 = lam;
  out.v = v;
  out.c0 = c0;
  return out;
}

std::pair<double, double> decay_window(const Trajectory& tr, double lo_abs, double hi_abs) {
  double a = tr.t0 + 1.5 * tr.tau;
  double b = tr.t_end();
  bool found_a = false;
  for (size_t i = 0; i < tr.u.size(); ++i) {
    const double t = tr.time(i);
    const double nn = max_norm(tr.u[i]);
    if (!found_a && t >= tr.t0 + 1.5 * tr.tau && nn >= lo_abs) {
      a = t;
      found_a = true;
    }
    if (nn >= hi_abs) {
      b = t;
      break;
    }
  }
  return {a, b};
}

DecayFit fit_decay(const Trajectory& tr, double a, double b) {
  std::vector<double> ts, ys;
  std::vector<Vec> us;
  for (size_t i = 0; i < tr.u.size(); ++i) {
    const double t = tr.time(i);
    if (t < a || t > b) continue;
    ts.push_back(t);
    us.push_back(tr.u[i]);
    ys.push_back(std::log(max_norm(tr.u[i])));
  }
  const int n = static_cast<int>(ts.size());
  if (n < 50) throw ConvergenceError("decay window holds fewer than 50 nodes");
  for (int i = 1; i < n; ++i)
    if (ys[i] <= ys[i - 1])
      throw ConvergenceError("log-norm not monotone on the decay window");

  // Stage 1: straight-line least squares in log space.
  double st = 0, sy = 0, stt = 0, sty = 0;
  for (int i = 0; i < n; ++i) {
    st += ts[i];
    sy += ys[i];
    stt += ts[i] * ts[i];
    sty += ts[i] * ys[i];
  }
  double lam = (n * sty - st * sy) / (n * stt - st * st);
  double p = (sy - lam * st) / n;
  double q = 0.0;

  // Stage 2: Gauss-Newton on y = p + lam t + log(1 + q e^{lam t}). The
  // curvature of the tail otherwise biases lam by O(||u|| / window), which
  // would drown the second-order remainder measured below.
  for (int it = 0; it < 60; ++it) {
    Eigen::Matrix3d ata = Eigen::Matrix3d::Zero();
    Eigen::Vector3d atr = Eigen::Vector3d::Zero();
    double rms = 0.0;
    for (int i = 0; i < n; ++i) {
      const double e = std::exp(lam * ts[i]);
      const double w = 1.0 + q * e;
      if (w < 0.05) return DecayFit{};  // fit left its validity region
      const double r = ys[i] - (p + lam * ts[i] + std::log(w));
      Eigen::Vector3d g;  // d/d(p, lam, q)
      g << 1.0, ts[i] + q * ts[i] * e / w, e / w;
      ata += g * g.transpose();
      atr += g * r;
      rms += r * r;
    }
    ata.diagonal() *= 1.0 + 1e-12;
    const Eigen::Vector3d step = ata.ldlt().solve(atr);
    p += step(0);
    lam += step(1);
    q += step(2);
    if (step.cwiseAbs().maxCoeff() < 1e-14 * std::max(1.0, std::abs(lam))) break;
    (void)rms;
  }

  DecayFit out;
  out.lambda = lam;
  out.c = std::exp(p);
  out.nodes = n;

  Vec dir = Vec::Zero(tr.dim());
  for (const auto& u : us) dir += u / max_norm(u);
  dir /= max_norm(dir);
  out.v = dir;

  double rms = 0.0;
  for (int i = 0; i < n; ++i) {
    const double e = std::exp(lam * ts[i]);
    const double r = ys[i] - (p + lam * ts[i] + std::log(std::max(0.05, 1.0 + q * e)));
    rms += r * r;
  }
  out.rms = std::sqrt(rms / n);

  // Remainder against the fitted leading term only; its slope reveals the
  // next decay rate.
  double umax = 0.0;
  for (const auto& u : us) umax = std::max(umax, max_norm(u));
  const double floor = 1e-12 * umax;
  std::vector<double> rt, ry;
  for (int i = 0; i < n; ++i) {
    const Vec r = us[i] - out.c * std::exp(lam * ts[i]) * dir;
    const double rn = max_norm(r);
    if (rn > floor) {
      rt.push_back(ts[i]);
      ry.push_back(std::log(rn));
    }
  }
  if (rt.size() < 10) {
    out.remainder_at_floor = true;
    out.remainder_slope = std::numeric_limits<double>::infinity();
    return out;
  }
  double rt1 = 0, ry1 = 0, rtt = 0, rty = 0;
  const int rn = static_cast<int>(rt.size());
  for (int i = 0; i < rn; ++i) {
    rt1 += rt[i];
    ry1 += ry[i];
    rtt += rt[i] * rt[i];
    rty += rt[i] * ry[i];
  }
  out.remainder_slope = (rn * rty - rt1 * ry1) / (rn * rtt - rt1 * rt1);
  return out;
}

PositivityReport check_positive(const Trajectory& tr) {
  PositivityReport rep;
  rep.min_value = std::numeric_limits<double>::infinity();
  auto visit = [&](double t, const Vec& val) {
    for (int c = 0; c < val.size(); ++c) {
      if (val(c) < rep.min_value) rep.min_value = val(c);
      if (val(c) <= 0.0 && rep.positive) {
        rep.positive = false;
        rep.t_violation = t;
        rep.component = c;
      }
    }
  };
  for (size_t i = 0; i < tr.u.size(); ++i) {
    visit(tr.time(i), tr.u[i]);
    if (i + 1 < tr.u.size()) {
      const double tm = tr.time(i) + 0.5 * tr.h;
      visit(tm, hermite_eval(tm, tr.time(i), tr.time(i + 1), tr.u[i], tr.u[i + 1], tr.du[i],
                             tr.du[i + 1]));
    }
  }
  return rep;
}

}  // namespace wavefront
