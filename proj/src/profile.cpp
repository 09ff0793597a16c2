#include "wavefront/profile.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace wavefront {

namespace {

constexpr double kPi = 3.14159265358979323846;

/// Exact exponential moments of the linear nodal hats on one interval:
///   A(z, h) = integral_0^h e^{z u} (1 - u/h) du
///   B(z, h) = integral_0^h e^{z u} (u/h)     du.
/// The closed forms cancel catastrophically for |z h| small, so a short
/// series takes over there.
std::pair<double, double> hat_moments(double z, double h) {
  const double x = z * h;
  if (std::abs(x) < 0.5) {
    double a = 0.0, b = 0.0, term = 1.0;  // term = x^m / m!
    for (int m = 0; m < 40; ++m) {
      a += term / ((m + 1.0) * (m + 2.0));
      b += term / (m + 2.0);
      term *= x / (m + 1.0);
      if (std::abs(term) < 1e-19) break;
    }
    return {h * a, h * b};
  }
  const double E = std::exp(x);
  const double i0 = (E - 1.0) / z;
  const double i1 = h * E / z - (E - 1.0) / (z * z);
  return {i0 - i1 / h, i1 / h};
}

class ProfileHistory final : public History {
 public:
  ProfileHistory(const WaveProfile& p, double t, double tau) : p_(p), t_(t), tau_(tau) {}
  Vec operator()(double theta) const override { return p_.eval(t_ + theta); }
  int dim() const override { return p_.dim(); }
  double tau() const override { return tau_; }

 private:
  const WaveProfile& p_;
  double t_, tau_;
};

double mu_weight(double t, double mu) { return t < 0.0 ? std::exp(-mu * t) : 1.0; }

}  // namespace

Vec WaveProfile::eval(double t) const {
  if (t < t0) return tail_c * std::exp(tail_lambda * t) * tail_v;
  const double te = t_end();
  if (t >= te) return K;
  const double s = (t - t0) / h;
  size_t i = static_cast<size_t>(s);
  if (i + 1 >= psi.size()) i = psi.size() - 2;
  const double a = t0 + h * i;
  return hermite_eval(t, a, a + h, psi[i], psi[i + 1], dpsi[i], dpsi[i + 1]);
}

Vec WaveProfile::eval_deriv(double t) const {
  if (t < t0) return tail_c * tail_lambda * std::exp(tail_lambda * t) * tail_v;
  const double te = t_end();
  if (t >= te) return Vec::Zero(dim());
  const double s = (t - t0) / h;
  size_t i = static_cast<size_t>(s);
  if (i + 1 >= psi.size()) i = psi.size() - 2;
  const double a = t0 + h * i;
  return hermite_eval_deriv(t, a, a + h, psi[i], psi[i + 1], dpsi[i], dpsi[i + 1]);
}

WaveParams wave_params(const Model& m, const DominantRoot& dom, double c) {
  if (!(c > 0.0)) throw ConfigError("wave speed must be positive");
  WaveParams wp;
  wp.c = c;
  wp.eps = 1.0 / c;
  wp.diffusion = m.diffusion.size() ? m.diffusion : Vec::Ones(m.n);
  wp.alpha = Vec(m.n);
  wp.beta = Vec(m.n);
  wp.pref = Vec(m.n);
  for (int i = 0; i < m.n; ++i) {
    const double q = wp.diffusion[i] * wp.eps * wp.eps;
    const double r = std::sqrt(1.0 + 4.0 * q);
    wp.alpha[i] = (1.0 - r) / (2.0 * q);
    wp.beta[i] = (1.0 + r) / (2.0 * q);
    wp.pref[i] = 1.0 / r;
  }

  const DelayKernel L0 = m.linearization_at_zero();
  Continuation cont = root_continuation(L0, wp.diffusion, wp.eps, dom.lambda0);
  wp.lambda_eps = cont.lambda;
  wp.v1 = cont.v;
  if (wp.v1.cwiseAbs().maxCoeff() > 0 && wp.v1.sum() < 0.0) wp.v1 = -wp.v1;
  wp.unique_in_strip = cont.unique_in_strip;

  // Norm weight mu = lambda0/2, nudged down until a thin vertical strip
  // around it is free of characteristic roots of the wave problem.
  wp.mu = 0.5 * dom.lambda0;
  const double Y = 2.0 * L0.op_norm() + 1.0;
  CharProblem cp(L0, wp.eps, wp.diffusion);
  for (int attempt = 0; attempt < 12; ++attempt) {
    Rect band{wp.mu - 0.05 * dom.lambda0, wp.mu + 0.05 * dom.lambda0, -Y, Y};
    if (band.re_lo <= 0.0) break;
    try {
      if (count_roots_rect(cp, band).count == 0) break;
    } catch (const ConvergenceError&) {
      // Boundary kept hitting roots; treat as occupied and move on.
    }
    wp.mu *= 0.85;
  }
  return wp;
}

WaveProfile picard_step(const Model& m, const WaveParams& wp, const WaveProfile& cur) {
  const size_t n = cur.psi.size();
  const int N = cur.dim();
  if (n < 2) throw ConfigError("profile grid needs at least two nodes");
  const double h = cur.h;

  // g(t_j) = psi(t_j) + f(psi_{t_j})
  std::vector<Vec> g(n);
  for (size_t j = 0; j < n; ++j) {
    ProfileHistory hist(cur, cur.time(j), m.tau);
    g[j] = cur.psi[j] + m.f(hist);
    if (!g[j].allFinite()) throw ConvergenceError("front operator met a non-finite value");
  }

  Vec Ea(N), Aa(N), Ba(N), Eb(N), Ab(N), Bb(N);
  for (int i = 0; i < N; ++i) {
    Ea[i] = std::exp(wp.alpha[i] * h);
    std::tie(Aa[i], Ba[i]) = hat_moments(wp.alpha[i], h);
    Eb[i] = std::exp(-wp.beta[i] * h);
    std::tie(Ab[i], Bb[i]) = hat_moments(-wp.beta[i], h);
  }

  // Left half-line in closed form: below the grid psi is the exponential
  // tail, so g there is tail_c e^{lambda s} (v + L(e^{lambda .}) v) with
  // L the zero-linearization, and each alpha-integral is explicit.
  std::vector<Vec> I1(n), I2(n);
  Vec gtail = Vec::Zero(N);
  if (cur.tail_c != 0.0) {
    const Mat sym = m.linearization_at_zero().exp_symbol_real(cur.tail_lambda);
    gtail = cur.tail_c * (cur.tail_v + sym * cur.tail_v);
  }
  const double lam = cur.tail_lambda;
  I1[0] = Vec(N);
  for (int i = 0; i < N; ++i)
    I1[0][i] = gtail[i] * std::exp(lam * cur.t0) / (lam - wp.alpha[i]);
  for (size_t j = 1; j < n; ++j) {
    I1[j] = Vec(N);
    for (int i = 0; i < N; ++i)
      I1[j][i] = Ea[i] * I1[j - 1][i] + Aa[i] * g[j][i] + Ba[i] * g[j - 1][i];
  }

  // Right half-line: psi = K beyond the grid and f(K) = 0, so the
  // beta-integral of the constant is K/beta.
  I2[n - 1] = Vec(N);
  for (int i = 0; i < N; ++i) I2[n - 1][i] = cur.K.size() ? cur.K[i] / wp.beta[i] : 0.0;
  for (size_t j = n - 1; j-- > 0;) {
    I2[j] = Vec(N);
    for (int i = 0; i < N; ++i)
      I2[j][i] = Eb[i] * I2[j + 1][i] + Ab[i] * g[j][i] + Bb[i] * g[j + 1][i];
  }

  WaveProfile out = cur;
  for (size_t j = 0; j < n; ++j) {
    out.psi[j] = Vec(N);
    out.dpsi[j] = Vec(N);
    for (int i = 0; i < N; ++i) {
      out.psi[j][i] = wp.pref[i] * (I1[j][i] + I2[j][i]);
      out.dpsi[j][i] = wp.pref[i] * (wp.alpha[i] * I1[j][i] + wp.beta[i] * I2[j][i]);
    }
  }
  // Keep the tail amplitude continuous with the new left endpoint; the
  // solver replaces this with a window refit.
  const double edge = max_norm(out.psi[0]);
  if (cur.tail_lambda > 0.0 && edge > 0.0) out.tail_c = edge * std::exp(-lam * out.t0);
  return out;
}

namespace {

/// Refits the tail amplitude on nodes inside the linear-decay window;
/// keeps the previous value when the window is too thin.
void refit_tail(WaveProfile& p, double knorm, const ProfileOptions& opt) {
  if (p.tail_lambda <= 0.0) return;
  double acc = 0.0;
  int cnt = 0;
  for (size_t j = 0; j < p.psi.size(); ++j) {
    const double t = p.time(j);
    if (t >= 0.0) break;
    const double v = max_norm(p.psi[j]);
    if (v >= opt.tail_fit_lo * knorm && v <= opt.tail_fit_hi * knorm) {
      acc += std::log(v) - p.tail_lambda * t;
      ++cnt;
    }
  }
  if (cnt >= 5) p.tail_c = std::exp(acc / cnt);
}

/// Time where the sup-norm of the profile first reaches level, bisected
/// on the dense evaluation between the bracketing nodes.
double first_crossing(const WaveProfile& p, double level) {
  const size_t n = p.psi.size();
  size_t j = 0;
  while (j < n && max_norm(p.psi[j]) < level) ++j;
  if (j == 0 || j == n) throw ConvergenceError("front lost the half-height crossing");
  double lo = p.time(j - 1), hi = p.time(j);
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (max_norm(p.eval(mid)) < level ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// Resamples q onto the same grid shifted by s (gauge re-anchoring).
WaveProfile shift_resample(const WaveProfile& q, double s) {
  WaveProfile r = q;
  for (size_t j = 0; j < r.psi.size(); ++j) {
    const double t = r.time(j) + s;
    r.psi[j] = q.eval(t);
    r.dpsi[j] = q.eval_deriv(t);
  }
  r.tail_c = q.tail_c * std::exp(q.tail_lambda * s);
  return r;
}

WaveProfile init_from_orbit(const Model& m, const WaveParams& wp, const HeteroResult& het,
                            double T_lo, double T_hi, double h) {
  WaveProfile p;
  p.h = h;
  p.tau = m.tau;
  p.K = m.K;
  p.tail_lambda = wp.lambda_eps;
  p.tail_v = wp.v1;
  const size_t n = static_cast<size_t>(std::ceil((T_hi - T_lo) / h)) + 1;
  p.t0 = T_lo;
  p.psi.resize(n);
  p.dpsi.resize(n);
  const Trajectory& u = het.traj;
  const Vec left = u.eval(u.t0);
  for (size_t j = 0; j < n; ++j) {
    const double t = p.time(j);
    if (t < u.t0) {
      // Extend below the orbit data at the wave rate, the rate the fixed
      // point itself decays at; this keeps the initial tail mismatch small.
      const double e = std::exp(wp.lambda_eps * (t - u.t0));
      p.psi[j] = e * left;
      p.dpsi[j] = wp.lambda_eps * e * left;
    } else if (t > u.t_end()) {
      p.psi[j] = m.K;
      p.dpsi[j] = Vec::Zero(m.n);
    } else {
      p.psi[j] = u.eval(t);
      p.dpsi[j] = u.eval_deriv(t);
    }
  }
  p.tail_c = std::max(max_norm(p.psi[0]), 1e-300) * std::exp(-wp.lambda_eps * p.t0);
  return p;
}

}  // namespace

ProfileResult solve_profile(const Model& m, const WaveParams& wp, const HeteroResult& het,
                            const ProfileOptions& opt) {
  if (!m.has_equilibrium) throw ConfigError("front computation needs a positive equilibrium");
  const double knorm = max_norm(m.K);
  const double lam = wp.lambda_eps;
  const Trajectory& u = het.traj;

  // Truncation window: extend the orbit's left end down to the tail
  // target along the seeded exponential; the right end is where the orbit
  // settled.
  const double edge = std::max(max_norm(u.eval(u.t0)), 1e-300);
  double T_lo = u.t0 - std::max(0.0, std::log(edge / (opt.tail_lo_rel * knorm))) / lam;
  double T_hi = u.t_end();

  ProfileResult res;
  WaveProfile p = init_from_orbit(m, wp, het, T_lo, T_hi, opt.h);
  const double half = 0.5 * knorm;

  int bad_streak = 0;
  for (int attempt = 0; attempt <= opt.max_extend; ++attempt) {
    bool converged = false;
    double prev_delta = -1.0, best_delta = -1.0;
    while (res.iterations < opt.k_max) {
      if (res.deltas.empty() || res.deltas.back() > opt.refit_until_rel * knorm)
        refit_tail(p, knorm, opt);
      WaveProfile q = picard_step(m, wp, p);
      q = shift_resample(q, first_crossing(q, half));
      ++res.iterations;

      double delta = 0.0;
      for (size_t j = 0; j < q.psi.size(); ++j)
        delta = std::max(delta, mu_weight(q.time(j), wp.mu) * max_norm(q.psi[j] - p.psi[j]));
      res.deltas.push_back(delta);
      if (!std::isfinite(delta)) throw ConvergenceError("front iteration diverged");
      if (prev_delta > 0.0) {
        const double ratio = delta / prev_delta;
        res.ratios.push_back(ratio);
        bad_streak = ratio >= 1.0 ? bad_streak + 1 : 0;
        // Perturbations ride downstream through the left tail and decay
        // per pass, so the step norm breathes; only a sustained rise well
        // above the running minimum means the map is not contracting.
        if (bad_streak >= 5 && best_delta > 0.0 && delta > 20.0 * best_delta)
          throw ConvergenceError("front iteration is not contracting at this speed");
      }
      best_delta = best_delta < 0.0 ? delta : std::min(best_delta, delta);
      prev_delta = delta;
      p = std::move(q);
      if (delta <= opt.tol_fix) {
        converged = true;
        break;
      }
    }
    if (!converged)
      throw ConvergenceError("front iteration did not reach tolerance within k_max");

    // Truncation adequacy: the left endpoint must sit in the pure-tail
    // regime and the right endpoint on the equilibrium plateau.
    const double tail_at_lo = p.tail_c * std::exp(lam * p.t0);
    const bool left_ok = max_norm(p.psi.front()) <= 10.0 * opt.tail_lo_rel * knorm &&
                         max_norm(p.psi.front() - tail_at_lo * p.tail_v) <=
                             0.05 * tail_at_lo + 1e-12 * knorm;
    const bool right_ok = max_norm(p.psi.back() - m.K) <= 3.0 * opt.right_tol * knorm;
    if (left_ok && right_ok) {
      res.converged = true;
      break;
    }
    if (attempt == opt.max_extend)
      throw ConvergenceError("front window kept missing its truncation targets");

    double dl = 0.0, dr = 0.0;
    if (!left_ok)
      dl = std::log(std::max(max_norm(p.psi.front()), 1e-300) /
                    (opt.tail_lo_rel * knorm)) / lam + 2.0 / lam;
    if (!right_ok) dr = 0.25 * (p.t_end() - p.t0);
    WaveProfile grown;
    grown.t0 = p.t0 - std::max(0.0, dl);
    grown.h = p.h;
    grown.tau = p.tau;
    grown.K = p.K;
    grown.tail_c = p.tail_c;
    grown.tail_lambda = p.tail_lambda;
    grown.tail_v = p.tail_v;
    const size_t n = static_cast<size_t>(
        std::ceil((p.t_end() + std::max(0.0, dr) - grown.t0) / p.h)) + 1;
    grown.psi.resize(n);
    grown.dpsi.resize(n);
    for (size_t j = 0; j < n; ++j) {
      const double t = grown.time(j);
      grown.psi[j] = p.eval(t);
      grown.dpsi[j] = p.eval_deriv(t);
    }
    p = std::move(grown);
    ++res.extensions;
    bad_streak = 0;
  }

  res.profile = std::move(p);
  return res;
}

double residual(const Model& m, const WaveParams& wp, const WaveProfile& p) {
  const size_t n = p.psi.size();
  double sup = 0.0;
  for (size_t j = 1; j + 1 < n; ++j) {
    const Vec d2 = (p.psi[j + 1] - 2.0 * p.psi[j] + p.psi[j - 1]) / (p.h * p.h);
    ProfileHistory hist(p, p.time(j), m.tau);
    const Vec r = wp.eps * wp.eps * wp.diffusion.cwiseProduct(d2) - p.dpsi[j] + m.f(hist);
    sup = std::max(sup, max_norm(r));
  }
  return sup;
}

FrontReport verify_front(const Model& m, const WaveParams& wp, const ProfileResult& pr) {
  const WaveProfile& p = pr.profile;
  const double knorm = max_norm(m.K);
  FrontReport rep;
  rep.converged = pr.converged;
  rep.lambda_eps = wp.lambda_eps;
  rep.v1_eps = wp.v1;
  rep.contraction = pr.ratios;

  // Strict positivity at nodes, midpoints, and on both tails.
  rep.positive = p.tail_c > 0.0 && (p.tail_v.array() > 0.0).all() &&
                 (m.K.array() > 0.0).all();
  for (size_t j = 0; rep.positive && j < p.psi.size(); ++j) {
    if (!(p.psi[j].array() > 0.0).all()) rep.positive = false;
    if (j + 1 < p.psi.size() && !(p.eval(p.time(j) + 0.5 * p.h).array() > 0.0).all())
      rep.positive = false;
  }

  // Left-tail window: nodes in the pure-decay regime.
  std::vector<size_t> window;
  for (size_t j = 0; j < p.psi.size(); ++j) {
    const double v = max_norm(p.psi[j]);
    if (p.time(j) < 0.0 && v >= 3e-6 * knorm && v <= 1e-2 * knorm) window.push_back(j);
  }

  rep.monotone_left = !window.empty();
  for (size_t j : window)
    if (!(p.dpsi[j].array() > 0.0).all()) rep.monotone_left = false;

  if (window.size() >= 5) {
    // Log-norm slope by least squares, direction by averaged unit vectors.
    double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
    const double n = static_cast<double>(window.size());
    Vec dir = Vec::Zero(p.dim());
    double slope_err = 0.0;
    for (size_t j : window) {
      const double t = p.time(j), y = std::log(max_norm(p.psi[j]));
      st += t;
      sy += y;
      stt += t * t;
      sty += t * y;
      dir += p.psi[j] / max_norm(p.psi[j]);
      slope_err = std::max(slope_err, max_norm(p.dpsi[j] - wp.lambda_eps * p.psi[j]) /
                                          (wp.lambda_eps * max_norm(p.psi[j])));
    }
    rep.lambda_fit = (n * sty - st * sy) / (n * stt - st * st);
    rep.v1_fit = dir / dir.cwiseAbs().maxCoeff();
    const double cosang = rep.v1_fit.dot(wp.v1) / (rep.v1_fit.norm() * wp.v1.norm());
    rep.v1_angle_deg = std::acos(std::clamp(cosang, -1.0, 1.0)) * 180.0 / kPi;
    rep.slope_ratio_err = slope_err;
  } else {
    rep.monotone_left = false;
  }

  rep.residual_sup = residual(m, wp, p);
  return rep;
}

double weighted_norm(const std::vector<double>& times, const std::vector<Vec>& y, double mu) {
  double s = 0.0;
  for (size_t j = 0; j < y.size(); ++j)
    s = std::max(s, mu_weight(times[j], mu) * max_norm(y[j]));
  return s;
}

}  // namespace wavefront
