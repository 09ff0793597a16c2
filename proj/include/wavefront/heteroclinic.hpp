#pragma once

#include <functional>
#include <limits>
#include <vector>

#include "wavefront/model.hpp"
#include "wavefront/spectrum.hpp"

namespace wavefront {

/// Solution record on a uniform grid t_i = t0 + i h, with node values and
/// node derivatives; dense output is piecewise cubic Hermite, so the
/// trajectory can serve as a history source at any interior time.
struct Trajectory {
  double t0 = 0.0;
  double h = 0.0;
  double tau = 0.0;
  std::vector<Vec> u;
  std::vector<Vec> du;

  int dim() const { return u.empty() ? 0 : static_cast<int>(u[0].size()); }
  double t_end() const { return t0 + h * (u.empty() ? 0 : u.size() - 1); }
  double time(size_t i) const { return t0 + h * i; }

  Vec eval(double t) const;
  Vec eval_deriv(double t) const;
  void shift(double s) { t0 += s; }
};

struct IntegrateOptions {
  double h = 0.0;         // 0: tau/40, or 0.01 for kernels without delayed mass
  double blowup = 1e8;    // sup-norm guard
  double box_lo = -std::numeric_limits<double>::infinity();
  double box_hi = std::numeric_limits<double>::infinity();
  // Checked after each completed node; returning true stops integration.
  std::function<bool(const Trajectory&, size_t)> stop;
};

/// Explicit RK4 method of steps. The grid starts at the history's left end
/// (nodes on the first tau reproduce `init`), and the step divides tau
/// exactly. Stage-time lookups falling inside the step under construction
/// are served by extrapolating the last completed Hermite piece; theta = 0
/// reads the stage vector. Requires h <= tau/8 whenever the model kernel
/// carries genuinely delayed mass.
Trajectory integrate_dde(const Model& m, const HistorySegment& init, double t_start,
                         double t_end, const IntegrateOptions& opt = {});

struct HeteroOptions {
  double seed_amp_rel = 1e-4;  // seed amplitude relative to ||K||
  double h = 0.0;
  double tol_K = 1e-8;
  double window_tau = 5.0;     // trailing window length, in units of tau
  double t_max_factor = 200.0;
  double box_factor = 10.0;    // positivity box: [-1e-9 ||K||, box ||K||]
};

struct HeteroResult {
  Trajectory traj;  // re-centered: ||u(0)|| = ||K||/2
  double t_converged = 0.0;
  double lambda0 = 0.0;
  Vec v;
  double c0 = 0.0;  // seed amplitude actually used
};

/// Positive connection from 0 to K: integrates from the small exponential
/// seed c0 e^{lambda0 theta} v until the trailing window stays within
/// tol_K of K, then re-centers time so the sup-norm first reaches
/// ||K||/2 at t = 0. Throws HypothesisError when the orbit leaves the
/// positivity box and ConvergenceError when it fails to settle by t_max.
HeteroResult compute_heteroclinic(const Model& m, const DominantRoot& dom,
                                  const HeteroOptions& opt = {});

struct DecayFit {
  double lambda = 0.0;
  double c = 0.0;
  Vec v;
  double remainder_slope = 0.0;
  bool remainder_at_floor = false;  // remainder below noise: pure exponential
  double rms = 0.0;
  int nodes = 0;
};

/// Fits ||u(t)|| ~ c e^{lambda t} on [a, b] (a window inside the decaying
/// tail), sharpening the one-term least-squares estimate by Gauss-Newton
/// on log c + lambda t + log(1 + q e^{lambda t}) so the fitted pair (c,
/// lambda) is accurate enough for the remainder u - c e^{lambda t} v to
/// expose the next-order decay; remainder_slope is the log-slope of that
/// remainder. Rejects windows with fewer than 50 nodes or a non-monotone
/// log-norm.
DecayFit fit_decay(const Trajectory& tr, double a, double b);

/// Window [a, b] where lo_abs <= ||u|| <= hi_abs, skipping the seeded
/// first 1.5 tau of the trajectory.
std::pair<double, double> decay_window(const Trajectory& tr, double lo_abs, double hi_abs);

struct PositivityReport {
  bool positive = true;
  double t_violation = 0.0;
  int component = -1;
  double min_value = 0.0;
};

/// Strict positivity of all components at nodes and Hermite midpoints.
PositivityReport check_positive(const Trajectory& tr);

}  // namespace wavefront
