#pragma once

#include <functional>
#include <vector>

#include "wavefront/model.hpp"
#include "wavefront/profile.hpp"

namespace wavefront {

struct PdeOptions {
  double X = 120.0;    // domain [0, X]
  double dx = 0.05;
  double t_end = 5.0;
  double dt = 0.0;     // 0: diffusive CFL limit (and <= tau/8 when delayed)
  double cfl = 0.4;
  // Initial history u(theta, x), theta in [-tau, 0]; required.
  std::function<Vec(double, double)> init;
  std::vector<double> snapshot_times;  // t = 0 and t_end are always kept
  int front_comp = 0;
  double front_level = -1.0;  // <0: half the equilibrium component
  int record_every = 0;       // front-series stride in steps; 0: ~400 samples
};

struct PdeField {
  double t = 0.0;
  std::vector<double> u;  // point-major: u[i * N + comp]
};

struct PdeResult {
  std::vector<double> x;
  int n = 0;
  double dt = 0.0;
  std::vector<PdeField> snapshots;
  std::vector<double> front_t, front_x;
};

/// Method-of-lines RK4 for u_t = diag(d) u_xx + f(u_t(., x)) on [0, X]
/// with reflecting (Neumann) ends: the centered Laplacian uses mirrored
/// ghost values, which keeps the trapezoid mass of every component exact
/// under pure diffusion. The delayed history at each grid point is served
/// from a ring of past time slices with cubic interpolation in t; stage
/// queries landing past the newest slice extrapolate it.
PdeResult simulate(const Model& m, const PdeOptions& opt);

/// Leftmost level crossing of one component, linearly interpolated;
/// NaN when the slice never reaches the level.
double front_position(const std::vector<double>& x, const std::vector<double>& u, int n,
                      int comp, double level);

struct SpeedFit {
  double speed = 0.0;  // front displacement rate; negative = leftward
  double r2 = 0.0;
  int points = 0;
};

/// Least-squares slope of the tracked front over the trailing fraction of
/// the run.
SpeedFit front_speed(const std::vector<double>& t, const std::vector<double>& x,
                     double tail_frac = 0.6);

/// Trapezoid integral of one component over the grid.
double trapezoid_mass(const std::vector<double>& x, const std::vector<double>& u, int n,
                      int comp);

struct TranslationFit {
  double rel_l2 = 0.0;
  double shift = 0.0;  // optimal profile-time shift
};

/// Relative L2 distance between a snapshot and the travelling profile
/// u(t, x) = psi((x - x0 + c t)/c), minimized over a time translation of
/// psi (golden-section search); the denominator is the profile's own L2
/// mass on the same points.
TranslationFit translation_error(const PdeResult& r, size_t snap, const WaveProfile& psi,
                                 double c, double x0);

}  // namespace wavefront
