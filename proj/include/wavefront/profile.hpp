#pragma once

#include <vector>

#include "wavefront/heteroclinic.hpp"
#include "wavefront/model.hpp"
#include "wavefront/spectrum.hpp"

namespace wavefront {

/// Constants of the wave equation at speed c = 1/eps, per component i
/// (component diffusion d_i): alpha_i < 0 < beta_i are the roots of
/// d_i eps^2 z^2 - z - 1 = 0, so alpha_i + beta_i = 1/(d_i eps^2) and
/// alpha_i beta_i = -1/(d_i eps^2); pref_i = 1/sqrt(1 + 4 d_i eps^2)
/// normalizes the two-sided exponential kernel to unit mass.
struct WaveParams {
  double c = 0.0;
  double eps = 0.0;
  double mu = 0.0;  // weight of the convergence norm
  Vec alpha, beta, pref;
  Vec diffusion;
  double lambda_eps = 0.0;  // decaying rate of the front tail at -infinity
  Vec v1;                   // its unit (max-norm) eigenvector
  bool unique_in_strip = false;
};

/// Derives WaveParams for speed c from the zero-linearization of the
/// model: continues lambda0 to the wave problem and picks the norm weight
/// mu = lambda0/2, moved off any band of characteristic real parts.
WaveParams wave_params(const Model& m, const DominantRoot& dom, double c);

/// Front profile iterate on a uniform grid, extended analytically on both
/// sides: c_tail e^{lambda t} v below the grid and the equilibrium K above
/// it. Dense evaluation is piecewise cubic Hermite.
struct WaveProfile {
  double t0 = 0.0;
  double h = 0.0;
  double tau = 0.0;
  std::vector<Vec> psi, dpsi;
  Vec K;
  double tail_c = 0.0;
  double tail_lambda = 0.0;
  Vec tail_v;

  int dim() const { return psi.empty() ? 0 : static_cast<int>(psi[0].size()); }
  double t_end() const { return t0 + h * (psi.empty() ? 0 : psi.size() - 1); }
  double time(size_t i) const { return t0 + h * i; }
  Vec eval(double t) const;
  Vec eval_deriv(double t) const;
};

/// One application of the front integral operator
///   psi(t) <- pref [ integral_{-inf}^t e^{alpha (t-s)} g(s) ds
///                  + integral_t^{+inf} e^{beta (t-s)} g(s) ds ],
/// g(s) = psi(s) + f(psi_s), evaluated on the grid by stable one-step
/// recurrences whose per-interval weights are the exact exponential
/// moments of the linear nodal hats (plain quadrature fails here: beta
/// grows like c^2). The half-line pieces beyond the grid are integrated
/// in closed form from the tail parametrizations. Returns the new iterate
/// with its derivative field; does not re-anchor the translation gauge.
WaveProfile picard_step(const Model& m, const WaveParams& wp, const WaveProfile& cur);

struct ProfileOptions {
  double h = 0.01;
  double tol_fix = 1e-9;
  int k_max = 500;
  double tail_lo_rel = 1e-6;   // left truncation: ||psi(T-)|| target
  double right_tol = 1e-8;     // right truncation: ||psi(T+) - K||
  int max_extend = 2;
  double tail_fit_lo = 3e-6;   // tail refit window, relative to ||K||
  double tail_fit_hi = 1e-2;
  // Window refits of the tail amplitude stabilize the transient, but the
  // fit window's second-order contamination biases the amplitude by ~1e-4
  // relative, and through the translation mode that parks the iteration a
  // fixed distance from the true front. Once the step norm falls below
  // this (relative to ||K||) the refit stops and the operator's own
  // edge-matched amplitude is kept.
  double refit_until_rel = 1e-5;
};

struct ProfileResult {
  WaveProfile profile;
  bool converged = false;
  int iterations = 0;
  std::vector<double> deltas;  // successive weighted-norm differences
  std::vector<double> ratios;  // empirical contraction ratios
  int extensions = 0;
};

/// Solves for the front profile at the speed encoded in wp: initializes
/// from the connecting orbit, then iterates picard_step with the
/// translation gauge re-anchored after every step (||psi(0)|| = ||K||/2)
/// and the left tail refit on the linear-regime window. Converged when
/// the weighted-norm step difference falls below tol_fix; aborts after 5
/// consecutive non-contracting steps or k_max iterations; grows the grid
/// (at most max_extend times) when the converged tails miss their
/// truncation targets.
ProfileResult solve_profile(const Model& m, const WaveParams& wp, const HeteroResult& het,
                            const ProfileOptions& opt = {});

/// Sup over interior nodes of the wave-equation defect
/// |eps^2 d psi'' - psi' + f(psi_t)|, with psi'' by central second
/// differences. Two error sources set the floor: the discretization's
/// O(h^2), and leftover iteration noise delta amplified to
/// eps^2 4 delta / h^2 by the second difference, so reading the defect at
/// small h requires a correspondingly small tol_fix.
double residual(const Model& m, const WaveParams& wp, const WaveProfile& p);

struct FrontReport {
  bool positive = false;
  bool monotone_left = false;
  double lambda_eps = 0.0;
  double lambda_fit = 0.0;
  double v1_angle_deg = 0.0;
  double slope_ratio_err = 0.0;  // sup rel deviation of psi'/psi from lambda_eps
  double residual_sup = 0.0;
  Vec v1_eps, v1_fit;
  std::vector<double> contraction;
  bool converged = false;

  bool ok(double tol_lambda = 0.02, double tol_angle = 2.0, double tol_slope = 0.02) const {
    return converged && positive && monotone_left &&
           std::abs(lambda_fit - lambda_eps) <= tol_lambda * std::abs(lambda_eps) &&
           v1_angle_deg <= tol_angle && slope_ratio_err <= tol_slope;
  }
};

/// Certifies the computed front: strict positivity (nodes, midpoints,
/// tails), monotone growth of every component through the left tail, and
/// agreement of the measured tail decay (rate, direction, and the ratio
/// psi'/psi) with the characteristic prediction.
FrontReport verify_front(const Model& m, const WaveParams& wp, const ProfileResult& pr);

/// Weighted norm of a node difference: max over nodes of
/// max(1, e^{-mu t}) |y(t)|, the discrete version of the norm used for
/// convergence control.
double weighted_norm(const std::vector<double>& times, const std::vector<Vec>& y, double mu);

}  // namespace wavefront
