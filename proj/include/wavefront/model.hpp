#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "wavefront/kernel.hpp"

namespace wavefront {

/// A delayed reaction model: the nonlinear functional f acting on history
/// segments, the positive equilibrium K (when one exists), and the Frechet
/// derivative of f at a given segment, represented as a DelayKernel.
struct Model {
  std::string name;
  int n = 1;
  double tau = 1.0;
  double delay_horizon = 0.0;  // largest delay f actually reads; 0 = undelayed
  Vec diffusion;               // per-component diffusion coefficients, ones by default

  std::function<Vec(const History&)> f;
  std::function<DelayKernel(const History&)> jacobian_at;

  bool has_equilibrium = false;
  Vec K;

  DelayKernel linearization_at_zero() const {
    return jacobian_at(HistorySegment::constant(tau, Vec::Zero(n)));
  }
  DelayKernel linearization_at_K() const {
    if (!has_equilibrium) throw HypothesisError("model has no positive equilibrium");
    return jacobian_at(HistorySegment::constant(tau, K));
  }
};

/// Delayed logistic model f(phi) = b phi(0) [1 - (L phi)], scalar.
/// The positive equilibrium is K = 1 / L(1).
Model make_logistic(double b, const DelayKernel& L);

/// Single-delay logistic f(phi) = b phi(0) [1 - phi(-tau) / K].
Model make_fisher(double b, double tau, double K);

struct ChemostatParams {
  double D = 1.0;    // dilution rate
  double S0 = 1.0;   // input nutrient concentration
  double tau = 0.2;  // conversion delay
  double m = 4.0;    // maximal uptake rate
  double a = 1.0;    // half-saturation constant
  double d1 = 1.0;   // nutrient diffusion
  double d2 = 1.0;   // biomass diffusion
};

/// Two-species chemostat with Michaelis-Menten uptake g(S) = m S / (a + S),
/// written in shifted coordinates (s, u) = (S0 - S, u) so that the washout
/// state maps to the origin and the survival state to a positive K:
///   s'(t) = -D s(t) + g(S0 - s(t)) u(t)
///   u'(t) = e^{-D tau} g(S0 - s(t - tau)) u(t - tau) - D u(t).
/// A positive equilibrium exists iff g(S0) > D e^{D tau}.
Model make_chemostat(const ChemostatParams& p);

/// Survival threshold helpers for the chemostat.
double chemostat_uptake(const ChemostatParams& p, double S);
bool chemostat_survives(const ChemostatParams& p);

struct H1Report {
  bool ok = false;
  bool K_positive = false;
  double res0 = 0.0;  // ||f(0)||
  double resK = 0.0;  // ||f(K)||
  std::string detail;
};

/// Verifies f(0) = 0, f(K) = 0, K > 0 componentwise at tolerance
/// tol * (1 + ||K||). A missing or non-positive K is reported as a
/// violation, not an exception.
H1Report check_h1(const Model& m, double tol = 1e-10);

struct MarginReport {
  bool found = false;
  double beta = 0.0;   // smallest margin found; f_i(phi) + beta phi_i(0) >= -tol
  double worst = 0.0;  // most negative f_i(phi) + beta phi_i(0) over samples
  int samples = 0;
};

/// Searches for a quasipositivity margin beta such that
/// f_i(phi) + beta phi_i(0) >= 0 for all sampled segments 0 <= phi <= M.
/// Sampling covers constants, monotone ramps, oscillations, and segments
/// with phi_i(0) = 0, which falsify models that admit no margin.
MarginReport positivity_margin(const Model& m, double M, int n_samples = 1000,
                               double beta_max = 1e6, std::uint64_t seed = 1,
                               double tol = 1e-9);

}  // namespace wavefront
