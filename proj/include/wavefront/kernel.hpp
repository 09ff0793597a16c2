#pragma once

#include <vector>

#include "wavefront/history.hpp"
#include "wavefront/types.hpp"

namespace wavefront {

/// Point mass of the kernel: weight matrix W acting on phi(theta).
struct KernelAtom {
  double theta;  // in [-tau, 0]
  Mat weight;    // N x N
};

/// Polynomial density piece on [a, b] subset of [-tau, 0]:
/// density(theta) = sum_k coeffs[k] * theta^k.
struct DensityPiece {
  double a = 0.0;
  double b = 0.0;
  std::vector<Mat> coeffs;
  int quad_nodes = 8;  // Gauss-Legendre nodes used by apply()
};

/// Bounded linear functional L on C([-tau,0]; R^N):
///   L(phi) = sum_j W_j phi(theta_j) + integral of density(theta) phi(theta).
/// Atoms and density pieces may be freely combined; the same object serves
/// as a model linearization and as a user-specified interaction kernel.
class DelayKernel {
 public:
  DelayKernel(int n, double tau);

  /// Kernel consisting of a single atom.
  static DelayKernel atom(int n, double tau, double theta, const Mat& w);

  void add_atom(double theta, const Mat& w);
  void add_piece(DensityPiece p);

  int dim() const { return n_; }
  double tau() const { return tau_; }
  const std::vector<KernelAtom>& atoms() const { return atoms_; }
  const std::vector<DensityPiece>& pieces() const { return pieces_; }

  /// L(phi). Atoms are evaluated exactly; each density piece by
  /// Gauss-Legendre quadrature with its configured node count.
  Vec apply(const History& phi) const;

  /// L(e^{z .} I), entire in z. Atom terms are exact; density terms use
  /// closed-form polynomial-exponential moments (series form near z = 0),
  /// so the result carries no quadrature error.
  CMat exp_symbol(Complex z) const;
  Mat exp_symbol_real(double z) const;

  /// L(1): the action on constant segments.
  Mat mass() const;

  /// Operator norm induced by the sup/max norm:
  /// sum of atom row-sum norms plus the integral of the density norm.
  double op_norm() const;

  /// Largest delay at which the kernel carries mass; 0 for kernels
  /// supported entirely at theta = 0.
  double delay_horizon() const;

  DelayKernel scaled(double s) const;

  /// Pointwise sum; dimensions must match, horizon is the larger tau.
  DelayKernel& operator+=(const DelayKernel& other);

 private:
  int n_;
  double tau_;
  std::vector<KernelAtom> atoms_;
  std::vector<DensityPiece> pieces_;
};

/// Exact integral of theta^k e^{z theta} over [a, b]. Uses the integration
/// by parts recurrence away from z = 0 and a power series when |z| (b - a)
/// is small, so it is accurate for all z including z = 0.
Complex poly_exp_moment(int k, double a, double b, Complex z);

}  // namespace wavefront
