#pragma once

#include <utility>
#include <vector>

#include "wavefront/kernel.hpp"

namespace wavefront {

struct Rect {
  double re_lo = 0, re_hi = 0, im_lo = 0, im_hi = 0;
};

/// Characteristic problem for the linearization with kernel L:
///   eps = 0:  Delta_0(z) = L(e^{z .} I) - z I
///   eps > 0:  Delta_eps(z) = eps^2 z^2 diag(d) - z I + L(e^{z .} I).
struct CharProblem {
  DelayKernel kernel;
  double eps = 0.0;
  Vec diffusion;  // empty = ones

  CharProblem(DelayKernel k, double e = 0.0, Vec d = Vec())
      : kernel(std::move(k)), eps(e), diffusion(std::move(d)) {}
};

CMat char_matrix(const CharProblem& p, Complex z);
Mat char_matrix_real(const CharProblem& p, double z);
Complex char_det(const CharProblem& p, Complex z);

/// Companion first-order form: the 2N x 2N block matrix
///   [ s I, -I; diag(d)^{-1} L(e^{s .} I)/eps^2, s I - diag(d)^{-1}/eps^2 ]
/// whose determinant satisfies
///   det Delta_eps(s) = eps^{2N} (prod d_i) det(first-order form).
CMat first_order_matrix(const CharProblem& p, Complex s);

struct RectCount {
  int count = 0;
  int samples_per_side = 0;
  double min_boundary_mod = 0.0;  // smallest |det| met on the walked boundary
  int nudges = 0;                 // boundary inflations applied
  Rect rect;                      // rectangle actually counted
};

/// Number of characteristic roots (with multiplicity) inside the rectangle,
/// by the argument principle: the winding of det along the boundary,
/// accumulated as phase increments and refined by doubling the sampling
/// until the winding is within 0.25 of a stable integer. A near-zero on
/// the boundary triggers a small inflation of the rectangle, retried at
/// most 3 times before failing.
RectCount count_roots_rect(const CharProblem& p, Rect r);

struct DominantRoot {
  double lambda0 = 0.0;
  Vec v;               // positive unit (max-norm) null vector
  bool simple = false;
  bool dominant = false;
  double det_slope = 0.0;  // |d/dz det| at the root
  std::vector<std::pair<Rect, int>> certificates;
};

/// Largest real characteristic root in [lo, hi] (defaults to
/// [0, ||L|| + 1]), located by sign scan, bisection, and Newton polish to
/// 1e-12, with its null vector and simplicity/dominance certificates by
/// rectangle counts. Throws HypothesisError when no real zero exists in
/// the range, when the root is not simple, when another root lies in the
/// dominance rectangle, or when the null vector is not strictly positive.
DominantRoot dominant_real_root(const CharProblem& p, double lo = 0.0, double hi = -1.0);

struct Continuation {
  double eps = 0.0;
  double lambda = 0.0;
  Vec v;
  bool unique_in_strip = false;
  Rect strip;
};

/// Continues the root lambda0 of the eps = 0 problem to Delta_eps by
/// Newton iteration on the real axis, then certifies uniqueness of the
/// continued root in the strip
/// [lambda0 - delta, lambda0 + delta1] x [-Y, Y], Y = 2 ||L|| + 1.
Continuation root_continuation(const DelayKernel& L, const Vec& diffusion, double eps,
                               double lambda0, double delta = -1.0, double delta1 = -1.0);

struct SpectrumReport {
  DominantRoot root;
  std::vector<Continuation> lambda_of_eps;
  double op_norm = 0.0;
};

}  // namespace wavefront
