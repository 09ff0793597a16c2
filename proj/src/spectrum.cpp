#include "wavefront/spectrum.hpp"

#include <cmath>

namespace wavefront {

namespace {

Vec diffusion_or_ones(const CharProblem& p) {
  if (p.diffusion.size() == p.kernel.dim()) return p.diffusion;
  return Vec::Ones(p.kernel.dim());
}

// Derivative of z -> det by complex step; exact to O(h^2) with h = 1e-100,
// valid because det restricted to the real axis is real analytic.
double det_deriv_real(const CharProblem& p, double x) {
  const double h = 1e-100;
  return char_det(p, Complex(x, h)).imag() / h;
}

}  // namespace

CMat char_matrix(const CharProblem& p, Complex z) {
  const int n = p.kernel.dim();
  CMat m = p.kernel.exp_symbol(z);
  m -= z * CMat::Identity(n, n);
  if (p.eps != 0.0) {
    const Vec d = diffusion_or_ones(p);
    const Complex z2 = p.eps * p.eps * z * z;
    for (int i = 0; i < n; ++i) m(i, i) += z2 * d(i);
  }
  return m;
}

Mat char_matrix_real(const CharProblem& p, double z) {
  const int n = p.kernel.dim();
  Mat m = p.kernel.exp_symbol_real(z);
  m -= z * Mat::Identity(n, n);
  if (p.eps != 0.0) {
    const Vec d = diffusion_or_ones(p);
    const double z2 = p.eps * p.eps * z * z;
    for (int i = 0; i < n; ++i) m(i, i) += z2 * d(i);
  }
  return m;
}

Complex char_det(const CharProblem& p, Complex z) {
  return char_matrix(p, z).determinant();
}

CMat first_order_matrix(const CharProblem& p, Complex s) {
  if (p.eps == 0.0) throw ConfigError("first-order form requires eps > 0");
  const int n = p.kernel.dim();
  const Vec d = diffusion_or_ones(p);
  const double ie2 = 1.0 / (p.eps * p.eps);
  CMat m = CMat::Zero(2 * n, 2 * n);
  const CMat sym = p.kernel.exp_symbol(s);
  for (int i = 0; i < n; ++i) {
    m(i, i) = s;
    m(i, n + i) = -1.0;
    m(n + i, n + i) = s - ie2 / d(i);
    for (int j = 0; j < n; ++j) m(n + i, j) = sym(i, j) * ie2 / d(i);
  }
  return m;
}

RectCount count_roots_rect(const CharProblem& p, Rect r) {
  if (!(r.re_lo < r.re_hi) || !(r.im_lo < r.im_hi))
    throw ConfigError("degenerate counting rectangle");

  const double scale_len = std::max(r.re_hi - r.re_lo, r.im_hi - r.im_lo);
  RectCount out;
  out.rect = r;

  for (int nudge = 0; nudge <= 3; ++nudge) {
    const Complex c0(r.re_lo, r.im_lo), c1(r.re_hi, r.im_lo);
    const Complex c2(r.re_hi, r.im_hi), c3(r.re_lo, r.im_hi);
    const Complex corner[5] = {c0, c1, c2, c3, c0};

    int per_side = 32;
    double winding_prev = 1e300;
    for (; per_side <= 32768; per_side *= 2) {
      double total_phase = 0.0;
      double min_mod = 1e300;
      bool slipped = false;
      for (int side = 0; side < 4 && !slipped; ++side) {
        Complex prev = char_det(p, corner[side]);
        min_mod = std::min(min_mod, std::abs(prev));
        for (int k = 1; k <= per_side; ++k) {
          const Complex z =
              corner[side] + (corner[side + 1] - corner[side]) * (double(k) / per_side);
          const Complex cur = char_det(p, z);
          min_mod = std::min(min_mod, std::abs(cur));
          if (cur == 0.0) {
            slipped = true;
            min_mod = 0.0;
            break;
          }
          const double dphi = std::arg(cur / prev);
          // A phase jump near pi is ambiguous; refine instead of guessing.
          if (std::abs(dphi) > 2.5) {
            slipped = true;
            break;
          }
          total_phase += dphi;
          prev = cur;
        }
      }
      if (!slipped) {
        const double winding = total_phase / (2.0 * M_PI);
        const double nearest = std::round(winding);
        if (std::abs(winding - nearest) < 0.25 && winding_prev == nearest) {
          out.count = static_cast<int>(nearest);
          out.samples_per_side = per_side;
          out.min_boundary_mod = min_mod;
          out.nudges = nudge;
          out.rect = r;
          return out;
        }
        winding_prev = (std::abs(winding - nearest) < 0.25) ? nearest : 1e300;
      } else {
        winding_prev = 1e300;
      }
      // A boundary modulus collapsing toward zero will not stabilize;
      // break out to the nudge loop.
      if (min_mod < 1e-13 * std::max(1.0, scale_len)) break;
    }
    // Inflate the rectangle slightly and retry: a root close to the
    // boundary makes the phase walk unstable.
    const double bump = 1e-3 * scale_len * (nudge + 1);
    r.re_lo -= bump;
    r.re_hi += bump;
    r.im_lo -= bump;
    r.im_hi += bump;
  }
  throw ConvergenceError("root count did not stabilize (root on or near boundary?)");
}

DominantRoot dominant_real_root(const CharProblem& p, double lo, double hi) {
  const double lnrm = p.kernel.op_norm();
  if (hi < lo) hi = lnrm + 1.0;
  if (lo < 0) throw ConfigError("real root search starts at lo >= 0");

  auto fdet = [&p](double x) { return char_matrix_real(p, x).determinant(); };

  // Sign scan; keep the rightmost sign change.
  const int n_scan = 600;
  double a = -1.0, b = -1.0;
  double prev_x = lo, prev_f = fdet(lo);
  for (int i = 1; i <= n_scan; ++i) {
    const double x = lo + (hi - lo) * i / n_scan;
    const double fx = fdet(x);
    if (prev_f == 0.0 || (prev_f < 0) != (fx < 0)) {
      a = prev_x;
      b = x;
    }
    prev_x = x;
    prev_f = fx;
  }
  if (a < 0)
    throw HypothesisError("no real characteristic root in [" + std::to_string(lo) + ", " +
                          std::to_string(hi) + "]");

  double fa = fdet(a);
  for (int i = 0; i < 80 && b - a > 1e-13 * std::max(1.0, std::abs(b)); ++i) {
    const double mid = 0.5 * (a + b);
    const double fm = fdet(mid);
    if (fm == 0.0) {
      a = b = mid;
      break;
    }
    if ((fm < 0) == (fa < 0)) {
      a = mid;
      fa = fm;
    } else {
      b = mid;
    }
  }
  double root = 0.5 * (a + b);
  for (int i = 0; i < 8; ++i) {
    const double f = fdet(root);
    const double df = det_deriv_real(p, root);
    if (df == 0.0) break;
    const double step = f / df;
    root -= step;
    if (std::abs(step) < 1e-12 * std::max(1.0, std::abs(root))) break;
  }

  DominantRoot out;
  out.lambda0 = root;
  out.det_slope = std::abs(det_deriv_real(p, root));

  // Null vector: right singular direction of the smallest singular value.
  const Mat m = char_matrix_real(p, root);
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullV);
  Vec v = svd.matrixV().col(m.cols() - 1);
  int imax = 0;
  v.cwiseAbs().maxCoeff(&imax);
  if (v(imax) < 0) v = -v;
  v /= max_norm(v);
  out.v = v;
  if (!(v.array() > 0).all())
    throw HypothesisError("null vector of the dominant root is not strictly positive");

  // Simplicity: an isolating square around the root contains exactly one
  // root, and the determinant has nonzero slope there.
  const double iso = std::max(0.05 * std::max(root, 1.0), 1e-3);
  Rect sq{root - iso, root + iso, -iso, iso};
  RectCount simple_count = count_roots_rect(p, sq);
  out.certificates.emplace_back(simple_count.rect, simple_count.count);
  out.simple = (simple_count.count == 1) && out.det_slope > 1e-10;
  if (!out.simple)
    throw HypothesisError("dominant real root is not simple (count " +
                          std::to_string(simple_count.count) + " in isolating square)");

  // Dominance: the rectangle covering every possible root with real part
  // >= lambda0 - delta contains only this root. For Re z >= 0 any root
  // satisfies |z| <= ||L||, so the rectangle below is exhaustive.
  const double delta = 0.1 * std::max(root, 1e-2);
  const double y = 2.0 * lnrm + 1.0;
  Rect strip{std::max(0.0, root - delta), std::max(root + 1.0, lnrm + 1.0), -y, y};
  RectCount dom_count = count_roots_rect(p, strip);
  out.certificates.emplace_back(dom_count.rect, dom_count.count);
  out.dominant = dom_count.count == 1;
  if (!out.dominant)
    throw HypothesisError("dominant root certificate failed: " +
                          std::to_string(dom_count.count) + " roots in the strip");
  return out;
}

Continuation root_continuation(const DelayKernel& L, const Vec& diffusion, double eps,
                               double lambda0, double delta, double delta1) {
  if (!(eps > 0)) throw ConfigError("root continuation requires eps > 0");
  CharProblem p(L, eps, diffusion);
  if (delta <= 0) delta = 0.5 * std::max(lambda0, 1e-2);
  if (delta1 <= 0) delta1 = std::max(lambda0, 1e-2);

  auto fdet = [&p](double x) { return char_matrix_real(p, x).determinant(); };
  double z = lambda0;
  bool converged = false;
  for (int i = 0; i < 60; ++i) {
    const double f = fdet(z);
    const double df = det_deriv_real(p, z);
    if (df == 0.0) break;
    const double step = f / df;
    z -= step;
    if (std::abs(step) < 1e-13 * std::max(1.0, std::abs(z))) {
      converged = true;
      break;
    }
  }
  if (!converged || !std::isfinite(z))
    throw ConvergenceError("Newton continuation of the dominant root failed at eps = " +
                           std::to_string(eps));

  Continuation out;
  out.eps = eps;
  out.lambda = z;

  const Mat m = char_matrix_real(p, z);
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullV);
  Vec v = svd.matrixV().col(m.cols() - 1);
  int imax = 0;
  v.cwiseAbs().maxCoeff(&imax);
  if (v(imax) < 0) v = -v;
  v /= max_norm(v);
  out.v = v;

  const double y = 2.0 * L.op_norm() + 1.0;
  out.strip = Rect{lambda0 - delta, lambda0 + delta1, -y, y};
  if (z <= out.strip.re_lo || z >= out.strip.re_hi) {
    // Continued root left the certification strip: widen around it.
    out.strip.re_lo = std::min(out.strip.re_lo, z - 0.1 * std::abs(z));
    out.strip.re_hi = std::max(out.strip.re_hi, z + 0.1 * std::abs(z));
  }
  RectCount c = count_roots_rect(p, out.strip);
  out.unique_in_strip = (c.count == 1);
  out.strip = c.rect;
  return out;
}

}  // namespace wavefront
