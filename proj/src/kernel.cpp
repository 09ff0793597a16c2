#include "wavefront/kernel.hpp"

#include <cmath>

namespace wavefront {
namespace {

// Gauss-Legendre nodes/weights on [-1, 1], tabulated for the supported
// node counts. Node counts outside the table fall back to 8.
struct GL {
  std::vector<double> x, w;
};

const GL& gl_rule(int n) {
  static const GL g4{{-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                      0.8611363115940526},
                     {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                      0.3478548451374538}};
  static const GL g8{{-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                      -0.1834346424956498, 0.1834346424956498, 0.5255324099163290,
                      0.7966664774136267, 0.9602898564975363},
                     {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                      0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                      0.2223810344533745, 0.1012285362903763}};
  static const GL g16{
      {-0.9894009349916499, -0.9445750230732326, -0.8656312023878318, -0.7554044083550030,
       -0.6178762444026438, -0.4580167776572274, -0.2816035507792589, -0.0950125098376374,
       0.0950125098376374, 0.2816035507792589, 0.4580167776572274, 0.6178762444026438,
       0.7554044083550030, 0.8656312023878318, 0.9445750230732326, 0.9894009349916499},
      {0.0271524594117541, 0.0622535239386479, 0.0951585116824928, 0.1246289712555339,
       0.1495959888165767, 0.1691565193950025, 0.1826034150449236, 0.1894506104550685,
       0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
       0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541}};
  if (n <= 4) return g4;
  if (n >= 16) return g16;
  return g8;
}

}  // namespace

DelayKernel::DelayKernel(int n, double tau) : n_(n), tau_(tau) {
  if (n < 1) throw ConfigError("kernel dimension must be >= 1");
  if (!(tau > 0)) throw ConfigError("tau must be positive");
}

DelayKernel DelayKernel::atom(int n, double tau, double theta, const Mat& w) {
  DelayKernel k(n, tau);
  k.add_atom(theta, w);
  return k;
}

void DelayKernel::add_atom(double theta, const Mat& w) {
  if (theta < -tau_ - 1e-12 || theta > 1e-12)
    throw ConfigError("atom location must lie in [-tau, 0]");
  if (w.rows() != n_ || w.cols() != n_)
    throw ConfigError("atom weight must be N x N");
  atoms_.push_back({std::min(0.0, std::max(-tau_, theta)), w});
}

void DelayKernel::add_piece(DensityPiece p) {
  if (p.a < -tau_ - 1e-12 || p.b > 1e-12 || !(p.a < p.b))
    throw ConfigError("density piece must satisfy -tau <= a < b <= 0");
  if (p.coeffs.empty()) throw ConfigError("density piece needs coefficients");
  for (const auto& c : p.coeffs)
    if (c.rows() != n_ || c.cols() != n_)
      throw ConfigError("density coefficients must be N x N");
  pieces_.push_back(std::move(p));
}

Vec DelayKernel::apply(const History& phi) const {
  if (phi.dim() != n_) throw ConfigError("history dimension mismatch");
  Vec out = Vec::Zero(n_);
  for (const auto& a : atoms_) out += a.weight * phi(a.theta);
  for (const auto& p : pieces_) {
    const GL& gl = gl_rule(p.quad_nodes);
    const double mid = 0.5 * (p.a + p.b);
    const double half = 0.5 * (p.b - p.a);
    for (size_t q = 0; q < gl.x.size(); ++q) {
      const double theta = mid + half * gl.x[q];
      Mat d = Mat::Zero(n_, n_);
      double pw = 1.0;
      for (const auto& c : p.coeffs) {
        d += c * pw;
        pw *= theta;
      }
      out += (half * gl.w[q]) * (d * phi(theta));
    }
  }
  return out;
}

Complex poly_exp_moment(int k, double a, double b, Complex z) {
  const double span = std::max(std::abs(a), std::abs(b));
  if (std::abs(z) * span < 1.0) {
    // sum_m z^m / m! * (b^{k+m+1} - a^{k+m+1}) / (k+m+1)
    Complex sum = 0.0, term;
    double pa = std::pow(a, k + 1), pb = std::pow(b, k + 1);
    Complex zm = 1.0;
    double fact = 1.0;
    for (int m = 0; m < 60; ++m) {
      term = zm / fact * (pb - pa) / double(k + m + 1);
      sum += term;
      if (std::abs(term) < 1e-18 * (1.0 + std::abs(sum)) && m > 3) break;
      pa *= a;
      pb *= b;
      zm *= z;
      fact *= (m + 1.0);
    }
    return sum;
  }
  // Integration by parts: I_k = [theta^k e^{z theta}/z]_a^b - (k/z) I_{k-1}.
  const Complex ea = std::exp(z * a), eb = std::exp(z * b);
  Complex ik = (eb - ea) / z;
  double pa = 1.0, pb = 1.0;
  for (int j = 1; j <= k; ++j) {
    pa *= a;
    pb *= b;
    ik = (pb * eb - pa * ea) / z - (double(j) / z) * ik;
  }
  return ik;
}

CMat DelayKernel::exp_symbol(Complex z) const {
  CMat out = CMat::Zero(n_, n_);
  for (const auto& a : atoms_) out += a.weight.cast<Complex>() * std::exp(z * a.theta);
  for (const auto& p : pieces_) {
    for (size_t k = 0; k < p.coeffs.size(); ++k)
      out += p.coeffs[k].cast<Complex>() * poly_exp_moment(static_cast<int>(k), p.a, p.b, z);
  }
  return out;
}

Mat DelayKernel::exp_symbol_real(double z) const {
  return exp_symbol(Complex(z, 0.0)).real();
}

Mat DelayKernel::mass() const { return exp_symbol_real(0.0); }

double DelayKernel::op_norm() const {
  double s = 0.0;
  for (const auto& a : atoms_) s += row_sum_norm(a.weight);
  for (const auto& p : pieces_) {
    const GL& gl = gl_rule(std::max(p.quad_nodes, 16));
    const double mid = 0.5 * (p.a + p.b);
    const double half = 0.5 * (p.b - p.a);
    for (size_t q = 0; q < gl.x.size(); ++q) {
      const double theta = mid + half * gl.x[q];
      Mat d = Mat::Zero(n_, n_);
      double pw = 1.0;
      for (const auto& c : p.coeffs) {
        d += c * pw;
        pw *= theta;
      }
      s += half * gl.w[q] * row_sum_norm(d);
    }
  }
  return s;
}

double DelayKernel::delay_horizon() const {
  double h = 0.0;
  for (const auto& a : atoms_)
    if (row_sum_norm(a.weight) > 0) h = std::max(h, -a.theta);
  for (const auto& p : pieces_) h = std::max(h, -p.a);
  return h;
}

DelayKernel DelayKernel::scaled(double s) const {
  DelayKernel out(n_, tau_);
  for (const auto& a : atoms_) out.add_atom(a.theta, s * a.weight);
  for (auto p : pieces_) {
    for (auto& c : p.coeffs) c *= s;
    out.add_piece(std::move(p));
  }
  return out;
}

DelayKernel& DelayKernel::operator+=(const DelayKernel& other) {
  if (other.n_ != n_) throw ConfigError("kernel dimension mismatch in sum");
  tau_ = std::max(tau_, other.tau_);
  for (const auto& a : other.atoms_) atoms_.push_back(a);
  for (const auto& p : other.pieces_) pieces_.push_back(p);
  return *this;
}

}  // namespace wavefront
