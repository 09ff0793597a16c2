#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace wavefront {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using Complex = std::complex<double>;

/// Norm on R^N: max absolute component.
inline double max_norm(const Vec& v) {
  return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

/// Matrix norm induced by the max norm: largest absolute row sum.
inline double row_sum_norm(const Mat& w) {
  return w.rows() == 0 ? 0.0 : w.cwiseAbs().rowwise().sum().maxCoeff();
}

/// Raised when input data or configuration is malformed.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Raised when an iteration or root search fails to converge.
struct ConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised when observed dynamics contradict a structural assumption
/// (loss of positivity, missing equilibrium, no dominant root).
struct HypothesisError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace wavefront
