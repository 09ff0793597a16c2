#pragma once

#include <functional>
#include <vector>

#include "wavefront/types.hpp"

namespace wavefront {

/// A history segment: a function [-tau, 0] -> R^N, with theta = 0 the
/// current time. All delayed functionals are evaluated through this
/// interface.
class History {
 public:
  virtual ~History() = default;
  virtual Vec operator()(double theta) const = 0;
  virtual int dim() const = 0;
  virtual double tau() const = 0;
};

/// History backed by a callable; used for analytic seeds and adapters.
class FnHistory final : public History {
 public:
  FnHistory(int n, double tau, std::function<Vec(double)> f)
      : n_(n), tau_(tau), f_(std::move(f)) {}
  Vec operator()(double theta) const override { return f_(theta); }
  int dim() const override { return n_; }
  double tau() const override { return tau_; }

 private:
  int n_;
  double tau_;
  std::function<Vec(double)> f_;
};

/// Sampled history on a strictly increasing grid spanning exactly
/// [-tau, 0], evaluated by piecewise cubic Hermite interpolation with
/// stored derivative values.
class HistorySegment final : public History {
 public:
  /// times must be strictly increasing with times.front() == -tau and
  /// times.back() == 0; values and derivs hold one R^N vector per node.
  HistorySegment(std::vector<double> times, std::vector<Vec> values,
                 std::vector<Vec> derivs);

  /// Samples f (and optionally df) on a uniform grid of n nodes.
  /// Without df, derivatives are taken from the interpolating cubic
  /// through neighbouring samples.
  static HistorySegment sample(double tau, int n, const std::function<Vec(double)>& f,
                               const std::function<Vec(double)>* df = nullptr);

  static HistorySegment constant(double tau, const Vec& v, int n = 5);

  Vec operator()(double theta) const override;
  Vec deriv(double theta) const;
  int dim() const override { return static_cast<int>(values_[0].size()); }
  double tau() const override { return -times_.front(); }

  const std::vector<double>& times() const { return times_; }
  const std::vector<Vec>& values() const { return values_; }
  const std::vector<Vec>& derivs() const { return derivs_; }

 private:
  std::vector<double> times_;
  std::vector<Vec> values_;
  std::vector<Vec> derivs_;
};

/// Cubic Hermite basis evaluation on [t0, t1] with endpoint values/slopes.
Vec hermite_eval(double t, double t0, double t1, const Vec& y0, const Vec& y1,
                 const Vec& d0, const Vec& d1);
Vec hermite_eval_deriv(double t, double t0, double t1, const Vec& y0, const Vec& y1,
                       const Vec& d0, const Vec& d1);

}  // namespace wavefront
