#include "wavefront/history.hpp"

#include <algorithm>
#include <cmath>

namespace wavefront {

Vec hermite_eval(double t, double t0, double t1, const Vec& y0, const Vec& y1,
                 const Vec& d0, const Vec& d1) {
  const double h = t1 - t0;
  const double s = (t - t0) / h;
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1;
  const double h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2;
  const double h11 = s3 - s2;
  return h00 * y0 + (h10 * h) * d0 + h01 * y1 + (h11 * h) * d1;
}

Vec hermite_eval_deriv(double t, double t0, double t1, const Vec& y0, const Vec& y1,
                       const Vec& d0, const Vec& d1) {
  const double h = t1 - t0;
  const double s = (t - t0) / h;
  const double s2 = s * s;
  const double g00 = (6 * s2 - 6 * s) / h;
  const double g10 = 3 * s2 - 4 * s + 1;
  const double g01 = (-6 * s2 + 6 * s) / h;
  const double g11 = 3 * s2 - 2 * s;
  return g00 * y0 + g10 * d0 + g01 * y1 + g11 * d1;
}

HistorySegment::HistorySegment(std::vector<double> times, std::vector<Vec> values,
                               std::vector<Vec> derivs)
    : times_(std::move(times)), values_(std::move(values)), derivs_(std::move(derivs)) {
  if (times_.size() < 2) throw ConfigError("history segment needs at least 2 nodes");
  if (times_.size() != values_.size() || times_.size() != derivs_.size())
    throw ConfigError("history segment arrays must have equal length");
  for (size_t i = 1; i < times_.size(); ++i)
    if (!(times_[i] > times_[i - 1]))
      throw ConfigError("history grid must be strictly increasing");
  if (std::abs(times_.back()) > 1e-12)
    throw ConfigError("history grid must end at theta = 0");
  const auto n = values_[0].size();
  for (size_t i = 0; i < values_.size(); ++i)
    if (values_[i].size() != n || derivs_[i].size() != n)
      throw ConfigError("history node dimensions must agree");
}

HistorySegment HistorySegment::sample(double tau, int n, const std::function<Vec(double)>& f,
                                      const std::function<Vec(double)>* df) {
  if (tau <= 0) throw ConfigError("tau must be positive");
  if (n < 2) throw ConfigError("need at least 2 sample nodes");
  std::vector<double> ts(n);
  std::vector<Vec> vs(n), ds(n);
  for (int i = 0; i < n; ++i) {
    ts[i] = -tau + tau * i / (n - 1.0);
    vs[i] = f(ts[i]);
  }
  ts[n - 1] = 0.0;
  if (df) {
    for (int i = 0; i < n; ++i) ds[i] = (*df)(ts[i]);
  } else {
    // Second-order slopes: central differences inside, one-sided quadratic
    // at the ends.
    const double h = tau / (n - 1.0);
    for (int i = 1; i + 1 < n; ++i) ds[i] = (vs[i + 1] - vs[i - 1]) / (2 * h);
    if (n == 2) {
      ds[0] = (vs[1] - vs[0]) / h;
      ds[1] = ds[0];
    } else {
      ds[0] = (-3 * vs[0] + 4 * vs[1] - vs[2]) / (2 * h);
      ds[n - 1] = (3 * vs[n - 1] - 4 * vs[n - 2] + vs[n - 3]) / (2 * h);
    }
  }
  return HistorySegment(std::move(ts), std::move(vs), std::move(ds));
}

HistorySegment HistorySegment::constant(double tau, const Vec& v, int n) {
  const Vec zero = Vec::Zero(v.size());
  std::vector<double> ts(n);
  std::vector<Vec> vs(n, v), ds(n, zero);
  for (int i = 0; i < n; ++i) ts[i] = -tau + tau * i / (n - 1.0);
  ts[n - 1] = 0.0;
  return HistorySegment(std::move(ts), std::move(vs), std::move(ds));
}

Vec HistorySegment::operator()(double theta) const {
  const double lo = times_.front();
  if (theta < lo - 1e-9 || theta > 1e-9)
    throw ConfigError("history evaluated outside [-tau, 0]");
  theta = std::clamp(theta, lo, 0.0);
  auto it = std::upper_bound(times_.begin(), times_.end(), theta);
  size_t i = std::min(times_.size() - 1, static_cast<size_t>(std::max<std::ptrdiff_t>(
                                             1, it - times_.begin())));
  return hermite_eval(theta, times_[i - 1], times_[i], values_[i - 1], values_[i],
                      derivs_[i - 1], derivs_[i]);
}

Vec HistorySegment::deriv(double theta) const {
  const double lo = times_.front();
  theta = std::clamp(theta, lo, 0.0);
  auto it = std::upper_bound(times_.begin(), times_.end(), theta);
  size_t i = std::min(times_.size() - 1, static_cast<size_t>(std::max<std::ptrdiff_t>(
                                             1, it - times_.begin())));
  return hermite_eval_deriv(theta, times_[i - 1], times_[i], values_[i - 1], values_[i],
                            derivs_[i - 1], derivs_[i]);
}

}  // namespace wavefront
