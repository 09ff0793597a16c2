// Acceptance gate for the wavefront pipeline: eight end-to-end criteria,
// one pass/fail line each. Exit code 0 iff every criterion passes.
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <exception>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "wavefront/harness.hpp"
#include "wavefront/heteroclinic.hpp"
#include "wavefront/model.hpp"
#include "wavefront/pde.hpp"
#include "wavefront/profile.hpp"
#include "wavefront/spectrum.hpp"

#include "count_fixtures.inc"

using namespace wavefront;

namespace {

struct CriterionFail : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw CriterionFail(msg);
}

// The fitted left-tail exponents the Fisher fronts must reproduce:
// 2c / (c + sqrt(c^2 - 4)), frozen to full precision.
const std::map<double, double> kFisherDecay = {
    {4.0, 1.0717967697244908},
    {6.0, 1.0294372515228594},
    {10.0, 1.010205144336438},
};

// Chemostat anchors at D = 1, tau = 0.2, m = 4, a = 1, S0 = 1.
constexpr double kChemoDexp = 1.221402758160170;     // D e^{D tau}
constexpr double kChemoLambda0 = 0.485838753365693;  // growth rate at washout
constexpr double kChemoLambda15 = 0.48665020611338074;  // front exponent, c = 15

// Shared pipeline artifacts, built once and reused across criteria.
struct Shared {
  Model fisher = make_fisher(1.0, 1.0, 1.0);
  DominantRoot fdom;
  HeteroResult fhet;
  std::map<double, ProfileResult> fprof;
  std::map<double, WaveParams> fwp;

  Model chemo = make_chemostat(ChemostatParams{});
  DominantRoot cdom;
  HeteroResult chet;
  WaveParams cwp15;
  ProfileResult cprof15;

  void build_fisher() {
    if (!fhet.traj.u.empty()) return;
    fdom = dominant_real_root(CharProblem(fisher.linearization_at_zero()));
    fhet = compute_heteroclinic(fisher, fdom);
  }
  const ProfileResult& fisher_profile(double c) {
    build_fisher();
    auto it = fprof.find(c);
    if (it != fprof.end()) return it->second;
    WaveParams wp = wave_params(fisher, fdom, c);
    fwp[c] = wp;
    return fprof.emplace(c, solve_profile(fisher, wp, fhet)).first->second;
  }
  void build_chemo() {
    if (!chet.traj.u.empty()) return;
    cdom = dominant_real_root(CharProblem(chemo.linearization_at_zero()));
    chet = compute_heteroclinic(chemo, cdom);
    cwp15 = wave_params(chemo, cdom, 15.0);
    cprof15 = solve_profile(chemo, cwp15, chet);
  }
};

Shared S;

// --- criterion 1: front decay law ------------------------------------------

std::string crit_decay_law() {
  double worst = 0.0;
  for (const auto& [c, want] : kFisherDecay) {
    const ProfileResult& pr = S.fisher_profile(c);
    require(pr.converged, fmt("profile at c = %g did not converge", c));
    FrontReport fr = verify_front(S.fisher, S.fwp.at(c), pr);
    require(std::abs(fr.lambda_eps - want) <= 1e-9 * want,
            fmt("c = %g: continuation exponent %.12g vs %.12g", c, fr.lambda_eps, want));
    double rel = std::abs(fr.lambda_fit - want) / want;
    worst = std::max(worst, rel);
    require(rel <= 0.02,
            fmt("c = %g: fitted exponent %.8g off the law %.8g by %.2f%%", c,
                fr.lambda_fit, want, 100 * rel));
  }
  return fmt("fitted tail exponents match 2c/(c+sqrt(c^2-4)) at c = 4, 6, 10; "
             "worst rel err %.2e (tol 2e-2)",
             worst);
}

// --- criterion 2: strict positivity ----------------------------------------

void check_profile_positive(const ProfileResult& pr, double knorm, double& min_val,
                            const std::string& tag) {
  const WaveProfile& p = pr.profile;
  require(p.tail_c > 0.0, tag + ": left tail amplitude not positive");
  for (int i = 0; i < p.tail_v.size(); ++i)
    require(p.tail_v[i] > 0.0, tag + ": left tail direction not positive");
  for (size_t j = 0; j < p.psi.size(); ++j) {
    for (int i = 0; i < p.psi[j].size(); ++i) {
      require(p.psi[j][i] > 0.0,
              fmt("%s: node value <= 0 at t = %.4g", tag.c_str(), p.time(j)));
      min_val = std::min(min_val, p.psi[j][i]);
    }
    if (j + 1 < p.psi.size()) {
      Vec mid = p.eval(p.time(j) + 0.5 * p.h);
      for (int i = 0; i < mid.size(); ++i) {
        require(mid[i] > 0.0,
                fmt("%s: midpoint value <= 0 at t = %.4g", tag.c_str(),
                    p.time(j) + 0.5 * p.h));
        min_val = std::min(min_val, mid[i]);
      }
    }
  }
  // Monotone growth through the left linear window, componentwise.
  for (size_t j = 0; j < p.psi.size() && max_norm(p.psi[j]) <= 0.1 * knorm; ++j)
    for (int i = 0; i < p.dpsi[j].size(); ++i)
      require(p.dpsi[j][i] > 0.0,
              fmt("%s: psi' <= 0 in the left window at t = %.4g", tag.c_str(), p.time(j)));
}

std::string crit_positivity() {
  double min_val = 1e300;
  int checked = 0;
  for (const auto& [c, want] : kFisherDecay) {
    check_profile_positive(S.fisher_profile(c), max_norm(S.fisher.K), min_val,
                           fmt("fisher c = %g", c));
    ++checked;
  }
  S.build_chemo();
  require(S.cprof15.converged, "chemostat profile at c = 15 did not converge");
  check_profile_positive(S.cprof15, max_norm(S.chemo.K), min_val, "chemostat c = 15");
  ++checked;
  return fmt("%d fronts strictly positive at nodes and midpoints, increasing on "
             "the left window; smallest value %.2e",
             checked, min_val);
}

// --- criterion 3: logistic closed form -------------------------------------

std::string crit_logistic_oracle() {
  Model m = make_logistic(1.0, DelayKernel::atom(1, 0.01, 0.0, Mat::Ones(1, 1)));
  DominantRoot dom = dominant_real_root(CharProblem(m.linearization_at_zero()));
  HeteroOptions opt;
  opt.h = 0.01;
  HeteroResult het = compute_heteroclinic(m, dom, opt);
  double err = 0.0;
  for (size_t j = 0; j < het.traj.u.size(); ++j) {
    double t = het.traj.time(j);
    err = std::max(err, std::abs(het.traj.u[j][0] - 1.0 / (1.0 + std::exp(-t))));
  }
  require(err <= 1e-6, fmt("max deviation from the sigmoid %.3e > 1e-6", err));
  return fmt("undelayed logistic orbit matches 1/(1+e^{-t}) to %.2e (tol 1e-6)", err);
}

// --- criterion 4: decay decomposition --------------------------------------

std::string crit_decay_decomposition() {
  S.build_fisher();
  double knorm = max_norm(S.fisher.K);
  auto [wa, wb] = decay_window(S.fhet.traj, 1e-6 * knorm, 1e-2 * knorm);
  DecayFit fit = fit_decay(S.fhet.traj, wa, wb);
  double rel = std::abs(fit.lambda - S.fdom.lambda0) / S.fdom.lambda0;
  require(rel <= 0.01, fmt("fitted rate %.8g vs lambda0 %.8g: rel %.2e > 1e-2",
                           fit.lambda, S.fdom.lambda0, rel));
  require(fit.remainder_at_floor || fit.remainder_slope >= 1.5 * S.fdom.lambda0,
          fmt("remainder slope %.4g < 1.5 lambda0", fit.remainder_slope));
  return fmt("orbit rate %.8g (rel err %.1e); remainder falls at slope %.4g "
             ">= 1.5 lambda0",
             fit.lambda, rel, fit.remainder_slope);
}

// --- criterion 5: spectrum identities --------------------------------------

DelayKernel random_kernel(std::mt19937_64& rng, int n, double tau) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::uniform_int_distribution<int> na(1, 3);
  DelayKernel k(n, tau);
  int atoms = na(rng);
  for (int a = 0; a < atoms; ++a) {
    double th = a == 0 ? 0.0 : -tau * std::abs(U(rng));
    Mat w(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) w(i, j) = U(rng);
    k.add_atom(th, w);
  }
  if (rng() & 1) {
    DensityPiece p;
    p.a = -0.8 * tau;
    p.b = -0.1 * tau;
    Mat w0(n, n), w1(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        w0(i, j) = U(rng);
        w1(i, j) = U(rng);
      }
    p.coeffs = {w0, w1};
    k.add_piece(p);
  }
  return k;
}

std::string crit_spectrum_identities() {
  // (a) the determinant of the second-order pencil against its first-order
  // companion form, at random kernels, points, and speeds.
  std::mt19937_64 rng(20260822);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  double worst_det = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    int n = 1 + static_cast<int>(rng() % 3);
    DelayKernel k = random_kernel(rng, n, 0.7);
    double eps = 0.05 + 0.45 * std::abs(U(rng));
    Vec d(n);
    for (int i = 0; i < n; ++i) d[i] = 0.3 + 2.0 * std::abs(U(rng));
    CharProblem p(k, eps, d);
    Complex s(2.0 * U(rng), 2.0 * U(rng));
    Complex lhs = char_det(p, s);
    Complex rhs = std::pow(Complex(eps * eps), n) *
                  first_order_matrix(p, s).determinant();
    for (int i = 0; i < n; ++i) rhs *= d[i];
    double rel = std::abs(lhs - rhs) / std::max(1e-30, std::abs(lhs));
    worst_det = std::max(worst_det, rel);
  }
  require(worst_det <= 1e-9,
          fmt("companion determinant identity off by %.2e > 1e-9", worst_det));

  // (b) kernel exponent identities alpha + beta = 1/(d eps^2),
  // alpha beta = -1/(d eps^2).
  double worst_id = 0.0;
  auto check_params = [&](const Model& m, const DominantRoot& dom, double c) {
    WaveParams wp = wave_params(m, dom, c);
    for (int i = 0; i < wp.alpha.size(); ++i) {
      double inv = 1.0 / (wp.diffusion[i] * wp.eps * wp.eps);
      worst_id = std::max(worst_id, std::abs(wp.alpha[i] + wp.beta[i] - inv) / inv);
      worst_id = std::max(worst_id, std::abs(wp.alpha[i] * wp.beta[i] + inv) / inv);
    }
  };
  S.build_fisher();
  for (const auto& [c, want] : kFisherDecay) check_params(S.fisher, S.fdom, c);
  ChemostatParams cp;
  cp.d1 = 0.5;
  cp.d2 = 2.0;
  Model chemo_uneq = make_chemostat(cp);
  DominantRoot cdom = dominant_real_root(CharProblem(chemo_uneq.linearization_at_zero()));
  check_params(chemo_uneq, cdom, 8.0);
  require(worst_id <= 1e-12, fmt("exponent identities off by %.2e > 1e-12", worst_id));

  // (c) argument-principle root counts against the precomputed closed-form
  // and high-precision oracles.
  int nudged = 0;
  for (const CountFixture& f : kCountFixtures) {
    DelayKernel k(1, f.r > 0 ? f.r : 0.01);
    if (f.w0 != 0.0 || f.w1 == 0.0) k.add_atom(0.0, Mat::Constant(1, 1, f.w0));
    if (f.w1 != 0.0) k.add_atom(-f.r, Mat::Constant(1, 1, f.w1));
    CharProblem p(k, f.eps, Vec::Constant(1, f.d));
    RectCount rc = count_roots_rect(p, Rect{f.re_lo, f.re_hi, f.im_lo, f.im_hi});
    nudged += rc.nudges;
    require(rc.count == f.count,
            fmt("root count %d != %d on [%g,%g]x[%g,%g] (eps=%g d=%g w0=%g w1=%g r=%g)",
                rc.count, f.count, f.re_lo, f.re_hi, f.im_lo, f.im_hi, f.eps, f.d,
                f.w0, f.w1, f.r));
  }
  return fmt("companion determinant to %.1e at 100 points; exponent identities "
             "to %.1e; %zu root counts exact (%d boundary nudges)",
             worst_det, worst_id, std::size(kCountFixtures), nudged);
}

// --- criterion 6: chemostat pipeline ---------------------------------------

std::string crit_chemostat() {
  S.build_chemo();
  ChemostatParams cp;
  double Sbar = cp.S0 - S.chemo.K[0];
  double dexp = cp.D * std::exp(cp.D * cp.tau);
  require(std::abs(dexp - kChemoDexp) <= 1e-12, "D e^{D tau} anchor drifted");
  double g = chemostat_uptake(cp, Sbar);
  require(std::abs(g - dexp) <= 1e-10,
          fmt("uptake at the survival state %.12g != D e^{D tau} %.12g", g, dexp));
  double ubar_want = std::exp(-cp.D * cp.tau) * (cp.S0 - Sbar);
  require(std::abs(S.chemo.K[1] - ubar_want) <= 1e-14 * ubar_want,
          fmt("biomass equilibrium %.16g != e^{-D tau}(S0 - Sbar) %.16g", S.chemo.K[1],
              ubar_want));
  require(std::abs(S.cdom.lambda0 - 0.486) <= 1e-3,
          fmt("growth rate %.6g not within 1e-3 of 0.486", S.cdom.lambda0));
  require(std::abs(S.cdom.lambda0 - kChemoLambda0) <= 1e-6,
          fmt("growth rate %.12g drifted from the frozen oracle %.12g", S.cdom.lambda0,
              kChemoLambda0));
  require(S.cprof15.converged, "profile at c = 15 did not converge");
  FrontReport fr = verify_front(S.chemo, S.cwp15, S.cprof15);
  require(fr.positive, "front at c = 15 not strictly positive");
  double rel = std::abs(fr.lambda_fit - kChemoLambda15) / kChemoLambda15;
  require(rel <= 0.02, fmt("front exponent %.8g off the c = 15 root %.8g by %.2f%%",
                           fr.lambda_fit, kChemoLambda15, 100 * rel));
  return fmt("equilibrium identities to 1e-10 / 1e-14, growth rate %.9g, positive "
             "front with exponent %.6g (rel err %.1e)",
             S.cdom.lambda0, fr.lambda_fit, rel);
}

// --- criterion 7: direct simulation cross-check ----------------------------

std::string crit_pde_validation() {
  const double c = 6.0;
  const ProfileResult& pr = S.fisher_profile(c);
  require(pr.converged, "profile at c = 6 did not converge");
  const WaveProfile& psi = pr.profile;
  const double x0 = 80.0;
  PdeOptions opt;
  opt.X = 120.0;
  opt.dx = 0.05;
  opt.t_end = 5.0;
  opt.init = [&](double theta, double x) { return psi.eval((x - x0) / c + theta); };
  PdeResult r = simulate(S.fisher, opt);
  TranslationFit tf = translation_error(r, r.snapshots.size() - 1, psi, c, x0);
  require(tf.rel_l2 <= 1e-2,
          fmt("relative L2 error %.3e > 1e-2 after t = 5", tf.rel_l2));
  SpeedFit sp = front_speed(r.front_t, r.front_x);
  double measured = -sp.speed;
  require(measured >= 5.7 && measured <= 6.3,
          fmt("measured front speed %.4g outside [5.7, 6.3]", measured));
  return fmt("evolved to t = 5: rel L2 error %.2e (tol 1e-2), front speed %.5g "
             "in [5.7, 6.3]",
             tf.rel_l2, measured);
}

// --- criterion 8: profile-to-orbit trend -----------------------------------

std::string crit_profile_trend() {
  S.build_fisher();
  const Trajectory& u = S.fhet.traj;
  const double mu = 0.5 * S.fdom.lambda0;
  const Vec uleft = u.eval(u.t0);
  auto ustar = [&](double t) -> Vec {
    if (t < u.t0) return std::exp(S.fdom.lambda0 * (t - u.t0)) * uleft;
    if (t > u.t_end()) return S.fisher.K;
    return u.eval(t);
  };
  std::vector<double> cs = {6.0, 12.0, 24.0}, dist;
  for (double c : cs) {
    const ProfileResult& pr = S.fisher_profile(c);
    require(pr.converged, fmt("profile at c = %g did not converge", c));
    const WaveProfile& p = pr.profile;
    double d = 0.0;
    for (size_t j = 0; j < p.psi.size(); ++j) {
      double t = p.time(j);
      double w = t < 0 ? std::exp(-mu * t) : 1.0;
      d = std::max(d, w * max_norm(p.psi[j] - ustar(t)));
    }
    dist.push_back(d);
  }
  for (size_t i = 1; i < dist.size(); ++i)
    require(dist[i] < dist[i - 1],
            fmt("weighted distance not decreasing: %.4e at c = %g vs %.4e at c = %g",
                dist[i], cs[i], dist[i - 1], cs[i - 1]));
  return fmt("weighted distance to the connecting orbit falls %.3e -> %.3e -> %.3e "
             "over c = 6, 12, 24",
             dist[0], dist[1], dist[2]);
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::string (*fn)();
  };
  const Criterion criteria[] = {
      {"front decay law", crit_decay_law},
      {"strict positivity", crit_positivity},
      {"logistic closed form", crit_logistic_oracle},
      {"decay decomposition", crit_decay_decomposition},
      {"spectrum identities", crit_spectrum_identities},
      {"chemostat pipeline", crit_chemostat},
      {"direct simulation", crit_pde_validation},
      {"profile-to-orbit trend", crit_profile_trend},
  };
  int failures = 0;
  int idx = 0;
  for (const Criterion& cr : criteria) {
    ++idx;
    std::string detail;
    bool ok = true;
    try {
      detail = cr.fn();
    } catch (const std::exception& e) {
      ok = false;
      detail = e.what();
    }
    std::printf("criterion %d (%s): %s - %s\n", idx, cr.name, ok ? "PASS" : "FAIL",
                detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  }
  std::printf("acceptance: %d/8 criteria passed\n", 8 - failures);
  return failures == 0 ? 0 : 1;
}
