#include "wavefront/model.hpp"

#include <cmath>
#include <random>

namespace wavefront {

Model make_logistic(double b, const DelayKernel& L) {
  if (L.dim() != 1) throw ConfigError("logistic model requires a scalar kernel");
  if (!(b > 0)) throw ConfigError("logistic model requires b > 0");
  Model m;
  m.name = "logistic_distributed";
  m.n = 1;
  m.tau = L.tau();
  m.delay_horizon = L.delay_horizon();
  m.diffusion = Vec::Ones(1);
  const double mass = L.mass()(0, 0);
  m.has_equilibrium = mass > 0;
  m.K = Vec::Constant(1, mass > 0 ? 1.0 / mass : 0.0);
  m.f = [b, L](const History& phi) {
    const double lphi = L.apply(phi)(0);
    return Vec::Constant(1, b * phi(0.0)(0) * (1.0 - lphi));
  };
  // Df(phi) psi = b psi(0) [1 - L phi] - b phi(0) (L psi).
  m.jacobian_at = [b, L](const History& phi) {
    const double lphi = L.apply(phi)(0);
    const double phi0 = phi(0.0)(0);
    DelayKernel j = L.scaled(-b * phi0);
    j.add_atom(0.0, Mat::Constant(1, 1, b * (1.0 - lphi)));
    return j;
  };
  return m;
}

Model make_fisher(double b, double tau, double K) {
  if (!(K > 0)) throw ConfigError("fisher model requires K > 0");
  DelayKernel L = DelayKernel::atom(1, tau, -tau, Mat::Constant(1, 1, 1.0 / K));
  Model m = make_logistic(b, L);
  m.name = "fisher_kpp_delay";
  return m;
}

double chemostat_uptake(const ChemostatParams& p, double S) {
  // Clipped at zero nutrient: solutions keep s <= S0, so the clip never
  // acts on the dynamics, but it makes f quasipositive on every box and
  // removes the pole at S = -a from transient arithmetic.
  return S > 0.0 ? p.m * S / (p.a + S) : 0.0;
}

bool chemostat_survives(const ChemostatParams& p) {
  return chemostat_uptake(p, p.S0) > p.D * std::exp(p.D * p.tau);
}

Model make_chemostat(const ChemostatParams& p) {
  if (!(p.S0 > 0) || !(p.D > 0) || !(p.m > 0) || !(p.a > 0) || !(p.tau > 0))
    throw ConfigError("chemostat parameters must be positive");
  Model m;
  m.name = "chemostat";
  m.n = 2;
  m.tau = p.tau;
  m.delay_horizon = p.tau;
  m.diffusion = Vec(2);
  m.diffusion << p.d1, p.d2;

  const double decay = std::exp(-p.D * p.tau);
  const double thr = p.D / decay;  // survival requires g(S0) > D e^{D tau}
  m.has_equilibrium = false;
  m.K = Vec::Zero(2);
  if (chemostat_uptake(p, p.S0) > thr && thr < p.m) {
    const double Sbar = p.a * thr / (p.m - thr);  // g(Sbar) = D e^{D tau}
    if (Sbar < p.S0) {
      m.has_equilibrium = true;
      m.K = Vec(2);
      m.K << p.S0 - Sbar, decay * (p.S0 - Sbar);
    }
  }

  auto g = [p](double S) { return chemostat_uptake(p, S); };
  auto dg = [p](double S) {
    return S > 0.0 ? p.m * p.a / ((p.a + S) * (p.a + S)) : 0.0;
  };

  m.f = [p, g, decay](const History& phi) {
    const Vec now = phi(0.0);
    const Vec lag = phi(-p.tau);
    Vec out(2);
    out(0) = -p.D * now(0) + g(p.S0 - now(0)) * now(1);
    out(1) = decay * g(p.S0 - lag(0)) * lag(1) - p.D * now(1);
    return out;
  };
  m.jacobian_at = [p, g, dg, decay](const History& phi) {
    const Vec now = phi(0.0);
    const Vec lag = phi(-p.tau);
    DelayKernel j(2, p.tau);
    Mat w0 = Mat::Zero(2, 2);
    w0(0, 0) = -p.D - dg(p.S0 - now(0)) * now(1);
    w0(0, 1) = g(p.S0 - now(0));
    w0(1, 1) = -p.D;
    j.add_atom(0.0, w0);
    Mat wt = Mat::Zero(2, 2);
    wt(1, 0) = -decay * dg(p.S0 - lag(0)) * lag(1);
    wt(1, 1) = decay * g(p.S0 - lag(0));
    j.add_atom(-p.tau, wt);
    return j;
  };
  return m;
}

H1Report check_h1(const Model& m, double tol) {
  H1Report r;
  r.res0 = max_norm(m.f(HistorySegment::constant(m.tau, Vec::Zero(m.n))));
  if (!m.has_equilibrium) {
    r.detail = "no positive equilibrium";
    return r;
  }
  r.K_positive = (m.K.array() > 0).all();
  r.resK = max_norm(m.f(HistorySegment::constant(m.tau, m.K)));
  const double scale = tol * (1.0 + max_norm(m.K));
  r.ok = r.K_positive && r.res0 <= scale && r.resK <= scale;
  if (!r.K_positive) r.detail = "equilibrium not componentwise positive";
  return r;
}

MarginReport positivity_margin(const Model& m, double M, int n_samples, double beta_max,
                               std::uint64_t seed, double tol) {
  if (!(M > 0)) throw ConfigError("sampling box bound M must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const int n = m.n;
  const int nodes = 33;

  MarginReport rep;
  rep.samples = n_samples;
  double beta_req = 0.0;  // max over samples of (-f_i) / phi_i(0)
  double worst_pinned = 0.0;
  bool impossible = false;

  for (int s = 0; s < n_samples && !impossible; ++s) {
    // Segment families: constants, ramps up/down, oscillations, rough
    // piecewise-linear noise, and shapes pinned to phi_i(0) = 0.
    const int family = s % 5;
    std::vector<double> amp(n), power(n), phase(n), freq(n);
    for (int i = 0; i < n; ++i) {
      amp[i] = M * unif(rng);
      power[i] = 0.5 + 3.0 * unif(rng);
      phase[i] = 6.2831853071795865 * unif(rng);
      freq[i] = 0.5 + 6.0 * unif(rng);
    }
    std::vector<Vec> rough(4, Vec::Zero(n));
    for (auto& v : rough)
      for (int i = 0; i < n; ++i) v(i) = M * unif(rng);
    int pin = (family == 4) ? static_cast<int>(rng() % n) : -1;

    auto shape = [&](double theta) {
      const double x = (theta + m.tau) / m.tau;  // 0 at -tau, 1 at 0
      Vec v(n);
      for (int i = 0; i < n; ++i) {
        switch (family) {
          case 0: v(i) = amp[i]; break;
          case 1: v(i) = amp[i] * std::pow(x, power[i]); break;
          case 2: v(i) = amp[i] * std::pow(1.0 - x, power[i]); break;
          case 3:
            v(i) = amp[i] * 0.5 * (1.0 + std::sin(freq[i] * theta + phase[i]));
            break;
          default: {
            const double u = x * 3.0;
            const int k = std::min(2, static_cast<int>(u));
            v(i) = rough[k](i) + (u - k) * (rough[k + 1](i) - rough[k](i));
            break;
          }
        }
        if (i == pin) v(i) = amp[i] * (1.0 - x);  // forces phi_i(0) = 0
      }
      return v;
    };
    HistorySegment phi = HistorySegment::sample(m.tau, nodes, shape);

    const Vec fv = m.f(phi);
    const Vec at0 = phi(0.0);
    for (int i = 0; i < n; ++i) {
      if (at0(i) > 1e-9 * M) {
        beta_req = std::max(beta_req, -fv(i) / at0(i));
      } else if (fv(i) < -tol * (1.0 + M)) {
        impossible = true;  // phi_i(0) ~ 0 with f_i strictly negative
        worst_pinned = std::min(worst_pinned, fv(i));
      }
    }
  }

  if (impossible || beta_req > beta_max) {
    rep.beta = beta_req;
    rep.worst = worst_pinned;  // the violation no margin can repair
    return rep;
  }
  rep.found = true;
  rep.beta = beta_req;
  rep.worst = 0.0;
  return rep;
}

}  // namespace wavefront
