#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "wavefront/model.hpp"
#include "wavefront/profile.hpp"
#include "wavefront/spectrum.hpp"

#include "count_fixtures.inc"

using namespace wavefront;

namespace {

DelayKernel random_kernel(std::mt19937_64& rng, int n, double tau) {
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::uniform_real_distribution<double> unif01(0.0, 1.0);
  DelayKernel k(n, tau);
  int n_atoms = 1 + static_cast<int>(rng() % 3);
  for (int a = 0; a < n_atoms; ++a) {
    Mat w(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) w(i, j) = unif(rng);
    k.add_atom(-tau * unif01(rng), w);
  }
  if (rng() % 2) {
    DensityPiece p;
    p.a = -tau * (0.5 + 0.5 * unif01(rng));
    p.b = p.a * unif01(rng);
    Mat c0(n, n), c1(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        c0(i, j) = unif(rng);
        c1(i, j) = unif(rng);
      }
    p.coeffs = {c0, c1};
    k.add_piece(p);
  }
  return k;
}

DelayKernel scalar_atom(double theta, double w, double tau) {
  return DelayKernel::atom(1, tau, theta, Mat::Constant(1, 1, w));
}

}  // namespace

TEST_CASE("characteristic determinant factors through the first-order form") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unif(-3.0, 3.0);
  std::uniform_real_distribution<double> eps_d(0.05, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    int n = 1 + static_cast<int>(rng() % 3);
    DelayKernel k = random_kernel(rng, n, 0.8);
    Vec d(n);
    for (int i = 0; i < n; ++i) d[i] = 0.3 + eps_d(rng);
    double eps = eps_d(rng);
    CharProblem p(k, eps, d);
    Complex s(unif(rng), unif(rng));
    Complex lhs = char_det(p, s);
    Complex rhs = std::pow(eps, 2 * n) * d.prod() * first_order_matrix(p, s).determinant();
    CAPTURE(trial);
    CHECK(std::abs(lhs - rhs) <= 1e-9 * (1.0 + std::abs(lhs)));
  }
}

TEST_CASE("wave kernel exponents satisfy the root identities") {
  Model fisher = make_fisher(1.0, 1.0, 1.0);
  CharProblem p0(fisher.linearization_at_zero());
  DominantRoot dom = dominant_real_root(p0);
  for (double c : {4.0, 6.0, 10.0, 15.0}) {
    WaveParams wp = wave_params(fisher, dom, c);
    double e2 = wp.eps * wp.eps;
    for (int i = 0; i < 1; ++i) {
      double d = wp.diffusion[i];
      CHECK(std::abs(wp.alpha[i] + wp.beta[i] - 1.0 / (d * e2)) <= 1e-12 / (d * e2));
      CHECK(std::abs(wp.alpha[i] * wp.beta[i] + 1.0 / (d * e2)) <= 1e-12 / (d * e2));
      CHECK(wp.pref[i] == doctest::Approx(1.0 / std::sqrt(1.0 + 4.0 * d * e2)).epsilon(1e-14));
      // The exponents are the two roots of d eps^2 z^2 - z - 1.
      for (double z : {wp.alpha[i], wp.beta[i]})
        CHECK(std::abs(d * e2 * z * z - z - 1.0) <= 1e-11 * (1.0 + z * z * e2 * d));
    }
  }

  // Unequal diffusion exercises the per-component form of the identities.
  Model uneven = make_chemostat(ChemostatParams{});
  uneven.diffusion << 0.5, 2.0;
  DominantRoot dom2 = dominant_real_root(CharProblem(uneven.linearization_at_zero()));
  WaveParams wp = wave_params(uneven, dom2, 8.0);
  double e2 = wp.eps * wp.eps;
  for (int i = 0; i < 2; ++i) {
    double d = wp.diffusion[i];
    CHECK(std::abs(wp.alpha[i] + wp.beta[i] - 1.0 / (d * e2)) <= 1e-12 / (d * e2));
    CHECK(std::abs(wp.alpha[i] * wp.beta[i] + 1.0 / (d * e2)) <= 1e-12 / (d * e2));
  }
}

TEST_CASE("argument-principle counts match the independent fixtures") {
  for (size_t i = 0; i < std::size(kCountFixtures); ++i) {
    const CountFixture& f = kCountFixtures[i];
    DelayKernel k(1, f.r > 0 ? f.r : 0.01);
    if (f.w0 != 0.0 || f.w1 == 0.0) k.add_atom(0.0, Mat::Constant(1, 1, f.w0));
    if (f.w1 != 0.0) k.add_atom(-f.r, Mat::Constant(1, 1, f.w1));
    CharProblem p(k, f.eps, Vec::Constant(1, f.d));
    RectCount rc = count_roots_rect(p, {f.re_lo, f.re_hi, f.im_lo, f.im_hi});
    CAPTURE(i);
    CHECK(rc.count == f.count);
    CHECK(rc.nudges == 0);
  }
}

TEST_CASE("rectangle counts resolve the root chain of a pure delay") {
  // z = e^{-z}: real root 0.56714..., first complex pair -1.534 +- 4.375 i.
  CharProblem p(scalar_atom(-1.0, 1.0, 1.0));
  CHECK(count_roots_rect(p, {0.0, 1.0, -1.0, 1.0}).count == 1);
  CHECK(count_roots_rect(p, {-2.0, 1.0, -5.0, 5.0}).count == 3);
  // Second pair W_2(1) = -2.402 +- 10.776 i joins inside the larger box.
  CHECK(count_roots_rect(p, {-3.0, 1.0, -12.0, 12.0}).count == 5);

  // z = -e^{-z} has no roots with Re z >= -0.2.
  CharProblem neg(scalar_atom(-1.0, -1.0, 1.0));
  CHECK(count_roots_rect(neg, {-0.2, 2.0, -2.0, 2.0}).count == 0);
}

TEST_CASE("dominant root of the pure delay equation") {
  CharProblem p(scalar_atom(-1.0, 1.0, 1.0));
  DominantRoot dom = dominant_real_root(p);
  CHECK(dom.lambda0 == doctest::Approx(0.567143290409784).epsilon(1e-12));
  CHECK(dom.simple);
  CHECK(dom.dominant);
  REQUIRE(dom.v.size() == 1);
  CHECK(dom.v[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(!dom.certificates.empty());
}

TEST_CASE("dominant root fails honestly when no real root exists") {
  // u' = -u(t-1): the rightmost roots are a complex pair.
  CharProblem p(scalar_atom(-1.0, -1.0, 1.0));
  CHECK_THROWS_AS(dominant_real_root(p), HypothesisError);
}

TEST_CASE("model linearizations have the expected dominant roots") {
  Model fisher = make_fisher(1.0, 1.0, 1.0);
  DominantRoot f = dominant_real_root(CharProblem(fisher.linearization_at_zero()));
  // The zero linearization has no delayed mass and slope b.
  CHECK(f.lambda0 == doctest::Approx(1.0).epsilon(1e-12));

  Model chemo = make_chemostat(ChemostatParams{});
  DominantRoot ch = dominant_real_root(CharProblem(chemo.linearization_at_zero()));
  CHECK(ch.lambda0 == doctest::Approx(0.485838753365693).epsilon(1e-10));
  CHECK(ch.simple);
  CHECK(ch.dominant);
  CHECK(ch.v.minCoeff() > 0.0);
  // Eigenvector direction: (g0 / (D + lambda0), 1) normalized by max norm.
  double g0 = 2.0;  // uptake at S0 = 1
  Vec want(2);
  want << g0 / (1.0 + ch.lambda0), 1.0;
  want /= max_norm(want);
  CHECK((ch.v - want).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("root continuation reproduces the quadratic closed form") {
  Model fisher = make_fisher(1.0, 1.0, 1.0);
  DelayKernel L0 = fisher.linearization_at_zero();
  struct Row {
    double c, lambda;
  };
  // (1 - sqrt(1 - 4 eps^2)) / (2 eps^2) at eps = 1/c.
  const Row rows[] = {
      {4.0, 1.0717967697244908},
      {6.0, 1.0294372515228594},
      {10.0, 1.010205144336438},
      {15.0, 1.0044843951112086},
  };
  for (const Row& r : rows) {
    Continuation cont = root_continuation(L0, Vec::Ones(1), 1.0 / r.c, 1.0);
    CAPTURE(r.c);
    CHECK(cont.lambda == doctest::Approx(r.lambda).epsilon(1e-12));
    CHECK(cont.unique_in_strip);
    CHECK(cont.v.size() == 1);
  }
  // The second quadratic root lies far outside the certified strip.
  Continuation c10 = root_continuation(L0, Vec::Ones(1), 0.1, 1.0);
  CHECK(c10.strip.re_hi < 98.0);
}

TEST_CASE("chemostat continuation reaches the wave decay rate at c = 15") {
  Model chemo = make_chemostat(ChemostatParams{});
  DelayKernel L0 = chemo.linearization_at_zero();
  DominantRoot dom = dominant_real_root(CharProblem(L0));
  Continuation cont = root_continuation(L0, chemo.diffusion, 1.0 / 15.0, dom.lambda0);
  CHECK(cont.lambda == doctest::Approx(0.48665020611338074).epsilon(1e-10));
  CHECK(cont.unique_in_strip);
  CHECK(cont.v.minCoeff() > 0.0);
}

TEST_CASE("characteristic matrices agree between real and complex paths") {
  Model chemo = make_chemostat(ChemostatParams{});
  CharProblem p(chemo.linearization_at_zero(), 0.2, chemo.diffusion);
  for (double z : {-1.0, 0.0, 0.486, 2.0}) {
    Mat re = char_matrix_real(p, z);
    CMat cx = char_matrix(p, Complex(z, 0.0));
    CHECK((re.cast<Complex>() - cx).cwiseAbs().maxCoeff() <= 1e-13);
  }
}
