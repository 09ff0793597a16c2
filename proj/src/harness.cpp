#include "wavefront/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <future>
#include <string>
#include <tuple>
#include <vector>

#include "wavefront/io.hpp"
#include "wavefront/model_json.hpp"

namespace wavefront {

namespace {

double getd(const nlohmann::json& j, const char* key, double dflt) {
  return j.contains(key) ? j.at(key).get<double>() : dflt;
}

int geti(const nlohmann::json& j, const char* key, int dflt) {
  return j.contains(key) ? j.at(key).get<int>() : dflt;
}

nlohmann::ordered_json vec_json(const Vec& v) {
  nlohmann::ordered_json a = nlohmann::ordered_json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

struct PdeBlock {
  double X = 120.0, dx = 0.05, t_end = 5.0, dt = 0.0;
  double x0 = -1.0;  // <0: 2X/3
  double speed_tol = 0.05, l2_tol = 0.01;
};

struct Run {
  Model model;
  std::vector<double> speeds;
  ProfileOptions popt;
  HeteroOptions hopt;
  PdeBlock pde;
  double margin_M_rel = 2.0;
  int margin_samples = 1000;
  double fit_lo_rel = 3e-4, fit_hi_rel = 5e-2;
};

Run load_run(const CliArgs& a) {
  const nlohmann::json j = load_json(a.config);
  reject_unknown_keys(j, {"model", "speeds", "profile", "hetero", "pde", "margin"},
                      "run config");
  if (!j.contains("model")) throw ConfigError("run config needs a model");
  Run r;
  r.model = parse_model(j.at("model"));
  if (j.contains("speeds")) {
    if (!j.at("speeds").is_array()) throw ConfigError("speeds must be an array");
    for (const auto& v : j.at("speeds")) r.speeds.push_back(v.get<double>());
  }
  if (!a.speeds.empty()) r.speeds = a.speeds;
  if (r.speeds.empty()) r.speeds = {6.0};
  for (double c : r.speeds)
    if (!(c > 0.0)) throw ConfigError("speeds must be positive");

  if (j.contains("profile")) {
    const auto& b = j.at("profile");
    reject_unknown_keys(b, {"h", "tol_fix", "k_max", "tail_lo_rel", "right_tol", "max_extend"},
                        "profile block");
    r.popt.h = getd(b, "h", r.popt.h);
    r.popt.tol_fix = getd(b, "tol_fix", r.popt.tol_fix);
    r.popt.k_max = geti(b, "k_max", r.popt.k_max);
    r.popt.tail_lo_rel = getd(b, "tail_lo_rel", r.popt.tail_lo_rel);
    r.popt.right_tol = getd(b, "right_tol", r.popt.right_tol);
    r.popt.max_extend = geti(b, "max_extend", r.popt.max_extend);
  }
  if (j.contains("hetero")) {
    const auto& b = j.at("hetero");
    reject_unknown_keys(b,
                        {"h", "tol_K", "seed_amp_rel", "window_tau", "t_max_factor",
                         "box_factor", "fit_lo_rel", "fit_hi_rel"},
                        "hetero block");
    r.hopt.h = getd(b, "h", r.hopt.h);
    r.hopt.tol_K = getd(b, "tol_K", r.hopt.tol_K);
    r.hopt.seed_amp_rel = getd(b, "seed_amp_rel", r.hopt.seed_amp_rel);
    r.hopt.window_tau = getd(b, "window_tau", r.hopt.window_tau);
    r.hopt.t_max_factor = getd(b, "t_max_factor", r.hopt.t_max_factor);
    r.hopt.box_factor = getd(b, "box_factor", r.hopt.box_factor);
    r.fit_lo_rel = getd(b, "fit_lo_rel", r.fit_lo_rel);
    r.fit_hi_rel = getd(b, "fit_hi_rel", r.fit_hi_rel);
  }
  if (j.contains("pde")) {
    const auto& b = j.at("pde");
    reject_unknown_keys(b, {"X", "dx", "t_end", "dt", "x0", "speed_tol", "l2_tol"},
                        "pde block");
    r.pde.X = getd(b, "X", r.pde.X);
    r.pde.dx = getd(b, "dx", r.pde.dx);
    r.pde.t_end = getd(b, "t_end", r.pde.t_end);
    r.pde.dt = getd(b, "dt", r.pde.dt);
    r.pde.x0 = getd(b, "x0", r.pde.x0);
    r.pde.speed_tol = getd(b, "speed_tol", r.pde.speed_tol);
    r.pde.l2_tol = getd(b, "l2_tol", r.pde.l2_tol);
  }
  if (j.contains("margin")) {
    const auto& b = j.at("margin");
    reject_unknown_keys(b, {"M_rel", "samples"}, "margin block");
    r.margin_M_rel = getd(b, "M_rel", r.margin_M_rel);
    r.margin_samples = geti(b, "samples", r.margin_samples);
  }
  return r;
}

struct SpectrumOut {
  DominantRoot dom;
  std::vector<Continuation> conts;
  double op_norm = 0.0;
};

SpectrumOut spectrum_stage(const Run& r, std::uint64_t seed, nlohmann::ordered_json& rep) {
  SpectrumOut s;
  const DelayKernel L0 = r.model.linearization_at_zero();
  s.op_norm = L0.op_norm();
  rep["model"] = {{"name", r.model.name},
                  {"n", r.model.n},
                  {"tau", r.model.tau},
                  {"op_norm", s.op_norm}};
  if (r.model.has_equilibrium) {
    const H1Report h1 = check_h1(r.model);
    rep["equilibrium"] = {{"ok", h1.ok},
                          {"K", vec_json(r.model.K)},
                          {"res0", h1.res0},
                          {"resK", h1.resK},
                          {"detail", h1.detail}};
    if (!h1.ok) throw HypothesisError("equilibrium check failed: " + h1.detail);
    const MarginReport mr = positivity_margin(
        r.model, r.margin_M_rel * max_norm(r.model.K), r.margin_samples, 1e6, seed);
    rep["margin"] = {{"found", mr.found},
                     {"beta", mr.beta},
                     {"worst", mr.worst},
                     {"samples", mr.samples}};
    if (!mr.found)
      throw HypothesisError("no quasipositivity margin found over sampled segments");
  }
  s.dom = dominant_real_root(CharProblem(L0));
  rep["dominant_root"] = {{"lambda0", s.dom.lambda0},
                          {"simple", s.dom.simple},
                          {"dominant", s.dom.dominant},
                          {"det_slope", s.dom.det_slope},
                          {"v", vec_json(s.dom.v)}};
  rep["speeds"] = nlohmann::ordered_json::array();
  for (double c : r.speeds) {
    const Continuation ct =
        root_continuation(L0, r.model.diffusion, 1.0 / c, s.dom.lambda0);
    rep["speeds"].push_back({{"c", c},
                             {"eps", 1.0 / c},
                             {"lambda", ct.lambda},
                             {"unique_in_strip", ct.unique_in_strip},
                             {"v", vec_json(ct.v)}});
    s.conts.push_back(ct);
  }
  return s;
}

struct HeteroOut {
  HeteroResult het;
  DecayFit fit;
};

HeteroOut hetero_stage(const Run& r, const DominantRoot& dom, nlohmann::ordered_json& rep) {
  HeteroOut h;
  h.het = compute_heteroclinic(r.model, dom, r.hopt);
  const PositivityReport pos = check_positive(h.het.traj);
  if (!pos.positive)
    throw HypothesisError("connecting orbit lost positivity at t = " +
                          std::to_string(pos.t_violation));
  const double knorm = max_norm(r.model.K);
  const auto [wa, wb] =
      decay_window(h.het.traj, r.fit_lo_rel * knorm, r.fit_hi_rel * knorm);
  h.fit = fit_decay(h.het.traj, wa, wb);
  rep["heteroclinic"] = {
      {"lambda0", h.het.lambda0},
      {"t_converged", h.het.t_converged},
      {"seed_amp", h.het.c0},
      {"positive", true},
      {"decay",
       {{"lambda_fit", h.fit.lambda},
        {"rel_err", std::abs(h.fit.lambda - dom.lambda0) / dom.lambda0},
        {"remainder_slope", h.fit.remainder_slope},
        {"remainder_at_floor", h.fit.remainder_at_floor},
        {"nodes", h.fit.nodes},
        {"rms", h.fit.rms}}}};
  return h;
}

struct ProfileJob {
  double c = 0.0;
  int code = 0;  // 0 ok, 2 hypothesis, 3 convergence
  std::string error;
  WaveParams wp;
  ProfileResult res;
  FrontReport front;
};

std::vector<ProfileJob> profile_stage(const Run& r, const DominantRoot& dom,
                                      const HeteroResult& het) {
  const int n = static_cast<int>(r.speeds.size());
  std::vector<ProfileJob> jobs(n);
  int workers = 1;
  if (const char* env = std::getenv("WAVEFRONT_WORKERS"))
    workers = std::max(1, std::atoi(env));
  workers = std::min(workers, n);

  std::atomic<int> next{0};
  auto work = [&]() {
    for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      ProfileJob& jb = jobs[i];
      jb.c = r.speeds[i];
      try {
        jb.wp = wave_params(r.model, dom, jb.c);
        jb.res = solve_profile(r.model, jb.wp, het, r.popt);
        jb.front = verify_front(r.model, jb.wp, jb.res);
        if (!jb.front.positive) {
          jb.code = 2;
          jb.error = "front profile lost positivity";
        } else if (!jb.front.ok()) {
          jb.code = 3;
          jb.error = "front verification tolerances not met";
        }
      } catch (const HypothesisError& e) {
        jb.code = 2;
        jb.error = e.what();
      } catch (const ConvergenceError& e) {
        jb.code = 3;
        jb.error = e.what();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::future<void>> fs;
    for (int w = 0; w < workers; ++w) fs.push_back(std::async(std::launch::async, work));
    for (auto& f : fs) f.get();
  }
  return jobs;
}

std::string profile_csv_name(double c) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "profile_c%g.csv", c);
  return buf;
}

nlohmann::ordered_json front_json(const FrontReport& f) {
  return {{"positive", f.positive},
          {"monotone_left", f.monotone_left},
          {"lambda_eps", f.lambda_eps},
          {"lambda_fit", f.lambda_fit},
          {"v1_angle_deg", f.v1_angle_deg},
          {"slope_ratio_err", f.slope_ratio_err},
          {"residual_sup", f.residual_sup},
          {"ok", f.ok()}};
}

nlohmann::ordered_json job_json(const ProfileJob& jb, const std::string& csv) {
  nlohmann::ordered_json pj = {{"c", jb.c}, {"ok", jb.code == 0}};
  if (jb.code != 0) pj["error"] = jb.error;
  if (jb.res.iterations > 0) {
    pj["converged"] = jb.res.converged;
    pj["iterations"] = jb.res.iterations;
    pj["extensions"] = jb.res.extensions;
    if (!jb.res.deltas.empty()) pj["final_delta"] = jb.res.deltas.back();
    nlohmann::ordered_json tail = nlohmann::ordered_json::array();
    const size_t nr = jb.res.ratios.size();
    for (size_t k = nr > 5 ? nr - 5 : 0; k < nr; ++k) tail.push_back(jb.res.ratios[k]);
    pj["contraction_tail"] = tail;
    pj["front"] = front_json(jb.front);
  }
  if (!csv.empty()) pj["file"] = csv;
  return pj;
}

int worse(int a, int b) {
  if (a == 2 || b == 2) return 2;
  if (a == 3 || b == 3) return 3;
  return std::max(a, b);
}

int write_profile_outputs(const std::vector<ProfileJob>& jobs, const std::string& out_dir,
                          nlohmann::ordered_json& rep) {
  int code = 0;
  rep["profiles"] = nlohmann::ordered_json::array();
  for (const ProfileJob& jb : jobs) {
    std::string csv;
    if (jb.res.converged) {
      csv = profile_csv_name(jb.c);
      write_profile_csv(out_dir + "/" + csv, jb.res.profile);
    }
    rep["profiles"].push_back(job_json(jb, csv));
    std::printf("  c = %-8g %s%s%s\n", jb.c, jb.code == 0 ? "ok" : "FAILED",
                jb.code == 0 ? "" : ": ", jb.code == 0 ? "" : jb.error.c_str());
    code = worse(code, jb.code);
  }
  return code;
}

int cmd_spectrum(const Run& r, const CliArgs& a, nlohmann::ordered_json& rep) {
  const SpectrumOut s = spectrum_stage(r, a.seed, rep);
  std::printf("dominant root lambda0 = %.12g (simple, dominant)\n", s.dom.lambda0);
  for (const Continuation& ct : s.conts)
    std::printf("  c = %-8g lambda = %.12g unique-in-strip = %s\n", 1.0 / ct.eps,
                ct.lambda, ct.unique_in_strip ? "yes" : "no");
  return 0;
}

int cmd_heteroclinic(const Run& r, const CliArgs& a, nlohmann::ordered_json& rep) {
  const SpectrumOut s = spectrum_stage(r, a.seed, rep);
  const HeteroOut h = hetero_stage(r, s.dom, rep);
  write_trajectory_csv(a.out_dir + "/heteroclinic.csv", h.het.traj);
  rep["heteroclinic"]["file"] = "heteroclinic.csv";
  std::printf("connecting orbit settled by t = %.6g; decay rate %.12g (target %.12g)\n",
              h.het.t_converged, h.fit.lambda, s.dom.lambda0);
  return 0;
}

int cmd_profile(const Run& r, const CliArgs& a, nlohmann::ordered_json& rep) {
  const SpectrumOut s = spectrum_stage(r, a.seed, rep);
  const HeteroOut h = hetero_stage(r, s.dom, rep);
  std::printf("front profiles:\n");
  const auto jobs = profile_stage(r, s.dom, h.het);
  return write_profile_outputs(jobs, a.out_dir, rep);
}

int cmd_validate(const Run& rr, const CliArgs& a, nlohmann::ordered_json& rep) {
  Run r = rr;
  r.speeds = {rr.speeds.front()};
  const double c = r.speeds[0];
  const SpectrumOut s = spectrum_stage(r, a.seed, rep);
  const HeteroOut h = hetero_stage(r, s.dom, rep);
  const auto jobs = profile_stage(r, s.dom, h.het);
  const ProfileJob& jb = jobs[0];
  if (jb.code == 2) throw HypothesisError(jb.error);
  if (jb.code != 0) throw ConvergenceError(jb.error);
  rep["profile"] = job_json(jb, "");
  const WaveProfile psi = jb.res.profile;
  write_profile_csv(a.out_dir + "/" + profile_csv_name(c), psi);

  const PdeBlock& pb = r.pde;
  const double x0 = pb.x0 > 0.0 ? pb.x0 : 2.0 * pb.X / 3.0;
  PdeOptions po;
  po.X = pb.X;
  po.dx = pb.dx;
  po.t_end = pb.t_end;
  po.dt = pb.dt;
  po.init = [&psi, x0, c](double theta, double x) {
    return psi.eval((x - x0) / c + theta);
  };
  po.snapshot_times = {0.5 * pb.t_end};
  po.front_level = 0.5 * r.model.K[0];
  const PdeResult sim = simulate(r.model, po);
  const TranslationFit tf =
      translation_error(sim, sim.snapshots.size() - 1, psi, c, x0);
  const SpeedFit sf = front_speed(sim.front_t, sim.front_x);
  const double measured = -sf.speed;  // the front moves leftward

  double min_val = 0.0;
  for (double v : sim.snapshots.back().u) min_val = std::min(min_val, v);
  const double knorm = max_norm(r.model.K);
  const bool ok_l2 = tf.rel_l2 <= pb.l2_tol;
  const bool ok_speed = std::abs(measured - c) <= pb.speed_tol * c;
  const bool ok_pos = min_val >= -1e-8 * knorm;

  write_snapshots_csv(a.out_dir + "/snapshots.csv", sim);
  write_front_csv(a.out_dir + "/front.csv", sim);
  rep["pde"] = {{"X", pb.X},        {"dx", pb.dx},
                {"dt", sim.dt},     {"t_end", pb.t_end},
                {"x0", x0},         {"snapshots", "snapshots.csv"},
                {"front", "front.csv"}};
  rep["validation"] = {{"rel_l2", tf.rel_l2},
                       {"shift", tf.shift},
                       {"speed_measured", measured},
                       {"speed_expected", c},
                       {"speed_r2", sf.r2},
                       {"min_value", min_val},
                       {"ok_l2", ok_l2},
                       {"ok_speed", ok_speed},
                       {"ok_positive", ok_pos},
                       {"ok", ok_l2 && ok_speed && ok_pos}};
  std::printf("pde cross-check at c = %g: rel L2 = %.3g (tol %g), speed = %.6g (expected %g)\n",
              c, tf.rel_l2, pb.l2_tol, measured, c);
  return ok_l2 && ok_speed && ok_pos ? 0 : 3;
}

int cmd_verify(const Run& r, const CliArgs& a, nlohmann::ordered_json& rep) {
  std::vector<std::tuple<std::string, bool, std::string>> checks;
  int code = 0;
  auto note = [&](const std::string& name, bool ok, const std::string& detail, int sev) {
    checks.push_back({name, ok, detail});
    if (!ok) code = worse(code, sev);
    std::printf("  [%s] %-24s %s\n", ok ? " ok " : "FAIL", name.c_str(), detail.c_str());
  };

  bool have_dom = false;
  SpectrumOut s;
  try {
    s = spectrum_stage(r, a.seed, rep);
    have_dom = true;
    note("equilibrium", true, "", 2);
    note("positivity-margin", true, "", 2);
    char buf[128];
    std::snprintf(buf, sizeof buf, "lambda0 = %.10g", s.dom.lambda0);
    note("dominant-root", true, buf, 2);
    bool all_unique = true;
    for (const auto& ct : s.conts) all_unique = all_unique && ct.unique_in_strip;
    note("root-continuation", all_unique, "", 3);
  } catch (const HypothesisError& e) {
    note("hypotheses", false, e.what(), 2);
  } catch (const ConvergenceError& e) {
    note("hypotheses", false, e.what(), 3);
  }

  if (have_dom) {
    try {
      const HeteroOut h = hetero_stage(r, s.dom, rep);
      note("orbit-positive", true, "", 2);
      const double rel = std::abs(h.fit.lambda - s.dom.lambda0) / s.dom.lambda0;
      char buf[128];
      std::snprintf(buf, sizeof buf, "rate rel err %.2e", rel);
      note("orbit-decay-rate", rel <= 0.02, buf, 3);

      const auto jobs = profile_stage(r, s.dom, h.het);
      for (const ProfileJob& jb : jobs) {
        char name[64];
        std::snprintf(name, sizeof name, "front-c%g", jb.c);
        note(name, jb.code == 0, jb.error, jb.code == 0 ? 3 : jb.code);
      }
      rep["profiles"] = nlohmann::ordered_json::array();
      for (const ProfileJob& jb : jobs) rep["profiles"].push_back(job_json(jb, ""));
    } catch (const HypothesisError& e) {
      note("connecting-orbit", false, e.what(), 2);
    } catch (const ConvergenceError& e) {
      note("connecting-orbit", false, e.what(), 3);
    }
  }

  rep["checks"] = nlohmann::ordered_json::array();
  for (const auto& [name, ok, detail] : checks)
    rep["checks"].push_back({{"name", name}, {"ok", ok}, {"detail", detail}});
  rep["ok"] = code == 0;
  std::printf("verify: %s\n", code == 0 ? "PASS" : "FAIL");
  return code;
}

}  // namespace

int run_command(const CliArgs& args) {
  nlohmann::ordered_json rep;
  int code = 0;
  std::string err;
  try {
    std::filesystem::create_directories(args.out_dir);
    const Run r = load_run(args);
    if (args.command == "spectrum")
      code = cmd_spectrum(r, args, rep);
    else if (args.command == "heteroclinic")
      code = cmd_heteroclinic(r, args, rep);
    else if (args.command == "profile")
      code = cmd_profile(r, args, rep);
    else if (args.command == "validate")
      code = cmd_validate(r, args, rep);
    else if (args.command == "verify")
      code = cmd_verify(r, args, rep);
    else
      throw ConfigError("unknown command: " + args.command);
  } catch (const ConfigError& e) {
    err = e.what();
    code = 4;
  } catch (const nlohmann::json::exception& e) {
    err = e.what();
    code = 4;
  } catch (const HypothesisError& e) {
    err = e.what();
    code = 2;
  } catch (const ConvergenceError& e) {
    err = e.what();
    code = 3;
  }
  if (code != 0 && !err.empty()) {
    rep["error"] = err;
    std::fprintf(stderr, "error: %s\n", err.c_str());
  }
  try {
    rep["exit_code"] = code;
    write_json(args.out_dir + "/" + args.command + ".json", rep);
  } catch (const std::exception&) {
    if (code == 0) code = 4;
  }
  return code;
}

}  // namespace wavefront
