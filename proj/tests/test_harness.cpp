#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <string>

#include "json.hpp"
#include "wavefront/harness.hpp"

using namespace wavefront;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  fs::path p = fs::path("harness_tmp") / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path write_config(const fs::path& dir, const std::string& name,
                      const std::string& text) {
  fs::path p = dir / name;
  std::ofstream(p) << text;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

nlohmann::json report(const fs::path& out_dir, const std::string& command) {
  return nlohmann::json::parse(slurp(out_dir / (command + ".json")));
}

const std::string kFisherConfig = R"({
  "model": {"name": "fisher", "builtin": {"name": "fisher_kpp_delay", "b": 1.0, "tau": 0.1, "K": 1.0}},
  "speeds": [4.0, 6.0]
})";

}  // namespace

TEST_CASE("spectrum command succeeds and reports the dominant root") {
  fs::path dir = fresh_dir("spectrum");
  fs::path cfg = write_config(dir, "fisher.json", kFisherConfig);

  CliArgs args;
  args.command = "spectrum";
  args.config = cfg.string();
  args.out_dir = (dir / "out").string();
  CHECK(run_command(args) == 0);

  nlohmann::json rep = report(dir / "out", "spectrum");
  CHECK(rep.at("exit_code").get<int>() == 0);
  CHECK(rep.at("margin").at("found").get<bool>());
  // The zero state of this model feeds back without delay, so the growth
  // rate is b itself and the per-speed exponents solve the quadratic
  // z^2/c^2 - z + 1 = 0 exactly.
  CHECK(rep.at("dominant_root").at("lambda0").get<double>() ==
        doctest::Approx(1.0).epsilon(1e-9));
  CHECK(rep.at("dominant_root").at("simple").get<bool>());
  CHECK(rep.at("dominant_root").at("dominant").get<bool>());
  const auto& speeds = rep.at("speeds");
  REQUIRE(speeds.size() == 2);
  CHECK(speeds[0].at("lambda").get<double>() ==
        doctest::Approx(1.0717967697244908).epsilon(1e-10));
  CHECK(speeds[1].at("lambda").get<double>() ==
        doctest::Approx(1.0294372515228594).epsilon(1e-10));
  CHECK(speeds[0].at("unique_in_strip").get<bool>());
  CHECK(speeds[1].at("unique_in_strip").get<bool>());
}

TEST_CASE("reports are byte-identical across reruns") {
  fs::path dir = fresh_dir("determinism");
  fs::path cfg = write_config(dir, "fisher.json", kFisherConfig);

  auto run_into = [&](const std::string& sub) {
    CliArgs args;
    args.command = "heteroclinic";
    args.config = cfg.string();
    args.out_dir = (dir / sub).string();
    args.seed = 11;
    REQUIRE(run_command(args) == 0);
  };
  run_into("a");
  run_into("b");
  CHECK(slurp(dir / "a" / "heteroclinic.json") == slurp(dir / "b" / "heteroclinic.json"));
  CHECK(slurp(dir / "a" / "heteroclinic.csv") == slurp(dir / "b" / "heteroclinic.csv"));
}

TEST_CASE("configuration problems exit with code 4") {
  fs::path dir = fresh_dir("config_errors");

  CliArgs args;
  args.command = "spectrum";
  args.out_dir = (dir / "out").string();

  args.config = write_config(dir, "unknown_key.json", R"({
    "model": {"name": "m", "builtin": {"name": "fisher_kpp_delay", "b": 1.0, "tau": 0.1, "K": 1.0}},
    "wavelength": 3
  })").string();
  CHECK(run_command(args) == 4);
  nlohmann::json rep = report(dir / "out", "spectrum");
  CHECK(rep.at("exit_code").get<int>() == 4);
  CHECK(!rep.at("error").get<std::string>().empty());

  args.config = write_config(dir, "broken.json", "{ this is not json").string();
  CHECK(run_command(args) == 4);

  args.config = (dir / "no_such_file.json").string();
  CHECK(run_command(args) == 4);

  args.config = write_config(dir, "ok.json", kFisherConfig).string();
  args.command = "frobnicate";
  CHECK(run_command(args) == 4);
}

TEST_CASE("washout chemostat trips the hypothesis gate with code 2") {
  fs::path dir = fresh_dir("hypothesis");
  // m below D e^{D tau}: the microbe washes out, there is no positive
  // growth rate at the trivial state.
  fs::path cfg = write_config(dir, "washout.json", R"({
    "model": {"name": "washout", "builtin": {"name": "chemostat", "D": 1.0, "tau": 0.2, "m": 1.2, "a": 1.0, "S0": 1.0}},
    "speeds": [15.0]
  })");

  CliArgs args;
  args.command = "spectrum";
  args.config = cfg.string();
  args.out_dir = (dir / "out").string();
  CHECK(run_command(args) == 2);
  nlohmann::json rep = report(dir / "out", "spectrum");
  CHECK(rep.at("exit_code").get<int>() == 2);
  CHECK(!rep.at("error").get<std::string>().empty());
}

TEST_CASE("subcritical speed fails the profile solve with code 3") {
  fs::path dir = fresh_dir("subcritical");
  fs::path cfg = write_config(dir, "fisher.json", kFisherConfig);

  CliArgs args;
  args.command = "profile";
  args.config = cfg.string();
  args.out_dir = (dir / "out").string();
  args.speeds = {1.0};  // below the critical speed 2 for this model
  CHECK(run_command(args) == 3);
  // The speed is rejected already at the spectral stage: the wave
  // exponent's defining quadratic has no real root there.
  nlohmann::json rep = report(dir / "out", "profile");
  CHECK(rep.at("exit_code").get<int>() == 3);
  CHECK(!rep.at("error").get<std::string>().empty());
}

TEST_CASE("speeds override replaces the configured list") {
  fs::path dir = fresh_dir("override");
  fs::path cfg = write_config(dir, "fisher.json", kFisherConfig);

  CliArgs args;
  args.command = "profile";
  args.config = cfg.string();
  args.out_dir = (dir / "out").string();
  args.speeds = {5.0};
  CHECK(run_command(args) == 0);
  nlohmann::json rep = report(dir / "out", "profile");
  const auto& jobs = rep.at("profiles");
  REQUIRE(jobs.size() == 1);
  CHECK(jobs[0].at("c").get<double>() == 5.0);
  CHECK(jobs[0].at("ok").get<bool>());
  CHECK(jobs[0].at("converged").get<bool>());
  CHECK(jobs[0].at("front").at("ok").get<bool>());
  CHECK(fs::exists(dir / "out" / "profile_c5.csv"));
}

TEST_CASE("validate command closes the loop on a coarse short run") {
  fs::path dir = fresh_dir("validate");
  fs::path cfg = write_config(dir, "fisher.json", R"({
    "model": {"name": "fisher", "builtin": {"name": "fisher_kpp_delay", "b": 1.0, "tau": 0.1, "K": 1.0}},
    "speeds": [6.0],
    "pde": {"X": 90.0, "dx": 0.1, "t_end": 1.0, "x0": 60.0}
  })");

  CliArgs args;
  args.command = "validate";
  args.config = cfg.string();
  args.out_dir = (dir / "out").string();
  CHECK(run_command(args) == 0);
  nlohmann::json rep = report(dir / "out", "validate");
  CHECK(rep.at("exit_code").get<int>() == 0);
  const auto& val = rep.at("validation");
  CHECK(val.at("ok").get<bool>());
  CHECK(val.at("rel_l2").get<double>() <= 0.01);
  CHECK(std::abs(val.at("speed_measured").get<double>() - 6.0) <= 0.05 * 6.0);
  CHECK(val.at("ok_positive").get<bool>());
  CHECK(fs::exists(dir / "out" / "snapshots.csv"));
  CHECK(fs::exists(dir / "out" / "front.csv"));
}

TEST_CASE("verify command reports every check ok on a healthy model") {
  fs::path dir = fresh_dir("verify");
  fs::path cfg = write_config(dir, "fisher.json", R"({
    "model": {"name": "fisher", "builtin": {"name": "fisher_kpp_delay", "b": 1.0, "tau": 0.1, "K": 1.0}},
    "speeds": [5.0]
  })");

  CliArgs args;
  args.command = "verify";
  args.config = cfg.string();
  args.out_dir = (dir / "out").string();
  CHECK(run_command(args) == 0);
  nlohmann::json rep = report(dir / "out", "verify");
  CHECK(rep.at("exit_code").get<int>() == 0);
  CHECK(rep.at("ok").get<bool>());
  const auto& checks = rep.at("checks");
  CHECK(checks.size() >= 5);
  for (const auto& ck : checks) CHECK(ck.at("ok").get<bool>());
}
