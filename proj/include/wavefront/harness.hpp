#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace wavefront {

/// Parsed command line of the wavefront tool.
struct CliArgs {
  std::string command;  // spectrum | heteroclinic | profile | validate | verify
  std::string config;
  std::string out_dir = "out";
  std::vector<double> speeds;  // overrides the config's speed list when set
  std::uint64_t seed = 1;      // margin sampler seed
};

/// Executes one subcommand end to end: loads the configuration, runs the
/// pipeline stages it needs, writes CSV/JSON outputs into out_dir, prints
/// a short summary, and returns the process exit code:
///   0 success, 2 hypothesis violation, 3 failed convergence or failed
///   validation tolerance, 4 configuration error.
int run_command(const CliArgs& args);

}  // namespace wavefront
