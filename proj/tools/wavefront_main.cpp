#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wavefront/harness.hpp"

namespace {

bool parse_speeds(const std::string& csv, std::vector<double>& out) {
  size_t pos = 0;
  while (pos < csv.size()) {
    size_t next = csv.find(',', pos);
    if (next == std::string::npos) next = csv.size();
    try {
      size_t used = 0;
      const std::string tok = csv.substr(pos, next - pos);
      const double v = std::stod(tok, &used);
      if (used != tok.size()) return false;
      out.push_back(v);
    } catch (const std::exception&) {
      return false;
    }
    pos = next + 1;
  }
  return !out.empty();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"travelling wave fronts for delayed reaction-diffusion systems"};
  app.require_subcommand(1);

  wavefront::CliArgs args;
  std::string speeds_csv;
  const std::pair<const char*, const char*> kCommands[] = {
      {"spectrum", "characteristic roots and hypothesis checks"},
      {"heteroclinic", "positive connecting orbit of the diffusion-free system"},
      {"profile", "front profiles at the requested speeds"},
      {"validate", "cross-check one front against a direct simulation"},
      {"verify", "run every certificate and report pass/fail"},
  };
  for (const auto& [name, desc] : kCommands) {
    CLI::App* sub = app.add_subcommand(name, desc);
    sub->add_option("--config", args.config, "run configuration (json)")->required();
    sub->add_option("--out", args.out_dir, "output directory (default: out)");
    sub->add_option("--speeds", speeds_csv, "comma-separated wave speeds, overrides config");
    sub->add_option("--seed", args.seed, "sampling seed for the margin search");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 4;
  }

  args.command = app.get_subcommands()[0]->get_name();
  if (!speeds_csv.empty() && !parse_speeds(speeds_csv, args.speeds)) {
    std::fprintf(stderr, "error: cannot parse --speeds '%s'\n", speeds_csv.c_str());
    return 4;
  }
  return wavefront::run_command(args);
}
