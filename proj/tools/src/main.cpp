// distopt: validate, run, sweep, compare and export scenario files.

#include "distopt_cli/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

struct Args {
  std::string config;
  long iterations = -1;
  std::uint64_t seed = 0;
  std::string seeds;
  std::string out;
  long decimate = 0;
  bool force = false;
  int parallel = 1;
};

void add_common(CLI::App* cmd, Args& a) {
  cmd->add_option("--config,config", a.config, "Scenario JSON file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--iterations", a.iterations, "Override the iteration count")->check(CLI::NonNegativeNumber);
  auto* seed = cmd->add_option("--seed", a.seed, "Run a single seed");
  cmd->add_option("--seeds", a.seeds, "Inclusive seed range A..B")->excludes(seed);
  cmd->add_option("--out", a.out, "Output directory");
  cmd->add_option("--decimate", a.decimate, "Record every M-th iteration")->check(CLI::PositiveNumber);
  cmd->add_flag("--force", a.force, "Run even if validation fails");
  cmd->add_option("--parallel", a.parallel, "Concurrent runs for sweep")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  using namespace distopt::cli;
  CLI::App app{"Distributed optimization of convex sums of non-convex functions"};
  app.require_subcommand(1);
  app.footer(std::string("Outputs default to $") + kOutputRootEnv + "/<scenario> (fallback ./out).\n"
             "Exit codes: 0 pass, 1 verdict fail, 2 validation fail, 3 I/O or config error.");

  Args a;
  using Command = int (*)(const std::string&, const Overrides&, std::ostream&, std::ostream&);
  const std::vector<std::tuple<const char*, const char*, Command>> commands = {
      {"validate", "Check every modelling assumption for a scenario", cmd_validate},
      {"run", "Run one seed and write trace, oracle, verdict and plot data", cmd_run},
      {"sweep", "Run a seed range and aggregate the verdicts", cmd_sweep},
      {"compare", "Run the original and transformed problem side by side", cmd_compare},
      {"export", "Write the resolved (transformed) problem and schedule", cmd_export},
  };
  std::vector<CLI::App*> subs;
  for (const auto& [name, help, fn] : commands) {
    subs.push_back(app.add_subcommand(name, help));
    add_common(subs.back(), a);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitIoError;
  }

  Overrides ov;
  try {
    if (a.iterations >= 0) ov.iterations = a.iterations;
    for (auto* s : subs)
      if (s->parsed() && s->count("--seed")) ov.seed = a.seed;
    if (!a.seeds.empty()) ov.seeds = parse_seed_range(a.seeds);
    if (!a.out.empty()) ov.out = a.out;
    if (a.decimate > 0) ov.decimate = a.decimate;
  } catch (const distopt::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitIoError;
  }
  ov.force = a.force;
  ov.parallel = a.parallel;

  for (std::size_t i = 0; i < subs.size(); ++i)
    if (subs[i]->parsed()) return std::get<2>(commands[i])(a.config, ov, std::cout, std::cerr);
  return kExitIoError;
}
