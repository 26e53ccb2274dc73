#pragma once

#include "distopt_cli/scenario.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace distopt::cli {

enum ExitCode : int { kExitOk = 0, kExitVerdictFail = 1, kExitValidationFail = 2, kExitIoError = 3 };

/// Environment variable naming the default output root (fallback "out").
inline constexpr const char* kOutputRootEnv = "DISTOPT_OUT_ROOT";

struct Overrides {
  std::optional<long> iterations;
  std::optional<std::uint64_t> seed;
  std::optional<std::pair<std::uint64_t, std::uint64_t>> seeds;
  std::optional<std::string> out;
  std::optional<long> decimate;
  bool force = false;
  int parallel = 1;
};

/// Parses "A..B" (inclusive). Throws ConfigError.
std::pair<std::uint64_t, std::uint64_t> parse_seed_range(const std::string& s);

void apply_overrides(ScenarioConfig& sc, const Overrides& ov);
std::filesystem::path output_dir(const ScenarioConfig& sc, const Overrides& ov);

struct Check {
  std::string name;
  bool hard = true;
  bool pass = false;
  std::string detail;
};

struct ValidationReport {
  std::vector<Check> checks;
  /// All hard checks pass.
  bool pass() const;
  const Check* find(const std::string& name) const;
};

ValidationReport validate_scenario(const ScenarioConfig& sc);
Json to_json(const ValidationReport& r);

constexpr double kAverageDriftTolerance = 1e-12;
constexpr double kNonexpansionSlack = 1e-9;
constexpr double kDisplacementSlack = 1e-9;
constexpr double kInfeasibilityTolerance = 1e-12;

struct InvariantVerdict {
  bool average_preserved = false;
  bool nonexpansive = false;
  bool displacement_bounded = false;
  bool feasible = false;
  bool pass() const { return average_preserved && nonexpansive && displacement_bounded && feasible; }
};

InvariantVerdict judge_invariants(const InvariantStats& s);

struct RunOutcome {
  std::uint64_t seed = 0;
  RunTrace trace;
  VerdictReport verdict;
  BoundReport bound;
  InvariantVerdict invariants;
  bool oracle_certified = false;
  bool pass() const;
};

RunOutcome execute(const ScenarioConfig& sc, const ResolvedScenario& r, const OracleSolution& oracle,
                   std::uint64_t seed);

Json to_json(const OracleSolution& o);
Json to_json(const RunOutcome& o, const std::string& scenario);

/// trace.jsonl, trace.csv, plot.csv, oracle.json, verdict.json, scenario.json.
void write_run_outputs(const ScenarioConfig& sc, const RunOutcome& o, const OracleSolution& oracle,
                       const std::filesystem::path& dir);

int cmd_validate(const std::string& config, const Overrides& ov, std::ostream& out, std::ostream& err);
int cmd_run(const std::string& config, const Overrides& ov, std::ostream& out, std::ostream& err);
int cmd_sweep(const std::string& config, const Overrides& ov, std::ostream& out, std::ostream& err);
int cmd_compare(const std::string& config, const Overrides& ov, std::ostream& out, std::ostream& err);
int cmd_export(const std::string& config, const Overrides& ov, std::ostream& out, std::ostream& err);

}  // namespace distopt::cli
