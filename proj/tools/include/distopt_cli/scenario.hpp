#pragma once

// Scenario documents: one JSON file describing a problem, its schedule, the
// step sizes, an optional privacy transform and the run budget.

#include "distopt/analysis.hpp"
#include "distopt/engine.hpp"
#include "distopt/json_io.hpp"
#include "distopt/network.hpp"
#include "distopt/privacy.hpp"
#include "distopt/problem.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace distopt::cli {

constexpr int kSchemaVersion = 1;

enum class TransformKind { kNone, kPartition, kRandomSharing };

struct TransformSpec {
  TransformKind kind = TransformKind::kNone;
  // partition
  int m_per_agent = 2;
  bool six_agent_plan = false;
  std::vector<std::pair<int, int>> links;  // explicit virtual links, optional
  std::optional<Json> virtual_schedule;    // default: Metropolis on the virtual graph
  double gradient_bound_cap = std::numeric_limits<double>::infinity();
  // both
  double scale = 0.0;
  std::uint64_t seed = 0;
};

struct ScenarioConfig {
  ScenarioConfig(Problem p, WeightSchedule s)
      : problem(std::move(p)), schedule(std::move(s)) {}

  std::string name;
  std::string path;
  Problem problem;
  WeightSchedule schedule;
  /// Real communication graph; defaults to the union of the schedule's
  /// support graphs over one period (B_0 for random schedules).
  Graph graph;
  StepSchedule steps;
  TransformSpec transform;
  long iterations = 10000;
  std::uint64_t seed_from = 0;
  std::uint64_t seed_to = 0;
  std::optional<std::vector<Point>> init_points;
  long decimate = 1;
  double tol_consensus = kDefaultConsensusTolerance;
  double tol_gap = kDefaultGapTolerance;
  long oracle_budget = 200000;
  std::string output_dir;
  std::optional<int> q_connectivity;
  Json document;
};

/// Throws ConfigError naming the offending field, or ValidationError when a
/// supplied weight matrix is not doubly stochastic.
ScenarioConfig parse_scenario(const Json& doc, const std::string& path = "<inline>");
ScenarioConfig load_scenario(const std::string& path);

/// The problem and schedule the engine actually runs.
struct ResolvedScenario {
  Problem problem;
  WeightSchedule schedule;
  std::optional<TransformedProblem> transformed;
};

ResolvedScenario resolve(const ScenarioConfig& sc);

/// Horizon over which per-k schedule properties are validated: one full
/// cycle for periodic schedules, min(iterations, 2000) otherwise.
long validation_horizon(const ScenarioConfig& sc, const WeightSchedule& s);

RunConfig make_run_config(const ScenarioConfig& sc, const ResolvedScenario& r, std::uint64_t seed);

}  // namespace distopt::cli
