#include "distopt_cli/scenario.hpp"

#include <filesystem>

namespace distopt::cli {

namespace fs = std::filesystem;

namespace {

std::uint64_t uint_field(const Json& j, const std::string& key, const std::string& path) {
  const Json& v = require_field(j, key, path);
  if (!v.is_number_integer() || v.get<long long>() < 0)
    throw ConfigError("field '" + path + (path.empty() ? "" : ".") + key +
                      "' must be a non-negative integer");
  return v.get<std::uint64_t>();
}

long long_field(const Json& j, const std::string& key, const std::string& path, long def) {
  if (!j.contains(key)) return def;
  const Json& v = j[key];
  if (!v.is_number_integer())
    throw ConfigError("field '" + path + (path.empty() ? "" : ".") + key + "' must be an integer");
  return v.get<long>();
}

// Explicit matrices are checked here so that a non-doubly-stochastic input is
// reported as a validation failure rather than a malformed document.
void check_raw_matrices(const Json& sched, const std::string& path) {
  if (!sched.is_object()) return;
  std::vector<std::pair<std::string, const Json*>> found;
  if (sched.contains("matrix") && sched["matrix"].is_array())
    found.emplace_back(path + ".matrix", &sched["matrix"]);
  if (sched.contains("matrices") && sched["matrices"].is_array())
    for (std::size_t i = 0; i < sched["matrices"].size(); ++i)
      found.emplace_back(path + ".matrices[" + std::to_string(i) + "]", &sched["matrices"][i]);
  std::vector<std::string> bad;
  for (const auto& [name, j] : found) {
    const Matrix m = matrix_from_json(*j, name);
    if (m.rows() != m.cols()) throw ConfigError("field '" + name + "' must be square");
    if (!is_doubly_stochastic(m)) bad.push_back("doubly-stochastic: " + name + " is not doubly stochastic");
  }
  if (!bad.empty()) throw ValidationError(std::move(bad));
}

Graph union_support(const WeightSchedule& s) {
  const long p = s.period();
  Graph g(s.n_agents());
  for (long k = 0; k < std::max(p, 1L); ++k) g = g.merged(s.graph_at(k));
  return g;
}

std::vector<std::pair<int, int>> pairs_from_json(const Json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError("field '" + path + "' must be an array of pairs");
  std::vector<std::pair<int, int>> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const Json& e = j[i];
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer())
      throw ConfigError("field '" + path + "[" + std::to_string(i) + "]' must be a pair of indices");
    out.emplace_back(e[0].get<int>(), e[1].get<int>());
  }
  return out;
}

TransformSpec parse_transform(const Json& j) {
  TransformSpec t;
  if (!j.is_object()) throw ConfigError("field 'transform' must be an object");
  const Json& kind = require_field(j, "kind", "transform");
  if (!kind.is_string()) throw ConfigError("field 'transform.kind' must be a string");
  const auto k = kind.get<std::string>();
  if (k == "none") return t;
  if (k == "partition") {
    t.kind = TransformKind::kPartition;
    t.m_per_agent = static_cast<int>(long_field(j, "m_per_agent", "transform", 2));
    t.scale = number_field(j, "perturbation_scale", "transform");
    t.seed = uint_field(j, "seed", "transform");
    if (j.contains("plan")) {
      const Json& plan = j["plan"];
      if (plan == "six_agent") {
        t.six_agent_plan = true;
      } else if (plan != "default") {
        throw ConfigError("field 'transform.plan' must be \"default\" or \"six_agent\"");
      }
    }
    if (j.contains("links")) t.links = pairs_from_json(j["links"], "transform.links");
    if (j.contains("virtual_schedule")) t.virtual_schedule = j["virtual_schedule"];
    if (j.contains("gradient_bound_cap"))
      t.gradient_bound_cap = number_field(j, "gradient_bound_cap", "transform");
    if (t.six_agent_plan && t.m_per_agent != 2)
      throw ConfigError("field 'transform.m_per_agent' must be 2 with the six_agent plan");
    return t;
  }
  if (k == "random_sharing") {
    t.kind = TransformKind::kRandomSharing;
    t.scale = number_field(j, "scale", "transform");
    t.seed = uint_field(j, "seed", "transform");
    return t;
  }
  throw ConfigError("field 'transform.kind': unknown transform '" + k + "'");
}

}  // namespace

ScenarioConfig parse_scenario(const Json& doc, const std::string& path) {
  if (!doc.is_object()) throw ConfigError("scenario must be a JSON object");
  const Json& ver = require_field(doc, "schema_version", "");
  if (!ver.is_number_integer() || ver.get<int>() != kSchemaVersion)
    throw ConfigError("field 'schema_version' must be " + std::to_string(kSchemaVersion));

  const std::string name = doc.value("name", fs::path(path).stem().string());

  Problem problem = [&] {
    if (doc.contains("problem")) return problem_from_json(doc["problem"], "problem");
    const Json& file = require_field(doc, "problem_file", "");
    if (!file.is_string()) throw ConfigError("field 'problem_file' must be a string");
    fs::path p = file.get<std::string>();
    if (p.is_relative()) p = fs::path(path).parent_path() / p;
    return problem_from_json(read_json_file(p.string()), "problem_file");
  }();

  const Json& sched_doc = require_field(doc, "schedule", "");
  check_raw_matrices(sched_doc, "schedule");
  WeightSchedule schedule = schedule_from_json(sched_doc, "schedule");

  Graph graph = doc.contains("graph") ? graph_from_json(doc["graph"], "graph") : union_support(schedule);

  StepSchedule steps;
  if (doc.contains("steps")) {
    const Json& s = doc["steps"];
    steps = StepSchedule(s.contains("a") ? number_field(s, "a", "steps") : 1.0,
                         s.contains("b") ? number_field(s, "b", "steps") : 1.0,
                         s.contains("p") ? number_field(s, "p", "steps") : 1.0);
  }

  ScenarioConfig sc(std::move(problem), std::move(schedule));
  sc.name = name;
  sc.path = path;
  sc.graph = std::move(graph);
  sc.steps = steps;
  sc.document = doc;
  if (doc.contains("transform")) sc.transform = parse_transform(doc["transform"]);
  if (sc.transform.virtual_schedule) check_raw_matrices(*sc.transform.virtual_schedule, "transform.virtual_schedule");

  sc.iterations = long_field(doc, "iterations", "", sc.iterations);
  if (sc.iterations < 0) throw ConfigError("field 'iterations' must be >= 0");
  if (doc.contains("seeds")) {
    sc.seed_from = uint_field(doc["seeds"], "from", "seeds");
    sc.seed_to = uint_field(doc["seeds"], "to", "seeds");
    if (sc.seed_to < sc.seed_from) throw ConfigError("field 'seeds': 'to' must be >= 'from'");
  } else if (doc.contains("seed")) {
    sc.seed_from = sc.seed_to = uint_field(doc, "seed", "");
  }
  if (doc.contains("init")) {
    const Json& init = doc["init"];
    if (init.is_object() && init.contains("points")) {
      const Json& pts = init["points"];
      if (!pts.is_array()) throw ConfigError("field 'init.points' must be an array");
      std::vector<Point> points;
      for (std::size_t i = 0; i < pts.size(); ++i)
        points.push_back(point_from_json(pts[i], "init.points[" + std::to_string(i) + "]"));
      sc.init_points = std::move(points);
    } else if (init != "uniform") {
      throw ConfigError("field 'init' must be \"uniform\" or {\"points\": [...]}");
    }
  }
  sc.decimate = long_field(doc, "decimate", "", 1);
  if (sc.decimate < 1) throw ConfigError("field 'decimate' must be >= 1");
  if (doc.contains("tolerances")) {
    const Json& t = doc["tolerances"];
    if (t.contains("consensus")) sc.tol_consensus = number_field(t, "consensus", "tolerances");
    if (t.contains("gap")) sc.tol_gap = number_field(t, "gap", "tolerances");
  }
  sc.oracle_budget = long_field(doc, "oracle_budget", "", sc.oracle_budget);
  if (doc.contains("output_dir")) {
    if (!doc["output_dir"].is_string()) throw ConfigError("field 'output_dir' must be a string");
    sc.output_dir = doc["output_dir"].get<std::string>();
  }
  if (doc.contains("connectivity")) {
    const long q = long_field(doc["connectivity"], "q", "connectivity", 1);
    if (q < 1) throw ConfigError("field 'connectivity.q' must be >= 1");
    sc.q_connectivity = static_cast<int>(q);
  }
  if (sc.graph.n_agents() != sc.problem.n_agents())
    throw ConfigError("field 'graph': " + std::to_string(sc.graph.n_agents()) +
                      " agents but the problem has " + std::to_string(sc.problem.n_agents()));
  return sc;
}

ScenarioConfig load_scenario(const std::string& path) {
  return parse_scenario(read_json_file(path), path);
}

ResolvedScenario resolve(const ScenarioConfig& sc) {
  const TransformSpec& t = sc.transform;
  switch (t.kind) {
    case TransformKind::kNone:
      return {sc.problem, sc.schedule, std::nullopt};
    case TransformKind::kRandomSharing: {
      auto tp = random_function_sharing(sc.problem, sc.graph, t.scale, t.seed);
      Problem p = tp.problem;
      return {std::move(p), sc.schedule, std::move(tp)};
    }
    case TransformKind::kPartition: {
      PartitionPlan plan = t.six_agent_plan ? six_agent_partition_plan()
                                            : default_partition_plan(sc.graph, t.m_per_agent);
      if (!t.links.empty()) plan.links = t.links;
      PartitionOptions opts;
      opts.perturbation_scale = t.scale;
      opts.seed = t.seed;
      opts.gradient_bound_cap = t.gradient_bound_cap;
      auto tp = partition_problem(sc.problem, sc.graph, plan, opts);
      WeightSchedule vs = t.virtual_schedule
                              ? schedule_from_json(*t.virtual_schedule, "transform.virtual_schedule")
                              : WeightSchedule::fixed(build_metropolis(tp.graph));
      Problem p = tp.problem;
      return {std::move(p), std::move(vs), std::move(tp)};
    }
  }
  throw ConfigError("unknown transform");
}

long validation_horizon(const ScenarioConfig& sc, const WeightSchedule& s) {
  const long p = s.period();
  if (p > 0) return p;
  return std::max(1L, std::min(sc.iterations, 2000L));
}

RunConfig make_run_config(const ScenarioConfig& sc, const ResolvedScenario& r, std::uint64_t seed) {
  RunConfig cfg{r.problem, r.schedule, sc.steps, sc.iterations};
  if (sc.init_points) cfg.init = ExplicitInit{*sc.init_points};
  else cfg.init = UniformInit{seed};
  cfg.decimate = sc.decimate;
  cfg.monitor_seed = seed;
  return cfg;
}

}  // namespace distopt::cli
