#include "distopt_cli/commands.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

namespace distopt::cli {

namespace fs = std::filesystem;

namespace {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

constexpr std::uint64_t kCheckSeed = 0x5eed;

std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw IoError("cannot write '" + p.string() + "'");
  return f;
}

void write_text(const fs::path& p, const std::string& text) {
  auto f = open_out(p);
  f << text;
  if (!f) throw IoError("write failed for '" + p.string() + "'");
}

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
  // create_directories succeeds on an existing read-only directory.
  const fs::path probe = dir / ".distopt_write_probe";
  {
    std::ofstream f(probe);
    if (!f) throw IoError("output directory '" + dir.string() + "' is not writable");
  }
  fs::remove(probe, ec);
}

template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const ValidationError& e) {
    err << "validation failed:\n";
    for (const auto& v : e.violations()) err << "  " << v << '\n';
    return kExitValidationFail;
  } catch (const EngineAbort& e) {
    err << "engine abort: " << e.what() << '\n';
    return kExitVerdictFail;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitIoError;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kExitIoError;
  } catch (const fs::filesystem_error& e) {
    err << "i/o error: " << e.what() << '\n';
    return kExitIoError;
  }
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

Json metric_json(const MetricVerdict& m) {
  return {{"final", m.final_value},
          {"tolerance", m.tolerance},
          {"pass", m.pass},
          {"first_decile_mean", m.first_decile_mean},
          {"last_decile_mean", m.last_decile_mean},
          {"trend_pass", m.trend_pass}};
}

Json bound_json(const BoundReport& b) {
  Json v = Json::array();
  for (std::size_t i = 0; i < std::min<std::size_t>(b.violations.size(), 20); ++i) {
    const auto& x = b.violations[i];
    v.push_back({{"k", x.k}, {"observed", x.observed}, {"bound", x.bound}, {"margin", x.margin}});
  }
  Json j = {{"applicable", b.applicable},
            {"pass", b.pass},
            {"checked", b.checked},
            {"n_violations", b.violations.size()},
            {"violations", v},
            {"tolerance", kBoundTolerance},
            {"literal_form_violations", b.literal_violations}};
  j["min_margin"] = b.applicable ? Json(b.min_margin) : Json(nullptr);
  if (!b.note.empty()) j["note"] = b.note;
  return j;
}

std::uint64_t single_seed(const ScenarioConfig& sc) { return sc.seed_from; }

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Json spread(const std::vector<double>& v) {
  if (v.empty()) return nullptr;
  return {{"min", *std::min_element(v.begin(), v.end())},
          {"median", median(v)},
          {"max", *std::max_element(v.begin(), v.end())}};
}

void print_validation(const ValidationReport& r, std::ostream& out) {
  for (const auto& c : r.checks) {
    const char* tag = c.pass ? "PASS" : (c.hard ? "FAIL" : "WARNING");
    out << "  " << tag << "  " << c.name << ": " << c.detail << '\n';
  }
  out << (r.pass() ? "valid\n" : "invalid\n");
}

}  // namespace

std::pair<std::uint64_t, std::uint64_t> parse_seed_range(const std::string& s) {
  const auto pos = s.find("..");
  if (pos == std::string::npos) throw ConfigError("--seeds expects A..B, got '" + s + "'");
  try {
    std::size_t used = 0;
    const auto a = std::stoull(s.substr(0, pos), &used);
    if (used != pos) throw std::invalid_argument(s);
    const std::string rest = s.substr(pos + 2);
    const auto b = std::stoull(rest, &used);
    if (used != rest.size()) throw std::invalid_argument(s);
    if (b < a) throw ConfigError("--seeds: B must be >= A");
    return {a, b};
  } catch (const std::logic_error&) {
    throw ConfigError("--seeds expects A..B with non-negative integers, got '" + s + "'");
  }
}

void apply_overrides(ScenarioConfig& sc, const Overrides& ov) {
  if (ov.iterations) {
    if (*ov.iterations < 0) throw ConfigError("--iterations must be >= 0");
    sc.iterations = *ov.iterations;
    sc.document["iterations"] = sc.iterations;
  }
  if (ov.decimate) {
    if (*ov.decimate < 1) throw ConfigError("--decimate must be >= 1");
    sc.decimate = *ov.decimate;
    sc.document["decimate"] = sc.decimate;
  }
  if (ov.seeds) {
    sc.seed_from = ov.seeds->first;
    sc.seed_to = ov.seeds->second;
  }
  if (ov.seed) sc.seed_from = sc.seed_to = *ov.seed;
  if (ov.seed || ov.seeds) {
    sc.document.erase("seed");
    sc.document["seeds"] = {{"from", sc.seed_from}, {"to", sc.seed_to}};
  }
}

fs::path output_dir(const ScenarioConfig& sc, const Overrides& ov) {
  if (ov.out) return *ov.out;
  const char* env = std::getenv(kOutputRootEnv);
  const fs::path root = env && *env ? fs::path(env) : fs::path("out");
  return root / (sc.output_dir.empty() ? sc.name : sc.output_dir);
}

// ---------------------------------------------------------------------------

bool ValidationReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass || !c.hard; });
}

const Check* ValidationReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

Json to_json(const ValidationReport& r) {
  Json checks = Json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"name", c.name},
                      {"severity", c.hard ? "hard" : "warning"},
                      {"pass", c.pass},
                      {"detail", c.detail}});
  return {{"pass", r.pass()}, {"checks", checks}};
}

ValidationReport validate_scenario(const ScenarioConfig& sc) {
  ValidationReport rep;
  auto add = [&](std::string name, bool hard, bool pass, std::string detail) {
    rep.checks.push_back({std::move(name), hard, pass, std::move(detail)});
  };

  const auto conv = verify_sum_convexity(sc.problem, 1000, kCheckSeed);
  add("objective-functions", true, conv.pass,
      conv.pass ? "sum convex on " + std::to_string(conv.checked) + " sampled chords"
                : std::to_string(conv.violations) + " of " + std::to_string(conv.checked) +
                      " sampled chords violate convexity of the sum (worst excess " +
                      fmt(conv.worst_excess) + ")");

  const auto& set = sc.problem.set;
  add("decision-set", true, set.dimension() == sc.problem.dimension,
      std::string(set.is_box() ? "box" : "ball") + " in dimension " + std::to_string(set.dimension()));

  std::optional<ResolvedScenario> resolved;
  if (sc.transform.kind != TransformKind::kNone) {
    try {
      resolved = resolve(sc);
      const auto& cert = resolved->transformed->certificate;
      add("transform", true, cert.pass,
          resolved->transformed->transform + ": " + std::to_string(resolved->problem.n_agents()) +
              " agents, sum preserved at " + std::to_string(cert.n_points) +
              " points (value residual " + fmt(cert.value_residual) + ", gradient residual " +
              fmt(cert.gradient_residual) + ")");
    } catch (const ConfigError& e) {
      add("transform", true, false, e.what());
      return rep;
    }
  } else {
    resolved = resolve(sc);
  }
  const Problem& prob = resolved->problem;
  const WeightSchedule& sched = resolved->schedule;

  // Gradients against central differences at interior sample points.
  {
    Rng rng(kCheckSeed, Stream::kSampling, 1);
    std::vector<Point> pts;
    for (int i = 0; i < 100; ++i) pts.push_back(sample_uniform(set, rng));
    double worst = 0.0;
    for (const auto& c : prob.components)
      worst = std::max(worst, check_gradient(c, pts, 1e-6, set).max_relative_error);
    add("gradient-consistency", true, worst <= 1e-5,
        "max relative finite-difference error " + fmt(worst));
  }

  std::string l_bad, n_bad;
  double l_ratio = 0.0, n_ratio = 0.0;
  for (std::size_t i = 0; i < prob.components.size(); ++i) {
    const auto& c = prob.components[i];
    const auto est = estimate_bounds(c, set, 1000, kCheckSeed + i);
    l_ratio = std::max(l_ratio, est.l_hat / c.grad_bound());
    n_ratio = std::max(n_ratio, est.n_hat / c.lipschitz());
    if (est.l_violated) l_bad += (l_bad.empty() ? "" : ", ") + c.id();
    if (est.n_violated) n_bad += (n_bad.empty() ? "" : ", ") + c.id();
  }
  add("gradient-boundedness", true, l_bad.empty(),
      l_bad.empty() ? "observed/declared L at most " + fmt(l_ratio)
                    : "observed gradient exceeds declared L for " + l_bad);
  add("gradient-lipschitzness", true, n_bad.empty(),
      n_bad.empty() ? "observed/declared N at most " + fmt(n_ratio)
                    : "observed Lipschitz ratio exceeds declared N for " + n_bad);

  add("schedule-size", true, sched.n_agents() == prob.n_agents(),
      std::to_string(sched.n_agents()) + " schedule agents, " + std::to_string(prob.n_agents()) +
          " components");
  if (sched.n_agents() != prob.n_agents()) return rep;

  const long horizon = validation_horizon(sc, sched);
  if (sc.q_connectivity) {
    const int q = *sc.q_connectivity;
    const bool ok = is_q_connected(sched, q, horizon + q);
    add("connectedness", true, ok,
        "Q=" + std::to_string(q) + (ok ? ": every window of " : ": some window of ") +
            std::to_string(q) + " rounds " + (ok ? "has" : "lacks") + " a connected union graph");
  } else {
    long bad = -1;
    for (long k = 0; k < horizon && bad < 0; ++k)
      if (!is_connected(sched.graph_at(k))) bad = k;
    std::string detail = bad < 0 ? "connected at every k < " + std::to_string(horizon)
                                 : "communication graph disconnected at k=" + std::to_string(bad);
    if (bad >= 0) {
      const auto comps = connected_components(sched.graph_at(bad));
      detail += " (" + std::to_string(comps.size()) + " components)";
    }
    add("connectedness", true, bad < 0, detail);
  }

  long non_ds = -1;
  bool all_scrambling = true;
  for (long k = 0; k < horizon; ++k) {
    const WeightMatrix b = sched.at(k);
    if (non_ds < 0 && !is_doubly_stochastic(b.entries())) non_ds = k;
    all_scrambling = all_scrambling && is_scrambling(b);
  }
  add("doubly-stochastic", true, non_ds < 0,
      non_ds < 0 ? "B_k doubly stochastic for every k < " + std::to_string(horizon)
                 : "B_" + std::to_string(non_ds) + " is not doubly stochastic");
  const double nu = schedule_contraction(sched, horizon);
  add("scrambling", false, all_scrambling,
      all_scrambling ? "every B_k scrambling, nu = " + fmt(nu)
                     : "schedule is not scrambling (nu = " + fmt(nu) +
                           "); the disagreement bound will not be checked");

  add("step-sizes", true, true,
      "alpha_k = " + fmt(sc.steps.a()) + " / (k + " + fmt(sc.steps.b()) + ")^" + fmt(sc.steps.p()));
  return rep;
}

// ---------------------------------------------------------------------------

InvariantVerdict judge_invariants(const InvariantStats& s) {
  InvariantVerdict v;
  v.average_preserved = s.max_average_drift <= kAverageDriftTolerance;
  v.nonexpansive = s.max_nonexpansion_excess <= kNonexpansionSlack;
  v.displacement_bounded = s.max_displacement_excess <= kDisplacementSlack;
  v.feasible = s.max_infeasibility <= kInfeasibilityTolerance;
  return v;
}

bool RunOutcome::pass() const {
  return verdict.pass() && (!bound.applicable || bound.pass) && invariants.pass() && oracle_certified;
}

RunOutcome execute(const ScenarioConfig& sc, const ResolvedScenario& r, const OracleSolution& oracle,
                   std::uint64_t seed) {
  RunOutcome o;
  o.seed = seed;
  const RunConfig cfg = make_run_config(sc, r, seed);
  o.trace = run(cfg);
  o.verdict = verdict(o.trace, oracle, sc.tol_consensus, sc.tol_gap);
  BoundParams p;
  p.nu = o.trace.summary.nu;
  p.l_bar = o.trace.summary.l_bar;
  p.n_bar = o.trace.summary.n_bar;
  p.delta0 = o.trace.summary.delta0;
  p.n_agents = o.trace.summary.n_agents;
  o.bound = check_bound(o.trace, p, sc.steps);
  o.invariants = judge_invariants(o.trace.invariants);
  o.oracle_certified = oracle.certified;
  return o;
}

Json to_json(const OracleSolution& o) {
  return {{"x_star", point_to_json(o.x_star)},
          {"f_star", o.f_star},
          {"method", oracle_method_name(o.method)},
          {"residual", o.residual},
          {"residual_tolerance", kOracleResidualTolerance},
          {"certified", o.certified},
          {"iterations", o.iterations}};
}

Json to_json(const RunOutcome& o, const std::string& scenario) {
  const auto& s = o.trace.summary;
  const auto& inv = o.trace.invariants;
  Json warnings = s.warnings;
  return {{"scenario", scenario},
          {"seed", o.seed},
          {"pass", o.pass()},
          {"oracle_certified", o.oracle_certified},
          {"verdict",
           {{"pass", o.verdict.pass()},
            {"consensus", metric_json(o.verdict.consensus)},
            {"gap", metric_json(o.verdict.gap)}}},
          {"bound", bound_json(o.bound)},
          {"invariants",
           {{"pass", o.invariants.pass()},
            {"rounds", inv.rounds},
            {"max_average_drift", inv.max_average_drift},
            {"average_drift_tolerance", kAverageDriftTolerance},
            {"max_nonexpansion_excess", inv.rounds ? Json(inv.max_nonexpansion_excess) : Json(nullptr)},
            {"nonexpansion_slack", kNonexpansionSlack},
            {"max_displacement_excess", inv.rounds ? Json(inv.max_displacement_excess) : Json(nullptr)},
            {"max_infeasibility", inv.max_infeasibility}}},
          {"summary",
           {{"n_iterations", s.n_iterations},
            {"n_agents", s.n_agents},
            {"dimension", s.dimension},
            {"scrambling", s.scrambling},
            {"nu", s.nu},
            {"l_bar", s.l_bar},
            {"n_bar", s.n_bar},
            {"delta0", s.delta0},
            {"final_max_disagreement", s.final_max_disagreement},
            {"final_max_delta", s.final_max_delta},
            {"final_f_mean", s.final_f_mean},
            {"final_mean", point_to_json(s.final_mean)},
            {"warnings", warnings}}}};
}

void write_run_outputs(const ScenarioConfig& sc, const RunOutcome& o, const OracleSolution& oracle,
                       const fs::path& dir) {
  make_dir(dir);
  {
    auto f = open_out(dir / "trace.jsonl");
    write_trace_jsonl(o.trace, f);
  }
  {
    auto f = open_out(dir / "trace.csv");
    write_trace_csv(o.trace, f);
  }
  {
    auto f = open_out(dir / "plot.csv");
    write_plot_data(o.trace, oracle.f_star, f);
  }
  write_text(dir / "oracle.json", dump_json(to_json(oracle)) + "\n");
  write_text(dir / "verdict.json", dump_json(to_json(o, sc.name)) + "\n");
  Json doc = sc.document;
  doc.erase("seeds");
  doc["seed"] = o.seed;
  if (doc.contains("problem_file")) {
    doc.erase("problem_file");
    doc["problem"] = problem_to_json(sc.problem);
  }
  write_text(dir / "scenario.json", dump_json(doc) + "\n");
}

// ---------------------------------------------------------------------------

int cmd_validate(const std::string& config, const Overrides& ov, std::ostream& out,
                 std::ostream& err) {
  return guarded(err, [&] {
    ScenarioConfig sc = load_scenario(config);
    apply_overrides(sc, ov);
    const auto rep = validate_scenario(sc);
    out << "scenario " << sc.name << '\n';
    print_validation(rep, out);
    return rep.pass() ? kExitOk : kExitValidationFail;
  });
}

int cmd_run(const std::string& config, const Overrides& ov, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    ScenarioConfig sc = load_scenario(config);
    apply_overrides(sc, ov);
    if (!ov.force) {
      const auto rep = validate_scenario(sc);
      if (!rep.pass()) {
        print_validation(rep, err);
        err << "refusing to run an invalid scenario (use --force to override)\n";
        return kExitValidationFail;
      }
    }
    const fs::path dir = output_dir(sc, ov);
    make_dir(dir);
    const auto r = resolve(sc);
    const auto oracle = centralized_solve(sc.problem, sc.oracle_budget);
    const auto t0 = std::chrono::steady_clock::now();
    const auto o = execute(sc, r, oracle, single_seed(sc));
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_run_outputs(sc, o, oracle, dir);
    for (const auto& w : o.trace.summary.warnings) err << "warning: " << w << '\n';
    out << "scenario " << sc.name << " seed " << o.seed << ": " << sc.iterations << " iterations in "
        << fmt(secs) << " s\n"
        << "  consensus " << fmt(o.verdict.consensus.final_value) << " (tol " << sc.tol_consensus
        << ")  gap " << fmt(o.verdict.gap.final_value) << " (tol " << sc.tol_gap << ")\n"
        << "  bound " << (o.bound.applicable ? (o.bound.pass ? "pass" : "FAIL") : "n/a")
        << "  invariants " << (o.invariants.pass() ? "pass" : "FAIL") << "  oracle "
        << (oracle.certified ? "certified" : "NOT certified") << '\n'
        << (o.pass() ? "PASS" : "FAIL") << "  outputs in " << dir.string() << '\n';
    return o.pass() ? kExitOk : kExitVerdictFail;
  });
}

int cmd_sweep(const std::string& config, const Overrides& ov, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    ScenarioConfig sc = load_scenario(config);
    apply_overrides(sc, ov);
    if (ov.parallel < 1) throw ConfigError("--parallel must be >= 1");
    if (!ov.force) {
      const auto rep = validate_scenario(sc);
      if (!rep.pass()) {
        print_validation(rep, err);
        return kExitValidationFail;
      }
    }
    const fs::path dir = output_dir(sc, ov);
    make_dir(dir);
    const auto r = resolve(sc);
    const auto oracle = centralized_solve(sc.problem, sc.oracle_budget);

    std::vector<std::uint64_t> seeds;
    for (std::uint64_t s = sc.seed_from; s <= sc.seed_to; ++s) seeds.push_back(s);
    std::vector<Json> results(seeds.size());
    std::atomic<std::size_t> next{0};
    std::mutex log_mu;
    auto worker = [&] {
      for (std::size_t i = next++; i < seeds.size(); i = next++) {
        const auto seed = seeds[i];
        Json res;
        try {
          const auto o = execute(sc, r, oracle, seed);
          write_run_outputs(sc, o, oracle, dir / ("seed_" + std::to_string(seed)));
          res = {{"seed", seed},
                 {"pass", o.pass()},
                 {"final_gap", o.verdict.gap.final_value},
                 {"final_disagreement", o.verdict.consensus.final_value},
                 {"bound_pass", o.bound.applicable ? Json(o.bound.pass) : Json(nullptr)},
                 {"invariants_pass", o.invariants.pass()}};
        } catch (const std::exception& e) {
          res = {{"seed", seed}, {"pass", false}, {"error", e.what()}};
        }
        std::lock_guard lock(log_mu);
        out << "  seed " << seed << ": " << (res["pass"].get<bool>() ? "pass" : "FAIL") << '\n';
        results[i] = std::move(res);
      }
    };
    std::vector<std::thread> pool;
    const int n_threads = std::min<int>(ov.parallel, static_cast<int>(seeds.size()));
    for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    std::vector<double> gaps, dis;
    Json failures = Json::array();
    int n_pass = 0;
    for (const auto& res : results) {
      if (res.contains("final_gap")) {
        gaps.push_back(res["final_gap"].get<double>());
        dis.push_back(res["final_disagreement"].get<double>());
      }
      if (res["pass"].get<bool>()) ++n_pass;
      else failures.push_back(res["seed"]);
    }
    const Json agg = {{"scenario", sc.name},
                      {"seeds", {{"from", sc.seed_from}, {"to", sc.seed_to}}},
                      {"n_runs", results.size()},
                      {"n_pass", n_pass},
                      {"pass", failures.empty()},
                      {"failures", failures},
                      {"final_gap", spread(gaps)},
                      {"final_disagreement", spread(dis)},
                      {"oracle", to_json(oracle)},
                      {"runs", results}};
    write_text(dir / "sweep.json", dump_json(agg) + "\n");
    out << "scenario " << sc.name << ": " << n_pass << "/" << results.size() << " seeds pass; "
        << "aggregate in " << (dir / "sweep.json").string() << '\n';
    return failures.empty() ? kExitOk : kExitVerdictFail;
  });
}

int cmd_compare(const std::string& config, const Overrides& ov, std::ostream& out,
                std::ostream& err) {
  return guarded(err, [&] {
    ScenarioConfig sc = load_scenario(config);
    apply_overrides(sc, ov);
    const auto oracle = centralized_solve(sc.problem, sc.oracle_budget);
    const std::uint64_t seed = single_seed(sc);

    const ResolvedScenario original{sc.problem, sc.schedule, std::nullopt};
    const auto transformed = resolve(sc);
    // Explicit initial points describe the transformed agents only.
    ScenarioConfig sc_orig = sc;
    if (transformed.problem.n_agents() != sc.problem.n_agents()) sc_orig.init_points.reset();

    const auto o1 = execute(sc_orig, original, oracle, seed);
    const auto o2 = execute(sc, transformed, oracle, seed);
    const double g1 = o1.verdict.gap.final_value;
    const double g2 = o2.verdict.gap.final_value;
    EquivalenceReport cert;
    if (transformed.transformed) cert = transformed.transformed->certificate;
    else cert = certify_equivalence(sc.problem, sc.problem, kCertificationPoints, seed);
    const bool pass = o1.pass() && o2.pass() && cert.pass;

    const Json rep = {{"scenario", sc.name},
                      {"seed", seed},
                      {"transform", transformed.transformed ? transformed.transformed->transform : "none"},
                      {"iterations", sc.iterations},
                      {"f_star", oracle.f_star},
                      {"gap_original", g1},
                      {"gap_transformed", g2},
                      {"gap_difference", std::abs(g1 - g2)},
                      {"original_pass", o1.pass()},
                      {"transformed_pass", o2.pass()},
                      {"equivalence",
                       {{"n_points", cert.n_points},
                        {"value_residual", cert.value_residual},
                        {"gradient_residual", cert.gradient_residual},
                        {"tolerance", kEquivalenceTolerance},
                        {"pass", cert.pass}}},
                      {"pass", pass}};
    const fs::path dir = output_dir(sc, ov);
    make_dir(dir);
    write_text(dir / "compare.json", dump_json(rep) + "\n");
    out << "scenario " << sc.name << " (" << rep["transform"].get<std::string>() << ")\n"
        << "  gap original " << fmt(g1) << "  transformed " << fmt(g2) << "  |difference| "
        << fmt(std::abs(g1 - g2)) << '\n'
        << "  equivalence value " << fmt(cert.value_residual) << " gradient "
        << fmt(cert.gradient_residual) << (cert.pass ? " certified" : " NOT certified") << '\n'
        << (pass ? "PASS" : "FAIL") << '\n';
    return pass ? kExitOk : kExitVerdictFail;
  });
}

int cmd_export(const std::string& config, const Overrides& ov, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    ScenarioConfig sc = load_scenario(config);
    apply_overrides(sc, ov);
    const auto r = resolve(sc);
    const fs::path dir = output_dir(sc, ov);
    make_dir(dir);
    const Json problem = r.transformed ? transformed_to_json(*r.transformed) : problem_to_json(r.problem);
    write_text(dir / "problem.json", dump_json(problem) + "\n");
    write_text(dir / "schedule.json", dump_json(schedule_to_json(r.schedule)) + "\n");
    const Graph g = r.transformed ? r.transformed->graph : sc.graph;
    write_text(dir / "graph.json", dump_json(graph_to_json(g)) + "\n");
    out << "exported " << r.problem.n_agents() << "-agent problem to " << dir.string() << '\n';
    return kExitOk;
  });
}

}  // namespace distopt::cli
