// Acceptance suite: one PASS/FAIL line per criterion. Exit status is 0 only
// when every criterion passes.

#include "distopt_cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace distopt;
using namespace distopt::cli;
namespace fs = std::filesystem;

namespace {

// Tolerances and budgets of the acceptance criteria.
constexpr long kIterations = 100000;
constexpr int kSeeds = 20;
constexpr int kMaxAgents = 6;
constexpr int kMaxDimension = 5;
constexpr double kConsensusTol = 1e-3;
constexpr double kGapTol = 1e-3;
constexpr double kRuntimeLimitSeconds = 60.0;
constexpr double kBoundTol = 1e-9;
constexpr double kDriftTol = 1e-12;
constexpr double kNonexpansionTol = 1e-9;
constexpr double kEquivalenceTol = 1e-9;
constexpr int kEquivalencePoints = 1000;
constexpr double kGridPitch = 1e-3;
constexpr double kArgTol = 1e-3;
constexpr double kValueTol = 1e-6;
constexpr double kStochasticTol = 1e-12;
constexpr int kRandomGraphs = 1000;
constexpr int kMaxRandomGraphSize = 20;

const std::string kRoot = DISTOPT_SOURCE_DIR;

struct Criterion {
  bool pass = true;
  std::vector<std::string> notes;
  void fail(const std::string& why) {
    pass = false;
    notes.push_back("FAIL " + why);
  }
  void info(const std::string& s) { notes.push_back(s); }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string trace_bytes(const RunTrace& t) {
  std::ostringstream os;
  write_trace_jsonl(t, os);
  return os.str();
}

// Brute-force minimum of prob over a uniform grid of the set's bounding box.
struct GridMin {
  Point x;
  double f = INFINITY;
  long points = 0;
};

GridMin grid_minimum(const Problem& prob, double pitch) {
  const Box bb = prob.set.bounding_box();
  const int d = prob.dimension;
  std::vector<long> n(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) n[i] = std::lround((bb.hi[i] - bb.lo[i]) / pitch);
  GridMin best;
  Point x(d);
  std::vector<long> idx(static_cast<std::size_t>(d), 0);
  while (true) {
    for (int i = 0; i < d; ++i) x[i] = bb.lo[i] + (bb.hi[i] - bb.lo[i]) * static_cast<double>(idx[i]) / n[i];
    if (prob.set.contains(x)) {
      ++best.points;
      const double f = prob.value(x);
      if (f < best.f) best.f = f, best.x = x;
    }
    int i = 0;
    while (i < d && ++idx[i] > n[i]) idx[i++] = 0;
    if (i == d) break;
  }
  return best;
}

Point pt1(double v) {
  Point p(1);
  p[0] = v;
  return p;
}

// Row and column sums and entry signs checked directly.
double stochastic_defect(const Matrix& m) {
  double worst = 0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    worst = std::max(worst, std::abs(m.row(i).sum() - 1.0));
    worst = std::max(worst, std::abs(m.col(i).sum() - 1.0));
  }
  if (m.minCoeff() < 0) worst = std::max(worst, -m.minCoeff());
  return worst;
}

}  // namespace

int main() {
  std::vector<std::string> paths;
  for (const auto& e : fs::directory_iterator(kRoot + "/scenarios"))
    if (e.path().extension() == ".json") paths.push_back(e.path().string());
  std::sort(paths.begin(), paths.end());

  Criterion c1, c2, c3, c4, c5, c6, c7, c8, c9;
  if (paths.empty()) c1.fail("no shipped scenarios");

  double worst_runtime = 0, worst_consensus = 0, worst_gap = -INFINITY;
  double worst_drift = 0, worst_nonexp = -INFINITY, worst_displacement = -INFINITY, worst_infeasible = 0;
  long bound_runs = 0, bound_records = 0, literal_violations = 0;
  double bound_margin = INFINITY;
  std::set<std::pair<int, double>> transform_scales;
  int runs = 0;

  for (const auto& path : paths) {
    ScenarioConfig sc = load_scenario(path);
    const std::string name = sc.name;
    sc.iterations = kIterations;
    sc.decimate = 1;

    if (sc.problem.n_agents() > kMaxAgents || sc.problem.dimension > kMaxDimension)
      c1.fail(name + ": S or D outside the suite limits");
    if (sc.steps.a() != 1.0 || sc.steps.b() != 1.0 || sc.steps.p() != 1.0)
      c1.fail(name + ": step schedule is not 1/(k+1)");
    if (sc.seed_to - sc.seed_from + 1 != kSeeds) c1.fail(name + ": scenario does not declare 20 seeds");
    if (!validate_scenario(sc).pass()) c1.fail(name + ": does not validate");

    const ResolvedScenario r = resolve(sc);
    const OracleSolution oracle = centralized_solve(r.problem, sc.oracle_budget);
    // Gaps are measured on the original objective, also for transformed runs.
    const OracleSolution original = r.transformed ? centralized_solve(sc.problem, sc.oracle_budget) : oracle;
    if (!oracle.certified || !original.certified) c2.fail(name + ": oracle not certified");

    if (r.transformed) {
      const auto& cert = r.transformed->certificate;
      const int kind = static_cast<int>(sc.transform.kind);
      transform_scales.insert({kind, sc.transform.scale});
      if (cert.n_points != kEquivalencePoints) c5.fail(name + ": certificate used " + std::to_string(cert.n_points) + " points");
      if (!(cert.value_residual <= kEquivalenceTol) || !(cert.gradient_residual <= kEquivalenceTol))
        c5.fail(name + ": residuals " + fmt(cert.value_residual) + " / " + fmt(cert.gradient_residual));
      c5.info(name + " residuals " + fmt(cert.value_residual) + " / " + fmt(cert.gradient_residual));
      if (std::abs(oracle.f_star - original.f_star) > kGapTol)
        c5.fail(name + ": transformed oracle f* differs from the original");
      if (sc.transform.kind == TransformKind::kPartition) {
        const Graph six = build_kappa_matrix(six_agent_kappa_pattern(), 0.25).support_graph();
        if (r.problem.n_agents() != 6 || !(r.transformed->graph == six) ||
            !(r.schedule.at(0).support_graph() == six))
          c5.fail(name + ": not the six-virtual-agent construction");
      }
    }

    int seed_pass_consensus = 0, seed_pass_gap = 0;
    for (std::uint64_t seed = sc.seed_from; seed <= sc.seed_to; ++seed) {
      const auto t0 = std::chrono::steady_clock::now();
      RunOutcome o;
      try {
        o = execute(sc, r, oracle, seed);
      } catch (const std::exception& e) {
        c1.fail(name + " seed " + std::to_string(seed) + ": " + e.what());
        continue;
      }
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      ++runs;
      worst_runtime = std::max(worst_runtime, secs);
      if (secs > kRuntimeLimitSeconds) c1.fail(name + " seed " + std::to_string(seed) + ": runtime " + fmt(secs) + " s");

      const auto& s = o.trace.summary;
      const double consensus = s.final_max_disagreement;
      const double gap = sc.problem.value(s.final_mean) - original.f_star;
      worst_consensus = std::max(worst_consensus, consensus);
      worst_gap = std::max(worst_gap, gap);
      if (consensus <= kConsensusTol) ++seed_pass_consensus;
      if (gap <= kGapTol) ++seed_pass_gap;
      if (r.transformed && !(gap <= kGapTol)) c5.fail(name + " seed " + std::to_string(seed) + ": gap " + fmt(gap));

      if (o.bound.applicable) {
        ++bound_runs;
        bound_records += o.bound.checked;
        literal_violations += o.bound.literal_violations;
        bound_margin = std::min(bound_margin, o.bound.min_margin);
        if (o.bound.checked != kIterations + 1) c3.fail(name + ": bound not checked at every iteration");
        for (const auto& v : o.bound.violations)
          if (v.observed > v.bound + kBoundTol) {
            c3.fail(name + " seed " + std::to_string(seed) + " k=" + std::to_string(v.k));
            break;
          }
      }

      const auto& inv = o.trace.invariants;
      worst_drift = std::max(worst_drift, inv.max_average_drift);
      worst_nonexp = std::max(worst_nonexp, inv.max_nonexpansion_excess);
      worst_displacement = std::max(worst_displacement, inv.max_displacement_excess);
      worst_infeasible = std::max(worst_infeasible, inv.max_infeasibility);
      if (inv.rounds != kIterations) c4.fail(name + ": invariants not monitored every round");
      if (!(inv.max_average_drift <= kDriftTol)) c4.fail(name + " seed " + std::to_string(seed) + ": average drift");
      if (!(inv.max_nonexpansion_excess <= kNonexpansionTol))
        c4.fail(name + " seed " + std::to_string(seed) + ": non-expansion");
      if (!judge_invariants(inv).pass()) c4.fail(name + " seed " + std::to_string(seed) + ": invariant verdict");

      if (seed == sc.seed_from) {
        const std::string first = trace_bytes(o.trace);
        const std::string second = trace_bytes(execute(sc, r, oracle, seed).trace);
        if (first != second) c8.fail(name + ": traces differ");
        if (first.empty()) c8.fail(name + ": empty trace");
      }
    }
    if (seed_pass_consensus != kSeeds) c1.fail(name + ": " + std::to_string(seed_pass_consensus) + "/20 seeds");
    if (seed_pass_gap != kSeeds) c2.fail(name + ": " + std::to_string(seed_pass_gap) + "/20 seeds");
    std::printf("  %-26s consensus %d/20  gap %d/20\n", name.c_str(), seed_pass_consensus, seed_pass_gap);
    std::fflush(stdout);
  }
  c1.info(std::to_string(runs) + " runs, worst final disagreement " + fmt(worst_consensus) +
          ", slowest run " + fmt(worst_runtime) + " s");
  c2.info("worst final gap " + fmt(worst_gap));
  if (bound_runs == 0) c3.fail("no scrambling scenario in the suite");
  c3.info(std::to_string(bound_runs) + " runs, " + std::to_string(bound_records) + " records, min margin " +
          fmt(bound_margin) + "; literal published form exceeded at " + std::to_string(literal_violations) +
          " records (informational)");
  c4.info("drift " + fmt(worst_drift) + ", non-expansion excess " + fmt(worst_nonexp) + ", displacement excess " +
          fmt(worst_displacement) + ", infeasibility " + fmt(worst_infeasible));
  for (int kind : {static_cast<int>(TransformKind::kPartition), static_cast<int>(TransformKind::kRandomSharing)})
    for (double scale : {0.1, 1.0})
      if (!transform_scales.count({kind, scale}))
        c5.fail("missing transform kind " + std::to_string(kind) + " at scale " + fmt(scale));

  // Oracle against a dense grid on every distinct 1-D / 2-D shipped problem.
  {
    // Distinct problems keyed by their serialized form, labelled by the first scenario using them.
    std::map<std::string, std::pair<std::string, Problem>> problems;
    for (const auto& path : paths) {
      const auto sc = load_scenario(path);
      if (sc.problem.dimension <= 2)
        problems.emplace(dump_json(problem_to_json(sc.problem)), std::make_pair(sc.name, sc.problem));
    }
    std::vector<std::pair<std::string, Problem>> cases;
    cases.emplace_back("x^4+x on [-2,2]",
                       Problem{1, {ComponentFunction::polynomial("q", {{0, 1, 0, 0, 1}}, 40, 48)},
                               FeasibleSet::box(pt1(-2), pt1(2))});
    for (auto& [key, named] : problems) cases.push_back(named);
    for (const auto& [label, p] : cases) {
      const auto sol = centralized_solve(p);
      const auto grid = grid_minimum(p, kGridPitch);
      const double dx = (sol.x_star - grid.x).norm();
      const double df = std::abs(sol.f_star - grid.f);
      if (!sol.certified || dx > kArgTol || df > kValueTol)
        c6.fail(label + ": |dx| " + fmt(dx) + ", |df| " + fmt(df));
      c6.info(label + " (" + std::to_string(grid.points) + " grid points): |dx| " + fmt(dx) + ", |df| " + fmt(df));
    }
    const auto quartic = centralized_solve(cases[0].second);
    if (std::abs(quartic.x_star[0] + std::cbrt(0.25)) > kArgTol) c6.fail("x^4+x minimizer");
  }

  // Matrix validators.
  {
    const auto kappa = build_kappa_matrix(six_agent_kappa_pattern(), 0.25);
    if (is_scrambling(kappa)) c7.fail("kappa matrix reported scrambling");
    const double nu = contraction_coefficient(kappa);
    if (std::abs(nu - 1.0) > kStochasticTol) c7.fail("kappa matrix contraction " + fmt(nu));
    Rng rng(20240601);
    int checked = 0;
    double worst = 0;
    for (int t = 0; t < kRandomGraphs; ++t) {
      const int s = 1 + static_cast<int>(rng.below(kMaxRandomGraphSize));
      Graph g(s);
      // Random spanning tree plus random extra edges.
      for (int v = 1; v < s; ++v) g.add_edge(static_cast<int>(rng.below(static_cast<std::uint64_t>(v))), v);
      const double p = rng.uniform();
      for (int a = 0; a < s; ++a)
        for (int b = a + 1; b < s; ++b)
          if (rng.uniform() < p) g.add_edge(a, b);
      if (!is_connected(g)) {
        c7.fail("generator produced a disconnected graph");
        continue;
      }
      const auto w = build_metropolis(g);
      worst = std::max(worst, stochastic_defect(w.entries()));
      if (!is_doubly_stochastic(w.entries(), kStochasticTol)) c7.fail("Metropolis on graph " + std::to_string(t));
      ++checked;
    }
    c7.info("kappa nu " + fmt(nu) + "; " + std::to_string(checked) + " Metropolis matrices, worst defect " + fmt(worst));
  }

  // Negative controls.
  {
    std::ostringstream out, err;
    const auto concave = kRoot + "/tests/data/concave_sum.json";
    const auto disconnected = kRoot + "/tests/data/disconnected_schedule.json";
    if (cmd_validate(concave, {}, out, err) != kExitValidationFail) c9.fail("concave sum did not exit 2");
    const auto* conv = validate_scenario(load_scenario(concave)).find("objective-functions");
    if (!conv || conv->pass) c9.fail("concave sum passed objective-functions");
    if (cmd_validate(disconnected, {}, out, err) != kExitValidationFail) c9.fail("disconnected schedule did not exit 2");
    const auto* conn = validate_scenario(load_scenario(disconnected)).find("connectedness");
    if (!conn || conn->pass) c9.fail("disconnected schedule passed connectedness");
  }

  const std::vector<std::pair<const char*, Criterion*>> all = {
      {"consensus", &c1},          {"convergence", &c2},        {"disagreement bound", &c3},
      {"fusion invariants", &c4},  {"privacy transforms", &c5}, {"oracle cross-check", &c6},
      {"matrix validators", &c7},  {"determinism", &c8},        {"negative controls", &c9},
  };
  bool ok = true;
  int n = 1;
  for (const auto& [label, c] : all) {
    std::printf("criterion %d (%s): %s\n", n++, label, c->pass ? "PASS" : "FAIL");
    for (const auto& note : c->notes) std::printf("    %s\n", note.c_str());
    ok = ok && c->pass;
  }
  return ok ? 0 : 1;
}
