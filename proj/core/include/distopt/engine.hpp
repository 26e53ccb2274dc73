#pragma once

// Synchronous consensus + projected gradient rounds:
//
//   v^J_k     = sum_I B_k[J,I] x^I_k
//   x^J_{k+1} = P_X[ v^J_k - alpha_k g_J(v^J_k) ]
//
// Every agent fuses with B_k, then every agent descends along its own
// component gradient. Runs are deterministic given the config and seeds.

#include "distopt/common.hpp"
#include "distopt/network.hpp"
#include "distopt/problem.hpp"

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace distopt {

/// alpha_k = a / (k + b)^p with a > 0, b >= 1, p in (1/2, 1]: positive,
/// non-increasing, not summable, square-summable.
class StepSchedule {
 public:
  StepSchedule(double a = 1.0, double b = 1.0, double p = 1.0);
  double a() const { return a_; }
  double b() const { return b_; }
  double p() const { return p_; }
  double at(long k) const;

 private:
  double a_, b_, p_;
};

double step_size(const StepSchedule& s, long k);

/// Agent states stored column-wise: column J is agent J's point.
using StateMatrix = Matrix;

StateMatrix to_state_matrix(const std::vector<Point>& states);
std::vector<Point> to_points(const StateMatrix& states);

std::vector<Point> fuse(const std::vector<Point>& states, const WeightMatrix& b);
/// Column form of fuse: V = X B^T (row J of B weights the columns of X).
StateMatrix fuse(const StateMatrix& states, const WeightMatrix& b);

struct ExplicitInit {
  std::vector<Point> points;
};
struct UniformInit {
  std::uint64_t seed = 0;
};
using InitialIterates = std::variant<ExplicitInit, UniformInit>;

struct RunConfig {
  Problem problem;
  WeightSchedule schedule;
  StepSchedule steps;
  long n_iterations = 0;
  InitialIterates init = UniformInit{};
  /// Record every m-th iteration; the final iterate is always recorded.
  long decimate = 1;
  /// Check fusion and descent invariants at every round.
  bool monitor_invariants = true;
  /// Number of random reference points (besides the projected origin) for
  /// the sum non-expansiveness check.
  int monitor_points = 10;
  std::uint64_t monitor_seed = 0;
  /// Compute and record the disagreement bound when the schedule is
  /// scrambling.
  bool track_bound = true;
};

std::vector<Point> descend(const std::vector<Point>& fused, long k, const RunConfig& cfg);

struct TraceRecord {
  long k = 0;
  double alpha = 0.0;
  StateMatrix states;
  Point mean;
  double max_delta = 0.0;
  double max_disagreement = 0.0;
  double f_mean = 0.0;
  std::optional<double> bound;
};

/// Worst-case observations of the per-round invariants.
struct InvariantStats {
  long rounds = 0;
  /// max_k ||mean(v_k) - mean(x_k)||
  double max_average_drift = 0.0;
  /// max_k max_y sum_J ||v^J - y||^2 - sum_J ||x^J - y||^2 (<= 0 expected)
  double max_nonexpansion_excess = -std::numeric_limits<double>::infinity();
  /// max_k max_J ||x^J_{k+1} - v^J_k|| - alpha_k L_J (<= 0 expected)
  double max_displacement_excess = -std::numeric_limits<double>::infinity();
  /// max_k max_J dist(x^J_k, X)
  double max_infeasibility = 0.0;
};

struct RunSummary {
  long n_iterations = 0;
  int n_agents = 0;
  int dimension = 0;
  bool scrambling = false;
  double nu = 1.0;
  double l_bar = 0.0;
  double n_bar = 0.0;
  double delta0 = 0.0;
  double final_max_disagreement = 0.0;
  double final_max_delta = 0.0;
  double final_f_mean = 0.0;
  Point final_mean;
  std::vector<std::string> warnings;
};

struct RunTrace {
  std::vector<TraceRecord> records;
  InvariantStats invariants;
  RunSummary summary;
};

/// Structural validation of a config: every violated requirement is listed.
std::vector<std::string> validate_run_config(const RunConfig& cfg);
std::vector<Point> initial_iterates(const RunConfig& cfg);

/// Executes exactly n_iterations rounds. Throws ValidationError if the config
/// is invalid, EngineAbort if a gradient evaluates to a non-finite value.
RunTrace run(const RunConfig& cfg);

/// One JSON object per record.
void write_trace_jsonl(const RunTrace& trace, std::ostream& os);
/// Columns: k, alpha, f_bar, max_disagreement, max_delta, bound, then x_J_d.
void write_trace_csv(const RunTrace& trace, std::ostream& os);
/// k, f_gap, max_disagreement, bound.
void write_plot_data(const RunTrace& trace, double f_star, std::ostream& os);

/// %.17g formatting used by every text exporter.
std::string format_double(double v);

}  // namespace distopt
