#pragma once

// Disagreement metrics, the contraction-based disagreement bound, a
// centralized oracle for f*, and convergence verdicts.

#include "distopt/common.hpp"
#include "distopt/engine.hpp"
#include "distopt/problem.hpp"

#include <optional>
#include <string>
#include <vector>

namespace distopt {

/// max_{I,J} ||x^J - x^I||; 0 for a single agent.
double max_disagreement(const std::vector<Point>& states);
double max_disagreement(const StateMatrix& states);
/// max_J ||x^J - mean||.
double max_delta(const std::vector<Point>& states);
double max_delta(const StateMatrix& states);

struct BoundParams {
  double nu = 1.0;
  double l_bar = 0.0;
  double n_bar = 0.0;
  double delta0 = 0.0;
  int n_agents = 1;
};

/// nu from the schedule over `horizon` steps, L_bar / N_bar from the declared
/// component constants, delta0 from the initial iterates.
BoundParams make_bound_params(const Problem& prob, const WeightSchedule& schedule,
                              const std::vector<Point>& initial, long horizon);

/// Right-hand side of the published disagreement lemma for max_delta at
/// iteration k+1:
///   (S-1)/S * (nu^{k+1} delta0 + L_bar * sum_{i=1}^{k} alpha_i nu^{k-i})
/// with 0^0 = 1. nullopt when nu >= 1 (bound unavailable).
///
/// The sum omits the i = 0 term of the unrolled recursion, so this is not a
/// valid bound at small k (with nu = 0 it claims max_delta_1 = 0). Kept for
/// reference; `disagreement_bound` is the checked form.
std::optional<double> lemma4_bound(const BoundParams& p, const StepSchedule& steps, long k);

/// Unrolled recursion d_{k+1} <= nu d_k + alpha_k L_bar including the first
/// step:
///   (S-1)/S * (nu^{k+1} delta0 + L_bar * sum_{i=0}^{k} alpha_i nu^{k-i})
/// bounds max_delta at iteration k+1. nullopt when nu >= 1.
std::optional<double> disagreement_bound(const BoundParams& p, const StepSchedule& steps,
                                         long k);

/// Incremental evaluation of both bounds for k = 0, 1, 2, ... in O(1) per step.
class BoundSequence {
 public:
  BoundSequence(const BoundParams& p, const StepSchedule& steps);
  bool available() const { return p_.nu < 1.0; }
  /// Bound on max_delta of the state at iteration `state_k` (k = 0 is the
  /// initial state). Must be called with non-decreasing state_k.
  double corrected(long state_k);
  double literal(long state_k);

 private:
  void advance_to(long state_k);
  BoundParams p_;
  StepSchedule steps_;
  long k_ = 0;            // current state index
  double nu_pow_ = 1.0;   // nu^k
  double sum_all_ = 0.0;  // sum_{i=0}^{k-1} alpha_i nu^{k-1-i}
  double sum_lit_ = 0.0;  // sum_{i=1}^{k-1} alpha_i nu^{k-1-i}
};

struct BoundViolation {
  long k = 0;
  double observed = 0.0;
  double bound = 0.0;
  double margin = 0.0;  // bound - observed (negative)
};

struct BoundReport {
  bool applicable = false;
  bool pass = true;
  long checked = 0;
  std::vector<BoundViolation> violations;
  double min_margin = 0.0;
  /// Records where the literal published form is exceeded.
  long literal_violations = 0;
  std::string note;
};

constexpr double kBoundTolerance = 1e-9;

/// For every recorded k: max_delta_k <= bound + 1e-9.
BoundReport check_bound(const RunTrace& trace, const BoundParams& p, const StepSchedule& steps);

enum class OracleMethod { kClosedForm, kProjectedGradient };
const char* oracle_method_name(OracleMethod m);

struct OracleSolution {
  Point x_star;
  double f_star = 0.0;
  OracleMethod method = OracleMethod::kProjectedGradient;
  double residual = 0.0;
  bool certified = false;
  long iterations = 0;
};

constexpr double kOracleResidualTolerance = 1e-6;

/// Closed form for quadratic sums with a minimizer inside X; otherwise
/// projected gradient with step 1 / sum N_i for up to `budget` iterations.
/// residual = ||x - P_X(x - g grad f(x))|| / g with g = 1 / sum N_i.
OracleSolution centralized_solve(const Problem& prob, long budget = 200000);

struct MetricVerdict {
  double final_value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  double first_decile_mean = 0.0;
  double last_decile_mean = 0.0;
  bool trend_pass = false;
};

struct VerdictReport {
  MetricVerdict consensus;
  MetricVerdict gap;
  bool pass() const {
    return consensus.pass && gap.pass && consensus.trend_pass && gap.trend_pass;
  }
};

constexpr double kDefaultConsensusTolerance = 1e-3;
constexpr double kDefaultGapTolerance = 1e-3;

VerdictReport verdict(const RunTrace& trace, const OracleSolution& oracle,
                      double tol_consensus = kDefaultConsensusTolerance,
                      double tol_gap = kDefaultGapTolerance);

}  // namespace distopt
