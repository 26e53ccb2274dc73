#include "distopt/analysis.hpp"

#include "distopt/network.hpp"

#include <algorithm>
#include <cmath>

namespace distopt {

double max_disagreement(const StateMatrix& states) {
  double best = 0.0;
  for (Eigen::Index i = 0; i < states.cols(); ++i)
    for (Eigen::Index j = i + 1; j < states.cols(); ++j)
      best = std::max(best, (states.col(i) - states.col(j)).norm());
  return best;
}

double max_disagreement(const std::vector<Point>& states) {
  if (states.empty()) throw ConfigError("max_disagreement: at least one state required");
  return max_disagreement(to_state_matrix(states));
}

double max_delta(const StateMatrix& states) {
  if (states.cols() == 0) return 0.0;
  const Point mean = states.rowwise().mean();
  return (states.colwise() - mean).colwise().norm().maxCoeff();
}

double max_delta(const std::vector<Point>& states) {
  if (states.empty()) throw ConfigError("max_delta: at least one state required");
  return max_delta(to_state_matrix(states));
}

BoundParams make_bound_params(const Problem& prob, const WeightSchedule& schedule,
                              const std::vector<Point>& initial, long horizon) {
  BoundParams p;
  p.n_agents = prob.n_agents();
  p.l_bar = prob.sum_grad_bounds();
  p.n_bar = prob.sum_lipschitz();
  p.delta0 = initial.empty() ? 0.0 : max_disagreement(initial);
  p.nu = schedule_contraction(schedule, horizon);
  return p;
}

namespace {

double agent_factor(int s) { return static_cast<double>(s - 1) / static_cast<double>(s); }

// sum_{i=first}^{k} alpha_i nu^{k-i}, with nu^0 = 1.
double geometric_step_sum(const StepSchedule& steps, double nu, long first, long k) {
  double acc = 0.0;
  double w = 1.0;
  for (long i = k; i >= first; --i) {
    acc += steps.at(i) * w;
    w *= nu;
    if (w == 0.0) break;
  }
  return acc;
}

}  // namespace

std::optional<double> lemma4_bound(const BoundParams& p, const StepSchedule& steps, long k) {
  if (k < 0) throw ConfigError("lemma4_bound: k must be >= 0");
  if (!(p.nu < 1.0)) return std::nullopt;
  return agent_factor(p.n_agents) *
         (std::pow(p.nu, static_cast<double>(k + 1)) * p.delta0 +
          p.l_bar * geometric_step_sum(steps, p.nu, 1, k));
}

std::optional<double> disagreement_bound(const BoundParams& p, const StepSchedule& steps,
                                         long k) {
  if (k < 0) throw ConfigError("disagreement_bound: k must be >= 0");
  if (!(p.nu < 1.0)) return std::nullopt;
  return agent_factor(p.n_agents) *
         (std::pow(p.nu, static_cast<double>(k + 1)) * p.delta0 +
          p.l_bar * geometric_step_sum(steps, p.nu, 0, k));
}

BoundSequence::BoundSequence(const BoundParams& p, const StepSchedule& steps)
    : p_(p), steps_(steps) {}

void BoundSequence::advance_to(long state_k) {
  if (state_k < k_) throw ConfigError("BoundSequence: state index must not decrease");
  while (k_ < state_k) {
    const double alpha = steps_.at(k_);
    sum_all_ = p_.nu * sum_all_ + alpha;
    sum_lit_ = p_.nu * sum_lit_ + (k_ >= 1 ? alpha : 0.0);
    nu_pow_ *= p_.nu;
    ++k_;
  }
}

double BoundSequence::corrected(long state_k) {
  advance_to(state_k);
  return agent_factor(p_.n_agents) * (nu_pow_ * p_.delta0 + p_.l_bar * sum_all_);
}

double BoundSequence::literal(long state_k) {
  advance_to(state_k);
  return agent_factor(p_.n_agents) * (nu_pow_ * p_.delta0 + p_.l_bar * sum_lit_);
}

BoundReport check_bound(const RunTrace& trace, const BoundParams& p, const StepSchedule& steps) {
  BoundReport report;
  if (!(p.nu < 1.0)) {
    report.applicable = false;
    report.note = "schedule is not scrambling (nu >= 1); bound not applicable";
    return report;
  }
  report.applicable = true;
  BoundSequence seq(p, steps);
  bool first = true;
  for (const auto& rec : trace.records) {
    const double bound = seq.corrected(rec.k);
    const double literal = seq.literal(rec.k);
    const double margin = bound - rec.max_delta;
    if (first || margin < report.min_margin) report.min_margin = margin;
    first = false;
    ++report.checked;
    if (rec.max_delta > bound + kBoundTolerance) {
      report.pass = false;
      report.violations.push_back({rec.k, rec.max_delta, bound, margin});
    }
    if (rec.max_delta > literal + kBoundTolerance) ++report.literal_violations;
  }
  return report;
}

// ---------------------------------------------------------------------------

const char* oracle_method_name(OracleMethod m) {
  return m == OracleMethod::kClosedForm ? "closed-form" : "projected-gradient";
}

namespace {

std::optional<QuadraticForm> as_quadratic(const ComponentFunction& c) {
  const int d = c.dimension();
  if (const auto* q = std::get_if<QuadraticForm>(&c.params())) return *q;
  if (const auto* s = std::get_if<SinePerturbedQuadratic>(&c.params())) {
    if ((s->amplitude.array() == 0.0).all()) return s->quad;
    return std::nullopt;
  }
  const auto& poly = std::get<SeparablePolynomial>(c.params());
  QuadraticForm q{Matrix::Zero(d, d), Point::Zero(d), 0.0};
  for (int i = 0; i < d; ++i) {
    const auto& co = poly.coeffs[static_cast<std::size_t>(i)];
    for (std::size_t p = 3; p < co.size(); ++p)
      if (co[p] != 0.0) return std::nullopt;
    if (co.size() > 0) q.c += co[0];
    if (co.size() > 1) q.b[i] = co[1];
    if (co.size() > 2) q.a(i, i) = 2.0 * co[2];
  }
  return q;
}

double pg_residual(const Problem& prob, const Point& x, double gamma) {
  const Point g = prob.gradient(x);
  return (x - prob.set.project(x - gamma * g)).norm() / gamma;
}

}  // namespace

OracleSolution centralized_solve(const Problem& prob, long budget) {
  prob.check_structure();
  const int d = prob.dimension;
  const double gamma = 1.0 / std::max(prob.sum_lipschitz(), 1e-12);
  OracleSolution sol;

  // Closed form for quadratic sums.
  QuadraticForm total{Matrix::Zero(d, d), Point::Zero(d), 0.0};
  bool quadratic = true;
  for (const auto& c : prob.components) {
    const auto q = as_quadratic(c);
    if (!q) {
      quadratic = false;
      break;
    }
    total.a += q->a;
    total.b += q->b;
    total.c += q->c;
  }
  if (quadratic) {
    Eigen::LLT<Matrix> llt(total.a);
    if (llt.info() == Eigen::Success) {
      const Point x = llt.solve(-total.b);
      if (x.allFinite() && prob.set.contains(x)) {
        sol.x_star = x;
        sol.f_star = prob.value(x);
        sol.method = OracleMethod::kClosedForm;
        sol.residual = pg_residual(prob, x, gamma);
        sol.certified = sol.residual <= kOracleResidualTolerance;
        return sol;
      }
    }
  }

  // Projected gradient from the projection of the origin.
  Point x = prob.set.project(Point::Zero(d));
  long it = 0;
  double res = pg_residual(prob, x, gamma);
  for (; it < budget && res > 1e-13; ++it) {
    x = prob.set.project(x - gamma * prob.gradient(x));
    if ((it & 63) == 63) res = pg_residual(prob, x, gamma);
  }
  sol.x_star = x;
  sol.f_star = prob.value(x);
  sol.method = OracleMethod::kProjectedGradient;
  sol.residual = pg_residual(prob, x, gamma);
  sol.iterations = it;
  sol.certified = sol.residual <= kOracleResidualTolerance;
  return sol;
}

// ---------------------------------------------------------------------------

namespace {

MetricVerdict judge(const std::vector<double>& series, double tol) {
  MetricVerdict m;
  m.tolerance = tol;
  m.final_value = series.back();
  m.pass = m.final_value <= tol;
  const std::size_t n = series.size();
  const std::size_t w = std::max<std::size_t>(1, n / 10);
  double first = 0.0, last = 0.0;
  for (std::size_t i = 0; i < w; ++i) {
    first += series[i];
    last += series[n - w + i];
  }
  m.first_decile_mean = first / static_cast<double>(w);
  m.last_decile_mean = last / static_cast<double>(w);
  m.trend_pass = m.last_decile_mean < m.first_decile_mean || m.last_decile_mean <= tol;
  return m;
}

}  // namespace

VerdictReport verdict(const RunTrace& trace, const OracleSolution& oracle, double tol_consensus,
                      double tol_gap) {
  if (trace.records.empty()) throw ConfigError("verdict: empty trace");
  std::vector<double> dis, gap;
  for (const auto& r : trace.records) {
    dis.push_back(r.max_disagreement);
    gap.push_back(r.f_mean - oracle.f_star);
  }
  VerdictReport v;
  v.consensus = judge(dis, tol_consensus);
  v.gap = judge(gap, tol_gap);
  return v;
}

}  // namespace distopt
