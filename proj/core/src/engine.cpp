#include "distopt/engine.hpp"

#include "distopt/analysis.hpp"
#include "distopt/rng.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace distopt {

StepSchedule::StepSchedule(double a, double b, double p) : a_(a), b_(b), p_(p) {
  if (!(a > 0.0) || !std::isfinite(a)) throw ConfigError("step schedule: a must be > 0");
  if (!(b >= 1.0) || !std::isfinite(b)) throw ConfigError("step schedule: b must be >= 1");
  if (!(p > 0.5 && p <= 1.0))
    throw ConfigError("step schedule: p must be in (1/2, 1] for sum alpha = inf and sum alpha^2 < inf");
}

double StepSchedule::at(long k) const {
  if (k < 0) throw ConfigError("step schedule: k must be >= 0");
  const double base = static_cast<double>(k) + b_;
  return p_ == 1.0 ? a_ / base : a_ / std::pow(base, p_);
}

double step_size(const StepSchedule& s, long k) { return s.at(k); }

StateMatrix to_state_matrix(const std::vector<Point>& states) {
  if (states.empty()) return StateMatrix();
  StateMatrix m(states.front().size(), static_cast<Eigen::Index>(states.size()));
  for (std::size_t j = 0; j < states.size(); ++j) {
    if (states[j].size() != m.rows()) throw ConfigError("states: inconsistent dimensions");
    m.col(static_cast<Eigen::Index>(j)) = states[j];
  }
  return m;
}

std::vector<Point> to_points(const StateMatrix& states) {
  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(states.cols()));
  for (Eigen::Index j = 0; j < states.cols(); ++j) out.emplace_back(states.col(j));
  return out;
}

StateMatrix fuse(const StateMatrix& states, const WeightMatrix& b) {
  if (states.cols() != b.size()) throw ConfigError("fuse: state count does not match matrix size");
  // Fixed summation order: v^J = sum_I B[J,I] x^I, I ascending.
  StateMatrix out = StateMatrix::Zero(states.rows(), states.cols());
  const Matrix& w = b.entries();
  for (Eigen::Index j = 0; j < states.cols(); ++j)
    for (Eigen::Index i = 0; i < states.cols(); ++i) {
      const double wji = w(j, i);
      if (wji != 0.0) out.col(j) += wji * states.col(i);
    }
  return out;
}

std::vector<Point> fuse(const std::vector<Point>& states, const WeightMatrix& b) {
  return to_points(fuse(to_state_matrix(states), b));
}

namespace {

Point descend_one(const Point& v, int agent, long k, double alpha, const Problem& prob) {
  const Point g = prob.components[static_cast<std::size_t>(agent)].gradient(v);
  if (!g.allFinite()) {
    std::ostringstream os;
    os << "non-finite gradient at agent " << agent << " ('"
       << prob.components[static_cast<std::size_t>(agent)].id() << "'), iteration " << k;
    throw EngineAbort(os.str(), agent, k);
  }
  // Projecting the step keeps iterates in X exactly, even when the step is
  // algebraically interior.
  return prob.set.project(v - alpha * g);
}

TraceRecord make_record(long k, double alpha, const StateMatrix& x, const Problem& prob,
                        std::optional<double> bound) {
  TraceRecord r;
  r.k = k;
  r.alpha = alpha;
  r.states = x;
  r.mean = x.rowwise().mean();
  r.max_delta = max_delta(x);
  r.max_disagreement = max_disagreement(x);
  r.f_mean = prob.value(r.mean);
  r.bound = bound;
  return r;
}

}  // namespace

std::vector<Point> descend(const std::vector<Point>& fused, long k, const RunConfig& cfg) {
  if (static_cast<int>(fused.size()) != cfg.problem.n_agents())
    throw ConfigError("descend: one fused point per agent required");
  const double alpha = cfg.steps.at(k);
  std::vector<Point> out;
  out.reserve(fused.size());
  for (std::size_t j = 0; j < fused.size(); ++j)
    out.push_back(descend_one(fused[j], static_cast<int>(j), k, alpha, cfg.problem));
  return out;
}

std::vector<std::string> validate_run_config(const RunConfig& cfg) {
  std::vector<std::string> v;
  try {
    cfg.problem.check_structure();
  } catch (const ConfigError& e) {
    v.emplace_back(e.what());
    return v;
  }
  const int s = cfg.problem.n_agents();
  if (cfg.schedule.n_agents() != s)
    v.push_back("schedule has " + std::to_string(cfg.schedule.n_agents()) +
                " agents but the problem has " + std::to_string(s) + " components");
  if (cfg.n_iterations < 0) v.emplace_back("n_iterations must be >= 0");
  if (cfg.decimate < 1) v.emplace_back("decimate must be >= 1");
  if (const auto* e = std::get_if<ExplicitInit>(&cfg.init)) {
    if (static_cast<int>(e->points.size()) != s)
      v.push_back("expected " + std::to_string(s) + " initial iterates, got " +
                  std::to_string(e->points.size()));
    for (std::size_t j = 0; j < e->points.size(); ++j) {
      const Point& p = e->points[j];
      if (p.size() != cfg.problem.dimension) {
        v.push_back("initial iterate " + std::to_string(j) + " has wrong dimension");
      } else if (!cfg.problem.set.contains(p, 1e-12)) {
        v.push_back("initial iterate " + std::to_string(j) + " lies outside the feasible set");
      }
    }
  }
  return v;
}

std::vector<Point> initial_iterates(const RunConfig& cfg) {
  if (const auto* e = std::get_if<ExplicitInit>(&cfg.init)) {
    std::vector<Point> pts;
    // Points within tolerance of the boundary are snapped onto X.
    for (const auto& p : e->points) pts.push_back(cfg.problem.set.project(p));
    return pts;
  }
  const auto seed = std::get<UniformInit>(cfg.init).seed;
  Rng rng(seed, Stream::kInitialIterates);
  std::vector<Point> pts;
  for (int j = 0; j < cfg.problem.n_agents(); ++j)
    pts.push_back(sample_uniform(cfg.problem.set, rng));
  return pts;
}

RunTrace run(const RunConfig& cfg) {
  if (auto violations = validate_run_config(cfg); !violations.empty())
    throw ValidationError(std::move(violations));

  const Problem& prob = cfg.problem;
  const int s = prob.n_agents();
  const int d = prob.dimension;
  const auto init = initial_iterates(cfg);
  StateMatrix x = to_state_matrix(init);

  RunTrace trace;
  RunSummary& sum = trace.summary;
  sum.n_iterations = cfg.n_iterations;
  sum.n_agents = s;
  sum.dimension = d;

  const BoundParams bp = make_bound_params(prob, cfg.schedule, init, std::max(cfg.n_iterations, 1L));
  sum.nu = bp.nu;
  sum.scrambling = bp.nu < 1.0;
  sum.l_bar = bp.l_bar;
  sum.n_bar = bp.n_bar;
  sum.delta0 = bp.delta0;
  if (!sum.scrambling && s > 1)
    sum.warnings.emplace_back(
        "weight schedule is not scrambling at every step (nu = 1); disagreement bound disabled");
  const bool with_bound = cfg.track_bound && sum.scrambling;
  BoundSequence bounds(bp, cfg.steps);
  const auto bound_at = [&](long k) -> std::optional<double> {
    if (!with_bound) return std::nullopt;
    return bounds.corrected(k);
  };

  std::vector<double> grad_bounds;
  for (const auto& c : prob.components) grad_bounds.push_back(c.grad_bound());

  Rng monitor_rng(cfg.monitor_seed, Stream::kMonitor);
  const Point origin_ref = prob.set.project(Point::Zero(d));
  std::vector<Point> refs;
  InvariantStats& inv = trace.invariants;
  inv.max_infeasibility = 0.0;
  for (Eigen::Index j = 0; j < x.cols(); ++j)
    inv.max_infeasibility = std::max(inv.max_infeasibility, prob.set.distance(x.col(j)));

  for (long k = 0; k < cfg.n_iterations; ++k) {
    const double alpha = cfg.steps.at(k);
    if (k % cfg.decimate == 0) trace.records.push_back(make_record(k, alpha, x, prob, bound_at(k)));

    const WeightMatrix b = cfg.schedule.at(k);
    const StateMatrix v = fuse(x, b);

    StateMatrix next(d, s);
    for (int j = 0; j < s; ++j) next.col(j) = descend_one(v.col(j), j, k, alpha, prob);

    if (cfg.monitor_invariants) {
      inv.max_average_drift =
          std::max(inv.max_average_drift, (v.rowwise().mean() - x.rowwise().mean()).norm());
      refs.clear();
      refs.push_back(origin_ref);
      for (int r = 0; r < cfg.monitor_points; ++r) refs.push_back(sample_uniform(prob.set, monitor_rng));
      for (const Point& y : refs) {
        const double fused_sq = (v.colwise() - y).colwise().squaredNorm().sum();
        const double prior_sq = (x.colwise() - y).colwise().squaredNorm().sum();
        inv.max_nonexpansion_excess = std::max(inv.max_nonexpansion_excess, fused_sq - prior_sq);
      }
      for (int j = 0; j < s; ++j) {
        const double step = (next.col(j) - v.col(j)).norm();
        inv.max_displacement_excess =
            std::max(inv.max_displacement_excess, step - alpha * grad_bounds[static_cast<std::size_t>(j)]);
        inv.max_infeasibility = std::max(inv.max_infeasibility, prob.set.distance(next.col(j)));
      }
    }
    ++inv.rounds;
    x = std::move(next);
  }

  const long n = cfg.n_iterations;
  if (trace.records.empty() || trace.records.back().k != n)
    trace.records.push_back(make_record(n, cfg.steps.at(n), x, prob, bound_at(n)));

  const TraceRecord& last = trace.records.back();
  sum.final_max_disagreement = last.max_disagreement;
  sum.final_max_delta = last.max_delta;
  sum.final_f_mean = last.f_mean;
  sum.final_mean = last.mean;
  return trace;
}

}  // namespace distopt
