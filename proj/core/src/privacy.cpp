#include "distopt/privacy.hpp"

#include "distopt/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace distopt {

int PartitionPlan::n_virtual() const {
  int n = 0;
  for (int m : pieces) n += m;
  return n;
}

int PartitionPlan::virtual_index(int owner, int piece) const {
  int base = 0;
  for (int i = 0; i < owner; ++i) base += pieces[static_cast<std::size_t>(i)];
  return base + piece;
}

std::vector<int> PartitionPlan::owners() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < pieces.size(); ++i)
    for (int j = 0; j < pieces[i]; ++j) out.push_back(static_cast<int>(i));
  return out;
}

PartitionPlan default_partition_plan(const Graph& g, const std::vector<int>& pieces) {
  const int n = g.n_agents();
  if (static_cast<int>(pieces.size()) != n)
    throw ConfigError("partition plan: one piece count per agent required");
  PartitionPlan plan;
  plan.pieces = pieces;
  plan.assigned.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    if (pieces[static_cast<std::size_t>(i)] < 1)
      throw ConfigError("partition plan: piece counts must be >= 1");
    const auto nb = g.neighbors(i);
    for (int p = 0; p < pieces[static_cast<std::size_t>(i)]; ++p)
      plan.assigned[static_cast<std::size_t>(i)].push_back(
          p < static_cast<int>(nb.size()) ? nb[static_cast<std::size_t>(p)] : -1);
  }
  const auto piece_for = [&](int owner, int neighbor) {
    const auto nb = g.neighbors(owner);
    const auto pos = std::find(nb.begin(), nb.end(), neighbor) - nb.begin();
    return static_cast<int>(pos) % pieces[static_cast<std::size_t>(owner)];
  };
  for (auto [i, j] : g.edges())
    plan.links.emplace_back(plan.virtual_index(i, piece_for(i, j)),
                            plan.virtual_index(j, piece_for(j, i)));
  for (int i = 0; i < n; ++i)
    for (int p = 0; p + 1 < pieces[static_cast<std::size_t>(i)]; ++p)
      plan.links.emplace_back(plan.virtual_index(i, p), plan.virtual_index(i, p + 1));
  return plan;
}

PartitionPlan default_partition_plan(const Graph& g, int pieces_per_agent) {
  return default_partition_plan(g, std::vector<int>(static_cast<std::size_t>(g.n_agents()),
                                                    pieces_per_agent));
}

PartitionPlan six_agent_partition_plan() {
  PartitionPlan plan;
  plan.pieces = {2, 2, 2};
  plan.assigned = {{1, 2}, {0, 2}, {0, 1}};
  const auto pattern = six_agent_kappa_pattern();
  Graph support(pattern.n_agents());
  for (int i = 0; i < pattern.n_agents(); ++i)
    for (int j : pattern.out_links[static_cast<std::size_t>(i)]) support.add_edge(i, j);
  plan.links.assign(support.edges().begin(), support.edges().end());
  return plan;
}

std::vector<std::string> check_partition_plan(const Graph& g, const PartitionPlan& plan) {
  std::vector<std::string> v;
  const int n = g.n_agents();
  if (static_cast<int>(plan.pieces.size()) != n) {
    v.push_back("plan lists " + std::to_string(plan.pieces.size()) + " agents, graph has " +
                std::to_string(n));
    return v;
  }
  for (int i = 0; i < n; ++i)
    if (plan.pieces[static_cast<std::size_t>(i)] < 1)
      v.push_back("agent " + std::to_string(i) + " must have at least one piece");
  if (!v.empty()) return v;
  if (!plan.assigned.empty()) {
    if (static_cast<int>(plan.assigned.size()) != n) {
      v.emplace_back("plan.assigned must list every agent");
    } else {
      for (int i = 0; i < n; ++i) {
        const auto& a = plan.assigned[static_cast<std::size_t>(i)];
        if (static_cast<int>(a.size()) != plan.pieces[static_cast<std::size_t>(i)])
          v.push_back("agent " + std::to_string(i) + ": one assigned neighbor per piece required");
        for (int nb : a)
          if (nb != -1 && (nb < 0 || nb >= n || !g.has_edge(i, nb)))
            v.push_back("agent " + std::to_string(i) + ": piece assigned to non-neighbor " +
                        std::to_string(nb));
      }
    }
  }
  const auto owners = plan.owners();
  const int nv = plan.n_virtual();
  for (auto [a, b] : plan.links) {
    if (a < 0 || b < 0 || a >= nv || b >= nv || a == b) {
      v.push_back("virtual link (" + std::to_string(a) + ", " + std::to_string(b) +
                  ") is out of range or a self-loop");
      continue;
    }
    const int oa = owners[static_cast<std::size_t>(a)];
    const int ob = owners[static_cast<std::size_t>(b)];
    if (oa != ob && !g.has_edge(oa, ob))
      v.push_back("virtual link (" + std::to_string(a) + ", " + std::to_string(b) +
                  ") joins agents " + std::to_string(oa) + " and " + std::to_string(ob) +
                  " which share no real link");
  }
  return v;
}

Graph virtual_topology(const Graph& g, const PartitionPlan& plan) {
  if (auto v = check_partition_plan(g, plan); !v.empty()) throw ValidationError(std::move(v));
  Graph vg(plan.n_virtual(), plan.links);
  const auto comps = connected_components(vg);
  if (comps.size() > 1) {
    std::ostringstream os;
    os << "virtual topology is disconnected; virtual agents outside the component of agent 0:";
    for (std::size_t c = 1; c < comps.size(); ++c)
      for (int a : comps[c]) os << ' ' << a;
    throw ConfigError(os.str());
  }
  return vg;
}

QuadraticForm random_quadratic(int dimension, double scale, bool diagonal, Rng& rng) {
  QuadraticForm q{Matrix::Zero(dimension, dimension), Point::Zero(dimension), 0.0};
  if (scale == 0.0) return q;
  Matrix m = Matrix::Zero(dimension, dimension);
  for (int i = 0; i < dimension; ++i)
    for (int j = i; j < dimension; ++j) {
      if (diagonal && i != j) continue;
      m(i, j) = m(j, i) = rng.normal();
    }
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  const double norm = es.eigenvalues().cwiseAbs().maxCoeff();
  if (norm > 0.0) q.a = (scale / norm) * m;
  for (int i = 0; i < dimension; ++i) q.b[i] = rng.uniform(-scale, scale);
  q.c = rng.uniform(-scale, scale);
  return q;
}

namespace {

ComponentFunction with_analytic_bounds(const ComponentFunction& c, const FeasibleSet& set) {
  const auto b = analytic_bounds(c, set);
  return c.with_bounds(b.grad_bound, b.lipschitz);
}

void certify_or_throw(const Problem& original, TransformedProblem& t, std::uint64_t seed) {
  t.certificate = certify_equivalence(original, t.problem, kCertificationPoints, seed);
  if (!t.certificate.pass) {
    std::ostringstream os;
    os << t.transform << ": transformed sum differs from the original (value residual "
       << t.certificate.value_residual << ", gradient residual "
       << t.certificate.gradient_residual << ")";
    throw ConfigError(os.str());
  }
}

}  // namespace

TransformedProblem partition_problem(const Problem& prob, const Graph& g,
                                     const PartitionPlan& plan, const PartitionOptions& opts) {
  prob.check_structure();
  if (g.n_agents() != prob.n_agents())
    throw ConfigError("partition: graph size does not match the number of components");
  if (!(opts.perturbation_scale >= 0.0)) throw ConfigError("partition: scale must be >= 0");
  Graph vg = virtual_topology(g, plan);

  Rng rng(opts.seed, Stream::kPartition);
  std::vector<ComponentFunction> pieces;
  std::vector<int> provenance;
  for (int i = 0; i < prob.n_agents(); ++i) {
    const auto& f = prob.components[static_cast<std::size_t>(i)];
    const int m = plan.pieces[static_cast<std::size_t>(i)];
    const ComponentFunction share = f.scaled(1.0 / m);
    const bool diagonal = f.family() == Family::kPolynomialSeparable;
    std::vector<QuadraticForm> q;
    if (opts.perturbation_scale > 0.0 && m > 1) {
      QuadraticForm rest{Matrix::Zero(prob.dimension, prob.dimension), Point::Zero(prob.dimension),
                         0.0};
      for (int j = 0; j + 1 < m; ++j) {
        q.push_back(random_quadratic(prob.dimension, opts.perturbation_scale, diagonal, rng));
        rest.a -= q.back().a;
        rest.b -= q.back().b;
        rest.c -= q.back().c;
      }
      q.push_back(std::move(rest));
    }
    for (int j = 0; j < m; ++j) {
      ComponentFunction piece = (q.empty() ? share : share.plus(q[static_cast<std::size_t>(j)]))
                                    .with_id(f.id() + "/" + std::to_string(j));
      if (!q.empty()) piece = with_analytic_bounds(piece, prob.set);
      if (piece.grad_bound() > opts.gradient_bound_cap) {
        std::ostringstream os;
        os << "partition: piece '" << piece.id() << "' has gradient bound "
           << piece.grad_bound() << " above the cap " << opts.gradient_bound_cap
           << "; use a smaller perturbation_scale";
        throw ConfigError(os.str());
      }
      pieces.push_back(std::move(piece));
      provenance.push_back(i);
    }
  }

  TransformedProblem t{Problem{prob.dimension, std::move(pieces), prob.set}, std::move(vg),
                       std::move(provenance), "partition", {}};
  certify_or_throw(prob, t, opts.seed);
  return t;
}

TransformedProblem apply_shared_functions(const Problem& prob, const Graph& g,
                                          const std::vector<SharedFunction>& shared) {
  prob.check_structure();
  const int s = prob.n_agents();
  if (g.n_agents() != s) throw ConfigError("sharing: graph size does not match the problem");
  std::vector<ComponentFunction> out = prob.components;
  std::vector<bool> touched(static_cast<std::size_t>(s), false);
  for (const auto& sf : shared) {
    if (sf.from < 0 || sf.to < 0 || sf.from >= s || sf.to >= s || !g.has_edge(sf.from, sf.to))
      throw ConfigError("sharing: R_{" + std::to_string(sf.from) + "," + std::to_string(sf.to) +
                        "} is not on a real link");
    const QuadraticForm neg{-sf.r.a, -sf.r.b, -sf.r.c};
    out[static_cast<std::size_t>(sf.to)] = out[static_cast<std::size_t>(sf.to)].plus(sf.r);
    out[static_cast<std::size_t>(sf.from)] = out[static_cast<std::size_t>(sf.from)].plus(neg);
    touched[static_cast<std::size_t>(sf.to)] = touched[static_cast<std::size_t>(sf.from)] = true;
  }
  for (int i = 0; i < s; ++i)
    if (touched[static_cast<std::size_t>(i)])
      out[static_cast<std::size_t>(i)] =
          with_analytic_bounds(out[static_cast<std::size_t>(i)], prob.set);
  std::vector<int> provenance(static_cast<std::size_t>(s));
  for (int i = 0; i < s; ++i) provenance[static_cast<std::size_t>(i)] = i;
  return TransformedProblem{Problem{prob.dimension, std::move(out), prob.set}, g,
                            std::move(provenance), "random_sharing", {}};
}

std::vector<SharedFunction> draw_shared_functions(const Problem& prob, const Graph& g,
                                                  double scale, std::uint64_t seed) {
  if (!(scale >= 0.0)) throw ConfigError("sharing: scale must be >= 0");
  std::vector<SharedFunction> shared;
  if (scale == 0.0) return shared;
  Rng rng(seed, Stream::kSharing);
  for (auto [i, j] : g.edges()) {
    const bool diagonal =
        prob.components[static_cast<std::size_t>(i)].family() == Family::kPolynomialSeparable ||
        prob.components[static_cast<std::size_t>(j)].family() == Family::kPolynomialSeparable;
    shared.push_back({i, j, random_quadratic(prob.dimension, scale, diagonal, rng)});
    shared.push_back({j, i, random_quadratic(prob.dimension, scale, diagonal, rng)});
  }
  return shared;
}

TransformedProblem random_function_sharing(const Problem& prob, const Graph& g, double scale,
                                           std::uint64_t seed) {
  if (!is_connected(g)) throw ConfigError("sharing: communication graph must be connected");
  auto t = apply_shared_functions(prob, g, draw_shared_functions(prob, g, scale, seed));
  certify_or_throw(prob, t, seed);
  return t;
}

EquivalenceReport certify_equivalence(const Problem& original, const Problem& transformed,
                                      int n_points, std::uint64_t seed) {
  if (original.dimension != transformed.dimension)
    throw ConfigError("certify_equivalence: dimensions differ");
  EquivalenceReport r;
  r.pass = true;
  Rng rng(seed, Stream::kSampling, 7);
  for (int i = 0; i < n_points; ++i) {
    const Point x = sample_uniform(original.set, rng);
    const double fo = original.value(x);
    const double fv = std::abs(transformed.value(x) - fo);
    const double gv = (transformed.gradient(x) - original.gradient(x)).norm();
    r.value_residual = std::max(r.value_residual, fv);
    r.gradient_residual = std::max(r.gradient_residual, gv);
    const double tol = kEquivalenceTolerance * (1.0 + std::abs(fo));
    if (fv > tol || gv > tol) r.pass = false;
    ++r.n_points;
  }
  return r;
}

EquivalenceReport certify_equivalence(const Problem& original,
                                      const TransformedProblem& transformed, int n_points,
                                      std::uint64_t seed) {
  return certify_equivalence(original, transformed.problem, n_points, seed);
}

}  // namespace distopt
