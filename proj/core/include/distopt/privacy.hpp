#pragma once

// Objective-hiding transforms that leave the global sum unchanged:
//
//  * function partitioning: agent i splits f_i into m_i additive pieces,
//    each run by its own virtual agent;
//  * random function sharing: each linked ordered pair (I, J) exchanges a
//    random function R_{I,J}, added to the receiver and subtracted from the
//    sender.
//
// Both produce an ordinary Problem; the engine is unaware of ownership.

#include "distopt/common.hpp"
#include "distopt/network.hpp"
#include "distopt/problem.hpp"
#include "distopt/rng.hpp"

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace distopt {

struct PartitionPlan {
  /// m_i >= 1 for each real agent.
  std::vector<int> pieces;
  /// Real neighbor each piece is dedicated to, or -1.
  std::vector<std::vector<int>> assigned;
  /// Undirected links between virtual agents (owner-major indices).
  std::vector<std::pair<int, int>> links;

  int n_virtual() const;
  int virtual_index(int owner, int piece) const;
  std::vector<int> owners() const;
};

/// One piece per neighbor (round-robin when m_i differs from the degree),
/// each real link (i, j) joins i's piece for j with j's piece for i, and an
/// owner's pieces are chained internally.
PartitionPlan default_partition_plan(const Graph& g, const std::vector<int>& pieces);
PartitionPlan default_partition_plan(const Graph& g, int pieces_per_agent);

/// Three real agents on a triangle, two pieces each, linked like the
/// support of six_agent_kappa_pattern(). Virtual order: f_{0,1}, f_{0,2},
/// f_{1,0}, f_{1,2}, f_{2,0}, f_{2,1}.
PartitionPlan six_agent_partition_plan();

/// Structural checks of a plan against the real graph. Returns violations.
std::vector<std::string> check_partition_plan(const Graph& g, const PartitionPlan& plan);

/// Virtual graph from the plan; every link must join same-owner pieces or
/// pieces whose owners are linked in `g`. Throws ConfigError naming the
/// isolated virtual agents when the result is disconnected.
Graph virtual_topology(const Graph& g, const PartitionPlan& plan);

struct EquivalenceReport {
  int n_points = 0;
  double value_residual = 0.0;
  double gradient_residual = 0.0;
  bool pass = false;
};

struct TransformedProblem {
  Problem problem;
  Graph graph;
  /// Owning real agent of each (virtual) component.
  std::vector<int> provenance;
  std::string transform;
  EquivalenceReport certificate;
};

constexpr int kCertificationPoints = 1000;
constexpr double kEquivalenceTolerance = 1e-9;

struct PartitionOptions {
  double perturbation_scale = 0.0;
  std::uint64_t seed = 0;
  /// Pieces whose recomputed gradient bound exceeds this are rejected.
  double gradient_bound_cap = std::numeric_limits<double>::infinity();
};

/// f_{i,j} = f_i / m_i + q_{i,j}, sum_j q_{i,j} = 0 by construction.
TransformedProblem partition_problem(const Problem& prob, const Graph& g,
                                     const PartitionPlan& plan, const PartitionOptions& opts);

/// R_{from,to}: added to `to`, subtracted from `from`.
struct SharedFunction {
  int from = 0;
  int to = 0;
  QuadraticForm r;
};

TransformedProblem apply_shared_functions(const Problem& prob, const Graph& g,
                                          const std::vector<SharedFunction>& shared);

/// Draws one R per ordered linked pair with spectral magnitude `scale`.
std::vector<SharedFunction> draw_shared_functions(const Problem& prob, const Graph& g,
                                                  double scale, std::uint64_t seed);

TransformedProblem random_function_sharing(const Problem& prob, const Graph& g, double scale,
                                           std::uint64_t seed);

/// Max over sampled x in X of |sum new - sum old| and the gradient analogue;
/// pass iff both stay below 1e-9 (1 + |f(x)|) at every sample.
EquivalenceReport certify_equivalence(const Problem& original, const Problem& transformed,
                                      int n_points, std::uint64_t seed);
EquivalenceReport certify_equivalence(const Problem& original,
                                      const TransformedProblem& transformed, int n_points,
                                      std::uint64_t seed);

/// Random symmetric indefinite quadratic with ||A||_2 = scale and b, c
/// uniform in [-scale, scale]. Diagonal A when `diagonal` is set.
QuadraticForm random_quadratic(int dimension, double scale, bool diagonal, Rng& rng);

}  // namespace distopt
