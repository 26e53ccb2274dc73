#pragma once

// Communication graphs, doubly stochastic weight matrices and time-varying
// weight schedules.
//
// Contraction coefficient. For a stochastic B, the difference of two fused
// rows is v^J - v^I = sum_L (B[J,L] - B[I,L]) x^L. The coefficients sum to
// zero, so their positive parts sum to half their l1 norm; splitting the sum
// into positive and negative parts writes the difference as a convex
// combination of pairwise differences x^P - x^Q scaled by that mass. The
// per-matrix contraction factor is therefore
//
//   nu(B) = max_{I,J} 1/2 ||B[I,:] - B[J,:]||_1
//         = 1 - min_{I,J} sum_L min(B[I,L], B[J,L])
//
// (Dobrushin's ergodicity coefficient), and nu(B) < 1 exactly when every pair
// of rows shares a positive column, i.e. B is scrambling.

#include "distopt/common.hpp"

#include <array>
#include <cstdint>
#include <set>
#include <utility>
#include <variant>
#include <vector>

namespace distopt {

/// Undirected communication graph on agents 0..n-1. Self-loops are not
/// stored; self-weight lives on the matrix diagonal.
class Graph {
 public:
  explicit Graph(int n_agents = 0);
  Graph(int n_agents, const std::vector<std::pair<int, int>>& edges);

  static Graph complete(int n);
  static Graph path(int n);
  static Graph ring(int n);
  static Graph star(int n);

  int n_agents() const { return n_; }
  void add_edge(int i, int j);
  bool has_edge(int i, int j) const;
  const std::set<std::pair<int, int>>& edges() const { return edges_; }
  std::vector<int> neighbors(int i) const;
  int degree(int i) const;
  /// Union of two graphs on the same agent set.
  Graph merged(const Graph& other) const;

  bool operator==(const Graph&) const = default;

 private:
  int n_;
  std::set<std::pair<int, int>> edges_;  // stored with first < second
};

bool is_connected(const Graph& g);
/// Connected components as sorted agent lists.
std::vector<std::vector<int>> connected_components(const Graph& g);

/// Doubly stochastic S x S matrix with every nonzero entry >= eta.
class WeightMatrix {
 public:
  /// Validates nonnegativity, row/column sums within `tol` of 1 and the
  /// eta floor on nonzero entries. Throws ConfigError.
  static WeightMatrix from_entries(Matrix entries, double eta = kDefaultEta,
                                   double tol = 1e-12);

  static constexpr double kDefaultEta = 1e-3;

  const Matrix& entries() const { return entries_; }
  double eta() const { return eta_; }
  int size() const { return static_cast<int>(entries_.rows()); }
  double operator()(int i, int j) const { return entries_(i, j); }
  /// Undirected graph with I~J iff B[I,J] > 0 or B[J,I] > 0, I != J.
  Graph support_graph() const;

 private:
  WeightMatrix(Matrix entries, double eta) : entries_(std::move(entries)), eta_(eta) {}
  Matrix entries_;
  double eta_;
};

/// Metropolis-Hastings weights: B[I,J] = 1/(1 + max(deg I, deg J)) on links,
/// diagonal takes the remainder.
WeightMatrix build_metropolis(const Graph& g, double eta_floor = WeightMatrix::kDefaultEta);

/// Directed two-out-link pattern: row I receives from out_links[I][0] and
/// out_links[I][1].
struct KappaPattern {
  std::vector<std::array<int, 2>> out_links;
  int n_agents() const { return static_cast<int>(out_links.size()); }
};

/// Support pattern of the six-virtual-agent example matrix.
KappaPattern six_agent_kappa_pattern();

/// Diagonal 1 - 2 kappa, kappa on each row's two pattern links.
WeightMatrix build_kappa_matrix(const KappaPattern& pattern, double kappa);

bool is_doubly_stochastic(const Matrix& m, double tol = 1e-12);
bool is_scrambling(const WeightMatrix& m);
bool is_scrambling(const Matrix& m);
double contraction_coefficient(const WeightMatrix& m);
double contraction_coefficient(const Matrix& m);

struct StaticSchedule {
  WeightMatrix matrix;
};

struct CyclicSchedule {
  std::vector<WeightMatrix> matrices;
};

struct RandomSchedule {
  int n_agents = 0;
  double edge_probability = 0.5;
  std::uint64_t seed = 0;
  double eta = WeightMatrix::kDefaultEta;
};

/// Deterministic map k -> B_k.
class WeightSchedule {
 public:
  using Variant = std::variant<StaticSchedule, CyclicSchedule, RandomSchedule>;

  static WeightSchedule fixed(WeightMatrix m);
  static WeightSchedule cyclic(std::vector<WeightMatrix> ms);
  static WeightSchedule random(int n_agents, double edge_probability,
                               std::uint64_t seed,
                               double eta = WeightMatrix::kDefaultEta);

  int n_agents() const;
  WeightMatrix at(long k) const;
  /// Graph used by the random variant at step k (connected by construction).
  Graph graph_at(long k) const;
  const Variant& variant() const { return variant_; }
  /// Number of distinct matrices before the schedule repeats; 0 if aperiodic.
  long period() const;

 private:
  explicit WeightSchedule(Variant v) : variant_(std::move(v)) {}
  Variant variant_;
};

/// Every window [t, t+Q) with t + Q <= horizon has a connected union of
/// support graphs.
bool is_q_connected(const WeightSchedule& s, int q, long horizon);

/// max over k < horizon of contraction_coefficient(B_k). For periodic
/// schedules only one period is inspected.
double schedule_contraction(const WeightSchedule& s, long horizon);

}  // namespace distopt
