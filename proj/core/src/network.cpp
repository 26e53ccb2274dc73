#include "distopt/network.hpp"

#include "distopt/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <sstream>

namespace distopt {

Graph::Graph(int n_agents) : n_(n_agents) {
  if (n_agents < 0) throw ConfigError("graph: agent count must be >= 0");
}

Graph::Graph(int n_agents, const std::vector<std::pair<int, int>>& edges)
    : Graph(n_agents) {
  for (auto [i, j] : edges) add_edge(i, j);
}

Graph Graph::complete(int n) {
  Graph g(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) g.add_edge(i, j);
  return g;
}

Graph Graph::path(int n) {
  Graph g(n);
  for (int i = 0; i + 1 < n; ++i) g.add_edge(i, i + 1);
  return g;
}

Graph Graph::ring(int n) {
  Graph g = path(n);
  if (n > 2) g.add_edge(n - 1, 0);
  return g;
}

Graph Graph::star(int n) {
  Graph g(n);
  for (int i = 1; i < n; ++i) g.add_edge(0, i);
  return g;
}

void Graph::add_edge(int i, int j) {
  if (i < 0 || j < 0 || i >= n_ || j >= n_) {
    std::ostringstream os;
    os << "graph: edge (" << i << ", " << j << ") out of range for " << n_ << " agents";
    throw ConfigError(os.str());
  }
  if (i == j) throw ConfigError("graph: self-loops are not allowed");
  edges_.insert({std::min(i, j), std::max(i, j)});
}

bool Graph::has_edge(int i, int j) const {
  return edges_.contains({std::min(i, j), std::max(i, j)});
}

std::vector<int> Graph::neighbors(int i) const {
  std::vector<int> out;
  for (auto [a, b] : edges_) {
    if (a == i) out.push_back(b);
    if (b == i) out.push_back(a);
  }
  std::sort(out.begin(), out.end());
  return out;
}

int Graph::degree(int i) const {
  return static_cast<int>(std::count_if(edges_.begin(), edges_.end(), [i](const auto& e) {
    return e.first == i || e.second == i;
  }));
}

Graph Graph::merged(const Graph& other) const {
  if (other.n_ != n_) throw ConfigError("graph: cannot merge graphs of different size");
  Graph g = *this;
  g.edges_.insert(other.edges_.begin(), other.edges_.end());
  return g;
}

std::vector<std::vector<int>> connected_components(const Graph& g) {
  const int n = g.n_agents();
  std::vector<std::vector<int>> adj(n);
  for (auto [a, b] : g.edges()) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<int> seen(n, 0);
  std::vector<std::vector<int>> comps;
  for (int s = 0; s < n; ++s) {
    if (seen[s]) continue;
    std::vector<int> comp;
    std::queue<int> frontier;
    frontier.push(s);
    seen[s] = 1;
    while (!frontier.empty()) {
      const int u = frontier.front();
      frontier.pop();
      comp.push_back(u);
      for (int v : adj[u])
        if (!seen[v]) {
          seen[v] = 1;
          frontier.push(v);
        }
    }
    std::sort(comp.begin(), comp.end());
    comps.push_back(std::move(comp));
  }
  return comps;
}

bool is_connected(const Graph& g) { return connected_components(g).size() <= 1; }

// ---------------------------------------------------------------------------

WeightMatrix WeightMatrix::from_entries(Matrix entries, double eta, double tol) {
  if (entries.rows() != entries.cols() || entries.rows() < 1)
    throw ConfigError("weight matrix: must be square and non-empty");
  if (!(eta > 0.0)) throw ConfigError("weight matrix: eta must be > 0");
  if (!entries.allFinite()) throw ConfigError("weight matrix: non-finite entries");
  if (!is_doubly_stochastic(entries, tol))
    throw ConfigError("weight matrix: not doubly stochastic (nonnegative, row and column sums 1)");
  for (Eigen::Index i = 0; i < entries.rows(); ++i)
    for (Eigen::Index j = 0; j < entries.cols(); ++j)
      if (entries(i, j) > 0.0 && entries(i, j) < eta) {
        std::ostringstream os;
        os << "weight matrix: entry (" << i << ", " << j << ") = " << entries(i, j)
           << " is below the floor eta = " << eta;
        throw ConfigError(os.str());
      }
  return WeightMatrix(std::move(entries), eta);
}

Graph WeightMatrix::support_graph() const {
  Graph g(size());
  for (int i = 0; i < size(); ++i)
    for (int j = 0; j < size(); ++j)
      if (i != j && entries_(i, j) > 0.0) g.add_edge(i, j);
  return g;
}

WeightMatrix build_metropolis(const Graph& g, double eta_floor) {
  const int n = g.n_agents();
  if (n < 1) throw ConfigError("metropolis: graph must have at least one agent");
  if (!(eta_floor > 0.0 && eta_floor <= 1.0 / n))
    throw ConfigError("metropolis: eta_floor must be in (0, 1/S]");
  std::vector<int> deg(n);
  for (int i = 0; i < n; ++i) deg[i] = g.degree(i);
  Matrix b = Matrix::Zero(n, n);
  for (auto [i, j] : g.edges()) {
    const double w = 1.0 / (1.0 + std::max(deg[i], deg[j]));
    b(i, j) = w;
    b(j, i) = w;
  }
  for (int i = 0; i < n; ++i) b(i, i) = 1.0 - (b.row(i).sum() - b(i, i));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (b(i, j) != 0.0 && b(i, j) < eta_floor) {
        std::ostringstream os;
        os << "metropolis: entry (" << i << ", " << j << ") = " << b(i, j)
           << " falls below eta_floor " << eta_floor;
        throw ConfigError(os.str());
      }
  return WeightMatrix::from_entries(std::move(b), eta_floor);
}

KappaPattern six_agent_kappa_pattern() {
  // Rows of the example matrix, 0-based: row I lists its two kappa columns.
  return KappaPattern{{{{2, 5}}, {{2, 5}}, {{1, 4}}, {{1, 4}}, {{0, 3}}, {{0, 3}}}};
}

WeightMatrix build_kappa_matrix(const KappaPattern& pattern, double kappa) {
  if (!(kappa > 0.0 && kappa <= 0.5)) throw ConfigError("kappa matrix: kappa must be in (0, 1/2]");
  const int n = pattern.n_agents();
  if (n < 3) throw ConfigError("kappa matrix: pattern needs at least 3 agents");
  Matrix b = Matrix::Zero(n, n);
  std::vector<int> in_degree(n, 0);
  for (int i = 0; i < n; ++i) {
    const auto& links = pattern.out_links[i];
    if (links[0] == links[1] || links[0] == i || links[1] == i)
      throw ConfigError("kappa matrix: row " + std::to_string(i) +
                        " must have exactly two distinct off-diagonal links");
    for (int j : links) {
      if (j < 0 || j >= n) throw ConfigError("kappa matrix: link target out of range");
      b(i, j) = kappa;
      ++in_degree[j];
    }
    b(i, i) = 1.0 - 2.0 * kappa;
  }
  for (int j = 0; j < n; ++j)
    if (in_degree[j] != 2)
      throw ConfigError("kappa matrix: column " + std::to_string(j) +
                        " must receive exactly two links to stay doubly stochastic");
  const double diag = 1.0 - 2.0 * kappa;
  return WeightMatrix::from_entries(std::move(b), diag > 0.0 ? std::min(kappa, diag) : kappa);
}

bool is_doubly_stochastic(const Matrix& m, double tol) {
  if (m.rows() != m.cols() || m.rows() == 0) return false;
  if (!m.allFinite() || (m.array() < 0.0).any()) return false;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (std::abs(m.row(i).sum() - 1.0) > tol) return false;
    if (std::abs(m.col(i).sum() - 1.0) > tol) return false;
  }
  return true;
}

bool is_scrambling(const Matrix& m) {
  const Eigen::Index n = m.rows();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      bool shared = false;
      for (Eigen::Index l = 0; l < n && !shared; ++l)
        shared = m(i, l) > 0.0 && m(j, l) > 0.0;
      if (!shared) return false;
    }
  return true;
}

bool is_scrambling(const WeightMatrix& m) { return is_scrambling(m.entries()); }

double contraction_coefficient(const Matrix& m) {
  const Eigen::Index n = m.rows();
  double nu = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      double overlap = 0.0;
      for (Eigen::Index l = 0; l < n; ++l) overlap += std::min(m(i, l), m(j, l));
      // A pair with no shared positive column has nu exactly 1; avoid
      // reporting 1 - (1 - eps) for it.
      bool shared = false;
      for (Eigen::Index l = 0; l < n && !shared; ++l) shared = m(i, l) > 0.0 && m(j, l) > 0.0;
      const double pair_nu = shared ? std::clamp(1.0 - overlap, 0.0, 1.0) : 1.0;
      nu = std::max(nu, pair_nu);
    }
  return nu;
}

double contraction_coefficient(const WeightMatrix& m) {
  return contraction_coefficient(m.entries());
}

// ---------------------------------------------------------------------------

WeightSchedule WeightSchedule::fixed(WeightMatrix m) {
  return WeightSchedule(StaticSchedule{std::move(m)});
}

WeightSchedule WeightSchedule::cyclic(std::vector<WeightMatrix> ms) {
  if (ms.empty()) throw ConfigError("cyclic schedule: at least one matrix required");
  for (const auto& m : ms)
    if (m.size() != ms.front().size())
      throw ConfigError("cyclic schedule: all matrices must have the same size");
  return WeightSchedule(CyclicSchedule{std::move(ms)});
}

WeightSchedule WeightSchedule::random(int n_agents, double edge_probability,
                                      std::uint64_t seed, double eta) {
  if (n_agents < 1) throw ConfigError("random schedule: n_agents must be >= 1");
  if (!(edge_probability >= 0.0 && edge_probability <= 1.0))
    throw ConfigError("random schedule: edge_probability must be in [0, 1]");
  if (!(eta > 0.0 && eta <= 1.0 / n_agents))
    throw ConfigError("random schedule: eta must be in (0, 1/S]");
  return WeightSchedule(RandomSchedule{n_agents, edge_probability, seed, eta});
}

int WeightSchedule::n_agents() const {
  return std::visit(
      [](const auto& s) -> int {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, StaticSchedule>) return s.matrix.size();
        else if constexpr (std::is_same_v<T, CyclicSchedule>) return s.matrices.front().size();
        else return s.n_agents;
      },
      variant_);
}

Graph WeightSchedule::graph_at(long k) const {
  if (const auto* r = std::get_if<RandomSchedule>(&variant_)) {
    Rng rng(r->seed, Stream::kSchedule, static_cast<std::uint64_t>(k));
    const int n = r->n_agents;
    Graph g(n);
    // Random spanning tree: attach each agent of a random permutation to a
    // uniformly chosen earlier one.
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    for (int i = n - 1; i > 0; --i)
      std::swap(order[i], order[rng.below(static_cast<std::uint64_t>(i) + 1)]);
    for (int i = 1; i < n; ++i) g.add_edge(order[i], order[rng.below(i)]);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (rng.uniform() < r->edge_probability) g.add_edge(i, j);
    return g;
  }
  return at(k).support_graph();
}

WeightMatrix WeightSchedule::at(long k) const {
  if (k < 0) throw ConfigError("schedule: k must be >= 0");
  return std::visit(
      [&](const auto& s) -> WeightMatrix {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, StaticSchedule>) return s.matrix;
        else if constexpr (std::is_same_v<T, CyclicSchedule>)
          return s.matrices[static_cast<std::size_t>(k) % s.matrices.size()];
        else return build_metropolis(graph_at(k), s.eta);
      },
      variant_);
}

long WeightSchedule::period() const {
  return std::visit(
      [](const auto& s) -> long {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, StaticSchedule>) return 1;
        else if constexpr (std::is_same_v<T, CyclicSchedule>) return static_cast<long>(s.matrices.size());
        else return 0;
      },
      variant_);
}

bool is_q_connected(const WeightSchedule& s, int q, long horizon) {
  if (q < 1) throw ConfigError("is_q_connected: Q must be >= 1");
  if (horizon < q) throw ConfigError("is_q_connected: horizon must be >= Q");
  // A periodic schedule repeats its windows after one period.
  const long p = s.period();
  const long last_start = p > 0 ? std::min(horizon - q, p - 1) : horizon - q;
  std::vector<Graph> graphs;
  const long needed = last_start + q;
  graphs.reserve(static_cast<std::size_t>(needed));
  for (long k = 0; k < needed; ++k) graphs.push_back(s.graph_at(k));
  for (long t = 0; t <= last_start; ++t) {
    Graph u(s.n_agents());
    for (long k = t; k < t + q; ++k) u = u.merged(graphs[static_cast<std::size_t>(k)]);
    if (!is_connected(u)) return false;
  }
  return true;
}

double schedule_contraction(const WeightSchedule& s, long horizon) {
  const long p = s.period();
  const long n = p > 0 ? std::min(std::max(horizon, 1L), p) : std::max(horizon, 1L);
  double nu = 0.0;
  for (long k = 0; k < n; ++k) nu = std::max(nu, contraction_coefficient(s.at(k)));
  return nu;
}

}  // namespace distopt
