#include "svcnet/centrality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <stack>

#include <Eigen/Dense>

#include "svcnet/log.hpp"

namespace svcnet {
namespace {

constexpr std::size_t kUnreached = std::numeric_limits<std::size_t>::max();

// BFS distances from `root`, following out-edges (forward) or in-edges.
std::vector<std::size_t> bfs_distances(const ServiceDependencyGraph& g, NodeIndex root,
                                       bool forward) {
  std::vector<std::size_t> dist(g.node_count(), kUnreached);
  std::queue<NodeIndex> frontier;
  dist[root] = 0;
  frontier.push(root);
  while (!frontier.empty()) {
    NodeIndex v = frontier.front();
    frontier.pop();
    auto next = forward ? g.successors(v) : g.predecessors(v);
    for (NodeIndex w : next) {
      if (dist[w] == kUnreached) {
        dist[w] = dist[v] + 1;
        frontier.push(w);
      }
    }
  }
  return dist;
}

Eigen::MatrixXd undirected_adjacency(const ServiceDependencyGraph& g) {
  const auto n = static_cast<Eigen::Index>(g.node_count());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (NodeIndex v = 0; v < g.node_count(); ++v) {
    for (NodeIndex w : g.successors(v)) {
      a(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(w)) = 1.0;
      a(static_cast<Eigen::Index>(w), static_cast<Eigen::Index>(v)) = 1.0;
    }
  }
  return a;
}

Eigen::MatrixXd undirected_laplacian(const ServiceDependencyGraph& g) {
  Eigen::MatrixXd a = undirected_adjacency(g);
  Eigen::MatrixXd l = -a;
  l.diagonal() = a.rowwise().sum();
  return l;
}

void require_connected(const ServiceDependencyGraph& g) {
  if (!is_weakly_connected(g)) throw CentralityError("requires connected graph");
}

double pair_normalizer(std::size_t n) {
  return static_cast<double>(n - 1) * static_cast<double>(n - 2);
}

bool degenerate_for_pairs(const ServiceDependencyGraph& g, Scores& scores,
                          std::string_view metric) {
  const auto n = g.node_count();
  if (n < 2) throw CentralityError("degenerate graph");
  if (n < 3) {
    log::warn(std::string(metric) + ": fewer than 3 nodes, all scores are zero");
    scores.assign(n, 0.0);
    return true;
  }
  return false;
}

}  // namespace

std::string_view column_name(CentralityKind kind) {
  switch (kind) {
    case CentralityKind::InDegree:
      return "in_degree";
    case CentralityKind::OutDegree:
      return "out_degree";
    case CentralityKind::Degree:
      return "degree";
    case CentralityKind::Eigenvector:
      return "eigenvector";
    case CentralityKind::Betweenness:
      return "betweenness";
    case CentralityKind::CurrentFlowBetweenness:
      return "current_flow_betweenness";
    case CentralityKind::Load:
      return "load";
    case CentralityKind::Closeness:
      return "closeness";
    case CentralityKind::Information:
      return "information";
    case CentralityKind::Harmonic:
      return "harmonic";
    case CentralityKind::Subgraph:
      return "subgraph";
  }
  return "unknown";
}

std::optional<CentralityKind> parse_centrality_kind(std::string_view text) {
  for (auto kind : kAllCentralities)
    if (column_name(kind) == text) return kind;
  return std::nullopt;
}

Scores degree_centrality(const ServiceDependencyGraph& g, DegreeMode mode, bool normalized) {
  const auto n = g.node_count();
  if (n < 2) throw CentralityError("degenerate graph");
  // divide rather than multiply by the reciprocal so k/(n-1) is correctly rounded
  const double scale = normalized ? static_cast<double>(n - 1) : 1.0;
  Scores scores(n);
  for (NodeIndex v = 0; v < n; ++v) {
    std::size_t count = 0;
    if (mode != DegreeMode::Out) count += g.in_degree(v);
    if (mode != DegreeMode::In) count += g.out_degree(v);
    scores[v] = static_cast<double>(count) / scale;
  }
  return scores;
}

Scores eigenvector_centrality(const ServiceDependencyGraph& g, const EigenvectorOptions& options) {
  const auto n = g.node_count();
  if (n == 0) throw CentralityError("empty graph");
  // Iterating (A^T + I) keeps the eigenvectors of A^T but breaks the
  // oscillation of periodic (e.g. bipartite) graphs.
  Scores x(n, 1.0 / static_cast<double>(n));
  Scores next(n);
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    for (NodeIndex v = 0; v < n; ++v) {
      double sum = x[v];
      for (NodeIndex u : g.predecessors(v)) sum += x[u];
      next[v] = sum;
    }
    double norm = std::sqrt(std::inner_product(next.begin(), next.end(), next.begin(), 0.0));
    if (norm == 0.0) throw CentralityError("power iteration failed: zero iterate");
    double change = 0.0;
    for (NodeIndex v = 0; v < n; ++v) {
      next[v] /= norm;
      change += std::abs(next[v] - x[v]);
    }
    x.swap(next);
    if (change < static_cast<double>(n) * options.tolerance) return x;
  }
  throw CentralityError("power iteration failed to converge in " +
                        std::to_string(options.max_iterations) + " iterations");
}

Scores betweenness_centrality(const ServiceDependencyGraph& g) {
  Scores scores;
  if (degenerate_for_pairs(g, scores, "betweenness")) return scores;
  const auto n = g.node_count();
  scores.assign(n, 0.0);

  std::vector<std::vector<NodeIndex>> preds(n);
  std::vector<double> sigma(n);
  std::vector<double> delta(n);
  std::vector<std::size_t> dist(n);
  for (NodeIndex s = 0; s < n; ++s) {
    for (auto& p : preds) p.clear();
    std::fill(sigma.begin(), sigma.end(), 0.0);
    std::fill(delta.begin(), delta.end(), 0.0);
    std::fill(dist.begin(), dist.end(), kUnreached);
    std::stack<NodeIndex> order;
    std::queue<NodeIndex> frontier;
    sigma[s] = 1.0;
    dist[s] = 0;
    frontier.push(s);
    while (!frontier.empty()) {
      NodeIndex v = frontier.front();
      frontier.pop();
      order.push(v);
      for (NodeIndex w : g.successors(v)) {
        if (dist[w] == kUnreached) {
          dist[w] = dist[v] + 1;
          frontier.push(w);
        }
        if (dist[w] == dist[v] + 1) {
          sigma[w] += sigma[v];
          preds[w].push_back(v);
        }
      }
    }
    while (!order.empty()) {
      NodeIndex w = order.top();
      order.pop();
      for (NodeIndex v : preds[w]) delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
      if (w != s) scores[w] += delta[w];
    }
  }
  const double scale = 1.0 / pair_normalizer(n);
  for (double& value : scores) value *= scale;
  return scores;
}

Scores load_centrality(const ServiceDependencyGraph& g) {
  Scores scores;
  if (degenerate_for_pairs(g, scores, "load")) return scores;
  const auto n = g.node_count();
  scores.assign(n, 0.0);

  std::vector<double> flow(n);
  std::vector<NodeIndex> order;
  std::vector<NodeIndex> next_hops;
  for (NodeIndex t = 0; t < n; ++t) {
    // Every node that reaches t emits one unit towards it; units move from
    // the farthest layer inwards.
    auto dist = bfs_distances(g, t, /*forward=*/false);
    order.clear();
    for (NodeIndex v = 0; v < n; ++v) {
      flow[v] = 0.0;
      if (dist[v] != kUnreached && v != t) {
        flow[v] = 1.0;
        order.push_back(v);
      }
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](NodeIndex a, NodeIndex b) { return dist[a] > dist[b]; });
    for (NodeIndex v : order) {
      next_hops.clear();
      for (NodeIndex w : g.successors(v))
        if (dist[w] != kUnreached && dist[w] + 1 == dist[v]) next_hops.push_back(w);
      const double share = flow[v] / static_cast<double>(next_hops.size());
      for (NodeIndex w : next_hops) {
        flow[w] += share;
        if (w != t) scores[w] += share;
      }
    }
  }
  const double scale = 1.0 / pair_normalizer(n);
  for (double& value : scores) value *= scale;
  return scores;
}

Scores current_flow_betweenness_centrality(const ServiceDependencyGraph& g) {
  require_connected(g);
  const auto n = g.node_count();
  if (n < 3) return Scores(n, 0.0);

  // Ground node 0: potentials for current injected at s and drawn at t are
  // column s minus column t of the grounded inverse (row/column 0 = 0).
  const auto size = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd laplacian = undirected_laplacian(g);
  Eigen::MatrixXd grounded = laplacian.bottomRightCorner(size - 1, size - 1);
  Eigen::MatrixXd potentials = Eigen::MatrixXd::Zero(size, size);
  potentials.bottomRightCorner(size - 1, size - 1) =
      grounded.ldlt().solve(Eigen::MatrixXd::Identity(size - 1, size - 1));

  std::vector<std::vector<NodeIndex>> neighbours(n);
  for (NodeIndex v = 0; v < n; ++v) {
    for (NodeIndex w : g.successors(v)) {
      neighbours[v].push_back(w);
      neighbours[w].push_back(v);
    }
  }
  for (auto& list : neighbours) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }

  Scores scores(n, 0.0);
  Eigen::VectorXd phi(size);
  for (NodeIndex s = 0; s < n; ++s) {
    for (NodeIndex t = s + 1; t < n; ++t) {
      phi = potentials.col(static_cast<Eigen::Index>(s)) -
            potentials.col(static_cast<Eigen::Index>(t));
      for (NodeIndex v = 0; v < n; ++v) {
        if (v == s || v == t) continue;
        double throughput = 0.0;
        for (NodeIndex w : neighbours[v])
          throughput += std::abs(phi(static_cast<Eigen::Index>(v)) -
                                 phi(static_cast<Eigen::Index>(w)));
        scores[v] += 0.5 * throughput;
      }
    }
  }
  const double scale = 2.0 / pair_normalizer(n);
  for (double& value : scores) value *= scale;
  return scores;
}

Scores closeness_centrality(const ServiceDependencyGraph& g, DistanceDirection direction) {
  const auto n = g.node_count();
  Scores scores(n, 0.0);
  if (n < 2) return scores;
  const bool forward = direction == DistanceDirection::Outgoing;
  for (NodeIndex v = 0; v < n; ++v) {
    auto dist = bfs_distances(g, v, forward);
    std::size_t reached = 0;
    std::size_t total = 0;
    for (NodeIndex u = 0; u < n; ++u) {
      if (u == v || dist[u] == kUnreached) continue;
      ++reached;
      total += dist[u];
    }
    if (reached == 0) continue;
    const double r = static_cast<double>(reached);
    scores[v] = (r / static_cast<double>(n - 1)) * (r / static_cast<double>(total));
  }
  return scores;
}

Scores information_centrality(const ServiceDependencyGraph& g) {
  require_connected(g);
  const auto n = g.node_count();
  if (n < 2) throw CentralityError("degenerate graph");
  const auto size = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd system = undirected_laplacian(g);
  system.array() += 1.0;
  Eigen::MatrixXd inverse = system.ldlt().solve(Eigen::MatrixXd::Identity(size, size));
  const double trace = inverse.trace();
  Eigen::VectorXd row_sums = inverse.rowwise().sum();
  Scores scores(n);
  for (Eigen::Index v = 0; v < size; ++v) {
    const double denom = static_cast<double>(n) * inverse(v, v) + trace - 2.0 * row_sums(v);
    scores[static_cast<std::size_t>(v)] = static_cast<double>(n) / denom;
  }
  return scores;
}

Scores harmonic_centrality(const ServiceDependencyGraph& g, bool normalized) {
  const auto n = g.node_count();
  Scores scores(n, 0.0);
  for (NodeIndex v = 0; v < n; ++v) {
    auto dist = bfs_distances(g, v, /*forward=*/false);
    for (NodeIndex u = 0; u < n; ++u)
      if (u != v && dist[u] != kUnreached) scores[v] += 1.0 / static_cast<double>(dist[u]);
  }
  if (normalized && n > 1)
    for (double& value : scores) value /= static_cast<double>(n - 1);
  return scores;
}

Scores subgraph_centrality(const ServiceDependencyGraph& g) {
  const auto n = g.node_count();
  if (n == 0) throw CentralityError("empty graph");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(undirected_adjacency(g));
  if (solver.info() != Eigen::Success) throw CentralityError("eigendecomposition failed");
  const Eigen::MatrixXd& vectors = solver.eigenvectors();
  Eigen::VectorXd weights = solver.eigenvalues().array().exp();
  Eigen::VectorXd diag = vectors.array().square().matrix() * weights;
  return Scores(diag.data(), diag.data() + diag.size());
}

CentralityTable::CentralityTable(std::vector<std::string> services)
    : services_(std::move(services)), cells_(services_.size() * kCentralityCount) {}

std::optional<std::size_t> CentralityTable::row_of(std::string_view service) const {
  auto it = std::find(services_.begin(), services_.end(), service);
  if (it == services_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - services_.begin());
}

void CentralityTable::set_column(CentralityKind kind, const Scores& scores) {
  if (scores.size() != rows()) throw CentralityError("column length mismatch");
  const auto col = static_cast<std::size_t>(kind);
  for (std::size_t r = 0; r < rows(); ++r) cells_[r * kCentralityCount + col] = scores[r];
}

void CentralityTable::mark_unavailable(CentralityKind kind, std::string message) {
  const auto col = static_cast<std::size_t>(kind);
  for (std::size_t r = 0; r < rows(); ++r) cells_[r * kCentralityCount + col].reset();
  diagnostics_.push_back({kind, std::move(message)});
}

bool CentralityTable::available(CentralityKind kind) const {
  return std::none_of(diagnostics_.begin(), diagnostics_.end(),
                      [&](const CentralityDiagnostic& d) { return d.kind == kind; });
}

std::vector<std::optional<double>> CentralityTable::column(CentralityKind kind) const {
  std::vector<std::optional<double>> values(rows());
  for (std::size_t r = 0; r < rows(); ++r) values[r] = at(r, kind);
  return values;
}

CentralityTable compute_all(const ServiceDependencyGraph& g, const CentralityOptions& options) {
  std::vector<std::string> names;
  names.reserve(g.node_count());
  for (const auto& node : g.nodes()) names.push_back(node.name);
  CentralityTable table(std::move(names));
  table.raw_degree = options.raw_degree;
  const bool normalized_degree = !options.raw_degree;

  for (auto kind : kAllCentralities) {
    try {
      Scores scores;
      switch (kind) {
        case CentralityKind::InDegree:
          scores = degree_centrality(g, DegreeMode::In, normalized_degree);
          break;
        case CentralityKind::OutDegree:
          scores = degree_centrality(g, DegreeMode::Out, normalized_degree);
          break;
        case CentralityKind::Degree:
          scores = degree_centrality(g, DegreeMode::Total, normalized_degree);
          break;
        case CentralityKind::Eigenvector:
          scores = eigenvector_centrality(g, options.eigenvector);
          break;
        case CentralityKind::Betweenness:
          scores = betweenness_centrality(g);
          break;
        case CentralityKind::CurrentFlowBetweenness:
          scores = current_flow_betweenness_centrality(g);
          break;
        case CentralityKind::Load:
          scores = load_centrality(g);
          break;
        case CentralityKind::Closeness:
          if (g.node_count() < 2) throw CentralityError("degenerate graph");
          scores = closeness_centrality(g, options.closeness_direction);
          break;
        case CentralityKind::Information:
          scores = information_centrality(g);
          break;
        case CentralityKind::Harmonic:
          if (g.node_count() < 2) throw CentralityError("degenerate graph");
          scores = harmonic_centrality(g, options.normalize_harmonic);
          break;
        case CentralityKind::Subgraph:
          scores = subgraph_centrality(g);
          break;
      }
      table.set_column(kind, scores);
    } catch (const std::exception& e) {
      log::warn(std::string(column_name(kind)) + " unavailable: " + e.what());
      table.mark_unavailable(kind, e.what());
    }
  }
  return table;
}

}  // namespace svcnet
