#pragma once

// Brute-force references for the centrality code. Nothing here shares a
// code path with src/centrality.cpp: distances come from Floyd-Warshall,
// shortest paths are listed explicitly, load is simulated pair by pair and
// the linear algebra goes through the Moore-Penrose pseudo-inverse or a
// truncated power series instead of grounded solves and eigendecompositions.

#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "svcnet/graph.hpp"

namespace svcnet::oracle {

using Matrix = std::vector<std::vector<double>>;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline Matrix floyd_warshall(const ServiceDependencyGraph& g) {
  const auto n = g.node_count();
  Matrix d(n, std::vector<double>(n, kInf));
  for (std::size_t i = 0; i < n; ++i) {
    d[i][i] = 0;
    for (std::size_t j = 0; j < n; ++j)
      if (g.has_edge(i, j)) d[i][j] = 1;
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (d[i][k] + d[k][j] < d[i][j]) d[i][j] = d[i][k] + d[k][j];
  return d;
}

/// Every shortest s->t path as an explicit node sequence.
inline void enumerate_paths(const ServiceDependencyGraph& g, const Matrix& d, std::size_t v,
                            std::size_t t, std::vector<std::size_t>& prefix,
                            std::vector<std::vector<std::size_t>>& out) {
  prefix.push_back(v);
  if (v == t) {
    out.push_back(prefix);
  } else {
    for (std::size_t w = 0; w < g.node_count(); ++w)
      if (g.has_edge(v, w) && d[w][t] == d[v][t] - 1) enumerate_paths(g, d, w, t, prefix, out);
  }
  prefix.pop_back();
}

inline std::vector<double> betweenness(const ServiceDependencyGraph& g) {
  const auto n = g.node_count();
  auto d = floyd_warshall(g);
  std::vector<double> score(n, 0.0);
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t t = 0; t < n; ++t) {
      if (s == t || d[s][t] == kInf) continue;
      std::vector<std::vector<std::size_t>> paths;
      std::vector<std::size_t> prefix;
      enumerate_paths(g, d, s, t, prefix, paths);
      for (const auto& path : paths)
        for (std::size_t k = 1; k + 1 < path.size(); ++k)
          score[path[k]] += 1.0 / static_cast<double>(paths.size());
    }
  }
  const double norm = static_cast<double>((n - 1) * (n - 2));
  for (double& x : score) x /= norm;
  return score;
}

/// One unit from s to t, split evenly among the shortest-path successors at
/// every node it passes.
inline std::vector<double> load(const ServiceDependencyGraph& g) {
  const auto n = g.node_count();
  auto d = floyd_warshall(g);
  std::vector<double> score(n, 0.0);
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t t = 0; t < n; ++t) {
      if (s == t || d[s][t] == kInf) continue;
      std::vector<double> carried(n, 0.0);
      carried[s] = 1.0;
      // walk layers outward from s
      for (double layer = 0; layer < d[s][t]; ++layer) {
        for (std::size_t v = 0; v < n; ++v) {
          if (d[s][v] != layer || carried[v] == 0.0) continue;
          std::vector<std::size_t> next;
          for (std::size_t w = 0; w < n; ++w)
            if (g.has_edge(v, w) && d[w][t] == d[v][t] - 1) next.push_back(w);
          for (std::size_t w : next) carried[w] += carried[v] / static_cast<double>(next.size());
        }
      }
      for (std::size_t v = 0; v < n; ++v)
        if (v != s && v != t) score[v] += carried[v];
    }
  }
  const double norm = static_cast<double>((n - 1) * (n - 2));
  for (double& x : score) x /= norm;
  return score;
}

inline Eigen::MatrixXd undirected_adjacency(const ServiceDependencyGraph& g) {
  const auto n = static_cast<Eigen::Index>(g.node_count());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (g.has_edge(static_cast<std::size_t>(i), static_cast<std::size_t>(j))) {
        a(i, j) = 1;
        a(j, i) = 1;
      }
  return a;
}

inline Eigen::MatrixXd pseudo_inverse_laplacian(const ServiceDependencyGraph& g) {
  Eigen::MatrixXd a = undirected_adjacency(g);
  Eigen::MatrixXd l = -a;
  l.diagonal() = a.rowwise().sum();
  return l.completeOrthogonalDecomposition().pseudoInverse();
}

inline std::vector<double> current_flow_betweenness(const ServiceDependencyGraph& g) {
  const auto n = static_cast<Eigen::Index>(g.node_count());
  Eigen::MatrixXd a = undirected_adjacency(g);
  Eigen::MatrixXd lplus = pseudo_inverse_laplacian(g);
  std::vector<double> score(static_cast<std::size_t>(n), 0.0);
  for (Eigen::Index s = 0; s < n; ++s)
    for (Eigen::Index t = s + 1; t < n; ++t) {
      Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
      b(s) = 1;
      b(t) = -1;
      Eigen::VectorXd phi = lplus * b;
      for (Eigen::Index v = 0; v < n; ++v) {
        if (v == s || v == t) continue;
        double current = 0;
        for (Eigen::Index w = 0; w < n; ++w) current += a(v, w) * std::abs(phi(v) - phi(w));
        score[static_cast<std::size_t>(v)] += current / 2;
      }
    }
  const double norm = static_cast<double>((n - 1) * (n - 2)) / 2.0;
  for (double& x : score) x /= norm;
  return score;
}

/// Information centrality as the reciprocal mean effective resistance,
/// with resistances read off the pseudo-inverse.
inline std::vector<double> information(const ServiceDependencyGraph& g) {
  const auto n = static_cast<Eigen::Index>(g.node_count());
  Eigen::MatrixXd lplus = pseudo_inverse_laplacian(g);
  std::vector<double> score(static_cast<std::size_t>(n));
  for (Eigen::Index v = 0; v < n; ++v) {
    double total = 0;
    for (Eigen::Index u = 0; u < n; ++u) total += lplus(u, u) + lplus(v, v) - 2 * lplus(u, v);
    score[static_cast<std::size_t>(v)] = static_cast<double>(n) / total;
  }
  return score;
}

/// diag of sum_{k=0..terms} A^k / k! with plain loops.
inline std::vector<double> truncated_exp_diagonal(const ServiceDependencyGraph& g, int terms) {
  const auto n = g.node_count();
  Matrix a(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (g.has_edge(i, j)) a[i][j] = a[j][i] = 1.0;
  Matrix term(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) term[i][i] = 1.0;
  std::vector<double> diag(n, 1.0);
  for (int k = 1; k <= terms; ++k) {
    Matrix next(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t m = 0; m < n; ++m)
        if (term[i][m] != 0.0)
          for (std::size_t j = 0; j < n; ++j) next[i][j] += term[i][m] * a[m][j] / k;
    term = std::move(next);
    for (std::size_t i = 0; i < n; ++i) diag[i] += term[i][i];
  }
  return diag;
}

inline double spectral_radius_undirected(const ServiceDependencyGraph& g) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(undirected_adjacency(g));
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

/// Perron vector of A^T from a general (non-symmetric) dense eigensolver.
inline std::vector<double> dominant_left_eigenvector(const ServiceDependencyGraph& g) {
  const auto n = static_cast<Eigen::Index>(g.node_count());
  Eigen::MatrixXd at = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (g.has_edge(static_cast<std::size_t>(i), static_cast<std::size_t>(j))) at(j, i) = 1;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(at);
  Eigen::Index best = 0;
  for (Eigen::Index k = 1; k < n; ++k)
    if (solver.eigenvalues()(k).real() > solver.eigenvalues()(best).real()) best = k;
  Eigen::VectorXd v = solver.eigenvectors().col(best).real().cwiseAbs();
  v.normalize();
  return std::vector<double>(v.data(), v.data() + v.size());
}

}  // namespace svcnet::oracle
