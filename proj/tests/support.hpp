#pragma once

// Helpers shared by the test binaries: compact graph construction and a
// portable seeded generator whose output is identical on every platform
// (tests/oracles/reference_values.py re-implements it bit for bit).

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "svcnet/graph.hpp"

namespace svcnet::testing {

inline ServiceDependencyGraph make_graph(
    std::initializer_list<std::string> names,
    std::initializer_list<std::pair<std::string, std::string>> edges) {
  std::vector<ComponentNode> nodes;
  for (const auto& n : names) nodes.push_back({n, NodeKind::Service});
  std::vector<InformationFlow> flows;
  for (const auto& [s, t] : edges) flows.push_back({s, t});
  return ServiceDependencyGraph(std::move(nodes), flows);
}

inline std::string node_name(std::size_t i) { return "n" + std::to_string(i); }

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [lo, hi].
  std::size_t between(std::size_t lo, std::size_t hi) {
    return lo + static_cast<std::size_t>(next() % (hi - lo + 1));
  }

  /// Box-Muller, one variate per call (the sine branch is discarded).
  double normal() {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  double exponential() { return -std::log(1.0 - uniform()); }

 private:
  std::uint64_t state_;
};

/// Simple digraph on n nodes named n0..n{n-1}, each ordered pair an edge
/// with probability p.
inline ServiceDependencyGraph random_digraph(SplitMix64& rng, std::size_t n, double p) {
  std::vector<ComponentNode> nodes;
  for (std::size_t i = 0; i < n; ++i) nodes.push_back({node_name(i), NodeKind::Service});
  std::vector<InformationFlow> edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && rng.uniform() < p) edges.push_back({node_name(i), node_name(j)});
  return ServiceDependencyGraph(std::move(nodes), edges);
}

/// Undirected simple graph encoded as a digraph with one arc per edge.
inline ServiceDependencyGraph random_undirected(SplitMix64& rng, std::size_t n, double p) {
  std::vector<ComponentNode> nodes;
  for (std::size_t i = 0; i < n; ++i) nodes.push_back({node_name(i), NodeKind::Service});
  std::vector<InformationFlow> edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (rng.uniform() < p) edges.push_back({node_name(i), node_name(j)});
  return ServiceDependencyGraph(std::move(nodes), edges);
}

}  // namespace svcnet::testing
