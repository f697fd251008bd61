#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace svcnet {

class GraphError : public std::runtime_error {
 public:
  explicit GraphError(const std::string& what) : std::runtime_error(what) {}
};

enum class NodeKind { Service, ExternalComponent, Database };

std::string_view to_string(NodeKind kind);
std::optional<NodeKind> parse_node_kind(std::string_view text);

struct ComponentNode {
  std::string name;
  NodeKind kind = NodeKind::Service;

  bool operator==(const ComponentNode&) const = default;
};

struct InformationFlow {
  std::string source;
  std::string target;

  bool operator==(const InformationFlow&) const = default;
};

using NodeIndex = std::size_t;

/**
 * Immutable simple directed graph of named components.
 *
 * Nodes keep the order in which they were supplied; edges are stored as
 * sorted adjacency lists in both directions. Construction validates the
 * simple-graph invariants and throws GraphError on violation.
 */
class ServiceDependencyGraph {
 public:
  ServiceDependencyGraph() = default;
  ServiceDependencyGraph(std::vector<ComponentNode> nodes,
                         const std::vector<InformationFlow>& edges);

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edge_count_; }
  bool empty() const { return nodes_.empty(); }

  const std::vector<ComponentNode>& nodes() const { return nodes_; }
  const ComponentNode& node(NodeIndex v) const { return nodes_.at(v); }
  std::optional<NodeIndex> find(std::string_view name) const;

  std::span<const NodeIndex> successors(NodeIndex v) const { return out_[v]; }
  std::span<const NodeIndex> predecessors(NodeIndex v) const { return in_[v]; }
  std::size_t in_degree(NodeIndex v) const { return in_[v].size(); }
  std::size_t out_degree(NodeIndex v) const { return out_[v].size(); }
  bool has_edge(NodeIndex from, NodeIndex to) const;

  /// Edges in (source index, target index) order.
  std::vector<InformationFlow> edges() const;

  /// Subgraph induced by the given node indices, preserving node order.
  ServiceDependencyGraph induced(std::span<const NodeIndex> keep) const;

  bool operator==(const ServiceDependencyGraph& other) const;

 private:
  std::vector<ComponentNode> nodes_;
  std::unordered_map<std::string, NodeIndex> index_;
  std::vector<std::vector<NodeIndex>> out_;
  std::vector<std::vector<NodeIndex>> in_;
  std::size_t edge_count_ = 0;
};

/// Weakly connected components, each sorted by node index; components are
/// ordered by their smallest node index.
std::vector<std::vector<NodeIndex>> weak_components(const ServiceDependencyGraph& g);

bool is_weakly_connected(const ServiceDependencyGraph& g);

/// Largest weakly connected component. Ties go to the component holding the
/// lexicographically smallest node name.
ServiceDependencyGraph extract_gwcc(const ServiceDependencyGraph& g);

/// True when the lowercased name contains "mysql", "mongo" or "database".
bool has_database_name(std::string_view name);

/// Drops database-named nodes with total degree exactly 1. Single pass.
ServiceDependencyGraph filter_database_nodes(const ServiceDependencyGraph& g);

/// Names of the nodes filter_database_nodes would remove.
std::vector<std::string> database_nodes_to_remove(const ServiceDependencyGraph& g);

struct SanityReport {
  std::size_t nodes = 0;
  std::size_t edges = 0;
  bool suspiciously_sparse = false;

  std::string_view verdict() const {
    return suspiciously_sparse ? "suspiciously sparse" : "plausible";
  }
};

/// A connected simple graph needs at least N-1 edges; fewer hints at
/// missed connections in the reconstruction.
SanityReport sanity_check_edge_count(const ServiceDependencyGraph& g);

struct PreprocessResult {
  ServiceDependencyGraph graph;
  std::vector<std::string> removed_databases;
  std::vector<std::string> dropped_outside_gwcc;
  std::size_t component_count = 0;
  SanityReport sanity;  // of the input, before any removal
};

/// filter_database_nodes followed by extract_gwcc.
PreprocessResult preprocess(const ServiceDependencyGraph& g);

}  // namespace svcnet
