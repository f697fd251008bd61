#include "svcnet/graph.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <queue>

namespace svcnet {

std::string_view to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::Service:
      return "service";
    case NodeKind::ExternalComponent:
      return "external";
    case NodeKind::Database:
      return "database";
  }
  return "service";
}

std::optional<NodeKind> parse_node_kind(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "service" || lower == "microservice") return NodeKind::Service;
  if (lower == "external" || lower == "external_component" ||
      lower == "externalcomponent")
    return NodeKind::ExternalComponent;
  if (lower == "database" || lower == "db") return NodeKind::Database;
  return std::nullopt;
}

ServiceDependencyGraph::ServiceDependencyGraph(std::vector<ComponentNode> nodes,
                                               const std::vector<InformationFlow>& edges)
    : nodes_(std::move(nodes)), out_(nodes_.size()), in_(nodes_.size()) {
  for (NodeIndex i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].name.empty()) throw GraphError("node name must be non-empty");
    if (!index_.emplace(nodes_[i].name, i).second)
      throw GraphError("duplicate node name '" + nodes_[i].name + "'");
  }
  for (const auto& e : edges) {
    auto s = find(e.source);
    auto t = find(e.target);
    if (!s) throw GraphError("edge source '" + e.source + "' is not a node");
    if (!t) throw GraphError("edge target '" + e.target + "' is not a node");
    if (*s == *t) throw GraphError("self-loop on '" + e.source + "'");
    out_[*s].push_back(*t);
    in_[*t].push_back(*s);
  }
  for (NodeIndex v = 0; v < nodes_.size(); ++v) {
    std::sort(out_[v].begin(), out_[v].end());
    std::sort(in_[v].begin(), in_[v].end());
    if (std::adjacent_find(out_[v].begin(), out_[v].end()) != out_[v].end())
      throw GraphError("parallel edges leaving '" + nodes_[v].name + "'");
    edge_count_ += out_[v].size();
  }
}

std::optional<NodeIndex> ServiceDependencyGraph::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool ServiceDependencyGraph::has_edge(NodeIndex from, NodeIndex to) const {
  return std::binary_search(out_[from].begin(), out_[from].end(), to);
}

std::vector<InformationFlow> ServiceDependencyGraph::edges() const {
  std::vector<InformationFlow> result;
  result.reserve(edge_count_);
  for (NodeIndex v = 0; v < nodes_.size(); ++v)
    for (NodeIndex w : out_[v]) result.push_back({nodes_[v].name, nodes_[w].name});
  return result;
}

ServiceDependencyGraph ServiceDependencyGraph::induced(std::span<const NodeIndex> keep) const {
  std::vector<char> kept(nodes_.size(), 0);
  for (NodeIndex v : keep) kept.at(v) = 1;
  std::vector<ComponentNode> nodes;
  std::vector<InformationFlow> edges;
  for (NodeIndex v = 0; v < nodes_.size(); ++v) {
    if (!kept[v]) continue;
    nodes.push_back(nodes_[v]);
    for (NodeIndex w : out_[v])
      if (kept[w]) edges.push_back({nodes_[v].name, nodes_[w].name});
  }
  return ServiceDependencyGraph(std::move(nodes), edges);
}

bool ServiceDependencyGraph::operator==(const ServiceDependencyGraph& other) const {
  return nodes_ == other.nodes_ && out_ == other.out_;
}

std::vector<std::vector<NodeIndex>> weak_components(const ServiceDependencyGraph& g) {
  const auto n = g.node_count();
  std::vector<std::vector<NodeIndex>> components;
  std::vector<char> seen(n, 0);
  for (NodeIndex start = 0; start < n; ++start) {
    if (seen[start]) continue;
    std::vector<NodeIndex> members;
    std::queue<NodeIndex> frontier;
    frontier.push(start);
    seen[start] = 1;
    while (!frontier.empty()) {
      NodeIndex v = frontier.front();
      frontier.pop();
      members.push_back(v);
      auto visit = [&](NodeIndex w) {
        if (!seen[w]) {
          seen[w] = 1;
          frontier.push(w);
        }
      };
      for (NodeIndex w : g.successors(v)) visit(w);
      for (NodeIndex w : g.predecessors(v)) visit(w);
    }
    std::sort(members.begin(), members.end());
    components.push_back(std::move(members));
  }
  return components;
}

bool is_weakly_connected(const ServiceDependencyGraph& g) {
  return !g.empty() && weak_components(g).size() == 1;
}

ServiceDependencyGraph extract_gwcc(const ServiceDependencyGraph& g) {
  if (g.empty()) throw GraphError("empty graph");
  auto components = weak_components(g);
  auto smallest_name = [&](const std::vector<NodeIndex>& c) -> const std::string& {
    const std::string* best = &g.node(c.front()).name;
    for (NodeIndex v : c)
      if (g.node(v).name < *best) best = &g.node(v).name;
    return *best;
  };
  const std::vector<NodeIndex>* best = &components.front();
  for (const auto& c : components) {
    if (c.size() > best->size() ||
        (c.size() == best->size() && smallest_name(c) < smallest_name(*best)))
      best = &c;
  }
  if (best->size() == g.node_count()) return g;
  return g.induced(*best);
}

bool has_database_name(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  static constexpr std::array<std::string_view, 3> kTokens{"mysql", "mongo", "database"};
  return std::any_of(kTokens.begin(), kTokens.end(), [&](std::string_view token) {
    return lower.find(token) != std::string::npos;
  });
}

std::vector<std::string> database_nodes_to_remove(const ServiceDependencyGraph& g) {
  std::vector<std::string> names;
  for (NodeIndex v = 0; v < g.node_count(); ++v) {
    if (g.in_degree(v) + g.out_degree(v) == 1 && has_database_name(g.node(v).name))
      names.push_back(g.node(v).name);
  }
  return names;
}

ServiceDependencyGraph filter_database_nodes(const ServiceDependencyGraph& g) {
  std::vector<NodeIndex> keep;
  keep.reserve(g.node_count());
  for (NodeIndex v = 0; v < g.node_count(); ++v) {
    bool removable =
        g.in_degree(v) + g.out_degree(v) == 1 && has_database_name(g.node(v).name);
    if (!removable) keep.push_back(v);
  }
  if (keep.size() == g.node_count()) return g;
  return g.induced(keep);
}

SanityReport sanity_check_edge_count(const ServiceDependencyGraph& g) {
  SanityReport report;
  report.nodes = g.node_count();
  report.edges = g.edge_count();
  report.suspiciously_sparse = report.nodes > 0 && report.edges + 1 < report.nodes;
  return report;
}

PreprocessResult preprocess(const ServiceDependencyGraph& g) {
  PreprocessResult result;
  result.sanity = sanity_check_edge_count(g);
  result.removed_databases = database_nodes_to_remove(g);
  auto filtered = filter_database_nodes(g);
  if (filtered.empty()) throw GraphError("empty graph");
  result.component_count = weak_components(filtered).size();
  result.graph = extract_gwcc(filtered);
  for (const auto& node : filtered.nodes())
    if (!result.graph.find(node.name)) result.dropped_outside_gwcc.push_back(node.name);
  return result;
}

}  // namespace svcnet
