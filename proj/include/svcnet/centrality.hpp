#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "svcnet/graph.hpp"

namespace svcnet {

class CentralityError : public std::runtime_error {
 public:
  explicit CentralityError(const std::string& what) : std::runtime_error(what) {}
};

enum class CentralityKind {
  InDegree,
  OutDegree,
  Degree,
  Eigenvector,
  Betweenness,
  CurrentFlowBetweenness,
  Load,
  Closeness,
  Information,
  Harmonic,
  Subgraph,
};

inline constexpr std::size_t kCentralityCount = 11;

inline constexpr std::array<CentralityKind, kCentralityCount> kAllCentralities{
    CentralityKind::InDegree,    CentralityKind::OutDegree,
    CentralityKind::Degree,      CentralityKind::Eigenvector,
    CentralityKind::Betweenness, CentralityKind::CurrentFlowBetweenness,
    CentralityKind::Load,        CentralityKind::Closeness,
    CentralityKind::Information, CentralityKind::Harmonic,
    CentralityKind::Subgraph,
};

/// Column label used in tables and files, e.g. "current_flow_betweenness".
std::string_view column_name(CentralityKind kind);
std::optional<CentralityKind> parse_centrality_kind(std::string_view text);

/// Per-node scores indexed by NodeIndex.
using Scores = std::vector<double>;

enum class DegreeMode { In, Out, Total };
enum class DistanceDirection { Incoming, Outgoing };

/// Degree divided by n-1, or the raw count when `normalized` is false.
Scores degree_centrality(const ServiceDependencyGraph& g, DegreeMode mode,
                         bool normalized = true);

struct EigenvectorOptions {
  double tolerance = 1e-6;
  int max_iterations = 1000;
};

/// Dominant left eigenvector of the adjacency matrix (importance flows along
/// in-edges), unit Euclidean norm, non-negative.
Scores eigenvector_centrality(const ServiceDependencyGraph& g,
                              const EigenvectorOptions& options = {});

/// Brandes on the directed graph, normalized by (n-1)(n-2).
Scores betweenness_centrality(const ServiceDependencyGraph& g);

/// Load: each (s, t) sends one unit from s that splits evenly over the
/// shortest-path successors at every hop. Normalized by (n-1)(n-2).
Scores load_centrality(const ServiceDependencyGraph& g);

/// Electrical current betweenness on the undirected view.
Scores current_flow_betweenness_centrality(const ServiceDependencyGraph& g);

/// Wasserman-Faust scaled closeness. Incoming uses d(u, v) for u reaching v.
Scores closeness_centrality(const ServiceDependencyGraph& g,
                            DistanceDirection direction = DistanceDirection::Incoming);

/// Stephenson-Zelen information centrality on the undirected view.
Scores information_centrality(const ServiceDependencyGraph& g);

/// Sum of 1/d(u, v) over incoming distances; optionally divided by n-1.
Scores harmonic_centrality(const ServiceDependencyGraph& g, bool normalized = false);

/// Diagonal of exp(A) for the undirected adjacency matrix A.
Scores subgraph_centrality(const ServiceDependencyGraph& g);

struct CentralityOptions {
  bool raw_degree = false;
  DistanceDirection closeness_direction = DistanceDirection::Incoming;
  bool normalize_harmonic = false;
  EigenvectorOptions eigenvector;
};

struct CentralityDiagnostic {
  CentralityKind kind;
  std::string message;
};

/**
 * Services × centralities. Cells of a metric that failed are empty
 * (std::nullopt) for every service and the failure is listed in
 * `diagnostics`; there are no partially filled columns.
 */
class CentralityTable {
 public:
  CentralityTable() = default;
  explicit CentralityTable(std::vector<std::string> services);

  const std::vector<std::string>& services() const { return services_; }
  std::size_t rows() const { return services_.size(); }

  std::optional<double> at(std::size_t row, CentralityKind kind) const {
    return cells_[row * kCentralityCount + static_cast<std::size_t>(kind)];
  }
  std::optional<std::size_t> row_of(std::string_view service) const;

  void set_column(CentralityKind kind, const Scores& scores);
  void mark_unavailable(CentralityKind kind, std::string message);
  bool available(CentralityKind kind) const;

  /// Column values; empty optionals where unavailable.
  std::vector<std::optional<double>> column(CentralityKind kind) const;

  const std::vector<CentralityDiagnostic>& diagnostics() const { return diagnostics_; }

  bool raw_degree = false;

 private:
  std::vector<std::string> services_;
  std::vector<std::optional<double>> cells_;
  std::vector<CentralityDiagnostic> diagnostics_;
};

/// Runs every metric; a failing metric never aborts the others.
CentralityTable compute_all(const ServiceDependencyGraph& g,
                            const CentralityOptions& options = {});

}  // namespace svcnet
