#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ustlab {

/// Bad input supplied by a caller (CLI exit code 2).
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A size/enumeration guard was exceeded (CLI exit code 3).
struct GuardError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using VertexId = int;

/// Ordered pair (tail, tip) over an undirected edge of the host graph.
struct DirectedEdge {
  VertexId tail = -1;
  VertexId tip = -1;

  DirectedEdge() = default;
  DirectedEdge(VertexId a, VertexId b) : tail(a), tip(b) {}

  DirectedEdge reversed() const { return {tip, tail}; }
  std::pair<VertexId, VertexId> undirected() const {
    return tail <= tip ? std::pair{tail, tip} : std::pair{tip, tail};
  }
  bool operator==(const DirectedEdge&) const = default;
  bool operator<(const DirectedEdge& o) const {
    return std::pair{tail, tip} < std::pair{o.tail, o.tip};
  }
};

enum class LatticeKind { hypercubic, triangular, hexagonal };

/// Geometry of one of the supported regular lattices.
///
/// Star vectors are listed counterclockwise starting from e_1 = (1,0)
/// (hexagonal: the first direction of the reference sublattice). For
/// hypercubic and triangular lattices the list is closed under negation
/// with e_{d+i} = -e_i in the hypercubic ordering convention.
struct LatticeSpec {
  LatticeKind kind = LatticeKind::hypercubic;
  int dim = 2;
  int degree = 4;
  int plane_edges = 4;   // edges contained in a 2d plane: 4 / 6 / 3
  double c_lattice = 2;  // 2 (Z^d), 3 (T), 3/2 (H)

  // Unit star vectors in the plane (2d lattices only).
  std::vector<std::array<double, 2>> star_real;
  // Star steps in integer Bravais coordinates (2d lattices; for the
  // hexagonal lattice these are the A-sublattice steps, see graph.cpp).
  std::vector<std::array<int, 2>> star_steps;

  /// cos(2*pi*alpha/p) as an exact rational for the supported p.
  double gamma(int alpha) const;

  static LatticeSpec z2();
  static LatticeSpec triangular();
  static LatticeSpec hexagonal();
  static LatticeSpec hypercubic(int d);
  static LatticeSpec parse(const std::string& name);  // "Z2" | "tri" | "hex"
  std::string name() const;
};

class FiniteGraph;

/// The ordered set E_v of directed edges with tail v.
struct EdgeStar {
  VertexId center = -1;
  std::vector<DirectedEdge> edges;
};

/// A finite connected graph with an optional Dirichlet boundary subset.
///
/// Vertices are dense indices 0..n-1 assigned at construction. The
/// neighbor lists keep a fixed order (lattice orientation order for
/// grid-built graphs, ascending ids otherwise) so that edge and
/// Grassmann-generator indexing is reproducible.
class FiniteGraph {
 public:
  FiniteGraph(int n, std::vector<std::pair<int, int>> edges,
              std::vector<int> boundary = {});

  static FiniteGraph complete(int n);
  static FiniteGraph cycle(int n);
  static FiniteGraph path(int n);

  int vertex_count() const { return n_; }
  int interior_count() const { return static_cast<int>(interior_.size()); }
  int edge_count() const { return static_cast<int>(edges_.size()); }

  bool has_vertex(VertexId v) const { return v >= 0 && v < n_; }
  bool is_boundary(VertexId v) const { return boundary_flag_[check(v)]; }
  bool has_boundary() const { return boundary_count_ > 0; }
  const std::vector<VertexId>& interior() const { return interior_; }
  const std::vector<VertexId>& boundary() const { return boundary_; }

  int degree(VertexId v) const { return static_cast<int>(adj_[check(v)].size()); }
  const std::vector<VertexId>& neighbors(VertexId v) const { return adj_[check(v)]; }
  bool adjacent(VertexId u, VertexId v) const;

  /// Undirected edges as canonical (min,max) pairs in a fixed order.
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  int edge_index(VertexId u, VertexId v) const;  // -1 if absent
  DirectedEdge canonical_edge(int index) const {
    auto [a, b] = edges_.at(index);
    return {a, b};
  }

  /// All directed edges with tail v, in the natural orientation order.
  /// Requires the full star: v must not sit on the Dirichlet boundary.
  EdgeStar star(VertexId v) const;

  // Lattice metadata for grid-built graphs.
  bool has_lattice() const { return lattice_.has_value(); }
  const LatticeSpec& lattice() const;
  /// Bravais coordinates (n, m, sublattice) of a grid vertex.
  std::array<int, 3> coords(VertexId v) const;
  /// Vertex at given coordinates, or nullopt.
  std::optional<VertexId> vertex_at(int n, int m, int sub = 0) const;

  // Mutators used by the grid builders only.
  void attach_lattice(LatticeSpec spec, std::vector<std::array<int, 3>> coords);

 private:
  int check(VertexId v) const {
    if (!has_vertex(v)) throw ValidationError("vertex id out of range");
    return v;
  }

  int n_ = 0;
  std::vector<std::pair<int, int>> edges_;
  std::vector<std::vector<VertexId>> adj_;
  std::vector<bool> boundary_flag_;
  std::vector<VertexId> interior_;
  std::vector<VertexId> boundary_;
  int boundary_count_ = 0;
  std::map<std::pair<int, int>, int> edge_index_;

  std::optional<LatticeSpec> lattice_;
  std::vector<std::array<int, 3>> coords_;
  std::map<std::array<int, 3>, VertexId> coord_index_;
};

/// True iff no two members of V are nearest neighbors.
bool is_good_set(const FiniteGraph& g, std::span<const VertexId> vs);

/// Induced subgraph of a W x H lattice patch with its exterior boundary
/// wired in as Dirichlet vertices. Edges joining two boundary vertices
/// are dropped (they are never part of a wired spanning tree).
FiniteGraph build_grid(const LatticeSpec& lattice, int width, int height);

/// Hypercubic box with the given interior extents in d dimensions.
FiniteGraph build_box(const std::vector<int>& dims);

/// Z^2 intersected with the open disk of the given radius, plus its
/// exterior boundary. Used by the scaling-limit studies.
FiniteGraph build_disk_grid(double radius);

// JSON graph files: {"vertices":[...], "edges":[[u,v],...], "boundary":[...]}
FiniteGraph graph_from_json(const std::string& text);
std::string graph_to_json(const FiniteGraph& g);
FiniteGraph load_graph_file(const std::string& path);

}  // namespace ustlab
