#pragma once

#include <Eigen/Dense>
#include <memory>
#include <span>
#include <vector>

#include "ustlab/graph.hpp"
#include "ustlab/green.hpp"

namespace ustlab {

/// Determinant of a (not necessarily principal) minor via LU with
/// partial pivoting. Empty index sets give 1.
double det_submatrix(const Eigen::MatrixXd& m, std::span<const int> rows,
                     std::span<const int> cols);
double det_principal(const Eigen::MatrixXd& m, std::span<const int> idx);

/// Transfer-current matrix M(f,g) over directed edges, built from the
/// double discrete gradient of a Green's function. Entries for arbitrary
/// edges of the host graph are computed on demand; an edge universe can
/// be attached to get a materialized matrix for minor extraction.
class TransferMatrix {
 public:
  explicit TransferMatrix(GreenFunction green);
  TransferMatrix(GreenFunction green, std::vector<DirectedEdge> edges);

  const FiniteGraph& graph() const { return green_.graph(); }
  const GreenFunction& green() const { return green_; }

  /// M(f,g) for any two directed edges of the graph.
  double entry(const DirectedEdge& f, const DirectedEdge& g) const;

  // Materialized universe (when constructed with an edge list).
  const std::vector<DirectedEdge>& edges() const { return edges_; }
  const Eigen::MatrixXd& matrix() const { return mat_; }
  double entry(int i, int j) const { return mat_(i, j); }

  /// Matrix over an ad-hoc list of directed edges.
  Eigen::MatrixXd materialize(std::span<const DirectedEdge> es) const;

 private:
  void check_edge(const DirectedEdge& e) const;

  GreenFunction green_;
  std::vector<DirectedEdge> edges_;
  Eigen::MatrixXd mat_;
};

/// Canonical default: Dirichlet Green's function when the graph has a
/// boundary, otherwise grounded at vertex 0; universe = one naturally
/// oriented copy of every undirected edge.
TransferMatrix transfer_matrix(const FiniteGraph& g);

struct EdgeProbQuery {
  std::vector<DirectedEdge> required;   // F: edges forced into the tree
  std::vector<DirectedEdge> forbidden;  // G: edges forced out of it
};

/// P(F in T, G disjoint from T) as a single determinant of the modified
/// transfer-current matrix: rows for G are negated off the diagonal and
/// carry 1-M on it. Values within 1e-12 of [0,1] are clamped; anything
/// further out raises, since it indicates a logic error upstream.
double edge_probability(const TransferMatrix& m, const EdgeProbQuery& q);

/// Same probability through the inclusion-exclusion sum over subsets of
/// G of pure-inclusion determinants; the independent second path.
double inclusion_exclusion_probability(const TransferMatrix& m,
                                       const EdgeProbQuery& q,
                                       int max_enum = 20);

}  // namespace ustlab
