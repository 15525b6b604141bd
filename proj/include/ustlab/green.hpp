#pragma once

#include <Eigen/Dense>
#include <memory>

#include "ustlab/graph.hpp"

namespace ustlab {

/// Discrete Laplacian of the whole graph: diagonal -deg(v), 1 on edges.
Eigen::MatrixXd laplacian(const FiniteGraph& g);

/// Green's function of -Laplacian, either with Dirichlet boundary
/// conditions (zero on the boundary set) or grounded at a root vertex.
/// The table is stored over all vertices, extended by zero on the
/// boundary / at the root. Immutable once built.
class GreenFunction {
 public:
  enum class Mode { dirichlet, grounded };

  GreenFunction(Mode mode, VertexId root, std::shared_ptr<const FiniteGraph> g,
                Eigen::MatrixXd table, double residual)
      : mode_(mode),
        root_(root),
        graph_(std::move(g)),
        table_(std::move(table)),
        residual_(residual) {}

  Mode mode() const { return mode_; }
  VertexId root() const { return root_; }
  const FiniteGraph& graph() const { return *graph_; }
  double operator()(VertexId u, VertexId v) const { return table_(u, v); }
  const Eigen::MatrixXd& table() const { return table_; }

  /// Maximum residual of (-Lap) G - I over the solved block.
  double residual() const { return residual_; }

 private:
  Mode mode_ = Mode::dirichlet;
  VertexId root_ = -1;
  std::shared_ptr<const FiniteGraph> graph_;
  Eigen::MatrixXd table_;
  double residual_ = 0;
};

GreenFunction green_dirichlet(std::shared_ptr<const FiniteGraph> g);
GreenFunction green_grounded(std::shared_ptr<const FiniteGraph> g, VertexId root);

// Convenience overloads copying the graph into shared ownership.
GreenFunction green_dirichlet(const FiniteGraph& g);
GreenFunction green_grounded(const FiniteGraph& g, VertexId root);

/// Dirichlet solver when a boundary exists, otherwise grounded at the
/// lowest vertex id. The default Green's function for statistics.
GreenFunction green_auto(std::shared_ptr<const FiniteGraph> g);
GreenFunction green_auto(const FiniteGraph& g);

}  // namespace ustlab
