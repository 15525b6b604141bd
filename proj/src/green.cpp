#include "ustlab/green.hpp"

namespace ustlab {

Eigen::MatrixXd laplacian(const FiniteGraph& g) {
  int n = g.vertex_count();
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
  for (int v = 0; v < n; ++v) lap(v, v) = -g.degree(v);
  for (auto& [u, v] : g.edges()) {
    lap(u, v) = 1;
    lap(v, u) = 1;
  }
  return lap;
}

namespace {

GreenFunction solve_block(std::shared_ptr<const FiniteGraph> g,
                          const std::vector<VertexId>& block,
                          GreenFunction::Mode mode, VertexId root) {
  int n = g->vertex_count();
  int m = static_cast<int>(block.size());
  Eigen::MatrixXd lap = laplacian(*g);
  Eigen::MatrixXd a(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) a(i, j) = -lap(block[i], block[j]);

  Eigen::LDLT<Eigen::MatrixXd> solver(a);
  if (solver.info() != Eigen::Success)
    throw ValidationError("Green's function system is singular");
  Eigen::MatrixXd inv = solver.solve(Eigen::MatrixXd::Identity(m, m));
  double residual = (a * inv - Eigen::MatrixXd::Identity(m, m)).cwiseAbs().maxCoeff();
  inv = ((inv + inv.transpose()) / 2).eval();  // enforce exact symmetry

  Eigen::MatrixXd table = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) table(block[i], block[j]) = inv(i, j);
  return GreenFunction(mode, root, std::move(g), std::move(table), residual);
}

}  // namespace

GreenFunction green_dirichlet(std::shared_ptr<const FiniteGraph> g) {
  if (!g->has_boundary())
    throw ValidationError(
        "graph has no Dirichlet boundary; use green_grounded with a root");
  return solve_block(g, g->interior(), GreenFunction::Mode::dirichlet, -1);
}

GreenFunction green_grounded(std::shared_ptr<const FiniteGraph> g, VertexId root) {
  if (!g->has_vertex(root)) throw ValidationError("root vertex not in graph");
  if (g->has_boundary())
    throw ValidationError("grounded mode expects a graph without boundary");
  std::vector<VertexId> block;
  for (int v = 0; v < g->vertex_count(); ++v)
    if (v != root) block.push_back(v);
  return solve_block(g, block, GreenFunction::Mode::grounded, root);
}

GreenFunction green_dirichlet(const FiniteGraph& g) {
  return green_dirichlet(std::make_shared<FiniteGraph>(g));
}

GreenFunction green_grounded(const FiniteGraph& g, VertexId root) {
  return green_grounded(std::make_shared<FiniteGraph>(g), root);
}

GreenFunction green_auto(std::shared_ptr<const FiniteGraph> g) {
  if (g->has_boundary()) return green_dirichlet(std::move(g));
  return green_grounded(std::move(g), 0);
}

GreenFunction green_auto(const FiniteGraph& g) {
  return green_auto(std::make_shared<FiniteGraph>(g));
}

}  // namespace ustlab
