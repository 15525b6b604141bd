#include "ustlab/transfer_current.hpp"

#include <algorithm>
#include <bit>
#include <set>

namespace ustlab {

double det_submatrix(const Eigen::MatrixXd& m, std::span<const int> rows,
                     std::span<const int> cols) {
  if (rows.size() != cols.size())
    throw ValidationError("determinant minor needs |rows| = |cols|");
  int k = static_cast<int>(rows.size());
  if (k == 0) return 1.0;
  if (k == 1) return m(rows[0], cols[0]);
  Eigen::MatrixXd sub(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) sub(i, j) = m(rows[i], cols[j]);
  return Eigen::PartialPivLU<Eigen::MatrixXd>(sub).determinant();
}

double det_principal(const Eigen::MatrixXd& m, std::span<const int> idx) {
  return det_submatrix(m, idx, idx);
}

TransferMatrix::TransferMatrix(GreenFunction green) : green_(std::move(green)) {}

TransferMatrix::TransferMatrix(GreenFunction green, std::vector<DirectedEdge> edges)
    : green_(std::move(green)), edges_(std::move(edges)) {
  int k = static_cast<int>(edges_.size());
  mat_.resize(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) mat_(i, j) = entry(edges_[i], edges_[j]);
  // The double gradient of a symmetric kernel is symmetric; make it exact.
  mat_ = ((mat_ + mat_.transpose()) / 2).eval();
}

void TransferMatrix::check_edge(const DirectedEdge& e) const {
  if (!graph().adjacent(e.tail, e.tip))
    throw ValidationError("edge (" + std::to_string(e.tail) + "," +
                          std::to_string(e.tip) + ") not in graph");
}

double TransferMatrix::entry(const DirectedEdge& f, const DirectedEdge& g) const {
  check_edge(f);
  check_edge(g);
  const GreenFunction& gr = green_;
  return gr(f.tip, g.tip) - gr(f.tip, g.tail) - gr(f.tail, g.tip) +
         gr(f.tail, g.tail);
}

Eigen::MatrixXd TransferMatrix::materialize(std::span<const DirectedEdge> es) const {
  int k = static_cast<int>(es.size());
  Eigen::MatrixXd m(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) m(i, j) = entry(es[i], es[j]);
  return m;
}

TransferMatrix transfer_matrix(const FiniteGraph& g) {
  auto shared = std::make_shared<FiniteGraph>(g);
  std::vector<DirectedEdge> universe;
  for (auto& [u, v] : shared->edges()) universe.push_back({u, v});
  return TransferMatrix(green_auto(shared), std::move(universe));
}

namespace {

// One canonically oriented copy per undirected edge; F and G must be
// disjoint as undirected edges.
std::pair<std::vector<DirectedEdge>, std::vector<DirectedEdge>> normalize_query(
    const TransferMatrix& m, const EdgeProbQuery& q) {
  std::set<std::pair<int, int>> seen;
  auto canon = [&](const DirectedEdge& e) {
    auto [a, b] = e.undirected();
    if (!seen.insert({a, b}).second)
      throw ValidationError("edge appears twice across the F/G query");
    return DirectedEdge{a, b};
  };
  std::vector<DirectedEdge> f, g;
  for (auto& e : q.required) f.push_back(canon(e));
  for (auto& e : q.forbidden) g.push_back(canon(e));
  for (auto& e : f) m.entry(e, e);  // validates membership
  for (auto& e : g) m.entry(e, e);
  return {std::move(f), std::move(g)};
}

double clamp_probability(double p, const char* what) {
  constexpr double slack = 1e-12;
  if (p < -slack || p > 1 + slack)
    throw std::logic_error(std::string(what) +
                           " produced a value outside [0,1]: " + std::to_string(p));
  return std::clamp(p, 0.0, 1.0);
}

}  // namespace

double edge_probability(const TransferMatrix& m, const EdgeProbQuery& q) {
  auto [f, g] = normalize_query(m, q);
  int nf = static_cast<int>(f.size());
  int ng = static_cast<int>(g.size());
  int n = nf + ng;
  if (n == 0) return 1.0;
  std::vector<DirectedEdge> all = f;
  all.insert(all.end(), g.begin(), g.end());
  Eigen::MatrixXd base = m.materialize(all);
  Eigen::MatrixXd mod(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i < nf)
        mod(i, j) = base(i, j);
      else if (i == j)
        mod(i, j) = 1 - base(i, j);
      else
        mod(i, j) = -base(i, j);
    }
  double det = Eigen::PartialPivLU<Eigen::MatrixXd>(mod).determinant();
  return clamp_probability(det, "edge_probability");
}

double inclusion_exclusion_probability(const TransferMatrix& m,
                                       const EdgeProbQuery& q, int max_enum) {
  auto [f, g] = normalize_query(m, q);
  int ng = static_cast<int>(g.size());
  if (ng > max_enum)
    throw GuardError("inclusion-exclusion over " + std::to_string(ng) +
                     " forbidden edges exceeds the guard");
  std::vector<DirectedEdge> edges = f;
  double total = 0;
  for (uint32_t mask = 0; mask < (uint32_t{1} << ng); ++mask) {
    edges.resize(f.size());
    for (int j = 0; j < ng; ++j)
      if (mask >> j & 1) edges.push_back(g[j]);
    Eigen::MatrixXd sub = m.materialize(edges);
    double det = sub.size() == 0
                     ? 1.0
                     : Eigen::PartialPivLU<Eigen::MatrixXd>(sub).determinant();
    total += (std::popcount(mask) % 2 == 0 ? 1.0 : -1.0) * det;
  }
  return clamp_probability(total, "inclusion_exclusion_probability");
}

}  // namespace ustlab
