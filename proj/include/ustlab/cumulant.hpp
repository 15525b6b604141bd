#pragma once

#include <map>
#include <span>
#include <unordered_map>
#include <vector>

#include "ustlab/transfer_current.hpp"

namespace ustlab {

struct CumulantQuery {
  std::vector<VertexId> vertices;
  std::vector<int> degrees;
};

/// One variable of the generalized cumulant: either a star variable
/// (all selections of `target` edges from `allowed`, with the rest of
/// `allowed` forced absent) or a forced single edge factor (zeta site).
struct CumulantSite {
  VertexId vertex = -1;
  std::vector<DirectedEdge> allowed;
  int target = 0;
  bool forced_single = false;

  static CumulantSite star_site(const FiniteGraph& g, VertexId v, int k);
  static CumulantSite zeta_site(const DirectedEdge& e);
};

/// Joint-cumulant engine over a family of sites:
///   prod_i (-1)^{k_i} * sum over per-site subsets E_i (|E_i| >= k_i)
///   of prod_i (-1)^{|E_i|} binom(|E_i|, k_i) * S_co(E),
/// with S_co(E) the signed sum over permutations of E whose induced site
/// multigraph is connected. Connected sums are memoized per edge subset,
/// so sweeping degree profiles over fixed stars reuses the heavy part.
class CumulantEngine {
 public:
  CumulantEngine(const TransferMatrix& m, std::vector<CumulantSite> sites,
                 int max_sum_edges = 13, int threads = 1);

  double value();  // with the stored targets
  double value(std::span<const int> targets);

  int site_count() const { return static_cast<int>(sites_.size()); }
  const std::vector<CumulantSite>& sites() const { return sites_; }

 private:
  double compute_connected(uint32_t mask) const;

  std::vector<CumulantSite> sites_;
  std::vector<int> owner_;
  Eigen::MatrixXd kmat_;
  std::vector<std::vector<int>> site_positions_;
  int max_sum_edges_;
  int threads_;
  std::unordered_map<uint32_t, double> memo_;
};

/// Joint cumulant of the degree-indicator variables at a good vertex
/// set, by the connected-permutation expansion.
double cumulant_direct(const TransferMatrix& m, const CumulantQuery& q,
                       int max_sum_edges = 13, int threads = 1);

/// The same cumulant through joint moments (degree PMFs per partition
/// block) and Moebius inversion over the partition lattice; the
/// independent oracle for cumulant_direct.
double cumulant_via_moments(const TransferMatrix& m, const CumulantQuery& q,
                            int max_vertices = 6);

/// Moment reconstruction E[prod_{i in A} X_i] from a cumulant table
/// keyed by subset bitmask over the n variables.
double moments_from_cumulants(const std::map<uint32_t, double>& kappa, int n);

void for_each_partition(
    int n, const std::function<void(const std::vector<std::vector<int>>&)>& fn);

/// Cumulant pieces for an adjacent pair v ~ w with the shared edge
/// handled by flag: edge_in_tree = true gives the trivariate cumulant
/// kappa(X'^{k_v-1} Y'_v, X'^{k_w-1} Y'_w, zeta({v,w})) over the reduced
/// stars; false gives the bivariate kappa(X'^{k_v} Y'_v, X'^{k_w} Y'_w).
double neighbor_cumulant(const TransferMatrix& m, VertexId v, VertexId w,
                         int k_v, int k_w, bool edge_in_tree,
                         int max_sum_edges = 13);

/// P(D_v = k_v, D_w = k_w, {v,w} in/out of T) reconstructed from the
/// cumulant pieces through the three-variable partition sum.
double neighbor_joint_probability(const TransferMatrix& m, VertexId v,
                                  VertexId w, int k_v, int k_w,
                                  bool edge_in_tree, int max_sum_edges = 13);

}  // namespace ustlab
