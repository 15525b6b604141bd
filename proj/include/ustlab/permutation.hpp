#pragma once

#include <Eigen/Dense>
#include <functional>
#include <span>
#include <vector>

#include "ustlab/graph.hpp"

namespace ustlab {

/// A star-tagged edge set: the disjoint union of edge stars (or star
/// subsets) of a family of sites. Positions are grouped by site. When
/// the edges come from a lattice graph, `direction` carries the index
/// into the lattice star ordering and `plane_edges` the count p used
/// for entry/exit angle arithmetic.
struct StarSet {
  std::vector<DirectedEdge> edges;
  std::vector<int> owner;
  std::vector<int> direction;  // -1 when not lattice-tagged
  int sites = 0;
  int plane_edges = 0;

  int size() const { return static_cast<int>(edges.size()); }
  std::vector<int> site_positions(int site) const;

  /// Full stars of the given centers (must form a good set so the stars
  /// are disjoint).
  static StarSet from_stars(const FiniteGraph& g,
                            std::span<const VertexId> centers);
};

/// A bijection on the positions of a StarSet.
struct EdgePermutation {
  std::vector<int> image;
  int size() const { return static_cast<int>(image.size()); }
  int operator()(int pos) const { return image[pos]; }
  int sign() const;
};

/// Sign of a partial permutation (positions with image -1 are outside
/// the support); computed from the cycle decomposition.
int permutation_sign(std::span<const int> image);

struct Classification {
  bool connected = false;
  bool bare = false;
  std::vector<int> sigma;  // induced site permutation when bare, |V| >= 2
};

/// Builds the induced site multigraph (one edge per cross-star mapping
/// f -> tau(f)) and tests connectivity and the all-degrees-2 property.
/// A single site counts as both connected and bare.
Classification classify(const StarSet& s, const EdgePermutation& tau);

void for_each_permutation(const StarSet& s,
                          const std::function<void(const EdgePermutation&)>& fn,
                          int max_perm = 9);
std::vector<EdgePermutation> enum_connected(const StarSet& s, int max_perm = 9);

/// Bare permutations entering site v through eta[v], exiting through the
/// edge at star angle index alpha[v] from the entry, and inducing the
/// cyclic site permutation sigma. Empty when a prescribed exit edge is
/// missing from the set.
std::vector<EdgePermutation> enum_bare_compatible(const StarSet& s,
                                                  const std::vector<int>& eta,
                                                  const std::vector<int>& sigma,
                                                  const std::vector<int>& alpha);

struct SurgeryData {
  int site = -1;
  int entry_pos = -1;  // eta(v)
  int exit_pos = -1;   // eta^alpha(v)
  int alpha = 0;
  std::vector<int> omega;      // permutation on E_v minus the entry edge
  std::vector<int> tau_minus;  // permutation on (E minus E_v) plus the entry edge
};

/// Splits a bare permutation at a site into its local action omega and
/// the global skeleton tau-minus-omega.
SurgeryData surgery(const StarSet& s, const EdgePermutation& tau, int site);

/// Reassembles a bare permutation from its surgery pieces; inverse of
/// `surgery` by construction.
EdgePermutation surgery_recombine(const StarSet& s, const SurgeryData& d);

/// Checks that tau -> omega_v^tau maps the compatible permutations
/// bijectively onto all permutations of E_v minus the entry edge.
bool omega_bijection_check(const StarSet& s, const std::vector<int>& eta,
                           const std::vector<int>& sigma,
                           const std::vector<int>& alpha, int site);

/// Sum over connected tau of sign(tau) * prod_i k(i, tau(i)), over
/// positions grouped by `owner`, by direct depth-first enumeration with
/// incremental sign and pruning of sealed site prefixes.
double connected_signed_sum(const Eigen::MatrixXd& k, std::span<const int> owner,
                            int max_size = 13);

/// The same connected sum evaluated by dynamic programming over
/// (image subset, site-link profile) states: prefixes of the
/// permutation sum are shared instead of re-walked, which turns the
/// factorial enumeration into O(2^n * n * 2^pairs). Exact same value;
/// the tests pin the two routes against each other.
double connected_signed_sum_dp(const Eigen::MatrixXd& k,
                               std::span<const int> owner, int max_size = 20);

}  // namespace ustlab
