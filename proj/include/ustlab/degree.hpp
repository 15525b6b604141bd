#pragma once

#include <span>
#include <vector>

#include "ustlab/transfer_current.hpp"

namespace ustlab {

/// P(D_v = k): alternating binomial-weighted sum of principal minors of
/// the transfer-current matrix over subsets of the star of v.
double degree_pmf_single(const TransferMatrix& m, VertexId v, int k,
                         int max_enum = 20);

/// Joint degree PMF over a good vertex set: sum over per-star selections
/// eta with |eta(v)| = k_v of P(eta in T, rest of the stars out of T),
/// each a single determinant.
double degree_pmf_joint(const TransferMatrix& m, std::span<const VertexId> vs,
                        std::span<const int> ks, int max_enum_joint = 24);

/// Closed-form degree PMF on the complete graph K_n, evaluated in
/// log-space so n up to 1e6 stays finite.
double kn_degree_closed_form(long long n, int k);

/// max_{1 <= k <= kmax} | P_n(D = k) - e^{-1}/(k-1)! |.
double poisson_limit_gap(long long n, int kmax);

}  // namespace ustlab
