#include "ustlab/degree.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>

namespace ustlab {

namespace {

double binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  double b = 1;
  for (int i = 0; i < k; ++i) b = b * (n - i) / (i + 1);
  return std::round(b);
}

void check_star_target(const TransferMatrix& m, VertexId v, int k) {
  const FiniteGraph& g = m.graph();
  if (g.is_boundary(v))
    throw ValidationError("degree statistics need an interior vertex");
  if (k < 1 || k > g.degree(v))
    throw ValidationError("degree target out of range 1..deg(v)");
}

}  // namespace

double degree_pmf_single(const TransferMatrix& m, VertexId v, int k, int max_enum) {
  const FiniteGraph& g = m.graph();
  if (g.is_boundary(v))
    throw ValidationError("degree statistics need an interior vertex");
  int deg = g.degree(v);
  if (k < 1) throw ValidationError("degree target must be >= 1");
  if (k > deg) return 0.0;
  if (deg > max_enum)
    throw GuardError("star of " + std::to_string(deg) +
                     " edges exceeds the enumeration guard");
  auto star = g.star(v);
  Eigen::MatrixXd base = m.materialize(star.edges);

  double total = 0;
  std::vector<int> idx;
  for (uint32_t mask = 0; mask < (uint32_t{1} << deg); ++mask) {
    int size = std::popcount(mask);
    if (size < k) continue;
    idx.clear();
    for (int j = 0; j < deg; ++j)
      if (mask >> j & 1) idx.push_back(j);
    double sign = (size % 2 == 0) ? 1.0 : -1.0;
    total += sign * binom(size, k) * det_principal(base, idx);
  }
  double p = (k % 2 == 0 ? 1.0 : -1.0) * total;
  if (p < -1e-12 || p > 1 + 1e-12)
    throw std::logic_error("degree PMF escaped [0,1]: " + std::to_string(p));
  return std::clamp(p, 0.0, 1.0);
}

double degree_pmf_joint(const TransferMatrix& m, std::span<const VertexId> vs,
                        std::span<const int> ks, int max_enum_joint) {
  if (vs.size() != ks.size())
    throw ValidationError("need one degree target per vertex");
  if (vs.empty()) return 1.0;
  const FiniteGraph& g = m.graph();
  if (!is_good_set(g, vs))
    throw ValidationError(
        "vertices share an edge; use the neighbor_cumulant operations for "
        "adjacent pairs");
  if (vs.size() == 1) return degree_pmf_single(m, vs[0], ks[0], max_enum_joint);

  int total_deg = 0;
  for (size_t i = 0; i < vs.size(); ++i) {
    check_star_target(m, vs[i], ks[i]);
    total_deg += g.degree(vs[i]);
  }
  if (total_deg > max_enum_joint)
    throw GuardError("combined star size " + std::to_string(total_deg) +
                     " exceeds the joint enumeration guard");

  std::vector<std::vector<DirectedEdge>> stars;
  for (VertexId v : vs) stars.push_back(g.star(v).edges);

  // Sum over per-star k_v-subsets; each term is one determinant query
  // over the full union of stars.
  double total = 0;
  std::vector<uint32_t> masks(vs.size(), 0);
  std::function<void(size_t, EdgeProbQuery&)> rec = [&](size_t i, EdgeProbQuery& q) {
    if (i == vs.size()) {
      total += edge_probability(m, q);
      return;
    }
    int deg = static_cast<int>(stars[i].size());
    for (uint32_t mask = 0; mask < (uint32_t{1} << deg); ++mask) {
      if (std::popcount(mask) != ks[i]) continue;
      size_t req0 = q.required.size(), forb0 = q.forbidden.size();
      for (int j = 0; j < deg; ++j)
        (mask >> j & 1 ? q.required : q.forbidden).push_back(stars[i][j]);
      rec(i + 1, q);
      q.required.resize(req0);
      q.forbidden.resize(forb0);
    }
  };
  EdgeProbQuery q;
  rec(0, q);
  if (total < -1e-12 || total > 1 + 1e-12)
    throw std::logic_error("joint degree PMF escaped [0,1]");
  return std::clamp(total, 0.0, 1.0);
}

double kn_degree_closed_form(long long n, int k) {
  if (n < 2) throw ValidationError("complete graph needs n >= 2");
  if (k < 1 || k > n - 1) throw ValidationError("degree out of range 1..n-1");
  // The bracket n*C(n-1,k) - C(n,1+k) collapses to k*C(n,k+1), leaving a
  // positive product safe to evaluate in log-space.
  double log_p = std::log(static_cast<double>(1 + k)) +
                 std::log(static_cast<double>(k)) +
                 std::lgamma(static_cast<double>(n + 1)) -
                 std::lgamma(static_cast<double>(k + 2)) -
                 std::lgamma(static_cast<double>(n - k)) -
                 (2.0 + k) * std::log(static_cast<double>(n - 1)) +
                 static_cast<double>(n) * std::log1p(-1.0 / static_cast<double>(n)) +
                 std::log(static_cast<double>(n));
  return std::exp(log_p);
}

double poisson_limit_gap(long long n, int kmax) {
  if (kmax < 1) throw ValidationError("kmax must be >= 1");
  double gap = 0;
  for (int k = 1; k <= kmax && k <= n - 1; ++k) {
    double limit = std::exp(-1.0 - std::lgamma(static_cast<double>(k)));
    gap = std::max(gap, std::abs(kn_degree_closed_form(n, k) - limit));
  }
  return gap;
}

}  // namespace ustlab
