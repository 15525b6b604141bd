#include "ustlab/cumulant.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <functional>
#include <thread>

#include "ustlab/degree.hpp"
#include "ustlab/permutation.hpp"

namespace ustlab {

namespace {

double binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  double b = 1;
  for (int i = 0; i < k; ++i) b = b * (n - i) / (i + 1);
  return std::round(b);
}

}  // namespace

CumulantSite CumulantSite::star_site(const FiniteGraph& g, VertexId v, int k) {
  CumulantSite s;
  s.vertex = v;
  s.allowed = g.star(v).edges;
  s.target = k;
  return s;
}

CumulantSite CumulantSite::zeta_site(const DirectedEdge& e) {
  CumulantSite s;
  s.allowed = {e};
  s.target = 1;
  s.forced_single = true;
  return s;
}

CumulantEngine::CumulantEngine(const TransferMatrix& m,
                               std::vector<CumulantSite> sites, int max_sum_edges,
                               int threads)
    : sites_(std::move(sites)),
      max_sum_edges_(max_sum_edges),
      threads_(std::max(1, threads)) {
  std::vector<DirectedEdge> all;
  for (int i = 0; i < static_cast<int>(sites_.size()); ++i) {
    site_positions_.emplace_back();
    for (auto& e : sites_[i].allowed) {
      site_positions_.back().push_back(static_cast<int>(all.size()));
      all.push_back(e);
      owner_.push_back(i);
    }
  }
  if (all.size() > 31) throw GuardError("too many star edges for subset masks");
  if (static_cast<int>(all.size()) > max_sum_edges_)
    throw GuardError("combined star size " + std::to_string(all.size()) +
                     " exceeds the permutation budget (" +
                     std::to_string(max_sum_edges_) + ")");
  kmat_ = m.materialize(all);
}

double CumulantEngine::compute_connected(uint32_t mask) const {
  std::vector<int> pos;
  for (int p = 0; p < static_cast<int>(owner_.size()); ++p)
    if (mask >> p & 1) pos.push_back(p);
  int k = static_cast<int>(pos.size());
  Eigen::MatrixXd sub(k, k);
  std::vector<int> sub_owner(k);
  for (int i = 0; i < k; ++i) {
    sub_owner[i] = owner_[pos[i]];
    for (int j = 0; j < k; ++j) sub(i, j) = kmat_(pos[i], pos[j]);
  }
  return connected_signed_sum_dp(sub, sub_owner, max_sum_edges_);
}

double CumulantEngine::value() {
  std::vector<int> targets;
  for (auto& s : sites_) targets.push_back(s.target);
  return value(targets);
}

double CumulantEngine::value(std::span<const int> targets) {
  int ns = site_count();
  if (static_cast<int>(targets.size()) != ns)
    throw ValidationError("one degree target per site required");
  double prefactor = 1;
  for (int i = 0; i < ns; ++i) {
    if (sites_[i].forced_single) continue;
    if (targets[i] < 0)
      throw ValidationError("degree targets must be non-negative");
    // a target beyond the star size makes the variable identically zero
    if (targets[i] > static_cast<int>(sites_[i].allowed.size())) return 0.0;
    if (targets[i] % 2 == 1) prefactor = -prefactor;
  }

  // Phase 1: collect the weighted subset terms.
  std::vector<std::pair<uint32_t, double>> terms;
  std::function<void(int, uint32_t, double)> rec = [&](int i, uint32_t mask,
                                                       double weight) {
    if (i == ns) {
      terms.emplace_back(mask, weight);
      return;
    }
    const auto& site = sites_[i];
    const auto& pos = site_positions_[i];
    int deg = static_cast<int>(pos.size());
    if (site.forced_single) {
      uint32_t add = 0;
      for (int p : pos) add |= uint32_t{1} << p;
      rec(i + 1, mask | add, weight);
      return;
    }
    int k = targets[i];
    for (uint32_t local = 0; local < (uint32_t{1} << deg); ++local) {
      int size = std::popcount(local);
      if (size < k) continue;
      if (size == 0 && ns > 1) continue;  // empty site disconnects
      uint32_t add = 0;
      for (int j = 0; j < deg; ++j)
        if (local >> j & 1) add |= uint32_t{1} << pos[j];
      double w = (size % 2 == 0 ? 1.0 : -1.0) * binom(size, k);
      rec(i + 1, mask | add, weight * w);
    }
  };
  rec(0, 0, 1.0);

  // Phase 2: fill in missing connected sums, optionally in parallel.
  // Each subset is computed independently, so the values (and therefore
  // the fixed-order accumulation below) do not depend on the thread count.
  std::vector<uint32_t> missing;
  for (auto& [mask, weight] : terms)
    if (!memo_.count(mask)) {
      memo_.emplace(mask, 0.0);  // reserve
      missing.push_back(mask);
    }
  if (threads_ <= 1 || missing.size() < 2) {
    for (uint32_t mask : missing) memo_[mask] = compute_connected(mask);
  } else {
    // big subsets first so the chunks balance
    std::sort(missing.begin(), missing.end(), [](uint32_t a, uint32_t b) {
      return std::popcount(a) > std::popcount(b);
    });
    std::atomic<size_t> next{0};
    std::vector<double> results(missing.size());
    auto worker = [&] {
      for (size_t i; (i = next.fetch_add(1)) < missing.size();)
        results[i] = compute_connected(missing[i]);
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < threads_; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    for (size_t i = 0; i < missing.size(); ++i) memo_[missing[i]] = results[i];
  }

  // Phase 3: deterministic fixed-order reduction.
  double total = 0;
  for (auto& [mask, weight] : terms) total += weight * memo_.at(mask);
  return prefactor * total;
}

namespace {

void validate_query(const TransferMatrix& m, const CumulantQuery& q) {
  if (q.vertices.empty()) throw ValidationError("empty cumulant query");
  if (q.vertices.size() != q.degrees.size())
    throw ValidationError("one degree target per vertex required");
  if (!is_good_set(m.graph(), q.vertices))
    throw ValidationError(
        "vertices share an edge; use the neighbor_cumulant operations");
  for (size_t i = 0; i < q.vertices.size(); ++i)
    if (q.degrees[i] < 1)
      throw ValidationError("degree targets must be >= 1");
}

}  // namespace

double cumulant_direct(const TransferMatrix& m, const CumulantQuery& q,
                       int max_sum_edges, int threads) {
  validate_query(m, q);
  std::vector<CumulantSite> sites;
  for (size_t i = 0; i < q.vertices.size(); ++i)
    sites.push_back(CumulantSite::star_site(m.graph(), q.vertices[i], q.degrees[i]));
  CumulantEngine engine(m, std::move(sites), max_sum_edges, threads);
  return engine.value();
}

void for_each_partition(
    int n, const std::function<void(const std::vector<std::vector<int>>&)>& fn) {
  std::vector<std::vector<int>> blocks;
  std::function<void(int)> rec = [&](int i) {
    if (i == n) {
      fn(blocks);
      return;
    }
    // index-based: the recursion appends blocks, so iterators would dangle
    size_t existing = blocks.size();
    for (size_t bi = 0; bi < existing; ++bi) {
      blocks[bi].push_back(i);
      rec(i + 1);
      blocks[bi].pop_back();
    }
    blocks.push_back({i});
    rec(i + 1);
    blocks.pop_back();
  };
  rec(0);
}

double cumulant_via_moments(const TransferMatrix& m, const CumulantQuery& q,
                            int max_vertices) {
  validate_query(m, q);
  int n = static_cast<int>(q.vertices.size());
  if (n > max_vertices)
    throw GuardError("moment-route cumulant limited to " +
                     std::to_string(max_vertices) + " vertices");
  double total = 0;
  for_each_partition(n, [&](const std::vector<std::vector<int>>& blocks) {
    double prod = 1;
    for (auto& b : blocks) {
      std::vector<VertexId> vs;
      std::vector<int> ks;
      for (int i : b) {
        vs.push_back(q.vertices[i]);
        ks.push_back(q.degrees[i]);
      }
      prod *= degree_pmf_joint(m, vs, ks);
    }
    int sz = static_cast<int>(blocks.size());
    double fact = 1;  // (|pi|-1)!
    for (int i = 2; i < sz; ++i) fact *= i;
    total += (sz % 2 == 1 ? fact : -fact) * prod;
  });
  return total;
}

double moments_from_cumulants(const std::map<uint32_t, double>& kappa, int n) {
  double total = 0;
  for_each_partition(n, [&](const std::vector<std::vector<int>>& blocks) {
    double prod = 1;
    for (auto& b : blocks) {
      uint32_t mask = 0;
      for (int i : b) mask |= uint32_t{1} << i;
      auto it = kappa.find(mask);
      if (it == kappa.end()) throw ValidationError("missing block cumulant");
      prod *= it->second;
    }
    total += prod;
  });
  return total;
}

namespace {

struct NeighborSetup {
  DirectedEdge shared;
  CumulantSite site_v;  // reduced star of v, target as requested
  CumulantSite site_w;
};

NeighborSetup neighbor_setup(const TransferMatrix& m, VertexId v, VertexId w,
                             int target_v, int target_w) {
  const FiniteGraph& g = m.graph();
  if (!g.adjacent(v, w))
    throw ValidationError("neighbor operations require adjacent vertices");
  if (g.is_boundary(v) || g.is_boundary(w))
    throw ValidationError("degree statistics need interior vertices");
  NeighborSetup s;
  auto [a, b] = DirectedEdge{v, w}.undirected();
  s.shared = {a, b};
  auto reduced = [&](VertexId x, int t) {
    CumulantSite site;
    site.vertex = x;
    site.target = t;
    for (auto& e : g.star(x).edges)
      if (e.undirected() != s.shared.undirected()) site.allowed.push_back(e);
    return site;
  };
  s.site_v = reduced(v, target_v);
  s.site_w = reduced(w, target_w);
  return s;
}

/// kappa over an arbitrary subset of the three neighbor variables.
double neighbor_kappa(const TransferMatrix& m, const NeighborSetup& s,
                      bool use_v, bool use_w, bool use_zeta, int max_sum_edges) {
  std::vector<CumulantSite> sites;
  if (use_v) sites.push_back(s.site_v);
  if (use_w) sites.push_back(s.site_w);
  if (use_zeta) sites.push_back(CumulantSite::zeta_site(s.shared));
  CumulantEngine engine(m, std::move(sites), max_sum_edges);
  return engine.value();
}

}  // namespace

double neighbor_cumulant(const TransferMatrix& m, VertexId v, VertexId w,
                         int k_v, int k_w, bool edge_in_tree, int max_sum_edges) {
  if (k_v < 1 || k_w < 1) throw ValidationError("degree targets must be >= 1");
  if (edge_in_tree) {
    auto s = neighbor_setup(m, v, w, k_v - 1, k_w - 1);
    return neighbor_kappa(m, s, true, true, true, max_sum_edges);
  }
  auto s = neighbor_setup(m, v, w, k_v, k_w);
  return neighbor_kappa(m, s, true, true, false, max_sum_edges);
}

double neighbor_joint_probability(const TransferMatrix& m, VertexId v, VertexId w,
                                  int k_v, int k_w, bool edge_in_tree,
                                  int max_sum_edges) {
  if (k_v < 1 || k_w < 1) throw ValidationError("degree targets must be >= 1");

  // Moments of (A, B, zeta) from their joint cumulants; A and B carry the
  // reduced stars. With the shared edge forced present the star targets
  // drop by one.
  auto moment_abz = [&](int tv, int tw) {
    auto s = neighbor_setup(m, v, w, tv, tw);
    double ka = neighbor_kappa(m, s, true, false, false, max_sum_edges);
    double kb = neighbor_kappa(m, s, false, true, false, max_sum_edges);
    double kz = neighbor_kappa(m, s, false, false, true, max_sum_edges);
    double kab = neighbor_kappa(m, s, true, true, false, max_sum_edges);
    double kaz = neighbor_kappa(m, s, true, false, true, max_sum_edges);
    double kbz = neighbor_kappa(m, s, false, true, true, max_sum_edges);
    double kabz = neighbor_kappa(m, s, true, true, true, max_sum_edges);
    return ka * kb * kz + kab * kz + kaz * kb + kbz * ka + kabz;
  };

  double p;
  if (edge_in_tree) {
    p = moment_abz(k_v - 1, k_w - 1);
  } else {
    auto s = neighbor_setup(m, v, w, k_v, k_w);
    double ka = neighbor_kappa(m, s, true, false, false, max_sum_edges);
    double kb = neighbor_kappa(m, s, false, true, false, max_sum_edges);
    double kab = neighbor_kappa(m, s, true, true, false, max_sum_edges);
    p = (kab + ka * kb) - moment_abz(k_v, k_w);
  }
  if (p < -1e-10 || p > 1 + 1e-10)
    throw std::logic_error("neighbor joint probability escaped [0,1]");
  return std::clamp(p, 0.0, 1.0);
}

}  // namespace ustlab
