#include "ustlab/permutation.hpp"

#include <algorithm>
#include <bit>
#include <numeric>

namespace ustlab {

std::vector<int> StarSet::site_positions(int site) const {
  std::vector<int> out;
  for (int p = 0; p < size(); ++p)
    if (owner[p] == site) out.push_back(p);
  return out;
}

StarSet StarSet::from_stars(const FiniteGraph& g,
                            std::span<const VertexId> centers) {
  if (!is_good_set(g, centers))
    throw ValidationError("star set requires a good (non-adjacent) vertex family");
  StarSet s;
  s.sites = static_cast<int>(centers.size());
  if (g.has_lattice()) s.plane_edges = g.lattice().plane_edges;
  for (int i = 0; i < s.sites; ++i) {
    auto star = g.star(centers[i]);
    for (int d = 0; d < static_cast<int>(star.edges.size()); ++d) {
      s.edges.push_back(star.edges[d]);
      s.owner.push_back(i);
      s.direction.push_back(g.has_lattice() ? d : -1);
    }
  }
  return s;
}

int permutation_sign(std::span<const int> image) {
  int n = static_cast<int>(image.size());
  std::vector<char> seen(n, 0);
  int transpositions = 0;
  for (int start = 0; start < n; ++start) {
    if (seen[start] || image[start] < 0) continue;
    int len = 0;
    for (int x = start; !seen[x]; x = image[x]) {
      seen[x] = 1;
      ++len;
    }
    transpositions += len - 1;
  }
  return transpositions % 2 == 0 ? 1 : -1;
}

int EdgePermutation::sign() const { return permutation_sign(image); }

Classification classify(const StarSet& s, const EdgePermutation& tau) {
  int n = s.size();
  if (tau.size() != n) throw ValidationError("permutation size mismatch");
  Classification out;
  if (s.sites == 1) {
    out.connected = out.bare = true;
    return out;
  }
  // One multigraph edge per cross-star mapping f -> tau(f).
  std::vector<int> degree(s.sites, 0);
  std::vector<int> parent(s.sites);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  int cross = 0;
  for (int p = 0; p < n; ++p) {
    int a = s.owner[p], b = s.owner[tau(p)];
    if (a == b) continue;
    ++cross;
    ++degree[a];
    ++degree[b];
    parent[find(a)] = find(b);
  }
  int components = 0;
  for (int v = 0; v < s.sites; ++v)
    if (find(v) == v) ++components;
  out.connected = components == 1 && cross > 0;
  out.bare = out.connected &&
             std::all_of(degree.begin(), degree.end(), [](int d) { return d == 2; });
  if (out.bare) {
    out.sigma.assign(s.sites, -1);
    for (int p = 0; p < n; ++p)
      if (s.owner[p] != s.owner[tau(p)]) out.sigma[s.owner[p]] = s.owner[tau(p)];
  }
  return out;
}

void for_each_permutation(const StarSet& s,
                          const std::function<void(const EdgePermutation&)>& fn,
                          int max_perm) {
  int n = s.size();
  if (n > max_perm)
    throw GuardError("permutation enumeration over " + std::to_string(n) +
                     " edges exceeds the guard (" + std::to_string(max_perm) + ")");
  EdgePermutation tau;
  tau.image.resize(n);
  std::iota(tau.image.begin(), tau.image.end(), 0);
  do {
    fn(tau);
  } while (std::next_permutation(tau.image.begin(), tau.image.end()));
}

std::vector<EdgePermutation> enum_connected(const StarSet& s, int max_perm) {
  std::vector<EdgePermutation> out;
  for_each_permutation(
      s,
      [&](const EdgePermutation& tau) {
        if (classify(s, tau).connected) out.push_back(tau);
      },
      max_perm);
  return out;
}

namespace {

int exit_position(const StarSet& s, const std::vector<int>& star, int entry_pos,
                  int alpha) {
  if (s.plane_edges <= 0)
    throw ValidationError("entry/exit angles need lattice-tagged stars");
  int want = (s.direction[entry_pos] + alpha) % s.plane_edges;
  for (int p : star)
    if (s.direction[p] % s.plane_edges == want) return p;
  return -1;
}

}  // namespace

std::vector<EdgePermutation> enum_bare_compatible(const StarSet& s,
                                                  const std::vector<int>& eta,
                                                  const std::vector<int>& sigma,
                                                  const std::vector<int>& alpha) {
  int ns = s.sites;
  if (static_cast<int>(eta.size()) != ns || static_cast<int>(sigma.size()) != ns ||
      static_cast<int>(alpha.size()) != ns)
    throw ValidationError("eta/sigma/alpha must prescribe every site");
  // sigma must be a single cycle without fixed points
  {
    std::vector<char> seen(ns, 0);
    int x = 0, len = 0;
    do {
      if (x < 0 || x >= ns || seen[x] || sigma[x] == x) return {};
      seen[x] = 1;
      ++len;
      x = sigma[x];
    } while (x != 0);
    if (len != ns) return {};
  }

  std::vector<std::vector<int>> stars(ns);
  for (int i = 0; i < ns; ++i) stars[i] = s.site_positions(i);
  std::vector<int> exit_pos(ns);
  for (int v = 0; v < ns; ++v) {
    if (s.owner[eta[v]] != v) throw ValidationError("entry edge not in its star");
    exit_pos[v] = exit_position(s, stars[v], eta[v], alpha[v]);
    if (exit_pos[v] < 0) return {};  // prescribed exit edge missing
  }

  // Per site: exit -> entry of the next site; the rest of the star maps
  // bijectively onto the star minus its entry edge.
  std::vector<std::vector<int>> dom(ns), cod(ns);
  for (int v = 0; v < ns; ++v) {
    for (int p : stars[v]) {
      if (p != exit_pos[v]) dom[v].push_back(p);
      if (p != eta[v]) cod[v].push_back(p);
    }
  }

  std::vector<EdgePermutation> out;
  EdgePermutation tau;
  tau.image.assign(s.size(), -1);
  for (int v = 0; v < ns; ++v) tau.image[exit_pos[v]] = eta[sigma[v]];

  std::function<void(int)> rec = [&](int v) {
    if (v == ns) {
      out.push_back(tau);
      return;
    }
    std::vector<int> perm = cod[v];
    std::sort(perm.begin(), perm.end());
    do {
      for (size_t i = 0; i < dom[v].size(); ++i) tau.image[dom[v][i]] = perm[i];
      rec(v + 1);
    } while (std::next_permutation(perm.begin(), perm.end()));
    for (int p : dom[v]) tau.image[p] = -1;
  };
  rec(0);
  return out;
}

SurgeryData surgery(const StarSet& s, const EdgePermutation& tau, int site) {
  auto cls = classify(s, tau);
  if (!cls.bare) throw ValidationError("surgery requires a bare permutation");
  SurgeryData d;
  d.site = site;
  auto star = s.site_positions(site);
  for (int p : star) {
    if (s.owner[tau(p)] != site) d.exit_pos = p;
  }
  // entry edge: hit from outside the star
  for (int p = 0; p < s.size(); ++p)
    if (s.owner[p] != site && s.owner[tau(p)] == site) d.entry_pos = tau(p);
  if (d.entry_pos < 0 || d.exit_pos < 0)
    throw ValidationError("site has no entry/exit edge (not bare?)");
  int p_mod = s.plane_edges;
  if (p_mod <= 0 || s.direction[d.entry_pos] < 0 || s.direction[d.exit_pos] < 0)
    throw ValidationError("surgery needs lattice-tagged stars for the angle index");
  d.alpha = ((s.direction[d.exit_pos] - s.direction[d.entry_pos]) % p_mod + p_mod) % p_mod;

  // omega: identify entry and exit; when alpha = 0 the exit edge equals
  // the entry edge and omega is plainly tau restricted to the rest.
  d.omega.assign(s.size(), -1);
  for (int p : star) {
    if (p == d.entry_pos) continue;
    d.omega[p] = p == d.exit_pos ? tau(d.entry_pos) : tau(p);
  }

  d.tau_minus.assign(s.size(), -1);
  for (int p = 0; p < s.size(); ++p)
    if (s.owner[p] != site) d.tau_minus[p] = tau(p);
  d.tau_minus[d.entry_pos] = tau(d.exit_pos);
  // incoming cross-mapping now routes through the entry edge only
  return d;
}

EdgePermutation surgery_recombine(const StarSet& s, const SurgeryData& d) {
  EdgePermutation tau;
  tau.image.assign(s.size(), -1);
  for (int p = 0; p < s.size(); ++p) {
    if (s.owner[p] == d.site) continue;
    tau.image[p] = d.tau_minus[p];
  }
  // local action
  for (int p = 0; p < s.size(); ++p) {
    if (s.owner[p] != d.site || p == d.entry_pos) continue;
    if (p == d.exit_pos && d.alpha != 0) continue;  // set below
    tau.image[p] = d.omega[p];
  }
  tau.image[d.exit_pos] = d.tau_minus[d.entry_pos];
  if (d.alpha != 0) tau.image[d.entry_pos] = d.omega[d.exit_pos];
  return tau;
}

bool omega_bijection_check(const StarSet& s, const std::vector<int>& eta,
                           const std::vector<int>& sigma,
                           const std::vector<int>& alpha, int site) {
  auto taus = enum_bare_compatible(s, eta, sigma, alpha);
  if (taus.empty()) return false;
  std::map<std::vector<int>, size_t> fibers;
  for (auto& tau : taus) ++fibers[surgery(s, tau, site).omega];

  // The omegas must exhaust S(E_v \ {eta(v)}), each reached by equally
  // many compatible tau (the local action is reconstructed uniquely;
  // only the other sites vary).
  size_t star_size = s.site_positions(site).size();
  size_t expect = 1;
  for (size_t i = 2; i < star_size; ++i) expect *= i;
  if (fibers.size() != expect) return false;
  size_t fiber_size = taus.size() / fibers.size();
  if (fiber_size * fibers.size() != taus.size()) return false;
  for (auto& [omega, count] : fibers)
    if (count != fiber_size) return false;
  return true;
}

namespace {

// Depth-first sum over connected permutations with an incremental sign
// (inversion parity), incremental cross-site link counts, and pruning of
// sealed block prefixes. Kept as a plain struct so the recursion inlines.
struct ConnectedSumDfs {
  int n = 0;
  int sites = 0;
  const int* own = nullptr;
  const uint64_t* prefix = nullptr;
  std::vector<double> k_rows;  // row-major
  std::vector<int> cnt;
  std::vector<uint32_t> adj;
  uint64_t used = 0;
  double total = 0;

  bool connected() const {
    uint32_t seen = 1, frontier = 1;
    while (frontier) {
      uint32_t next = 0;
      uint32_t f = frontier;
      while (f) {
        next |= adj[std::countr_zero(f)];
        f &= f - 1;
      }
      frontier = next & ~seen;
      seen |= next;
    }
    return seen == (uint32_t{1} << sites) - 1;
  }

  void rec(int pos, int sign, double prod) {
    if (pos == n) {
      if (sites == 1 || connected()) total += sign * prod;
      return;
    }
    const int site = own[pos];
    const bool last_of_block = pos + 1 == n || own[pos + 1] != site;
    const double* row = k_rows.data() + static_cast<size_t>(pos) * n;
    const uint64_t full = (uint64_t{1} << n) - 1;
    for (uint64_t free = full & ~used; free; free &= free - 1) {
      const int j = std::countr_zero(free);
      const double value = row[j];
      if (value == 0.0) continue;
      const uint64_t bit = uint64_t{1} << j;
      const int swaps = std::popcount(used >> j >> 1);
      const int to = own[j];
      used |= bit;
      const bool linked = site != to;
      if (linked) {
        if (cnt[site * sites + to]++ == 0) adj[site] |= uint32_t{1} << to;
        if (cnt[to * sites + site]++ == 0) adj[to] |= uint32_t{1} << site;
      }
      // A completed block prefix whose images are exactly its own edges
      // can never connect to the remaining sites: prune.
      const bool sealed = last_of_block && site + 1 < sites && used == prefix[site];
      if (!sealed) rec(pos + 1, swaps % 2 ? -sign : sign, prod * value);
      if (linked) {
        if (--cnt[site * sites + to] == 0) adj[site] &= ~(uint32_t{1} << to);
        if (--cnt[to * sites + site] == 0) adj[to] &= ~(uint32_t{1} << site);
      }
      used &= ~bit;
    }
  }
};

}  // namespace

double connected_signed_sum(const Eigen::MatrixXd& k, std::span<const int> owner,
                            int max_size) {
  int n = static_cast<int>(owner.size());
  if (n == 0) return 1.0;
  if (n > max_size)
    throw GuardError("connected permutation sum over " + std::to_string(n) +
                     " edges exceeds the budget (" + std::to_string(max_size) + ")");
  int sites = *std::max_element(owner.begin(), owner.end()) + 1;

  // Positions must be grouped by site; reorder if a caller didn't.
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return owner[a] < owner[b]; });
  std::vector<int> own(n);
  Eigen::MatrixXd kk(n, n);
  for (int i = 0; i < n; ++i) {
    own[i] = owner[order[i]];
    for (int j = 0; j < n; ++j) kk(i, j) = k(order[i], order[j]);
  }
  // every site must hold at least one edge, else nothing can connect it
  if (sites > 1) {
    std::vector<char> present(sites, 0);
    for (int o : own) present[o] = 1;
    if (!std::all_of(present.begin(), present.end(), [](char c) { return c; }))
      return 0.0;
  }

  // prefix mask up to and including each site block
  std::vector<uint64_t> prefix(sites, 0);
  for (int i = 0; i < n; ++i)
    for (int b = own[i]; b < sites; ++b) prefix[b] |= uint64_t{1} << i;

  ConnectedSumDfs dfs;
  dfs.n = n;
  dfs.sites = sites;
  dfs.own = own.data();
  dfs.prefix = prefix.data();
  dfs.k_rows.resize(static_cast<size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) dfs.k_rows[static_cast<size_t>(i) * n + j] = kk(i, j);
  dfs.cnt.assign(static_cast<size_t>(sites) * sites, 0);
  dfs.adj.assign(sites, 0);
  dfs.rec(0, 1, 1.0);
  return dfs.total;
}

double connected_signed_sum_dp(const Eigen::MatrixXd& k,
                               std::span<const int> owner, int max_size) {
  int n = static_cast<int>(owner.size());
  if (n == 0) return 1.0;
  if (n > max_size)
    throw GuardError("connected permutation sum over " + std::to_string(n) +
                     " edges exceeds the budget (" + std::to_string(max_size) + ")");
  int sites = *std::max_element(owner.begin(), owner.end()) + 1;
  if (sites > 1) {
    std::vector<char> present(sites, 0);
    for (int o : owner) present[o] = 1;
    if (!std::all_of(present.begin(), present.end(), [](char c) { return c; }))
      return 0.0;
  }

  // pair-bit index for the site-link profile
  std::vector<int> pair_bit(static_cast<size_t>(sites) * sites, -1);
  int pairs = 0;
  for (int a = 0; a < sites; ++a)
    for (int b = a + 1; b < sites; ++b)
      pair_bit[a * sites + b] = pair_bit[b * sites + a] = pairs++;
  const size_t link_states = size_t{1} << pairs;
  if (n + pairs > 24) throw GuardError("site-link DP state space too large");

  // d[U * L]: signed weight of all prefix assignments using image set U
  // with cross-site link profile L. Rows are processed in mask-popcount
  // order, which an ascending scan respects since bits are only added.
  std::vector<double> d((size_t{1} << n) * link_states, 0.0);
  d[0] = 1.0;
  const uint32_t full = (uint32_t{1} << n) - 1;
  for (uint32_t u = 0; u < full; ++u) {
    const int row = std::popcount(u);
    const int site = owner[row];
    bool any = false;
    for (size_t l = 0; l < link_states && !any; ++l)
      any = d[(size_t{u} << pairs) | l] != 0.0;
    if (!any) continue;
    for (uint32_t free = full & ~u; free; free &= free - 1) {
      const int j = std::countr_zero(free);
      const double value = k(row, j);
      if (value == 0.0) continue;
      const double signed_value =
          std::popcount(u >> j >> 1) % 2 ? -value : value;
      const uint32_t nu = u | (uint32_t{1} << j);
      const int to = owner[j];
      const uint32_t link =
          site == to ? 0 : uint32_t{1} << pair_bit[site * sites + to];
      const size_t base = size_t{u} << pairs;
      const size_t nbase = size_t{nu} << pairs;
      for (size_t l = 0; l < link_states; ++l) {
        const double w = d[base | l];
        if (w != 0.0) d[nbase | (l | link)] += w * signed_value;
      }
    }
  }

  auto connected = [&](size_t l) {
    if (sites == 1) return true;
    uint32_t seen = 1, frontier = 1;
    while (frontier) {
      uint32_t next = 0;
      for (uint32_t f = frontier; f;) {
        int a = std::countr_zero(f);
        f &= f - 1;
        for (int b = 0; b < sites; ++b)
          if (b != a && (l >> pair_bit[a * sites + b] & 1))
            next |= uint32_t{1} << b;
      }
      frontier = next & ~seen;
      seen |= next;
    }
    return seen == (uint32_t{1} << sites) - 1;
  };
  double total = 0;
  for (size_t l = 0; l < link_states; ++l)
    if (connected(l)) total += d[(size_t{full} << pairs) | l];
  return total;
}

}  // namespace ustlab
