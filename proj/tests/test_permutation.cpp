#include <doctest.h>

#include <cmath>
#include <numeric>

#include "ustlab/permutation.hpp"
#include "ustlab/sampler.hpp"

using namespace ustlab;

namespace {

// Two far-apart interior vertices of a lattice patch.
std::pair<FiniteGraph, std::vector<VertexId>> two_site_patch(
    const LatticeSpec& spec) {
  auto g = build_grid(spec, 5, 5);
  std::vector<VertexId> centers{*g.vertex_at(1, 1, 0), *g.vertex_at(3, 3, 0)};
  return {std::move(g), std::move(centers)};
}

StarSet trim_stars(const StarSet& s, int star_size) {
  StarSet out;
  out.sites = s.sites;
  out.plane_edges = s.plane_edges;
  std::vector<int> kept(s.sites, 0);
  for (int p = 0; p < s.size(); ++p) {
    if (kept[s.owner[p]] >= star_size) continue;
    ++kept[s.owner[p]];
    out.edges.push_back(s.edges[p]);
    out.owner.push_back(s.owner[p]);
    out.direction.push_back(s.direction[p]);
  }
  return out;
}

EdgePermutation identity_perm(int n) {
  EdgePermutation tau;
  tau.image.resize(n);
  std::iota(tau.image.begin(), tau.image.end(), 0);
  return tau;
}

}  // namespace

TEST_CASE("single site: every permutation is connected and bare") {
  auto g = FiniteGraph::complete(4);
  std::vector<VertexId> centers{0};
  auto s = StarSet::from_stars(g, centers);
  auto perms = enum_connected(s);
  CHECK(perms.size() == 6);  // 3! permutations of a 3-edge star
  for (auto& tau : perms) {
    auto cls = classify(s, tau);
    CHECK(cls.connected);
    CHECK(cls.bare);
  }
}

TEST_CASE("two sites mapping within their own stars are disconnected") {
  auto [g, centers] = two_site_patch(LatticeSpec::z2());
  auto s = StarSet::from_stars(g, centers);
  auto cls = classify(s, identity_perm(s.size()));
  CHECK_FALSE(cls.connected);
  CHECK_FALSE(cls.bare);
}

TEST_CASE("one cross-mapping each way: bare with the 2-cycle sigma") {
  auto [g, centers] = two_site_patch(LatticeSpec::z2());
  auto s = StarSet::from_stars(g, centers);
  auto tau = identity_perm(s.size());
  std::swap(tau.image[0], tau.image[4]);  // first edges of the two stars
  auto cls = classify(s, tau);
  CHECK(cls.connected);
  CHECK(cls.bare);
  REQUIRE(cls.sigma.size() == 2);
  CHECK(cls.sigma[0] == 1);
  CHECK(cls.sigma[1] == 0);
}

TEST_CASE("connected count: singleton stars admit exactly the swap") {
  auto [g, centers] = two_site_patch(LatticeSpec::z2());
  auto s = trim_stars(StarSet::from_stars(g, centers), 1);
  REQUIRE(s.size() == 2);
  auto perms = enum_connected(s);
  REQUIRE(perms.size() == 1);
  CHECK(perms[0].image == std::vector<int>{1, 0});
}

TEST_CASE("connected + disconnected = all permutations") {
  auto [g, centers] = two_site_patch(LatticeSpec::z2());
  auto s = trim_stars(StarSet::from_stars(g, centers), 3);
  int total = 0, connected = 0;
  for_each_permutation(s, [&](const EdgePermutation& tau) {
    ++total;
    connected += classify(s, tau).connected;
  });
  CHECK(total == 720);  // 6!
  CHECK(connected == static_cast<int>(enum_connected(s).size()));
  CHECK(connected < total);
}

TEST_CASE("sign: multiplicativity and the inversion route agree") {
  CounterRng rng(5, 0);
  for (int t = 0; t < 200; ++t) {
    int n = 2 + rng.next_below(6);
    auto random_perm = [&]() {
      std::vector<int> p(n);
      std::iota(p.begin(), p.end(), 0);
      for (int i = n - 1; i > 0; --i) std::swap(p[i], p[rng.next_below(i + 1)]);
      return p;
    };
    auto a = random_perm(), b = random_perm();
    std::vector<int> ab(n);
    for (int i = 0; i < n; ++i) ab[i] = a[b[i]];
    CHECK(permutation_sign(ab) == permutation_sign(a) * permutation_sign(b));
    // inversion-count definition
    int inv = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) inv += a[i] > a[j];
    CHECK(permutation_sign(a) == (inv % 2 == 0 ? 1 : -1));
  }
}

TEST_CASE("bare implies connected and |E_tau(V)| = |V|") {
  auto [g, centers] = two_site_patch(LatticeSpec::z2());
  auto s = trim_stars(StarSet::from_stars(g, centers), 3);
  for_each_permutation(s, [&](const EdgePermutation& tau) {
    auto cls = classify(s, tau);
    if (!cls.bare) return;
    CHECK(cls.connected);
    int cross = 0;
    for (int p = 0; p < s.size(); ++p)
      cross += s.owner[p] != s.owner[tau(p)];
    CHECK(cross == s.sites);
  });
}

TEST_CASE("bare-compatible enumeration") {
  auto [g, centers] = two_site_patch(LatticeSpec::z2());
  auto s = StarSet::from_stars(g, centers);
  auto pos0 = s.site_positions(0), pos1 = s.site_positions(1);
  std::vector<int> sigma{1, 0};

  SUBCASE("prescriptions are honored") {
    std::vector<int> eta{pos0[0], pos1[2]};
    std::vector<int> alpha{1, 3};
    auto taus = enum_bare_compatible(s, eta, sigma, alpha);
    CHECK(taus.size() == 36);  // 3! free choices per star
    for (auto& tau : taus) {
      auto cls = classify(s, tau);
      CHECK(cls.bare);
      CHECK(cls.sigma == sigma);
      auto d0 = surgery(s, tau, 0);
      CHECK(d0.entry_pos == eta[0]);
      CHECK(d0.alpha == alpha[0]);
    }
  }

  SUBCASE("missing exit edge empties the stream") {
    auto trimmed = trim_stars(s, 3);  // drop the -y edge of each star
    auto tpos0 = trimmed.site_positions(0), tpos1 = trimmed.site_positions(1);
    std::vector<int> eta{tpos0[0], tpos1[0]};
    std::vector<int> alpha{3, 0};  // exit at -y, which was removed
    CHECK(enum_bare_compatible(trimmed, eta, sigma, alpha).empty());
  }

  SUBCASE("fixed-point sigma is rejected as empty") {
    std::vector<int> eta{pos0[0], pos1[0]};
    std::vector<int> fixed{0, 1};
    CHECK(enum_bare_compatible(s, eta, fixed, {0, 0}).empty());
  }
}

TEST_CASE("surgery identities hold exhaustively on 2-site stars") {
  for (auto spec : {LatticeSpec::z2(), LatticeSpec::triangular()}) {
    auto [g, centers] = two_site_patch(spec);
    int star_cap = spec.kind == LatticeKind::triangular ? 3 : 4;
    auto s = trim_stars(StarSet::from_stars(g, centers), star_cap);
    CounterRng rng(31, 0);
    // randomized symmetric kernel for the product identity
    int n = s.size();
    Eigen::MatrixXd kernel(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j <= i; ++j)
        kernel(i, j) = kernel(j, i) = 1 + rng.next_unit();

    long long bare_count = 0;
    for_each_permutation(s, [&](const EdgePermutation& tau) {
      auto cls = classify(s, tau);
      if (!cls.bare) return;
      ++bare_count;
      for (int site : {0, 1}) {
        auto d = surgery(s, tau, site);
        // sign identity
        int expect = (d.alpha != 0 ? -1 : 1) * permutation_sign(d.tau_minus) *
                     permutation_sign(d.omega);
        CHECK(tau.sign() == expect);
        // round trip
        auto back = surgery_recombine(s, d);
        CHECK(back.image == tau.image);
        // kernel product identity: product over the star minus the exit
        // edge equals the row-substituted product over the star minus the
        // entry edge (exact multiset equality of factors)
        double lhs = 1, rhs = 1;
        for (int p : s.site_positions(site)) {
          if (p != d.exit_pos) lhs *= kernel(p, tau(p));
          if (p != d.entry_pos) {
            int row = p == d.exit_pos ? d.entry_pos : p;
            rhs *= kernel(row, d.omega[p]);
          }
        }
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-15));
      }
    }, 8);
    CHECK(bare_count > 0);
  }
}

TEST_CASE("omega bijection for star sizes 2, 3, 4") {
  auto [g, centers] = two_site_patch(LatticeSpec::z2());
  auto full = StarSet::from_stars(g, centers);
  for (int size : {2, 3, 4}) {
    auto s = trim_stars(full, size);
    auto pos0 = s.site_positions(0), pos1 = s.site_positions(1);
    bool any = false;
    for (int e0 = 0; e0 < size; ++e0)
      for (int a0 = 0; a0 < s.plane_edges; ++a0)
        for (int a1 = 0; a1 < s.plane_edges; ++a1) {
          std::vector<int> eta{pos0[e0], pos1[0]};
          std::vector<int> alpha{a0, a1};
          if (enum_bare_compatible(s, eta, {1, 0}, alpha).empty()) continue;
          any = true;
          CHECK(omega_bijection_check(s, eta, {1, 0}, alpha, 0));
          CHECK(omega_bijection_check(s, eta, {1, 0}, alpha, 1));
        }
    CHECK(any);
  }
}

TEST_CASE("triangular star: omega bijection") {
  auto [g, centers] = two_site_patch(LatticeSpec::triangular());
  auto s = trim_stars(StarSet::from_stars(g, centers), 3);
  auto pos0 = s.site_positions(0), pos1 = s.site_positions(1);
  bool any = false;
  for (int a0 = 0; a0 < 6; ++a0) {
    std::vector<int> eta{pos0[1], pos1[2]};
    if (enum_bare_compatible(s, eta, {1, 0}, {a0, 0}).empty()) continue;
    any = true;
    CHECK(omega_bijection_check(s, eta, {1, 0}, {a0, 0}, 0));
  }
  CHECK(any);
}

TEST_CASE("connected_signed_sum: one site gives the determinant") {
  CounterRng rng(77, 0);
  for (int n : {1, 2, 3, 4, 5}) {
    Eigen::MatrixXd k(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) k(i, j) = 2 * rng.next_unit() - 1;
    std::vector<int> owner(n, 0);
    double det = Eigen::PartialPivLU<Eigen::MatrixXd>(k).determinant();
    CHECK(connected_signed_sum(k, owner) == doctest::Approx(det).epsilon(1e-12));
  }
}

TEST_CASE("connected_signed_sum matches the filtered enumeration") {
  auto [g, centers] = two_site_patch(LatticeSpec::z2());
  auto s = trim_stars(StarSet::from_stars(g, centers), 3);
  int n = s.size();
  CounterRng rng(123, 0);
  Eigen::MatrixXd k(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) k(i, j) = 2 * rng.next_unit() - 1;
  double via_enum = 0;
  for_each_permutation(s, [&](const EdgePermutation& tau) {
    if (!classify(s, tau).connected) return;
    double prod = tau.sign();
    for (int p = 0; p < n; ++p) prod *= k(p, tau(p));
    via_enum += prod;
  });
  CHECK(connected_signed_sum(k, s.owner) ==
        doctest::Approx(via_enum).epsilon(1e-12));
  // empty set: the empty permutation is the identity with product 1
  CHECK(connected_signed_sum(Eigen::MatrixXd(0, 0), std::vector<int>{}) == 1.0);
}

TEST_CASE("three-site connected sum against enumeration") {
  // three sites with 2 edges each on a 7x7 grid diagonal
  auto g = build_grid(LatticeSpec::z2(), 7, 7);
  std::vector<VertexId> centers{*g.vertex_at(1, 1, 0), *g.vertex_at(3, 3, 0),
                                *g.vertex_at(5, 5, 0)};
  auto s = trim_stars(StarSet::from_stars(g, centers), 2);
  int n = s.size();
  CounterRng rng(321, 0);
  Eigen::MatrixXd k(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) k(i, j) = 2 * rng.next_unit() - 1;
  double via_enum = 0;
  for_each_permutation(s, [&](const EdgePermutation& tau) {
    if (!classify(s, tau).connected) return;
    double prod = tau.sign();
    for (int p = 0; p < n; ++p) prod *= k(p, tau(p));
    via_enum += prod;
  });
  CHECK(connected_signed_sum(k, s.owner) ==
        doctest::Approx(via_enum).epsilon(1e-12));
}

TEST_CASE("enumeration guard") {
  auto g = build_grid(LatticeSpec::z2(), 5, 5);
  std::vector<VertexId> centers{*g.vertex_at(1, 1, 0), *g.vertex_at(3, 3, 0),
                                *g.vertex_at(1, 3, 0)};
  auto s = StarSet::from_stars(g, centers);
  CHECK_THROWS_AS(for_each_permutation(s, [](const EdgePermutation&) {}),
                  GuardError);
}

TEST_CASE("subset-DP connected sum equals the direct enumeration") {
  CounterRng rng(555, 0);
  // random owner layouts over 1..3 sites, n up to 9
  for (int t = 0; t < 60; ++t) {
    int sites = 1 + rng.next_below(3);
    int n = sites + rng.next_below(9 - sites + 1);
    std::vector<int> owner(n);
    for (int i = 0; i < n; ++i) owner[i] = i < sites ? i : rng.next_below(sites);
    Eigen::MatrixXd k(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) k(i, j) = 2 * rng.next_unit() - 1;
    double dfs = connected_signed_sum(k, owner, 9);
    double dp = connected_signed_sum_dp(k, owner);
    CHECK(dfs == doctest::Approx(dp).epsilon(1e-11));
  }
}
