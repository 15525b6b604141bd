#include <doctest.h>

#include <bit>
#include <cmath>
#include <cstdint>
#include <map>

#include "ustlab/cumulant.hpp"
#include "ustlab/degree.hpp"
#include "ustlab/sampler.hpp"

using namespace ustlab;

TEST_CASE("single vertex: first cumulant is the PMF value") {
  auto g = build_grid(LatticeSpec::z2(), 3, 3);
  auto m = transfer_matrix(g);
  VertexId v = *g.vertex_at(1, 1, 0);
  for (int k = 1; k <= 4; ++k) {
    CumulantQuery q{{v}, {k}};
    CHECK(cumulant_direct(m, q) ==
          doctest::Approx(degree_pmf_single(m, v, k)).epsilon(1e-10));
  }
  // the PMF tower sums to one through the cumulant path
  double total = 0;
  for (int k = 1; k <= 4; ++k) total += cumulant_direct(m, {{v}, {k}});
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("two vertices: direct cumulant equals the covariance") {
  auto g = build_grid(LatticeSpec::z2(), 3, 3);
  auto m = transfer_matrix(g);
  std::vector<VertexId> vs{*g.vertex_at(0, 0, 0), *g.vertex_at(1, 1, 0)};
  for (int k0 : {1, 2}) {
    for (int k1 : {1, 3}) {
      CumulantQuery q{vs, {k0, k1}};
      double joint = degree_pmf_joint(m, q.vertices, q.degrees);
      double marg0 = degree_pmf_single(m, vs[0], k0);
      double marg1 = degree_pmf_single(m, vs[1], k1);
      CHECK(cumulant_direct(m, q) ==
            doctest::Approx(joint - marg0 * marg1).epsilon(1e-10));
      CHECK(cumulant_via_moments(m, q) ==
            doctest::Approx(joint - marg0 * marg1).epsilon(1e-12));
    }
  }
}

TEST_CASE("cumulant is symmetric under reordering of the points") {
  auto g = build_grid(LatticeSpec::z2(), 5, 5);
  auto m = transfer_matrix(g);
  CumulantQuery q{{*g.vertex_at(0, 0, 0), *g.vertex_at(2, 2, 0)}, {2, 1}};
  CumulantQuery r{{q.vertices[1], q.vertices[0]}, {1, 2}};
  CHECK(cumulant_direct(m, q) == doctest::Approx(cumulant_direct(m, r)));
}

TEST_CASE("three points on a grid diagonal: both routes agree") {
  auto g = build_grid(LatticeSpec::z2(), 7, 7);
  auto m = transfer_matrix(g);
  std::vector<VertexId> vs{*g.vertex_at(1, 1, 0), *g.vertex_at(3, 3, 0),
                           *g.vertex_at(5, 5, 0)};
  CumulantQuery q{vs, {1, 1, 1}};
  double direct = cumulant_direct(m, q);
  double oracle = cumulant_via_moments(m, q);
  CHECK(direct == doctest::Approx(oracle).epsilon(1e-9));
  CumulantQuery q2{vs, {2, 1, 2}};
  CHECK(cumulant_direct(m, q2) ==
        doctest::Approx(cumulant_via_moments(m, q2)).epsilon(1e-9));
}

TEST_CASE("triangular patch pair: both routes agree") {
  auto g = build_grid(LatticeSpec::triangular(), 4, 4);
  auto m = transfer_matrix(g);
  std::vector<VertexId> vs{*g.vertex_at(1, 1, 0), *g.vertex_at(2, 2, 0)};
  REQUIRE(is_good_set(g, vs));
  for (int k0 : {1, 4}) {
    CumulantQuery q{vs, {k0, 2}};
    CHECK(cumulant_direct(m, q) ==
          doctest::Approx(cumulant_via_moments(m, q)).epsilon(1e-9));
  }
}

TEST_CASE("moment reconstruction round-trips random cumulant tables") {
  CounterRng rng(314, 0);
  for (int n : {1, 2, 3, 4, 5}) {
    // random "cumulants" for every nonempty subset
    std::map<uint32_t, double> kappa;
    for (uint32_t mask = 1; mask < (uint32_t{1} << n); ++mask)
      kappa[mask] = 2 * rng.next_unit() - 1;
    // build moments from them, then invert back via the Moebius sum
    std::map<uint32_t, double> moment;
    for (uint32_t mask = 1; mask < (uint32_t{1} << n); ++mask) {
      std::vector<int> members;
      for (int i = 0; i < n; ++i)
        if (mask >> i & 1) members.push_back(i);
      std::map<uint32_t, double> sub;
      for (uint32_t s = 1; s < (uint32_t{1} << members.size()); ++s) {
        uint32_t global = 0;
        for (size_t i = 0; i < members.size(); ++i)
          if (s >> i & 1) global |= uint32_t{1} << members[i];
        sub[s] = kappa.at(global);
      }
      moment[mask] = moments_from_cumulants(sub, static_cast<int>(members.size()));
    }
    // Moebius inversion over partitions recovers the top cumulant
    double recovered = 0;
    for_each_partition(n, [&](const std::vector<std::vector<int>>& blocks) {
      double prod = 1;
      for (auto& b : blocks) {
        uint32_t mask = 0;
        for (int i : b) mask |= uint32_t{1} << i;
        prod *= moment.at(mask);
      }
      int sz = static_cast<int>(blocks.size());
      double fact = 1;
      for (int i = 2; i < sz; ++i) fact *= i;
      recovered += (sz % 2 == 1 ? fact : -fact) * prod;
    });
    CHECK(recovered ==
          doctest::Approx(kappa.at((uint32_t{1} << n) - 1)).epsilon(1e-12));
  }
}

TEST_CASE("partition count is the Bell number") {
  int counts[] = {1, 1, 2, 5, 15, 52, 203};
  for (int n = 1; n <= 6; ++n) {
    int c = 0;
    for_each_partition(n, [&](const std::vector<std::vector<int>>&) { ++c; });
    CHECK(c == counts[n]);
  }
}

TEST_CASE("selection counting: eta/absent splits per fixed subset") {
  // the number of (selection, absent-set) pairs collapsing to a fixed
  // union E with per-star counts k_v is prod binom(|E_v|, k_v)
  auto count_splits = [](int star, int chosen, int k) {
    (void)star;
    double b = 1;
    for (int i = 0; i < k; ++i) b = b * (chosen - i) / (i + 1);
    return b;
  };
  int splits = 0;
  int e_v = 3, k_v = 2;
  for (uint32_t sel = 0; sel < (1u << e_v); ++sel) {
    if (std::popcount(sel) != k_v) continue;
    ++splits;  // the absent part is forced to be the complement
  }
  CHECK(splits == static_cast<int>(count_splits(4, e_v, k_v)));
}

TEST_CASE("neighbor pieces: flag sum equals the brute-force joint PMF") {
  SUBCASE("K_3 adjacent pair") {
    auto g = FiniteGraph::complete(3);
    auto m = transfer_matrix(g);
    for (int kv : {1, 2})
      for (int kw : {1, 2}) {
        double p_in = neighbor_joint_probability(m, 0, 1, kv, kw, true);
        double p_out = neighbor_joint_probability(m, 0, 1, kv, kw, false);
        double exact_in =
            brute_degree_probability_with_edge(g, {{0, 1}, {kv, kw}}, 0, 1, true);
        double exact_out =
            brute_degree_probability_with_edge(g, {{0, 1}, {kv, kw}}, 0, 1, false);
        CHECK(p_in == doctest::Approx(exact_in).epsilon(1e-10));
        CHECK(p_out == doctest::Approx(exact_out).epsilon(1e-10));
        CHECK(p_in + p_out ==
              doctest::Approx(brute_degree_probability(g, {{0, 1}, {kv, kw}}))
                  .epsilon(1e-10));
      }
  }

  SUBCASE("adjacent pair on the wired 2x2 grid") {
    auto g = build_grid(LatticeSpec::z2(), 2, 2);
    auto m = transfer_matrix(g);
    VertexId v = *g.vertex_at(0, 0, 0), w = *g.vertex_at(0, 1, 0);
    REQUIRE(g.adjacent(v, w));
    for (int kv : {1, 2, 3})
      for (int kw : {1, 2}) {
        double p_in = neighbor_joint_probability(m, v, w, kv, kw, true);
        double p_out = neighbor_joint_probability(m, v, w, kv, kw, false);
        double exact =
            brute_degree_probability(g, {{v, w}, {kv, kw}});
        CHECK(p_in + p_out == doctest::Approx(exact).epsilon(1e-10));
        double exact_in =
            brute_degree_probability_with_edge(g, {{v, w}, {kv, kw}}, v, w, true);
        CHECK(p_in == doctest::Approx(exact_in).epsilon(1e-10));
      }
  }
}

TEST_CASE("neighbor cumulant pieces are exposed and finite") {
  auto g = build_grid(LatticeSpec::z2(), 2, 2);
  auto m = transfer_matrix(g);
  VertexId v = *g.vertex_at(0, 0, 0), w = *g.vertex_at(1, 0, 0);
  double with_edge = neighbor_cumulant(m, v, w, 2, 2, true);
  double without = neighbor_cumulant(m, v, w, 2, 2, false);
  CHECK(std::isfinite(with_edge));
  CHECK(std::isfinite(without));
  CHECK(with_edge != doctest::Approx(without));
  CHECK_THROWS_AS(neighbor_cumulant(m, v, v, 1, 1, true), ValidationError);
  VertexId far = *g.vertex_at(1, 1, 0);
  CHECK_THROWS_AS(neighbor_cumulant(m, v, far, 1, 1, true), ValidationError);
}

TEST_CASE("query validation") {
  auto g = build_grid(LatticeSpec::z2(), 3, 3);
  auto m = transfer_matrix(g);
  VertexId a = *g.vertex_at(1, 1, 0), b = *g.vertex_at(1, 2, 0);
  CHECK_THROWS_AS(cumulant_direct(m, {{a, b}, {1, 1}}), ValidationError);
  CHECK_THROWS_AS(cumulant_direct(m, {{a}, {0}}), ValidationError);
  CHECK_THROWS_AS(cumulant_direct(m, {{}, {}}), ValidationError);
}
