#include <doctest.h>

#include <cmath>

#include "ustlab/degree.hpp"
#include "ustlab/sampler.hpp"

using namespace ustlab;

TEST_CASE("K_3: P(D=1) = 2/3, P(D=2) = 1/3") {
  auto g = FiniteGraph::complete(3);
  auto m = transfer_matrix(g);
  CHECK(degree_pmf_single(m, 0, 1) == doctest::Approx(2.0 / 3).epsilon(1e-12));
  CHECK(degree_pmf_single(m, 0, 2) == doctest::Approx(1.0 / 3).epsilon(1e-12));
  CHECK(degree_pmf_single(m, 0, 3) == 0.0);  // beyond the graph degree
  CHECK_THROWS_AS(degree_pmf_single(m, 0, 0), ValidationError);
}

TEST_CASE("K_4 and K_5: determinant PMF equals enumeration and closed form") {
  for (int n : {4, 5}) {
    auto g = FiniteGraph::complete(n);
    auto m = transfer_matrix(g);
    auto trees = enumerate_trees(g);
    CHECK(trees.size() == static_cast<size_t>(std::pow(n, n - 2)));
    for (int k = 1; k <= n - 1; ++k) {
      long long hits = 0;
      for (auto& t : trees) hits += t.degree_at(g, 0) == k;
      double exact = static_cast<double>(hits) / trees.size();
      CHECK(degree_pmf_single(m, 0, k) == doctest::Approx(exact).epsilon(1e-12));
      CHECK(kn_degree_closed_form(n, k) == doctest::Approx(exact).epsilon(1e-12));
    }
  }
}

TEST_CASE("PMF normalization and the mean identity") {
  auto check = [](const FiniteGraph& g, VertexId v) {
    auto m = transfer_matrix(g);
    double total = 0, mean = 0;
    for (int k = 1; k <= g.degree(v); ++k) {
      double p = degree_pmf_single(m, v, k);
      total += p;
      mean += k * p;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    double edge_sum = 0;
    for (auto& e : g.star(v).edges) edge_sum += m.entry(e, e);
    CHECK(mean == doctest::Approx(edge_sum).epsilon(1e-9));
  };
  check(FiniteGraph::complete(6), 2);
  check(build_grid(LatticeSpec::z2(), 3, 3), 4);
  check(build_grid(LatticeSpec::triangular(), 2, 2), 0);
  check(FiniteGraph::cycle(5), 1);
}

TEST_CASE("joint PMF: reduction, brute force, symmetry, total mass") {
  auto g = build_grid(LatticeSpec::z2(), 3, 3);
  auto m = transfer_matrix(g);
  auto at = [&](int x, int y) { return *g.vertex_at(x, y); };
  std::vector<VertexId> vs{at(0, 0), at(1, 1)};  // diagonal pair, good set

  SUBCASE("|V| = 1 reduces to the single-vertex PMF") {
    std::vector<VertexId> one{at(1, 1)};
    std::vector<int> k{2};
    CHECK(degree_pmf_joint(m, one, k) ==
          doctest::Approx(degree_pmf_single(m, at(1, 1), 2)).epsilon(1e-12));
  }

  SUBCASE("joint equals brute-force enumeration and is order-invariant") {
    for (int k0 : {1, 2}) {
      for (int k1 : {1, 2, 3}) {
        std::vector<int> ks{k0, k1};
        double exact = brute_degree_probability(g, {vs, ks});
        CHECK(degree_pmf_joint(m, vs, ks) == doctest::Approx(exact).epsilon(1e-12));
        std::vector<VertexId> rev{vs[1], vs[0]};
        std::vector<int> krev{k1, k0};
        CHECK(degree_pmf_joint(m, rev, krev) ==
              doctest::Approx(exact).epsilon(1e-12));
      }
    }
  }

  SUBCASE("total joint mass is one") {
    double total = 0;
    for (int k0 = 1; k0 <= 4; ++k0)
      for (int k1 = 1; k1 <= 4; ++k1) {
        std::vector<int> ks{k0, k1};
        total += degree_pmf_joint(m, vs, ks);
      }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
  }

  SUBCASE("distance-2 vertices sharing a common neighbor are allowed") {
    std::vector<VertexId> pair{at(0, 1), at(2, 1)};
    std::vector<int> ks{1, 1};
    CHECK(degree_pmf_joint(m, pair, ks) ==
          doctest::Approx(brute_degree_probability(g, {pair, ks}))
              .epsilon(1e-12));
  }

  SUBCASE("adjacent vertices are routed to the neighbor operations") {
    std::vector<VertexId> bad{at(1, 1), at(1, 2)};
    std::vector<int> ks{1, 1};
    CHECK_THROWS_WITH_AS(
        (void)degree_pmf_joint(m, bad, ks),
        doctest::Contains("neighbor_cumulant"), ValidationError);
  }
}

TEST_CASE("complete-graph closed form: hand values and edge cases") {
  CHECK(kn_degree_closed_form(3, 1) == doctest::Approx(2.0 / 3).epsilon(1e-12));
  CHECK(kn_degree_closed_form(3, 2) == doctest::Approx(1.0 / 3).epsilon(1e-12));
  CHECK(kn_degree_closed_form(2, 1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(kn_degree_closed_form(4, 0), ValidationError);
  CHECK_THROWS_AS(kn_degree_closed_form(4, 4), ValidationError);
  // normalization for a large n
  double total = 0;
  for (int k = 1; k <= 99; ++k) total += kn_degree_closed_form(100, k);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("poisson limit: gap shrinks along n and the k=1 limit is 1/e") {
  CHECK(std::exp(-1.0) == doctest::Approx(0.3679).epsilon(1e-4));
  double prev = 1e9;
  for (long long n : {100, 1000, 10000, 100000, 1000000}) {
    double gap = poisson_limit_gap(n, 6);
    CHECK(gap < prev);
    prev = gap;
  }
  CHECK(poisson_limit_gap(1000000, 6) < 1e-4);
  CHECK(poisson_limit_gap(1000, 6) < poisson_limit_gap(100, 6));
}

TEST_CASE("boundary vertices and oversized stars are rejected") {
  auto g = build_grid(LatticeSpec::z2(), 2, 2);
  auto m = transfer_matrix(g);
  CHECK_THROWS_AS(degree_pmf_single(m, g.boundary()[0], 1), ValidationError);
  auto k8 = FiniteGraph::complete(8);
  auto m8 = transfer_matrix(k8);
  CHECK_THROWS_AS(degree_pmf_single(m8, 0, 1, /*max_enum=*/5), GuardError);
}
