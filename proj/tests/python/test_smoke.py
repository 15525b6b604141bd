"""Smoke tests for the python bindings."""

import math

import pytest

import ustlab


def test_complete_graph_edge_probability():
    g = ustlab.FiniteGraph.complete(5)
    m = ustlab.transfer_matrix(g)
    assert m.entry((0, 1), (0, 1)) == pytest.approx(2 / 5, abs=1e-12)
    p = ustlab.edge_probability(m, [(0, 1)])
    assert p == pytest.approx(2 / 5, abs=1e-12)
    q = ustlab.inclusion_exclusion_probability(m, [(0, 1)], [(1, 2)])
    assert 0 < q < 1


def test_degree_pmf_sums_to_one():
    g = ustlab.grid("Z2", 3, 3)
    m = ustlab.transfer_matrix(g)
    v = g.vertex_at(1, 1)
    total = sum(ustlab.degree_pmf_single(m, v, k) for k in range(1, 5))
    assert total == pytest.approx(1.0, abs=1e-9)


def test_complete_graph_closed_form():
    assert ustlab.kn_degree_closed_form(3, 1) == pytest.approx(2 / 3, abs=1e-12)
    assert ustlab.poisson_limit_gap(10**6, 6) < 1e-4


def test_cumulant_routes_agree():
    g = ustlab.grid("Z2", 3, 3)
    m = ustlab.transfer_matrix(g)
    vs = [g.vertex_at(0, 0), g.vertex_at(2, 2)]
    direct = ustlab.cumulant_direct(m, vs, [1, 1])
    oracle = ustlab.cumulant_via_moments(m, vs, [1, 1])
    assert direct == pytest.approx(oracle, abs=1e-10)


def test_lattice_constants():
    assert ustlab.lattice_constant("hex", 2, 1e-8) == pytest.approx(0.0, abs=1e-6)
    z2_k1 = ustlab.lattice_constant("Z2", 1, 1e-9)
    assert z2_k1 == pytest.approx(8 / math.pi - 16 / math.pi**2, abs=1e-6)


def test_wilson_sampler_and_tree_count():
    g = ustlab.FiniteGraph.complete(4)
    assert ustlab.spanning_tree_count(g) == pytest.approx(16)
    tree = ustlab.wilson_sample(g, seed=7)
    assert len(tree) == 3
    assert tree == ustlab.wilson_sample(g, seed=7)
    est, se = ustlab.mc_edge_probability(g, [(0, 1)], [], 20000, 11)
    assert abs(est - 0.5) < 4 * se + 1e-9


def test_potential_kernel_value():
    assert ustlab.potential_kernel("Z2", 1, 1, tol=1e-9) == pytest.approx(
        4 / math.pi, abs=1e-7
    )


def test_validation_errors_surface_as_python_exceptions():
    with pytest.raises(ValueError):
        ustlab.FiniteGraph(2, [(0, 0)])
    g = ustlab.FiniteGraph.complete(3)
    m = ustlab.transfer_matrix(g)
    with pytest.raises(ValueError):
        ustlab.degree_pmf_joint(m, [0, 1], [1, 1])  # adjacent pair
