import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import brute_ancestor, random_measure, random_tree
from treecarleson.errors import DomainError, ValidationError
from treecarleson.measure import MeasureSpec, pull_back, set_masses
from treecarleson.operators import (
    TreeFunction,
    averages,
    backward_difference,
    counting_pairing,
    hardy,
    hardy_adjoint,
    maximal,
    measure_pairing,
    subtree_indicator,
    tree_besov_norm,
    weighted_lp_norm,
)
from treecarleson.tree import ancestors, build_abstract_tree, build_dyadic_tree


def tf(tree, v, b=None):
    return TreeFunction(tree, v, b)


def test_backward_difference_examples():
    t = build_dyadic_tree(4)
    d = backward_difference(tf(t, np.ones(t.size))).values
    assert d[0] == 1 and np.all(d[1:] == 0)
    d = backward_difference(tf(t, t.depth.astype(float))).values
    assert d[0] == 0 and np.all(d[1:] == 1)


def test_hardy_examples():
    t = build_dyadic_tree(4)
    e = np.zeros(t.size)
    e[0] = 1
    assert np.all(hardy(tf(t, e)).values == 1)
    assert np.array_equal(hardy(tf(t, np.ones(t.size))).values, t.depth + 1.0)
    chain = build_abstract_tree([None, 0])
    assert hardy(tf(chain, [2.0, 5.0])).values.tolist() == [2.0, 7.0]


def test_hardy_boundary_values():
    t = build_dyadic_tree(3)
    phi = np.arange(t.size, dtype=float)
    out = hardy(tf(t, phi), boundary=True)
    for k, leaf in enumerate(t.leaves):
        assert out.boundary[k] == sum(phi[a] for a in ancestors(t, int(leaf)))


@pytest.mark.parametrize("D", [0, 1, 6, 10])
def test_inverse_pair_dyadic(D, rng):
    t = build_dyadic_tree(D)
    for _ in range(5):
        psi = rng.normal(size=t.size)
        np.testing.assert_allclose(hardy(backward_difference(tf(t, psi))).values, psi, rtol=1e-12, atol=1e-12)
        np.testing.assert_allclose(backward_difference(hardy(tf(t, psi))).values, psi, rtol=1e-12, atol=1e-12)


def test_hardy_matches_brute_force_on_abstract_trees(rng):
    for _ in range(10):
        t = random_tree(rng, 40)
        phi = rng.normal(size=t.size)
        out = hardy(tf(t, phi)).values
        for a in range(t.size):
            assert out[a] == pytest.approx(sum(phi[b] for b in range(t.size) if brute_ancestor(t, b, a)))


def test_adjoint_examples():
    t = build_dyadic_tree(4)
    tm = pull_back(MeasureSpec(boundary_density=[1.0], interior_atoms=[(0.3 + 0.4j, 0.5)]), t)
    ones = tf(t, np.ones(t.size))
    np.testing.assert_allclose(hardy_adjoint(ones, tm).values, tm.subtree_mass, rtol=1e-14)
    a0 = t.index(2, 3)
    out = hardy_adjoint(subtree_indicator(t, a0), tm).values
    for a in range(t.size):
        if brute_ancestor(t, a, a0):
            assert out[a] == pytest.approx(tm.subtree_mass[a0], rel=1e-14)
        elif brute_ancestor(t, a0, a):
            assert out[a] == pytest.approx(tm.subtree_mass[a], rel=1e-14)
        else:
            assert out[a] == 0


def test_adjoint_identity(rng):
    for shape in (build_dyadic_tree(5), random_tree(rng, 60), build_abstract_tree([None, 0, 1, 2])):
        for _ in range(20):
            tm = random_measure(rng, shape)
            phi = tf(shape, rng.normal(size=shape.size))
            g = tf(shape, rng.normal(size=shape.size), rng.normal(size=shape.leaves.size))
            lhs = measure_pairing(hardy(phi, boundary=True), g, tm)
            rhs = counting_pairing(phi, hardy_adjoint(g, tm))
            assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-12)


def test_maximal_examples():
    t = build_dyadic_tree(3)
    tm = pull_back(MeasureSpec(boundary_density=[2.0], interior_atoms=[(0.6j, 1.0)]), t)
    np.testing.assert_allclose(maximal(tf(t, np.ones(t.size)), tm).values, 1.0, rtol=1e-14)

    leaf = int(t.leaves[5])
    atom = set_masses(t, np.zeros(t.size), np.eye(t.leaves.size)[5])
    g = tf(t, np.zeros(t.size), np.eye(t.leaves.size)[5])
    mg = maximal(g, atom).values
    path = ancestors(t, leaf)
    assert np.all(mg[path] == 1)
    assert np.all(mg <= 1)
    # nodes off the geodesic carry no mass, so they keep their ancestors' value
    for a in range(t.size):
        if a not in path:
            assert mg[a] == mg[int(t.parent[a])]


def test_maximal_dominates_own_average(rng):
    t = build_dyadic_tree(6)
    tm = random_measure(rng, t, zero_frac=0.8)
    g = tf(t, rng.uniform(size=t.size), rng.uniform(size=t.leaves.size))
    mg = maximal(g, tm).values
    avg = averages(g, tm)
    ok = ~np.isnan(avg)
    assert np.all(mg[ok] >= avg[ok])
    assert np.all(mg >= 0)


def test_maximal_rejects_negative():
    t = build_dyadic_tree(2)
    tm = set_masses(t, np.ones(t.size))
    with pytest.raises(DomainError):
        maximal(tf(t, -np.ones(t.size)), tm)
    with pytest.raises(DomainError):
        maximal(tf(t, np.ones(t.size), -np.ones(t.leaves.size)), tm)


def test_zero_mass_nodes_get_no_candidate():
    chain = build_abstract_tree([None, 0, 1])
    tm = set_masses(chain, [1.0, 0.0, 0.0], [0.0])
    mg = maximal(tf(chain, [2.0, 9.0, 9.0]), tm).values
    assert mg.tolist() == [2.0, 2.0, 2.0]
    assert np.isnan(averages(tf(chain, [2.0, 9.0, 9.0]), tm)[1])


_shape = build_dyadic_tree(4)
_vec = st.lists(st.floats(0.0, 10.0), min_size=_shape.size + _shape.leaves.size, max_size=_shape.size + _shape.leaves.size)


def _split(v):
    v = np.asarray(v)
    return tf(_shape, v[: _shape.size], v[_shape.size :])


@settings(max_examples=60, deadline=None)
@given(_vec, _vec, st.floats(0.0, 5.0), st.integers(0, 2**32 - 1))
def test_maximal_properties(v1, v2, c, seed):
    tm = random_measure(np.random.default_rng(seed), _shape)
    g1 = _split(v1)
    g2 = _split(np.maximum(v1, v2))
    m1 = maximal(g1, tm).values
    np.testing.assert_allclose(maximal(c * g1, tm).values, c * m1, rtol=1e-12, atol=1e-12)
    assert np.all(maximal(g2, tm).values >= m1 - 1e-12)
    assert m1.max() <= g1.max() * (1 + 1e-12)


def test_besov_norm_examples():
    t = build_dyadic_tree(6)
    rho = np.full(t.size, 2.0)
    assert tree_besov_norm(tf(t, np.full(t.size, -3.0)), rho, 3.0) == pytest.approx(3.0 * 2.0 ** (1 / 3))
    D = 6
    assert tree_besov_norm(tf(t, t.depth.astype(float)), 1.0, 2.0) ** 2 == pytest.approx(2 ** (D + 1) - 2)
    phi = np.random.default_rng(3).normal(size=t.size)
    rho = np.random.default_rng(4).uniform(0.5, 2.0, t.size)
    assert tree_besov_norm(hardy(tf(t, phi)), rho, 2.0) ** 2 == pytest.approx(np.sum(phi**2 * rho), rel=1e-12)


def test_lp_norm_examples():
    t = build_dyadic_tree(3)
    tm = pull_back(MeasureSpec(boundary_density=[1.5], interior_atoms=[(0.2j, 0.5)]), t)
    assert weighted_lp_norm(tf(t, np.ones(t.size)), tm, 3.0) == pytest.approx(tm.total ** (1 / 3), rel=1e-14)
    single = build_abstract_tree([None])
    assert weighted_lp_norm(tf(single, [2.0]), [3.0], 2.0) == pytest.approx(math.sqrt(12))
    assert weighted_lp_norm(tf(t, np.zeros(t.size)), tm, 2.0) == 0.0


def test_function_shapes_validated():
    t = build_dyadic_tree(2)
    with pytest.raises(ValidationError):
        TreeFunction(t, np.zeros(3))
    with pytest.raises(ValidationError):
        TreeFunction(t, np.zeros(t.size), np.zeros(2))
