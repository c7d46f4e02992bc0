import math

import numpy as np
import pytest

from treecarleson.errors import MeasureParseError, UnsupportedOperation, ValidationError
from treecarleson.measure import MeasureSpec, parse_measure_spec, pull_back, set_masses, subtree_mass
from treecarleson.tree import build_abstract_tree, build_dyadic_tree, ancestors as root_path


def test_parse_records():
    spec = parse_measure_spec("boundary_density uniform 6.283185307")
    assert spec.boundary_density == [6.283185307]
    spec = parse_measure_spec("interior_atom 0.75 0.0 1.0")
    assert spec.interior_atoms == [(0.75 + 0j, 1.0)]
    spec = parse_measure_spec("boundary_atom 0.0 1.0")
    assert spec.boundary_atoms == [(0.0, 1.0)]


def test_parse_headers_and_comments():
    doc = """# a comment
depth = 7
name = mixed example
interior_density power 0.5 2.0   # trailing comment

boundary_atom 3.0 0.25
"""
    spec = parse_measure_spec(doc)
    assert spec.depth == 7
    assert spec.name == "mixed example"
    assert spec.interior_density == [(0.5, 2.0)]
    assert spec.total_mass() == pytest.approx(2.0 / 1.5 + 0.25)


@pytest.mark.parametrize(
    "doc, line",
    [
        ("interior_atom 0.75 0.0", 1),
        ("boundary_atom 0.0 1.0\nboundary_atom 0.0 -1.0", 2),
        ("# c\n\ninterior_atom 1.0 0.0 1.0", 3),
        ("interior_atom 0.6 0.8 1.0", 1),
        ("depth = x", 1),
        ("boundary_density gaussian 1.0", 1),
        ("interior_density power -1.0 1.0", 1),
        ("colour = red", 1),
    ],
)
def test_parse_errors_carry_line_numbers(doc, line):
    with pytest.raises(MeasureParseError) as info:
        parse_measure_spec(doc)
    assert info.value.lineno == line


def test_spec_validation():
    with pytest.raises(ValidationError):
        MeasureSpec(interior_atoms=[(1.0 + 0j, 1.0)])
    with pytest.raises(ValidationError):
        MeasureSpec(boundary_atoms=[(0.0, -1.0)])


def test_interior_atom_lands_in_its_box():
    t = build_dyadic_tree(4)
    tm = pull_back(MeasureSpec(interior_atoms=[(0.75 + 0j, 1.0)]), t)
    node = t.index(1, 1)
    assert tm.interior_mass[node] == 1.0
    assert tm.interior_mass.sum() == 1.0 and tm.boundary_mass.sum() == 0.0


def test_uniform_boundary_density():
    t = build_dyadic_tree(2)
    tm = pull_back(MeasureSpec(boundary_density=[2 * math.pi]), t)
    np.testing.assert_allclose(tm.boundary_mass, np.full(4, math.pi / 2), rtol=1e-15)


def test_boundary_atom_at_zero_angle():
    t = build_dyadic_tree(3)
    tm = pull_back(MeasureSpec(boundary_atoms=[(0.0, 1.0)]), t)
    assert tm.boundary_mass[t.leaf_position(t.index(3, 1))] == 1.0


def test_deep_atoms_attach_to_leaf():
    t = build_dyadic_tree(3)
    z = 0.9999 * np.exp(1j * 2.0)
    tm = pull_back(MeasureSpec(interior_atoms=[(complex(z), 2.0)]), t)
    assert tm.deep_atoms == 1
    leaf = int(np.flatnonzero(tm.interior_mass)[0])
    assert t.nm(leaf)[0] == 3
    assert t.nm(leaf) == t.nm(int(t.leaves[int(2.0 / (2 * math.pi) * 8)]))


def test_pull_back_needs_dyadic():
    with pytest.raises(UnsupportedOperation):
        pull_back(MeasureSpec(), build_abstract_tree([None, 0]))


def test_set_masses_examples():
    t = build_abstract_tree([None, 0, 0, 1, 1, 2])
    assert np.all(subtree_mass(set_masses(t, np.zeros(6))) == 0)
    chain = build_abstract_tree([None, 0])
    assert subtree_mass(set_masses(chain, [0.0, 1.0])).tolist() == [1.0, 1.0]
    assert subtree_mass(set_masses(t, np.ones(6)))[0] == 6.0
    with pytest.raises(ValidationError):
        set_masses(t, -np.ones(6))


def test_subtree_mass_uniform_boundary_geometric():
    D = 9
    t = build_dyadic_tree(D)
    tm = pull_back(MeasureSpec(boundary_density=[2 * math.pi]), t)
    expected = 2 * math.pi * 2.0 ** -t.depth.astype(float)
    np.testing.assert_allclose(tm.subtree_mass, expected, rtol=1e-13)


def test_subtree_mass_boundary_atom_geodesic():
    t = build_dyadic_tree(6)
    theta = 4.0
    tm = pull_back(MeasureSpec(boundary_atoms=[(theta, 1.0)]), t)
    path = set(root_path(t, int(t.leaves[int(theta / (2 * math.pi) * 64)])))
    for a in range(t.size):
        assert tm.subtree_mass[a] == (1.0 if a in path else 0.0)


def _mixed_spec():
    return MeasureSpec(
        interior_atoms=[(0.3 + 0.1j, 0.5), (-0.9 + 0.05j, 1.5), (0.0j, 0.25)],
        boundary_atoms=[(1.0, 0.7), (5.5, 0.2)],
        boundary_density=[3.0],
        interior_density=[(0.5, 1.2), (-0.5, 0.4)],
    )


def test_recursion_and_monotonicity():
    t = build_dyadic_tree(7)
    tm = pull_back(_mixed_spec(), t)
    sub = tm.subtree_mass
    for a in range(t.size):
        kids = t.children(a)
        expect = tm.interior_mass[a] + sum(sub[c] for c in kids)
        if t.is_leaf(a):
            expect += tm.boundary_mass[t.leaf_position(a)]
        assert sub[a] == pytest.approx(expect, rel=1e-14)
        for c in kids:
            assert sub[c] <= sub[a]


def test_conservation_atoms_exact():
    spec = MeasureSpec(
        interior_atoms=[(0.3 + 0.1j, 0.5), (-0.9 + 0.05j, 1.5)],
        boundary_atoms=[(1.0, 0.7)],
        boundary_density=[3.0],
    )
    for D in (0, 4, 10):
        tm = pull_back(spec, build_dyadic_tree(D))
        assert tm.total == pytest.approx(spec.total_mass(), rel=1e-12)
        assert tm.mass[tm.tree.leaves].sum() + tm.interior_mass[: 2**D - 1].sum() == pytest.approx(
            spec.total_mass(), rel=1e-12
        )


@pytest.mark.parametrize("b", [-0.5, 0.0, 0.5, 2.0])
def test_conservation_density(b):
    spec = MeasureSpec(interior_density=[(b, 1.3)])
    for D in (0, 3, 9):
        tm = pull_back(spec, build_dyadic_tree(D))
        assert tm.total == pytest.approx(1.3 / (b + 1.0), rel=1e-12)


def test_pull_back_linearity():
    t = build_dyadic_tree(6)
    s1 = MeasureSpec(interior_atoms=[(0.2 + 0.6j, 1.0)], interior_density=[(0.5, 1.0)])
    s2 = MeasureSpec(boundary_atoms=[(2.0, 0.3)], boundary_density=[1.0])
    a, b, ab = pull_back(s1, t), pull_back(s2, t), pull_back(s1 + s2, t)
    np.testing.assert_allclose(ab.interior_mass, a.interior_mass + b.interior_mass, rtol=1e-14, atol=1e-16)
    np.testing.assert_allclose(ab.boundary_mass, a.boundary_mass + b.boundary_mass, rtol=1e-14)


def test_refinement_consistency():
    spec = _mixed_spec()
    coarse = pull_back(spec, build_dyadic_tree(5))
    fine = pull_back(spec, build_dyadic_tree(9))
    # nodes of depth < 5 share indices under level-order numbering
    k = 2**5 - 1
    np.testing.assert_allclose(fine.subtree_mass[:k], coarse.subtree_mass[:k], rtol=1e-12)


def test_representative_atoms_preserve_mass():
    t = build_dyadic_tree(5)
    tm = pull_back(_mixed_spec(), t)
    assert math.fsum(a.mass for a in tm.representative_atoms()) == pytest.approx(tm.total, rel=1e-12)
    raw = set_masses(t, tm.interior_mass, tm.boundary_mass)
    assert math.fsum(a.mass for a in raw.representative_atoms()) == pytest.approx(tm.total, rel=1e-12)
    with pytest.raises(UnsupportedOperation):
        set_masses(build_abstract_tree([None, 0]), [1.0, 1.0]).representative_atoms()
