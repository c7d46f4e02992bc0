"""Backward difference, Hardy operator and its adjoint, the maximal function, norms.

Functions on the closed tree carry an optional per-leaf ``boundary`` array for
their values at the boundary points below each leaf.  When it is absent the
leaf value is used, which is what ``hardy`` produces anyway: a boundary point
beyond a depth-``D`` leaf has the same root path as the leaf.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ValidationError
from .measure import TreeMeasure
from .tree import Tree, subtree_nodes
from .weight import TreeWeight, as_weight_values


@dataclass(frozen=True, eq=False)
class TreeFunction:
    tree: Tree
    values: np.ndarray
    boundary: np.ndarray | None = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.tree.size,):
            raise ValidationError(f"tree function needs shape ({self.tree.size},), got {v.shape}")
        object.__setattr__(self, "values", v)
        if self.boundary is not None:
            b = np.asarray(self.boundary, dtype=float)
            if b.shape != (self.tree.leaves.size,):
                raise ValidationError(f"boundary values need shape ({self.tree.leaves.size},)")
            object.__setattr__(self, "boundary", b)

    def boundary_values(self) -> np.ndarray:
        if self.boundary is not None:
            return self.boundary
        return self.values[self.tree.leaves]

    def __mul__(self, c: float) -> "TreeFunction":
        b = None if self.boundary is None else c * self.boundary
        return TreeFunction(self.tree, c * self.values, b)

    __rmul__ = __mul__

    def min(self) -> float:
        m = float(self.values.min())
        if self.boundary is not None and self.boundary.size:
            m = min(m, float(self.boundary.min()))
        return m

    def max(self) -> float:
        m = float(self.values.max())
        if self.boundary is not None and self.boundary.size:
            m = max(m, float(self.boundary.max()))
        return m


def subtree_indicator(tree: Tree, node: int) -> TreeFunction:
    """Indicator of the closed successor set of ``node`` (nodes and boundary below it)."""
    v = np.zeros(tree.size)
    v[subtree_nodes(tree, node)] = 1.0
    return TreeFunction(tree, v, v[tree.leaves].copy())


def backward_difference(psi: TreeFunction) -> TreeFunction:
    tree = psi.tree
    v = psi.values
    out = v.copy()
    out[1:] = v[1:] - v[tree.parent[1:]]
    return TreeFunction(tree, out)


def hardy(phi: TreeFunction, boundary: bool = False) -> TreeFunction:
    """Sums of ``phi`` along root paths; ``boundary=True`` also fills leaf boundary values."""
    out = phi.tree.prefix_down(phi.values)
    b = out[phi.tree.leaves].copy() if boundary else None
    return TreeFunction(phi.tree, out, b)


def hardy_adjoint(g: TreeFunction, tm: TreeMeasure) -> TreeFunction:
    """``I*_mu g(a)``: the integral of ``g`` over the closed successor set of ``a``."""
    tree = tm.tree
    dens = g.values * tm.interior_mass
    dens[tree.leaves] += g.boundary_values() * tm.boundary_mass
    return TreeFunction(tree, tree.sum_up(dens))


def integral(g: TreeFunction, tm: TreeMeasure) -> float:
    """``int g dmu`` over the closed tree."""
    return float(hardy_adjoint(g, tm).values[0])


def averages(g: TreeFunction, tm: TreeMeasure) -> np.ndarray:
    """``mu``-average of ``g`` over each closed successor set; NaN where the mass is zero."""
    num = hardy_adjoint(g, tm).values
    mass = tm.subtree_mass
    out = np.full(mass.shape, np.nan)
    pos = mass > 0
    out[pos] = num[pos] / mass[pos]
    return out


def maximal(g: TreeFunction, tm: TreeMeasure) -> TreeFunction:
    """``Mg(a)``: largest average over the successor sets of the ancestors of ``a``.

    Successor sets of zero mass offer no candidate; a node with no candidate at
    all gets 0.
    """
    if g.min() < 0:
        raise DomainError("maximal function needs g >= 0")
    avg = averages(g, tm)
    cand = np.where(np.isnan(avg), 0.0, avg)
    return TreeFunction(tm.tree, tm.tree.max_down(cand))


def weighted_lp_norm(phi: TreeFunction, w, p: float) -> float:
    """``(sum |phi|^p w)^{1/p}``; with a TreeMeasure the boundary values integrate
    against the boundary masses (the ``L^p`` norm on the closed tree)."""
    if isinstance(w, TreeMeasure):
        s = np.abs(phi.values) ** p * w.interior_mass
        total = s.sum() + (np.abs(phi.boundary_values()) ** p * w.boundary_mass).sum()
    else:
        total = (np.abs(phi.values) ** p * as_weight_values(w, phi.tree)).sum()
    return float(total ** (1.0 / p))


def tree_besov_norm(psi: TreeFunction, rho, p: float) -> float:
    """``(sum |Delta psi|^p rho)^{1/p}``."""
    return weighted_lp_norm(backward_difference(psi), rho, p)


def counting_pairing(phi: TreeFunction, psi: TreeFunction) -> float:
    return float(np.dot(phi.values, psi.values))


def measure_pairing(f: TreeFunction, g: TreeFunction, tm: TreeMeasure) -> float:
    """``<f, g>`` in ``l^2`` of the closed tree with measure ``mu``."""
    s = np.dot(f.values * g.values, tm.interior_mass)
    return float(s + np.dot(f.boundary_values() * g.boundary_values(), tm.boundary_mass))


__all__ = [
    "TreeFunction",
    "TreeWeight",
    "averages",
    "backward_difference",
    "counting_pairing",
    "hardy",
    "hardy_adjoint",
    "integral",
    "maximal",
    "measure_pairing",
    "subtree_indicator",
    "tree_besov_norm",
    "weighted_lp_norm",
]
