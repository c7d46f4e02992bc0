"""Measures on the closed disc and their pull-back to tree measures.

A measure on the closed disc splits into an interior part (atoms, radial power
densities) and a boundary part (atoms, uniform arc density).  Interior mass
lands on the Whitney box containing it; boundary mass lands on the depth-``D``
leaf whose half-open arc contains it.  Interior mass deeper than the truncation
is attached to the leaf of its sector, so ``mu(S(a))`` stays exact for every
retained node.
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import quadrature
from .errors import MeasureParseError, UnsupportedOperation, ValidationError
from .tree import Tree, box_geometry, boundary_arc, locate_angle, locate_point

logger = logging.getLogger(__name__)


@dataclass
class MeasureSpec:
    """Interior atoms ``(z, mass)``, boundary atoms ``(theta, mass)``, uniform
    boundary densities (total masses) and interior densities ``(b, c)`` for
    ``c (1 - |z|^2)^b dA``."""

    interior_atoms: list[tuple[complex, float]] = field(default_factory=list)
    boundary_atoms: list[tuple[float, float]] = field(default_factory=list)
    boundary_density: list[float] = field(default_factory=list)
    interior_density: list[tuple[float, float]] = field(default_factory=list)
    depth: int | None = None
    name: str | None = None

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        for z, m in self.interior_atoms:
            if not abs(z) < 1.0:
                raise ValidationError(f"interior atom {z} is not in the open disc")
            _check_mass(m)
        for theta, m in self.boundary_atoms:
            if not math.isfinite(theta):
                raise ValidationError("boundary atom angle must be finite")
            _check_mass(m)
        for m in self.boundary_density:
            _check_mass(m)
        for b, c in self.interior_density:
            _check_mass(c)
            if c > 0 and not b > -1.0:
                raise ValidationError(f"density exponent b={b} gives infinite mass (need b > -1)")

    def total_mass(self) -> float:
        total = math.fsum(m for _, m in self.interior_atoms)
        total += math.fsum(m for _, m in self.boundary_atoms)
        total += math.fsum(self.boundary_density)
        total += math.fsum(c / (b + 1.0) for b, c in self.interior_density if c > 0)
        return total

    def __add__(self, other: "MeasureSpec") -> "MeasureSpec":
        return MeasureSpec(
            self.interior_atoms + other.interior_atoms,
            self.boundary_atoms + other.boundary_atoms,
            self.boundary_density + other.boundary_density,
            self.interior_density + other.interior_density,
            self.depth if self.depth is not None else other.depth,
            self.name or other.name,
        )


def _check_mass(m: float) -> None:
    if not (math.isfinite(m) and m >= 0.0):
        raise ValidationError(f"mass must be finite and >= 0, got {m}")


def parse_measure_spec(document: str) -> MeasureSpec:
    """Parse the line-oriented measure format.

    Header lines ``depth = <int>`` and ``name = <string>``; records
    ``interior_atom <re> <im> <mass>``, ``boundary_atom <theta> <mass>``,
    ``boundary_density uniform <total>``, ``interior_density power <b> <c>``.
    ``#`` starts a comment.
    """
    spec = MeasureSpec()
    for lineno, raw in enumerate(document.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" in line:
            key, _, value = (s.strip() for s in line.partition("="))
            if key == "depth":
                try:
                    spec.depth = int(value)
                except ValueError:
                    raise MeasureParseError(lineno, f"bad depth {value!r}") from None
                if spec.depth < 0:
                    raise MeasureParseError(lineno, "depth must be >= 0")
            elif key == "name":
                spec.name = value
            else:
                raise MeasureParseError(lineno, f"unknown header {key!r}")
            continue
        tok = line.split()
        try:
            _parse_record(spec, tok)
        except MeasureParseError as exc:
            raise MeasureParseError(lineno, str(exc)) from None
        except (ValueError, IndexError):
            raise MeasureParseError(lineno, f"malformed record {line!r}") from None
    return spec


def _parse_record(spec: MeasureSpec, tok: list[str]) -> None:
    kind = tok[0]
    if kind == "interior_atom" and len(tok) == 4:
        z = complex(float(tok[1]), float(tok[2]))
        m = float(tok[3])
        if not abs(z) < 1.0:
            raise MeasureParseError(0, f"interior atom {z} has |z| >= 1")
        _mass_or_raise(m)
        spec.interior_atoms.append((z, m))
    elif kind == "boundary_atom" and len(tok) == 3:
        theta, m = float(tok[1]), float(tok[2])
        _mass_or_raise(m)
        spec.boundary_atoms.append((theta, m))
    elif kind == "boundary_density" and len(tok) == 3 and tok[1] == "uniform":
        m = float(tok[2])
        _mass_or_raise(m)
        spec.boundary_density.append(m)
    elif kind == "interior_density" and len(tok) == 4 and tok[1] == "power":
        b, c = float(tok[2]), float(tok[3])
        _mass_or_raise(c)
        if c > 0 and not b > -1.0:
            raise MeasureParseError(0, f"density exponent b={b} must exceed -1")
        spec.interior_density.append((b, c))
    else:
        raise ValueError


def _mass_or_raise(m: float) -> None:
    if not (math.isfinite(m) and m >= 0.0):
        raise MeasureParseError(0, f"negative or non-finite mass {m}")


@dataclass(frozen=True)
class Atom:
    """Representative point mass used by the duality computations."""

    point: complex
    mass: float
    node: int


class TreeMeasure:
    """Per-node interior masses and per-leaf boundary masses on a tree.

    ``boundary_mass[k]`` belongs to ``tree.leaves[k]``.  ``subtree_mass[a]`` is
    ``mu(closure of S(a))``, filled at construction by one bottom-up sweep.
    """

    def __init__(self, tree: Tree, interior, boundary, atoms=None, deep_atoms: int = 0):
        interior = np.array(interior, dtype=float)
        boundary = np.array(boundary, dtype=float)
        if interior.shape != (tree.size,):
            raise ValidationError(f"interior masses need shape ({tree.size},)")
        if boundary.shape != (tree.leaves.size,):
            raise ValidationError(f"boundary masses need shape ({tree.leaves.size},)")
        if not (np.all(np.isfinite(interior)) and np.all(np.isfinite(boundary))):
            raise ValidationError("masses must be finite")
        if np.any(interior < 0) or np.any(boundary < 0):
            raise ValidationError("masses must be >= 0")
        self.tree = tree
        self.interior_mass = interior
        self.boundary_mass = boundary
        self.atoms = list(atoms) if atoms is not None else None
        self.deep_atoms = deep_atoms
        self.mass = interior.copy()
        self.mass[tree.leaves] += boundary
        self.subtree_mass = tree.sum_up(self.mass)
        for arr in (self.interior_mass, self.boundary_mass, self.mass, self.subtree_mass):
            arr.setflags(write=False)

    @property
    def total(self) -> float:
        return float(self.subtree_mass[0])

    def boundary_full(self) -> np.ndarray:
        """Boundary masses scattered to a node-length array."""
        out = np.zeros(self.tree.size)
        out[self.tree.leaves] = self.boundary_mass
        return out

    def scaled(self, t: float) -> "TreeMeasure":
        atoms = None
        if self.atoms is not None:
            atoms = [Atom(a.point, t * a.mass, a.node) for a in self.atoms]
        return TreeMeasure(self.tree, t * self.interior_mass, t * self.boundary_mass, atoms)

    def representative_atoms(self) -> list[Atom]:
        """Point masses standing in for the measure.

        Pulled-back measures keep their atoms (box centres for densities);
        measures built from raw masses on a dyadic tree use box centres for
        interior mass and arc midpoints for boundary mass.
        """
        if self.atoms is not None:
            return self.atoms
        tree = self.tree
        if not tree.is_dyadic:
            raise UnsupportedOperation("abstract trees carry no disc geometry")
        atoms = []
        for i in np.flatnonzero(self.interior_mass):
            atoms.append(Atom(box_geometry(tree, int(i)).center, float(self.interior_mass[i]), int(i)))
        for k in np.flatnonzero(self.boundary_mass):
            leaf = int(tree.leaves[k])
            theta = boundary_arc(tree, leaf).midpoint
            atoms.append(Atom(cmath.exp(1j * theta), float(self.boundary_mass[k]), leaf))
        return atoms


def set_masses(tree: Tree, interior, boundary=None) -> TreeMeasure:
    if boundary is None:
        boundary = np.zeros(tree.leaves.size)
    return TreeMeasure(tree, interior, boundary)


def subtree_mass(tm: TreeMeasure) -> np.ndarray:
    return tm.subtree_mass


def pull_back(spec: MeasureSpec, tree: Tree, order: int = 8) -> TreeMeasure:
    """Tree measure induced by ``spec`` on a dyadic tree."""
    if not tree.is_dyadic:
        raise UnsupportedOperation("pull_back needs a dyadic tree; use set_masses")
    D = tree.depth_limit
    leaves = tree.leaves
    n_leaves = leaves.size
    interior = np.zeros(tree.size)
    boundary = np.zeros(n_leaves)
    atoms: list[Atom] = []
    deep = 0

    for z, m in spec.interior_atoms:
        node, clamped = locate_point(tree, complex(z))
        deep += clamped
        interior[node] += m
        atoms.append(Atom(complex(z), m, node))

    for theta, m in spec.boundary_atoms:
        leaf = locate_angle(tree, theta)
        boundary[tree.leaf_position(leaf)] += m
        atoms.append(Atom(cmath.exp(1j * theta), m, leaf))

    if spec.boundary_density:
        per_leaf = math.fsum(spec.boundary_density) / n_leaves
        boundary += per_leaf
        if per_leaf > 0:
            for leaf in leaves:
                theta = boundary_arc(tree, int(leaf)).midpoint
                atoms.append(Atom(cmath.exp(1j * theta), per_leaf, int(leaf)))

    density = np.zeros(tree.size)
    for b, c in spec.interior_density:
        if c == 0:
            continue
        density += quadrature.refined_box_integrals(
            tree, lambda r, th, b=b, c=c: c * (1.0 - r * r) ** b, order
        )
        # closed form for the annulus beyond the truncation, split evenly by sector
        r0 = 1.0 - 2.0 ** (-D - 1)
        tail = c * (1.0 - r0 * r0) ** (b + 1.0) / (b + 1.0)
        density[leaves] += tail / n_leaves
    if np.any(density):
        interior += density
        for i in np.flatnonzero(density):
            atoms.append(Atom(box_geometry(tree, int(i)).center, float(density[i]), int(i)))

    if deep:
        logger.warning("%d interior atom(s) deeper than depth %d attached to leaves", deep, D)
    return TreeMeasure(tree, interior, boundary, atoms, deep_atoms=deep)
