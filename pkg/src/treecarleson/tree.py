"""Rooted trees: the dyadic Whitney tree of the unit disc and finite abstract trees.

Nodes are dense integer indices.  Dyadic trees use level-order numbering, so the
box ``(n, m)`` (depth ``n``, angular position ``1 <= m <= 2**n``) has index
``2**n - 1 + (m - 1)``, its parent is ``(i - 1) // 2`` and its children are
``2i + 1`` and ``2i + 2``.

The infinite tree is truncated at a depth ``D``; the depth-``D`` leaves stand in
for the boundary points of the tree, each leaf corresponding to its arc of the
unit circle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, StructureError, UnsupportedOperation

TWO_PI = 2.0 * math.pi
MAX_DEPTH = 20

DYADIC = "dyadic"
ABSTRACT = "abstract"


@dataclass(frozen=True)
class Box:
    """Polar Whitney box ``r_lo <= |z| <= r_hi``, ``theta_lo <= arg z <= theta_hi``."""

    r_lo: float
    r_hi: float
    theta_lo: float
    theta_hi: float

    @property
    def center(self) -> complex:
        r = 0.5 * (self.r_lo + self.r_hi)
        t = 0.5 * (self.theta_lo + self.theta_hi)
        return complex(r * math.cos(t), r * math.sin(t))

    @property
    def area(self) -> float:
        # normalized area measure dA = dx dy / pi
        return (self.r_hi**2 - self.r_lo**2) * (self.theta_hi - self.theta_lo) / TWO_PI


@dataclass(frozen=True)
class Arc:
    """Boundary arc, half-open ``[theta_lo, theta_hi)`` for membership tests."""

    theta_lo: float
    theta_hi: float

    @property
    def length(self) -> float:
        return self.theta_hi - self.theta_lo

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.theta_lo + self.theta_hi)

    def contains(self, theta: float) -> bool:
        return self.theta_lo <= theta < self.theta_hi

    def closed(self) -> tuple[float, float]:
        return (self.theta_lo, self.theta_hi)


class Tree:
    """Immutable rooted tree stored as dense arrays.

    ``parent[0] == -1``; ``depth`` is the graph distance to the root; ``levels[n]``
    holds the indices at depth ``n`` in ascending order.
    """

    def __init__(self, parent: np.ndarray, kind: str, depth_limit: int | None = None):
        parent = np.asarray(parent, dtype=np.int64)
        self._parent = parent
        self._parent.setflags(write=False)
        self.kind = kind
        n = parent.size

        if kind == DYADIC:
            D = int(depth_limit)
            idx = np.arange(n, dtype=np.int64)
            depth = np.floor(np.log2(idx + 1)).astype(np.int64)
            self._levels = [np.arange(2**k - 1, 2 ** (k + 1) - 1) for k in range(D + 1)]
            self._child_ptr = None
            self._child_idx = None
            leaves = self._levels[-1]
        else:
            order = np.argsort(parent[1:], kind="stable") + 1 if n > 1 else np.empty(0, np.int64)
            counts = np.bincount(parent[1:], minlength=n) if n > 1 else np.zeros(n, np.int64)
            ptr = np.zeros(n + 1, dtype=np.int64)
            np.cumsum(counts, out=ptr[1:])
            self._child_ptr = ptr
            self._child_idx = order.astype(np.int64)
            depth = np.full(n, -1, dtype=np.int64)
            depth[0] = 0
            levels = [np.array([0], dtype=np.int64)]
            seen = 1
            while True:
                frontier = levels[-1]
                nxt = np.concatenate([self._child_idx[ptr[i] : ptr[i + 1]] for i in frontier])
                if nxt.size == 0:
                    break
                nxt.sort()
                depth[nxt] = len(levels)
                levels.append(nxt)
                seen += nxt.size
            if seen != n:
                raise StructureError("parent list contains a cycle or a disconnected node")
            self._levels = levels
            D = len(levels) - 1
            leaves = np.flatnonzero(counts == 0)

        self.depth = depth
        self.depth.setflags(write=False)
        self.depth_limit = D
        self.leaves = np.asarray(leaves, dtype=np.int64)
        self.leaves.setflags(write=False)
        leaf_pos = np.full(n, -1, dtype=np.int64)
        leaf_pos[self.leaves] = np.arange(self.leaves.size)
        self._leaf_pos = leaf_pos

    # -- structure --------------------------------------------------------

    @property
    def size(self) -> int:
        return int(self._parent.size)

    def __len__(self) -> int:
        return self.size

    def __repr__(self) -> str:
        return f"Tree(kind={self.kind!r}, size={self.size}, depth_limit={self.depth_limit})"

    @property
    def parent(self) -> np.ndarray:
        return self._parent

    @property
    def levels(self) -> list[np.ndarray]:
        return self._levels

    @property
    def is_dyadic(self) -> bool:
        return self.kind == DYADIC

    def children(self, node: int) -> list[int]:
        self._check(node)
        if self.is_dyadic:
            if self.depth[node] >= self.depth_limit:
                return []
            return [2 * node + 1, 2 * node + 2]
        ptr = self._child_ptr
        return [int(c) for c in self._child_idx[ptr[node] : ptr[node + 1]]]

    def is_leaf(self, node: int) -> bool:
        return self._leaf_pos[node] >= 0

    def leaf_position(self, node: int) -> int:
        """Position of ``node`` in ``self.leaves`` (-1 for internal nodes)."""
        return int(self._leaf_pos[node])

    def leaf_mask(self) -> np.ndarray:
        return self._leaf_pos >= 0

    def _check(self, node: int) -> None:
        if not 0 <= node < self.size:
            raise IndexError(f"node {node} not in tree of size {self.size}")

    # -- dyadic indexing --------------------------------------------------

    def index(self, n: int, m: int) -> int:
        """Index of the dyadic box ``(n, m)``."""
        self._require_dyadic()
        if not (0 <= n <= self.depth_limit and 1 <= m <= 2**n):
            raise IndexError(f"({n}, {m}) not in dyadic tree of depth {self.depth_limit}")
        return 2**n - 1 + (m - 1)

    def nm(self, node: int) -> tuple[int, int]:
        self._require_dyadic()
        self._check(node)
        n = (node + 1).bit_length() - 1
        return n, node - (2**n - 1) + 1

    def _require_dyadic(self) -> None:
        if not self.is_dyadic:
            raise UnsupportedOperation("operation needs a dyadic tree")

    # -- aggregation sweeps -----------------------------------------------

    def sum_up(self, values: np.ndarray) -> np.ndarray:
        """Subtree sums: ``out[a] = sum of values[b] over b >= a``, one bottom-up sweep."""
        out = np.array(values, dtype=float, copy=True)
        if self.is_dyadic:
            for k in range(self.depth_limit, 0, -1):
                lvl = out[2**k - 1 : 2 ** (k + 1) - 1]
                out[2 ** (k - 1) - 1 : 2**k - 1] += lvl[0::2] + lvl[1::2]
        else:
            for lvl in self._levels[:0:-1]:
                np.add.at(out, self._parent[lvl], out[lvl])
        return out

    def prefix_down(self, values: np.ndarray) -> np.ndarray:
        """Root-path sums: ``out[a] = sum of values[b] over o <= b <= a``."""
        out = np.array(values, dtype=float, copy=True)
        for lvl in self._levels[1:]:
            out[lvl] += out[self._parent[lvl]]
        return out

    def max_down(self, values: np.ndarray) -> np.ndarray:
        """Running maximum along root paths."""
        out = np.array(values, dtype=float, copy=True)
        for lvl in self._levels[1:]:
            out[lvl] = np.maximum(out[lvl], out[self._parent[lvl]])
        return out


def build_dyadic_tree(depth: int, max_depth: int = MAX_DEPTH) -> Tree:
    if depth < 0:
        raise ValueError("depth must be >= 0")
    if depth > max_depth:
        raise CapacityError(
            f"depth {depth} exceeds maximum {max_depth} ({2 ** (depth + 1) - 1} nodes)"
        )
    n = 2 ** (depth + 1) - 1
    parent = (np.arange(n, dtype=np.int64) - 1) // 2
    parent[0] = -1
    return Tree(parent, DYADIC, depth)


def build_abstract_tree(parent_list) -> Tree:
    """Tree from a parent list; entry 0 is the root (``None`` or negative).

    An empty list gives the one-node tree.
    """
    parent_list = list(parent_list)
    if not parent_list:
        parent_list = [None]
    n = len(parent_list)
    root = parent_list[0]
    if root is not None and root >= 0:
        raise StructureError("node 0 must be the root (parent None or negative)")
    parent = np.empty(n, dtype=np.int64)
    parent[0] = -1
    for i, p in enumerate(parent_list[1:], start=1):
        if p is None or p < 0:
            raise StructureError(f"node {i} has no parent; only node 0 may be the root")
        if p >= n or p == i:
            raise StructureError(f"node {i} has invalid parent {p}")
        parent[i] = int(p)
    return Tree(parent, ABSTRACT)


def box_geometry(tree: Tree, node: int) -> Box:
    n, m = tree.nm(node)
    step = TWO_PI / 2**n
    return Box(1.0 - 2.0**-n, 1.0 - 2.0 ** (-n - 1), (m - 1) * step, m * step)


def boundary_arc(tree: Tree, node: int) -> Arc:
    n, m = tree.nm(node)
    step = TWO_PI / 2**n
    return Arc((m - 1) * step, m * step)


def ancestors(tree: Tree, node: int) -> list[int]:
    """Root path ``[o, ..., node]``."""
    tree._check(node)
    path = [node]
    par = tree.parent
    while path[-1] != 0:
        path.append(int(par[path[-1]]))
    path.reverse()
    return path


def geodesic(tree: Tree, a: int, b: int) -> list[int]:
    """Vertices crossed going from ``a`` to ``b``; ``len - 1`` is the tree distance."""
    tree._check(a)
    tree._check(b)
    par, dep = tree.parent, tree.depth
    up, down = [a], [b]
    x, y = a, b
    while dep[x] > dep[y]:
        x = int(par[x])
        up.append(x)
    while dep[y] > dep[x]:
        y = int(par[y])
        down.append(y)
    while x != y:
        x, y = int(par[x]), int(par[y])
        up.append(x)
        down.append(y)
    down.pop()
    return up + down[::-1]


def distance(tree: Tree, a: int, b: int) -> int:
    return len(geodesic(tree, a, b)) - 1


def is_ancestor(tree: Tree, a: int, b: int) -> bool:
    """``a <= b`` in the order induced by the root (reflexive)."""
    tree._check(a)
    tree._check(b)
    par, dep = tree.parent, tree.depth
    while dep[b] > dep[a]:
        b = int(par[b])
    return a == b


def subtree_nodes(tree: Tree, node: int) -> np.ndarray:
    """Sorted indices of ``S(node) = {b : b >= node}``."""
    mask = np.zeros(tree.size, dtype=float)
    mask[node] = 1.0
    return np.flatnonzero(tree.prefix_down(mask) > 0)


def depth_of_radius(radius: float) -> int:
    """Whitney depth of a point with ``|z| = radius < 1``.

    Radially the boxes are taken as ``2**-(n+1) <= 1 - |z| < 2**-n`` (the root
    also keeps ``z = 0``), so ``|z| = 3/4`` lies at depth 1.
    """
    t = 1.0 - radius
    if not t > 0.0:
        raise ValueError("point is not inside the open unit disc")
    _, e = math.frexp(t)
    return max(0, -e)


def angle_position(theta: float, n: int) -> int:
    """Zero-based angular slot at depth ``n`` under the half-open convention."""
    frac = (theta % TWO_PI) / TWO_PI
    k = int(math.floor(frac * 2**n))
    return min(max(k, 0), 2**n - 1)


def locate_point(tree: Tree, z: complex) -> tuple[int, bool]:
    """Box containing ``z``; points deeper than the truncation go to the leaf of
    their sector.  Returns ``(node, clamped)``."""
    tree._require_dyadic()
    n = depth_of_radius(abs(z))
    clamped = n > tree.depth_limit
    n = min(n, tree.depth_limit)
    theta = math.atan2(z.imag, z.real)
    return 2**n - 1 + angle_position(theta, n), clamped


def locate_angle(tree: Tree, theta: float) -> int:
    """Leaf whose arc contains the boundary point ``e^{i theta}``."""
    tree._require_dyadic()
    D = tree.depth_limit
    return 2**D - 1 + angle_position(theta, D)
