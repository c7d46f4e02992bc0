"""Shared random instances and independent oracles for the test-suite."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from treecarleson.measure import TreeMeasure, set_masses
from treecarleson.tree import Tree, build_abstract_tree

# numpy PCG64 everywhere, seeded from this 64-bit value
SUITE_SEED = 0x9E3779B97F4A7C15
P_VALUES = (1.5, 2.0, 3.0)


@dataclass
class Instance:
    tree: Tree
    tm: TreeMeasure
    rho: np.ndarray
    p: float


def random_tree(rng, max_nodes: int) -> Tree:
    n = int(rng.integers(1, max_nodes + 1))
    parents = [None] + [int(rng.integers(0, i)) for i in range(1, n)]
    return build_abstract_tree(parents)


def random_measure(rng, tree: Tree, zero_frac: float = 0.3) -> TreeMeasure:
    while True:
        interior = rng.uniform(0.0, 1.0, tree.size) * (rng.uniform(size=tree.size) > zero_frac)
        bnd = rng.uniform(0.0, 1.0, tree.leaves.size) * (rng.uniform(size=tree.leaves.size) > 0.5)
        if interior.sum() + bnd.sum() > 0:
            return set_masses(tree, interior, bnd)


def random_instances(count: int = 200, max_nodes: int = 10, seed: int = SUITE_SEED) -> list[Instance]:
    rng = np.random.default_rng(seed)
    out = []
    for k in range(count):
        tree = random_tree(rng, max_nodes)
        tm = random_measure(rng, tree)
        rho = np.exp(rng.normal(0.0, 0.5, tree.size))
        out.append(Instance(tree, tm, rho, P_VALUES[k % len(P_VALUES)]))
    return out


def bfs_path(tree: Tree, a: int, b: int) -> list[int]:
    """Shortest path by breadth-first search on the undirected edge set."""
    adj = {i: set() for i in range(tree.size)}
    for i in range(1, tree.size):
        j = int(tree.parent[i])
        adj[i].add(j)
        adj[j].add(i)
    prev = {a: None}
    queue = deque([a])
    while queue:
        x = queue.popleft()
        for y in sorted(adj[x]):
            if y not in prev:
                prev[y] = x
                queue.append(y)
    path = [b]
    while path[-1] != a:
        path.append(prev[path[-1]])
    return path[::-1]


def brute_ancestor(tree: Tree, a: int, b: int) -> bool:
    x = b
    while True:
        if x == a:
            return True
        if x == 0:
            return False
        x = int(tree.parent[x])


def dense_hardy(tree: Tree) -> np.ndarray:
    """``L[a, b] = 1`` iff ``b`` lies on the root path of ``a``, by ancestor walks."""
    n = tree.size
    L = np.zeros((n, n))
    for a in range(n):
        for b in range(n):
            L[a, b] = float(brute_ancestor(tree, b, a))
    return L


def dense_norm_p2(tm: TreeMeasure, rho) -> float:
    """Largest generalized eigenvalue of ``L^T M L`` against ``diag(rho)``, by eigh."""
    L = dense_hardy(tm.tree)
    s = 1.0 / np.sqrt(np.asarray(rho, dtype=float))
    B = (L * s[None, :]).T @ (tm.mass[:, None] * (L * s[None, :]))
    return float(np.sqrt(max(np.linalg.eigvalsh(B)[-1], 0.0)))
