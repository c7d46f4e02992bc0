"""Tensor Gauss-Legendre rules over Whitney boxes and annular sectors.

Integrals are with respect to normalized area ``dA = r dr dtheta / pi``.
Integrands are callables ``func(r, theta)`` broadcasting over numpy arrays.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .tree import TWO_PI, Tree

_CHUNK = 4096


@lru_cache(maxsize=None)
def _leggauss(order: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_nodes(lo, hi, order: int):
    """Nodes and weights on ``[lo, hi]``; ``lo``/``hi`` may be arrays (nodes on the last axis)."""
    x, w = _leggauss(order)
    lo = np.asarray(lo, dtype=float)[..., None]
    hi = np.asarray(hi, dtype=float)[..., None]
    half = 0.5 * (hi - lo)
    return lo + half * (x + 1.0), half * w


def sector_integrals(func, r_lo: float, r_hi: float, n_sectors: int, order: int) -> np.ndarray:
    """Integral of ``func dA`` over each of ``n_sectors`` equal angular sectors of
    the annulus ``r_lo <= r <= r_hi``."""
    r, wr = gauss_nodes(r_lo, r_hi, order)  # shape (order,)
    out = np.empty(n_sectors)
    step = TWO_PI / n_sectors
    for start in range(0, n_sectors, _CHUNK):
        k = np.arange(start, min(start + _CHUNK, n_sectors))
        th, wt = gauss_nodes(k * step, (k + 1) * step, order)  # (chunk, order)
        vals = func(r[:, None, None], th[None, :, :])  # (order, chunk, order)
        vals = np.broadcast_to(vals, (order, k.size, order))
        out[k] = np.einsum("i,ijk,jk->j", wr * r, vals, wt)
    return out / np.pi


def box_integrals(tree: Tree, func, order: int = 8) -> np.ndarray:
    """Per-node integral of ``func dA`` over the Whitney box of each node."""
    out = np.empty(tree.size)
    for n in range(tree.depth_limit + 1):
        out[2**n - 1 : 2 ** (n + 1) - 1] = sector_integrals(
            func, 1.0 - 2.0**-n, 1.0 - 2.0 ** (-n - 1), 2**n, order
        )
    return out


def refined_box_integrals(tree: Tree, func, order: int = 8, rtol: float = 1e-9) -> np.ndarray:
    """Order-``order`` box rule, redone at twice the order on boxes where the two disagree."""
    low = box_integrals(tree, func, order)
    high = box_integrals(tree, func, 2 * order)
    bad = np.abs(high - low) > rtol * np.maximum(np.abs(high), np.finfo(float).tiny)
    return np.where(bad, high, low)


def residual_sector_integrals(
    func, depth: int, n_sectors: int, order: int = 8, extra_levels: int = 40
) -> np.ndarray:
    """Integral of ``func dA`` beyond the truncation, ``1 - |z| < 2**-(depth+1)``,
    per angular sector, summed over successive dyadic annuli down to
    ``1 - |z| = 2**-(depth+1+extra_levels)``."""
    out = np.zeros(n_sectors)
    # radii beyond 1 - 2**-50 are not resolvable next to 1.0 in double precision
    for k in range(depth + 1, min(depth + 1 + extra_levels, 50)):
        out += sector_integrals(func, 1.0 - 2.0**-k, 1.0 - 2.0 ** (-k - 1), n_sectors, order)
    return out
