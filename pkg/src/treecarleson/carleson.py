"""Tree condition, embedding norms of the Hardy operator, and the maximal-function
inequalities that connect them.

Notation: ``p' = p/(p-1)``, ``m`` the combined node mass of the closed tree,
``sigma(a) = rho(a)^{1-p'} mu(S(a))^{p'}``.  The tree condition asks for
``sum_{b >= a} sigma(b) <= C mu(S(a))`` at every node; its best constant is
``C_TC``.

Constants.  ``M`` is bounded on ``L^infinity`` with norm 1 and, by the level-set
argument, satisfies ``sigma({Mg > t}) <= C_TC t^{-1} int g dmu``.  Splitting
``g = g 1{g > t/2} + g 1{g <= t/2}`` and integrating the distribution function
gives, for ``q = p'``,

    sum (Mg)^q sigma  <=  q 2^q / (q - 1) * C_TC * int g^q dmu  =  p 2^{p'} C_TC int g^q dmu.

Since ``I*_mu g <= mu(S) Mg`` pointwise, the embedding norm ``N`` of
``I: L^p(rho) -> L^p(mu)`` obeys ``C_TC <= N^{p'} <= K(p) C_TC`` with
``K(p) = p 2^{p'}`` (the left inequality comes from testing with indicators of
successor sets).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import CapacityError, DomainError, ValidationError
from .measure import TreeMeasure
from .operators import TreeFunction, hardy_adjoint, maximal
from .weight import as_weight_values

DEFAULT_SEED = 0x5EED_CA21_E50F_7EE5


def conjugate(p: float) -> float:
    if not p > 1.0:
        raise ValidationError(f"p must exceed 1, got {p}")
    return p / (p - 1.0)


def marcinkiewicz_constant(p: float) -> float:
    """``K(p) = p' 2^{p'} / (p' - 1) = p 2^{p'}``, see the module docstring."""
    return p * 2.0 ** conjugate(p)


def sigma(tm: TreeMeasure, rho, p: float) -> TreeFunction:
    q = conjugate(p)
    r = as_weight_values(rho, tm.tree)
    return TreeFunction(tm.tree, r ** (1.0 - q) * tm.subtree_mass**q)


@dataclass(frozen=True, eq=False)
class TCReport:
    constant: float
    argmax_node: int
    per_node_ratio: np.ndarray  # NaN where mu(S(a)) = 0
    finite: bool
    sigma_subtree: np.ndarray


def tc_constant(tm: TreeMeasure, rho, p: float) -> TCReport:
    tree = tm.tree
    sig = sigma(tm, rho, p).values
    sig_sub = tree.sum_up(sig)
    mass = tm.subtree_mass
    pos = mass > 0
    ratio = np.full(tree.size, np.nan)
    ratio[pos] = sig_sub[pos] / mass[pos]
    finite = bool(np.all(sig_sub[~pos] == 0))
    if np.any(pos):
        arg = int(np.nanargmax(ratio))
        const = float(ratio[arg])
    else:
        arg, const = 0, 0.0
    if not finite:
        const = float("inf")
        arg = int(np.flatnonzero(~pos & (sig_sub > 0))[0])
    return TCReport(const, arg, ratio, finite, sig_sub)


@dataclass(frozen=True, eq=False)
class EmbeddingReport:
    norm_estimate: float
    method: str
    iterations: int
    certified_lower: float
    witness: TreeFunction
    converged: bool = True
    p: float = 2.0
    history: list = field(default_factory=list)


def embedding_ratio(phi: TreeFunction, tm: TreeMeasure, rho, p: float) -> float:
    """``||I phi||_{L^p(mu)} / ||phi||_{L^p(rho)}`` over the closed tree."""
    r = as_weight_values(rho, tm.tree)
    den = float(np.sum(np.abs(phi.values) ** p * r))
    if den == 0:
        raise DomainError("phi vanishes identically")
    u = tm.tree.prefix_down(phi.values)
    num = float(np.sum(np.abs(u) ** p * tm.mass))
    return (num / den) ** (1.0 / p)


def _zero_report(tm, method, p):
    w = TreeFunction(tm.tree, np.ones(tm.tree.size))
    return EmbeddingReport(0.0, method, 0, 0.0, w, True, p)


def embedding_norm_quadratic(
    tm: TreeMeasure, rho, tol: float = 1e-10, max_iter: int = 10000
) -> EmbeddingReport:
    """Norm of ``I: L^2(rho) -> L^2(mu)`` by power iteration.

    Iterates the symmetric operator ``x -> rho^{-1/2} I^T m I rho^{-1/2} x`` from
    the all-ones vector and stops when the Rayleigh quotient settles to ``tol``.
    """
    tree = tm.tree
    r = as_weight_values(rho, tree)
    if tm.total == 0:
        return _zero_report(tm, "exact-quadratic", 2.0)
    s = 1.0 / np.sqrt(r)
    m = tm.mass

    def apply(x):
        return s * tree.sum_up(m * tree.prefix_down(s * x))

    x = np.ones(tree.size)
    x /= np.linalg.norm(x)
    lam = 0.0
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        y = apply(x)
        lam_new = float(np.dot(x, y))
        ny = np.linalg.norm(y)
        x = y / ny
        if abs(lam_new - lam) <= tol * lam_new:
            lam = lam_new
            converged = True
            break
        lam = lam_new
    witness = TreeFunction(tree, s * x)
    cert = embedding_ratio(witness, tm, r, 2.0)
    return EmbeddingReport(max(np.sqrt(lam), cert), "exact-quadratic", it, cert, witness, converged, 2.0)


def _ascent(tree, m, r, p, phi, tol, max_iter):
    """Fixed-point iteration ``phi <- (I^T(m (I phi)^{p-1}) / rho)^{1/(p-1)}``.

    This is the nonlinear power method for the nonnegative matrix
    ``m^{1/p} I rho^{-1/p}``; the ratio is nondecreasing along the iterates.
    """
    e = 1.0 / (p - 1.0)

    def ratio_p(phi):
        return float(np.sum(tree.prefix_down(phi) ** p * m)) / float(np.sum(phi**p * r))

    val = ratio_p(phi)
    for it in range(1, max_iter + 1):
        u = tree.prefix_down(phi)
        v = tree.sum_up(m * u ** (p - 1.0))
        new = (v / r) ** e
        new /= float(np.sum(new**p * r)) ** (1.0 / p)
        new_val = ratio_p(new)
        phi = new
        if abs(new_val - val) <= tol * new_val:
            return phi, new_val, it, True
        val = new_val
    return phi, val, max_iter, False


def embedding_norm_general(
    tm: TreeMeasure,
    rho,
    p: float,
    restarts: int = 4,
    seed: int = DEFAULT_SEED,
    tol: float = 1e-8,
    max_iter: int = 20000,
) -> EmbeddingReport:
    """Best ratio found by multi-start ascent over ``phi >= 0``; a certified lower bound."""
    conjugate(p)
    tree = tm.tree
    r = as_weight_values(rho, tree)
    if tm.total == 0:
        return _zero_report(tm, "ascent", p)
    m = tm.mass
    rng = np.random.default_rng(seed)
    best = None
    total_it = 0
    history = []
    for k in range(max(1, restarts)):
        start = np.ones(tree.size) if k == 0 else rng.uniform(0.1, 1.0, tree.size)
        start /= float(np.sum(start**p * r)) ** (1.0 / p)
        phi, val, it, conv = _ascent(tree, m, r, p, start, tol, max_iter)
        total_it += it
        history.append(val ** (1.0 / p))
        # ties keep the earliest restart
        if best is None or val > best[1]:
            best = (phi, val, conv)
    witness = TreeFunction(tree, best[0])
    cert = embedding_ratio(witness, tm, r, p)
    return EmbeddingReport(
        max(best[1] ** (1.0 / p), cert), "ascent", total_it, cert, witness, best[2], p, history
    )


def hardy_matrix(tree) -> np.ndarray:
    """Dense 0/1 matrix of ``I``: entry ``(a, b)`` is 1 when ``b <= a``."""
    n = tree.size
    L = np.zeros((n, n))
    for b in range(n):
        e = np.zeros(n)
        e[b] = 1.0
        L[:, b] = tree.prefix_down(e)
    return L


def embedding_norm_bruteforce(
    tm: TreeMeasure, rho, p: float, grid: int = 16, max_nodes: int = 6, tol: float = 1e-13
) -> EmbeddingReport:
    """Grid search over the simplex ``sum phi = 1, phi >= 0`` followed by a compass
    search with halving steps around the best grid point.  Small trees only."""
    conjugate(p)
    tree = tm.tree
    n = tree.size
    if n > max_nodes:
        raise CapacityError(f"brute force limited to {max_nodes} nodes, tree has {n}")
    r = as_weight_values(rho, tree)
    if tm.total == 0:
        return _zero_report(tm, "brute-force", p)
    L = hardy_matrix(tree)
    m = tm.mass

    def objective(P):
        num = ((P @ L.T) ** p) @ m
        den = (P**p) @ r
        with np.errstate(invalid="ignore", divide="ignore"):
            out = num / den
        return np.where(den > 0, out, -np.inf)

    bars = np.array(list(itertools.combinations(range(grid + n - 1), n - 1)), dtype=float)
    if n == 1:
        pts = np.ones((1, 1))
    else:
        ext = np.hstack([np.full((bars.shape[0], 1), -1.0), bars, np.full((bars.shape[0], 1), grid + n - 1.0)])
        pts = (np.diff(ext, axis=1) - 1.0) / grid
    vals = objective(pts)
    k = int(np.argmax(vals))
    x, best = pts[k].copy(), float(vals[k])

    dirs = np.array(list(itertools.product((-1.0, 0.0, 1.0), repeat=n)))
    dirs = dirs[np.any(dirs != 0, axis=1)]
    h = 1.0 / grid
    it = 0
    while h > tol and it < 100000:
        it += 1
        cand = np.clip(x + h * dirs, 0.0, None)
        v = objective(cand)
        j = int(np.argmax(v))
        if v[j] > best:
            x, best = cand[j] / cand[j].sum(), float(v[j])
        else:
            h *= 0.5
    witness = TreeFunction(tree, x)
    cert = embedding_ratio(witness, tm, r, p)
    return EmbeddingReport(max(best ** (1.0 / p), cert), "brute-force", it, cert, witness, True, p)


def dual_ratio(g: TreeFunction, tm: TreeMeasure, rho, p: float) -> float:
    """``sum_a (int_{S(a)} g dmu)^{p'} rho(a)^{1-p'}  /  int g^{p'} dmu``."""
    if g.min() < 0:
        raise DomainError("dual ratio needs g >= 0")
    q = conjugate(p)
    r = as_weight_values(rho, tm.tree)
    lhs = float(np.sum(hardy_adjoint(g, tm).values ** q * r ** (1.0 - q)))
    rhs = _integral_power(g, tm, q)
    if rhs == 0:
        raise DomainError("g vanishes mu-almost everywhere")
    return lhs / rhs


def _integral_power(g: TreeFunction, tm: TreeMeasure, q: float) -> float:
    s = float(np.dot(g.values**q, tm.interior_mass))
    return s + float(np.dot(g.boundary_values() ** q, tm.boundary_mass))


@dataclass(frozen=True, eq=False)
class LevelSets:
    E: np.ndarray  # sorted node indices with Mg > lambda
    gamma: np.ndarray  # minimal points of E
    mask: np.ndarray
    maximal: TreeFunction


def level_sets(g: TreeFunction, tm: TreeMeasure, lam: float) -> LevelSets:
    if not lam > 0:
        raise DomainError("lambda must be > 0")
    mg = maximal(g, tm)
    mask = mg.values > lam
    par = tm.tree.parent
    top = mask.copy()
    top[1:] &= ~mask[par[1:]]
    return LevelSets(np.flatnonzero(mask), np.flatnonzero(top), mask, mg)


@dataclass(frozen=True)
class WeakTypeReport:
    lhs: float
    rhs: float
    passed: bool
    constant: float
    lam: float
    diagnostic: str = ""


def weak_type_check(
    g: TreeFunction, tm: TreeMeasure, rho, p: float, lam: float, tc: TCReport | None = None
) -> WeakTypeReport:
    """Compare ``sigma(E(lambda))`` with ``C_TC lambda^{-1} int g dmu``."""
    tc = tc or tc_constant(tm, rho, p)
    if not tc.finite:
        return WeakTypeReport(np.inf, np.inf, False, tc.constant, lam, "tree condition fails")
    ls = level_sets(g, tm, lam)
    sig = sigma(tm, rho, p).values
    lhs = float(sig[ls.mask].sum())
    rhs = tc.constant * float(hardy_adjoint(g, tm).values[0]) / lam
    return WeakTypeReport(lhs, rhs, lhs <= rhs * (1.0 + 1e-12), tc.constant, lam)


@dataclass(frozen=True)
class MaximalReport:
    lhs: float
    rhs: float
    ratio: float
    constant: float
    bound: float
    passed: bool
    diagnostic: str = ""


def maximal_strong_check(
    g: TreeFunction, tm: TreeMeasure, rho, p: float, tc: TCReport | None = None
) -> MaximalReport:
    """``sum (Mg)^{p'} sigma / int g^{p'} dmu`` against ``K(p) C_TC``."""
    q = conjugate(p)
    tc = tc or tc_constant(tm, rho, p)
    rhs = _integral_power(g, tm, q)
    if rhs == 0:
        raise DomainError("g vanishes mu-almost everywhere")
    K = marcinkiewicz_constant(p)
    if not tc.finite:
        return MaximalReport(np.inf, rhs, np.inf, tc.constant, np.inf, False, "tree condition fails")
    mg = maximal(g, tm).values
    lhs = float(np.sum(mg**q * sigma(tm, rho, p).values))
    ratio = lhs / rhs
    bound = K * tc.constant
    return MaximalReport(lhs, rhs, ratio, tc.constant, bound, ratio <= bound * (1.0 + 1e-12))
