"""Analytic functions as truncated Taylor series and the continuum side of the
theory: weighted Besov norms, the tree majorant, radial variation, and the
Dirichlet-space duality toolkit.

Note on the Hardy space: the duality argument behind the Carleson
characterization has no analogue for ``H^2`` (there are ``H^2`` functions with
infinite radial variation almost everywhere), so nothing here applies to it.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P
from scipy import integrate

from . import quadrature
from .errors import DomainError, UnsupportedOperation, ValidationError
from .measure import TreeMeasure
from .operators import TreeFunction, hardy
from .tree import TWO_PI, Tree, locate_angle
from .weight import WeightSpec


@dataclass(frozen=True, eq=False)
class AnalyticFunction:
    coefficients: np.ndarray
    label: str = ""

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coefficients, dtype=complex))
        if c.ndim != 1 or c.size == 0:
            raise ValidationError("need a non-empty 1-d coefficient list")
        object.__setattr__(self, "coefficients", c)

    @property
    def degree(self) -> int:
        return self.coefficients.size - 1

    def __call__(self, z):
        return evaluate(self, z)

    def __repr__(self) -> str:
        return f"AnalyticFunction({self.label or self.coefficients!r})"


def evaluate(f: AnalyticFunction, z):
    """Horner evaluation; ``z`` scalar or array inside the open disc."""
    za = np.asarray(z)
    if np.any(np.abs(za) >= 1.0):
        raise DomainError("evaluation point outside the open unit disc")
    out = P.polyval(za, f.coefficients)
    return complex(out) if np.ndim(out) == 0 else out


def derivative(f: AnalyticFunction) -> AnalyticFunction:
    c = f.coefficients
    if c.size == 1:
        return AnalyticFunction([0.0], f"({f.label})'")
    return AnalyticFunction(c[1:] * np.arange(1, c.size), f"({f.label})'")


def _abs_derivative_polar(f: AnalyticFunction):
    dc = derivative(f).coefficients

    def g(r, theta):
        return np.abs(P.polyval(r * np.exp(1j * theta), dc))

    return g


# -- built-in families -------------------------------------------------------


def polynomial(coeffs, label: str | None = None) -> AnalyticFunction:
    c = list(coeffs)
    return AnalyticFunction(c, label or "poly:" + ",".join(_fmt(x) for x in c))


def logkernel(n_terms: int) -> AnalyticFunction:
    """``sum_{1 <= n <= N} z^n / n``, the truncation of ``log 1/(1 - z)``."""
    c = np.zeros(n_terms + 1)
    c[1:] = 1.0 / np.arange(1, n_terms + 1)
    return AnalyticFunction(c, f"logkernel:{n_terms}")


def lacunary(k_max: int) -> AnalyticFunction:
    """``sum_{0 <= k <= K} 2^{-k/2} z^{2^k}``."""
    c = np.zeros(2**k_max + 1)
    for k in range(k_max + 1):
        c[2**k] = 2.0 ** (-k / 2.0)
    return AnalyticFunction(c, f"lacunary:{k_max}")


def _fmt(x) -> str:
    x = complex(x)
    if x.imag == 0:
        return repr(x.real)
    return repr(x).strip("()")


def parse_function(name: str) -> AnalyticFunction:
    """``poly:<c0,c1,...>``, ``logkernel:<N>`` or ``lacunary:<K>``."""
    kind, _, arg = name.partition(":")
    try:
        if kind == "poly":
            return polynomial([complex(s.replace(" ", "")) for s in arg.split(",")], name)
        if kind == "logkernel":
            return logkernel(int(arg))
        if kind == "lacunary":
            return lacunary(int(arg))
    except ValueError:
        pass
    raise ValidationError(f"unknown function {name!r}")


BUILTIN_SUITE = (
    "poly:1",
    "poly:0,1",
    "poly:0,0,1",
    "poly:1,0.5,0,0,0.25",
    "poly:0,0,0,0,0,0,0,0,1",
    "logkernel:16",
    "lacunary:4",
)


def builtin_suite() -> list[AnalyticFunction]:
    return [parse_function(s) for s in BUILTIN_SUITE]


# -- norms --------------------------------------------------------------------


@dataclass(frozen=True)
class BesovNorm:
    norm: float
    box_part: float  # integral over the boxes of the tree (p-th power scale)
    residual: float  # integral over 1 - |z| < 2^{-D-1}
    f0: float


def besov_norm_continuum(
    f: AnalyticFunction, w: WeightSpec, p: float, tree: Tree, order: int = 8
) -> BesovNorm:
    """``(int |(1-|z|^2) f'|^p rho dA/(1-|z|^2)^2)^{1/p} + |f(0)|`` by box quadrature."""
    if not p > 1:
        raise ValidationError("p must exceed 1")
    if not tree.is_dyadic:
        raise UnsupportedOperation("continuum norms need a dyadic tree")
    df = _abs_derivative_polar(f)

    def integrand(r, theta):
        return df(r, theta) ** p * (1.0 - r * r) ** (p - 2.0) * w.polar(r, theta)

    box = float(np.sum(quadrature.box_integrals(tree, integrand, order)))
    n_sec = 2 ** min(tree.depth_limit, 10)
    resid = float(np.sum(quadrature.residual_sector_integrals(integrand, tree.depth_limit, n_sec, order)))
    f0 = abs(complex(f.coefficients[0]))
    return BesovNorm((box + resid) ** (1.0 / p) + f0, box, resid, f0)


@dataclass(frozen=True, eq=False)
class TreeMajorant:
    increments: TreeFunction  # Delta phi
    phi: TreeFunction  # I(Delta phi), leaf boundary values filled


def phi_majorant(f: AnalyticFunction, tree: Tree, grid: int = 8) -> TreeMajorant:
    """``Delta phi(a) = (1 - |z(a)|) |f'(z(a))|`` with ``z(a)`` the maximizer of
    ``|f'|`` over a ``grid x grid`` polar sample of the closed box (corners
    included, radius ascending, ties to the innermost sample);
    ``Delta phi(o) = |f(0)|``."""
    if not tree.is_dyadic:
        raise UnsupportedOperation("phi_majorant needs a dyadic tree")
    if grid < 2:
        raise ValidationError("grid must be >= 2")
    df = _abs_derivative_polar(f)
    inc = np.zeros(tree.size)
    s = np.linspace(0.0, 1.0, grid)
    for n in range(1, tree.depth_limit + 1):
        r_lo, r_hi = 1.0 - 2.0**-n, 1.0 - 2.0 ** (-n - 1)
        r = r_lo + (r_hi - r_lo) * s
        step = TWO_PI / 2**n
        for start in range(0, 2**n, 4096):
            k = np.arange(start, min(start + 4096, 2**n))
            th = (k[:, None] + s[None, :]) * step  # (boxes, grid)
            vals = df(r[None, :, None], th[:, None, :])  # (boxes, r, theta)
            flat = vals.reshape(k.size, -1)
            j = np.argmax(flat, axis=1)
            ri = j // grid
            inc[2**n - 1 + k] = (1.0 - r[ri]) * flat[np.arange(k.size), j]
    inc[0] = abs(complex(f.coefficients[0]))
    incf = TreeFunction(tree, inc)
    return TreeMajorant(incf, hardy(incf, boundary=True))


def radial_variation(f: AnalyticFunction, R: float, theta: float, tol: float = 1e-9) -> float:
    """``int_0^R |f'(r e^{i theta})| dr`` by adaptive quadrature."""
    if not 0.0 <= R < 1.0:
        raise DomainError("R must lie in [0, 1)")
    dc = derivative(f).coefficients
    if not np.any(dc):
        return 0.0
    e = cmath.exp(1j * theta)
    val, _ = integrate.quad(
        lambda r: abs(P.polyval(r * e, dc)), 0.0, R, epsabs=tol, epsrel=0.0, limit=500
    )
    return float(val)


@dataclass(frozen=True, eq=False)
class VariationReport:
    thetas: np.ndarray
    variation: np.ndarray
    phi_leaf: np.ndarray
    ratios: np.ndarray
    constant: float


def variation_ratios(
    f: AnalyticFunction, tree: Tree, rays: int = 64, grid: int = 8, majorant: TreeMajorant | None = None
) -> VariationReport:
    """``V(f)(R e^{i theta}) / phi(leaf)`` on ``rays`` equally spaced rays with
    ``R = 1 - 2^{-D-1}``, ``leaf`` the depth-``D`` node whose arc holds ``theta``.

    The constant is the largest ratio (0/0 counts as 0, x/0 as infinity).
    """
    maj = majorant or phi_majorant(f, tree, grid)
    R = 1.0 - 2.0 ** (-tree.depth_limit - 1)
    thetas = TWO_PI * (np.arange(rays) + 0.5) / rays
    V = np.array([radial_variation(f, R, t) for t in thetas])
    leaf_phi = np.array([maj.phi.values[locate_angle(tree, t)] for t in thetas])
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(V == 0, 0.0, V / leaf_phi)
    return VariationReport(thetas, V, leaf_phi, ratios, float(np.max(ratios)))


# -- Dirichlet space ------------------------------------------------------------


def dirichlet_inner(f: AnalyticFunction, g: AnalyticFunction) -> complex:
    """``f(0) conj(g(0)) + sum_{n >= 1} n a_n conj(b_n)``."""
    a, b = f.coefficients, g.coefficients
    k = min(a.size, b.size)
    n = np.arange(k)
    n[0] = 1
    return complex(np.sum(n * a[:k] * np.conj(b[:k])))


def reproducing_kernel(z: complex, w):
    """``phi_z(w) = 1 + log 1/(1 - w conj(z))``, principal branch."""
    w = np.asarray(w)
    if abs(z) >= 1 or np.any(np.abs(w) >= 1):
        raise DomainError("kernel needs |z|, |w| < 1")
    out = 1.0 - np.log(1.0 - w * np.conj(z))
    return complex(out) if np.ndim(out) == 0 else out


def kernel_function(z: complex, n_terms: int) -> AnalyticFunction:
    """Taylor coefficients of ``phi_z``: ``1`` then ``conj(z)^n / n``."""
    c = np.empty(n_terms + 1, dtype=complex)
    c[0] = 1.0
    n = np.arange(1, n_terms + 1)
    c[1:] = np.conj(z) ** n / n
    return AnalyticFunction(c, f"kernel@{z}")


def reproducing_check(f: AnalyticFunction, z: complex) -> float:
    """``|f(z) - <f, phi_z>_D|`` with the pairing taken in coefficient form."""
    return abs(evaluate(f, z) - dirichlet_inner(f, kernel_function(z, f.degree)))


def theta(h, tm: TreeMeasure, z: complex) -> complex:
    """``Theta g(z) = int phi_z-type kernel * g dmu`` for ``g(w) = (|w|/conj(w)) h(w)``.

    ``h`` is constant on boxes (one value per node); the measure is replaced by
    its representative atoms.  ``g(0)`` is taken as 0.
    """
    if abs(z) >= 1:
        raise DomainError("Theta is evaluated inside the open disc")
    hv = np.asarray(h, dtype=float)
    total = 0j
    for atom in tm.representative_atoms():
        w = atom.point
        if w == 0 or atom.mass == 0:
            continue
        kern = 1.0 - cmath.log(1.0 - z * w.conjugate())
        total += kern * (abs(w) / w.conjugate()) * hv[atom.node] * atom.mass
    return total


def kernel_positivity(z, w):
    """``Re(|w| (1 - |z|^2) / (1 - z conj(w)))``."""
    z = np.asarray(z)
    w = np.asarray(w)
    out = np.real(np.abs(w) * (1.0 - np.abs(z) ** 2) / (1.0 - z * np.conj(w)))
    return float(out) if np.ndim(out) == 0 else out
