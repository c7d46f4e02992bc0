"""Weights on the disc, their tree discretizations, and a (reg) checker."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import quadrature
from .errors import UnsupportedOperation, ValidationError
from .tree import Tree

POWER = "power"
CUSTOM = "custom"


@dataclass(frozen=True)
class WeightSpec:
    """Power weight ``(1 - |z|^2)^a`` with ``0 <= a < 1``, or a custom positive callable."""

    kind: str = POWER
    a: float = 0.0
    func: Callable | None = None
    p: float = 2.0

    def __post_init__(self):
        if self.kind == POWER:
            if not 0.0 <= self.a < 1.0:
                raise ValidationError(f"power weight exponent must lie in [0, 1), got {self.a}")
        elif self.kind == CUSTOM:
            if self.func is None:
                raise ValidationError("custom weight needs a callable")
        else:
            raise ValidationError(f"unknown weight kind {self.kind!r}")
        if not self.p > 1.0:
            raise ValidationError("p must exceed 1")

    @classmethod
    def power(cls, a: float, p: float = 2.0) -> "WeightSpec":
        return cls(POWER, float(a), None, p)

    @classmethod
    def custom(cls, func: Callable, p: float = 2.0) -> "WeightSpec":
        return cls(CUSTOM, 0.0, func, p)

    @classmethod
    def parse(cls, text: str, p: float = 2.0) -> "WeightSpec":
        """``power:<a>``, the CLI form."""
        kind, _, arg = text.partition(":")
        if kind != POWER or not arg:
            raise ValidationError(f"weight must look like power:<a>, got {text!r}")
        try:
            a = float(arg)
        except ValueError:
            raise ValidationError(f"bad weight exponent {arg!r}") from None
        return cls.power(a, p)

    def __call__(self, z) -> np.ndarray:
        z = np.asarray(z)
        if self.kind == POWER:
            return (1.0 - np.abs(z) ** 2) ** self.a
        return np.asarray(self.func(z), dtype=float)

    def polar(self, r, theta) -> np.ndarray:
        if self.kind == POWER:
            return np.broadcast_to((1.0 - r * r) ** self.a, np.broadcast_shapes(np.shape(r), np.shape(theta)))
        return self(r * np.exp(1j * theta))


@dataclass(frozen=True)
class TreeWeight:
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.ndim != 1 or not np.all(np.isfinite(v)) or np.any(v <= 0):
            raise ValidationError("tree weight entries must be finite and > 0")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __len__(self) -> int:
        return self.values.size

    def power(self, e: float) -> "TreeWeight":
        return TreeWeight(self.values**e)


def as_weight_values(rho, tree: Tree) -> np.ndarray:
    v = rho.values if isinstance(rho, TreeWeight) else np.asarray(rho, dtype=float)
    if np.ndim(v) == 0:
        v = np.full(tree.size, float(v))
    if v.shape != (tree.size,):
        raise ValidationError(f"weight needs shape ({tree.size},), got {v.shape}")
    return v


def tree_weight(spec: WeightSpec, tree: Tree, mode: str = "center", order: int = 8) -> TreeWeight:
    """Per-node weight: value at the box centre, or box average over normalized area."""
    if not tree.is_dyadic:
        raise UnsupportedOperation("abstract trees take explicit TreeWeight values")
    n = tree.depth.astype(float)
    idx = np.arange(tree.size)
    pos = idx - (2 ** tree.depth - 1)
    step = 2.0 * np.pi / 2.0**n
    if mode == "center":
        r = 1.0 - 0.75 * 2.0**-n
        theta = (pos + 0.5) * step
        vals = spec.polar(r, theta)
    elif mode == "average":
        integral = quadrature.refined_box_integrals(tree, spec.polar, order)
        area = ((1.0 - 2.0 ** (-n - 1)) ** 2 - (1.0 - 2.0**-n) ** 2) * step / (2.0 * np.pi)
        vals = integral / area
    else:
        raise ValueError(f"mode must be 'center' or 'average', got {mode!r}")
    vals = np.asarray(vals, dtype=float)
    if not np.all(np.isfinite(vals)) or np.any(vals <= 0):
        raise ValidationError("weight has non-positive or non-finite values on some box")
    return TreeWeight(vals)


@dataclass(frozen=True)
class RegReport:
    max_ratio: float
    passed: bool
    samples: int
    c: float


def reg_check(
    spec: WeightSpec, c: float, samples: int, seed: int = 0, ceiling: float = 1e6
) -> RegReport:
    """Largest ``rho(z)/rho(w)`` over random pairs at pseudo-hyperbolic distance <= c.

    ``w`` is the Moebius image ``(z + u)/(1 + conj(z) u)`` of a random ``|u| <= c``,
    so ``|z - w| / |1 - conj(z) w| = |u|`` exactly.  ``passed`` means the ratio came
    out finite and below ``ceiling``.
    """
    if not 0.0 < c < 1.0:
        raise ValidationError("c must lie in (0, 1)")
    if samples < 1:
        raise ValidationError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    t = rng.uniform(0.0, 1.0, samples)
    z = (1.0 - t) * np.exp(2j * np.pi * rng.uniform(0.0, 1.0, samples))
    u = c * np.sqrt(rng.uniform(0.0, 1.0, samples)) * np.exp(2j * np.pi * rng.uniform(0.0, 1.0, samples))
    w = (z + u) / (1.0 + np.conj(z) * u)
    w = np.where(np.abs(w) < 1.0, w, w * np.nextafter(1.0, 0.0) / np.maximum(np.abs(w), 1.0))
    with np.errstate(all="ignore"):
        rz, rw = spec(z), spec(w)
        ratio = np.maximum(rz / rw, rw / rz)
    ratio = np.where(np.isfinite(ratio), ratio, np.inf)
    mr = float(ratio.max())
    return RegReport(mr, bool(np.isfinite(mr) and mr <= ceiling), samples, c)
