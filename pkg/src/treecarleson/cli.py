"""Batch command-line front end.

Exit status: 0 on success, 2 on invalid input (bad flags, unreadable files),
3 when a check finds a violation.  Output is CSV; ``elapsed_ms`` is written as 0
unless ``--timing`` is given, so identical jobs produce identical files.
"""

from __future__ import annotations

import argparse
import cmath
import csv
import io
import logging
import math
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import analytic, carleson
from .analytic import builtin_suite, parse_function
from .errors import TreeCarlesonError
from .measure import pull_back, parse_measure_spec
from .operators import TreeFunction, subtree_indicator, tree_besov_norm
from .tree import build_dyadic_tree
from .weight import WeightSpec, tree_weight

logger = logging.getLogger(__name__)

COMMANDS = (
    "tc-check",
    "embed-norm",
    "dual-test",
    "weak-type",
    "maximal-check",
    "variation",
    "norms",
    "kernel-check",
    "sweep-depth",
)
NEEDS_MEASURE = {"tc-check", "embed-norm", "dual-test", "weak-type", "maximal-check", "sweep-depth"}
NEEDS_FUNCTION = {"variation", "norms"}

# Infimum of Re(|w|(1-|z|^2)/(1 - z conj(w))) over z in a box and w in its closed
# successor region with |w| >= 1/2: dense sampling over depths 0..39 decreases
# to 2/(1 + 16 pi^2) = 0.012585..., approached from above as the depth grows.
KERNEL_C0 = 0.0125

DEFAULT_DEPTH = 10
DEFAULT_SEED = 20240611


class UsageError(Exception):
    pass


@dataclass
class JobConfig:
    command: str
    depth: int | None = None
    min_depth: int = 0
    p: float = 2.0
    weight: WeightSpec | None = None
    measure: Path | None = None
    function: str | None = None
    seed: int = DEFAULT_SEED
    output: Path | None = None
    trials: int = 1000
    lam: float | None = None
    timing: bool = False

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if not self.p > 1:
            raise UsageError("--p must exceed 1")
        if self.command in NEEDS_MEASURE and self.measure is None:
            raise UsageError(f"{self.command} needs --measure")
        if self.command in NEEDS_FUNCTION and self.function is None:
            raise UsageError(f"{self.command} needs --function")
        if self.trials < 0:
            raise UsageError("--trials must be >= 0")
        if self.lam is not None and not self.lam > 0:
            raise UsageError("--lambda must be > 0")
        if not 0 <= self.seed < 2**64:
            raise UsageError("--seed must be an unsigned 64-bit integer")
        if self.weight is None:
            self.weight = WeightSpec.power(0.0, self.p)


def format_value(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def emit_csv(rows, path, header) -> None:
    """Write ``header`` and ``rows``: LF line endings, 17 significant digits."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        if len(row) != len(header):
            raise ValueError("rows must match the header width")
        writer.writerow([format_value(x) for x in row])
    text = buf.getvalue()
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


class _Clock:
    def __init__(self, enabled: bool):
        self.enabled = enabled
        self.t0 = time.perf_counter()

    def ms(self) -> float:
        return (time.perf_counter() - self.t0) * 1e3 if self.enabled else 0.0


def _load_measure(cfg: JobConfig):
    try:
        text = Path(cfg.measure).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read measure file {cfg.measure}: {exc}") from None
    return parse_measure_spec(text)


def _depth(cfg: JobConfig, spec=None) -> int:
    if cfg.depth is not None:
        return cfg.depth
    if spec is not None and spec.depth is not None:
        return spec.depth
    return DEFAULT_DEPTH


def _random_g(rng, tree, zero_frac: float = 0.3) -> TreeFunction:
    v = rng.uniform(0.0, 1.0, tree.size) * (rng.uniform(size=tree.size) > zero_frac)
    b = rng.uniform(0.0, 1.0, tree.leaves.size) * (rng.uniform(size=tree.leaves.size) > zero_frac)
    return TreeFunction(tree, v, b)


def run(cfg: JobConfig) -> int:
    cfg.validate()
    clock = _Clock(cfg.timing)
    handler = _HANDLERS[cfg.command]
    header, rows, status = handler(cfg, clock)
    emit_csv(rows, cfg.output, header)
    return status


def _base(cfg, depth):
    return [depth, cfg.p, cfg.weight.a]


def _tc_row(cfg, spec, depth, clock):
    tree = build_dyadic_tree(depth)
    tm = pull_back(spec, tree)
    rho = tree_weight(cfg.weight, tree)
    rep = carleson.tc_constant(tm, rho, cfg.p)
    n, m = tree.nm(rep.argmax_node)
    return ["(TC)", *_base(cfg, depth), rep.constant, n, m, rep.finite, tm.total, clock.ms()]


_TC_HEADER = ["condition", "depth", "p", "weight_a", "constant", "argmax_n", "argmax_m", "finite", "total_mass", "elapsed_ms"]


def _cmd_tc(cfg, clock):
    spec = _load_measure(cfg)
    row = _tc_row(cfg, spec, _depth(cfg, spec), clock)
    return _TC_HEADER, [row], 0


def _cmd_sweep(cfg, clock):
    spec = _load_measure(cfg)
    top = _depth(cfg, spec)
    if cfg.min_depth > top:
        raise UsageError("--min-depth exceeds --depth")
    rows = [_tc_row(cfg, spec, d, clock) for d in range(cfg.min_depth, top + 1)]
    return _TC_HEADER, rows, 0


def _setup(cfg):
    spec = _load_measure(cfg)
    depth = _depth(cfg, spec)
    tree = build_dyadic_tree(depth)
    tm = pull_back(spec, tree)
    rho = tree_weight(cfg.weight, tree)
    return depth, tree, tm, rho


def _cmd_embed(cfg, clock):
    depth, tree, tm, rho = _setup(cfg)
    tc = carleson.tc_constant(tm, rho, cfg.p)
    if cfg.p == 2.0:
        rep = carleson.embedding_norm_quadratic(tm, rho)
    else:
        rep = carleson.embedding_norm_general(tm, rho, cfg.p, seed=cfg.seed)
    q = carleson.conjugate(cfg.p)
    K = carleson.marcinkiewicz_constant(cfg.p)
    ratio = rep.norm_estimate**q / tc.constant if tc.constant > 0 else 0.0
    status = 3 if ratio > K or (cfg.p == 2.0 and tc.constant > 0 and ratio < 1 - 1e-9) else 0
    header = ["condition", "depth", "p", "weight_a", "norm", "certified_lower", "method", "iterations",
              "converged", "tc_constant", "ratio", "K_p", "elapsed_ms"]
    row = ["(TreeCar)", *_base(cfg, depth), rep.norm_estimate, rep.certified_lower, rep.method,
           rep.iterations, rep.converged, tc.constant, ratio, K, clock.ms()]
    return header, [row], status


def _cmd_dual(cfg, clock):
    depth, tree, tm, rho = _setup(cfg)
    tc = carleson.tc_constant(tm, rho, cfg.p)
    rows = []
    bad = 0
    for a in np.flatnonzero(tm.subtree_mass > 0):
        a = int(a)
        dr = carleson.dual_ratio(subtree_indicator(tree, a), tm, rho, cfg.p)
        tr = float(tc.per_node_ratio[a])
        ok = dr >= tr * (1 - 1e-12)
        bad += not ok
        n, m = tree.nm(a)
        rows.append(["(TreeCar)-dual", *_base(cfg, depth), n, m, tr, dr, ok, clock.ms()])
    header = ["condition", "depth", "p", "weight_a", "node_n", "node_m", "tc_ratio", "dual_ratio", "ok", "elapsed_ms"]
    return header, rows, 3 if bad else 0


def _cmd_weak(cfg, clock):
    depth, tree, tm, rho = _setup(cfg)
    tc = carleson.tc_constant(tm, rho, cfg.p)
    rng = np.random.default_rng(cfg.seed)
    violations, worst = 0, 0.0
    for _ in range(cfg.trials):
        g = _random_g(rng, tree)
        lam = cfg.lam if cfg.lam is not None else max(g.max(), 1e-300) * math.exp(rng.uniform(math.log(1e-3), 0.0))
        rep = carleson.weak_type_check(g, tm, rho, cfg.p, lam, tc)
        violations += not rep.passed
        if rep.rhs > 0:
            worst = max(worst, rep.lhs / rep.rhs)
    header = ["condition", "depth", "p", "weight_a", "trials", "violations", "max_ratio", "constant", "elapsed_ms"]
    row = ["(TC)->weak(1,1)", *_base(cfg, depth), cfg.trials, violations, worst, tc.constant, clock.ms()]
    return header, [row], 3 if violations else 0


def _cmd_maximal(cfg, clock):
    depth, tree, tm, rho = _setup(cfg)
    tc = carleson.tc_constant(tm, rho, cfg.p)
    rng = np.random.default_rng(cfg.seed)
    gs = [subtree_indicator(tree, int(a)) for a in np.flatnonzero(tm.subtree_mass > 0)]
    gs += [_random_g(rng, tree) for _ in range(cfg.trials)]
    violations, worst, count = 0, 0.0, 0
    for g in gs:
        try:
            rep = carleson.maximal_strong_check(g, tm, rho, cfg.p, tc)
        except TreeCarlesonError:
            continue
        count += 1
        violations += not rep.passed
        worst = max(worst, rep.ratio)
    K = carleson.marcinkiewicz_constant(cfg.p)
    header = ["condition", "depth", "p", "weight_a", "trials", "violations", "max_ratio", "constant", "K_p",
              "max_ratio_over_constant", "elapsed_ms"]
    rel = worst / tc.constant if tc.constant > 0 else 0.0
    row = ["(TC)->maximal", *_base(cfg, depth), count, violations, worst, tc.constant, K, rel, clock.ms()]
    return header, [row], 3 if violations else 0


def _cmd_variation(cfg, clock):
    f = parse_function(cfg.function)
    depth = _depth(cfg)
    tree = build_dyadic_tree(depth)
    rays = cfg.trials if cfg.trials > 0 else 64
    rep = analytic.variation_ratios(f, tree, rays=rays)
    rows = [
        ["(VarCar)", *_base(cfg, depth), f.label, t, v, ph, r, rep.constant, clock.ms()]
        for t, v, ph, r in zip(rep.thetas, rep.variation, rep.phi_leaf, rep.ratios)
    ]
    header = ["condition", "depth", "p", "weight_a", "function", "theta", "variation", "phi_leaf", "ratio",
              "constant", "elapsed_ms"]
    return header, rows, 3 if not math.isfinite(rep.constant) else 0


def _cmd_norms(cfg, clock):
    fs = builtin_suite() if cfg.function == "suite" else [parse_function(cfg.function)]
    depth = _depth(cfg)
    tree = build_dyadic_tree(depth)
    w = WeightSpec.power(cfg.weight.a, cfg.p)
    rho = tree_weight(w, tree)
    rows = []
    for f in fs:
        bn = analytic.besov_norm_continuum(f, w, cfg.p, tree)
        tn = tree_besov_norm(analytic.phi_majorant(f, tree).phi, rho, cfg.p)
        ratio = tn / bn.norm if bn.norm > 0 else float("nan")
        rows.append(["(Car)-proxy", *_base(cfg, depth), f.label, bn.norm, bn.box_part, bn.residual, tn, ratio, clock.ms()])
    header = ["condition", "depth", "p", "weight_a", "function", "besov_norm", "box_part", "residual",
              "tree_norm", "ratio", "elapsed_ms"]
    return header, rows, 0


def sample_local_pairs(rng, count: int, max_depth: int = 30):
    """Random ``z`` in a box of random depth and ``w`` in the closed successor
    region of that box with ``|w| >= 1/2``."""
    n = rng.integers(0, max_depth + 1, count)
    k = np.floor(rng.uniform(size=count) * 2.0**n)
    step = 2 * np.pi / 2.0**n
    r_lo, r_hi = 1 - 2.0**-n, 1 - 2.0 ** (-n - 1)
    zr = r_lo + (r_hi - r_lo) * rng.uniform(size=count)
    z = zr * np.exp(1j * (k + rng.uniform(size=count)) * step)
    wlo = np.maximum(0.5, r_lo)
    wr = wlo + (1 - wlo) * rng.uniform(size=count)
    w = wr * np.exp(1j * (k + rng.uniform(size=count)) * step)
    return z, w


def sample_disc_pairs(rng, count: int):
    z = np.sqrt(rng.uniform(size=count)) * np.exp(2j * np.pi * rng.uniform(size=count))
    z = np.where(np.abs(z) < 1, z, 0)
    w = np.sqrt(rng.uniform(size=count)) * np.exp(2j * np.pi * rng.uniform(size=count))
    return z, w


def _cmd_kernel(cfg, clock):
    rng = np.random.default_rng(cfg.seed)
    trials = cfg.trials if cfg.trials > 0 else 100
    worst = 0.0
    for _ in range(trials):
        deg = int(rng.integers(0, 17))
        f = analytic.AnalyticFunction(rng.normal(size=deg + 1) + 1j * rng.normal(size=deg + 1))
        z = 0.9 * math.sqrt(rng.uniform()) * cmath.exp(2j * math.pi * rng.uniform())
        worst = max(worst, analytic.reproducing_check(f, z))
    z, w = sample_disc_pairs(rng, 100000)
    pos = float(np.min(analytic.kernel_positivity(z, w)))
    zl, wl = sample_local_pairs(rng, 100000)
    loc = float(np.min(analytic.kernel_positivity(zl, wl)))
    ok = worst <= 1e-8 and pos >= -1e-12 and loc >= KERNEL_C0
    header = ["condition", "depth", "p", "weight_a", "trials", "max_reproducing_residual", "min_positivity",
              "min_positivity_local", "c0", "passed", "elapsed_ms"]
    row = ["(Car)-proxy", *_base(cfg, _depth(cfg)), trials, worst, pos, loc, KERNEL_C0, ok, clock.ms()]
    return header, [row], 0 if ok else 3


_HANDLERS = {
    "tc-check": _cmd_tc,
    "embed-norm": _cmd_embed,
    "dual-test": _cmd_dual,
    "weak-type": _cmd_weak,
    "maximal-check": _cmd_maximal,
    "variation": _cmd_variation,
    "norms": _cmd_norms,
    "kernel-check": _cmd_kernel,
    "sweep-depth": _cmd_sweep,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="treecarleson", description=__doc__.splitlines()[0])
    ap.add_argument("--command", required=True, choices=COMMANDS)
    ap.add_argument("--depth", type=int, default=None)
    ap.add_argument("--min-depth", type=int, default=0, help="first depth for sweep-depth")
    ap.add_argument("--p", type=float, default=2.0)
    ap.add_argument("--weight", default="power:0")
    ap.add_argument("--measure", type=Path, default=None)
    ap.add_argument("--function", default=None, help="poly:<c0,c1,...>, logkernel:<N>, lacunary:<K> or suite")
    ap.add_argument("--seed", type=int, default=DEFAULT_SEED)
    ap.add_argument("--out", type=Path, default=None)
    ap.add_argument("--trials", type=int, default=1000)
    ap.add_argument("--lambda", dest="lam", type=float, default=None)
    ap.add_argument("--timing", action="store_true", help="record wall time in elapsed_ms")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = JobConfig(
            command=args.command,
            depth=args.depth,
            min_depth=args.min_depth,
            p=args.p,
            weight=WeightSpec.parse(args.weight, args.p),
            measure=args.measure,
            function=args.function,
            seed=args.seed,
            output=args.out,
            trials=args.trials,
            lam=args.lam,
            timing=args.timing,
        )
        return run(cfg)
    except (UsageError, TreeCarlesonError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
