"""The uniform infimum r_S(f) = sup_{delta>0} inf_{B_delta(S)} f, its
penalty-limit characterization, robustness reports, and the exact
little-l2 counterexample where r and the plain infimum disagree on
arbitrarily small balls.

Mesh-backed models evaluate r over the delta ladder by brute force on
nodes.  Finite-exception models evaluate everything in exact rational
arithmetic: exception points are compared by exact coordinates, never
snapped to a mesh.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from .extreal import INF, ExtReal
from .functions import (FunctionModel, MeshSpec, SparsePoint, Variant,
                        restrict, sparse_norm_sq, values_on)
from .geometry import NormKind
from .regions import Ball, Region, WholeSpace
from .verdict import LimitConfig, Status, Verdict


@dataclass(frozen=True)
class PenaltySpec:
    """Penalty exponent and multiplier schedule for f + n * d_S^p."""

    p: float = 1.0
    n_schedule: Tuple[float, ...] = tuple(2.0 ** k for k in range(9))

    def __post_init__(self):
        if self.p <= 0:
            raise ValueError("exponent p must be positive")
        if list(self.n_schedule) != sorted(set(self.n_schedule)) or min(self.n_schedule) <= 0:
            raise ValueError("n_schedule must be increasing positive")


@dataclass
class RobustnessReport:
    r_value: ExtReal
    plain_inf: ExtReal
    robust: bool
    gap: ExtReal


def _region_distances(S: Region, mesh: MeshSpec) -> np.ndarray:
    """d_S at every mesh node; exact when the region has a closed form,
    otherwise the distance to the nodes the region contains."""
    nodes = mesh.nodes()
    if isinstance(S, Ball):
        d = S.norm.pairwise(np.asarray([S.center], dtype=float), nodes)[0]
        return np.maximum(0.0, d - S.radius)
    exact = S.distance(tuple(nodes[0]))
    if exact is not None:
        return np.array([S.distance(tuple(p)) for p in nodes])
    member = np.array([S.contains(tuple(p)) for p in nodes])
    if not member.any():
        raise ValueError("region contains no mesh node")
    from .geometry import EUCLIDEAN
    return EUCLIDEAN.pairwise(nodes, nodes[member]).min(axis=1)


def _exact_ball(S: Region) -> Tuple[Dict[int, Fraction], Fraction]:
    """(sparse center, radius) of a ball region with rational data."""
    if not isinstance(S, Ball):
        raise ValueError("exact evaluation supports ball regions only")
    if S.norm.kind is not NormKind.EUCLIDEAN:
        raise ValueError("exact ball evaluation requires the Euclidean norm")
    center = {i: Fraction(c) for i, c in enumerate(S.center) if c != 0}
    return center, Fraction(S.radius)


def _exact_within(pt: SparsePoint, center: Dict[int, Fraction],
                  reach: Fraction) -> bool:
    """||pt - center|| <= reach, decided on squared rationals."""
    if reach < 0:
        return False
    diff = dict(center)
    for i, v in pt:
        diff[i] = v - diff.get(i, Fraction(0))
    nsq = sum((v * v for v in diff.values()), Fraction(0))
    return nsq <= reach * reach


def _exact_uniform_infimum(f: FunctionModel, S: Region, cfg: LimitConfig) -> ExtReal:
    center, radius = _exact_ball(S)
    best: Optional[ExtReal] = None
    prev: Optional[ExtReal] = None
    for delta in cfg.delta_ladder:
        reach = radius + Fraction(delta)
        # the default value is attained inside every ball neighborhood
        inf_d: ExtReal = f.default
        for pt, v in f.exceptions.items():
            if v < inf_d and _exact_within(pt, center, reach):
                inf_d = v
        if prev is not None and inf_d < prev:
            raise AssertionError("uniform infimum not monotone along the delta ladder")
        prev = inf_d
        best = inf_d if best is None else max(best, inf_d)
    return best


def uniform_infimum(f: FunctionModel, S: Region, mesh: Optional[MeshSpec],
                    cfg: LimitConfig) -> ExtReal:
    """r_S(f): max over the delta ladder of the infimum of f on B_delta(S).

    Monotone nondecreasing as delta decreases (asserted); the max over the
    decreasing ladder therefore equals the value at the smallest rung.
    """
    if f.variant is Variant.FINITE_EXCEPTION:
        return _exact_uniform_infimum(f, S, cfg)
    if mesh is None:
        raise ValueError("mesh required for non-exact models")
    dS = _region_distances(S, mesh)
    vals = values_on(f, mesh)
    if not (dS <= max(cfg.delta_ladder)).any():
        raise ValueError("no mesh node within the largest delta of the region")
    best = -math.inf
    prev = None
    for delta in cfg.delta_ladder:
        mask = dS <= delta
        inf_d = float(vals[mask].min()) if mask.any() else INF
        if prev is not None and inf_d < prev - 1e-12:
            raise AssertionError("uniform infimum not monotone along the delta ladder")
        prev = inf_d
        best = max(best, inf_d)
    return best


def plain_infimum(f: FunctionModel, S: Region, mesh: Optional[MeshSpec]) -> ExtReal:
    """inf_S f, exact on finite-exception models."""
    if f.variant is Variant.FINITE_EXCEPTION:
        center, radius = _exact_ball(S)
        inf_s: ExtReal = f.default  # the default is attained on the ball
        for pt, v in f.exceptions.items():
            if v < inf_s and _exact_within(pt, center, radius):
                inf_s = v
        return inf_s
    from .functions import inf_over_region
    return inf_over_region(f, S, mesh)


def penalty_value(f: FunctionModel, S: Region, n: float, spec: PenaltySpec,
                  mesh: Optional[MeshSpec]) -> ExtReal:
    """inf over the sample space of f(x) + n * d_S(x)^p."""
    if f.variant is Variant.FINITE_EXCEPTION:
        center, radius = _exact_ball(S)
        best = float(f.default)  # center of the ball: d_S = 0, default value
        for pt, v in f.exceptions.items():
            diff = dict(center)
            for i, c in pt:
                diff[i] = c - diff.get(i, Fraction(0))
            nsq = sum((c * c for c in diff.values()), Fraction(0))
            d = max(0.0, math.sqrt(float(nsq)) - float(radius))
            cand = float(v) + n * d ** spec.p
            best = min(best, cand)
        return best
    dS = _region_distances(S, mesh)
    vals = values_on(f, mesh)
    finite = np.isfinite(vals)
    if not finite.any():
        return INF
    return float((vals[finite] + n * dS[finite] ** spec.p).min())


def penalty_limit(f: FunctionModel, S: Region, spec: PenaltySpec,
                  mesh: Optional[MeshSpec], cfg: LimitConfig) -> Tuple[ExtReal, Verdict]:
    """Penalty values along the multiplier schedule, compared with r_S(f).

    The schedule of values is nondecreasing (asserted); the verdict
    compares the last value with the uniform infimum within cfg.tol.
    """
    vals = [penalty_value(f, S, n, spec, mesh) for n in spec.n_schedule]
    for a, b in zip(vals, vals[1:]):
        if b < a - 1e-12:
            raise AssertionError("penalty values must be nondecreasing in n")
    r = uniform_infimum(f, S, mesh, cfg)
    last = vals[-1]
    if last == INF and r == INF:
        gap = 0.0
    elif last == INF or r == INF:
        gap = math.inf
    else:
        gap = abs(float(last) - float(r))
    if gap <= cfg.tol:
        v = Verdict(Status.HOLDS, cfg.tol - gap)
    elif gap >= cfg.decision_band:
        v = Verdict(Status.FAILS, gap)
    else:
        v = Verdict(Status.INCONCLUSIVE, gap)
    v.witness = {"penalty_values": [(n, pv) for n, pv in zip(spec.n_schedule, vals)],
                 "uniform_infimum": r, "gap": gap}
    v.schedules = {"p": spec.p, "n_schedule": list(spec.n_schedule)}
    return last, v


def robustness(f: FunctionModel, S: Region, mesh: Optional[MeshSpec],
               cfg: LimitConfig) -> RobustnessReport:
    """r_S(f) versus inf_S f; the infimum is robust when they agree."""
    r = uniform_infimum(f, S, mesh, cfg)
    plain = plain_infimum(f, S, mesh)
    if r == INF and plain == INF:
        gap: ExtReal = 0
    elif r == INF or plain == INF:
        gap = INF
    else:
        gap = plain - r
    robust = gap != INF and abs(float(gap)) <= cfg.tol
    return RobustnessReport(r_value=r, plain_inf=plain, robust=robust, gap=gap)


def nogoodlsc(N: int, I: int, delta_min: float) -> FunctionModel:
    """The sparse counterexample on a finite truncation of little-l2.

    Value -1/n at the points e_i/n + e_1/(i n) for 1 <= n <= N and
    2 <= i <= I, default 0 elsewhere; all data exact rationals.  The
    truncation bound I >= N / delta_min keeps a value -1/n point inside
    every delta-neighborhood the ladder can see, so the exact values
    r_{B_{1/n}(0)} = -1/n and inf_{B_{1/n}(0)} = -1/(n+1) survive the
    truncation.  i = 1 is excluded: there the two terms collide on e_1.
    """
    if N < 1 or I < 2:
        raise ValueError("need N >= 1 and I >= 2")
    required = int(math.ceil(N / delta_min))
    if I < required:
        raise ValueError(
            f"dimension truncation too small: need I >= {required} "
            f"for N={N} and smallest delta rung {delta_min}")
    exceptions: Dict[SparsePoint, ExtReal] = {}
    for n in range(1, N + 1):
        for i in range(2, I + 1):
            pt: SparsePoint = tuple(sorted({
                0: Fraction(1, i * n),
                i - 1: Fraction(1, n),
            }.items()))
            exceptions[pt] = Fraction(-1, n)
    return FunctionModel.finite_exception(default=Fraction(0), exceptions=exceptions,
                                          ambient_dim=I, name=f"nogoodlsc(N={N},I={I})")


def carac_W_bridge(f: FunctionModel, S: Region, x: Sequence[float], p: float,
                   mesh: MeshSpec, cfg: LimitConfig) -> Tuple[Verdict, Verdict]:
    """Both sides of the penalty/Wijsman equivalence for f_n = f + n d_S^p.

    Returns (verdict of r_{B_lambda(x)}(f_S) <= r_S(f_{B_lambda(x)}) over
    the small-lambda ladder, verdict of Wijsman convergence of the
    penalized sequence to f_S at x).  The two statuses agree whenever both
    are decisive.
    """
    from .convergence import FunctionSequence, wijsman_at_point

    f_S = restrict(f, S)
    rows = []
    worst = math.inf
    lambdas = [lam for lam in cfg.radius_ladder]
    for lam in lambdas:
        ball = Ball(center=tuple(float(c) for c in x), radius=lam, norm=f.norm)
        lhs = uniform_infimum(f_S, ball, mesh, cfg)
        rhs = uniform_infimum(restrict(f, ball), S, mesh, cfg)
        if lhs == INF and rhs == INF:
            margin = math.inf
        elif lhs == INF:
            margin = -math.inf
        elif rhs == INF:
            margin = math.inf
        else:
            margin = float(rhs) - float(lhs)
        rows.append({"lambda": lam, "lhs": lhs, "rhs": rhs, "margin": margin})
        worst = min(worst, margin)
    if worst >= -cfg.tol:
        ineq = Verdict(Status.HOLDS, worst, witness={"rows": rows})
    elif worst <= -cfg.decision_band:
        ineq = Verdict(Status.FAILS, worst, witness={"rows": rows})
    else:
        ineq = Verdict(Status.INCONCLUSIVE, worst, witness={"rows": rows})

    dS = _region_distances(S, mesh)
    vals = values_on(f, mesh)

    def make(n):
        return FunctionModel.tabulated(mesh, vals + n * dS ** p, norm=f.norm,
                                       name=f"{f.name}+{n}d^p")

    seq = FunctionSequence(make, box=mesh.box, norm=f.norm)
    wij = wijsman_at_point(seq, f_S, x, lambda_max=max(lambdas) * 2, cfg=cfg, mesh=mesh)
    return ineq, wij
