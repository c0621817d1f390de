"""Finite-schedule verdicts for set and function convergence: lower/upper
set limits, Wijsman and Kuratowski convergence of sets, Wijsman
convergence of functions at a point through ball infima, slice
convergence through tilted sequences, and the tilt lemma relating gaps of
tilted graphs and epigraphs.

Gap distances against balls use the exact identity
D(B_r(y), A) = (d(y, A) - r)^+ rather than sampling the ball.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .extreal import INF, ExtReal
from .functions import (FunctionModel, MeshSpec, Variant, tilt_model, values_on)
from .geometry import Norm, EUCLIDEAN, PointSet, point_set_distance
from .regions import Ball
from .verdict import LimitConfig, Status, Verdict


@dataclass
class SetSequence:
    """Lazily generated sequence of finite point sets, cached per index."""

    generator: Callable[[int], PointSet]
    dim: int
    norm: Norm = EUCLIDEAN
    _cache: Dict[int, PointSet] = field(default_factory=dict, repr=False)

    def at(self, n: int) -> PointSet:
        if n not in self._cache:
            S = self.generator(n)
            if S.dim != self.dim:
                raise ValueError(f"set at n={n} has dim {S.dim}, expected {self.dim}")
            self._cache[n] = S
        return self._cache[n]


@dataclass
class FunctionSequence:
    """Lazily generated sequence of function models on a shared box."""

    generator: Callable[[int], FunctionModel]
    box: tuple
    norm: Norm = EUCLIDEAN
    _models: Dict[int, FunctionModel] = field(default_factory=dict, repr=False)
    _values: Dict[int, np.ndarray] = field(default_factory=dict, repr=False)

    def model(self, n: int) -> FunctionModel:
        if n not in self._models:
            self._models[n] = self.generator(n)
        return self._models[n]

    def node_values(self, n: int, mesh: MeshSpec) -> np.ndarray:
        if n not in self._values:
            self._values[n] = values_on(self.model(n), mesh)
        return self._values[n]

    def tilted(self, xstar: Sequence[float]) -> "FunctionSequence":
        return FunctionSequence(lambda n: tilt_model(self.model(n), xstar),
                                box=self.box, norm=self.norm)


def _three_way(value: float, cfg: LimitConfig, witness=None, schedules=None) -> Verdict:
    """Holds when value <= tol, Fails when value >= decision band."""
    w = witness or {}
    s = schedules or {}
    if value <= cfg.tol:
        return Verdict(Status.HOLDS, cfg.tol - value, w, s)
    if value >= cfg.decision_band:
        return Verdict(Status.FAILS, value, w, s)
    return Verdict(Status.INCONCLUSIVE, value, w, s)


def in_lower_limit(y: Sequence[float], seq: SetSequence, cfg: LimitConfig) -> Verdict:
    """y in Li S_n: d(y, S_n) -> 0, i.e. small over the suffix window."""
    dists = [point_set_distance(y, seq.at(n)) for n in cfg.n_schedule]
    win = cfg.window(dists)
    witness = {"distances": [(n, d) for n, d in zip(cfg.n_schedule, dists)]}
    if max(win) <= cfg.tol:
        return Verdict(Status.HOLDS, cfg.tol - max(win), witness)
    if min(win) >= cfg.tol:
        return Verdict(Status.FAILS, float(min(win)), witness)
    return Verdict(Status.INCONCLUSIVE, float(min(win)), witness)


def in_upper_limit(y: Sequence[float], seq: SetSequence, cfg: LimitConfig) -> Verdict:
    """y in Ls S_n: liminf d(y, S_n) = 0, i.e. a window hit within tol."""
    dists = [point_set_distance(y, seq.at(n)) for n in cfg.n_schedule]
    win = cfg.window(dists)
    low = min(win)
    witness = {"distances": [(n, d) for n, d in zip(cfg.n_schedule, dists)]}
    if low <= cfg.tol:
        return Verdict(Status.HOLDS, cfg.tol - low, witness)
    return Verdict(Status.FAILS, float(low), witness)


def wijsman_sets(seq: SetSequence, S: PointSet, probes: Sequence[Sequence[float]],
                 cfg: LimitConfig) -> Verdict:
    """d(y, S_n) -> d(y, S) at every probe point."""
    if not probes:
        raise ValueError("probes must be nonempty")
    per_probe = []
    worst_hold = 0.0
    any_fail = None
    for y in probes:
        dS = point_set_distance(y, S)
        diffs = []
        for n in cfg.n_schedule:
            dn = point_set_distance(y, seq.at(n))
            if dS == INF and dn == INF:
                diffs.append(0.0)
            elif dS == INF or dn == INF:
                diffs.append(math.inf)
            else:
                diffs.append(abs(dn - dS))
        win = cfg.window(diffs)
        per_probe.append({"probe": tuple(y), "window_max": max(win)})
        worst_hold = max(worst_hold, max(win))
        if min(win) >= cfg.tol:
            any_fail = {"probe": tuple(y), "window_min": min(win)}
    witness = {"per_probe": per_probe}
    if any_fail is not None:
        return Verdict(Status.FAILS, any_fail["window_min"], witness | {"failed": any_fail})
    return _three_way(worst_hold, cfg, witness)


def hit_and_miss(seq: SetSequence, S: PointSet, y: Sequence[float],
                 lam: float, cfg: LimitConfig) -> Verdict:
    """The hit-and-miss criterion at one probe and one radius.

    Evaluates the hit part when y is (within tol) in S and the miss part
    when the ball B_lam(y) has a positive gap to S; a probe that triggers
    neither is vacuously Holds.
    """
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    dyS = point_set_distance(y, S)
    dists = [point_set_distance(y, seq.at(n)) for n in cfg.n_schedule]
    if dyS != INF and dyS <= cfg.tol:
        win = cfg.window(dists)
        witness = {"branch": "hit", "window_max": max(win)}
        return _three_way(float(max(win)), cfg, witness)
    gap0 = max(0.0, (dyS if dyS != INF else math.inf) - lam)
    if gap0 > cfg.tol:
        best = 0.0
        rows = []
        for delta in cfg.delta_ladder:
            gaps = [max(0.0, (d if d != INF else math.inf) - lam - delta) for d in dists]
            liminf = min(cfg.window(gaps))
            rows.append({"delta": delta, "liminf_gap": liminf})
            best = max(best, liminf)
        witness = {"branch": "miss", "sup_liminf_gap": best, "rows": rows}
        if best > cfg.tol:
            return Verdict(Status.HOLDS, best, witness)
        return Verdict(Status.FAILS, best, witness)
    return Verdict(Status.HOLDS, 0.0, {"branch": "vacuous"})


def kuratowski_sets(seq: SetSequence, S: PointSet, probes: Sequence[Sequence[float]],
                    cfg: LimitConfig) -> Verdict:
    """Hit-and-miss at lambda = 0 across all probes."""
    results = [hit_and_miss(seq, S, y, 0.0, cfg) for y in probes]
    return _aggregate(results, [{"probe": tuple(y)} for y in probes])


def _aggregate(verdicts: List[Verdict], tags: List[dict]) -> Verdict:
    rows = [t | {"status": v.status.value, "margin": v.margin}
            for v, t in zip(verdicts, tags)]
    witness = {"parts": rows}
    if any(v.fails for v in verdicts):
        worst = min(v.margin for v in verdicts if v.fails)
        return Verdict(Status.FAILS, worst, witness)
    if all(v.holds for v in verdicts):
        return Verdict(Status.HOLDS, min(v.margin for v in verdicts), witness)
    return Verdict(Status.INCONCLUSIVE,
                   min(v.margin for v in verdicts), witness)


def _ball_mask(nodes: np.ndarray, x: Sequence[float], radius: float,
               norm: Norm) -> np.ndarray:
    d = norm.pairwise(np.asarray([x], dtype=float), nodes)[0]
    return d <= radius


def snap_half_node(lam: float, h: float) -> float:
    """Snap a radius to a half-node offset to avoid boundary ties."""
    if lam <= 0:
        return 0.0
    k = max(0, int(math.floor(lam / h - 0.5)))
    return (k + 0.5) * h


def recovery_sequence(seq: FunctionSequence, f: FunctionModel, x: Sequence[float],
                      cfg: LimitConfig, mesh: MeshSpec):
    """Pick x_n near x with f_n(x_n) close to f(x); verdict their limits.

    x_n is the node in the shrinking ball B_{r_n}(x) whose value is
    closest to f(x), ties broken towards x.
    """
    fx = f(x)
    if fx == INF:
        raise ValueError("recovery sequence needs f(x) finite")
    fx = float(fx)
    nodes = mesh.nodes()
    dist_x = f.norm.pairwise(np.asarray([x], dtype=float), nodes)[0]
    ladder = cfg.radius_ladder
    picks = []
    for j, n in enumerate(cfg.n_schedule):
        r = ladder[min(j * len(ladder) // len(cfg.n_schedule), len(ladder) - 1)]
        mask = dist_x <= r
        if not mask.any():
            mask = dist_x <= dist_x.min() + 1e-12
        vals = seq.node_values(n, mesh)[mask]
        cand_nodes = nodes[mask]
        cand_dist = dist_x[mask]
        err = np.abs(vals - fx)
        err = np.where(np.isfinite(vals), err, np.inf)
        order = np.lexsort((cand_dist, err))
        k = order[0]
        picks.append((n, tuple(cand_nodes[k]), float(vals[k]), float(cand_dist[k]), r))
    win = cfg.window(picks)
    value_err = max(abs(p[2] - fx) if math.isfinite(p[2]) else math.inf for p in win)
    dist_err = max(p[3] for p in win)
    r_min = min(ladder)
    ok_dist = dist_err <= r_min + cfg.tol
    witness = {"picks": [{"n": p[0], "x_n": p[1], "f_n": p[2], "dist": p[3]} for p in picks],
               "window_value_err": value_err, "window_dist": dist_err}
    if value_err <= cfg.tol and ok_dist:
        v = Verdict(Status.HOLDS, cfg.tol - value_err, witness)
    elif value_err >= cfg.decision_band or not ok_dist:
        v = Verdict(Status.FAILS, value_err, witness)
    else:
        v = Verdict(Status.INCONCLUSIVE, value_err, witness)
    return [p[1] for p in picks], v


def wijsman_at_point(seq: FunctionSequence, f: FunctionModel, x: Sequence[float],
                     lambda_max: float, cfg: LimitConfig, mesh: MeshSpec) -> Verdict:
    """Wijsman convergence of (f_n) to f at x through ball infima:

    a recovery sequence exists at x, and for each radius lam below
    lambda_max the uniform infimum of f on B_lam(x) is dominated by the
    window liminf of inf over B_lam(x) of f_n.
    """
    from .uniforminf import uniform_infimum

    _, rec = recovery_sequence(seq, f, x, cfg, mesh)
    nodes = mesh.nodes()
    h = min(mesh.h)
    lambdas = [0.0] + [snap_half_node(lam, h) for lam in cfg.radius_ladder
                       if lam < lambda_max]
    lambdas = sorted(set(lambdas), reverse=True)
    rows = []
    worst = math.inf
    for lam in lambdas:
        ball = Ball(center=tuple(float(c) for c in x), radius=lam, norm=f.norm)
        r_val = uniform_infimum(f, ball, mesh, cfg)
        mask = _ball_mask(nodes, x, lam, f.norm) if lam > 0 else None
        infs = []
        for n in cfg.n_schedule:
            vals = seq.node_values(n, mesh)
            if lam > 0:
                sel = vals[mask]
            else:
                sel = vals[_ball_mask(nodes, x, h / 4, f.norm)]
            infs.append(float(sel.min()) if sel.size else INF)
        liminf = min(cfg.window(infs))
        if r_val == INF and liminf == INF:
            margin = math.inf
        elif r_val == INF:
            margin = -math.inf
        elif liminf == INF:
            margin = math.inf
        else:
            margin = liminf - float(r_val)
        rows.append({"lambda": lam, "r_value": r_val, "liminf_inf": liminf,
                     "margin": margin})
        worst = min(worst, margin)
    witness = {"recovery": rec.status.value, "rows": rows}
    sched = {"lambda_max": lambda_max}
    if rec.fails:
        return Verdict(Status.FAILS, rec.margin, witness | {"reason": "recovery"}, sched)
    if worst >= -cfg.tol and rec.holds:
        return Verdict(Status.HOLDS, worst, witness, sched)
    if worst <= -cfg.decision_band:
        return Verdict(Status.FAILS, worst, witness, sched)
    return Verdict(Status.INCONCLUSIVE, worst, witness, sched)


def tilt(f: FunctionModel, xstar: Sequence[float]) -> FunctionModel:
    """x -> f(x) + <xstar, x>."""
    return tilt_model(f, xstar)


def slice_at_point(seq: FunctionSequence, f: FunctionModel, x: Sequence[float],
                   lambda_max: float, directions: Sequence[Sequence[float]],
                   cfg: LimitConfig, mesh: MeshSpec) -> Verdict:
    """Slice convergence at x: Wijsman convergence of every tilted pair
    (f_n + x*, f + x*) over the sampled direction set (which must contain
    the zero functional).  A finite direction sample is an incomplete
    surrogate for the full dual space; the report lists the directions."""
    if not directions:
        raise ValueError("directions must be nonempty")
    if not any(all(c == 0 for c in d) for d in directions):
        raise ValueError("direction set must include the zero functional")
    results = []
    tags = []
    for d in directions:
        tseq = seq.tilted(d)
        tf = tilt_model(f, d)
        results.append(wijsman_at_point(tseq, tf, x, lambda_max, cfg, mesh))
        tags.append({"direction": tuple(float(c) for c in d)})
    out = _aggregate(results, tags)
    out.witness["surrogate_note"] = "finite direction sample; not all of X*"
    return out


def graph_epi_gap(g: FunctionModel, f: FunctionModel, mesh: MeshSpec) -> float:
    """D(graph g, epi f) in the box norm, vertical extents exact."""
    from .functions import epi_hypo_gap_triple
    return epi_hypo_gap_triple(f, g, mesh, cap=0.0, floor=0.0, alpha_step=1.0,
                               exact=True)[2]


def tilt_gap_invariance(f: FunctionModel, g: FunctionModel, xstar: Sequence[float],
                        mesh: MeshSpec, cfg: LimitConfig) -> Tuple[bool, bool]:
    """Positivity of D(graph g, epi(f - x*)) versus D(graph(g + x*), epi f),
    the second tested at the scaled tolerance tol / (1 + ||x*||)."""
    neg = [-float(c) for c in xstar]
    lhs = graph_epi_gap(g, tilt_model(f, neg), mesh)
    rhs = graph_epi_gap(tilt_model(g, xstar), f, mesh)
    xnorm = f.norm(xstar)
    return lhs > cfg.tol, rhs > cfg.tol / (1.0 + xnorm)
