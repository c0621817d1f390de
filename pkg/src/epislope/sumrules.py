"""Decoupled sums on product spaces: the diagonal distance, the
decoupling inequality in both its raw sup-inf form and its uniform
infimum form, the bridge from decoupling to Wijsman convergence of the
diagonally penalized sequence, and sum-rule witnesses built from
injected subdifferential oracles.

Product meshes are brute-force objects and are capped at 4 effective
dimensions; larger requests are refused rather than silently degraded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .extreal import INF, ExtReal
from .functions import FunctionModel, MeshSpec, values_on
from .geometry import MAX, Norm
from .slopes import SubdifferentialOracle, slope_stability_witness, strong_slope
from .verdict import LimitConfig, Status, Verdict

PRODUCT_DIM_CAP = 4


@dataclass
class DecoupledSum:
    """F(x_1, ..., x_k) = sum_i f_i(x_i) on X^k under the max product norm."""

    components: Tuple[FunctionModel, ...]

    def __post_init__(self):
        self.components = tuple(self.components)
        if len(self.components) < 2:
            raise ValueError("need at least two components")
        first = self.components[0]
        for f in self.components[1:]:
            if f.box != first.box or f.norm.kind is not first.norm.kind:
                raise ValueError("components must share box and norm")

    @property
    def k(self) -> int:
        return len(self.components)

    @property
    def base_norm(self) -> Norm:
        return self.components[0].norm

    def value(self, xs: Sequence[Sequence[float]]) -> ExtReal:
        total = 0.0
        for f, x in zip(self.components, xs):
            v = f(x)
            if v == INF:
                return INF
            total += float(v)
        return total


@dataclass(frozen=True)
class DiagonalGeometry:
    k: int
    base_dim: int
    base_norm: Norm

    def __post_init__(self):
        if self.k < 2 or self.base_dim < 1:
            raise ValueError("need k >= 2 and base_dim >= 1")


def diagonal_distance(p: Sequence[Sequence[float]], geom: DiagonalGeometry,
                      mesh: Optional[MeshSpec] = None) -> ExtReal:
    """Distance from (x_1, ..., x_k) to the diagonal under the max product
    norm: min over z of max_i ||x_i - z||.

    Exact for base dimension 1 ((max - min) / 2, any norm on the line);
    for higher base dimension the min runs over mesh nodes and the result
    carries an approximation error of at most max(mesh.h)."""
    pts = [tuple(float(c) for c in x) for x in p]
    if len(pts) != geom.k or any(len(x) != geom.base_dim for x in pts):
        raise ValueError("point does not match the diagonal geometry")
    if geom.base_dim == 1:
        coords = [x[0] for x in pts]
        return (max(coords) - min(coords)) / 2.0
    if mesh is None:
        raise ValueError("mesh required for base dimension >= 2")
    arr = np.asarray(pts, dtype=float)
    nodes = mesh.nodes()
    D = geom.base_norm.pairwise(arr, nodes)  # (k, num nodes)
    return float(D.max(axis=0).min())


def product_mesh(mesh: MeshSpec, k: int) -> MeshSpec:
    if k * mesh.dim > PRODUCT_DIM_CAP:
        raise ValueError(
            f"product mesh refused: {k} components x {mesh.dim} base dims "
            f"= {k * mesh.dim} > cap {PRODUCT_DIM_CAP}; coarsen or reduce k")
    return MeshSpec(box=mesh.box * k, h=mesh.h * k)


def _component_values(f: FunctionModel, coords: np.ndarray) -> np.ndarray:
    return np.array([float(f(tuple(p))) for p in coords])


def _product_data(ds: DecoupledSum, xbar: Sequence[float], mesh: MeshSpec):
    """(product mesh, F values, d_Delta values, per-component base distances)."""
    pm = product_mesh(mesh, ds.k)
    P = pm.nodes()
    d = mesh.dim
    F = np.zeros(len(P))
    comp_dist = []
    xb = np.asarray([xbar], dtype=float)
    for i, f in enumerate(ds.components):
        coords = P[:, i * d:(i + 1) * d]
        F = F + _component_values(f, coords)
        comp_dist.append(ds.base_norm.pairwise(xb, coords)[0])
    comp_dist = np.stack(comp_dist)
    if d == 1:
        blocks = P.reshape(len(P), ds.k)
        dDelta = (blocks.max(axis=1) - blocks.min(axis=1)) / 2.0
    else:
        geom = DiagonalGeometry(ds.k, d, ds.base_norm)
        dDelta = np.array([diagonal_distance(
            [tuple(P[j, i * d:(i + 1) * d]) for i in range(ds.k)], geom, mesh)
            for j in range(len(P))])
    return pm, F, dDelta, comp_dist


def _sup_inf(values: np.ndarray, dist: np.ndarray, ladder: Sequence[float]) -> ExtReal:
    """sup over the delta ladder of inf{values : dist <= delta}; monotone
    nondecreasing as delta shrinks, so equals the smallest-rung value."""
    best: ExtReal = -math.inf
    prev = None
    for delta in ladder:
        mask = dist <= delta
        inf_d: ExtReal = float(values[mask].min()) if mask.any() else INF
        if inf_d == -math.inf:
            raise AssertionError("-inf is not an extended-real value")
        if prev is not None and _lt(inf_d, prev):
            raise AssertionError("sup-inf not monotone along the delta ladder")
        prev = inf_d
        best = inf_d if best == -math.inf else _max(best, inf_d)
    return best


def _lt(a: ExtReal, b: ExtReal) -> bool:
    if a == INF:
        return False
    if b == INF:
        return True
    return float(a) < float(b) - 1e-12


def _max(a: ExtReal, b: ExtReal) -> ExtReal:
    if a == INF or b == INF:
        return INF
    return max(float(a), float(b))


def _margin(lhs: ExtReal, rhs: ExtReal) -> float:
    """rhs - lhs with INF == INF treated as equality."""
    if lhs == INF and rhs == INF:
        return 0.0
    if rhs == INF:
        return math.inf
    if lhs == INF:
        return -math.inf
    return float(rhs) - float(lhs)


def decoupling_inequality(ds: DecoupledSum, xbar: Sequence[float],
                          mesh: MeshSpec, cfg: LimitConfig) -> Verdict:
    """For each radius rung lam, check

        r_{B^k_lam(xbar)}(F_Delta)  <=  r_Delta(F_{B^k_lam(xbar)}),

    the left side evaluated on the base mesh through ball infima of the
    summed values, the right side by brute force over product node tuples
    inside the ball.  Both the raw sup-inf expression and the uniform
    infimum form are computed; they must agree.  The verdict is decided at
    the smallest rung ("lam > 0 small enough") and the witness reports the
    largest initial run of small rungs where the inequality holds.

    Two finite-sample allowances apply.  Rungs below the mesh step are
    skipped: a discrete ball holding only its center satisfies the
    inequality vacuously.  The finite delta ladder truncates the sup on
    the right side by at most 2 * delta_min * L for an L-Lipschitz
    component, so declared Lipschitz hints widen the Holds/Fails cutoffs
    by that amount.
    """
    pm, F, dDelta, comp_dist = _product_data(ds, xbar, mesh)
    base = mesh.nodes()
    sum_vals = np.zeros(len(base))
    for f in ds.components:
        sum_vals = sum_vals + values_on(f, mesh)
    dist_x = ds.base_norm.pairwise(np.asarray([xbar], dtype=float), base)[0]

    rows = []
    step = max(mesh.h)
    lambdas = sorted(lam for lam in cfg.radius_ladder if lam >= step)
    if not lambdas:
        raise ValueError("radius ladder has no rung at or above the mesh step")
    slack = 2 * min(cfg.delta_ladder) * sum(
        f.lipschitz_hint for f in ds.components if f.lipschitz_hint is not None)
    for lam in lambdas:
        # left: diagonal restriction over the product ball; the distance of
        # a diagonal point to B^k_lam(xbar) under the max norm is
        # (||x - xbar|| - lam)^+, so this reduces to base-ball infima
        lhs = _sup_inf(sum_vals, np.maximum(0.0, dist_x - lam), cfg.delta_ladder)
        inball = (comp_dist <= lam).all(axis=0)
        Fb = np.where(inball, F, np.inf)
        rhs = _sup_inf(Fb, dDelta, cfg.delta_ladder)
        # raw two-sided form, computed independently rung by rung
        raw_lhs: ExtReal = -math.inf
        raw_rhs: ExtReal = -math.inf
        for delta in cfg.delta_ladder:
            m1 = (dist_x - lam) <= delta  # same float predicate as the r-form
            v1: ExtReal = float(sum_vals[m1].min()) if m1.any() else INF
            raw_lhs = v1 if raw_lhs == -math.inf else _max(raw_lhs, v1)
            m2 = inball & (dDelta <= delta)
            v2: ExtReal = float(F[m2].min()) if m2.any() else INF
            raw_rhs = v2 if raw_rhs == -math.inf else _max(raw_rhs, v2)
        if raw_lhs != lhs or raw_rhs != rhs:
            raise AssertionError("raw and r-form evaluations disagree")
        rows.append({"lambda": lam, "lhs": lhs, "rhs": rhs,
                     "margin": _margin(lhs, rhs)})

    holding_prefix = 0
    for row in rows:
        if row["margin"] >= -(cfg.tol + slack):
            holding_prefix += 1
        else:
            break
    m0 = rows[0]["margin"]
    witness = {"rows": rows, "holding_prefix_rungs": holding_prefix,
               "lipschitz_slack": slack, "product_nodes": pm.node_count}
    sched = {"lambda_ladder": lambdas}
    if m0 >= -(cfg.tol + slack):
        return Verdict(Status.HOLDS, m0, witness, sched)
    if m0 <= -(cfg.decision_band + slack):
        return Verdict(Status.FAILS, m0, witness, sched)
    return Verdict(Status.INCONCLUSIVE, m0, witness, sched)


def _diagonal_models(ds: DecoupledSum, mesh: MeshSpec):
    """(product mesh, F model, F_Delta model, d_Delta node values)."""
    xbar0 = tuple(lo for lo, _ in mesh.box)
    pm, F, dDelta, _ = _product_data(ds, xbar0, mesh)
    if ds.base_norm.kind is not MAX.kind and mesh.dim != 1:
        raise ValueError("product norm requires base dim 1 or a max base norm")
    norm = MAX
    Fm = FunctionModel.tabulated(pm, F, norm=norm, name="F")
    Fd = FunctionModel.tabulated(pm, np.where(dDelta == 0.0, F, np.inf),
                                 norm=norm, name="F_diag")
    return pm, Fm, Fd, dDelta


def prop71_bridge(ds: DecoupledSum, xbar: Sequence[float], mesh: MeshSpec,
                  cfg: LimitConfig) -> Tuple[Verdict, Verdict]:
    """(decoupling inequality verdict, Wijsman-at-point verdict for the
    diagonally penalized sequence F + n * d_Delta converging to the
    diagonal restriction F_Delta at (xbar, ..., xbar)).  The two statuses
    agree whenever both are decisive."""
    from .convergence import FunctionSequence, wijsman_at_point

    dec = decoupling_inequality(ds, xbar, mesh, cfg)
    pm, Fm, Fd, dDelta = _diagonal_models(ds, mesh)
    z = tuple(float(c) for c in xbar) * ds.k

    def make(n):
        return FunctionModel.tabulated(pm, Fm.values + n * dDelta,
                                       norm=Fm.norm, name=f"F+{n}d")

    seq = FunctionSequence(make, box=pm.box, norm=Fm.norm)
    wij = wijsman_at_point(seq, Fd, z, lambda_max=2 * max(cfg.radius_ladder),
                           cfg=cfg, mesh=pm)
    return dec, wij


def _oracle_split(oracles: Sequence[SubdifferentialOracle],
                  xs: Sequence[Sequence[float]]) -> List[List[Tuple[float, ...]]]:
    """Per-component oracle samples at per-component points; the product
    element is their tuple, so componentwise splitting holds structurally."""
    return [list(o.at(tuple(x))) for o, x in zip(oracles, xs)]


def r2_witness(ds: DecoupledSum, oracles: Sequence[SubdifferentialOracle],
               xbar: Sequence[float], mesh: MeshSpec, cfg: LimitConfig) -> Verdict:
    """Sum-rule witness along the diagonally penalized sequence.

    Requires the decoupling inequality to hold.  Slope-stability points
    z_n = (x_{1,n}, ..., x_{k,n}) are extracted for F + n * d_Delta, then
    oracle elements x*_{i,n} in the subdifferential sample of f_i at
    x_{i,n} are chosen to minimize ||sum_i x*_{i,n}||.  Verdicts:

      (a) suffix max of ||sum_i x*_{i,n}|| <= slope of (sum f_i) at xbar
          within tol;
      (b) suffix max of diam(x_{1,n}, ..., x_{k,n}) * max_i ||x*_{i,n}||
          vanishes, within a mesh-resolution floor max(tol, 2 min h).
    """
    if len(oracles) != ds.k:
        raise ValueError("one oracle per component is required")
    dec = decoupling_inequality(ds, xbar, mesh, cfg)
    if not dec.holds:
        raise ValueError("decoupling inequality does not hold at xbar")
    from .convergence import FunctionSequence

    pm, Fm, Fd, dDelta = _diagonal_models(ds, mesh)
    z = tuple(float(c) for c in xbar) * ds.k

    def make(n):
        return FunctionModel.tabulated(pm, Fm.values + n * dDelta,
                                       norm=Fm.norm, name=f"F+{n}d")

    seq = FunctionSequence(make, box=pm.box, norm=Fm.norm)
    wit = slope_stability_witness(seq, Fd, z, pm, cfg)

    sum_vals = np.zeros(mesh.node_count)
    for f in ds.components:
        sum_vals = sum_vals + values_on(f, mesh)
    sum_model = FunctionModel.tabulated(mesh, sum_vals, norm=ds.base_norm,
                                        name="sum f_i")
    s = float(strong_slope(sum_model, xbar, mesh, cfg).value)

    d = mesh.dim
    rows = []
    for j, n in enumerate(cfg.n_schedule):
        p = wit.points[j]
        xs = [p[i * d:(i + 1) * d] for i in range(ds.k)]
        samples = _oracle_split(oracles, xs)
        best_sum = math.inf
        best_elems = None
        for combo in _combos(samples):
            total = tuple(sum(c[t] for c in combo) for t in range(d))
            v = float(ds.base_norm(total))
            if v < best_sum:
                best_sum = v
                best_elems = combo
        diam = max(float(ds.base_norm.dist(a, b)) for a in xs for b in xs)
        elem_max = max(float(ds.base_norm(e)) for e in best_elems)
        rows.append({"n": n, "points": xs, "elements": best_elems,
                     "sum_norm": best_sum, "diam_times_norm": diam * elem_max})

    win_a = cfg.window([row["sum_norm"] for row in rows])
    win_b = cfg.window([row["diam_times_norm"] for row in rows])
    excess_a = max(0.0, max(win_a) - s)
    zero_tol = max(cfg.tol, 2 * min(mesh.h))
    val_b = max(win_b)
    ok_a = excess_a <= cfg.tol
    ok_b = val_b <= zero_tol
    bad_a = excess_a >= cfg.decision_band
    bad_b = val_b >= cfg.decision_band
    witness = {"slope": s, "rows": rows, "suffix_sum_norm": max(win_a),
               "suffix_diam_norm": val_b, "zero_tol": zero_tol,
               "split_consistent": True}
    margin = min(cfg.tol - excess_a, zero_tol - val_b)
    if ok_a and ok_b:
        return Verdict(Status.HOLDS, margin, witness)
    if bad_a or bad_b:
        return Verdict(Status.FAILS, margin, witness)
    return Verdict(Status.INCONCLUSIVE, margin, witness)


def _combos(samples: List[List[Tuple[float, ...]]]):
    if not samples:
        yield ()
        return
    for head in samples[0]:
        for tail in _combos(samples[1:]):
            yield (head,) + tail
