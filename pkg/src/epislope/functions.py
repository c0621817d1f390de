"""Extended-real function models and the constructions applied to them:
epigraph/graph/hypograph sampling, restriction, infima over regions,
inf-convolution and the Lipschitz (Pasch-Hausdorff) envelope f ▽ n||.||.

Two evaluation regimes coexist.  Analytic models are closures sampled on
demand; tabulated models carry exact values at mesh nodes and refuse
off-node queries, so that every "inf over X" is a finite reproducible
minimum.  Finite-exception models (a default value plus finitely many
exceptional points) support exact rational evaluation and never touch a
mesh.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np

from .extreal import INF, ExtReal, check
from .geometry import BoxNorm, EUCLIDEAN, Norm, NormKind, Point, PointSet
from .regions import Region

Box = Tuple[Tuple[float, float], ...]

_KEY_DECIMALS = 9


def _key(p: Sequence[float]) -> Tuple[float, ...]:
    return tuple(round(float(c), _KEY_DECIMALS) for c in p)


@dataclass(frozen=True)
class MeshSpec:
    """Uniform grid on a closed box; nodes include both endpoints per axis."""

    box: Box
    h: Tuple[float, ...]

    def __post_init__(self):
        if len(self.box) != len(self.h):
            raise ValueError("box / resolution length mismatch")
        for (lo, hi), step in zip(self.box, self.h):
            if step <= 0 or hi <= lo:
                raise ValueError("degenerate mesh axis")
            if self._axis_count(lo, hi, step) < 2:
                raise ValueError("mesh axis needs at least 2 nodes")

    @staticmethod
    def _axis_count(lo: float, hi: float, step: float) -> int:
        return int(round((hi - lo) / step)) + 1

    @staticmethod
    def line(lo: float, hi: float, h: float) -> "MeshSpec":
        return MeshSpec(box=((lo, hi),), h=(h,))

    @property
    def dim(self) -> int:
        return len(self.box)

    def axis_nodes(self, i: int) -> np.ndarray:
        lo, hi = self.box[i]
        n = self._axis_count(lo, hi, self.h[i])
        return lo + self.h[i] * np.arange(n)

    @property
    def node_count(self) -> int:
        out = 1
        for i in range(self.dim):
            out *= self._axis_count(*self.box[i], self.h[i])
        return out

    def nodes(self) -> np.ndarray:
        """All nodes as a (count, dim) array, C order over axes."""
        axes = [self.axis_nodes(i) for i in range(self.dim)]
        if self.dim == 1:
            return axes[0][:, None]
        grids = np.meshgrid(*axes, indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=1)

    def node_tuples(self) -> Tuple[Point, ...]:
        return tuple(map(tuple, self.nodes()))

    def index_map(self) -> Dict[Tuple[float, ...], int]:
        return {_key(p): i for i, p in enumerate(self.nodes())}


class Variant(enum.Enum):
    ANALYTIC = "analytic"
    TABULATED = "tabulated"
    FINITE_EXCEPTION = "finite_exception"


# sparse exact point: sorted tuple of (coordinate index, Fraction value)
SparsePoint = Tuple[Tuple[int, Fraction], ...]


def sparse_norm_sq(p: SparsePoint) -> Fraction:
    return sum((v * v for _, v in p), Fraction(0))


@dataclass
class FunctionModel:
    """Evaluator from points to extended reals over a declared box."""

    variant: Variant
    box: Box
    norm: Norm = EUCLIDEAN
    lipschitz_hint: Optional[float] = None
    name: str = ""
    # analytic
    fn: Optional[Callable[[Point], ExtReal]] = None
    # tabulated
    mesh: Optional[MeshSpec] = None
    values: Optional[np.ndarray] = None
    _index: Optional[Dict[Tuple[float, ...], int]] = field(default=None, repr=False)
    # finite exception
    default: ExtReal = 0
    exceptions: Dict[SparsePoint, ExtReal] = field(default_factory=dict)
    ambient_dim: int = 0

    @staticmethod
    def analytic(fn, box, norm=EUCLIDEAN, lipschitz_hint=None, name="") -> "FunctionModel":
        return FunctionModel(Variant.ANALYTIC, tuple(box), norm, lipschitz_hint, name, fn=fn)

    @staticmethod
    def tabulated(mesh: MeshSpec, values: np.ndarray, norm=EUCLIDEAN,
                  lipschitz_hint=None, name="") -> "FunctionModel":
        values = np.asarray(values, dtype=float)
        if values.shape != (mesh.node_count,):
            raise ValueError("values must align with mesh nodes")
        if np.isnan(values).any() or (values == -np.inf).any():
            raise ValueError("NaN / -inf are not extended-real values")
        return FunctionModel(Variant.TABULATED, mesh.box, norm, lipschitz_hint,
                             name, mesh=mesh, values=values)

    @staticmethod
    def finite_exception(default: ExtReal, exceptions: Dict[SparsePoint, ExtReal],
                         ambient_dim: int, box=(), norm=EUCLIDEAN, name="") -> "FunctionModel":
        return FunctionModel(Variant.FINITE_EXCEPTION, tuple(box), norm, None, name,
                             default=default, exceptions=dict(exceptions),
                             ambient_dim=ambient_dim)

    def __call__(self, x: Sequence[float]) -> ExtReal:
        if self.variant is Variant.ANALYTIC:
            return check(self.fn(tuple(x)))
        if self.variant is Variant.TABULATED:
            if self._index is None:
                self._index = self.mesh.index_map()
            i = self._index.get(_key(x))
            if i is None:
                raise KeyError(f"off-node query {tuple(x)} on a tabulated model")
            return float(self.values[i])
        # finite exception: exact sparse lookup
        sp = tuple((i, Fraction(c)) for i, c in enumerate(x) if c != 0)
        return self.exceptions.get(sp, self.default)


def tabulate(f: FunctionModel, mesh: MeshSpec) -> FunctionModel:
    """Freeze an analytic model onto a mesh; tabulated models pass through."""
    if f.variant is Variant.TABULATED:
        if f.mesh is not None and f.mesh.box == mesh.box and f.mesh.h == mesh.h:
            return f
        raise ValueError("tabulated model bound to a different mesh")
    nodes = mesh.nodes()
    vals = np.array([float(f(tuple(p))) for p in nodes])
    return FunctionModel.tabulated(mesh, vals, norm=f.norm,
                                   lipschitz_hint=f.lipschitz_hint, name=f.name)


def values_on(f: FunctionModel, mesh: MeshSpec) -> np.ndarray:
    if f.variant is Variant.TABULATED:
        return tabulate(f, mesh).values
    return np.array([float(f(tuple(p))) for p in mesh.nodes()])


@dataclass(frozen=True)
class EpigraphSample:
    base: FunctionModel
    value_cap: float
    mesh: MeshSpec
    cloud: PointSet


def _box_norm_for(mesh: MeshSpec, norm: Norm) -> BoxNorm:
    return BoxNorm(base=norm, base_dim=mesh.dim)


def sample_epigraph(f: FunctionModel, mesh: MeshSpec, cap: float,
                    alpha_step: float) -> EpigraphSample:
    """Cloud {(x, a) : x node, a in {f(x), f(x)+step, ...} up to cap}."""
    if not math.isfinite(cap):
        raise ValueError("cap must be finite")
    if alpha_step <= 0:
        raise ValueError("alpha_step must be positive")
    pts = []
    vals = values_on(f, mesh)
    for p, v in zip(mesh.nodes(), vals):
        if not np.isfinite(v) or v > cap:
            continue
        a = v
        while a <= cap + 1e-12:
            pts.append(tuple(p) + (min(a, cap),))
            a += alpha_step
    if not pts:
        raise ValueError("empty epigraph sample: function is +inf above cap on the box")
    cloud = PointSet.of(pts, norm=_box_norm_for(mesh, f.norm))
    return EpigraphSample(base=f, value_cap=cap, mesh=mesh, cloud=cloud)


def sample_graph(f: FunctionModel, mesh: MeshSpec, cap: float) -> PointSet:
    pts = []
    vals = values_on(f, mesh)
    for p, v in zip(mesh.nodes(), vals):
        if np.isfinite(v) and v <= cap:
            pts.append(tuple(p) + (float(v),))
    if not pts:
        raise ValueError("empty graph sample")
    return PointSet.of(pts, norm=_box_norm_for(mesh, f.norm))


def sample_hypograph(f: FunctionModel, mesh: MeshSpec, cap: float, floor: float,
                     alpha_step: float) -> PointSet:
    """Cloud between floor and min(f(x), cap); f(x)=+inf caps at `cap`."""
    if alpha_step <= 0:
        raise ValueError("alpha_step must be positive")
    pts = []
    vals = values_on(f, mesh)
    for p, v in zip(mesh.nodes(), vals):
        top = cap if not np.isfinite(v) else min(float(v), cap)
        a = top
        while a >= floor - 1e-12:
            pts.append(tuple(p) + (max(a, floor),))
            a -= alpha_step
    if not pts:
        raise ValueError("empty hypograph sample")
    return PointSet.of(pts, norm=_box_norm_for(mesh, f.norm))


def restrict(f: FunctionModel, S: Region) -> FunctionModel:
    """f_S = f + indicator of S."""
    def fn(x):
        return f(x) if S.contains(x) else INF
    return FunctionModel.analytic(fn, f.box, norm=f.norm, name=f"{f.name}|S")


def inf_over_region(f: FunctionModel, S: Region, mesh: MeshSpec) -> ExtReal:
    """Min of f over mesh nodes inside S; INF when no node qualifies."""
    vals = values_on(f, mesh)
    best = INF
    for p, v in zip(mesh.nodes(), vals):
        if S.contains(tuple(p)) and v < best:
            best = float(v)
    return best


def inf_convolution(f: FunctionModel, g: FunctionModel, mesh: MeshSpec) -> FunctionModel:
    """(f ▽ g)(x) = min over mesh nodes z of f(z) + g(x - z), tabulated.

    g must be evaluable at node differences, so it is analytic (or defined
    on a mesh covering the difference set).
    """
    nodes = mesh.nodes()
    fv = values_on(f, mesh)
    out = np.empty(len(nodes))
    for i, x in enumerate(nodes):
        best = INF
        for z, vz in zip(nodes, fv):
            if not np.isfinite(vz):
                continue
            gv = g(tuple(np.asarray(x) - np.asarray(z)))
            total = vz + float(gv) if gv != INF else INF
            if total < best:
                best = total
        out[i] = best
    return FunctionModel.tabulated(mesh, out, norm=f.norm, name=f"{f.name}▽{g.name}")


def pasch_hausdorff(f: FunctionModel, n: float, mesh: MeshSpec) -> FunctionModel:
    """Lipschitz envelope f_n(x) = min over nodes y of f(y) + n||y - x||.

    f_n <= f nodewise, and f_n is n-Lipschitz on node pairs.  On a 1-D
    uniform mesh the envelope is computed by an exact two-pass distance
    transform; otherwise by brute force over node pairs.
    """
    if n <= 0:
        raise ValueError("n must be positive")
    fv = values_on(f, mesh)
    if not np.isfinite(fv).any():
        raise ValueError("f is +inf on the whole mesh")
    if mesh.dim == 1:
        step = n * mesh.h[0]
        fwd = fv.copy()
        for i in range(1, len(fwd)):
            cand = fwd[i - 1] + step
            if cand < fwd[i]:
                fwd[i] = cand
        bwd = fv.copy()
        for i in range(len(bwd) - 2, -1, -1):
            cand = bwd[i + 1] + step
            if cand < bwd[i]:
                bwd[i] = cand
        out = np.minimum(fwd, bwd)
    else:
        nodes = mesh.nodes()
        D = f.norm.pairwise(nodes, nodes)
        out = (fv[None, :] + n * D).min(axis=1)
    return FunctionModel.tabulated(mesh, out, norm=f.norm, lipschitz_hint=n,
                                   name=f"{f.name}▽{n}||.||")


def epi_hypo_gap_triple(f: FunctionModel, g: FunctionModel, mesh: MeshSpec,
                        cap: float, floor: float, alpha_step: float,
                        exact: bool = False):
    """(D(hypo g, epi f), D(hypo g, graph f), D(graph g, epi f)) in box norm.

    exact=True treats vertical extents analytically (segments instead of
    alpha ladders): the three distances then coincide by construction of
    the minimizing pairs.  exact=False samples the clouds and computes
    plain gap distances, which agree within O(h + alpha_step).
    """
    from .geometry import gap_distance

    if exact:
        fg_mesh_f = values_on(f, mesh)
        fg_mesh_g = values_on(g, mesh)
        nodes = mesh.nodes()
        D = f.norm.pairwise(nodes, nodes)  # rows: g-nodes y, cols: f-nodes x
        fx = fg_mesh_f[None, :]
        gy = fg_mesh_g[:, None]
        with np.errstate(invalid="ignore"):
            vert = fx - gy
        # f(x)=+inf: no epi/graph point at x; g(y)=+inf: hypo is all of R there.
        vert = np.where(np.isposinf(fx) * np.ones_like(gy, dtype=bool), np.inf, vert)
        vert = np.where(np.isposinf(gy) * np.ones_like(fx, dtype=bool), 0.0, vert)
        vert = np.maximum(vert, 0.0)
        dist = np.maximum(D, vert)
        dist = np.where(np.isposinf(fx) * np.ones_like(gy, dtype=bool), np.inf, dist)
        val = float(dist.min())
        return val, val, val

    epi_f = sample_epigraph(f, mesh, cap, alpha_step).cloud
    graph_f = sample_graph(f, mesh, cap)
    hypo_g = sample_hypograph(g, mesh, cap, floor, alpha_step)
    graph_g = sample_graph(g, mesh, cap)
    return (gap_distance(hypo_g, epi_f),
            gap_distance(hypo_g, graph_f),
            gap_distance(graph_g, epi_f))


def tilt_model(f: FunctionModel, xstar: Sequence[float]) -> FunctionModel:
    """x -> f(x) + <xstar, x>."""
    xs = tuple(float(c) for c in xstar)
    if f.variant is Variant.TABULATED:
        shift = f.mesh.nodes() @ np.asarray(xs)
        return FunctionModel.tabulated(f.mesh, f.values + shift, norm=f.norm,
                                       name=f"{f.name}+x*")

    def fn(x):
        v = f(x)
        if v == INF:
            return INF
        return v + sum(a * float(b) for a, b in zip(xs, x))

    return FunctionModel.analytic(fn, f.box, norm=f.norm, name=f"{f.name}+x*")
