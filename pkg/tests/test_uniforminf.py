"""Uniform infima, penalty limits, robustness, and the exact sparse
counterexample where the uniform infimum sits strictly below the plain one."""

import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from epislope import (
    Ball, FunctionModel, INF, LimitConfig, MeshSpec, PenaltySpec, Status,
    WholeSpace, carac_W_bridge, nogoodlsc, penalty_limit, penalty_value,
    plain_infimum, robustness, uniform_infimum,
)

CFG = LimitConfig()
# ladder whose smallest rung (1/32) keeps the sparse model's truncation
# bound affordable in the exact tests
EXACT_CFG = LimitConfig(delta_ladder=tuple(0.5 / 2 ** k for k in range(5)))


def line(h=0.01):
    return MeshSpec.line(-1.0, 1.0, h)


def tabmodel(fn, mesh, **kw):
    vals = np.array([fn(float(p[0])) for p in mesh.nodes()])
    return FunctionModel.tabulated(mesh, vals, **kw)


def brute_uniform_infimum(f, S, mesh, cfg):
    """Independent double loop over (delta, nodes)."""
    best = None
    for delta in cfg.delta_ladder:
        inf_d = INF
        for p in mesh.nodes():
            d = S.distance(tuple(p))
            if d <= delta:
                v = f(tuple(p))
                if v < inf_d:
                    inf_d = float(v)
        best = inf_d if best is None else max(best, inf_d)
    return best


class TestUniformInfimum:
    def test_continuous_function_at_origin(self):
        mesh = line(h=1e-3)
        f = tabmodel(lambda x: x * x, mesh)
        assert uniform_infimum(f, Ball((0.0,), 0.0), mesh, CFG) == 0.0

    def test_matches_brute_force_on_random_instances(self):
        mesh = line(h=0.05)
        rng = np.random.default_rng(7)
        for _ in range(5):
            vals = rng.uniform(-2.0, 2.0, size=mesh.node_count)
            vals[rng.integers(0, mesh.node_count, size=5)] = math.inf
            f = FunctionModel.tabulated(mesh, vals)
            S = Ball((float(rng.uniform(-0.5, 0.5)),), 0.25)
            assert uniform_infimum(f, S, mesh, CFG) == \
                brute_uniform_infimum(f, S, mesh, CFG)

    def test_region_must_meet_the_ladder(self):
        mesh = line(h=0.1)
        f = tabmodel(lambda x: x, mesh)
        with pytest.raises(ValueError):
            uniform_infimum(f, Ball((9.0,), 0.1), mesh, CFG)

    def test_never_exceeds_plain_infimum(self):
        mesh = line(h=0.05)
        rng = np.random.default_rng(11)
        for _ in range(5):
            f = FunctionModel.tabulated(
                mesh, rng.uniform(-1.0, 1.0, size=mesh.node_count))
            S = Ball((0.0,), float(rng.uniform(0.1, 0.8)))
            r = uniform_infimum(f, S, mesh, CFG)
            assert r <= plain_infimum(f, S, mesh) + CFG.tol


class TestPenaltyValue:
    def test_linear_function_point_region(self):
        mesh = line(h=0.01)
        f = tabmodel(lambda x: x, mesh)
        spec = PenaltySpec(p=1.0)
        v = penalty_value(f, Ball((0.0,), 0.0), 2.0, spec, mesh)
        assert v == pytest.approx(0.0, abs=1e-12)

    def test_indicator_of_region_is_zero(self):
        mesh = line(h=0.01)
        S = Ball((0.0,), 0.25)
        f = tabmodel(lambda x: 0.0 if abs(x) <= 0.25 + 1e-9 else math.inf, mesh)
        spec = PenaltySpec()
        for n in (1.0, 8.0, 256.0):
            assert penalty_value(f, S, n, spec, mesh) == 0.0

    def test_constant_function(self):
        mesh = line(h=0.01)
        f = tabmodel(lambda x: 3.25, mesh)
        spec = PenaltySpec()
        for n in (1.0, 64.0):
            assert penalty_value(f, Ball((0.3,), 0.1), n, spec, mesh) == 3.25

    def test_order_independence_of_the_schedule(self):
        mesh = line(h=0.02)
        f = tabmodel(lambda x: x * abs(x), mesh)
        S = Ball((0.25,), 0.1)
        spec = PenaltySpec()
        forward = [penalty_value(f, S, n, spec, mesh) for n in spec.n_schedule]
        shuffled = list(spec.n_schedule)
        random.Random(3).shuffle(shuffled)
        scrambled = {n: penalty_value(f, S, n, spec, mesh) for n in shuffled}
        assert forward == [scrambled[n] for n in spec.n_schedule]
        assert forward == sorted(forward)

    def test_invalid_spec(self):
        with pytest.raises(ValueError):
            PenaltySpec(p=0.0)
        with pytest.raises(ValueError):
            PenaltySpec(n_schedule=(4.0, 2.0))


class TestPenaltyLimit:
    def test_quadratic_at_origin_holds(self):
        mesh = line(h=1e-3)
        f = tabmodel(lambda x: x * x, mesh)
        value, verdict = penalty_limit(f, Ball((0.0,), 0.0), PenaltySpec(),
                                       mesh, CFG)
        assert verdict.holds
        assert value == pytest.approx(0.0, abs=1e-3)

    def test_exponent_choice_does_not_change_the_limit(self):
        mesh = line(h=1e-3)
        f = tabmodel(abs, mesh)
        for p in (1.0, 2.0):
            value, verdict = penalty_limit(f, Ball((0.0,), 0.0),
                                           PenaltySpec(p=p), mesh, CFG)
            assert verdict.holds
            assert value == pytest.approx(0.0, abs=1e-3)

    def test_verdict_carries_the_schedule(self):
        mesh = line(h=0.01)
        f = tabmodel(lambda x: x * x, mesh)
        _, verdict = penalty_limit(f, Ball((0.0,), 0.25), PenaltySpec(p=2.0),
                                   mesh, CFG)
        assert verdict.schedules["p"] == 2.0
        assert verdict.witness["penalty_values"]


class TestRobustness:
    def test_continuous_function_is_robust(self):
        mesh = line(h=1e-3)
        f = tabmodel(lambda x: x * x, mesh)
        rep = robustness(f, Ball((0.0,), 0.5), mesh, CFG)
        assert rep.robust and rep.gap == pytest.approx(0.0, abs=CFG.tol)

    def test_mutual_infinity_counts_as_equal(self):
        mesh = line(h=0.1)
        f = tabmodel(lambda x: 0.0 if abs(x) < 1e-9 else math.inf, mesh)
        rep = robustness(f, Ball((1.0,), 0.0), mesh, CFG)
        assert rep.plain_inf == INF and rep.robust

    def test_sparse_counterexample_is_not_robust(self):
        f = nogoodlsc(N=3, I=96, delta_min=1.0 / 32.0)
        S = Ball(center=(0.0,) * 96, radius=Fraction(1, 2))
        rep = robustness(f, S, None, EXACT_CFG)
        assert rep.r_value == Fraction(-1, 2)
        assert rep.plain_inf == Fraction(-1, 3)
        assert not rep.robust
        assert rep.gap == Fraction(1, 6)


class TestSparseCounterexample:
    def test_exact_values_at_marked_points(self):
        f = nogoodlsc(N=1, I=64, delta_min=1.0 / 32.0)
        x = [0.0] * 64
        x[1] = 1.0          # e_2 / 1
        x[0] = 0.5          # e_1 / 2
        assert f(x) == Fraction(-1, 1)
        assert f([0.0] * 64) == 0

    def test_marked_points_sit_strictly_outside_their_ball(self):
        for n in (1, 2, 3):
            for i in (2, 5, 50):
                nsq = Fraction(1, n * n) + Fraction(1, (i * n) ** 2)
                assert nsq > Fraction(1, n * n)

    def test_truncation_bound_enforced(self):
        with pytest.raises(ValueError, match="need I >="):
            nogoodlsc(N=5, I=64, delta_min=1.0 / 32.0)
        with pytest.raises(ValueError):
            nogoodlsc(N=0, I=64, delta_min=0.5)

    def test_uniform_versus_plain_infimum_table(self):
        # inf over B_{1/n}(0) needs the value layer n+1, so build one deeper
        f = nogoodlsc(N=4, I=128, delta_min=1.0 / 32.0)
        for n in (1, 2, 3):
            S = Ball(center=(0.0,) * 128, radius=Fraction(1, n))
            assert uniform_infimum(f, S, None, EXACT_CFG) == Fraction(-1, n)
            assert plain_infimum(f, S, None) == Fraction(-1, n + 1)

    def test_exact_region_requirements(self):
        f = nogoodlsc(N=1, I=64, delta_min=1.0 / 32.0)
        with pytest.raises(ValueError):
            uniform_infimum(f, WholeSpace(), None, EXACT_CFG)


class TestPenaltyWijsmanBridge:
    def test_continuous_function_small_ball(self):
        mesh = line(h=0.05)
        f = tabmodel(lambda x: x * x, mesh, lipschitz_hint=2.0)
        ineq, wij = carac_W_bridge(f, Ball((0.0,), 0.25), (0.0,), 1.0, mesh, CFG)
        assert ineq.holds and wij.holds

    def test_whole_box_region_trivial(self):
        mesh = line(h=0.05)
        f = tabmodel(abs, mesh, lipschitz_hint=1.0)
        ineq, wij = carac_W_bridge(f, WholeSpace(), (0.0,), 1.0, mesh, CFG)
        assert ineq.holds and wij.holds

    def test_decisive_statuses_agree(self):
        mesh = line(h=0.05)
        rng = np.random.default_rng(5)
        for _ in range(3):
            f = FunctionModel.tabulated(
                mesh, rng.uniform(0.0, 1.0, size=mesh.node_count))
            ineq, wij = carac_W_bridge(f, Ball((0.0,), 0.25), (0.0,), 1.0,
                                       mesh, CFG)
            if ineq.decisive and wij.decisive:
                assert ineq.status is wij.status


@given(st.integers(min_value=0, max_value=2 ** 31 - 1))
@settings(max_examples=15, deadline=None)
def test_uniform_infimum_below_plain_and_penalty_monotone(seed):
    rng = np.random.default_rng(seed)
    mesh = MeshSpec.line(-1.0, 1.0, 0.1)
    f = FunctionModel.tabulated(mesh, rng.uniform(-1.0, 1.0, size=mesh.node_count))
    S = Ball((float(rng.uniform(-0.4, 0.4)),), float(rng.uniform(0.05, 0.5)))
    cfg = LimitConfig()
    r = uniform_infimum(f, S, mesh, cfg)
    plain = plain_infimum(f, S, mesh)
    assert r <= plain + cfg.tol
    spec = PenaltySpec()
    vals = [penalty_value(f, S, n, spec, mesh) for n in spec.n_schedule]
    assert vals == sorted(vals)
    assert vals[-1] <= plain + 1e-12
