"""Decoupled sums: diagonal distance, decoupling inequality, the bridge to
Wijsman convergence of the penalized sequence, and sum-rule witnesses."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from epislope import (
    DecoupledSum, DiagonalGeometry, EUCLIDEAN, FunctionModel, MAX, MeshSpec,
    Status, SubdifferentialOracle, decoupling_inequality, diagonal_distance,
    prop71_bridge, r2_witness,
)
from epislope.sumrules import PRODUCT_DIM_CAP, product_mesh
from epislope import catalogue

COARSE = catalogue.coarse_config()


def get(name):
    return catalogue.get(name, seed=catalogue.DEFAULT_SEED)


class TestDiagonalDistance:
    def test_diagonal_points_are_at_zero(self):
        geom = DiagonalGeometry(k=3, base_dim=1, base_norm=EUCLIDEAN)
        assert diagonal_distance([(0.4,), (0.4,), (0.4,)], geom) == 0.0

    def test_pair_half_spread(self):
        geom = DiagonalGeometry(k=2, base_dim=1, base_norm=EUCLIDEAN)
        assert diagonal_distance([(0.0,), (1.0,)], geom) == 0.5

    def test_triple_half_range(self):
        geom = DiagonalGeometry(k=3, base_dim=1, base_norm=EUCLIDEAN)
        assert diagonal_distance([(0.0,), (1.0,), (4.0,)], geom) == 2.0

    def test_shape_mismatch_rejected(self):
        geom = DiagonalGeometry(k=2, base_dim=1, base_norm=EUCLIDEAN)
        with pytest.raises(ValueError):
            diagonal_distance([(0.0,)], geom)
        with pytest.raises(ValueError):
            diagonal_distance([(0.0, 1.0), (0.0, 1.0)], geom)

    def test_higher_dimension_needs_a_mesh(self):
        geom = DiagonalGeometry(k=2, base_dim=2, base_norm=MAX)
        with pytest.raises(ValueError):
            diagonal_distance([(0.0, 0.0), (1.0, 1.0)], geom)
        mesh = MeshSpec(box=((0.0, 1.0), (0.0, 1.0)), h=(0.25, 0.25))
        d = diagonal_distance([(0.0, 0.0), (1.0, 1.0)], geom, mesh)
        assert d == pytest.approx(0.5, abs=0.25)

    @given(st.lists(st.floats(min_value=-5, max_value=5, allow_nan=False),
                    min_size=2, max_size=5))
    @settings(max_examples=100, deadline=None)
    def test_exact_half_range_formula_on_the_line(self, coords):
        geom = DiagonalGeometry(k=len(coords), base_dim=1, base_norm=EUCLIDEAN)
        d = diagonal_distance([(c,) for c in coords], geom)
        assert d == (max(coords) - min(coords)) / 2.0


class TestProductMesh:
    def test_budget_refusal_names_the_size(self):
        mesh = MeshSpec(box=((0.0, 1.0), (0.0, 1.0), (0.0, 1.0)),
                        h=(0.5, 0.5, 0.5))
        with pytest.raises(ValueError, match="refused"):
            product_mesh(mesh, 2)
        assert PRODUCT_DIM_CAP == 4

    def test_product_ball_is_componentwise(self):
        # max product norm: a tuple is within lam of the diagonal point
        # exactly when every component is within lam of the base point
        mesh = MeshSpec.line(-1.0, 1.0, 0.25)
        pm = product_mesh(mesh, 2)
        xbar = np.array([0.0, 0.0])
        for p in pm.nodes():
            joint = max(abs(p[0] - xbar[0]), abs(p[1] - xbar[1])) <= 0.5
            split = abs(p[0] - xbar[0]) <= 0.5 and abs(p[1] - xbar[1]) <= 0.5
            assert joint == split


class TestDecoupledSum:
    def test_needs_two_components(self):
        mesh = MeshSpec.line(-1.0, 1.0, 0.5)
        f = FunctionModel.tabulated(mesh, np.zeros(mesh.node_count))
        with pytest.raises(ValueError):
            DecoupledSum((f,))

    def test_value_adds_with_infinity_absorbing(self):
        mesh = MeshSpec.line(-1.0, 1.0, 0.5)
        f = FunctionModel.tabulated(mesh, np.arange(mesh.node_count, dtype=float))
        g = FunctionModel.tabulated(
            mesh, np.where(np.arange(mesh.node_count) % 2 == 0, 1.0, np.inf))
        ds = DecoupledSum((f, g))
        assert ds.value([(-1.0,), (-1.0,)]) == 1.0
        assert ds.value([(-1.0,), (-0.5,)]) == math.inf


class TestDecouplingInequality:
    def test_lipschitz_plus_lsc_holds(self):
        p = get("decouple-lipschitz-lsc")
        v = decoupling_inequality(p["sum"], p["xbar"], p["mesh"], p["cfg"])
        assert v.holds

    def test_shared_point_indicators_hold(self):
        p = get("decouple-indicator-pair")
        v = decoupling_inequality(p["sum"], p["xbar"], p["mesh"], p["cfg"])
        assert v.holds

    def test_interleaved_spikes_fail(self):
        p = get("decouple-interleaved-fail")
        v = decoupling_inequality(p["sum"], p["xbar"], p["mesh"], p["cfg"])
        assert v.fails
        assert v.witness["rows"][0]["margin"] <= -1.0

    def test_boundary_case_is_inconclusive(self):
        p = get("decouple-boundary")
        v = decoupling_inequality(p["sum"], p["xbar"], p["mesh"], p["cfg"])
        assert v.status is Status.INCONCLUSIVE

    def test_witness_reports_the_holding_prefix(self):
        p = get("decouple-lipschitz-lsc")
        v = decoupling_inequality(p["sum"], p["xbar"], p["mesh"], p["cfg"])
        rows = v.witness["rows"]
        assert v.witness["holding_prefix_rungs"] == len(rows)
        assert v.schedules["lambda_ladder"] == sorted(
            v.schedules["lambda_ladder"])


class TestBridge:
    def test_zero_pair_holds_both_ways(self):
        mesh = catalogue.coarse_mesh()
        zero = FunctionModel.tabulated(mesh, np.zeros(mesh.node_count),
                                       lipschitz_hint=0.0)
        ds = DecoupledSum((zero, zero))
        dec, wij = prop71_bridge(ds, (0.0,), mesh, COARSE)
        assert dec.holds and wij.holds

    def test_lipschitz_pair_holds_both_ways(self):
        p = get("decouple-lipschitz-lsc")
        dec, wij = prop71_bridge(p["sum"], p["xbar"], p["mesh"], p["cfg"])
        assert dec.holds and wij.holds

    def test_engineered_failure_fails_both_ways(self):
        p = get("decouple-interleaved-fail")
        dec, wij = prop71_bridge(p["sum"], p["xbar"], p["mesh"], p["cfg"])
        assert dec.fails and wij.fails


class TestSumRuleWitness:
    def test_smooth_plus_kink(self):
        p = get("sum-smooth-kink")
        v = r2_witness(p["sum"], p["oracles"], p["xbar"], p["mesh"], p["cfg"])
        assert v.holds
        assert v.witness["suffix_sum_norm"] <= p["cfg"].tol
        assert v.witness["split_consistent"]

    def test_cancelling_gradients_sum_to_zero_exactly(self):
        p = get("sum-cancel")
        v = r2_witness(p["sum"], p["oracles"], p["xbar"], p["mesh"], p["cfg"])
        assert v.holds
        assert all(row["sum_norm"] == 0.0 for row in v.witness["rows"])

    def test_offnode_kink(self):
        p = get("sum-offnode-kink")
        v = r2_witness(p["sum"], p["oracles"], p["xbar"], p["mesh"], p["cfg"])
        assert v.holds
        assert v.witness["suffix_sum_norm"] <= v.witness["slope"] + p["cfg"].tol

    def test_oracle_count_must_match(self):
        p = get("sum-cancel")
        with pytest.raises(ValueError):
            r2_witness(p["sum"], p["oracles"][:1], p["xbar"], p["mesh"],
                       p["cfg"])

    def test_requires_decoupling_to_hold(self):
        p = get("decouple-interleaved-fail")
        dummy = [SubdifferentialOracle(lambda x: [(0.0,)])] * 2
        with pytest.raises(ValueError, match="decoupling"):
            r2_witness(p["sum"], dummy, p["xbar"], p["mesh"], p["cfg"])
