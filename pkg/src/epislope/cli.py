"""Command-line front end: declarative scenario execution, the exact
counterexample reproduction, the instance catalogue, and deterministic
JSON/CSV emission.

Exit codes: 0 Holds (or matched expectation), 2 Fails, 3 Inconclusive,
1 error.  Reports are byte-stable for a fixed seed when --no-timings is
passed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

import yaml

from . import __version__
from . import catalogue
from .convergence import wijsman_at_point
from .regions import Ball
from .slopes import frechet_membership, slope_stability_witness, strong_slope
from .sumrules import decoupling_inequality, prop71_bridge, r2_witness
from .uniforminf import (PenaltySpec, penalty_limit, penalty_value,
                         plain_infimum, robustness, uniform_infimum)
from .verdict import LimitConfig, Status, Verdict, _jsonable

EXIT = {Status.HOLDS: 0, Status.FAILS: 2, Status.INCONCLUSIVE: 3}


@dataclass
class RunReport:
    scenario: str
    seed: int
    config: Dict[str, Any]
    verdicts: List[Dict[str, Any]] = field(default_factory=list)
    tables: Dict[str, Any] = field(default_factory=dict)
    timings: Optional[Dict[str, float]] = None
    version: str = __version__

    def to_json(self) -> str:
        body = {
            "schema": "epislope-report/1",
            "version": self.version,
            "scenario": self.scenario,
            "seed": self.seed,
            "config": _jsonable(self.config),
            "verdicts": _jsonable(self.verdicts),
            "tables": _jsonable(self.tables),
            "timings": self.timings,
        }
        return json.dumps(body, indent=2, sort_keys=False)


def _overall(verdicts: List[Verdict]) -> Status:
    if any(v.fails for v in verdicts):
        return Status.FAILS
    if all(v.holds for v in verdicts):
        return Status.HOLDS
    return Status.INCONCLUSIVE


def _build_config(overrides: Dict[str, Any]) -> LimitConfig:
    kwargs = {}
    allowed = {"n_schedule", "delta_ladder", "radius_ladder",
               "eventually_window", "tol", "decision_band"}
    for key, value in overrides.items():
        if key not in allowed:
            raise ValueError(f"unknown config key '{key}'")
        kwargs[key] = tuple(value) if isinstance(value, list) else value
    return LimitConfig(**kwargs)


def _region_from(params: Dict[str, Any], payload: Dict[str, Any]):
    spec = params.get("region")
    if spec is not None:
        return Ball(tuple(float(c) for c in spec["center"]),
                    float(spec["radius"]))
    return payload.get("region")


def execute(operation: str, payload: Dict[str, Any], params: Dict[str, Any],
            cfg: LimitConfig) -> Tuple[List[Tuple[str, Verdict]], Dict[str, Any]]:
    """Run one catalogue operation; returns labelled verdicts and tables."""
    tables: Dict[str, Any] = {}
    cfg = payload.get("cfg", cfg)

    if operation == "penalty_limit":
        spec = PenaltySpec(p=float(params.get("p", 1.0)))
        region = _region_from(params, payload)
        value, verdict = penalty_limit(payload["model"], region, spec,
                                       payload["mesh"], cfg)
        tables["penalty_limit"] = value
        return [("penalty_limit", verdict)], tables

    if operation == "robustness":
        region = _region_from(params, payload)
        report = robustness(payload["model"], region, payload["mesh"], cfg)
        status = Status.HOLDS if report.robust else Status.FAILS
        gap = report.gap if report.gap != float("inf") else float("inf")
        verdict = Verdict(status, float(gap) if gap != float("inf") else 0.0,
                          witness={"r_value": report.r_value,
                                   "plain_inf": report.plain_inf})
        return [("robustness", verdict)], tables

    if operation == "wijsman_at_point":
        seq = payload["seq_factory"]()
        probe = tuple(params.get("probe", payload["probe"]))
        verdict = wijsman_at_point(seq, payload["limit"], probe,
                                   lambda_max=float(params.get("lambda_max", 0.5)),
                                   cfg=cfg, mesh=payload["mesh"])
        return [("wijsman_at_point", verdict)], tables

    if operation == "slope_stability":
        seq = payload["seq_factory"]()
        probe = tuple(params.get("probe", payload["probe"]))
        wit = slope_stability_witness(seq, payload["limit"], probe,
                                      payload["mesh"], cfg)
        worst = wit.suffix_max_slope(cfg.window_size)
        excess = max(0.0, worst - wit.limsup_bound)
        status = Status.HOLDS if excess == 0.0 else (
            Status.FAILS if excess >= cfg.decision_band else Status.INCONCLUSIVE)
        verdict = Verdict(status, wit.limsup_bound - worst,
                          witness={"suffix_max_slope": worst,
                                   "limsup_bound": wit.limsup_bound,
                                   "slopes": wit.slopes})
        tables["witness_points"] = wit.points
        return [("slope_stability", verdict)], tables

    if operation == "frechet_membership":
        xstar = tuple(float(c) for c in params["xstar"])
        probe = tuple(params.get("probe", payload["probes"][0]))
        verdict = frechet_membership(payload["model"], probe, xstar,
                                     payload["mesh"], cfg)
        return [("frechet_membership", verdict)], tables

    if operation == "strong_slope":
        probe = tuple(params.get("probe", payload["probes"][0]))
        est = strong_slope(payload["model"], probe, payload["mesh"], cfg)
        tables["slope"] = {"value": est.value, "radius": est.radius_used,
                           "trace": est.ratio_trace}
        verdict = Verdict(Status.HOLDS, 0.0, witness=tables["slope"])
        return [("strong_slope", verdict)], tables

    if operation == "decoupling_inequality":
        verdict = decoupling_inequality(payload["sum"], payload["xbar"],
                                        payload["mesh"], cfg)
        return [("decoupling_inequality", verdict)], tables

    if operation == "prop71_bridge":
        dec, wij = prop71_bridge(payload["sum"], payload["xbar"],
                                 payload["mesh"], cfg)
        return [("decoupling_inequality", dec), ("wijsman_bridge", wij)], tables

    if operation == "r2_witness":
        verdict = r2_witness(payload["sum"], payload["oracles"],
                             payload["xbar"], payload["mesh"], cfg)
        return [("r2_witness", verdict)], tables

    raise ValueError(f"unknown operation '{operation}'")


def scenario_report(doc: Dict[str, Any], seed: Optional[int] = None,
                    timings: bool = True) -> Tuple[RunReport, int]:
    for key in ("name", "operation", "instance"):
        if key not in doc:
            raise ValueError(f"scenario is missing required key '{key}'")
    seed = catalogue.resolve_seed(seed)
    cfg = _build_config(doc.get("config", {}))
    payload = catalogue.get(doc["instance"], seed=seed)
    params = doc.get("params", {})

    start = time.perf_counter()
    labelled, tables = execute(doc["operation"], payload, params, cfg)
    elapsed = time.perf_counter() - start

    overall = _overall([v for _, v in labelled])
    report = RunReport(
        scenario=doc["name"],
        seed=seed,
        config=(payload.get("cfg") or cfg).schedule_dict(),
        verdicts=[{"name": label, **v.to_dict()} for label, v in labelled],
        tables=tables,
        timings={"seconds": elapsed} if timings else None,
    )
    expected = doc.get("expected")
    if expected is not None:
        code = 0 if overall.value == expected else 2
    else:
        code = EXIT[overall]
    return report, code


def run_scenario(path: str, seed: Optional[int] = None, out: Optional[str] = None,
                 timings: bool = True) -> int:
    try:
        with open(path) as fh:
            doc = yaml.safe_load(fh)
        if not isinstance(doc, dict):
            raise ValueError("scenario file must contain a mapping")
        report, code = scenario_report(doc, seed=seed, timings=timings)
    except (OSError, ValueError, KeyError, yaml.YAMLError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    text = report.to_json()
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return code


EXACT_DELTAS = tuple(0.5 / (2 ** k) for k in range(5))  # smallest rung 1/32


def reproduce_example_4_2(n_max: int, dim_trunc: int,
                          csv_path: Optional[str] = None,
                          out: Optional[str] = None,
                          timings: bool = True) -> int:
    """Exact rational table (n, r over B_{1/n}(0), inf over B_{1/n}(0)).

    Expected values are r = -1/n and inf = -1/(n+1); any deviation gives a
    nonzero exit.  The model carries value layers 1..n_max+1: the infimum
    over B_{1/n}(0) is attained on layer n+1, so the truncation must keep
    one layer more than the table depth.
    """
    from .uniforminf import nogoodlsc

    cfg = LimitConfig(delta_ladder=EXACT_DELTAS)
    try:
        model = nogoodlsc(n_max + 1, dim_trunc, delta_min=min(EXACT_DELTAS))
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    start = time.perf_counter()
    rows = []
    all_exact = True
    for n in range(1, n_max + 1):
        ball = Ball(center=(0.0,) * dim_trunc, radius=Fraction(1, n))
        r = uniform_infimum(model, ball, None, cfg)
        inf = plain_infimum(model, ball, None)
        ok = (r == Fraction(-1, n)) and (inf == Fraction(-1, n + 1))
        all_exact = all_exact and ok
        rows.append({"n": n, "r": str(r), "inf": str(inf), "exact": ok})
    elapsed = time.perf_counter() - start

    if csv_path:
        with open(csv_path, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=["n", "r", "inf", "exact"])
            writer.writeheader()
            writer.writerows(rows)
    status = Status.HOLDS if all_exact else Status.FAILS
    verdict = Verdict(status, 0.0, witness={"rows": rows})
    report = RunReport(
        scenario=f"reproduce-example-4-2(n_max={n_max}, dim_trunc={dim_trunc})",
        seed=catalogue.resolve_seed(None),
        config=cfg.schedule_dict(),
        verdicts=[{"name": "exact_table", **verdict.to_dict()}],
        tables={"rows": rows},
        timings={"seconds": elapsed} if timings else None,
    )
    text = report.to_json()
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0 if all_exact else 2


def list_catalogue(filter_text: Optional[str] = None, as_json: bool = False) -> int:
    rows = [{"name": e.name, "kind": e.kind, "role": e.role}
            for e in catalogue.entries()
            if not filter_text
            or filter_text in e.name or filter_text in e.role]
    if as_json:
        print(json.dumps(rows, indent=2))
    else:
        for row in rows:
            print(f"{row['name']}: {row['role']} [{row['kind']}]")
    return 0


def sweep(instance: str, ps: Sequence[float], csv_path: Optional[str],
          seed: Optional[int] = None) -> int:
    payload = catalogue.get(instance, seed=seed)
    if "model" not in payload or payload.get("region") is None:
        print("error: sweep needs a function instance with a region", file=sys.stderr)
        return 1
    cfg = payload.get("cfg") or LimitConfig()
    rows = []
    for p in ps:
        spec = PenaltySpec(p=float(p))
        mesh = payload["mesh"] if payload["kind"] != "exact" else None
        r = uniform_infimum(payload["model"], payload["region"], mesh, cfg)
        for n in spec.n_schedule:
            value = penalty_value(payload["model"], payload["region"], n, spec, mesh)
            rows.append({"p": p, "n": n, "penalty_value": value,
                         "uniform_infimum": r,
                         "gap": abs(float(value) - float(r))
                         if value != float("inf") and r != float("inf") else ""})
    target = open(csv_path, "w", newline="") if csv_path else sys.stdout
    try:
        writer = csv.DictWriter(target, fieldnames=["p", "n", "penalty_value",
                                                    "uniform_infimum", "gap"])
        writer.writeheader()
        writer.writerows(rows)
    finally:
        if csv_path:
            target.close()
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="epislope",
        description="finite-schedule verdicts for variational analysis instances")
    parser.add_argument("--seed", type=int, default=None,
                        help=f"override {catalogue.SEED_ENV}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a YAML scenario file")
    p_run.add_argument("scenario")
    p_run.add_argument("--out", default=None)
    p_run.add_argument("--no-timings", action="store_true")

    p_rep = sub.add_parser("reproduce-example-4-2",
                           help="exact counterexample table")
    p_rep.add_argument("--n-max", type=int, default=5)
    p_rep.add_argument("--dim-trunc", type=int, default=256)
    p_rep.add_argument("--csv", default=None)
    p_rep.add_argument("--out", default=None)
    p_rep.add_argument("--no-timings", action="store_true")

    p_cat = sub.add_parser("catalogue", help="list named instances")
    p_cat.add_argument("--filter", default=None)
    p_cat.add_argument("--json", action="store_true")

    p_sweep = sub.add_parser("sweep", help="penalty exponent/schedule sweep to CSV")
    p_sweep.add_argument("--instance", required=True)
    p_sweep.add_argument("--p", type=float, nargs="+", default=[1.0, 2.0])
    p_sweep.add_argument("--csv", default=None)

    args = parser.parse_args(argv)
    if args.command == "run":
        return run_scenario(args.scenario, seed=args.seed, out=args.out,
                            timings=not args.no_timings)
    if args.command == "reproduce-example-4-2":
        return reproduce_example_4_2(args.n_max, args.dim_trunc,
                                     csv_path=args.csv, out=args.out,
                                     timings=not args.no_timings)
    if args.command == "catalogue":
        return list_catalogue(args.filter, as_json=args.json)
    if args.command == "sweep":
        return sweep(args.instance, args.p, args.csv, seed=args.seed)
    return 1


if __name__ == "__main__":
    sys.exit(main())
