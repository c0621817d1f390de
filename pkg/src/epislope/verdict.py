"""Three-valued verdicts and the finite schedules that give meaning to
"for all delta > 0", "liminf over n" and "eventually".

Limits are never extrapolated: every check is evaluated on declared
finite schedules, "eventually" means "on the suffix window of the n
schedule", and each verdict carries an Inconclusive band so that finite
evidence is not overstated.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Tuple


class Status(enum.Enum):
    HOLDS = "Holds"
    FAILS = "Fails"
    INCONCLUSIVE = "Inconclusive"


@dataclass
class Verdict:
    status: Status
    margin: float
    witness: Dict[str, Any] = field(default_factory=dict)
    schedules: Dict[str, Any] = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return self.status is Status.HOLDS

    @property
    def fails(self) -> bool:
        return self.status is Status.FAILS

    @property
    def decisive(self) -> bool:
        return self.status is not Status.INCONCLUSIVE

    def to_dict(self) -> Dict[str, Any]:
        # stable field order for golden-file comparison
        return {
            "status": self.status.value,
            "margin": _jsonable(self.margin),
            "witness": _jsonable(self.witness),
            "schedules": _jsonable(self.schedules),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=False)


def _jsonable(obj):
    import math
    from fractions import Fraction

    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, float):
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        return obj
    if hasattr(obj, "item"):  # numpy scalar
        return _jsonable(obj.item())
    if isinstance(obj, Status):
        return obj.value
    return obj


def _geometric(start: float, count: int) -> Tuple[float, ...]:
    return tuple(start / (2 ** k) for k in range(count))


@dataclass(frozen=True)
class LimitConfig:
    """Schedules and tolerances for all finite-limit verdicts."""

    n_schedule: Tuple[int, ...] = tuple(range(1, 65))
    delta_ladder: Tuple[float, ...] = _geometric(0.5, 12)
    radius_ladder: Tuple[float, ...] = _geometric(0.5, 8)
    eventually_window: Optional[int] = None
    tol: float = 1e-6
    decision_band: float = 0.05

    def __post_init__(self):
        if not self.n_schedule or list(self.n_schedule) != sorted(set(self.n_schedule)):
            raise ValueError("n_schedule must be nonempty and strictly increasing")
        if not self.delta_ladder or list(self.delta_ladder) != sorted(set(self.delta_ladder), reverse=True):
            raise ValueError("delta_ladder must be decreasing positive")
        if min(self.delta_ladder) <= 0 or min(self.radius_ladder) <= 0:
            raise ValueError("ladders must be positive")
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        w = self.window_size
        if w < 1 or w > len(self.n_schedule):
            raise ValueError("eventually_window out of range")

    @property
    def window_size(self) -> int:
        if self.eventually_window is None:
            return max(1, len(self.n_schedule) // 2)
        return self.eventually_window

    def window(self, values):
        """Suffix of per-n values over which 'eventually' must hold."""
        seq = list(values)
        return seq[len(seq) - self.window_size:]

    def schedule_dict(self) -> Dict[str, Any]:
        return {
            "n_schedule": [int(n) for n in self.n_schedule],
            "delta_ladder": list(self.delta_ladder),
            "radius_ladder": list(self.radius_ladder),
            "eventually_window": self.window_size,
            "tol": self.tol,
            "decision_band": self.decision_band,
        }
