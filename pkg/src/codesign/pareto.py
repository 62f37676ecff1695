"""Reference-frontier validation of search results.

On spaces small enough to enumerate, every candidate point is scored with
the oracle triple (ce, latency_ms, power_w as the energy figure), the
non-dominated subset forms the reference Pareto frontier, and explorer
outputs are checked to lie on (or within epsilon of) that frontier. All
three objectives are minimized.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .oracle import Oracle
from .space import (
    BackboneSpec,
    CodesignPoint,
    HwDomain,
    SpaceTooLargeError,
    count_space,
    enumerate_archs,
    enumerate_hw_configs,
)

DEFAULT_SPACE_CAP = 10**6
DEFAULT_EPSILON = 1e-6


@dataclass(frozen=True)
class ParetoPoint:
    """One evaluated co-design point with its objective triple."""

    point: CodesignPoint | None
    ce: float
    latency_ms: float
    energy: float
    on_frontier: bool = False

    @property
    def objectives(self) -> tuple[float, float, float]:
        return (self.ce, self.latency_ms, self.energy)


def dominates(a, b) -> bool:
    """Minimization dominance: a <= b everywhere and a < b somewhere."""
    return all(x <= y for x, y in zip(a, b)) and any(x < y for x, y in zip(a, b))


def _front_indices(objs: np.ndarray) -> list[int]:
    """Indices of the non-dominated rows, in lexicographic objective order.

    Points are visited in lexicographic order, so any dominator of a point
    precedes it; each point is compared against the running frontier only.
    """
    order = np.lexsort((objs[:, 2], objs[:, 1], objs[:, 0]))
    front: list[int] = []
    front_objs: list[np.ndarray] = []
    for idx in order:
        row = objs[idx]
        dominated = False
        for f in front_objs:
            if np.all(f <= row) and np.any(f < row):
                dominated = True
                break
        if not dominated:
            front.append(int(idx))
            front_objs.append(row)
    return front


def pareto_front(points: list[ParetoPoint]) -> list[ParetoPoint]:
    """The non-dominated subset, flagged, ordered lexicographically by objectives."""
    if not points:
        raise ValueError("pareto_front needs at least one point")
    objs = np.array([p.objectives for p in points], dtype=float)
    if not np.isfinite(objs).all():
        raise ValueError("objective values must be finite")
    return [replace(points[i], on_frontier=True) for i in _front_indices(objs)]


def exhaustive_eval(
    backbone: BackboneSpec,
    hw_domain: HwDomain,
    oracle: Oracle | None = None,
    cap: int = DEFAULT_SPACE_CAP,
) -> list[ParetoPoint]:
    """Evaluate every point in the (depth-aware) space with the oracle triple.

    Architectures vary in the outer loop so each one is lowered once;
    frontier flags are filled in before returning. Refuses spaces whose
    size exceeds ``cap``.
    """
    size = count_space(backbone, hw_domain, "depth_aware")
    if size > cap:
        raise SpaceTooLargeError(f"space has {size} points, cap is {cap}")
    oracle = oracle or Oracle(backbone)
    hw_configs = enumerate_hw_configs(hw_domain)
    evaluated: list[ParetoPoint] = []
    for arch in enumerate_archs(backbone):
        for hw in hw_configs:
            point = CodesignPoint(arch, hw)
            ce, lat, power = oracle.objectives(point)
            evaluated.append(ParetoPoint(point, ce, lat, power))
    on_front = set(_front_indices(np.array([p.objectives for p in evaluated])))
    return [
        replace(p, on_frontier=True) if i in on_front else p
        for i, p in enumerate(evaluated)
    ]


def verify_on_front(
    candidate: ParetoPoint,
    frontier: list[ParetoPoint],
    epsilon: float = DEFAULT_EPSILON,
) -> bool:
    """True unless some frontier member beats the candidate by more than
    ``epsilon`` in every objective simultaneously."""
    c = candidate.objectives
    for f in frontier:
        if all(ci - fi > epsilon for ci, fi in zip(c, f.objectives)):
            return False
    return True
