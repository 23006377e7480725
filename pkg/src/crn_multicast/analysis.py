"""Paired comparisons between Monte-Carlo results that share trial seeds.

Runs with the same ``master_seed`` and ``num_trials`` see the same topology
(and fading) in trial ``i``, so differences are taken per trial before
averaging. That removes the between-topology variance from the comparison.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .simulator import SimResult


@dataclass(frozen=True)
class Difference:
    mean: float
    stderr: float

    @property
    def z(self) -> float:
        if self.stderr == 0:
            return 0.0 if self.mean == 0 else math.copysign(math.inf, self.mean)
        return self.mean / self.stderr


def paired_difference(a, b) -> Difference:
    """Mean and standard error of ``a - b`` over matched trials."""
    d = np.asarray(a, dtype=float) - np.asarray(b, dtype=float)
    if d.size < 2:
        return Difference(float(d.mean()), 0.0)
    return Difference(float(d.mean()), float(d.std(ddof=1) / math.sqrt(d.size)))


def samples(result: SimResult, metric: str) -> np.ndarray:
    return {"throughput": result.throughput_samples, "pdr": result.pdr_samples}[metric]


def at_least(a: SimResult, b: SimResult, metric: str, tolerance: float = 1.0) -> tuple[bool, Difference]:
    """``a >= b`` unless ``a`` falls short by more than ``tolerance`` stderr."""
    diff = paired_difference(samples(a, metric), samples(b, metric))
    return diff.mean > -tolerance * diff.stderr or diff.mean >= 0, diff


def trend_violations(curve, metric: str, increasing: bool = True) -> list:
    """Consecutive steps of ``curve`` (SimResults along a sweep) that go the wrong way."""
    sign = 1.0 if increasing else -1.0
    bad = []
    for i, (lo, hi) in enumerate(zip(curve, curve[1:])):
        diff = paired_difference(samples(hi, metric), samples(lo, metric))
        if sign * diff.mean < 0:
            bad.append((i, diff))
    return bad


def trend_holds(curve, metric: str, increasing: bool = True, allowed: int = 1, sigmas: float = 3.0) -> bool:
    """At most ``allowed`` wrong-way steps, each within ``sigmas`` standard errors of zero."""
    bad = trend_violations(curve, metric, increasing)
    return len(bad) <= allowed and all(abs(d.mean) <= sigmas * d.stderr for _, d in bad)


def mean_gap(a_curve, b_curve, metric: str) -> float:
    """Average absolute distance between two curves' means."""
    return float(np.mean([abs(getattr(a, metric) - getattr(b, metric)) for a, b in zip(a_curve, b_curve)]))
