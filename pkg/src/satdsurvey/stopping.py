"""Stopping rules: when has the reviewer read enough?

Three rules are provided. The target rule stops once confirmed positives
reach a target fraction of the estimator's predicted total. The
consecutive-miss rule stops after a streak of negative labels. The
slope-ratio rule finds the knee of the retrieval curve (via the Kneedle
procedure) and stops when the curve is much flatter after the knee than
before it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .estimator import Estimate


@dataclass
class RetrievalCurve:
    """(comments read, positives found) series, one point per label."""

    reads: list[int] = field(default_factory=list)
    found: list[int] = field(default_factory=list)

    def append(self, positive: bool) -> None:
        self.reads.append(self.reads[-1] + 1 if self.reads else 1)
        self.found.append((self.found[-1] if self.found else 0) + int(bool(positive)))

    def __len__(self) -> int:
        return len(self.reads)

    def as_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        return np.asarray(self.reads, dtype=np.float64), np.asarray(self.found, dtype=np.float64)


@dataclass
class StoppingDecision:
    stop: bool
    rule: str
    detail: dict = field(default_factory=dict)

    def __post_init__(self):
        self.stop = bool(self.stop)


def target_rule(found: int, estimate: Estimate, target: float) -> StoppingDecision:
    """Stop once found >= target * estimated total (boundary inclusive)."""
    if not 0.0 < target <= 1.0:
        raise ValueError("target must be in (0, 1]")
    if estimate.degenerate or estimate.total_positives <= 0:
        return StoppingDecision(False, "target", {"target": target, "degenerate": True})
    stop = found >= target * estimate.total_positives
    return StoppingDecision(
        stop,
        "target",
        {"target": target, "estimate": estimate.total_positives, "found": found},
    )


def ros_rule(recent_labels, x: int) -> StoppingDecision:
    """Stop when the most recent ``x`` labels are all negative."""
    labels = list(recent_labels)
    if len(labels) < x:
        return StoppingDecision(False, "ros", {"x": x, "seen": len(labels)})
    streak = all(not bool(v) for v in labels[-x:])
    return StoppingDecision(streak, "ros", {"x": x, "streak": streak})


def kneedle(reads, found, sensitivity: float = 1.0):
    """Index of the curve's knee per the Kneedle procedure, or None.

    Both axes are min-max normalized and the difference curve
    d(i) = y_norm(i) - x_norm(i) is formed. The knee candidate is the
    maximum of d (on unsmoothed step curves the local maxima of d zigzag,
    so the global maximum is the stable candidate); it is confirmed as a
    knee once some later d value drops below the candidate's
    sensitivity-adjusted threshold d_max - sensitivity * mean(dx_norm).
    A still-rising curve therefore has no knee yet. No smoothing is
    applied (retrieval curves are monotone step functions).
    """
    x = np.asarray(reads, dtype=np.float64)
    y = np.asarray(found, dtype=np.float64)
    n = x.shape[0]
    if n < 3:
        return None
    if y.max() == y.min() or x.max() == x.min():
        return None
    xn = (x - x.min()) / (x.max() - x.min())
    yn = (y - y.min()) / (y.max() - y.min())
    d = yn - xn
    if d.max() <= 0:
        return None  # at or below the diagonal everywhere: no bend above it
    spacing = float(np.mean(np.diff(xn)))
    knee = int(np.argmax(d))
    threshold = d[knee] - sensitivity * spacing
    if knee + 1 < n and np.min(d[knee + 1 :]) < threshold:
        return knee
    return None


def cormack_rule(curve: RetrievalCurve, rho: float) -> StoppingDecision:
    """Stop when slope before the knee exceeds ``rho`` times the slope after."""
    reads, found = curve.as_arrays()
    if len(reads) < 3:
        return StoppingDecision(False, "cormack", {"rho": rho, "knee": None})
    knee = kneedle(reads, found)
    if knee is None or reads[knee] <= 0:
        return StoppingDecision(False, "cormack", {"rho": rho, "knee": None})
    slope_before = found[knee] / reads[knee]
    tail_reads = reads[-1] - reads[knee]
    if tail_reads <= 0:
        return StoppingDecision(False, "cormack", {"rho": rho, "knee": int(knee)})
    slope_after = (found[-1] - found[knee]) / tail_reads
    if slope_after == 0.0:
        ratio = float("inf") if slope_before > 0 else 0.0
    else:
        ratio = slope_before / slope_after
    return StoppingDecision(
        ratio > rho,
        "cormack",
        {"rho": rho, "knee": int(knee), "ratio": ratio},
    )


# ---------------------------------------------------------------------------
# rule objects with a uniform per-batch interface


class TargetRule:
    def __init__(self, target: float = 0.9):
        if not 0.0 < target <= 1.0:
            raise ValueError("target must be in (0, 1]")
        self.target = target

    def evaluate(self, found, curve, labels, estimate) -> StoppingDecision:
        return target_rule(found, estimate, self.target)

    def __str__(self):
        return f"target@{self.target:g}"


class RosRule:
    def __init__(self, x: int = 50):
        if x < 1:
            raise ValueError("streak length must be >= 1")
        self.x = x

    def evaluate(self, found, curve, labels, estimate) -> StoppingDecision:
        return ros_rule(labels, self.x)

    def __str__(self):
        return f"ros:{self.x}"


class CormackRule:
    def __init__(self, rho: float = 6.0):
        if rho <= 0:
            raise ValueError("rho must be positive")
        self.rho = rho

    def evaluate(self, found, curve, labels, estimate) -> StoppingDecision:
        return cormack_rule(curve, self.rho)

    def __str__(self):
        return f"cormack:{self.rho:g}"


class NeverStop:
    """Observer mode: the session runs until its pool is exhausted."""

    def evaluate(self, found, curve, labels, estimate) -> StoppingDecision:
        return StoppingDecision(False, "never", {})

    def __str__(self):
        return "never"


def parse_stop_spec(spec: str):
    """Parse ``target@0.9`` / ``ros:10`` / ``cormack:12`` into a rule."""
    s = spec.strip().lower()
    if s.startswith("target@"):
        return TargetRule(float(s.split("@", 1)[1]))
    if s.startswith("ros:"):
        return RosRule(int(s.split(":", 1)[1]))
    if s.startswith("cormack:"):
        return CormackRule(float(s.split(":", 1)[1]))
    if s == "never":
        return NeverStop()
    raise ValueError(f"unknown stopping rule spec {spec!r}")
