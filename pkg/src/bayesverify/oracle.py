"""Ground truth for verdicts: satisfaction frequency under the true parameter."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .gridworld import GridWorld, Plan, Requirement, simulate_batch
from .verify import Decision, Verdict

__all__ = ["GroundTruth", "ErrorClass", "ground_truth_psat", "classify", "is_borderline"]

_CHUNK = 20_000


@dataclass(frozen=True)
class GroundTruth:
    p_sat_hat: float
    runs: int
    standard_error: float

    @classmethod
    def from_counts(cls, satisfied: int, runs: int) -> "GroundTruth":
        if runs < 1 or not 0 <= satisfied <= runs:
            raise ValueError(f"need 0 <= satisfied <= runs and runs >= 1, got {satisfied}/{runs}")
        p = satisfied / runs
        return cls(p, runs, math.sqrt(p * (1.0 - p) / runs))


class ErrorClass(enum.Enum):
    TYPE_I = "TypeI"
    TYPE_II = "TypeII"
    CORRECT = "Correct"
    INDETERMINATE = "Indeterminate"


def ground_truth_psat(
    world: GridWorld,
    plan: Plan,
    requirement: Requirement,
    p_fail_true: float,
    runs: int,
    rng: np.random.Generator,
) -> GroundTruth:
    """Fraction of ``runs`` simulations that satisfy ``requirement`` at the true parameter."""
    if runs < 1:
        raise ValueError("runs must be positive")
    satisfied = 0
    done = 0
    while done < runs:
        k = min(_CHUNK, runs - done)
        satisfied += int(np.count_nonzero(simulate_batch(world, plan, requirement, p_fail_true, k, rng)))
        done += k
    return GroundTruth.from_counts(satisfied, runs)


def classify(verdict: Verdict | Decision, truth: GroundTruth, p_req: float) -> ErrorClass:
    decision = verdict.decision if isinstance(verdict, Verdict) else Decision(verdict)
    if decision is Decision.INCONCLUSIVE:
        return ErrorClass.INDETERMINATE
    satisfies = truth.p_sat_hat >= p_req
    if decision is Decision.REJECT and satisfies:
        return ErrorClass.TYPE_I
    if decision is Decision.ACCEPT and not satisfies:
        return ErrorClass.TYPE_II
    return ErrorClass.CORRECT


def is_borderline(truth: GroundTruth, p_req: float, width: float = 2.0) -> bool:
    """True when ``p_req`` lies within ``width`` standard errors of the estimate."""
    return abs(truth.p_sat_hat - p_req) < width * truth.standard_error
