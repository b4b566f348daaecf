"""Sequential Bayesian verification of a plan under an uncertain domain model.

The loop keeps a Beta belief over the probability that a simulated run
satisfies the requirement. Every iteration draws fresh domain parameters,
simulates once, folds the outcome into the belief and stops as soon as the
belief mass on one side of ``p_req`` reaches ``c_req``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Protocol

import numpy as np

from .posterior import UNIFORM, BetaPosterior, ObservationSummary, mass_above, sample_many

__all__ = [
    "SimulationModel",
    "BernoulliModel",
    "Decision",
    "Verdict",
    "VerificationConfig",
    "SatisfactionEstimate",
    "bv_verify",
    "mle_verify",
    "subjective_satisfaction_estimate",
]


class SimulationModel(Protocol):
    """Anything that can run a bounded simulation and judge the requirement.

    For fixed inputs, repeated calls must be i.i.d. Bernoulli draws whose
    success probability is the satisfaction function at ``theta``.
    """

    def simulate(self, state: Any, plan: Any, requirement: Any, theta: float, rng: np.random.Generator) -> bool:
        ...


@dataclass(frozen=True)
class BernoulliModel:
    """Model given directly by its satisfaction function ``f_sat(theta)``.

    State, plan and requirement are ignored. Useful for analytic checks.
    """

    f_sat: Callable[[float], float]

    def simulate(self, state, plan, requirement, theta, rng):
        return bool(rng.random() < self.f_sat(theta))

    def simulate_thetas(self, state, plan, requirement, thetas, rng):
        probs = np.fromiter((self.f_sat(t) for t in thetas), dtype=float, count=len(thetas))
        return rng.random(len(thetas)) < probs


class Decision(enum.Enum):
    ACCEPT = "Accept"
    REJECT = "Reject"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class VerificationConfig:
    p_req: float = 0.9
    c_req: float = 0.95
    max_iterations: int = 100_000
    prior: BetaPosterior = field(default=UNIFORM)

    def __post_init__(self):
        if not 0.0 < self.p_req < 1.0:
            raise ValueError(f"p_req must lie in (0, 1), got {self.p_req}")
        if not 0.5 < self.c_req < 1.0:
            raise ValueError(f"c_req must lie in (0.5, 1), got {self.c_req}")
        if int(self.max_iterations) != self.max_iterations or self.max_iterations < 1:
            raise ValueError(f"max_iterations must be a positive integer, got {self.max_iterations}")


@dataclass(frozen=True)
class Verdict:
    decision: Decision
    iterations: int
    final_confidence: float
    final_belief: BetaPosterior

    @property
    def accepted(self) -> bool:
        return self.decision is Decision.ACCEPT


def _run(theta_of: Callable[[], float], state, model, plan, requirement, config, rng) -> Verdict:
    belief = config.prior
    p_req, c_req = config.p_req, config.c_req
    c_sat = mass_above(belief, p_req)
    for i in range(1, config.max_iterations + 1):
        theta = theta_of()
        sat = model.simulate(state, plan, requirement, theta, rng)
        belief = BetaPosterior(belief.a + 1.0, belief.b) if sat else BetaPosterior(belief.a, belief.b + 1.0)
        c_sat = mass_above(belief, p_req)
        if c_sat >= c_req:
            return Verdict(Decision.ACCEPT, i, c_sat, belief)
        if 1.0 - c_sat >= c_req:
            return Verdict(Decision.REJECT, i, c_sat, belief)
    return Verdict(Decision.INCONCLUSIVE, config.max_iterations, c_sat, belief)


def bv_verify(
    state,
    model_uncertainty: BetaPosterior,
    model: SimulationModel,
    plan,
    requirement,
    config: VerificationConfig,
    rng: np.random.Generator,
) -> Verdict:
    """Decide whether ``plan`` subjectively satisfies ``requirement``.

    ``model_uncertainty`` is the belief over the domain parameter; a fresh
    parameter is drawn from it for every simulation run, so outcomes are
    distributed according to the satisfaction function averaged over that
    belief.
    """
    if not isinstance(config, VerificationConfig):
        raise TypeError("config must be a VerificationConfig")
    return _run(lambda: model_uncertainty.sample(rng), state, model, plan, requirement, config, rng)


def mle_verify(
    state,
    observations: ObservationSummary,
    model: SimulationModel,
    plan,
    requirement,
    config: VerificationConfig,
    rng: np.random.Generator,
) -> Verdict:
    """Baseline: same loop, with the parameter pinned to failures / count."""
    if not isinstance(config, VerificationConfig):
        raise TypeError("config must be a VerificationConfig")
    if observations.count <= 0:
        raise ValueError("MLE variant needs at least one observation")
    theta = observations.mle
    return _run(lambda: theta, state, model, plan, requirement, config, rng)


@dataclass(frozen=True)
class SatisfactionEstimate:
    p_sat: float
    standard_error: float
    n: int


def subjective_satisfaction_estimate(
    model_uncertainty: BetaPosterior,
    model: SimulationModel,
    state,
    plan,
    requirement,
    n: int,
    rng: np.random.Generator,
) -> SatisfactionEstimate:
    """Monte Carlo estimate of satisfaction averaged over the parameter belief.

    Draws ``n`` parameters from ``model_uncertainty`` and simulates once per
    draw. Models exposing ``simulate_thetas`` are run as one vectorised batch.
    Returns the sample mean and its binomial standard error.
    """
    if n < 1:
        raise ValueError("n must be positive")
    thetas = sample_many(model_uncertainty, n, rng)
    batch = getattr(model, "simulate_thetas", None)
    if batch is not None:
        hits = int(np.count_nonzero(batch(state, plan, requirement, thetas, rng)))
    else:
        hits = sum(bool(model.simulate(state, plan, requirement, float(t), rng)) for t in thetas)
    p = hits / n
    return SatisfactionEstimate(p, math.sqrt(p * (1.0 - p) / n), n)
