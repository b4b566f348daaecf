"""Bayesian verification of plans under an uncertain, learned domain model."""
from .gridworld import (
    GridModel,
    GridWorld,
    Move,
    Plan,
    Requirement,
    Trace,
    execute_plan,
    generate_world,
    observe_failures,
    random_plan,
    requirement_holds,
)
from .oracle import ErrorClass, GroundTruth, classify, ground_truth_psat
from .posterior import (
    UNIFORM,
    BetaPosterior,
    ObservationSummary,
    mass_above,
    regularized_incomplete_beta,
    sample,
    update,
)
from .verify import (
    BernoulliModel,
    Decision,
    SimulationModel,
    Verdict,
    VerificationConfig,
    bv_verify,
    mle_verify,
    subjective_satisfaction_estimate,
)

__version__ = "0.1.0"
