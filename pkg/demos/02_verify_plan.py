"""Verifying one plan in one grid world with both BV and the MLE variant.

BV draws a fresh failure probability from the belief for every simulated
run, while the MLE variant pins it to the observed frequency. With only ten
observations the two can disagree.
"""
import numpy as np

from bayesverify import (
    GridModel,
    Requirement,
    VerificationConfig,
    bv_verify,
    generate_world,
    mle_verify,
    observe_failures,
    random_plan,
)
from bayesverify.cli import format_world

rng = np.random.default_rng(46)
world = generate_world(10, 10, 0.2, rng)
plan = random_plan(10, rng)
requirement = Requirement(3)
observations = observe_failures(0.25, 10, rng)

print(format_world(world), end="")
print(f"\nplan {plan}, requirement {requirement}, observed {observations.failures}/{observations.count} failures")

config = VerificationConfig(p_req=0.9, c_req=0.95)
model = GridModel()
bv = bv_verify(world, observations.posterior(), model, plan, requirement, config, np.random.default_rng(1))
mle = mle_verify(world, observations, model, plan, requirement, config, np.random.default_rng(1))
for name, v in (("BV", bv), ("MLE", mle)):
    print(f"{name:>3}: {v.decision.value} after {v.iterations} runs, c_sat={v.final_confidence:.4f}")
