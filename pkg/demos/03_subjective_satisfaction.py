"""Subjective satisfaction: averaging the satisfaction probability over the belief.

For a toy model where a run satisfies the requirement with probability
1 - theta, the subjective satisfaction under Beta(3, 9) is 1 - E[theta] = 0.75.
The grid-world estimate for a real plan is shown next to the objective
value computed with a known failure probability.
"""
import numpy as np

from bayesverify import (
    BernoulliModel,
    BetaPosterior,
    GridModel,
    Requirement,
    generate_world,
    ground_truth_psat,
    random_plan,
    subjective_satisfaction_estimate,
)

rng = np.random.default_rng(0)
est = subjective_satisfaction_estimate(
    BetaPosterior(3, 9), BernoulliModel(lambda t: 1.0 - t), None, None, None, 100_000, rng
)
print(f"toy model: p_sat = {est.p_sat:.4f} +/- {est.standard_error:.4f} (exact 0.75)")

world = generate_world(10, 10, 0.2, rng)
plan = random_plan(10, rng)
req = Requirement(3)
subjective = subjective_satisfaction_estimate(BetaPosterior(3, 9), GridModel(), world, plan, req, 20_000, rng)
objective = ground_truth_psat(world, plan, req, 0.2, 20_000, rng)
print(f"grid plan {plan}: subjective {subjective.p_sat:.4f}, objective at theta=0.2 {objective.p_sat_hat:.4f}")
