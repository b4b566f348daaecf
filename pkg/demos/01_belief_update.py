"""Learning a Beta belief over an action-failure probability.

Ten observed moves, two of which failed, turn the uniform prior into
Beta(3, 9). The script prints how the belief and its mass above a few
thresholds evolve as the observations arrive.
"""
import numpy as np

from bayesverify import UNIFORM, ObservationSummary, mass_above, sample

observations = "SFSSSSSFSS"

belief = UNIFORM
for i, ch in enumerate(observations, 1):
    belief = belief.update(ch == "F")
    print(f"after {i:2d} moves: Beta({belief.a:g}, {belief.b:g})  mean={belief.mean:.3f}")

summary = ObservationSummary.from_sequence([c == "F" for c in observations])
assert summary.posterior() == belief
print(f"\nMLE failure probability: {summary.mle:.2f}")
for t in (0.1, 0.2, 0.4):
    print(f"P(theta > {t}) = {mass_above(belief, t):.4f}")

rng = np.random.default_rng(0)
draws = [sample(belief, rng) for _ in range(5)]
print("five plausible failure probabilities:", ", ".join(f"{d:.3f}" for d in draws))
