"""A small error-rate experiment with cumulative type I / type II curves.

Runs 100 random situations (the full study uses 500; see ``bayesverify
experiment``) and prints the final counts per variant against the
linear 5% bound. Pass ``--plot`` to draw the curves with matplotlib if it
is installed.
"""
import sys

from bayesverify.harness import ExperimentConfig, accumulate_errors, run_experiment, summarize

config = ExperimentConfig(num_situations=100, ground_truth_runs=5000)
records = run_experiment(config)
curves = accumulate_errors(records)
summary = summarize(records, config)

print(f"99% envelope for a 5% error rate over {config.num_situations} situations: {summary['envelope_count']}")
for variant, c in curves.items():
    print(f"{variant:>3}: type I {c.type_i[-1]:3d}  type II {c.type_ii[-1]:3d}  (5% line ends at {c.bound[-1]:.0f})")

if "--plot" in sys.argv:
    import matplotlib.pyplot as plt

    for variant, c in curves.items():
        plt.plot(c.type_i, label=f"{variant} type I")
        plt.plot(c.type_ii, label=f"{variant} type II")
    plt.plot(next(iter(curves.values())).bound, "k--", label="5% bound")
    plt.xlabel("situations")
    plt.ylabel("cumulative errors")
    plt.legend()
    plt.show()
