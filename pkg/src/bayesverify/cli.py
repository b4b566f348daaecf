"""Command-line interface: ``bayesverify {verify,experiment,oracle}``.

Text formats
------------
plan          string over ``UDLR``, one character per move
requirement   ``hits<K`` with K a positive integer
world         rows of ``.`` (free), ``#`` (obstacle), ``S`` (start); the
              first row is y = 0. Inline worlds may separate rows with ``/``.
observations  ``failures/total`` or a raw sequence of ``S``/``F`` characters

Exit codes: ``verify`` returns 0 on Accept, 10 on Reject, 20 on
Inconclusive; ``experiment`` returns 0 iff the BV error gate passes, 1
otherwise; usage errors return 2.
"""
from __future__ import annotations

import argparse
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .gridworld import GridModel, GridWorld, Plan, Requirement, generate_world
from .harness import (
    GROUND_TRUTH_MODES,
    PRESETS,
    VARIANTS,
    ExperimentConfig,
    ExperimentRecord,
    run_experiment,
    summarize,
    write_records,
    write_results,
)
from .oracle import ground_truth_psat
from .posterior import ObservationSummary
from .verify import Decision, VerificationConfig, Verdict, bv_verify, mle_verify

__all__ = [
    "CommandSpec",
    "parse_args",
    "parse_plan",
    "parse_requirement",
    "parse_observations",
    "parse_world",
    "format_world",
    "format_verdict",
    "main",
    "EXIT_CODES",
    "DEFAULT_SEED",
]

DEFAULT_SEED = 0
EXIT_CODES = {Decision.ACCEPT: 0, Decision.REJECT: 10, Decision.INCONCLUSIVE: 20}
_WORLD_CHARS = set(".#S")


class ParseError(ValueError):
    pass


def parse_plan(text: str) -> Plan:
    if not text:
        raise ParseError("plan is empty")
    for i, ch in enumerate(text):
        if ch not in "UDLR":
            raise ParseError(f"invalid plan character {ch!r} at position {i} (allowed: U, D, L, R)")
    return Plan(tuple(text))


def parse_requirement(text: str) -> Requirement:
    m = re.fullmatch(r"\s*hits\s*<\s*(-?\d+)\s*", text)
    if not m:
        raise ParseError(f"invalid requirement {text!r} (expected hits<K)")
    k = int(m.group(1))
    if k < 1:
        raise ParseError(f"requirement bound K must be >= 1, got {k}")
    return Requirement(k)


def parse_observations(text: str) -> ObservationSummary:
    m = re.fullmatch(r"\s*(\d+)\s*/\s*(\d+)\s*", text)
    if m:
        failures, total = int(m.group(1)), int(m.group(2))
        if total < 1:
            raise ParseError("observation total must be >= 1")
        if failures > total:
            raise ParseError(f"more failures than observations: {failures}/{total}")
        return ObservationSummary(failures, total)
    if text and set(text) <= {"S", "F"}:
        return ObservationSummary.from_sequence(ch == "F" for ch in text)
    raise ParseError(f"invalid observations {text!r} (expected failures/total or a string of S/F)")


def parse_world(text: str) -> GridWorld:
    rows = [r.rstrip("\r") for r in text.strip("\n").split("\n")]
    if len(rows) == 1 and "/" in rows[0]:
        rows = rows[0].split("/")
    if not rows or not rows[0]:
        raise ParseError("world is empty")
    width = len(rows[0])
    starts = []
    obstacles = set()
    for y, row in enumerate(rows):
        if len(row) != width:
            raise ParseError(f"ragged world: row {y} has length {len(row)}, expected {width}")
        for x, ch in enumerate(row):
            if ch not in _WORLD_CHARS:
                raise ParseError(f"invalid world character {ch!r} at row {y}, column {x}")
            if ch == "S":
                starts.append((x, y))
            elif ch == "#":
                obstacles.add((x, y))
    if len(starts) != 1:
        raise ParseError(f"world needs exactly one 'S', found {len(starts)}")
    return GridWorld(width, len(rows), frozenset(obstacles), starts[0])


def format_world(world: GridWorld) -> str:
    lines = []
    for y in range(world.height):
        row = []
        for x in range(world.width):
            if (x, y) == world.start:
                row.append("S")
            elif (x, y) in world.obstacles:
                row.append("#")
            else:
                row.append(".")
        lines.append("".join(row))
    return "\n".join(lines) + "\n"


def _load_world(value: str) -> GridWorld:
    inline = value.replace("/", "").replace("\n", "")
    if inline and set(inline) <= _WORLD_CHARS:
        return parse_world(value)
    path = Path(value)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"cannot read world file {value!r}: {exc.strerror or exc}") from exc
    return parse_world(text)


def _gen_world(value: str, seed: int) -> GridWorld:
    m = re.fullmatch(r"(\d+)x(\d+)(?::([0-9.eE+-]+))?", value)
    if not m:
        raise ParseError(f"invalid --gen-world {value!r} (expected WxH or WxH:ratio)")
    w, h = int(m.group(1)), int(m.group(2))
    ratio = float(m.group(3)) if m.group(3) else 0.2
    try:
        return generate_world(w, h, ratio, np.random.default_rng(seed))
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


def _probability(name: str):
    def conv(text: str) -> float:
        try:
            v = float(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} must be a number, got {text!r}")
        if not 0.0 < v < 1.0:
            raise argparse.ArgumentTypeError(f"{name} must lie strictly between 0 and 1, got {text}")
        return v

    return conv


def _unit_interval(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}")
    if not 0.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError(f"value must lie in [0, 1], got {text}")
    return v


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _nonneg_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {text!r}")
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {text}")
    return v


def _wrap(fn):
    def conv(text):
        try:
            return fn(text)
        except ParseError as exc:
            raise argparse.ArgumentTypeError(str(exc))

    conv.__name__ = fn.__name__
    return conv


def _variants(text: str) -> tuple[str, ...]:
    names = tuple(v.strip().upper() for v in text.split(",") if v.strip())
    bad = [v for v in names if v not in VARIANTS]
    if not names or bad:
        raise argparse.ArgumentTypeError(f"variants must be a comma list over {', '.join(VARIANTS)}, got {text!r}")
    return tuple(dict.fromkeys(names))


def _add_world_args(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--world", help="world file, or inline rows separated by '/'")
    g.add_argument("--gen-world", metavar="WxH[:RATIO]", help="generate a random world (start at (0,0))")
    p.add_argument("--world-seed", type=_nonneg_int, default=DEFAULT_SEED, help="seed for --gen-world")
    p.add_argument("--plan", required=True, type=_wrap(parse_plan), help="moves over U, D, L, R")
    p.add_argument("--req", required=True, type=_wrap(parse_requirement), help="requirement, e.g. hits<3")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bayesverify", description="Bayesian verification under model uncertainty")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    v = sub.add_parser("verify", help="verify one plan in one world")
    _add_world_args(v)
    v.add_argument("--obs", required=True, type=_wrap(parse_observations), help="failures/total or S/F string")
    v.add_argument("--p-req", required=True, type=_probability("--p-req"))
    v.add_argument("--c-req", required=True, type=_probability("--c-req"))
    v.add_argument("--mle", action="store_true", help="pin the failure probability to its point estimate")
    v.add_argument("--seed", type=_nonneg_int, default=DEFAULT_SEED)
    v.add_argument("--max-iters", type=_positive_int, default=100_000)
    v.add_argument("--out", help="write the verdict as a one-row records CSV")

    d = ExperimentConfig()
    e = sub.add_parser("experiment", help="run the type I / type II error experiment")
    e.add_argument("--preset", choices=sorted(PRESETS), help="start from a preset configuration")
    e.add_argument("--situations", type=_positive_int)
    e.add_argument("--width", type=_positive_int)
    e.add_argument("--height", type=_positive_int)
    e.add_argument("--ratio", type=_unit_interval)
    e.add_argument("--plan-length", type=_positive_int)
    e.add_argument("--obs", type=_positive_int, help=f"observations per situation (default {d.observations_n})")
    e.add_argument("--hits", type=_positive_int, help=f"requirement bound K in hits<K (default {d.hit_bound})")
    e.add_argument("--p-req", type=_probability("--p-req"))
    e.add_argument("--c-req", type=_probability("--c-req"))
    e.add_argument("--gt-runs", type=_positive_int)
    e.add_argument("--max-iters", type=_positive_int)
    e.add_argument("--seed", type=_nonneg_int, help=f"master seed (default {d.master_seed})")
    e.add_argument("--variants", type=_variants)
    e.add_argument("--ground-truth", choices=GROUND_TRUTH_MODES)
    e.add_argument("--workers", type=_positive_int, default=1)
    e.add_argument("--out", help="output directory for records.csv, summary.txt and curves/")

    o = sub.add_parser("oracle", help="estimate the satisfaction probability under a known failure probability")
    _add_world_args(o)
    o.add_argument("--p-fail", required=True, type=_unit_interval)
    o.add_argument("--runs", type=_positive_int, default=10_000)
    o.add_argument("--seed", type=_nonneg_int, default=DEFAULT_SEED)
    return parser


@dataclass(frozen=True)
class CommandSpec:
    subcommand: str
    options: dict[str, Any] = field(default_factory=dict)

    def __getattr__(self, name):
        if name == "options":
            raise AttributeError(name)
        try:
            return self.options[name]
        except KeyError:
            raise AttributeError(name) from None


_EXPERIMENT_FLAGS = {
    "situations": "num_situations",
    "width": "width",
    "height": "height",
    "ratio": "obstacle_ratio",
    "plan_length": "plan_length",
    "obs": "observations_n",
    "hits": "hit_bound",
    "p_req": "p_req",
    "c_req": "c_req",
    "gt_runs": "ground_truth_runs",
    "max_iters": "max_iterations",
    "seed": "master_seed",
    "variants": "variants",
    "ground_truth": "ground_truth",
}


def parse_args(argv: Sequence[str] | None = None) -> CommandSpec:
    """Parse and validate ``argv``; usage errors exit with status 2."""
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        if ns.subcommand == "experiment":
            base = PRESETS[ns.preset] if ns.preset else ExperimentConfig()
            changes = {dst: getattr(ns, src) for src, dst in _EXPERIMENT_FLAGS.items() if getattr(ns, src) is not None}
            config = ExperimentConfig(**{**base.__dict__, **changes})
            return CommandSpec("experiment", {"config": config, "workers": ns.workers, "out": ns.out})

        world = _gen_world(ns.gen_world, ns.world_seed) if ns.gen_world else _load_world(ns.world)
        common = {"world": world, "plan": ns.plan, "requirement": ns.req, "seed": ns.seed}
        if ns.subcommand == "oracle":
            return CommandSpec("oracle", {**common, "p_fail": ns.p_fail, "runs": ns.runs})
        config = VerificationConfig(ns.p_req, ns.c_req, ns.max_iters)
        return CommandSpec(
            "verify",
            {
                **common,
                "observations": ns.obs,
                "model_uncertainty": ns.obs.posterior(),
                "config": config,
                "mle": ns.mle,
                "out": ns.out,
            },
        )
    except (ParseError, ValueError) as exc:
        parser.error(str(exc))


def format_verdict(verdict: Verdict, config: VerificationConfig) -> str:
    belief = verdict.final_belief
    head = {
        Decision.ACCEPT: "ACCEPT",
        Decision.REJECT: "REJECT",
        Decision.INCONCLUSIVE: "INCONCLUSIVE",
    }[verdict.decision]
    text = (
        f"{head} after {verdict.iterations} iterations: "
        f"c_sat={verdict.final_confidence:.6f} (p_req={config.p_req}, c_req={config.c_req}), "
        f"belief Beta({belief.a:g}, {belief.b:g})"
    )
    if verdict.decision is Decision.INCONCLUSIVE:
        text += f"; iteration cap {config.max_iterations} reached"
    return text


def _cmd_verify(spec: CommandSpec) -> int:
    rng = np.random.default_rng(spec.seed)
    model = GridModel()
    if spec.mle:
        verdict = mle_verify(spec.world, spec.observations, model, spec.plan, spec.requirement, spec.config, rng)
    else:
        verdict = bv_verify(spec.world, spec.model_uncertainty, model, spec.plan, spec.requirement, spec.config, rng)
    print(format_verdict(verdict, spec.config))
    if spec.out:
        record = ExperimentRecord(
            situation=0,
            seed=spec.seed,
            p_fail_true=None,
            obs_n=spec.observations.count,
            obs_failures=spec.observations.failures,
            gt_psat=None,
            gt_se=None,
            borderline=None,
            variant="MLE" if spec.mle else "BV",
            decision=verdict.decision,
            iterations=verdict.iterations,
            final_confidence=verdict.final_confidence,
            error_class=None,
        )
        write_records([record], spec.out)
    return EXIT_CODES[verdict.decision]


def _cmd_experiment(spec: CommandSpec) -> int:
    config = spec.config
    records = run_experiment(config, workers=spec.workers)
    summary = write_results(records, spec.out, config) if spec.out else summarize(records, config)
    for key, value in summary.items():
        print(f"{key}={value}")
    return 0 if summary["gate"] == "pass" else 1


def _cmd_oracle(spec: CommandSpec) -> int:
    truth = ground_truth_psat(
        spec.world, spec.plan, spec.requirement, spec.p_fail, spec.runs, np.random.default_rng(spec.seed)
    )
    print(f"p_sat_hat={truth.p_sat_hat!r} standard_error={truth.standard_error!r} runs={truth.runs}")
    return 0


def main(argv: Sequence[str] | None = None) -> int:
    spec = parse_args(argv)
    try:
        return {"verify": _cmd_verify, "experiment": _cmd_experiment, "oracle": _cmd_oracle}[spec.subcommand](spec)
    except OSError as exc:
        print(f"bayesverify: error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
