"""Type I / type II error experiment over random grid-world situations.

Each situation draws a true failure probability uniformly from [0, 1], a
random world and plan, and a handful of observations of the failure
probability. Every enabled variant (``BV`` samples the parameter from the
learned belief, ``MLE`` pins it to the point estimate) then verifies the
plan, and its verdict is scored against a 10^4-run ground truth.

Situation ``i`` derives all of its randomness from ``(master_seed, i)``, so
records do not depend on execution order or on the number of workers.
"""
from __future__ import annotations

import csv
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .gridworld import (
    GridModel,
    Requirement,
    generate_world,
    observe_failures,
    random_plan,
    simulate_batch,
)
from .oracle import ErrorClass, GroundTruth, classify, ground_truth_psat, is_borderline
from .posterior import BetaPosterior, binomial_upper, sample_many
from .verify import Decision, VerificationConfig, Verdict, bv_verify, mle_verify

__all__ = [
    "VARIANTS",
    "GROUND_TRUTH_MODES",
    "ExperimentConfig",
    "ExperimentRecord",
    "ErrorCurves",
    "PRESETS",
    "CSV_COLUMNS",
    "situation_seed",
    "run_situation",
    "run_experiment",
    "accumulate_errors",
    "summarize",
    "gate_passes",
    "write_records",
    "read_records",
    "write_results",
    "subjective_ground_truth",
]

VARIANTS = ("BV", "MLE")
GROUND_TRUTH_MODES = ("subjective", "objective")

CSV_COLUMNS = (
    "situation",
    "seed",
    "p_fail_true",
    "obs_n",
    "obs_failures",
    "gt_psat",
    "gt_se",
    "borderline",
    "variant",
    "decision",
    "iterations",
    "final_confidence",
    "error_class",
)

# child streams of a situation seed, in spawn order
_P_FAIL, _WORLD, _PLAN, _OBS, _TRUTH, _BV, _MLE = range(7)


@dataclass(frozen=True)
class ExperimentConfig:
    """Experiment knobs; defaults reproduce the published setup.

    ``ground_truth`` selects what a verdict is scored against:
    ``"subjective"`` draws the failure probability from the learned belief
    for every ground-truth run, ``"objective"`` uses the true failure
    probability throughout.
    """

    num_situations: int = 500
    width: int = 10
    height: int = 10
    obstacle_ratio: float = 0.2
    plan_length: int = 10
    observations_n: int = 10
    hit_bound: int = 3
    p_req: float = 0.9
    c_req: float = 0.95
    ground_truth_runs: int = 10_000
    max_iterations: int = 100_000
    master_seed: int = 0
    variants: tuple[str, ...] = VARIANTS
    ground_truth: str = "subjective"

    def __post_init__(self):
        object.__setattr__(self, "variants", tuple(self.variants))
        if self.num_situations < 1:
            raise ValueError("num_situations must be positive")
        if self.width < 1 or self.height < 1 or self.width * self.height < 2:
            raise ValueError(f"grid must have at least two cells, got {self.width}x{self.height}")
        if not 0.0 <= self.obstacle_ratio < 1.0:
            raise ValueError("obstacle_ratio must lie in [0, 1)")
        if self.plan_length < 1 or self.observations_n < 1 or self.ground_truth_runs < 1:
            raise ValueError("plan_length, observations_n and ground_truth_runs must be positive")
        if self.master_seed < 0:
            raise ValueError("master_seed must be nonnegative")
        if not self.variants or any(v not in VARIANTS for v in self.variants) or len(set(self.variants)) != len(self.variants):
            raise ValueError(f"variants must be a nonempty subset of {VARIANTS}, got {self.variants}")
        if self.ground_truth not in GROUND_TRUTH_MODES:
            raise ValueError(f"ground_truth must be one of {GROUND_TRUTH_MODES}")
        Requirement(self.hit_bound)
        self.verification

    @property
    def verification(self) -> VerificationConfig:
        return VerificationConfig(self.p_req, self.c_req, self.max_iterations)

    @property
    def error_bound(self) -> float:
        return 1.0 - self.c_req


PRESETS = {f"obs{n}": ExperimentConfig(observations_n=n) for n in (5, 10, 50, 500)}


@dataclass(frozen=True)
class ExperimentRecord:
    situation: int
    seed: int
    p_fail_true: float | None
    obs_n: int
    obs_failures: int
    gt_psat: float | None
    gt_se: float | None
    borderline: bool | None
    variant: str
    decision: Decision
    iterations: int
    final_confidence: float
    error_class: ErrorClass | None


def situation_seed(master_seed: int, index: int) -> int:
    return int(np.random.SeedSequence([master_seed, index]).generate_state(1)[0])


def subjective_ground_truth(world, plan, requirement, belief: BetaPosterior, runs: int, rng) -> GroundTruth:
    """Satisfaction frequency when every run draws its own parameter from ``belief``."""
    thetas = sample_many(belief, runs, rng)
    sat = simulate_batch(world, plan, requirement, thetas, runs, rng)
    return GroundTruth.from_counts(int(np.count_nonzero(sat)), runs)


def run_situation(config: ExperimentConfig, index: int) -> list[ExperimentRecord]:
    seed = situation_seed(config.master_seed, index)
    streams = [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(7)]
    p_fail = float(streams[_P_FAIL].random())
    world = generate_world(config.width, config.height, config.obstacle_ratio, streams[_WORLD])
    plan = random_plan(config.plan_length, streams[_PLAN])
    obs = observe_failures(p_fail, config.observations_n, streams[_OBS])
    belief = obs.posterior()
    req = Requirement(config.hit_bound)
    model = GridModel()
    vcfg = config.verification

    if config.ground_truth == "subjective":
        truth = subjective_ground_truth(world, plan, req, belief, config.ground_truth_runs, streams[_TRUTH])
    else:
        truth = ground_truth_psat(world, plan, req, p_fail, config.ground_truth_runs, streams[_TRUTH])
    borderline = is_borderline(truth, config.p_req)

    records = []
    for variant in config.variants:
        if variant == "BV":
            verdict = bv_verify(world, belief, model, plan, req, vcfg, streams[_BV])
        else:
            verdict = mle_verify(world, obs, model, plan, req, vcfg, streams[_MLE])
        records.append(_record(index, seed, p_fail, obs, truth, borderline, variant, verdict, config.p_req))
    return records


def _record(index, seed, p_fail, obs, truth, borderline, variant, verdict: Verdict, p_req) -> ExperimentRecord:
    return ExperimentRecord(
        situation=index,
        seed=seed,
        p_fail_true=p_fail,
        obs_n=obs.count,
        obs_failures=obs.failures,
        gt_psat=truth.p_sat_hat,
        gt_se=truth.standard_error,
        borderline=borderline,
        variant=variant,
        decision=verdict.decision,
        iterations=verdict.iterations,
        final_confidence=verdict.final_confidence,
        error_class=classify(verdict, truth, p_req),
    )


def _run_one(args):
    config, index = args
    try:
        return run_situation(config, index)
    except Exception as exc:
        raise RuntimeError(f"situation {index} (master_seed={config.master_seed}) failed: {exc}") from exc


def run_experiment(
    config: ExperimentConfig, workers: int = 1, indices: Iterable[int] | None = None
) -> list[ExperimentRecord]:
    """Run every situation (or just ``indices``) and return records in situation order."""
    idx = list(range(config.num_situations)) if indices is None else sorted(indices)
    jobs = [(config, i) for i in idx]
    if workers <= 1:
        chunks = map(_run_one, jobs)
        return [r for chunk in chunks for r in chunk]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        chunks = pool.map(_run_one, jobs, chunksize=max(1, len(jobs) // (4 * workers)))
        return [r for chunk in chunks for r in chunk]


@dataclass(frozen=True)
class ErrorCurves:
    """Running error counts, one entry per scored situation."""

    type_i: tuple[int, ...]
    type_ii: tuple[int, ...]
    bound: tuple[float, ...]


def accumulate_errors(records: Sequence[ExperimentRecord], bound_rate: float = 0.05) -> dict[str, ErrorCurves]:
    curves: dict[str, ErrorCurves] = {}
    by_variant: dict[str, list[ExperimentRecord]] = {}
    for r in records:
        by_variant.setdefault(r.variant, []).append(r)
    for variant, recs in by_variant.items():
        recs.sort(key=lambda r: r.situation)
        t1, t2 = np.zeros(len(recs), dtype=int), np.zeros(len(recs), dtype=int)
        for k, r in enumerate(recs):
            t1[k] = r.error_class is ErrorClass.TYPE_I
            t2[k] = r.error_class is ErrorClass.TYPE_II
        curves[variant] = ErrorCurves(
            tuple(int(v) for v in np.cumsum(t1)),
            tuple(int(v) for v in np.cumsum(t2)),
            tuple(bound_rate * (k + 1) for k in range(len(recs))),
        )
    return curves


def summarize(records: Sequence[ExperimentRecord], config: ExperimentConfig) -> dict[str, object]:
    """Per-variant error counts and rates plus the BV gate verdict.

    Rates are final cumulative counts over the number of situations; the
    envelope is the 99% binomial quantile for a true error rate of
    ``1 - c_req``.
    """
    out: dict[str, object] = {
        "situations": config.num_situations,
        "observations_n": config.observations_n,
        "ground_truth": config.ground_truth,
        "ground_truth_runs": config.ground_truth_runs,
        "master_seed": config.master_seed,
        "p_req": config.p_req,
        "c_req": config.c_req,
        "bound": round(config.error_bound, 12),
    }
    n = config.num_situations
    envelope = binomial_upper(n, config.error_bound, 0.99)
    out["envelope_count"] = envelope
    out["envelope_rate"] = envelope / n
    for variant in config.variants:
        recs = [r for r in records if r.variant == variant]
        t1 = sum(r.error_class is ErrorClass.TYPE_I for r in recs)
        t2 = sum(r.error_class is ErrorClass.TYPE_II for r in recs)
        inc = sum(r.decision is Decision.INCONCLUSIVE for r in recs)
        key = variant.lower()
        out[f"{key}.type_i_count"] = t1
        out[f"{key}.type_ii_count"] = t2
        out[f"{key}.type_i_rate"] = t1 / n
        out[f"{key}.type_ii_rate"] = t2 / n
        out[f"{key}.inconclusive"] = inc
        out[f"{key}.borderline"] = sum(bool(r.borderline) for r in recs)
        out[f"{key}.mean_iterations"] = float(np.mean([r.iterations for r in recs])) if recs else 0.0
        out[f"{key}.within_envelope"] = t1 <= envelope and t2 <= envelope
    out["gate"] = "pass" if gate_passes(out) else "fail"
    return out


def gate_passes(summary: dict[str, object]) -> bool:
    # the gate concerns BV only; without a BV run there is nothing to hold
    return bool(summary.get("bv.within_envelope", True))


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (Decision, ErrorClass)):
        return value.value
    return str(value)


def write_records(records: Iterable[ExperimentRecord], path) -> Path:
    path = Path(path)
    try:
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CSV_COLUMNS)
            for r in records:
                writer.writerow([_fmt(getattr(r, c)) for c in CSV_COLUMNS])
    except OSError as exc:
        raise OSError(f"cannot write records to {path}: {exc}") from exc
    return path


def _opt(conv):
    return lambda s: None if s == "" else conv(s)


def _bool(s: str) -> bool:
    if s not in ("true", "false"):
        raise ValueError(f"expected true/false, got {s!r}")
    return s == "true"


_PARSERS = {
    "situation": int,
    "seed": int,
    "p_fail_true": _opt(float),
    "obs_n": int,
    "obs_failures": int,
    "gt_psat": _opt(float),
    "gt_se": _opt(float),
    "borderline": _opt(_bool),
    "variant": str,
    "decision": Decision,
    "iterations": int,
    "final_confidence": float,
    "error_class": _opt(ErrorClass),
}


def read_records(path) -> list[ExperimentRecord]:
    path = Path(path)
    try:
        with path.open(newline="") as fh:
            reader = csv.DictReader(fh)
            if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
                raise ValueError(f"{path}: unexpected columns {reader.fieldnames}")
            return [ExperimentRecord(**{k: _PARSERS[k](row[k]) for k in CSV_COLUMNS}) for row in reader]
    except OSError as exc:
        raise OSError(f"cannot read records from {path}: {exc}") from exc


def write_results(records: Sequence[ExperimentRecord], out_dir, config: ExperimentConfig) -> dict[str, object]:
    """Persist records.csv, summary.txt and per-curve series under ``out_dir``."""
    out_dir = Path(out_dir)
    curve_dir = out_dir / "curves"
    try:
        curve_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out_dir}: {exc}") from exc
    write_records(records, out_dir / "records.csv")
    summary = summarize(records, config)
    _write_text(out_dir / "summary.txt", "".join(f"{k}={_fmt(v)}\n" for k, v in summary.items()))
    curves = accumulate_errors(records, config.error_bound)
    for variant, c in curves.items():
        for name, series in (("type_i", c.type_i), ("type_ii", c.type_ii)):
            _write_series(curve_dir / f"{variant.lower()}_{name}.csv", series)
    n = config.num_situations
    _write_series(curve_dir / "bound.csv", [config.error_bound * (k + 1) for k in range(n)])
    return summary


def _write_series(path: Path, values) -> None:
    _write_text(path, "index,count\n" + "".join(f"{k + 1},{_fmt(v)}\n" for k, v in enumerate(values)))


def _write_text(path: Path, text: str) -> None:
    try:
        path.write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
