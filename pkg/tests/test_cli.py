import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bayesverify.cli import (
    EXIT_CODES,
    format_verdict,
    format_world,
    main,
    parse_args,
    parse_observations,
    parse_world,
)
from bayesverify.gridworld import GridWorld, generate_world
from bayesverify.harness import ExperimentConfig, read_records
from bayesverify.posterior import BetaPosterior, ObservationSummary
from bayesverify.verify import Decision, VerificationConfig, Verdict

WORLD = "S.../..#./..../...."
VERIFY = ["verify", "--world", WORLD, "--plan", "UUDDLRLRUU", "--req", "hits<3", "--obs", "2/10",
          "--p-req", "0.9", "--c-req", "0.95", "--seed", "7"]


def _usage_error(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        parse_args(argv)
    assert exc.value.code != 0
    return capsys.readouterr().err


def test_verify_spec():
    spec = parse_args(VERIFY)
    assert spec.subcommand == "verify"
    assert spec.model_uncertainty == BetaPosterior(3, 9)
    assert spec.config == VerificationConfig(0.9, 0.95)
    assert str(spec.plan) == "UUDDLRLRUU"
    assert spec.requirement.max_hits_exclusive == 3
    assert spec.seed == 7 and not spec.mle


def test_raw_observations_same_belief():
    assert parse_observations("SFSSSSSFSS") == parse_observations("2/10") == ObservationSummary(2, 10)


def test_bad_plan_character(capsys):
    argv = list(VERIFY)
    argv[argv.index("UUDDLRLRUU")] = "UUX"
    assert "'X'" in _usage_error(argv, capsys)


@pytest.mark.parametrize(
    "flag,value,needle",
    [
        ("--req", "hits<0", "K must be >= 1"),
        ("--req", "hits>3", "expected hits<K"),
        ("--p-req", "1.0", "--p-req must lie strictly between 0 and 1"),
        ("--c-req", "0", "--c-req must lie strictly between 0 and 1"),
        ("--c-req", "0.4", "c_req must lie in (0.5, 1)"),
        ("--obs", "11/10", "more failures than observations"),
        ("--obs", "0/0", "total must be >= 1"),
        ("--obs", "SXF", "invalid observations"),
        ("--world", "/no/such/world.txt", "cannot read world file"),
        ("--world", "S./.", "ragged world"),
        ("--world", "S./S.", "exactly one 'S'"),
    ],
)
def test_distinct_errors(flag, value, needle, capsys):
    argv = list(VERIFY)
    argv[argv.index(flag) + 1] = value
    assert needle in _usage_error(argv, capsys)


def test_unknown_flag(capsys):
    assert "unrecognized arguments" in _usage_error(VERIFY + ["--bogus"], capsys)


def test_experiment_defaults():
    spec = parse_args(["experiment"])
    assert spec.config == ExperimentConfig()
    assert spec.workers == 1


def test_experiment_flags_and_preset():
    spec = parse_args(["experiment", "--preset", "obs50", "--situations", "7", "--variants", "mle", "--seed", "3"])
    assert spec.config.observations_n == 50
    assert spec.config.num_situations == 7
    assert spec.config.variants == ("MLE",)
    assert spec.config.master_seed == 3


def test_parse_world_minimal():
    w = parse_world("S.\n.#")
    assert w.start == (0, 0)
    assert w.obstacles == frozenset({(1, 1)})
    assert (w.width, w.height) == (2, 2)


@pytest.mark.parametrize("text", ["S#\nS.", "..\n.#", "S.\n.", "S.\n.x"])
def test_parse_world_errors(text):
    with pytest.raises(ValueError):
        parse_world(text)


@settings(max_examples=100, deadline=None)
@given(w=st.integers(1, 12), h=st.integers(1, 12), ratio=st.floats(0, 0.9), seed=st.integers(0, 2**32 - 1))
def test_world_roundtrip(w, h, ratio, seed):
    if w * h < 2:
        return
    world = generate_world(w, h, ratio, np.random.default_rng(seed))
    text = format_world(world)
    assert parse_world(text) == world
    assert format_world(parse_world(text)) == text
    assert parse_world(text.replace("\n", "/").rstrip("/")) == world


def test_world_file(tmp_path):
    f = tmp_path / "w.txt"
    f.write_text(format_world(GridWorld(3, 2, frozenset({(2, 1)}))))
    argv = list(VERIFY)
    argv[argv.index(WORLD)] = str(f)
    assert parse_args(argv).world == GridWorld(3, 2, frozenset({(2, 1)}))


def test_verify_accept_output(capsys):
    code = main(VERIFY)
    out = capsys.readouterr().out
    assert code == 0
    assert "ACCEPT" in out and "28 iterations" in out


def test_verify_reject_exit_code(capsys):
    argv = ["verify", "--world", "S/#/#/#", "--plan", "DDD", "--req", "hits<3", "--obs", "0/10",
            "--p-req", "0.9", "--c-req", "0.95"]
    # Down from the top row... the start is (0,0) so Up walks through the obstacles
    argv[argv.index("DDD")] = "UUU"
    assert main(argv) == EXIT_CODES[Decision.REJECT] == 10
    assert "REJECT" in capsys.readouterr().out


def test_verify_inconclusive_exit_code(capsys):
    argv = VERIFY + ["--max-iters", "3"]
    assert main(argv) == 20
    out = capsys.readouterr().out
    assert "INCONCLUSIVE" in out and "cap 3" in out


def test_format_verdict_accept():
    cfg = VerificationConfig(0.9, 0.95)
    line = format_verdict(Verdict(Decision.ACCEPT, 28, 0.9529, BetaPosterior(29, 1)), cfg)
    assert "ACCEPT" in line and "28" in line and "0.9529" in line


def test_verify_out_roundtrip(tmp_path, capsys):
    out = tmp_path / "v.csv"
    main(VERIFY + ["--out", str(out), "--mle"])
    (rec,) = read_records(out)
    assert rec.variant == "MLE"
    assert rec.decision is Decision.ACCEPT
    assert rec.iterations == 28
    assert rec.final_confidence == pytest.approx(1 - 0.9**29)
    assert (rec.obs_failures, rec.obs_n) == (2, 10)


def test_verify_reproducible(capsys):
    argv = VERIFY[:]
    argv[argv.index("2/10")] = "5/10"
    argv[argv.index(WORLD)] = "S.#./.#../#..#/...."
    main(argv)
    first = capsys.readouterr().out
    main(argv)
    assert capsys.readouterr().out == first


def test_oracle_command(capsys):
    assert main(["oracle", "--world", "S/#", "--plan", "U", "--req", "hits<1", "--p-fail", "0", "--runs", "100"]) == 0
    assert "p_sat_hat=0.0" in capsys.readouterr().out


def test_gen_world_flag():
    spec = parse_args(["oracle", "--gen-world", "10x10:0.2", "--world-seed", "4", "--plan", "U", "--req", "hits<3",
                       "--p-fail", "0.3"])
    assert len(spec.world.obstacles) == 20


def test_experiment_command(tmp_path, capsys):
    out = tmp_path / "exp"
    code = main(["experiment", "--situations", "5", "--gt-runs", "500", "--out", str(out)])
    text = capsys.readouterr().out
    assert "gate=" in text
    assert code == (0 if "gate=pass" in text else 1)
    assert len(read_records(out / "records.csv")) == 10


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "bayesverify", "verify", "--help"], capture_output=True, text=True)
    assert r.returncode == 0 and "--p-req" in r.stdout


probs = st.one_of(st.floats(allow_nan=False, allow_infinity=False), st.text(max_size=5))


@settings(max_examples=300, deadline=None)
@given(p_req=probs, c_req=probs, k=st.integers(-5, 5))
def test_fuzz_flag_values(p_req, c_req, k):
    argv = list(VERIFY)
    argv[argv.index("--p-req") + 1] = str(p_req)
    argv[argv.index("--c-req") + 1] = str(c_req)
    argv[argv.index("--req") + 1] = f"hits<{k}"
    try:
        p, c = float(str(p_req)), float(str(c_req))
        valid = 0 < p < 1 and 0.5 < c < 1 and k >= 1
    except ValueError:
        valid = False
    if valid:
        spec = parse_args(argv)
        assert spec.config.p_req == p and spec.config.c_req == c
    else:
        with pytest.raises(SystemExit) as exc:
            parse_args(argv)
        assert exc.value.code == 2
