import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bayesverify.gridworld import (
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
    simulate_batch,
)


class _NoRandom:
    """Stand-in generator that fails the test if touched."""

    def __getattr__(self, name):
        raise AssertionError(f"rng.{name} used")


def test_generate_world_default_setup():
    w = generate_world(10, 10, 0.2, np.random.default_rng(0))
    assert len(w.obstacles) == 20
    assert (0, 0) not in w.obstacles
    assert w.start == (0, 0)
    assert all(w.in_bounds(c) for c in w.obstacles)


def test_generate_world_zero_ratio():
    assert generate_world(2, 1, 0.0, np.random.default_rng(0)).obstacles == frozenset()


def test_generate_world_deterministic():
    a = generate_world(10, 10, 0.2, np.random.default_rng(9))
    b = generate_world(10, 10, 0.2, np.random.default_rng(9))
    assert a.obstacles == b.obstacles


@pytest.mark.parametrize("args", [(1, 1, 0.2), (0, 5, 0.2), (3, 3, 1.0), (3, 3, -0.1)])
def test_generate_world_rejects(args):
    with pytest.raises(ValueError):
        generate_world(*args, np.random.default_rng(0))


def test_world_validation():
    with pytest.raises(ValueError):
        GridWorld(3, 3, frozenset({(0, 0)}))
    with pytest.raises(ValueError):
        GridWorld(3, 3, frozenset({(3, 0)}))
    with pytest.raises(ValueError):
        GridWorld(3, 3, start=(5, 5))


def test_straight_walk_up():
    w = GridWorld(10, 10)
    trace = execute_plan(w, Plan("UUUUUUUUUU"), 0.0, _NoRandom())
    assert trace.cells[-1] == (0, 9)
    assert trace.hit_count == 0


def test_forced_failure_clamps_at_wall():
    w = GridWorld(10, 10)
    trace = execute_plan(w, Plan("U"), 1.0, _NoRandom())
    assert trace.cells == ((0, 0), (0, 0))


def test_half_failure_frequency():
    w = GridWorld(3, 3, start=(1, 1))
    rng = np.random.default_rng(4)
    n = 100_000
    up = sum(execute_plan(w, Plan("U"), 0.5, rng).cells[-1] == (1, 2) for _ in range(n))
    assert up / n == pytest.approx(0.5, abs=0.005)


def test_hits_counted_per_entry():
    # S # . : walking R, L, R enters the obstacle twice
    w = GridWorld(3, 1, frozenset({(1, 0)}))
    trace = execute_plan(w, Plan("RLR"), 0.0, _NoRandom())
    assert trace.cells == ((0, 0), (1, 0), (0, 0), (1, 0))
    assert trace.hit_count == 2


def test_wall_bump_on_obstacle_counts_again():
    w = GridWorld(2, 1, frozenset({(1, 0)}))
    trace = execute_plan(w, Plan("RR"), 0.0, _NoRandom())
    assert trace.cells == ((0, 0), (1, 0), (1, 0))
    assert trace.hit_count == 2


def test_straight_through_three_obstacles():
    w = GridWorld(1, 5, frozenset({(0, 1), (0, 2), (0, 3)}))
    trace = execute_plan(w, Plan("UUUU"), 0.0, _NoRandom())
    assert trace.hit_count == 3
    assert not requirement_holds(trace, Requirement(3))


@pytest.mark.parametrize("hits,bound,expected", [(2, 3, True), (3, 3, False), (0, 1, True)])
def test_requirement_holds(hits, bound, expected):
    assert requirement_holds(Trace(((0, 0),), hits), Requirement(bound)) is expected


def test_requirement_validation():
    with pytest.raises(ValueError):
        Requirement(0)
    assert str(Requirement(3)) == "hits<3"


def test_plan_roundtrip_and_validation():
    assert str(Plan("UDLR")) == "UDLR"
    assert Plan("UD").moves == (Move.UP, Move.DOWN)
    with pytest.raises(ValueError):
        Plan("")
    with pytest.raises(ValueError):
        Plan("UX")


def test_random_plan():
    p = random_plan(10, np.random.default_rng(0))
    assert len(p) == 10


def test_observe_failures_degenerate():
    rng = np.random.default_rng(0)
    assert observe_failures(0.0, 10, rng).failures == 0
    assert observe_failures(1.0, 10, rng).failures == 10


def test_observe_failures_frequency():
    obs = observe_failures(0.2, 100_000, np.random.default_rng(8))
    assert obs.count == 100_000
    assert obs.failures / obs.count == pytest.approx(0.2, abs=0.004)


def test_batch_agrees_with_single_runs():
    rng = np.random.default_rng(12)
    w = generate_world(6, 6, 0.3, rng)
    plan = random_plan(10, rng)
    req = Requirement(2)
    n = 20_000
    batch = simulate_batch(w, plan, req, 0.35, n, np.random.default_rng(1)).mean()
    single = np.mean([GridModel().simulate(w, plan, req, 0.35, rng) for _ in range(n)])
    se = np.sqrt(batch * (1 - batch) / n)
    assert abs(batch - single) < 4 * np.sqrt(2) * se + 1e-12


def test_batch_per_run_thetas():
    w = GridWorld(1, 3, frozenset({(0, 1)}))
    # theta 0: U enters the obstacle; theta 1: D bumps the wall and stays on start
    out = simulate_batch(w, Plan("U"), Requirement(1), np.array([0.0, 1.0, 0.0]), 3, np.random.default_rng(0))
    assert out.tolist() == [False, True, False]


def test_model_stationarity():
    rng = np.random.default_rng(21)
    w = generate_world(10, 10, 0.2, rng)
    plan = random_plan(10, rng)
    model = GridModel()
    outs = np.array([model.simulate(w, plan, Requirement(3), 0.4, rng) for _ in range(10_000)])
    a, b = outs[:5000].mean(), outs[5000:].mean()
    p = outs.mean()
    sigma = np.sqrt(2 * p * (1 - p) / 5000)
    assert abs(a - b) < 3 * sigma + 1e-12


worlds = st.builds(
    lambda w, h, seed, ratio: generate_world(w, h, ratio, np.random.default_rng(seed)),
    st.integers(1, 8),
    st.integers(2, 8),
    st.integers(0, 2**32 - 1),
    st.floats(0.0, 0.9),
)
plans = st.text(alphabet="UDLR", min_size=1, max_size=25).map(Plan)


@settings(max_examples=1000, deadline=None)
@given(world=worlds, plan=plans, theta=st.floats(0.0, 1.0), seed=st.integers(0, 2**32 - 1))
def test_fuzz_agent_stays_in_bounds(world, plan, theta, seed):
    trace = execute_plan(world, plan, theta, np.random.default_rng(seed))
    assert len(trace.cells) == len(plan) + 1
    assert all(world.in_bounds(c) for c in trace.cells)
    assert trace.hit_count == sum(c in world.obstacles for c in trace.cells[1:])


@settings(max_examples=200, deadline=None)
@given(world=worlds, plan=plans)
def test_zero_failure_is_pure(world, plan):
    assert execute_plan(world, plan, 0.0, _NoRandom()) == execute_plan(world, plan, 0.0, _NoRandom())
