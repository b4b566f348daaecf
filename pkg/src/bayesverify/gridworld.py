"""Obstacle grid world with unreliable moves.

Each move of a plan fails with probability ``p_fail``; a failed move is
replaced by its inverse (failing Up moves Down). Moves that would leave the
grid are no-ops. The agent may enter obstacle cells; every trace step that
ends on an obstacle counts as a hit.

Coordinates are ``(x, y)`` with ``0 <= x < width`` and ``0 <= y < height``.
Up increases ``y``, Right increases ``x``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .posterior import ObservationSummary

__all__ = [
    "Move",
    "GridWorld",
    "Plan",
    "Requirement",
    "Trace",
    "GridModel",
    "generate_world",
    "random_plan",
    "execute_plan",
    "requirement_holds",
    "observe_failures",
    "simulate_batch",
]

Cell = tuple[int, int]


class Move(enum.Enum):
    UP = "U"
    DOWN = "D"
    LEFT = "L"
    RIGHT = "R"

    @property
    def delta(self) -> Cell:
        return _DELTAS[self]

    @property
    def inverse(self) -> "Move":
        return _INVERSES[self]


_DELTAS = {Move.UP: (0, 1), Move.DOWN: (0, -1), Move.LEFT: (-1, 0), Move.RIGHT: (1, 0)}
_INVERSES = {Move.UP: Move.DOWN, Move.DOWN: Move.UP, Move.LEFT: Move.RIGHT, Move.RIGHT: Move.LEFT}
_MOVES = tuple(Move)


@dataclass(frozen=True)
class GridWorld:
    width: int
    height: int
    obstacles: frozenset[Cell] = frozenset()
    start: Cell = (0, 0)
    # obstacle lookup indexed [x, y]
    mask: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError(f"grid dimensions must be positive, got {self.width}x{self.height}")
        object.__setattr__(self, "obstacles", frozenset(tuple(c) for c in self.obstacles))
        object.__setattr__(self, "start", tuple(self.start))
        if not self.in_bounds(self.start):
            raise ValueError(f"start {self.start} outside the grid")
        if self.start in self.obstacles:
            raise ValueError("start cell cannot be an obstacle")
        mask = np.zeros((self.width, self.height), dtype=bool)
        for c in self.obstacles:
            if not self.in_bounds(c):
                raise ValueError(f"obstacle {c} outside the grid")
            mask[c] = True
        mask.setflags(write=False)
        object.__setattr__(self, "mask", mask)

    def in_bounds(self, cell: Cell) -> bool:
        x, y = cell
        return 0 <= x < self.width and 0 <= y < self.height

    def step(self, cell: Cell, move: Move) -> Cell:
        dx, dy = move.delta
        nxt = (cell[0] + dx, cell[1] + dy)
        return nxt if self.in_bounds(nxt) else cell


@dataclass(frozen=True)
class Plan:
    moves: tuple[Move, ...]

    def __post_init__(self):
        object.__setattr__(self, "moves", tuple(Move(m) for m in self.moves))
        if not self.moves:
            raise ValueError("a plan needs at least one move")

    def __len__(self) -> int:
        return len(self.moves)

    def __str__(self) -> str:
        return "".join(m.value for m in self.moves)


@dataclass(frozen=True)
class Requirement:
    """Trace predicate: fewer than ``max_hits_exclusive`` obstacle hits."""

    max_hits_exclusive: int = 3

    def __post_init__(self):
        if int(self.max_hits_exclusive) != self.max_hits_exclusive or self.max_hits_exclusive < 1:
            raise ValueError(f"hit bound must be a positive integer, got {self.max_hits_exclusive}")

    def __str__(self) -> str:
        return f"hits<{self.max_hits_exclusive}"


@dataclass(frozen=True)
class Trace:
    cells: tuple[Cell, ...]
    hit_count: int


def generate_world(width: int, height: int, ratio: float, rng: np.random.Generator) -> GridWorld:
    """Random world with the agent at (0, 0) and round(ratio * (cells - 1)) obstacles."""
    if width < 1 or height < 1 or width * height < 2:
        raise ValueError(f"need at least two cells, got {width}x{height}")
    if not 0.0 <= ratio < 1.0:
        raise ValueError(f"obstacle ratio must lie in [0, 1), got {ratio}")
    free = width * height - 1
    count = int(math.floor(ratio * free + 0.5))
    # flat index i -> cell (i // height, i % height); index 0 is the start
    picks = rng.choice(free, size=count, replace=False) + 1
    obstacles = frozenset((int(i) // height, int(i) % height) for i in picks)
    return GridWorld(width, height, obstacles, (0, 0))


def random_plan(length: int, rng: np.random.Generator) -> Plan:
    if length < 1:
        raise ValueError("plan length must be positive")
    return Plan(tuple(_MOVES[i] for i in rng.integers(0, 4, size=length)))


def execute_plan(world: GridWorld, plan: Plan, theta: float, rng: np.random.Generator) -> Trace:
    """Run ``plan`` once with move-failure probability ``theta``."""
    if not 0.0 <= theta <= 1.0:
        raise ValueError(f"failure probability must lie in [0, 1], got {theta}")
    failed = _failures(len(plan), theta, rng)
    cell = world.start
    cells = [cell]
    hits = 0
    for move, fail in zip(plan.moves, failed):
        cell = world.step(cell, move.inverse if fail else move)
        cells.append(cell)
        if cell in world.obstacles:
            hits += 1
    return Trace(tuple(cells), hits)


def _failures(n: int, theta: float, rng: np.random.Generator):
    if theta == 0.0:
        return (False,) * n
    if theta == 1.0:
        return (True,) * n
    return (rng.random(n) < theta).tolist()


def requirement_holds(trace: Trace, req: Requirement) -> bool:
    return trace.hit_count < req.max_hits_exclusive


def observe_failures(p_fail_true: float, n: int, rng: np.random.Generator) -> ObservationSummary:
    """``n`` Bernoulli(p_fail_true) observations of whether a move failed."""
    if n < 1:
        raise ValueError("need at least one observation")
    if not 0.0 <= p_fail_true <= 1.0:
        raise ValueError(f"failure probability must lie in [0, 1], got {p_fail_true}")
    return ObservationSummary(int(np.count_nonzero(rng.random(n) < p_fail_true)), n)


def simulate_batch(
    world: GridWorld, plan: Plan, requirement: Requirement, theta: float, n: int, rng: np.random.Generator
) -> np.ndarray:
    """Satisfaction outcomes of ``n`` independent runs, vectorised over runs.

    ``theta`` is either one failure probability shared by all runs or an
    array with one value per run.
    """
    theta = np.asarray(theta, dtype=float)
    if np.any(theta < 0.0) or np.any(theta > 1.0):
        raise ValueError("failure probabilities must lie in [0, 1]")
    if theta.ndim:
        theta = theta[:, None]
    failed = rng.random((n, len(plan))) < theta
    x = np.full(n, world.start[0], dtype=np.int64)
    y = np.full(n, world.start[1], dtype=np.int64)
    hits = np.zeros(n, dtype=np.int64)
    for k, move in enumerate(plan.moves):
        dx, dy = move.delta
        sign = np.where(failed[:, k], -1, 1)
        x = np.clip(x + sign * dx, 0, world.width - 1)
        y = np.clip(y + sign * dy, 0, world.height - 1)
        hits += world.mask[x, y]
    return hits < requirement.max_hits_exclusive


class GridModel:
    """Simulation model for the grid world: one run, then the hit-count predicate."""

    def simulate(
        self, state: GridWorld, plan: Plan, requirement: Requirement, theta: float, rng: np.random.Generator
    ) -> bool:
        return requirement_holds(execute_plan(state, plan, theta, rng), requirement)

    def simulate_many(
        self, state: GridWorld, plan: Plan, requirement: Requirement, theta: float, n: int, rng: np.random.Generator
    ) -> np.ndarray:
        return simulate_batch(state, plan, requirement, theta, n, rng)

    def simulate_thetas(self, state, plan, requirement, thetas, rng) -> np.ndarray:
        return simulate_batch(state, plan, requirement, thetas, len(thetas), rng)
