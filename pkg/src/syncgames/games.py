"""Synchronous games, question densities, and their conjunctive products.

A game couples a finite question set (shared by both players) with a finite
answer set and a 0/1 rule table.  ``allowed[x, y, a, b]`` says whether the
answer pair (a, b) wins when the referee asks the question pair (x, y).
Synchronicity means a repeated question must receive a single common answer.

Composite indices of product games are flattened row-major throughout: the
pair (i, j) drawn from ranges of size (n1, n2) becomes ``i * n2 + j``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import DensityNotNormalized, IndexOutOfRange, SynchronicityViolation

__all__ = [
    "Game",
    "Density",
    "new_game",
    "synchronicity_game",
    "product",
    "is_symmetric",
    "uniform_density",
    "product_density",
]


@dataclass(frozen=True, eq=False)
class Game:
    """A synchronous game on ``n_inputs`` questions and ``n_outputs`` answers.

    The rule table is a read-only boolean array of shape
    ``(n_inputs, n_inputs, n_outputs, n_outputs)``.  Construction rejects
    tables that allow differing answers to a repeated question.
    """

    n_inputs: int
    n_outputs: int
    allowed: np.ndarray

    def __post_init__(self) -> None:
        if self.n_inputs < 1 or self.n_outputs < 1:
            raise ValueError("a game needs at least one question and one answer")
        table = np.ascontiguousarray(self.allowed, dtype=bool)
        expected = (self.n_inputs, self.n_inputs, self.n_outputs, self.n_outputs)
        if table.shape != expected:
            raise ValueError(f"rule table has shape {table.shape}, expected {expected}")
        for x in range(self.n_inputs):
            bad = table[x, x] & ~np.eye(self.n_outputs, dtype=bool)
            if bad.any():
                a, b = map(int, np.argwhere(bad)[0])
                raise SynchronicityViolation(
                    f"answers ({a}, {b}) allowed on repeated question {x}"
                )
        table.flags.writeable = False
        object.__setattr__(self, "allowed", table)

    def winning_pairs(self, x: int, y: int) -> tuple[tuple[int, int], ...]:
        """Answer pairs (a, b) allowed on the question pair (x, y), sorted."""
        self._check_inputs(x, y)
        return tuple((int(a), int(b)) for a, b in np.argwhere(self.allowed[x, y]))

    def _check_inputs(self, *xs: int) -> None:
        for x in xs:
            if not 0 <= x < self.n_inputs:
                raise IndexOutOfRange(f"question {x} not in 0..{self.n_inputs - 1}")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Game):
            return NotImplemented
        return (
            self.n_inputs == other.n_inputs
            and self.n_outputs == other.n_outputs
            and bool(np.array_equal(self.allowed, other.allowed))
        )

    def __repr__(self) -> str:
        wins = int(self.allowed.sum())
        return f"Game(n_inputs={self.n_inputs}, n_outputs={self.n_outputs}, wins={wins})"


@dataclass(frozen=True)
class Density:
    """Exact rational weights on question pairs, summing to one.

    ``weights`` is a square nested tuple; entry (x, y) is the probability
    that the referee asks the pair (x, y).
    """

    weights: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self) -> None:
        n = len(self.weights)
        if n == 0 or any(len(row) != n for row in self.weights):
            raise ValueError("weights must form a nonempty square table")
        norm = tuple(tuple(Fraction(w) for w in row) for row in self.weights)
        if any(w < 0 for row in norm for w in row):
            raise DensityNotNormalized("negative question weight")
        total = sum(w for row in norm for w in row)
        if total != 1:
            raise DensityNotNormalized(f"weights sum to {total}, not 1")
        object.__setattr__(self, "weights", norm)

    @property
    def n_inputs(self) -> int:
        return len(self.weights)

    def is_symmetric(self) -> bool:
        n = self.n_inputs
        return all(
            self.weights[x][y] == self.weights[y][x] for x in range(n) for y in range(n)
        )

    def as_float(self) -> np.ndarray:
        arr = np.array([[float(w) for w in row] for row in self.weights])
        arr.flags.writeable = False
        return arr


def new_game(
    n_inputs: int,
    n_outputs: int,
    allowed_pairs: Iterable[tuple[int, int, int, int]],
) -> Game:
    """Build a game from explicit winning tuples (x, y, a, b), 0-based.

    Raises IndexOutOfRange for indices outside the declared ranges and
    SynchronicityViolation for a tuple (x, x, a, b) with a != b.
    """
    table = np.zeros((n_inputs, n_inputs, n_outputs, n_outputs), dtype=bool)
    for x, y, a, b in allowed_pairs:
        if not (0 <= x < n_inputs and 0 <= y < n_inputs):
            raise IndexOutOfRange(f"question index in ({x}, {y}) not in 0..{n_inputs - 1}")
        if not (0 <= a < n_outputs and 0 <= b < n_outputs):
            raise IndexOutOfRange(f"answer index in ({a}, {b}) not in 0..{n_outputs - 1}")
        if x == y and a != b:
            raise SynchronicityViolation(
                f"tuple ({x}, {y}, {a}, {b}) allows differing answers to one question"
            )
        table[x, y, a, b] = True
    return Game(n_inputs, n_outputs, table)


def synchronicity_game(n_inputs: int, n_outputs: int) -> Game:
    """The game that only penalizes inconsistent answers to a repeated question.

    Every answer pair is allowed on distinct questions; on equal questions only
    equal answers win.
    """
    table = np.ones((n_inputs, n_inputs, n_outputs, n_outputs), dtype=bool)
    eye = np.eye(n_outputs, dtype=bool)
    for x in range(n_inputs):
        table[x, x] = eye
    return Game(n_inputs, n_outputs, table)


def product(g1: Game, g2: Game) -> Game:
    """Conjunctive product: answer both games at once, win iff both rules hold.

    Questions and answers are pairs, flattened row-major, so question
    (x1, x2) becomes ``x1 * g2.n_inputs + x2`` and answer (a1, a2) becomes
    ``a1 * g2.n_outputs + a2``.
    """
    n = g1.n_inputs * g2.n_inputs
    k = g1.n_outputs * g2.n_outputs
    # outer AND over (x1, x2, y1, y2, a1, a2, b1, b2), then flatten pairwise
    t1 = g1.allowed[:, None, :, None, :, None, :, None]
    t2 = g2.allowed[None, :, None, :, None, :, None, :]
    table = (t1 & t2).reshape(n, n, k, k)
    return Game(n, k, table)


def is_symmetric(g: Game) -> bool:
    """Whether the rule is invariant under swapping the players.

    Exchanging the players sends the question pair (x, y) to (y, x) and the
    answer pair (a, b) to (b, a), so symmetry means
    ``allowed[x, y, a, b] == allowed[y, x, b, a]`` for all entries.
    """
    return bool(np.array_equal(g.allowed, g.allowed.transpose(1, 0, 3, 2)))


def uniform_density(n_inputs: int) -> Density:
    """Uniform weights 1 / n_inputs**2 on every question pair."""
    w = Fraction(1, n_inputs * n_inputs)
    return Density(tuple(tuple(w for _ in range(n_inputs)) for _ in range(n_inputs)))


def product_density(d1: Density, d2: Density) -> Density:
    """Product weights on composite questions, flattened row-major."""
    n1, n2 = d1.n_inputs, d2.n_inputs
    n = n1 * n2
    rows = []
    for x1 in range(n1):
        for x2 in range(n2):
            row = []
            for y1 in range(n1):
                for y2 in range(n2):
                    row.append(d1.weights[x1][y1] * d2.weights[x2][y2])
            rows.append(tuple(row))
    assert len(rows) == n
    return Density(tuple(rows))
