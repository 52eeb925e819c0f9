"""Bipartite conditional probability tables and operations on them.

A correlation stores p(a, b | x, y) as a dense float array and, when the
source of the table is exact, additionally as a sparse table of rationals
(zero entries omitted).  Operations that can stay exact do so.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional

import numpy as np

from .errors import DimensionMismatch, IndexOutOfRange
from .games import Density, Game

__all__ = [
    "Correlation",
    "DeterministicStrategy",
    "from_deterministic",
    "is_nonsignalling",
    "is_synchronous",
    "is_perfect",
    "tensor",
    "marginal",
    "expected_value",
]

DEFAULT_TOL = 1e-9

# sparse exact table: (x, y, a, b) -> Fraction, zeros omitted
ExactTable = Mapping[tuple[int, int, int, int], Fraction]


@dataclass(frozen=True, eq=False)
class Correlation:
    """p(a, b | x, y) for one question pair per player round.

    ``values[x, y, a, b]`` is the float table.  ``exact`` carries the same
    numbers as rationals when available, keyed by (x, y, a, b) with zeros
    omitted; it is None for tables of purely numerical origin.
    """

    n_inputs: int
    n_outputs: int
    values: np.ndarray
    exact: Optional[ExactTable] = None

    def __post_init__(self) -> None:
        shape = (self.n_inputs, self.n_inputs, self.n_outputs, self.n_outputs)
        arr = np.ascontiguousarray(self.values, dtype=float)
        if arr.shape != shape:
            raise DimensionMismatch(f"table shape {arr.shape}, expected {shape}")
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)
        if self.exact is not None:
            for (x, y, a, b), v in self.exact.items():
                if not (0 <= x < self.n_inputs and 0 <= y < self.n_inputs):
                    raise IndexOutOfRange(f"exact entry question pair ({x}, {y})")
                if not (0 <= a < self.n_outputs and 0 <= b < self.n_outputs):
                    raise IndexOutOfRange(f"exact entry answer pair ({a}, {b})")
                if float(v) != arr[x, y, a, b]:
                    # the float table must be the rounding of the exact one
                    if abs(float(v) - arr[x, y, a, b]) > 1e-15:
                        raise ValueError("exact table disagrees with float table")

    def exact_at(self, x: int, y: int, a: int, b: int) -> Fraction:
        if self.exact is None:
            raise ValueError("correlation has no exact table")
        return self.exact.get((x, y, a, b), Fraction(0))


@dataclass(frozen=True)
class DeterministicStrategy:
    """A common answer function: question x is always answered assignment[x]."""

    assignment: tuple[int, ...]

    @property
    def n_inputs(self) -> int:
        return len(self.assignment)


def from_deterministic(f: DeterministicStrategy, n_outputs: int) -> Correlation:
    """The correlation of a deterministic strategy.

    p(a, b | x, y) is 1 when a = f(x) and b = f(y), else 0.
    """
    n = f.n_inputs
    for x, a in enumerate(f.assignment):
        if not 0 <= a < n_outputs:
            raise IndexOutOfRange(f"assignment value {a} at question {x}")
    values = np.zeros((n, n, n_outputs, n_outputs))
    exact: dict[tuple[int, int, int, int], Fraction] = {}
    for x in range(n):
        for y in range(n):
            values[x, y, f.assignment[x], f.assignment[y]] = 1.0
            exact[(x, y, f.assignment[x], f.assignment[y])] = Fraction(1)
    return Correlation(n, n_outputs, values, exact)


def is_nonsignalling(p: Correlation, tol: float = DEFAULT_TOL) -> bool:
    """Check that each player's marginal is independent of the other's question.

    Requires normalized blocks too: every (x, y) block must sum to 1.
    """
    v = p.values
    sums = v.sum(axis=(2, 3))
    if np.abs(sums - 1.0).max() > tol:
        return False
    row = v.sum(axis=3)  # row[x, y, a] = sum_b p(a, b | x, y)
    col = v.sum(axis=2)  # col[x, y, b] = sum_a p(a, b | x, y)
    row_dev = np.abs(row - row[:, :1, :]).max()
    col_dev = np.abs(col - col[:1, :, :]).max()
    return bool(max(row_dev, col_dev) <= tol)


def is_synchronous(p: Correlation, tol: float = DEFAULT_TOL) -> bool:
    """Both players answer a repeated question identically."""
    off = ~np.eye(p.n_outputs, dtype=bool)
    return all(
        float(np.abs(p.values[x, x][off]).max(initial=0.0)) <= tol
        for x in range((p.n_inputs))
    )


def is_perfect(p: Correlation, g: Game, tol: float = DEFAULT_TOL) -> bool:
    """No probability mass on losing answer pairs."""
    _check_same_shape(p, g)
    losing = ~g.allowed
    return bool(np.abs(p.values[losing]).max(initial=0.0) <= tol)


def tensor(p1: Correlation, p2: Correlation) -> Correlation:
    """Answer two independent rounds at once; indices flatten row-major."""
    n1, k1 = p1.n_inputs, p1.n_outputs
    n2, k2 = p2.n_inputs, p2.n_outputs
    n, k = n1 * n2, k1 * k2
    # order (x1, x2, y1, y2, a1, a2, b1, b2) then flatten pairwise
    v = np.einsum("xyab,uvcd->xuyvacbd", p1.values, p2.values)
    values = v.reshape(n, n, k, k)
    exact = None
    if p1.exact is not None and p2.exact is not None:
        exact = {}
        for (x1, y1, a1, b1), w1 in p1.exact.items():
            for (x2, y2, a2, b2), w2 in p2.exact.items():
                key = (x1 * n2 + x2, y1 * n2 + y2, a1 * k2 + a2, b1 * k2 + b2)
                exact[key] = w1 * w2
    return Correlation(n, k, values, exact)


def marginal(
    p: Correlation,
    fixed_x2: int,
    fixed_y2: int,
    factor_dims: tuple[tuple[int, int], tuple[int, int]],
) -> Correlation:
    """Restrict a composite-round correlation to its first factor.

    The second-factor questions are pinned to (fixed_x2, fixed_y2) and the
    second-factor answers are summed out.  ``factor_dims`` is
    ((n1, k1), (n2, k2)) and must multiply out to the composite shape.
    """
    (n1, k1), (n2, k2) = factor_dims
    if n1 * n2 != p.n_inputs or k1 * k2 != p.n_outputs:
        raise DimensionMismatch(
            f"factors {factor_dims} do not compose to ({p.n_inputs}, {p.n_outputs})"
        )
    if not (0 <= fixed_x2 < n2 and 0 <= fixed_y2 < n2):
        raise IndexOutOfRange(f"pinned questions ({fixed_x2}, {fixed_y2})")
    v = p.values.reshape(n1, n2, n1, n2, k1, k2, k1, k2)
    values = v[:, fixed_x2, :, fixed_y2].sum(axis=(3, 5))
    exact = None
    if p.exact is not None:
        exact = {}
        for (x, y, a, b), w in p.exact.items():
            x1, x2 = divmod(x, n2)
            y1, y2 = divmod(y, n2)
            if x2 != fixed_x2 or y2 != fixed_y2:
                continue
            a1 = a // k2
            b1 = b // k2
            key = (x1, y1, a1, b1)
            exact[key] = exact.get(key, Fraction(0)) + w
        exact = {key: w for key, w in exact.items() if w != 0}
    return Correlation(n1, k1, values, exact)


def expected_value(p: Correlation, g: Game, d: Density):
    """Winning probability of the correlation: sum of density * rule * p.

    Returns a Fraction when the correlation carries an exact table, else a
    float.
    """
    _check_same_shape(p, g)
    if d.n_inputs != g.n_inputs:
        raise DimensionMismatch(
            f"density on {d.n_inputs} questions, game on {g.n_inputs}"
        )
    if p.exact is not None:
        total = Fraction(0)
        for (x, y, a, b), w in p.exact.items():
            if g.allowed[x, y, a, b]:
                total += d.weights[x][y] * w
        return total
    return float(np.sum(d.as_float()[:, :, None, None] * g.allowed * p.values))


def _check_same_shape(p: Correlation, g: Game) -> None:
    if p.n_inputs != g.n_inputs or p.n_outputs != g.n_outputs:
        raise DimensionMismatch(
            f"correlation ({p.n_inputs}, {p.n_outputs}) vs game ({g.n_inputs}, {g.n_outputs})"
        )
