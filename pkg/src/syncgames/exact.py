"""Exact synchronous values: deterministic enumeration and rational LP.

The local synchronous value is a maximum over common answer functions, so it
is computed by full enumeration with exact integer scoring.  The
non-signalling synchronous value is the optimum of a small linear program
solved by an exact simplex over Fractions; the optimal table and a dual
certificate are returned and re-verified independently of the pivot path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

import numpy as np

from .correlations import Correlation, DeterministicStrategy
from .errors import (
    DimensionMismatch,
    EnumerationTooLarge,
    LPInfeasible,
    LPUnbounded,
)
from .games import Density, Game, product, product_density

__all__ = [
    "ValueReport",
    "LPProblem",
    "LPSolution",
    "SupermultiplicativityReport",
    "deterministic_scores",
    "local_synchronous_value",
    "ns_lp_problem",
    "ns_synchronous_value",
    "simplex_solve",
    "strategy_score",
    "supermultiplicativity_report",
    "verify_lp_certificate",
]

DEFAULT_ENUMERATION_CAP = 1 << 24


@dataclass(frozen=True)
class ValueReport:
    """An exactly computed value together with how it was obtained."""

    value: Fraction
    witness: Union[DeterministicStrategy, Correlation, None]
    method: str
    certificate: Optional["LPSolution"] = None

    def __post_init__(self) -> None:
        if not 0 <= self.value <= 1:
            raise ValueError(f"value {self.value} outside [0, 1]")


@dataclass(frozen=True)
class SupermultiplicativityReport:
    """Evidence that a product game's local value is at least the product.

    ``tensor_score`` is the exact score of the two maximizers played side by
    side, which always equals value1 * value2 and hence witnesses the
    inequality without enumerating the product game.  ``product_value`` (and
    the gap above the product of values) is filled in only when full
    enumeration fits under the cap, and is None otherwise.
    """

    value1: Fraction
    value2: Fraction
    tensor_score: Fraction
    product_value: Optional[Fraction]
    gap: Optional[Fraction]


def _check_density(g: Game, d: Density) -> None:
    if d.n_inputs != g.n_inputs:
        raise DimensionMismatch(f"density on {d.n_inputs} questions, game on {g.n_inputs}")


def _integer_weights(d: Density) -> tuple[np.ndarray, int]:
    """Scale the density to integers; returns (table, common denominator)."""
    denoms = [w.denominator for row in d.weights for w in row]
    scale = math.lcm(*denoms)
    if scale >= 1 << 62:
        raise ValueError("density denominators too large for integer scoring")
    table = np.array(
        [[int(w * scale) for w in row] for row in d.weights], dtype=np.int64
    )
    return table, scale


def _strategy_digits(ranks: np.ndarray, n_inputs: int, n_outputs: int) -> np.ndarray:
    """Decode strategy ranks to answer rows, first question most significant."""
    f = np.empty((ranks.size, n_inputs), dtype=np.int64)
    r = ranks.copy()
    for i in range(n_inputs - 1, -1, -1):
        f[:, i] = r % n_outputs
        r //= n_outputs
    return f


def _chunk_scores(g: Game, weights: np.ndarray, f: np.ndarray) -> np.ndarray:
    total = np.zeros(f.shape[0], dtype=np.int64)
    for x in range(g.n_inputs):
        for y in range(g.n_inputs):
            w = int(weights[x, y])
            if w == 0:
                continue
            total += w * g.allowed[x, y][f[:, x], f[:, y]]
    return total


def deterministic_scores(
    g: Game, d: Density, cap: int = DEFAULT_ENUMERATION_CAP
) -> list[tuple[DeterministicStrategy, Fraction]]:
    """Exact score of every common answer function, in lexicographic order."""
    _check_density(g, d)
    count = g.n_outputs**g.n_inputs
    if count > cap:
        raise EnumerationTooLarge(f"{count} strategies exceed cap {cap}")
    weights, scale = _integer_weights(d)
    ranks = np.arange(count, dtype=np.int64)
    f = _strategy_digits(ranks, g.n_inputs, g.n_outputs)
    scores = _chunk_scores(g, weights, f)
    return [
        (
            DeterministicStrategy(tuple(int(v) for v in f[i])),
            Fraction(int(scores[i]), scale),
        )
        for i in range(count)
    ]


def local_synchronous_value(
    g: Game, d: Density, cap: int = DEFAULT_ENUMERATION_CAP
) -> ValueReport:
    """Maximum winning probability over common answer functions, exactly.

    Synchronous local correlations are convex mixtures of deterministic ones,
    so the maximum over answer functions is the value.  The witness is the
    lexicographically first maximizer.
    """
    _check_density(g, d)
    count = g.n_outputs**g.n_inputs
    if count > cap:
        raise EnumerationTooLarge(f"{count} strategies exceed cap {cap}")
    weights, scale = _integer_weights(d)
    best = -1
    best_rank = 0
    chunk = 1 << 16
    for start in range(0, count, chunk):
        ranks = np.arange(start, min(start + chunk, count), dtype=np.int64)
        f = _strategy_digits(ranks, g.n_inputs, g.n_outputs)
        scores = _chunk_scores(g, weights, f)
        i = int(np.argmax(scores))
        if int(scores[i]) > best:
            best = int(scores[i])
            best_rank = int(ranks[i])
    digits = _strategy_digits(
        np.array([best_rank], dtype=np.int64), g.n_inputs, g.n_outputs
    )
    witness = DeterministicStrategy(tuple(int(v) for v in digits[0]))
    return ValueReport(Fraction(best, scale), witness, "enumeration")


def strategy_score(g: Game, d: Density, f: DeterministicStrategy) -> Fraction:
    """Exact expected winning probability of one common answer function."""
    _check_density(g, d)
    if len(f.assignment) != g.n_inputs:
        raise DimensionMismatch("strategy length does not match question count")
    total = Fraction(0)
    for x in range(g.n_inputs):
        for y in range(g.n_inputs):
            if g.allowed[x, y, f.assignment[x], f.assignment[y]]:
                total += d.weights[x][y]
    return total


def supermultiplicativity_report(
    g1: Game,
    d1: Density,
    g2: Game,
    d2: Density,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> SupermultiplicativityReport:
    """Compare the product game's local value with the product of local values.

    The two factor maximizers played side by side form a strategy of the
    product game whose score factorizes, so the product value is at least
    value1 * value2; the report carries that witness score.  When the product
    game is small enough to enumerate, the exact product value and its gap
    above value1 * value2 (nonnegative, possibly strict) are included.
    """
    r1 = local_synchronous_value(g1, d1, cap)
    r2 = local_synchronous_value(g2, d2, cap)
    gp, dp = product(g1, g2), product_density(d1, d2)
    k2 = g2.n_outputs
    paired = DeterministicStrategy(
        tuple(
            r1.witness.assignment[x1] * k2 + r2.witness.assignment[x2]
            for x1 in range(g1.n_inputs)
            for x2 in range(g2.n_inputs)
        )
    )
    tensor_score = strategy_score(gp, dp, paired)
    assert tensor_score == r1.value * r2.value, "tensor strategy score must factor"
    product_value: Optional[Fraction] = None
    gap: Optional[Fraction] = None
    if gp.n_outputs**gp.n_inputs <= cap:
        product_value = local_synchronous_value(gp, dp, cap).value
        gap = product_value - r1.value * r2.value
    return SupermultiplicativityReport(r1.value, r2.value, tensor_score, product_value, gap)


# ---------------------------------------------------------------------------
# exact simplex
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LPProblem:
    """maximize c . x  subject to  a_eq x = b_eq, a_ub x <= b_ub, x >= 0."""

    c: tuple[Fraction, ...]
    a_eq: tuple[tuple[Fraction, ...], ...] = ()
    b_eq: tuple[Fraction, ...] = ()
    a_ub: tuple[tuple[Fraction, ...], ...] = ()
    b_ub: tuple[Fraction, ...] = ()


@dataclass(frozen=True)
class LPSolution:
    """Optimal primal/dual pair with exact rational entries.

    ``y_eq`` and ``y_ub`` are duals of the equality and inequality rows.  The
    pair has been checked for primal and dual feasibility, complementary
    slackness, and equal objectives, in exact arithmetic.
    """

    value: Fraction
    x: tuple[Fraction, ...]
    y_eq: tuple[Fraction, ...]
    y_ub: tuple[Fraction, ...]
    verified: bool


def simplex_solve(lp: LPProblem) -> LPSolution:
    """Two-phase dense simplex over Fractions with Bland's rule.

    Bland's rule (smallest eligible index enters, smallest-index basic
    variable leaves among minimum ratios) guarantees termination.  The
    optimal basis yields a dual vector by an exact linear solve, and the full
    certificate is re-verified against the original data before returning.
    """
    n = len(lp.c)
    m_eq, m_ub = len(lp.a_eq), len(lp.a_ub)
    for row in list(lp.a_eq) + list(lp.a_ub):
        if len(row) != n:
            raise ValueError("constraint row length does not match objective")

    # standard form with slack variables on the <= rows
    n_std = n + m_ub
    std_rows: list[list[Fraction]] = []
    std_rhs: list[Fraction] = []
    for i in range(m_eq):
        std_rows.append([Fraction(v) for v in lp.a_eq[i]] + [Fraction(0)] * m_ub)
        std_rhs.append(Fraction(lp.b_eq[i]))
    for i in range(m_ub):
        row = [Fraction(v) for v in lp.a_ub[i]] + [Fraction(0)] * m_ub
        row[n + i] = Fraction(1)
        std_rows.append(row)
        std_rhs.append(Fraction(lp.b_ub[i]))
    m = len(std_rows)
    cost_std = [Fraction(v) for v in lp.c] + [Fraction(0)] * m_ub

    # sign-normalize rows, then append one artificial per row
    signs = [Fraction(1)] * m
    work = []
    for i in range(m):
        if std_rhs[i] < 0:
            signs[i] = Fraction(-1)
        work.append([signs[i] * v for v in std_rows[i]] + [signs[i] * std_rhs[i]])
    width = n_std + m  # artificial columns occupy n_std .. width-1
    tab = [work[i][:n_std] + [Fraction(0)] * m + [work[i][n_std]] for i in range(m)]
    for i in range(m):
        tab[i][n_std + i] = Fraction(1)
    basis = [n_std + i for i in range(m)]

    def pivot(r: int, col: int) -> None:
        inv = Fraction(1) / tab[r][col]
        tab[r] = [v * inv for v in tab[r]]
        pr = tab[r]
        for i in range(m):
            if i == r or tab[i][col] == 0:
                continue
            factor = tab[i][col]
            tab[i] = [vi - factor * vp for vi, vp in zip(tab[i], pr)]
        basis[r] = col

    def run_phase(costs: list[Fraction], n_cols: int) -> None:
        while True:
            cb = [costs[b] for b in basis]
            in_basis = set(basis)
            entering = -1
            for j in range(n_cols):
                if j in in_basis:
                    continue
                reduced = costs[j] - sum(cb[i] * tab[i][j] for i in range(m))
                if reduced > 0:
                    entering = j
                    break
            if entering < 0:
                return
            leaving = -1
            best_ratio: Optional[Fraction] = None
            for i in range(m):
                aij = tab[i][entering]
                if aij > 0:
                    ratio = tab[i][width] / aij
                    if (
                        best_ratio is None
                        or ratio < best_ratio
                        or (ratio == best_ratio and basis[i] < basis[leaving])
                    ):
                        best_ratio = ratio
                        leaving = i
            if leaving < 0:
                raise LPUnbounded("objective unbounded above")
            pivot(leaving, entering)

    # phase 1: minimize the artificial mass
    phase1 = [Fraction(0)] * n_std + [Fraction(-1)] * m
    run_phase(phase1, width)
    if any(basis[i] >= n_std and tab[i][width] != 0 for i in range(m)):
        raise LPInfeasible("no feasible point")
    # pivot artificials out where a structural column is available; rows that
    # are structurally zero are redundant and stay inert with dual zero
    for i in range(m):
        if basis[i] >= n_std:
            col = next((j for j in range(n_std) if tab[i][j] != 0), None)
            if col is not None:
                pivot(i, col)

    # phase 2 over structural columns only
    phase2 = cost_std + [Fraction(0)] * m
    run_phase(phase2, n_std)

    x_std = [Fraction(0)] * n_std
    for i in range(m):
        if basis[i] < n_std:
            x_std[basis[i]] = tab[i][width]
    value = sum(c * v for c, v in zip(cost_std, x_std))

    # dual of the sign-normalized system from the optimal basis, then un-flip
    bmat = []
    for i in range(m):
        col = basis[i]
        if col < n_std:
            bcol = [signs[r] * std_rows[r][col] for r in range(m)]
        else:
            bcol = [Fraction(1) if r == col - n_std else Fraction(0) for r in range(m)]
        bmat.append(bcol)  # bmat[i] is the i-th basis column, i.e. row i of B^T
    cb = [phase2[b] for b in basis]
    y_norm = _solve_exact(bmat, cb)
    y = [signs[i] * y_norm[i] for i in range(m)]

    y_eq = tuple(y[:m_eq])
    y_ub = tuple(y[m_eq:])
    x = tuple(x_std[:n])
    _verify_certificate(lp, x, y_eq, y_ub, value)
    return LPSolution(value=value, x=x, y_eq=y_eq, y_ub=y_ub, verified=True)


def _solve_exact(a: list[list[Fraction]], b: list[Fraction]) -> list[Fraction]:
    """Exact Gaussian elimination solve of a x = b."""
    m = len(a)
    aug = [list(a[i]) + [b[i]] for i in range(m)]
    for col in range(m):
        piv = next((r for r in range(col, m) if aug[r][col] != 0), None)
        if piv is None:
            raise ValueError("singular basis matrix")
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = Fraction(1) / aug[col][col]
        aug[col] = [v * inv for v in aug[col]]
        for r in range(m):
            if r != col and aug[r][col] != 0:
                factor = aug[r][col]
                aug[r] = [vr - factor * vc for vr, vc in zip(aug[r], aug[col])]
    return [aug[i][m] for i in range(m)]


def _verify_certificate(
    lp: LPProblem,
    x: tuple[Fraction, ...],
    y_eq: tuple[Fraction, ...],
    y_ub: tuple[Fraction, ...],
    value: Fraction,
) -> None:
    """Exact optimality check; raises AssertionError on any violation."""
    n = len(lp.c)
    assert all(v >= 0 for v in x), "primal negativity"
    for i, row in enumerate(lp.a_eq):
        assert sum(r * v for r, v in zip(row, x)) == lp.b_eq[i], "equality row violated"
    slack = []
    for i, row in enumerate(lp.a_ub):
        s = lp.b_ub[i] - sum(r * v for r, v in zip(row, x))
        assert s >= 0, "inequality row violated"
        slack.append(s)
    assert all(v >= 0 for v in y_ub), "dual negativity on inequality rows"
    for j in range(n):
        col = sum(lp.a_eq[i][j] * y_eq[i] for i in range(len(lp.a_eq))) + sum(
            lp.a_ub[i][j] * y_ub[i] for i in range(len(lp.a_ub))
        )
        gap = col - lp.c[j]
        assert gap >= 0, "dual infeasibility"
        assert x[j] == 0 or gap == 0, "complementary slackness (columns)"
    for i in range(len(lp.a_ub)):
        assert y_ub[i] == 0 or slack[i] == 0, "complementary slackness (rows)"
    dual_value = sum(b * v for b, v in zip(lp.b_eq, y_eq)) + sum(
        b * v for b, v in zip(lp.b_ub, y_ub)
    )
    assert dual_value == value, "duality gap"
    assert sum(c * v for c, v in zip(lp.c, x)) == value, "primal objective mismatch"


# ---------------------------------------------------------------------------
# non-signalling synchronous value
# ---------------------------------------------------------------------------


def _ns_variables(g: Game) -> list[tuple[int, int, int, int]]:
    """LP variables: table entries that synchronicity does not force to zero."""
    keep = []
    for x in range(g.n_inputs):
        for y in range(g.n_inputs):
            for a in range(g.n_outputs):
                for b in range(g.n_outputs):
                    if x == y and a != b:
                        continue
                    keep.append((x, y, a, b))
    return keep


def ns_lp_problem(g: Game, d: Density) -> LPProblem:
    """The exact LP whose optimum is the non-signalling synchronous value.

    Variables are the table entries not forced to zero by synchronicity,
    constrained by per-pair normalization and by equality of each player's
    marginals with the ones at a fixed reference question of the other
    player.  The objective collects the density weight of each allowed entry.
    """
    _check_density(g, d)
    n, k = g.n_inputs, g.n_outputs
    variables = _ns_variables(g)
    index = {v: i for i, v in enumerate(variables)}
    nv = len(variables)
    zero_row = lambda: [Fraction(0)] * nv  # noqa: E731

    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    for x in range(n):
        for y in range(n):
            row = zero_row()
            for a in range(k):
                for b in range(k):
                    if (x, y, a, b) in index:
                        row[index[(x, y, a, b)]] = Fraction(1)
            rows.append(row)
            rhs.append(Fraction(1))
    # first-player marginal at question x must not depend on the other question
    for x in range(n):
        for a in range(k):
            for y in range(1, n):
                row = zero_row()
                for b in range(k):
                    if (x, y, a, b) in index:
                        row[index[(x, y, a, b)]] += 1
                    if (x, 0, a, b) in index:
                        row[index[(x, 0, a, b)]] -= 1
                if any(v != 0 for v in row):
                    rows.append(row)
                    rhs.append(Fraction(0))
    # second-player marginal likewise
    for y in range(n):
        for b in range(k):
            for x in range(1, n):
                row = zero_row()
                for a in range(k):
                    if (x, y, a, b) in index:
                        row[index[(x, y, a, b)]] += 1
                    if (0, y, a, b) in index:
                        row[index[(0, y, a, b)]] -= 1
                if any(v != 0 for v in row):
                    rows.append(row)
                    rhs.append(Fraction(0))

    c = zero_row()
    for (x, y, a, b), i in index.items():
        if g.allowed[x, y, a, b]:
            c[i] = d.weights[x][y]

    return LPProblem(
        c=tuple(c),
        a_eq=tuple(tuple(r) for r in rows),
        b_eq=tuple(rhs),
    )


def verify_lp_certificate(lp: LPProblem, sol: LPSolution) -> bool:
    """Re-run the exact optimality checks of a solution against its problem."""
    try:
        _verify_certificate(lp, sol.x, sol.y_eq, sol.y_ub, sol.value)
    except AssertionError:
        return False
    return True


def ns_synchronous_value(g: Game, d: Density) -> ValueReport:
    """Optimal winning probability over synchronous non-signalling tables.

    Solved exactly by the simplex over Fractions.  The witness correlation
    carries the exact optimal table and the report carries the dual
    certificate, already verified in rational arithmetic.
    """
    n, k = g.n_inputs, g.n_outputs
    lp = ns_lp_problem(g, d)
    sol = simplex_solve(lp)

    index = {v: i for i, v in enumerate(_ns_variables(g))}
    values = np.zeros((n, n, k, k))
    exact: dict[tuple[int, int, int, int], Fraction] = {}
    for (x, y, a, b), i in index.items():
        if sol.x[i] != 0:
            values[x, y, a, b] = float(sol.x[i])
            exact[(x, y, a, b)] = sol.x[i]
    witness = Correlation(n, k, values, exact)
    return ValueReport(sol.value, witness, "lp", certificate=sol)
