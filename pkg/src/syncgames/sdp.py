"""Tracial moment-matrix relaxations giving upper bounds on game values.

For a fixed level the matrix is indexed by short reduced words in the
measurement generators, entry (i, j) standing for tau(w_i* w_j) under an
abstract trace.  Every synchronous strategy produces such a matrix, so the
maximum of the game objective over the relaxed feasible set upper-bounds the
tracial value.  The solver is a first-order splitting method; a rigorous
bound is recovered afterwards from an (approximately feasible) dual vector,
so the reported bound is sound even though the iteration is inexact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .errors import DimensionMismatch, NotConverged
from .games import Density, Game
from .linalg import svec, svec_indices, unsvec
from .ncpoly import Word, _reduce_word
from .quantum import Realization

__all__ = [
    "MomentMatrixProblem",
    "SDPSolution",
    "QCBound",
    "build_npa",
    "solve_sdp",
    "qc_upper_bound",
    "moment_matrix_of",
    "moment_feasibility",
    "objective_of",
]

Cell = tuple[int, int]
CellCombo = tuple[tuple[int, int, Fraction], ...]


@dataclass(frozen=True)
class MomentMatrixProblem:
    """maximize sum of objective cells over symmetric PSD moment matrices.

    ``eq_rows`` are (cells, rhs) pairs meaning sum of coeff * M[i, j] equals
    rhs; cells always use i <= j and refer to the symmetric matrix entry.
    ``nonneg_cells`` lists one representative off-diagonal cell per trace
    class whose nonnegativity is certified (see ``build_npa``).
    """

    words: tuple[Word, ...]
    eq_rows: tuple[tuple[CellCombo, Fraction], ...]
    nonneg_cells: tuple[Cell, ...]
    objective: CellCombo

    @property
    def n_words(self) -> int:
        return len(self.words)


@dataclass(frozen=True)
class SDPSolution:
    """Output of the splitting solver.

    ``matrix`` is the cone-projected primal point (exactly PSD up to
    rounding); ``y`` the multipliers of ``eq_rows`` followed by those of the
    nonnegativity tie rows.  ``primal_residual`` is the largest violation of
    an equality row by ``matrix``; ``dual_residual`` the worst infeasibility
    of the dual point.  Both are recomputable from the returned data.
    """

    matrix: np.ndarray
    s: np.ndarray
    objective_value: float
    y: np.ndarray
    primal_residual: float
    dual_residual: float
    iterations: int
    status: str


@dataclass(frozen=True)
class QCBound:
    """An upper bound with an explicit soundness correction.

    ``bound`` is valid for every synchronous strategy whatever the state of
    convergence: it is the dual objective plus worst-case penalty terms for
    the dual point's residual infeasibility (using that every diagonal moment
    lies in [0, 1]).  ``soundness_margin`` = bound - objective_value.
    """

    objective_value: float
    bound: float
    soundness_margin: float
    solution: SDPSolution


# ---------------------------------------------------------------------------
# relaxation construction
# ---------------------------------------------------------------------------


def _index_words(g: Game, level: int) -> list[Word]:
    if level not in (1, 2):
        raise ValueError("only levels 1 and 2 are built")
    n, k = g.n_inputs, g.n_outputs
    words: list[Word] = [()]
    for x in range(n):
        for a in range(k):
            words.append(((x, a),))
    if level == 2:
        for x in range(n):
            for a in range(k):
                for y in range(n):
                    if y == x:
                        continue
                    for b in range(k):
                        words.append(((x, a), (y, b)))
    return words


def _trace_closure(w: Word) -> tuple[frozenset[Word], bool]:
    """All reduced words with the same trace by rotation and reversal.

    Returns the closure and whether the trace is forced to vanish (some
    rotation reduces to zero).
    """
    seen: set[Word] = set()
    frontier = [w]
    dead = False
    while frontier:
        cur = frontier.pop()
        if cur in seen:
            continue
        seen.add(cur)
        variants = [cur[r:] + cur[:r] for r in range(max(1, len(cur)))]
        variants.append(tuple(reversed(cur)))
        for v in variants:
            red = _reduce_word(v, None)
            if red is None:
                dead = True
            elif red not in seen:
                frontier.append(red)
    return frozenset(seen), dead


def _certified_nonneg(closure: frozenset[Word]) -> bool:
    """True when some cyclic form is a palindrome, possibly after doubling.

    A palindrome in self-adjoint idempotent letters reads u u* or u c u*, and
    both have nonnegative trace; doubling one letter (allowed by idempotence)
    before rotating catches forms like the two-projection product.
    """
    for m in closure:
        if not m:
            return True
        candidates: set[Word] = set()
        for r in range(len(m)):
            rot = m[r:] + m[:r]
            candidates.add(rot)
            doubled = (rot[0],) + rot
            for r2 in range(len(doubled)):
                candidates.add(doubled[r2:] + doubled[:r2])
        for cand in candidates:
            if cand == tuple(reversed(cand)):
                return True
    return False


def build_npa(g: Game, d: Density, level: int = 1) -> MomentMatrixProblem:
    """Build the level-1 or level-2 moment relaxation of a game value.

    Index words: the empty word, every generator, and at level 2 every
    reduced two-letter word on distinct questions.  Constraints: the (1, 1)
    entry is 1; entries equal across each rotation/reversal trace class;
    entries of vanishing classes are 0; completeness rows tie sums over one
    question's answers to the shorter word; certified classes get explicit
    nonnegativity.  Objective: the game polynomial's weight on each generator
    pair cell.
    """
    if d.n_inputs != g.n_inputs:
        raise DimensionMismatch("density and game disagree on question count")
    n, k = g.n_inputs, g.n_outputs
    words = _index_words(g, level)
    index = {w: i for i, w in enumerate(words)}
    size = len(words)

    class_info: dict[Word, tuple[frozenset[Word], bool]] = {}
    zero_cells: list[Cell] = []
    classes: dict[Word, list[Cell]] = {}
    certified: dict[Word, bool] = {}
    for i in range(size):
        for j in range(i, size):
            prod = tuple(reversed(words[i])) + words[j]
            red = _reduce_word(prod, None)
            if red is None:
                zero_cells.append((i, j))
                continue
            if red not in class_info:
                class_info[red] = _trace_closure(red)
            closure, dead = class_info[red]
            if dead:
                zero_cells.append((i, j))
                continue
            rep = min(closure, key=lambda t: (len(t), t))
            classes.setdefault(rep, []).append((i, j))
            if rep not in certified:
                certified[rep] = _certified_nonneg(closure)

    rows: list[tuple[CellCombo, Fraction]] = []
    seen_rows: set[tuple[CellCombo, Fraction]] = set()

    def add_row(cells: dict[Cell, Fraction], rhs: Fraction) -> None:
        combo = tuple(
            (i, j, c) for (i, j), c in sorted(cells.items()) if c != 0
        )
        if not combo and rhs == 0:
            return
        key = (combo, rhs)
        if key not in seen_rows:
            seen_rows.add(key)
            rows.append(key)

    add_row({(0, 0): Fraction(1)}, Fraction(1))
    for cell in zero_cells:
        add_row({cell: Fraction(1)}, Fraction(0))
    for rep, cells in classes.items():
        first = cells[0]
        for other in cells[1:]:
            add_row({other: Fraction(1), first: Fraction(-1)}, Fraction(0))

    def cell_of(i: int, j: int) -> Cell:
        return (i, j) if i <= j else (j, i)

    # completeness: summing one question's answers in front of a short word
    # reproduces the shorter word's moment against every row index
    suffixes: list[Word] = [()]
    if level == 2:
        suffixes += [((y, b),) for y in range(n) for b in range(k)]
    for iu in range(size):
        for x in range(n):
            for v in suffixes:
                if v and v[0][0] == x:
                    continue
                cells: dict[Cell, Fraction] = {}
                cells[cell_of(iu, index[v])] = cells.get(cell_of(iu, index[v]), Fraction(0)) - 1
                for a in range(k):
                    col = index[((x, a),) + v]
                    c = cell_of(iu, col)
                    cells[c] = cells.get(c, Fraction(0)) + 1
                add_row(cells, Fraction(0))

    nonneg = tuple(
        cells[0]
        for rep, cells in sorted(classes.items())
        if certified[rep] and all(i != j for i, j in cells)
    )

    objective: dict[Cell, Fraction] = {}
    for x in range(n):
        for y in range(n):
            w = d.weights[x][y]
            if w == 0:
                continue
            for a, b in g.winning_pairs(x, y):
                c = cell_of(index[((x, a),)], index[((y, b),)])
                objective[c] = objective.get(c, Fraction(0)) + w
    combo = tuple((i, j, c) for (i, j), c in sorted(objective.items()))
    return MomentMatrixProblem(tuple(words), tuple(rows), nonneg, combo)


# ---------------------------------------------------------------------------
# numeric assembly and the splitting solver
# ---------------------------------------------------------------------------


def _combo_to_svec_row(
    combo: Sequence[tuple[int, int, Fraction]], pos: dict[Cell, int], row: np.ndarray
) -> None:
    half = 1.0 / math.sqrt(2.0)
    for i, j, c in combo:
        row[pos[(i, j)]] += float(c) * (1.0 if i == j else half)


def _dense_objective(problem: MomentMatrixProblem) -> np.ndarray:
    size = problem.n_words
    c = np.zeros((size, size))
    for i, j, v in problem.objective:
        if i == j:
            c[i, i] += float(v)
        else:
            c[i, j] += float(v) / 2
            c[j, i] += float(v) / 2
    return c


def _assemble(problem: MomentMatrixProblem) -> tuple[np.ndarray, np.ndarray, np.ndarray, int]:
    """Dense constraint matrix over [svec(X); s], its rhs, and the objective."""
    size = problem.n_words
    pairs = svec_indices(size)
    pos = {p: t for t, p in enumerate(pairs)}
    n_svec = len(pairs)
    n_z = n_svec + len(problem.nonneg_cells)
    a_rows = []
    b_vals = []
    for combo, rhs in problem.eq_rows:
        row = np.zeros(n_z)
        _combo_to_svec_row(combo, pos, row[:n_svec])
        a_rows.append(row)
        b_vals.append(float(rhs))
    for t, cell in enumerate(problem.nonneg_cells):
        row = np.zeros(n_z)
        _combo_to_svec_row([(cell[0], cell[1], Fraction(1))], pos, row[:n_svec])
        row[n_svec + t] = -1.0
        a_rows.append(row)
        b_vals.append(0.0)
    a = np.array(a_rows) if a_rows else np.zeros((0, n_z))
    return a, np.array(b_vals), _dense_objective(problem), n_svec


def solve_sdp(
    problem: MomentMatrixProblem,
    tol: float = 1e-8,
    max_iters: int = 200000,
    rho: float = 1.0,
) -> SDPSolution:
    """Maximize the objective by alternating affine and cone projections.

    Douglas-Rachford style splitting: the affine step projects onto the
    equality rows (through a cached pseudoinverse, so redundant rows are
    harmless), the cone step clamps the matrix to PSD and the certified
    entries to nonnegative.  Raises NotConverged with the partial solution
    attached if the residuals have not both dropped below ``tol``.
    """
    size = problem.n_words
    a, b, c_mat, n_svec = _assemble(problem)
    n_z = a.shape[1]
    pos = {p: t for t, p in enumerate(svec_indices(size))}

    c_tilde = np.zeros(n_z)
    c_tilde[:n_svec] = svec(c_mat)

    # The constraint rows are heavily redundant, so project through an
    # orthonormal basis of the row space; a cached pseudoinverse of A A^T
    # amplifies rounding noise along the near-null directions and diverges.
    u_full, sing, vt = np.linalg.svd(a, full_matrices=False)
    keep = sing > sing[0] * 1e-12
    u_r = u_full[:, keep]
    s_r = sing[keep]
    v_r = vt[keep].T
    z_star = v_r @ ((u_r.T @ b) / s_r)

    def cone(v: np.ndarray) -> np.ndarray:
        out = v.copy()
        w, q = np.linalg.eigh(unsvec(v[:n_svec], size))
        w = np.maximum(w, 0.0)
        out[:n_svec] = svec((q * w) @ q.conj().T)
        out[n_svec:] = np.maximum(v[n_svec:], 0.0)
        return out

    zeta = np.zeros(n_z)
    zeta[pos[(0, 0)]] = 1.0
    w_dual = np.zeros(n_z)
    v = zeta.copy()
    z = zeta.copy()
    iterations = max_iters
    status = "max_iters"
    for it in range(1, max_iters + 1):
        v = zeta - w_dual + c_tilde / rho
        z = v - v_r @ (v_r.T @ v) + z_star
        zeta_new = cone(z + w_dual)
        w_dual = w_dual + z - zeta_new
        r_norm = float(np.linalg.norm(z - zeta_new))
        s_norm = rho * float(np.linalg.norm(zeta_new - zeta))
        zeta = zeta_new
        scale = 1.0 + float(np.linalg.norm(z))
        if r_norm <= tol * scale and s_norm <= tol * scale:
            iterations = it
            status = "optimal"
            break
        if it % 100 == 0:
            if r_norm > 10 * s_norm:
                rho *= 2.0
                w_dual /= 2.0
            elif s_norm > 10 * r_norm:
                rho /= 2.0
                w_dual *= 2.0

    x = unsvec(zeta[:n_svec], size)
    s = zeta[n_svec:].copy()
    # multiplier of the affine block: A^T lam = v - z, solved on the row space
    y = rho * (u_r @ ((v_r.T @ (v - z)) / s_r))
    objective_value = float(c_tilde @ zeta)
    primal_residual = float(np.max(np.abs(a @ zeta - b))) if b.size else 0.0
    dual_residual = _dual_infeasibility(problem, y, a, c_mat, n_svec)
    sol = SDPSolution(
        matrix=x,
        s=s,
        objective_value=objective_value,
        y=y,
        primal_residual=primal_residual,
        dual_residual=dual_residual,
        iterations=iterations,
        status=status,
    )
    if status != "optimal":
        raise NotConverged(
            f"residuals above {tol} after {max_iters} iterations", solution=sol
        )
    return sol


def _dual_infeasibility(
    problem: MomentMatrixProblem,
    y: np.ndarray,
    a: np.ndarray,
    c_mat: np.ndarray,
    n_svec: int,
) -> float:
    aty = a.T @ y if y.size else np.zeros(a.shape[1])
    z = unsvec(aty[:n_svec], problem.n_words) - c_mat
    sigma = aty[n_svec:]
    worst = max(0.0, -float(np.min(np.linalg.eigvalsh(z))))
    if sigma.size:
        worst = max(worst, max(0.0, -float(np.min(sigma))))
    return worst


def qc_upper_bound(
    g: Game,
    d: Density,
    level: int = 1,
    tol: float = 1e-8,
    max_iters: int = 200000,
) -> QCBound:
    """A certified upper bound on the tracial value at the given level.

    Whatever point the solver returns, every true strategy's moment vector z
    satisfies the equality rows, so objective = b.y - <Z, X> - sigma.s with
    Z, sigma built from the dual vector.  Penalizing the negative part of Z
    by the matrix size (each diagonal moment is at most 1) and of sigma by 1
    per entry turns the approximate dual into a valid bound.
    """
    problem = build_npa(g, d, level)
    sol = solve_sdp(problem, tol=tol, max_iters=max_iters)
    bound = _rigorous_bound(problem, sol)
    return QCBound(sol.objective_value, bound, bound - sol.objective_value, sol)


def _rigorous_bound(problem: MomentMatrixProblem, sol: SDPSolution) -> float:
    size = problem.n_words
    a, b, c_mat, n_svec = _assemble(problem)
    aty = a.T @ sol.y
    z = unsvec(aty[:n_svec], size) - c_mat
    sigma = aty[n_svec:]
    lam_min = float(np.min(np.linalg.eigvalsh(z)))
    penalty = max(0.0, -lam_min) * size
    if sigma.size:
        penalty += float(np.sum(np.maximum(0.0, -sigma)))
    return float(b @ sol.y) + penalty


# ---------------------------------------------------------------------------
# moment matrices of explicit strategies
# ---------------------------------------------------------------------------


def moment_matrix_of(problem: MomentMatrixProblem, r: Realization) -> np.ndarray:
    """Evaluate tau(w_i* w_j) for an explicit realization."""
    size = problem.n_words
    x = np.zeros((size, size))
    for blk in r.blocks:
        evals = []
        for w in problem.words:
            acc = np.eye(blk.dim, dtype=complex)
            for q, ans in w:
                acc = acc @ blk.projections[q][ans]
            evals.append(acc)
        scale = blk.weight / blk.dim
        for i in range(size):
            for j in range(size):
                x[i, j] += scale * float(np.trace(evals[i].conj().T @ evals[j]).real)
    return (x + x.T) / 2


def moment_feasibility(problem: MomentMatrixProblem, x: np.ndarray) -> float:
    """Worst violation of the relaxation's constraints by a concrete matrix."""
    worst = 0.0
    for combo, rhs in problem.eq_rows:
        total = sum(float(c) * x[i, j] for i, j, c in combo)
        worst = max(worst, abs(total - float(rhs)))
    for i, j in problem.nonneg_cells:
        worst = max(worst, max(0.0, -float(x[i, j])))
    worst = max(worst, max(0.0, -float(np.min(np.linalg.eigvalsh(x)))))
    return worst


def objective_of(problem: MomentMatrixProblem, x: np.ndarray) -> float:
    """The relaxation objective evaluated at a concrete matrix."""
    return float(sum(float(c) * x[i, j] for i, j, c in problem.objective))
