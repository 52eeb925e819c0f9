"""Finite-dimensional tracial strategies and a see-saw lower-bound search.

A realization is a weighted direct sum of projective-measurement blocks; its
correlation is p(a, b | x, y) = sum_i w_i tr(P_i[x][a] P_i[y][b]) / dim_i.
Values of such strategies are always valid lower bounds for the tracially
defined synchronous values, which is what the see-saw search exploits.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from .correlations import Correlation, expected_value
from .errors import DimensionMismatch, InfeasibleT
from .games import Density, Game
from .linalg import operator_norm, random_unitary

__all__ = [
    "Block",
    "Realization",
    "RealizationReport",
    "MarginalReport",
    "TFamilyPoint",
    "verify_realization",
    "correlation_of",
    "tensor_realizations",
    "extract_marginal",
    "seesaw_lower_bound",
    "t_family",
    "example2_witness",
]


@dataclass(frozen=True, eq=False)
class Block:
    """One direct summand: a projective measurement per question.

    ``projections[x][a]`` is a dim x dim complex matrix; for each x the
    matrices should be Hermitian idempotents summing to the identity (checked
    by ``verify_realization``, not at construction).
    """

    weight: float
    projections: tuple[tuple[np.ndarray, ...], ...]

    def __post_init__(self) -> None:
        rows = []
        for row in self.projections:
            mats = []
            for p in row:
                m = np.ascontiguousarray(p, dtype=complex)
                if m.ndim != 2 or m.shape[0] != m.shape[1]:
                    raise DimensionMismatch("projection blocks must be square")
                m.flags.writeable = False
                mats.append(m)
            rows.append(tuple(mats))
        object.__setattr__(self, "projections", tuple(rows))
        dims = {p.shape[0] for row in self.projections for p in row}
        if len(dims) != 1:
            raise DimensionMismatch("mixed matrix sizes inside one block")

    @property
    def dim(self) -> int:
        return self.projections[0][0].shape[0]

    @property
    def n_inputs(self) -> int:
        return len(self.projections)

    @property
    def n_outputs(self) -> int:
        return len(self.projections[0])


@dataclass(frozen=True, eq=False)
class Realization:
    """A weighted direct sum of measurement blocks; weights sum to one."""

    blocks: tuple[Block, ...]

    def __post_init__(self) -> None:
        if not self.blocks:
            raise ValueError("a realization needs at least one block")
        shapes = {(b.n_inputs, b.n_outputs) for b in self.blocks}
        if len(shapes) != 1:
            raise DimensionMismatch("blocks disagree on question/answer counts")
        total = sum(b.weight for b in self.blocks)
        if any(b.weight < 0 for b in self.blocks) or abs(total - 1.0) > 1e-12:
            raise ValueError(f"block weights must be nonnegative and sum to 1, got {total}")

    @property
    def n_inputs(self) -> int:
        return self.blocks[0].n_inputs

    @property
    def n_outputs(self) -> int:
        return self.blocks[0].n_outputs


@dataclass(frozen=True)
class RealizationReport:
    """Worst-case defects of a realization, compared against a tolerance.

    ``rule_defect`` is None when no game was supplied.
    """

    projection_defect: float
    completeness_defect: float
    rule_defect: Optional[float]
    tolerance: float
    passed: bool


@dataclass(frozen=True)
class MarginalReport:
    """Defects of measurement operators extracted from a composite round."""

    independence_defect: float
    projection_defect: float
    completeness_defect: float


def verify_realization(
    r: Realization, g: Optional[Game] = None, tol: float = 1e-9
) -> RealizationReport:
    """Measure how far the blocks are from honest projective measurements.

    Reports the worst deviation from Hermitian idempotency, the worst
    completeness deviation, and, when a game is given, the largest operator
    norm of a product P[x][a] P[y][b] over losing tuples (x, y, a, b).
    """
    proj = 0.0
    comp = 0.0
    rule: Optional[float] = None
    if g is not None:
        if (g.n_inputs, g.n_outputs) != (r.n_inputs, r.n_outputs):
            raise DimensionMismatch("game shape does not match realization")
        rule = 0.0
    for blk in r.blocks:
        eye = np.eye(blk.dim)
        for row in blk.projections:
            total = np.zeros((blk.dim, blk.dim), dtype=complex)
            for p in row:
                proj = max(proj, operator_norm(p - p.conj().T))
                proj = max(proj, operator_norm(p @ p - p))
                total += p
            comp = max(comp, operator_norm(total - eye))
        if g is not None:
            for x in range(g.n_inputs):
                for y in range(g.n_inputs):
                    for a in range(g.n_outputs):
                        for b in range(g.n_outputs):
                            if not g.allowed[x, y, a, b]:
                                prod = blk.projections[x][a] @ blk.projections[y][b]
                                rule = max(rule, operator_norm(prod))
    # passing is about being an honest measurement family; the rule defect
    # is reported but only measures perfection, not validity
    return RealizationReport(proj, comp, rule, tol, max(proj, comp) <= tol)


def correlation_of(r: Realization) -> Correlation:
    """The correlation table of a realization under the normalized traces."""
    n, k = r.n_inputs, r.n_outputs
    values = np.zeros((n, n, k, k))
    for blk in r.blocks:
        scale = blk.weight / blk.dim
        for x in range(n):
            for y in range(n):
                for a in range(k):
                    pa = blk.projections[x][a]
                    for b in range(k):
                        values[x, y, a, b] += scale * float(
                            np.trace(pa @ blk.projections[y][b]).real
                        )
    return Correlation(n, k, values)


def tensor_realizations(r1: Realization, r2: Realization) -> Realization:
    """Blockwise Kronecker product; composite indices flatten row-major."""
    n2, k2 = r2.n_inputs, r2.n_outputs
    blocks = []
    for b1 in r1.blocks:
        for b2 in r2.blocks:
            projections = []
            for x1 in range(r1.n_inputs):
                for x2 in range(n2):
                    row = []
                    for a1 in range(r1.n_outputs):
                        for a2 in range(k2):
                            row.append(np.kron(b1.projections[x1][a1], b2.projections[x2][a2]))
                    projections.append(tuple(row))
            blocks.append(Block(b1.weight * b2.weight, tuple(projections)))
    return Realization(tuple(blocks))


def extract_marginal(
    r: Realization,
    which: str,
    factor_dims: tuple[tuple[int, int], tuple[int, int]],
) -> tuple[Realization, MarginalReport]:
    """Recover one factor's measurements from a composite-round realization.

    For the first factor the operators are f[x1][a1] = sum over b of
    P[(x1, 0)][(a1, b)], built at the fixed reference second question 0; the
    independence defect reports how much the same construction varies as the
    reference question changes.  For perfect strategies of a product game the
    variation vanishes, so a small defect certifies that the marginal is
    well defined.
    """
    (n1, k1), (n2, k2) = factor_dims
    if n1 * n2 != r.n_inputs or k1 * k2 != r.n_outputs:
        raise DimensionMismatch(
            f"factors {factor_dims} do not compose to ({r.n_inputs}, {r.n_outputs})"
        )
    if which not in ("first", "second"):
        raise ValueError("which must be 'first' or 'second'")

    def composite(x1: int, x2: int, a1: int, a2: int) -> tuple[int, int]:
        return x1 * n2 + x2, a1 * k2 + a2

    independence = 0.0
    blocks = []
    for blk in r.blocks:
        if which == "first":
            refs = []
            for x2 in range(n2):
                fam = []
                for x1 in range(n1):
                    row = []
                    for a1 in range(k1):
                        acc = np.zeros((blk.dim, blk.dim), dtype=complex)
                        for b in range(k2):
                            xi, ai = composite(x1, x2, a1, b)
                            acc += blk.projections[xi][ai]
                        row.append(acc)
                    fam.append(row)
                refs.append(fam)
        else:
            refs = []
            for x1 in range(n1):
                fam = []
                for x2 in range(n2):
                    row = []
                    for a2 in range(k2):
                        acc = np.zeros((blk.dim, blk.dim), dtype=complex)
                        for a in range(k1):
                            xi, ai = composite(x1, x2, a, a2)
                            acc += blk.projections[xi][ai]
                        row.append(acc)
                    fam.append(row)
                refs.append(fam)
        base = refs[0]
        for other in refs[1:]:
            for fam_row, other_row in zip(base, other):
                for f0, f1 in zip(fam_row, other_row):
                    independence = max(independence, operator_norm(f0 - f1))
        blocks.append(
            Block(blk.weight, tuple(tuple(row) for row in base))
        )
    out = Realization(tuple(blocks))
    rep = verify_realization(out)
    return out, MarginalReport(independence, rep.projection_defect, rep.completeness_defect)


# ---------------------------------------------------------------------------
# see-saw search
# ---------------------------------------------------------------------------


def _positive_split(
    h: np.ndarray, zero_tol: float = 1e-12
) -> tuple[np.ndarray, np.ndarray]:
    """Split the identity into the (>= -zero_tol) and (< -zero_tol) eigenspaces.

    Eigenvalues within zero_tol of zero count as nonnegative, so ties go to
    the first outcome deterministically.
    """
    w, v = np.linalg.eigh((h + h.conj().T) / 2)
    keep = w >= -zero_tol
    v_pos = v[:, keep]
    p = v_pos @ v_pos.conj().T
    p = (p + p.conj().T) / 2
    return p, np.eye(h.shape[0], dtype=complex) - p


def _objective(coeff: np.ndarray, projs: list[list[np.ndarray]], dim: int) -> float:
    total = 0.0
    n, _, k, _ = coeff.shape
    for x in range(n):
        for y in range(n):
            for a in range(k):
                for b in range(k):
                    c = coeff[x, y, a, b]
                    if c != 0.0:
                        total += c * float(np.trace(projs[x][a] @ projs[y][b]).real) / dim
    return total


def _update_input(
    coeff: np.ndarray, projs: list[list[np.ndarray]], x: int, dim: int
) -> None:
    """Replace the measurement at question x by an exact partial optimizer."""
    n, _, k, _ = coeff.shape
    eye = np.eye(dim, dtype=complex)
    h = []
    for a in range(k):
        acc = coeff[x, x, a, a] * eye.copy()
        for y in range(n):
            if y == x:
                continue
            for b in range(k):
                c = coeff[x, y, a, b] + coeff[y, x, b, a]
                if c != 0.0:
                    acc = acc + c * projs[y][b]
        h.append(acc / dim)
    if k == 1:
        projs[x][0] = eye
        return
    if k == 2:
        p0, p1 = _positive_split(h[0] - h[1])
        projs[x][0], projs[x][1] = p0, p1
        return
    # more than two outcomes: exact two-outcome merges until no sweep improves
    current = [projs[x][a] for a in range(k)]

    def partial(ps: list[np.ndarray]) -> float:
        return sum(float(np.trace(ps[a] @ h[a]).real) for a in range(k))

    score = partial(current)
    while True:
        improved = False
        for i in range(k):
            for j in range(i + 1, k):
                s = current[i] + current[j]
                wvals, wvecs = np.linalg.eigh((s + s.conj().T) / 2)
                cols = wvecs[:, wvals > 0.5]
                if cols.shape[1] == 0:
                    continue
                d = cols.conj().T @ (h[i] - h[j]) @ cols
                d = (d + d.conj().T) / 2
                evals, evecs = np.linalg.eigh(d)
                pos = evecs[:, evals >= -1e-12]
                vi = cols @ pos
                pi = vi @ vi.conj().T
                pi = (pi + pi.conj().T) / 2
                pj = s - pi
                new_score = (
                    score
                    - float(np.trace(current[i] @ h[i]).real)
                    - float(np.trace(current[j] @ h[j]).real)
                    + float(np.trace(pi @ h[i]).real)
                    + float(np.trace(pj @ h[j]).real)
                )
                if new_score > score + 1e-15:
                    current[i], current[j] = pi, pj
                    score = new_score
                    improved = True
        if not improved:
            break
    for a in range(k):
        projs[x][a] = current[a]


def seesaw_lower_bound(
    g: Game,
    d: Density,
    dim: int,
    restarts: int = 20,
    seed: int = 0,
    max_iters: int = 500,
) -> tuple[float, Realization]:
    """Search dimension-``dim`` projective strategies for a high game value.

    Alternating exact partial optimizations: questions are updated cyclically,
    each update replacing one measurement by a spectral-projection optimizer,
    so the value never decreases within a restart.  The first restart starts
    from the best deterministic strategy (giving a value at least the local
    one); the rest start from seeded random measurement families.  Returns
    the best value found and its realization.
    """
    if d.n_inputs != g.n_inputs:
        raise DimensionMismatch("density and game disagree on question count")
    if dim < 1:
        raise ValueError("dimension must be positive")
    n, k = g.n_inputs, g.n_outputs
    coeff = d.as_float()[:, :, None, None] * g.allowed
    best_value = -1.0
    best_projs: Optional[list[list[np.ndarray]]] = None

    for restart in range(restarts):
        if restart == 0:
            projs = _deterministic_start(g, d, dim)
        else:
            rng = np.random.default_rng([seed, restart])
            projs = _balanced_start(n, k, dim, rng)
        value = _objective(coeff, projs, dim)
        for _ in range(max_iters):
            for x in range(n):
                _update_input(coeff, projs, x, dim)
            new_value = _objective(coeff, projs, dim)
            assert new_value >= value - 1e-12, "see-saw objective decreased"
            if new_value - value < 1e-13:
                value = new_value
                break
            value = new_value
        if value > best_value:
            best_value = value
            best_projs = [list(row) for row in projs]

    assert best_projs is not None
    block = Block(1.0, tuple(tuple(row) for row in best_projs))
    return float(best_value), Realization((block,))


def _balanced_start(
    n: int, k: int, dim: int, rng: np.random.Generator
) -> list[list[np.ndarray]]:
    """Haar-rotated measurements with ranks as equal as possible.

    Starts with every outcome of rank 0 or near dim/k explore the landscape
    poorly: a trivial outcome at one question tends to pull the whole ascent
    into a commuting (deterministic) configuration.
    """
    ranks = [dim // k + (1 if a < dim % k else 0) for a in range(k)]
    starts = []
    for _ in range(n):
        rng.shuffle(ranks)
        u = random_unitary(dim, rng)
        row = []
        offset = 0
        for rank in ranks:
            cols = u[:, offset : offset + rank]
            row.append(cols @ cols.conj().T)
            offset += rank
        starts.append(row)
    return starts


def _deterministic_start(g: Game, d: Density, dim: int) -> list[list[np.ndarray]]:
    """Projections of the best answer function (or the constant one if huge)."""
    from .exact import DEFAULT_ENUMERATION_CAP, local_synchronous_value

    if g.n_outputs**g.n_inputs <= min(1 << 16, DEFAULT_ENUMERATION_CAP):
        f = local_synchronous_value(g, d).witness.assignment
    else:
        f = tuple(0 for _ in range(g.n_inputs))
    eye = np.eye(dim, dtype=complex)
    zero = np.zeros((dim, dim), dtype=complex)
    return [
        [eye.copy() if a == f[x] else zero.copy() for a in range(g.n_outputs)]
        for x in range(g.n_inputs)
    ]


# ---------------------------------------------------------------------------
# the one-parameter family of candidate two-dimensional strategies
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TFamilyPoint:
    """One member of the candidate family with trace sum t.

    The family consists of three 2x2 projections whose sum is t times the
    identity; ``ratio`` is the forced common value of the off-diagonal
    overlap parameter, ``tau_value`` the game value it yields on the bundled
    three-question game where applicable, and ``feasible`` records whether
    honest projections with these parameters exist.
    """

    t: Fraction
    ratio: Fraction
    tau_value: Optional[Fraction]
    feasible: bool


_T_TABLE: dict[Fraction, tuple[Optional[Fraction], bool]] = {
    Fraction(0): (None, False),
    Fraction(1): (None, False),
    Fraction(2): (Fraction(5, 9), True),
    Fraction(3): (Fraction(1, 3), True),
    Fraction(3, 2): (Fraction(7, 12), True),
}


def t_family(t: Union[int, Fraction]) -> TFamilyPoint:
    """Evaluate the trace-sum-t family member; only five t values are allowed.

    The algebraic constraints force ratio = (2t - t^2) / (6t - 2t^2 - 3) and
    admit solutions only at t in {0, 1, 3/2, 2, 3}; of these, t = 0 and t = 1
    are flagged infeasible (a negative entry, respectively a non-projection).
    """
    t = Fraction(t)
    if t not in _T_TABLE:
        raise InfeasibleT(f"no family member with trace sum {t}")
    denom = 6 * t - 2 * t * t - 3
    if denom == 0:
        raise InfeasibleT(f"ratio undefined at trace sum {t}")
    ratio = (2 * t - t * t) / denom
    tau_value, feasible = _T_TABLE[t]
    return TFamilyPoint(t, ratio, tau_value, feasible)


def example2_witness() -> Realization:
    """The optimal two-dimensional strategy for the bundled three-question game.

    Three real 2x2 projections with pairwise normalized-trace overlaps 1/8
    and sum (3/2) I; the second answers are the complements.
    """
    s = np.sqrt(3.0) / 4.0
    p = np.array([[1.0, 0.0], [0.0, 0.0]])
    q = np.array([[0.25, s], [s, 0.75]])
    r = np.array([[0.25, -s], [-s, 0.75]])
    eye = np.eye(2)
    projections = tuple(
        (np.asarray(m, dtype=complex), np.asarray(eye - m, dtype=complex))
        for m in (p, q, r)
    )
    return Realization((Block(1.0, projections),))
