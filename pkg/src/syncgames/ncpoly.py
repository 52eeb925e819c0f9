"""Polynomials in the projection generators attached to a question/answer set.

Words are tuples of letters (x, a), one projection generator per question x
and answer a.  The defining relations of the ambient algebra are

  * each generator is a self-adjoint idempotent,
  * generators with the same question and different answers multiply to zero,
  * for each question the generators sum to the identity,

and a game additionally kills products e[x,a] e[y,b] on losing tuples.
Arithmetic is free (no implicit rewriting); ``reduce`` applies the relations
explicitly so callers control which algebra they are working in.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import DimensionMismatch, IndexOutOfRange
from .games import Density, Game
from .linalg import operator_norm, random_pvm_family

__all__ = [
    "Word",
    "NCPoly",
    "game_polynomial",
    "reduce",
    "cyclic_normal_form",
    "evaluate",
    "equal_mod_relations",
]

Word = tuple[tuple[int, int], ...]

Scalar = (int, Fraction)


def _clean(terms: dict[Word, Fraction]) -> dict[Word, Fraction]:
    return {w: c for w, c in terms.items() if c != 0}


@dataclass(frozen=True, eq=False)
class NCPoly:
    """A rational linear combination of generator words.

    ``dims`` is (n_inputs, n_outputs); every letter (x, a) of every word must
    satisfy 0 <= x < n_inputs and 0 <= a < n_outputs.
    """

    dims: tuple[int, int]
    terms: dict[Word, Fraction]

    def __post_init__(self) -> None:
        n, k = self.dims
        cleaned: dict[Word, Fraction] = {}
        for word, coef in self.terms.items():
            for x, a in word:
                if not (0 <= x < n and 0 <= a < k):
                    raise IndexOutOfRange(f"letter ({x}, {a}) outside dims {self.dims}")
            c = Fraction(coef)
            if c != 0:
                cleaned[tuple(word)] = c
        object.__setattr__(self, "terms", cleaned)

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(dims: tuple[int, int]) -> "NCPoly":
        return NCPoly(dims, {})

    @staticmethod
    def one(dims: tuple[int, int]) -> "NCPoly":
        return NCPoly(dims, {(): Fraction(1)})

    @staticmethod
    def generator(dims: tuple[int, int], x: int, a: int) -> "NCPoly":
        return NCPoly(dims, {((x, a),): Fraction(1)})

    # -- arithmetic --------------------------------------------------------

    def _require_same_dims(self, other: "NCPoly") -> None:
        if self.dims != other.dims:
            raise DimensionMismatch(f"dims {self.dims} vs {other.dims}")

    def __add__(self, other: "NCPoly") -> "NCPoly":
        if not isinstance(other, NCPoly):
            return NotImplemented
        self._require_same_dims(other)
        terms = dict(self.terms)
        for w, c in other.terms.items():
            terms[w] = terms.get(w, Fraction(0)) + c
        return NCPoly(self.dims, terms)

    def __sub__(self, other: "NCPoly") -> "NCPoly":
        return self + (-other)

    def __neg__(self) -> "NCPoly":
        return NCPoly(self.dims, {w: -c for w, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, Scalar):
            c = Fraction(other)
            return NCPoly(self.dims, {w: c * v for w, v in self.terms.items()})
        if isinstance(other, NCPoly):
            self._require_same_dims(other)
            terms: dict[Word, Fraction] = {}
            for w1, c1 in self.terms.items():
                for w2, c2 in other.terms.items():
                    w = w1 + w2
                    terms[w] = terms.get(w, Fraction(0)) + c1 * c2
            return NCPoly(self.dims, terms)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, Scalar):
            return self * other
        return NotImplemented

    def adjoint(self) -> "NCPoly":
        """Reverse every word; generators are self-adjoint and coefficients real."""
        return NCPoly(self.dims, {tuple(reversed(w)): c for w, c in self.terms.items()})

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, NCPoly):
            return NotImplemented
        return self.dims == other.dims and self.terms == other.terms

    # -- rendering ---------------------------------------------------------

    def render(self) -> str:
        """Canonical text form: terms sorted by length then letters, 1-based."""
        if not self.terms:
            return "0"
        parts: list[str] = []
        for i, (word, coef) in enumerate(sorted(self.terms.items(), key=lambda t: (len(t[0]), t[0]))):
            mag = abs(coef)
            body = " ".join(f"e[{x + 1},{a + 1}]" for x, a in word)
            if not word:
                s = str(mag)
            elif mag == 1:
                s = body
            else:
                s = f"{mag} {body}"
            if i == 0:
                parts.append(s if coef > 0 else f"-{s}")
            else:
                parts.append(("+ " if coef > 0 else "- ") + s)
        return " ".join(parts)

    def __repr__(self) -> str:
        return f"NCPoly({self.dims}, {self.render()})"


def game_polynomial(g: Game, d: Density) -> NCPoly:
    """Sum of density(x, y) * e[x,a] e[y,b] over winning tuples, unreduced."""
    if d.n_inputs != g.n_inputs:
        raise DimensionMismatch(f"density on {d.n_inputs} questions, game on {g.n_inputs}")
    dims = (g.n_inputs, g.n_outputs)
    terms: dict[Word, Fraction] = {}
    for x in range(g.n_inputs):
        for y in range(g.n_inputs):
            w = d.weights[x][y]
            if w == 0:
                continue
            for a, b in g.winning_pairs(x, y):
                word = ((x, a), (y, b))
                terms[word] = terms.get(word, Fraction(0)) + w
    return NCPoly(dims, terms)


def _reduce_word(word: Word, game: Optional[Game]) -> Optional[Word]:
    """Collapse idempotent repeats and kill orthogonal or losing adjacencies."""
    stack: list[tuple[int, int]] = []
    for letter in word:
        stack.append(letter)
        while len(stack) >= 2:
            (x1, a1), (x2, a2) = stack[-2], stack[-1]
            if x1 == x2 and a1 == a2:
                stack.pop()
                continue
            if x1 == x2:
                return None
            if game is not None and not game.allowed[x1, x2, a1, a2]:
                return None
            break
    return tuple(stack)


def reduce(p: NCPoly, game: Optional[Game] = None) -> NCPoly:
    """Rewrite to the canonical representative used throughout the package.

    First every last-answer generator e[x, k-1] is replaced by
    1 - sum of the earlier answers for x, then adjacent-pair rules run to a
    fixed point: repeats collapse, same-question distinct-answer pairs vanish,
    and, when ``game`` is given, products on losing tuples vanish as well.
    The result never mentions the last answer and is unchanged by a second
    call.  Rewriting preserves the element of the algebra (it does not merge
    trace-equivalent words; see ``cyclic_normal_form`` for that).
    """
    n, k = p.dims
    if game is not None and (game.n_inputs, game.n_outputs) != p.dims:
        raise DimensionMismatch(f"game ({game.n_inputs}, {game.n_outputs}) vs poly {p.dims}")
    # substitute away the last answer of each question
    expanded: dict[Word, Fraction] = {}
    one = NCPoly.one(p.dims)
    substitutes: dict[int, NCPoly] = {}

    def last_answer_poly(x: int) -> NCPoly:
        if x not in substitutes:
            s = one
            for a in range(k - 1):
                s = s - NCPoly.generator(p.dims, x, a)
            substitutes[x] = s
        return substitutes[x]

    for word, coef in p.terms.items():
        if all(a != k - 1 for _, a in word):
            expanded[word] = expanded.get(word, Fraction(0)) + coef
            continue
        prod = NCPoly(p.dims, {(): coef})
        for x, a in word:
            factor = last_answer_poly(x) if a == k - 1 else NCPoly.generator(p.dims, x, a)
            prod = prod * factor
        for w, c in prod.terms.items():
            expanded[w] = expanded.get(w, Fraction(0)) + c
    # adjacent-pair rules to a fixed point
    out: dict[Word, Fraction] = {}
    for word, coef in _clean(expanded).items():
        reduced = _reduce_word(word, game)
        if reduced is None:
            continue
        out[reduced] = out.get(reduced, Fraction(0)) + coef
    return NCPoly(p.dims, out)


def cyclic_normal_form(p: NCPoly) -> NCPoly:
    """Replace each word by its least cyclic rotation, merging coefficients.

    Traces are invariant under cyclic rotation, so two reduced polynomials
    with equal cyclic normal forms have equal trace under every trace
    functional on the algebra.  The converse fails in general: this is a
    sufficient test only.  The output usually represents a different element
    of the algebra than the input.
    """
    terms: dict[Word, Fraction] = {}
    for word, coef in p.terms.items():
        if word:
            canon = min(word[i:] + word[:i] for i in range(len(word)))
        else:
            canon = word
        terms[canon] = terms.get(canon, Fraction(0)) + coef
    return NCPoly(p.dims, terms)


def evaluate(p: NCPoly, projections: Sequence[Sequence[np.ndarray]]) -> np.ndarray:
    """Substitute concrete matrices for the generators.

    ``projections[x][a]`` is the matrix for generator (x, a); the family must
    cover all questions and answers of ``p.dims`` with square matrices of one
    common size.  Returns a complex matrix.
    """
    n, k = p.dims
    if len(projections) != n or any(len(row) != k for row in projections):
        raise DimensionMismatch(f"projection family does not match dims {p.dims}")
    dim = int(np.asarray(projections[0][0]).shape[0])
    for row in projections:
        for m in row:
            if np.asarray(m).shape != (dim, dim):
                raise DimensionMismatch("projection blocks have mixed sizes")
    total = np.zeros((dim, dim), dtype=complex)
    eye = np.eye(dim, dtype=complex)
    for word, coef in p.terms.items():
        acc = eye
        for x, a in word:
            acc = acc @ np.asarray(projections[x][a], dtype=complex)
        total += float(coef) * acc
    return total


def equal_mod_relations(
    p1: NCPoly,
    p2: NCPoly,
    trials: int = 30,
    dims: Sequence[int] = (2, 3, 4),
    seed: int = 0,
    trace_only: bool = False,
    tol: float = 1e-9,
) -> bool:
    """Probabilistic equality check on random projective realizations.

    Evaluates both polynomials on ``trials`` pseudo-random measurement
    families, cycling through the listed matrix sizes, and compares either
    the full matrices in operator norm or (``trace_only``) the normalized
    traces.  Agreement on all trials is strong evidence of equality in the
    algebra; disagreement on any trial is a proof of inequality.
    """
    if p1.dims != p2.dims:
        raise DimensionMismatch(f"dims {p1.dims} vs {p2.dims}")
    n, k = p1.dims
    rng = np.random.default_rng(seed)
    diff = p1 - p2
    for t in range(trials):
        dim = int(dims[t % len(dims)])
        family = random_pvm_family(n, k, dim, rng)
        m = evaluate(diff, family)
        if trace_only:
            if abs(np.trace(m)) / dim > tol:
                return False
        elif operator_norm(m) > tol:
            return False
    return True
