"""Small dense linear algebra helpers used across modules."""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "operator_norm",
    "random_unitary",
    "random_weak_composition",
    "random_pvm_family",
    "svec",
    "unsvec",
    "svec_indices",
]

_SQRT2 = math.sqrt(2.0)


def operator_norm(m: np.ndarray) -> float:
    """Largest singular value."""
    if m.size == 0:
        return 0.0
    return float(np.linalg.norm(m, 2))


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Gaussian matrix."""
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(z)
    # fix the phase ambiguity of QR so the distribution is Haar
    phases = np.diag(r).copy()
    phases /= np.abs(phases)
    return q * phases


def random_weak_composition(total: int, parts: int, rng: np.random.Generator) -> tuple[int, ...]:
    """Uniform composition of ``total`` into ``parts`` nonnegative integers.

    Sampled by unranking a uniform index into the stars-and-bars list, so the
    draw is exactly uniform over all C(total + parts - 1, parts - 1) outcomes.
    """
    if parts == 1:
        return (total,)
    count = math.comb(total + parts - 1, parts - 1)
    idx = int(rng.integers(count))
    out = []
    remaining = total
    for slot in range(parts - 1):
        first = 0
        while True:
            # number of compositions with this slot fixed to ``first``
            block = math.comb(remaining - first + parts - slot - 2, parts - slot - 2)
            if idx < block:
                break
            idx -= block
            first += 1
        out.append(first)
        remaining -= first
    out.append(remaining)
    return tuple(out)


def random_pvm_family(
    n_inputs: int, n_outputs: int, dim: int, rng: np.random.Generator
) -> list[list[np.ndarray]]:
    """One random projective measurement per question.

    Each measurement picks a uniformly random rank pattern and conjugates the
    corresponding coordinate projections by a Haar unitary.  Zero ranks are
    allowed, so some outcomes may be the zero projection.
    """
    family = []
    for _ in range(n_inputs):
        ranks = random_weak_composition(dim, n_outputs, rng)
        u = random_unitary(dim, rng)
        projs = []
        start = 0
        for r in ranks:
            cols = u[:, start : start + r]
            projs.append(cols @ cols.conj().T)
            start += r
        family.append(projs)
    return family


def svec_indices(n: int) -> list[tuple[int, int]]:
    """Upper-triangle cell order used by svec/unsvec."""
    return [(i, j) for i in range(n) for j in range(i, n)]


def svec(m: np.ndarray) -> np.ndarray:
    """Stack the upper triangle with off-diagonals scaled by sqrt(2).

    Preserves inner products: <A, B> = svec(A) . svec(B) for symmetric A, B.
    """
    n = m.shape[0]
    out = np.empty(n * (n + 1) // 2)
    k = 0
    for i in range(n):
        out[k] = m[i, i]
        k += 1
        row = m[i, i + 1 :]
        out[k : k + row.size] = row * _SQRT2
        k += row.size
    return out


def unsvec(v: np.ndarray, n: int) -> np.ndarray:
    """Inverse of svec."""
    out = np.zeros((n, n))
    k = 0
    for i in range(n):
        out[i, i] = v[k]
        k += 1
        cnt = n - i - 1
        row = v[k : k + cnt] / _SQRT2
        out[i, i + 1 :] = row
        out[i + 1 :, i] = row
        k += cnt
    return out
