"""Polynomial layer: algebra, rewriting, trace identities."""

from fractions import Fraction

import numpy as np
import pytest

from syncgames import (
    NCPoly,
    cyclic_normal_form,
    equal_mod_relations,
    evaluate,
    example1,
    example2,
    game_polynomial,
    product,
    product_density,
    reduce,
)
from syncgames.linalg import random_pvm_family


def _letter(x: int, a: int, dims=(2, 2)) -> NCPoly:
    return NCPoly(dims, {((x, a),): Fraction(1)})


def test_addition_and_scalar_multiplication():
    p = _letter(0, 0) + _letter(0, 0)
    assert p.terms == {((0, 0),): Fraction(2)}
    assert (3 * _letter(1, 0)).terms == {((1, 0),): Fraction(3)}
    zero = _letter(0, 0) - _letter(0, 0)
    assert zero.terms == {}


def test_multiplication_concatenates_words():
    p = _letter(0, 0) * _letter(1, 1)
    assert p.terms == {((0, 0), (1, 1)): Fraction(1)}


def test_game_polynomial_example1():
    g, d = example1()
    h = 4 * game_polynomial(g, d)
    e = lambda x, a: ((x, a),)
    assert h.terms == {
        e(0, 0) + e(0, 0): 1,
        e(0, 1) + e(0, 1): 1,
        e(0, 0) + e(1, 0): 1,
        e(1, 0) + e(0, 1): 1,
        e(1, 0) + e(1, 0): 1,
        e(1, 1) + e(1, 1): 1,
    }


def test_reduce_applies_projection_and_completeness():
    # e_{x,a} * e_{x,a} collapses, and the last outcome is eliminated
    p = _letter(0, 0) * _letter(0, 0)
    assert reduce(p).terms == {((0, 0),): Fraction(1)}
    assert reduce(_letter(0, 1)).terms == {(): Fraction(1), ((0, 0),): Fraction(-1)}


def test_reduce_two_question_game_form():
    g, d = example1()
    h = reduce(4 * game_polynomial(g, d))
    lhs = cyclic_normal_form(h)
    assert lhs == NCPoly((2, 2), {(): Fraction(2), ((1, 0),): Fraction(1)})


def test_reduce_three_question_game_form():
    g, d = example2()
    h = reduce(9 * game_polynomial(g, d))
    p, q, r = ((0, 0),), ((1, 0),), ((2, 0),)
    expected = {(): Fraction(3)}
    for w in (p, q, r):
        expected[w] = Fraction(2)
    for u, v in ((p, q), (q, p), (q, r), (r, q), (p, r), (r, p)):
        expected[u + v] = Fraction(-1)
    assert h.terms == expected


def test_cyclic_normal_form_identifies_rotations():
    p = NCPoly((2, 2), {((0, 0), (1, 0)): Fraction(1)})
    q = NCPoly((2, 2), {((1, 0), (0, 0)): Fraction(1)})
    assert cyclic_normal_form(p) == cyclic_normal_form(q)
    assert cyclic_normal_form(p - q).terms == {}


def test_evaluate_on_pvm_family():
    rng = np.random.default_rng(5)
    projs = random_pvm_family(2, 2, dim=3, rng=rng)
    g, d = example1()
    h = game_polynomial(g, d)
    val = evaluate(h, projs)
    assert val.shape == (3, 3)
    # the game polynomial of a synchronous game is a sum of products of
    # positive operators with positive weights; its trace stays in [0, 1]
    tr = np.trace(val).real / 3
    assert -1e-12 <= tr <= 1 + 1e-12


def test_equal_mod_relations_detects_reduction_invariance():
    g, d = example1()
    h = 4 * game_polynomial(g, d)
    assert equal_mod_relations(
        cyclic_normal_form(h),
        cyclic_normal_form(reduce(h)),
        trials=10,
        dims=(2, 3),
        seed=1,
        trace_only=True,
    )


def test_equal_mod_relations_rejects_different_polynomials():
    p = _letter(0, 0)
    q = _letter(1, 0)
    assert not equal_mod_relations(p, q, trials=5, dims=(2, 3), seed=2)


def test_squared_game_reduction_preserves_trace():
    g, d = example1()
    gp, dp = product(g, g), product_density(d, d)
    h = 16 * game_polynomial(gp, dp)
    assert len(h.terms) == 36
    assert all(c == 1 for c in h.terms.values())
    assert equal_mod_relations(
        cyclic_normal_form(h),
        cyclic_normal_form(reduce(h)),
        trials=10,
        dims=(2, 4),
        seed=3,
        trace_only=True,
    )


def test_letters_outside_dims_are_rejected():
    from syncgames import IndexOutOfRange

    with pytest.raises(IndexOutOfRange):
        NCPoly((2, 2), {((5, 0),): Fraction(1)})
