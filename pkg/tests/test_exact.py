"""Exact layer: enumeration, rational LP, certificates."""

from fractions import Fraction

import pytest

from syncgames import (
    DeterministicStrategy,
    EnumerationTooLarge,
    LPInfeasible,
    LPProblem,
    LPUnbounded,
    deterministic_scores,
    example1,
    example2,
    local_synchronous_value,
    new_game,
    ns_lp_problem,
    ns_synchronous_value,
    product,
    product_density,
    simplex_solve,
    strategy_score,
    supermultiplicativity_report,
    synchronicity_game,
    uniform_density,
    verify_lp_certificate,
)


def test_local_value_example1():
    g, d = example1()
    rep = local_synchronous_value(g, d)
    assert rep.value == Fraction(3, 4)
    assert strategy_score(g, d, rep.witness) == Fraction(3, 4)
    assert rep.witness.assignment == (0, 0)


def test_deterministic_scores_example1():
    g, d = example1()
    scores = [s for _, s in deterministic_scores(g, d)]
    assert scores == [Fraction(n, 4) for n in (3, 2, 3, 2)]


def test_deterministic_scores_example2():
    g, d = example2()
    scores = [s for _, s in deterministic_scores(g, d)]
    assert scores == [Fraction(n, 9) for n in (3, 5, 5, 5, 5, 5, 5, 3)]


def test_local_value_example2():
    g, d = example2()
    assert local_synchronous_value(g, d).value == Fraction(5, 9)


def test_local_value_example1_squared():
    g, d = example1()
    gp, dp = product(g, g), product_density(d, d)
    rep = local_synchronous_value(gp, dp)
    assert rep.value == Fraction(9, 16)
    assert rep.value == Fraction(3, 4) ** 2


def test_local_value_example2_squared():
    g, d = example2()
    gp, dp = product(g, g), product_density(d, d)
    rep = local_synchronous_value(gp, dp)
    assert rep.value == Fraction(25, 81)
    assert rep.value == Fraction(5, 9) ** 2


def test_enumeration_cap():
    g = synchronicity_game(8, 8)
    with pytest.raises(EnumerationTooLarge):
        local_synchronous_value(g, uniform_density(8), cap=10**6)


def test_supermultiplicativity_report_example1():
    g, d = example1()
    rep = supermultiplicativity_report(g, d, g, d)
    assert rep.value1 == rep.value2 == Fraction(3, 4)
    assert rep.tensor_score == Fraction(9, 16)
    assert rep.product_value == Fraction(9, 16)
    assert rep.gap == 0
    # tensor_score is always a lower bound for the product value
    assert rep.product_value >= rep.value1 * rep.value2


def test_simplex_on_small_lp():
    # maximize x0 + x1 s.t. x0 + 2 x1 <= 4, x0 <= 3, x >= 0
    lp = LPProblem(
        c=(Fraction(1), Fraction(1)),
        a_eq=(),
        b_eq=(),
        a_ub=((Fraction(1), Fraction(2)), (Fraction(1), Fraction(0))),
        b_ub=(Fraction(4), Fraction(3)),
    )
    sol = simplex_solve(lp)
    assert sol.value == Fraction(7, 2)
    assert verify_lp_certificate(lp, sol)


def test_simplex_detects_infeasible():
    lp = LPProblem(
        c=(Fraction(1),),
        a_eq=((Fraction(1),),),
        b_eq=(Fraction(-1),),
        a_ub=(),
        b_ub=(),
    )
    with pytest.raises(LPInfeasible):
        simplex_solve(lp)


def test_simplex_detects_unbounded():
    lp = LPProblem(
        c=(Fraction(1),),
        a_eq=(),
        b_eq=(),
        a_ub=(),
        b_ub=(),
    )
    with pytest.raises(LPUnbounded):
        simplex_solve(lp)


def test_ns_value_example1():
    g, d = example1()
    rep = ns_synchronous_value(g, d)
    assert rep.value == Fraction(3, 4)
    assert rep.certificate.verified
    assert verify_lp_certificate(ns_lp_problem(g, d), rep.certificate)


def test_ns_value_example2_strictly_above_local():
    g, d = example2()
    rep = ns_synchronous_value(g, d)
    assert rep.value == Fraction(2, 3)
    assert rep.value > local_synchronous_value(g, d).value
    assert rep.certificate.verified


def test_ns_dominates_local_on_small_game():
    g = new_game(
        2, 2, [(0, 0, 0, 0), (0, 0, 1, 1), (0, 1, 0, 1), (1, 1, 0, 0), (1, 1, 1, 1)]
    )
    d = uniform_density(2)
    assert ns_synchronous_value(g, d).value >= local_synchronous_value(g, d).value
