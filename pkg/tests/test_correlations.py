"""Correlations: deterministic embeddings, tensor products, marginals."""

from fractions import Fraction

import numpy as np

from syncgames import (
    DeterministicStrategy,
    example1,
    example2,
    example2_witness,
    correlation_of,
    expected_value,
    from_deterministic,
    is_nonsignalling,
    is_perfect,
    is_synchronous,
    marginal,
    strategy_score,
    tensor,
)


def test_from_deterministic_is_synchronous_and_nonsignalling():
    f = DeterministicStrategy((0, 1, 1))
    p = from_deterministic(f, 2)
    assert is_synchronous(p)
    assert is_nonsignalling(p)
    # exact entries are 0/1 indicators of (f(x), f(y))
    assert p.exact[(0, 1, 0, 1)] == 1
    assert p.exact.get((0, 1, 1, 0), Fraction(0)) == 0


def test_expected_value_matches_strategy_score():
    for g, d in (example1(), example2()):
        n, k = g.n_inputs, g.n_outputs
        for code in range(k**n):
            f = DeterministicStrategy(
                tuple((code // k**x) % k for x in range(n))
            )
            p = from_deterministic(f, k)
            assert expected_value(p, g, d) == strategy_score(g, d, f)


def test_correlation_of_witness():
    r = example2_witness()
    p = correlation_of(r)
    g, d = example2()
    assert is_synchronous(p, tol=1e-12)
    assert is_nonsignalling(p, tol=1e-12)
    assert not is_perfect(p, g)
    v = expected_value(p, g, d)
    assert abs(v - 7 / 12) < 1e-12


def test_tensor_of_deterministic_correlations():
    f1 = DeterministicStrategy((0, 1))
    f2 = DeterministicStrategy((1, 0))
    p = tensor(from_deterministic(f1, 2), from_deterministic(f2, 2))
    assert p.n_inputs == 4 and p.n_outputs == 4
    # composite strategy answers 2*f1(x1) + f2(x2) on question 2*x1 + x2
    q = from_deterministic(DeterministicStrategy((1, 0, 3, 2)), 4)
    assert p.exact == q.exact


def test_marginal_recovers_factor():
    f1 = DeterministicStrategy((0, 1))
    f2 = DeterministicStrategy((1, 1))
    p = tensor(from_deterministic(f1, 2), from_deterministic(f2, 2))
    m = marginal(p, fixed_x2=0, fixed_y2=0, factor_dims=((2, 2), (2, 2)))
    assert m.exact == from_deterministic(f1, 2).exact


def test_correlation_values_are_floats_of_exact():
    f = DeterministicStrategy((1, 0))
    p = from_deterministic(f, 2)
    arr = np.asarray(p.values)
    assert arr.shape == (2, 2, 2, 2)
    assert arr[0, 1, 1, 0] == 1.0
