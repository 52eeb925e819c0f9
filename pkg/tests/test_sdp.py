"""Moment-matrix relaxation and the first-order SDP solver."""

import numpy as np
import pytest

from syncgames import (
    NotConverged,
    build_npa,
    example1,
    example2,
    example2_witness,
    moment_feasibility,
    moment_matrix_of,
    objective_of,
    product,
    product_density,
    qc_upper_bound,
    solve_sdp,
)


def test_problem_level1_structure():
    g, d = example1()
    prob = build_npa(g, d, level=1)
    # identity plus one letter per question-answer pair
    assert len(prob.words) == 1 + 2 * 2
    assert prob.words[0] == ()


def test_level1_bound_example1():
    g, d = example1()
    qb = qc_upper_bound(g, d, level=1)
    assert 3 / 4 - 1e-6 <= qb.bound <= 3 / 4 + 1e-4
    assert qb.soundness_margin >= 0
    assert qb.solution.status == "optimal"


def test_level1_bound_dominates_local_value_squared_game():
    g, d = example1()
    gp, dp = product(g, g), product_density(d, d)
    qb = qc_upper_bound(gp, dp, level=1)
    # sound upper bound on the commuting value, never below the local value
    assert qb.bound >= 9 / 16 - 1e-6
    assert qb.bound <= 10 / 16 + 1e-3


def test_level2_bound_example2():
    g, d = example2()
    qb = qc_upper_bound(g, d, level=2)
    assert qb.bound >= 7 / 12 - 1e-6
    assert qb.bound <= 7 / 12 + 1e-3
    assert qb.soundness_margin <= 1e-4


def test_witness_moment_matrix_is_feasible():
    g, d = example2()
    prob = build_npa(g, d, level=2)
    m = moment_matrix_of(prob, example2_witness())
    assert m.shape == (len(prob.words), len(prob.words))
    assert moment_feasibility(prob, m) <= 1e-10
    assert abs(objective_of(prob, m) - 7 / 12) < 1e-12


def test_not_converged_carries_partial_solution():
    g, d = example2()
    prob = build_npa(g, d, level=2)
    with pytest.raises(NotConverged) as info:
        solve_sdp(prob, tol=1e-8, max_iters=3)
    sol = info.value.solution
    assert sol is not None
    assert sol.status == "max_iters"
    assert sol.iterations == 3


def test_qc_upper_raises_not_converged():
    g, d = example2()
    with pytest.raises(NotConverged):
        qc_upper_bound(g, d, level=2, max_iters=2)
