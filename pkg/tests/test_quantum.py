"""Operator realizations: witness checks, trace family, see-saw, marginals."""

from fractions import Fraction

import numpy as np
import pytest

from syncgames import (
    Block,
    DimensionMismatch,
    InfeasibleT,
    Realization,
    correlation_of,
    example1,
    example2,
    example2_witness,
    expected_value,
    extract_marginal,
    seesaw_lower_bound,
    synchronicity_game,
    t_family,
    tensor_realizations,
    uniform_density,
    verify_realization,
)
from syncgames.linalg import random_pvm_family


def test_witness_is_a_valid_realization():
    r = example2_witness()
    rep = verify_realization(r)
    assert rep.passed
    assert rep.projection_defect <= 1e-12
    assert rep.completeness_defect <= 1e-12


def test_witness_value_is_seven_twelfths():
    r = example2_witness()
    g, d = example2()
    v = expected_value(correlation_of(r), g, d)
    assert abs(v - 7 / 12) < 1e-12


def test_witness_operator_identities():
    # p + q + r = (3/2) I and p commutes with q + r
    r = example2_witness()
    p, q, rr = (blk[0] for blk in r.blocks[0].projections)
    s = p + q + rr
    assert np.linalg.norm(s - 1.5 * np.eye(2)) <= 1e-15
    c = p @ (q + rr) - (q + rr) @ p
    assert np.linalg.norm(c, 2) <= 1e-15


def test_witness_is_not_perfect_for_the_game():
    g, _ = example2()
    rep = verify_realization(example2_witness(), g)
    assert rep.passed
    assert rep.rule_defect > 0.5


def test_verify_realization_flags_broken_projections():
    bad = Realization(
        (Block(1.0, (((np.array([[0.5]]), np.array([[0.5]])),))),)
    )
    rep = verify_realization(bad)
    assert not rep.passed
    assert rep.projection_defect > 0.1


def test_t_family_values():
    assert t_family(2).tau_value == Fraction(5, 9)
    assert t_family(3).tau_value == Fraction(1, 3)
    assert t_family(Fraction(3, 2)).tau_value == Fraction(7, 12)


def test_t_family_infeasible_points():
    for t in (0, 1):
        pt = t_family(t)
        assert not pt.feasible
        assert pt.tau_value is None
    with pytest.raises(InfeasibleT):
        t_family(4)


def test_t_family_ratio_formula():
    # ratio (2t - t^2) / (6t - 2t^2 - 3) at the five admissible points
    assert t_family(2).ratio == Fraction(0)
    assert t_family(3).ratio == Fraction(1)
    assert t_family(Fraction(3, 2)).ratio == Fraction(1, 2)


def test_seesaw_reaches_witness_value():
    g, d = example2()
    value, r = seesaw_lower_bound(g, d, dim=2, restarts=20, seed=7)
    assert value >= 7 / 12 - 1e-6
    assert isinstance(value, float)
    rep = verify_realization(r)
    assert rep.passed


def test_seesaw_never_beats_dimension_bound_downwards():
    # dim 1 collapses to deterministic strategies
    g, d = example1()
    value, _ = seesaw_lower_bound(g, d, dim=1, restarts=4, seed=0)
    assert abs(value - 3 / 4) < 1e-12


def test_tensor_realizations_and_marginal_roundtrip():
    rng = np.random.default_rng(11)
    r1 = Realization((Block(1.0, tuple(tuple(row) for row in random_pvm_family(2, 2, 3, rng))),))
    r2 = Realization((Block(1.0, tuple(tuple(row) for row in random_pvm_family(2, 2, 2, rng))),))
    rp = tensor_realizations(r1, r2)
    assert rp.n_inputs == 4 and rp.n_outputs == 4
    assert verify_realization(rp).passed

    back, rep = extract_marginal(rp, "first", ((2, 2), (2, 2)))
    assert rep.independence_defect <= 1e-9
    # product correlation restricted to the first factor matches r1
    c1 = correlation_of(r1)
    cb = correlation_of(back)
    assert np.allclose(np.asarray(c1.values), np.asarray(cb.values), atol=1e-10)


def test_extract_marginal_rejects_bad_factorization():
    r = example2_witness()
    with pytest.raises(DimensionMismatch):
        extract_marginal(r, "first", ((2, 2), (2, 2)))


def test_synchronicity_game_perfect_realization():
    # any single PVM copied to both questions plays perfectly
    rng = np.random.default_rng(3)
    pvm = random_pvm_family(1, 3, 3, rng)[0]
    r = Realization((Block(1.0, (tuple(pvm), tuple(pvm))),))
    g = synchronicity_game(2, 3)
    rep = verify_realization(r, g)
    assert rep.passed
    assert rep.rule_defect <= 1e-12
    v = expected_value(correlation_of(r), g, uniform_density(2))
    assert abs(v - 1.0) < 1e-12
