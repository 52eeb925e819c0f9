"""Game model: construction rules, products, densities."""

from fractions import Fraction

import pytest

from syncgames import (
    Density,
    DensityNotNormalized,
    IndexOutOfRange,
    SynchronicityViolation,
    example1,
    example2,
    is_symmetric,
    new_game,
    product,
    product_density,
    synchronicity_game,
    uniform_density,
)


def test_new_game_shape_and_membership():
    g = new_game(2, 2, [(0, 0, 0, 0), (0, 1, 1, 0)])
    assert g.n_inputs == 2 and g.n_outputs == 2
    assert g.allowed.shape == (2, 2, 2, 2)
    assert g.allowed[0, 0, 0, 0] and g.allowed[0, 1, 1, 0]
    assert not g.allowed[1, 1, 0, 0]


def test_new_game_rejects_disagreement_on_repeated_question():
    with pytest.raises(SynchronicityViolation):
        new_game(2, 2, [(1, 1, 0, 1)])


def test_new_game_rejects_out_of_range_indices():
    with pytest.raises(IndexOutOfRange):
        new_game(2, 2, [(2, 0, 0, 0)])
    with pytest.raises(IndexOutOfRange):
        new_game(2, 2, [(0, 0, 0, -1)])


def test_winning_pairs():
    g, _ = example1()
    assert set(g.winning_pairs(0, 0)) == {(0, 0), (1, 1)}
    assert set(g.winning_pairs(0, 1)) == {(0, 0)}
    assert set(g.winning_pairs(1, 0)) == {(0, 1)}


def test_example_games_allow_only_agreement_on_repeated_questions():
    for g, _ in (example1(), example2()):
        for x in range(g.n_inputs):
            pairs = g.winning_pairs(x, x)
            assert pairs
            assert all(a == b for a, b in pairs)


def test_example2_allowed_sets():
    g, _ = example2()
    assert set(g.winning_pairs(0, 1)) == {(0, 1)}
    assert set(g.winning_pairs(1, 0)) == {(0, 1)}
    assert set(g.winning_pairs(1, 2)) == {(0, 1)}
    assert set(g.winning_pairs(2, 1)) == {(0, 1)}
    assert set(g.winning_pairs(0, 2)) == {(1, 0)}
    assert set(g.winning_pairs(2, 0)) == {(1, 0)}
    for x in range(3):
        assert set(g.winning_pairs(x, x)) == {(0, 0), (1, 1)}


def test_product_flattening_is_row_major():
    g, _ = example1()
    gp = product(g, g)
    assert gp.n_inputs == 4 and gp.n_outputs == 4
    # composite (x1, x2) -> 2*x1 + x2 and same for answers
    for x1 in range(2):
        for x2 in range(2):
            for y1 in range(2):
                for y2 in range(2):
                    got = set(gp.winning_pairs(2 * x1 + x2, 2 * y1 + y2))
                    want = {
                        (2 * a1 + a2, 2 * b1 + b2)
                        for a1, b1 in g.winning_pairs(x1, y1)
                        for a2, b2 in g.winning_pairs(x2, y2)
                    }
                    assert got == want


def test_product_of_synchronous_games_is_synchronous():
    g, _ = example2()
    gp = product(g, g)
    for x in range(gp.n_inputs):
        for a in range(gp.n_outputs):
            for b in range(gp.n_outputs):
                if a != b:
                    assert not gp.allowed[x, x, a, b]


def test_synchronicity_game():
    g = synchronicity_game(2, 3)
    # repeated questions force agreement, distinct questions allow anything
    assert set(g.winning_pairs(0, 0)) == {(a, a) for a in range(3)}
    assert set(g.winning_pairs(0, 1)) == {(a, b) for a in range(3) for b in range(3)}


def test_uniform_density_is_exact():
    d = uniform_density(3)
    assert all(w == Fraction(1, 9) for row in d.weights for w in row)
    assert d.is_symmetric()


def test_density_must_normalize():
    half = Fraction(1, 2)
    with pytest.raises(DensityNotNormalized):
        Density(((half, 0), (0, 0)))


def test_density_rejects_negative_weight():
    with pytest.raises(DensityNotNormalized):
        Density(((Fraction(3, 2), Fraction(-1, 2)), (0, 0)))


def test_product_density_multiplies_weights():
    d = uniform_density(2)
    dp = product_density(d, d)
    assert dp.n_inputs == 4
    assert all(w == Fraction(1, 16) for row in dp.weights for w in row)


def test_examples_are_not_symmetric():
    # both bundled games weight (x, y) differently from (y, x)
    g1, _ = example1()
    g2, _ = example2()
    assert not is_symmetric(g1)
    assert not is_symmetric(g2)
    assert is_symmetric(synchronicity_game(2, 2))
