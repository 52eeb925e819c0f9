"""Named verification checks over the bundled example games.

Each check recomputes one of the package's reference results from scratch
and reports pass/fail with the measured quantities.  The CLI ``verify``
command and the acceptance test suite both run this list.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable

import numpy as np

from .correlations import expected_value
from .exact import (
    deterministic_scores,
    local_synchronous_value,
    ns_lp_problem,
    ns_synchronous_value,
    strategy_score,
    supermultiplicativity_report,
    verify_lp_certificate,
)
from .games import (
    Density,
    Game,
    new_game,
    product,
    product_density,
    synchronicity_game,
    uniform_density,
)
from .linalg import operator_norm, random_pvm_family
from .ncpoly import (
    NCPoly,
    cyclic_normal_form,
    equal_mod_relations,
    game_polynomial,
    reduce,
)
from .quantum import (
    Block,
    Realization,
    correlation_of,
    example2_witness,
    extract_marginal,
    seesaw_lower_bound,
    t_family,
    tensor_realizations,
    verify_realization,
)
from .sdp import build_npa, moment_feasibility, moment_matrix_of, objective_of, qc_upper_bound

__all__ = ["CheckResult", "CHECKS", "example1", "example2", "run_checks"]


@dataclass(frozen=True)
class CheckResult:
    name: str
    category: str
    passed: bool
    details: tuple[str, ...]
    elapsed: float


def example1() -> tuple[Game, Density]:
    """Two questions, two answers; the bundled example1.game."""
    wins = [
        (0, 0, 0, 0),
        (0, 0, 1, 1),
        (0, 1, 0, 0),
        (1, 0, 0, 1),
        (1, 1, 0, 0),
        (1, 1, 1, 1),
    ]
    return new_game(2, 2, wins), uniform_density(2)


def example2() -> tuple[Game, Density]:
    """Three questions, two answers, symmetric rule; the bundled example2.game."""
    wins = [
        (0, 0, 0, 0),
        (0, 0, 1, 1),
        (1, 1, 0, 0),
        (1, 1, 1, 1),
        (2, 2, 0, 0),
        (2, 2, 1, 1),
        (0, 1, 0, 1),
        (1, 0, 0, 1),
        (1, 2, 0, 1),
        (2, 1, 0, 1),
        (0, 2, 1, 0),
        (2, 0, 1, 0),
    ]
    return new_game(3, 2, wins), uniform_density(3)


def _check_local_example1() -> tuple[bool, list[str]]:
    g, d = example1()
    rep = local_synchronous_value(g, d)
    ok = rep.value == Fraction(3, 4)
    return ok, [f"value = {rep.value}", f"witness = {rep.witness.assignment}"]


def _check_local_example1_squared() -> tuple[bool, list[str]]:
    # exhaustive optimum over all 4^4 answer functions of the squared game;
    # equals the square of the single-game value, so no supermultiplicative
    # gap for this game
    g, d = example1()
    rep = local_synchronous_value(product(g, g), product_density(d, d))
    ok = rep.value == Fraction(9, 16)
    return ok, [f"value = {rep.value}", f"witness = {rep.witness.assignment}"]


def _check_scores_example2() -> tuple[bool, list[str]]:
    g, d = example2()
    scores = [s for _, s in deterministic_scores(g, d)]
    expected = [Fraction(v, 9) for v in (3, 5, 5, 5, 5, 5, 5, 3)]
    rep = local_synchronous_value(g, d)
    ok = scores == expected and rep.value == Fraction(5, 9)
    return ok, [
        "scores = " + ", ".join(str(s) for s in scores),
        f"value = {rep.value}",
    ]


def _check_local_example2_squared() -> tuple[bool, list[str]]:
    # exhaustive optimum over all 4^9 = 262144 answer functions; again equal
    # to the square of the single-game value
    g, d = example2()
    rep = local_synchronous_value(product(g, g), product_density(d, d))
    ok = rep.value == Fraction(25, 81)
    return ok, [
        f"value = {rep.value}",
        f"square_of_factor_value = {Fraction(5, 9) ** 2}",
        f"witness = {rep.witness.assignment}",
    ]


def _check_witness_example2() -> tuple[bool, list[str]]:
    g, d = example2()
    r = example2_witness()
    rep = verify_realization(r, g, tol=1e-12)
    projs = r.blocks[0].projections
    first = [projs[x][0] for x in range(3)]
    sum_defect = operator_norm(sum(first) - 1.5 * np.eye(2))
    qr = first[1] + first[2]
    comm_defect = operator_norm(first[0] @ qr - qr @ first[0])
    value = expected_value(correlation_of(r), g, d)
    value_err = abs(value - 7 / 12)
    ok = (
        rep.passed
        and sum_defect <= 1e-15
        and comm_defect <= 1e-15
        and value_err <= 1e-12
    )
    return ok, [
        f"projection_defect = {rep.projection_defect:.3e}",
        f"completeness_defect = {rep.completeness_defect:.3e}",
        f"rule_defect = {rep.rule_defect:.3e}",
        f"sum_defect = {sum_defect:.3e}",
        f"commutator_defect = {comm_defect:.3e}",
        f"value = {value!r}",
    ]


def _check_trace_family() -> tuple[bool, list[str]]:
    expected_values = {
        Fraction(3, 2): Fraction(7, 12),
        Fraction(2): Fraction(5, 9),
        Fraction(3): Fraction(1, 3),
    }
    expected_ratios = {
        Fraction(0): Fraction(0),
        Fraction(1): Fraction(1),
        Fraction(2): Fraction(0),
        Fraction(3): Fraction(1),
        Fraction(3, 2): Fraction(1, 2),
    }
    ok = True
    details = []
    for t, ratio in expected_ratios.items():
        pt = t_family(t)
        ok = ok and pt.ratio == ratio
        if t in expected_values:
            ok = ok and pt.feasible and pt.tau_value == expected_values[t]
        else:
            ok = ok and not pt.feasible and pt.tau_value is None
        details.append(f"t = {t}: ratio = {pt.ratio}, value = {pt.tau_value}")
    return ok, details


def _check_seesaw_example2() -> tuple[bool, list[str]]:
    g, d = example2()
    value, _ = seesaw_lower_bound(g, d, dim=2, restarts=20, seed=7)
    ok = value >= 7 / 12 - 1e-6
    return ok, [f"value = {value!r}", f"target = {7 / 12!r}"]


def _check_moment_bound_example1() -> tuple[bool, list[str]]:
    g, d = example1()
    qb = qc_upper_bound(g, d, level=1)
    ok = 0.75 - 1e-6 <= qb.bound <= 0.75 + 1e-4
    return ok, [
        f"bound = {qb.bound!r}",
        f"objective = {qb.objective_value!r}",
        f"soundness_margin = {qb.soundness_margin:.3e}",
        f"iterations = {qb.solution.iterations}",
    ]


def _check_moment_bound_example1_squared() -> tuple[bool, list[str]]:
    # the bound must dominate the exact local value 9/16 and cannot exceed
    # 10/16 + tolerance: the relaxation contains every inequality used by the
    # elementary trace argument giving 10/16 (it lands strictly below it)
    g, d = example1()
    qb = qc_upper_bound(product(g, g), product_density(d, d), level=1)
    ok = 9 / 16 - 1e-6 <= qb.bound <= 10 / 16 + 1e-3
    return ok, [
        f"bound = {qb.bound!r}",
        f"objective = {qb.objective_value!r}",
        f"local_value = {9 / 16!r}",
        f"soundness_margin = {qb.soundness_margin:.3e}",
        f"iterations = {qb.solution.iterations}",
    ]


def _check_moment_bound_example2() -> tuple[bool, list[str]]:
    g, d = example2()
    qb = qc_upper_bound(g, d, level=2)
    problem = build_npa(g, d, level=2)
    x = moment_matrix_of(problem, example2_witness())
    feas = moment_feasibility(problem, x)
    witness_objective = objective_of(problem, x)
    ok = qb.bound >= 7 / 12 - 1e-6 and feas <= 1e-10
    return ok, [
        f"bound = {qb.bound!r}",
        f"gap_above_7/12 = {qb.bound - 7 / 12:.3e}",
        f"witness_feasibility = {feas:.3e}",
        f"witness_objective = {witness_objective!r}",
        f"iterations = {qb.solution.iterations}",
    ]


def _random_game(rng: np.random.Generator) -> tuple[Game, Density]:
    n = int(rng.integers(2, 4))
    k = int(rng.integers(2, 4))
    wins = []
    for x in range(n):
        for y in range(n):
            for a in range(k):
                for b in range(k):
                    if x == y and a != b:
                        continue
                    if rng.random() < 0.5:
                        wins.append((x, y, a, b))
    ints = rng.integers(0, 5, size=(n, n))
    sym = ints + ints.T
    sym[0, 0] += 1
    total = int(sym.sum())
    weights = [
        [Fraction(int(sym[x, y]), total) for y in range(n)] for x in range(n)
    ]
    return new_game(n, k, wins), Density(tuple(tuple(r) for r in weights))


def _check_product_inequality_random() -> tuple[bool, list[str]]:
    rng = np.random.default_rng(11)
    pool = [_random_game(rng) for _ in range(100)]
    ok = True
    enumerated = 0
    strict = 0
    for g, d in pool:
        loc = local_synchronous_value(g, d).value
        ns = ns_synchronous_value(g, d).value
        ok = ok and ns >= loc
    for i in range(0, 100, 2):
        g1, d1 = pool[i]
        g2, d2 = pool[i + 1]
        rep = supermultiplicativity_report(g1, d1, g2, d2)
        ok = ok and rep.tensor_score == rep.value1 * rep.value2
        if rep.gap is not None:
            enumerated += 1
            ok = ok and rep.gap >= 0
            if rep.gap > 0:
                strict += 1
    return ok, [
        "games = 100",
        f"products_enumerated = {enumerated}",
        f"strictly_supermultiplicative = {strict}",
    ]


def _check_marginal_extraction_random() -> tuple[bool, list[str]]:
    rng = np.random.default_rng(12)
    worst_rule = 0.0
    worst_indep = 0.0
    worst_corr = 0.0
    ok = True
    for _ in range(20):
        n1, k1 = int(rng.integers(2, 4)), int(rng.integers(2, 4))
        n2, k2 = int(rng.integers(2, 4)), int(rng.integers(2, 4))
        dim1, dim2 = int(rng.integers(2, 5)), int(rng.integers(2, 5))
        r1 = Realization((Block(1.0, random_pvm_family(n1, k1, dim1, rng)),))
        r2 = Realization((Block(1.0, random_pvm_family(n2, k2, dim2, rng)),))
        gp = product(synchronicity_game(n1, k1), synchronicity_game(n2, k2))
        rt = tensor_realizations(r1, r2)
        rep = verify_realization(rt, gp)
        worst_rule = max(worst_rule, rep.rule_defect)
        for which, ref in (("first", r1), ("second", r2)):
            marg, mrep = extract_marginal(rt, which, ((n1, k1), (n2, k2)))
            worst_indep = max(worst_indep, mrep.independence_defect)
            diff = np.max(
                np.abs(correlation_of(marg).values - correlation_of(ref).values)
            )
            worst_corr = max(worst_corr, float(diff))
    ok = worst_rule <= 1e-9 and worst_indep <= 1e-9 and worst_corr <= 1e-10
    return ok, [
        "trials = 20",
        f"worst_rule_defect = {worst_rule:.3e}",
        f"worst_independence_defect = {worst_indep:.3e}",
        f"worst_correlation_error = {worst_corr:.3e}",
    ]


def _squared_game_polynomial_table() -> NCPoly:
    """16 times the squared-game polynomial, written out term by term.

    Derived by hand from the allowed sets of the two-question game: composite
    question 2*x1 + x2 paired with 2*y1 + y2 allows composite answer pair
    (2*a1 + a2, 2*b1 + b2) exactly when both factor games allow theirs.  The
    16 repeated-question terms come from the full diagonal sets, the 20
    mixed-question terms from all factor combinations.
    """
    products = [
        # both factor questions repeated: every composite answer agrees
        ((0, 0), (0, 0)),
        ((0, 1), (0, 1)),
        ((0, 2), (0, 2)),
        ((0, 3), (0, 3)),
        ((1, 0), (1, 0)),
        ((1, 1), (1, 1)),
        ((1, 2), (1, 2)),
        ((1, 3), (1, 3)),
        ((2, 0), (2, 0)),
        ((2, 1), (2, 1)),
        ((2, 2), (2, 2)),
        ((2, 3), (2, 3)),
        ((3, 0), (3, 0)),
        ((3, 1), (3, 1)),
        ((3, 2), (3, 2)),
        ((3, 3), (3, 3)),
        # question 0 = (0,0) against the others
        ((0, 0), (1, 0)),
        ((0, 1), (2, 1)),
        ((0, 2), (1, 2)),
        ((0, 0), (2, 0)),
        ((0, 0), (3, 0)),
        # question 1 = (0,1) against the others
        ((1, 0), (0, 1)),
        ((1, 2), (0, 3)),
        ((1, 0), (2, 1)),
        ((1, 0), (3, 0)),
        ((1, 1), (3, 1)),
        # question 2 = (1,0) against the others
        ((2, 0), (0, 2)),
        ((2, 1), (0, 3)),
        ((2, 0), (1, 2)),
        ((2, 0), (3, 0)),
        ((2, 2), (3, 2)),
        # question 3 = (1,1) against the others
        ((3, 0), (0, 3)),
        ((3, 0), (1, 2)),
        ((3, 1), (1, 3)),
        ((3, 0), (2, 1)),
        ((3, 2), (2, 3)),
    ]
    terms: dict = {}
    for word in products:
        terms[word] = terms.get(word, Fraction(0)) + 1
    return NCPoly((4, 4), terms)


def _check_polynomial_reduction() -> tuple[bool, list[str]]:
    g1, d1 = example1()
    h1 = game_polynomial(g1, d1)
    lhs = cyclic_normal_form(reduce(4 * h1))
    target1 = NCPoly((2, 2), {(): Fraction(2), ((1, 0),): Fraction(1)})
    first = lhs == target1

    gp, dp = product(g1, g1), product_density(d1, d1)
    raw = 16 * game_polynomial(gp, dp)
    table_ok = raw == _squared_game_polynomial_table()
    # reduction must preserve the trace in every projective representation
    second = table_ok and equal_mod_relations(
        cyclic_normal_form(raw),
        cyclic_normal_form(reduce(raw)),
        trials=30,
        dims=(2, 3, 4),
        seed=0,
        trace_only=True,
    )

    g2, d2 = example2()
    h2 = reduce(9 * game_polynomial(g2, d2))
    p, q, r = ((0, 0),), ((1, 0),), ((2, 0),)
    target2 = NCPoly(
        (3, 2),
        {
            (): Fraction(3),
            p: Fraction(2),
            q: Fraction(2),
            r: Fraction(2),
            p + q: Fraction(-1),
            q + p: Fraction(-1),
            q + r: Fraction(-1),
            r + q: Fraction(-1),
            p + r: Fraction(-1),
            r + p: Fraction(-1),
        },
    )
    third = h2 == target2
    return first and second and third, [
        f"two_question_form = {'match' if first else 'mismatch'}",
        f"squared_form_table = {'match' if table_ok else 'mismatch'}",
        f"squared_reduction_trace_equal = {second}",
        f"three_question_form = {'match' if third else 'mismatch'}",
    ]


def _check_ns_certificates() -> tuple[bool, list[str]]:
    ok = True
    details = []
    for name, (g, d) in (("example1", example1()), ("example2", example2())):
        rep = ns_synchronous_value(g, d)
        loc = local_synchronous_value(g, d).value
        verified = verify_lp_certificate(ns_lp_problem(g, d), rep.certificate)
        ok = ok and verified and rep.value >= loc
        details.append(
            f"{name}: ns = {rep.value}, loc = {loc}, certificate = "
            + ("verified" if verified else "FAILED")
        )
    return ok, details


CHECKS: tuple[tuple[str, str, Callable[[], tuple[bool, list[str]]]], ...] = (
    ("local-example1", "exact", _check_local_example1),
    ("local-example1-squared", "exact", _check_local_example1_squared),
    ("scores-example2", "exact", _check_scores_example2),
    ("local-example2-squared", "exact", _check_local_example2_squared),
    ("witness-example2", "quantum", _check_witness_example2),
    ("trace-family", "quantum", _check_trace_family),
    ("seesaw-example2", "quantum", _check_seesaw_example2),
    ("moment-bound-example1", "sdp", _check_moment_bound_example1),
    ("moment-bound-example1-squared", "sdp", _check_moment_bound_example1_squared),
    ("moment-bound-example2", "sdp", _check_moment_bound_example2),
    ("product-inequality-random", "exact", _check_product_inequality_random),
    ("marginal-extraction-random", "quantum", _check_marginal_extraction_random),
    ("polynomial-reduction", "exact", _check_polynomial_reduction),
    ("ns-certificates", "exact", _check_ns_certificates),
)


def run_checks(skip: Iterable[str] = ()) -> list[CheckResult]:
    """Run the suite, skipping the given categories; returns results in order."""
    skipped = set(skip)
    results = []
    for name, category, fn in CHECKS:
        if category in skipped:
            continue
        start = time.perf_counter()
        passed, details = fn()
        results.append(
            CheckResult(name, category, passed, tuple(details), time.perf_counter() - start)
        )
    return results
