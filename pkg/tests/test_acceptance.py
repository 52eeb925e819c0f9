"""Release acceptance: every check in the verification suite must pass.

Each criterion prints one line, ``ACCEPTANCE <n>: PASS <name>`` or
``ACCEPTANCE <n>: FAIL <name>`` followed by the check's detail lines.
Run with ``pytest tests/test_acceptance.py -v -s`` to see them all.
"""

import time

import pytest

from syncgames.verification import CHECKS

# wall-clock budgets in seconds for the checks that carry one
TIME_LIMITS = {
    "local-example1": 1.0,
    "local-example1-squared": 1.0,
    "scores-example2": 1.0,
    "local-example2-squared": 60.0,
    "seesaw-example2": 30.0,
    "moment-bound-example1": 10.0,
    "moment-bound-example1-squared": 60.0,
    "moment-bound-example2": 300.0,
}


@pytest.mark.parametrize(
    "number,name,fn",
    [(i + 1, name, fn) for i, (name, _, fn) in enumerate(CHECKS)],
    ids=[f"{i + 1:02d}-{name}" for i, (name, _, _) in enumerate(CHECKS)],
)
def test_acceptance(number, name, fn):
    start = time.perf_counter()
    passed, details = fn()
    elapsed = time.perf_counter() - start
    print(f"ACCEPTANCE {number}: {'PASS' if passed else 'FAIL'} {name}")
    for line in details:
        print(f"    {line}")
    assert passed, f"criterion {number} ({name}) failed: {details}"
    limit = TIME_LIMITS.get(name)
    if limit is not None:
        assert elapsed < limit, f"criterion {number} took {elapsed:.1f}s, budget {limit}s"


def test_acceptance_suite_is_complete():
    assert len(CHECKS) == 14
