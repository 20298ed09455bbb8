"""The twelve acceptance criteria at full size and their stated tolerances.

Each criterion prints one ``[PASS]`` / ``[FAIL]`` line (plus its evidence) and
the collected lines are repeated in the terminal summary. Set
``KPP_ACCEPT_QUICK=1`` to run the reduced sizes while developing; tolerances
are the same in both modes.
"""
import os

import pytest

from kpplab.acceptance import Suite

RESULTS: list = []


@pytest.fixture(scope="session")
def suite():
    return Suite(quick=os.environ.get("KPP_ACCEPT_QUICK") == "1")


@pytest.mark.slow
@pytest.mark.parametrize("number", sorted(Suite.CRITERIA))
def test_criterion(suite, number, capsys):
    res = suite.run(number)
    RESULTS.append(res)
    with capsys.disabled():
        print()
        print(res.summary())
        for line in res.lines:
            print("      " + line)
    assert res.passed, "\n".join(res.lines)
