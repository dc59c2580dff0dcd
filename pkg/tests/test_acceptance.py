"""One test per acceptance criterion; each prints its pass/fail line."""

import pytest

from fha import acceptance

RESULTS: dict = {}


@pytest.mark.parametrize("number", [n for n, _, _ in acceptance.CRITERIA],
                         ids=[name.replace(" ", "_") for _, name, _ in acceptance.CRITERIA])
def test_criterion(number):
    r = acceptance.run_criterion(number)
    RESULTS[number] = r
    print(r.line())
    assert r.passed, r.line()


def test_selftest_table_lists_every_criterion():
    results = [RESULTS.get(n) or acceptance.run_criterion(n) for n, _, _ in acceptance.CRITERIA]
    table = acceptance.format_table(results)
    assert len(table.splitlines()) == len(acceptance.CRITERIA) + 1
