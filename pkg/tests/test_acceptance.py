"""Acceptance criteria, one test per criterion at its stated tolerance.

Each test records a one-line verdict that the conftest hook prints after the
run. Run this file directly for the full human-readable report.
"""

import pytest

from qbox import verify

from conftest import ACCEPTANCE_LINES

# the one identity that does not hold as written; the product form beside it does
FALSE_IDENTITY = "[D^2, x^2] = [2(N + 1/2)]"


def _record(result):
    worst = [c for c in result.checks if not c.passed]
    tag = "PASS" if result.passed else "FAIL"
    gate = "" if result.gating else " [non-gating]"
    tail = f" - failing: {', '.join(c.name for c in worst)}" if worst else ""
    ACCEPTANCE_LINES[result.number] = f"criterion {result.number:>2}: {tag} {result.title}{gate}{tail}"
    return result


@pytest.fixture(scope="module")
def results():
    return {r.number: _record(r) for r in verify.run_acceptance()}


def _assert_checks(result, skip=()):
    bad = [f"{c.name}: {c.value:.6g} > {c.threshold:.3g}" for c in result.checks
           if not c.passed and c.name not in skip]
    assert not bad, "; ".join(bad)


@pytest.mark.parametrize("number", [1, 2, 4, 5, 6, 7, 8, 9, 10, 11])
def test_criterion(results, number):
    r = results[number]
    assert r.checks
    _assert_checks(r)
    assert r.passed


def test_criterion_3_other_identities(results):
    r = results[3]
    names = [c.name for c in r.checks]
    assert FALSE_IDENTITY in names
    _assert_checks(r, skip=(FALSE_IDENTITY,))


@pytest.mark.xfail(strict=True, reason="[D^2, x^2] equals [2][2N + 1], not [2(N + 1/2)]")
def test_criterion_3(results):
    assert results[3].passed


def test_criterion_11_is_non_gating(results):
    assert not results[11].gating
    assert all(r.gating for n, r in results.items() if n != 11)


def test_report_lists_every_criterion(results):
    text = verify.format_report(list(results.values()))
    for n in range(1, 12):
        assert f"criterion {n}:" in text


if __name__ == "__main__":
    res = verify.run_acceptance()
    print(verify.format_report(res))
    for r in res:
        _record(r)
    print("\n".join(ACCEPTANCE_LINES[n] for n in sorted(ACCEPTANCE_LINES)))
