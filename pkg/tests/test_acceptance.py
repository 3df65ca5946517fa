"""Acceptance gate: every criterion at its stated tolerance, seed 42.

Each test prints one ``criterion k (title): PASS/FAIL`` line straight to the
terminal, followed by the rows behind the verdict. Run this file directly to
get the same summary without pytest.
"""
import pytest

from heavytail import harness

SEED = 42


@pytest.fixture(scope="module")
def results():
    return harness.run_acceptance(SEED)


def _report(k, table):
    verdict = "PASS" if table.all_pass else "FAIL"
    lines = [f"criterion {k} ({harness.CRITERIA[k]}): {verdict}"]
    for r in table.rows:
        lines.append(f"    {r.name} n={r.n} reps={r.reps} {r.statistic}={r.value:.6g}"
                     f" threshold={r.threshold:g} {'ok' if r.passed else 'FAIL'}")
    return "\n".join(lines)


@pytest.mark.parametrize("k", sorted(harness.CRITERIA))
def test_criterion(k, results, capsys):
    table = results[k]
    with capsys.disabled():
        print("\n" + _report(k, table))
    assert table.rows, f"criterion {k} produced no rows"
    assert table.all_pass, _report(k, table)


if __name__ == "__main__":
    out = harness.run_acceptance(SEED)
    for key in sorted(out):
        print(_report(key, out[key]))
