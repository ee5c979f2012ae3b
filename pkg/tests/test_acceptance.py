"""Acceptance battery: each criterion prints one pass/fail line and asserts.

Criterion 6 is expected to fail: its floor clause demands
F >= log(1/max_i vbar_i) on every trajectory, but for capacities above one
the reachable lower bound is -log(sum_i vbar_i^2), which lies below that
floor. The mut4 run documents the gap; the monotonicity clause holds.
"""
import pytest

from lvmut.acceptance import criterion_count, criterion_names, run_criterion

_CASES = [
    (1, "positivity-floor"),
    (2, "equilibrium-values"),
    (3, "mass-law"),
    (4, "global-stability"),
    (5, "entropy-identity"),
    (6, "lyapunov-descent"),
    (7, "spectral-gap"),
    (8, "exponential-rate"),
    (9, "closed-form"),
    (10, "envelopes"),
    (11, "homotopy-solver"),
    (12, "perturbation-bound"),
]


def test_registry_shape():
    assert criterion_count() == 12
    names = criterion_names()
    assert len(set(names)) == 12
    assert [num for num, _ in _CASES] == list(range(1, 13))
    assert [name for _, name in _CASES] == names


@pytest.mark.parametrize("number,name", _CASES, ids=[f"{n:02d}-{s}" for n, s in _CASES])
def test_criterion(number, name):
    res = run_criterion(number)
    assert res.number == number
    assert res.name == name
    status = "PASS" if res.passed else "FAIL"
    print(f"criterion {res.number:02d} {res.name}: {status} - {res.detail}")
    assert res.passed, res.detail
