"""Acceptance criteria C1..C15 at their default tolerances, one line each."""

import pytest

from harmonic_spaces.acceptance import CRITERIA, DEFAULT_TOLERANCES, run_criterion, run_suite
from harmonic_spaces.errors import ArgError


@pytest.mark.parametrize("cid", list(CRITERIA))
def test_criterion(cid, capsys):
    r = run_criterion(cid)
    with capsys.disabled():
        print("\n" + r.line())
    assert r.id == cid
    assert r.passed, r.line()


def test_all_fifteen_present():
    assert list(CRITERIA) == [f"C{i}" for i in range(1, 16)]
    assert set(DEFAULT_TOLERANCES) == set(CRITERIA)


@pytest.mark.parametrize("cid,bad", [("C2", 1e-30), ("C4", 1e-30), ("C6", -1.0), ("C14", -1.0)])
def test_tampered_tolerance_fails_named_criterion(cid, bad):
    (r,) = run_suite([cid], {cid: bad})
    assert r.id == cid and not r.passed


def test_unknown_override_rejected():
    with pytest.raises(ArgError):
        run_suite(["C1"], {"C99": 1.0})
    with pytest.raises(ArgError):
        run_criterion("C0")
