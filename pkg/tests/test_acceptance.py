"""Acceptance gate: every criterion from the built-in registry must pass.

Exact criteria admit zero tolerance; the statistical ones run at their
stated replication counts on pinned deterministic seeds.  Run with
``pytest tests/test_acceptance.py -v -s`` to see one line per criterion.
"""

import pytest

from negdep.acceptance import CRITERIA


@pytest.mark.parametrize("cid,name,fn", CRITERIA, ids=[f"{c}-{n}" for c, n, _ in CRITERIA])
def test_criterion(cid, name, fn):
    result = fn()
    status = "PASS" if result.passed else "FAIL"
    print(f"{status} criterion {cid} ({name}): {result.detail}")
    assert result.passed, f"criterion {cid} ({name}): {result.detail}"
