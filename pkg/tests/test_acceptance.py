"""Every acceptance criterion at its stated tolerance and full sample size.

Each test records one PASS/FAIL line; the lines are printed together in an
"acceptance criteria" section at the end of the pytest run.  The scaling study writes its CSV files to
``$CUTQUERY_RESULTS`` when set, otherwise to a temporary directory.
"""

import os
import time

import pytest

from cutquery import acceptance

from conftest import ACCEPTANCE_LINES

LIMITS = {1: 120, 3: 60, 9: 600}


@pytest.mark.parametrize("check", acceptance.CHECKS, ids=lambda c: c.__name__)
def test_criterion(check, tmp_path):
    started = time.perf_counter()
    if check is acceptance.check_scaling:
        result = check(out_dir=os.environ.get("CUTQUERY_RESULTS") or str(tmp_path))
    else:
        result = check()
    elapsed = time.perf_counter() - started
    ACCEPTANCE_LINES.append(result.line())
    assert result.passed, result.line()
    limit = LIMITS.get(result.number)
    if limit is not None:
        assert elapsed < limit, f"criterion {result.number} took {elapsed:.0f}s, limit {limit}s"
