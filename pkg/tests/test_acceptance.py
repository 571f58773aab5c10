"""Acceptance criteria 1-10 at their stated tolerances and time budgets."""

import json
import time

import pytest

from acceptance_cases import CRITERIA, RUNTIME_LIMITS, payload

_first_runs: dict = {}


def _record(log, k, ok, detail):
    log[k] = f"criterion {k:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(log[k])


@pytest.mark.parametrize("k", sorted(CRITERIA))
def test_criterion(k, acceptance_log):
    t0 = time.perf_counter()
    p = payload(k)
    elapsed = time.perf_counter() - t0
    _first_runs[k] = json.dumps(p, sort_keys=True).encode()
    limit = RUNTIME_LIMITS[k]
    ok = p["passed"] and elapsed < limit
    summary = {key: v for key, v in p.items() if key != "passed" and not isinstance(v, (dict, list))}
    _record(acceptance_log, k, ok, f"{elapsed:.2f}s (limit {limit:.0f}s) {summary}")
    assert p["passed"], p
    assert elapsed < limit


def test_criterion_10_determinism(acceptance_log):
    t0 = time.perf_counter()
    mismatched = []
    for k in sorted(CRITERIA):
        first = _first_runs.get(k) or json.dumps(payload(k), sort_keys=True).encode()
        again = json.dumps(payload(k), sort_keys=True).encode()
        if first != again:
            mismatched.append(k)
    ok = not mismatched
    _record(acceptance_log, 10, ok, f"{time.perf_counter() - t0:.2f}s re-ran 1-9, mismatched={mismatched}")
    assert ok
