import os
import shutil

import pytest
from hypothesis import HealthCheck, settings

from ramseyqe.solver import SOLVER_ENV

settings.register_profile(
    "repo", deadline=None, suppress_health_check=[HealthCheck.too_slow], print_blob=True)
settings.load_profile("repo")

HAVE_SOLVER = shutil.which(os.environ.get(SOLVER_ENV, "z3")) is not None

needs_solver = pytest.mark.skipif(not HAVE_SOLVER, reason="no SMT solver on PATH")


# -- acceptance report --------------------------------------------------------------

# criterion id -> list of (case, ok, detail); filled by test_acceptance.py
ACCEPTANCE: dict[str, list[tuple[str, bool, str]]] = {}


def record(criterion: str, case: str, ok: bool, detail: str = "") -> bool:
    ACCEPTANCE.setdefault(criterion, []).append((case, ok, detail))
    return ok


def _sort_key(cid: str):
    head, _, tail = cid.partition("(")
    return (int(head), tail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for cid in sorted(ACCEPTANCE, key=_sort_key):
        rows = ACCEPTANCE[cid]
        bad = [r for r in rows if not r[1]]
        status = "PASS" if not bad else "FAIL"
        tr.write_line(f"criterion {cid}: {status} ({len(rows) - len(bad)}/{len(rows)} cases)")
        for case, _, detail in bad[:10]:
            tr.write_line(f"    failed {case}: {detail}")
        if len(bad) > 10:
            tr.write_line(f"    ... {len(bad) - 10} more")
