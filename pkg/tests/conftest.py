import numpy as np
import pytest

import curkit
import curkit.sfcur
import curkit.solver

from acceptance_log import CRITERIA, DESCENT

_original_solve = curkit.solver.solve


def _checked_solve(p, cfg=None, ops=None, W0=None, max_iter=None, tol=None):
    state = _original_solve(p, cfg, ops, W0, max_iter, tol)
    hist = state.objective_history
    if len(hist) > 1:
        DESCENT["runs"] += 1
        slack = 1e-12 * hist[0]
        bad = [k for k in range(1, len(hist)) if hist[k] > hist[k - 1] + slack]
        if bad:
            DESCENT["violations"].append((p.W_shape, p.lam, bad[:5]))
        assert not bad, f"objective increased at iterations {bad[:5]}"
    return state


# installed at import time, before any test module binds ``solve``, so every
# solver run in the session (direct or through selection code) is checked
curkit.solver.solve = _checked_solve
curkit.sfcur.solve = _checked_solve
curkit.solve = _checked_solve


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA and not DESCENT["runs"]:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(CRITERIA):
        name, passed, detail = CRITERIA[number]
        status = {True: "PASS", False: "FAIL", None: "SKIP"}[passed]
        tr.write_line(f"[{status}] criterion {number:>2}: {name}  {detail}".rstrip())
    tr.write_line(
        f"solver descent check: {DESCENT['runs']} runs, "
        f"{len(DESCENT['violations'])} violations"
    )
