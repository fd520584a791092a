from __future__ import annotations

import re

import numpy as np
import pytest

from upb.basis import ProductState, from_states


def random_unitary(rng: np.random.Generator, d: int) -> np.ndarray:
    z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_pb(rng: np.random.Generator, max_states: int = 8, max_dim: int = 3, max_parties: int = 3):
    """Orthogonal product set drawn by rejection sampling.

    Local vectors come from a couple of random orthonormal bases per party,
    so exact orthogonality between candidates happens often.
    """
    m = int(rng.integers(2, max_parties + 1))
    dims = tuple(int(d) for d in rng.integers(2, max_dim + 1, size=m))
    pools = []
    for d in dims:
        bases = [np.eye(d, dtype=complex)] + [random_unitary(rng, d).T for _ in range(int(rng.integers(0, 3)))]
        pools.append([v for b in bases for v in b])
    target = int(rng.integers(1, min(max_states, int(np.prod(dims))) + 1))
    chosen: list[ProductState] = []
    for _ in range(300):
        if len(chosen) == target:
            break
        locs = tuple(pool[int(rng.integers(len(pool)))] for pool in pools)
        ok = True
        for s in chosen:
            ov = 1.0
            for a, b in zip(s.locals, locs):
                ov *= abs(np.vdot(a, b))
            if ov > 1e-12:
                ok = False
                break
        if ok:
            chosen.append(ProductState(locs))
    return from_states(dims, chosen)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# -- acceptance summary ------------------------------------------------------

_CRITERIA: dict[int, list[str]] = {}


def pytest_runtest_logreport(report):
    m = re.search(r"test_acceptance\.py::test_criterion_(\d+)", report.nodeid)
    if not m:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        outcome = "xfailed" if hasattr(report, "wasxfail") else report.outcome
        _CRITERIA.setdefault(int(m.group(1)), []).append(outcome)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_CRITERIA):
        outs = _CRITERIA[k]
        if "failed" in outs:
            status = "FAIL"
        elif all(o == "skipped" for o in outs):
            status = "SKIPPED"
        elif "xfailed" in outs:
            status = f"NOT MET on {outs.count('xfailed')} check(s), documented gap, see README"
        else:
            status = "PASS"
        terminalreporter.write_line(f"criterion {k:2d}: {status} ({len(outs)} checks)")
