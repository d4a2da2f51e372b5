import numpy as np
import pytest

from thetavfa.generators import generate_chordal, generate_cochordal, generate_generalized_split


def perfect_instances(count, n_range=(6, 15), seed=0):
    """Mixed chordal, co-chordal and generalized-split graphs with random integer weights."""
    rng = np.random.default_rng(seed)
    out = []
    for k in range(count):
        n = int(rng.integers(*n_range))
        kind = k % 3
        if kind == 0:
            g = generate_chordal(n, float(rng.uniform(0.2, 0.8)), seed=int(rng.integers(2**31)))
        elif kind == 1:
            g = generate_cochordal(n, float(rng.uniform(0.2, 0.8)), seed=int(rng.integers(2**31)))
        else:
            g, _ = generate_generalized_split(n, seed=int(rng.integers(2**31)))
        out.append(g.with_weights(rng.integers(1, 6, size=n).astype(float)))
    return out


@pytest.fixture(scope="session")
def small_perfect():
    return perfect_instances(9, (5, 12), seed=11)


_ACCEPTANCE = pytest.StashKey[dict]()


@pytest.fixture
def acceptance(request):
    """Record ``(criterion, passed, detail)``; printed in the terminal summary."""
    lines = request.config.stash.setdefault(_ACCEPTANCE, {})

    def record(key, passed, detail=""):
        lines[key] = (passed, detail)
        return passed

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE, {})
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(lines, key=lambda k: (int(str(k).split(".")[0]), str(k))):
        passed, detail = lines[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if passed else 'FAIL'}  {detail}")
