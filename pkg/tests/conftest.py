import numpy as np
import pytest

from sapsky.data_gen import StreamConfig, UncertainObject, generate_object


def obj(oid, points, probs=None, node=1, step=None):
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if probs is None:
        probs = np.full(len(points), 1.0 / len(points))
    return UncertainObject(oid, node, oid if step is None else step, points, probs)


def random_window(seed, n, m, d, distribution="independent", spread=0.05, node=1, first_id=0):
    cfg = StreamConfig(distribution=distribution, m=m, d=d, instance_spread=spread, seed=seed)
    rng = np.random.default_rng(seed)
    return [generate_object(rng, cfg, first_id + i, node, i) for i in range(n)]


@pytest.fixture
def pair_ab():
    a = obj(1, [[1, 1], [3, 3]], [0.5, 0.5])
    b = obj(2, [[2, 2]], [1.0])
    return a, b


def pytest_terminal_summary(terminalreporter):
    import acceptance_log

    if acceptance_log.LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for n in sorted(acceptance_log.LINES):
            terminalreporter.write_line(acceptance_log.LINES[n])
