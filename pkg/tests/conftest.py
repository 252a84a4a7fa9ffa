import sys

import numpy as np
import pytest

from safezone.metrics import Trajectory


def make_traj(t, v, heading, x0=0.0, y0=0.0):
    """Trajectory whose positions integrate ``v`` along ``heading`` (trapezoidal)."""
    t = np.asarray(t, dtype=float)
    v = np.broadcast_to(np.asarray(v, dtype=float), t.shape).copy()
    h = np.broadcast_to(np.asarray(heading, dtype=float), t.shape).copy()
    vx, vy = v * np.cos(h), v * np.sin(h)
    dt = np.diff(t)
    x = x0 + np.concatenate([[0.0], np.cumsum(0.5 * (vx[1:] + vx[:-1]) * dt)])
    y = y0 + np.concatenate([[0.0], np.cumsum(0.5 * (vy[1:] + vy[:-1]) * dt)])
    return Trajectory(t, x, y, v, h)


def grid(t0, t1, dt):
    n = int(round((t1 - t0) / dt))
    return t0 + dt * np.arange(n + 1)


@pytest.fixture
def straight_traj():
    t = grid(0, 5, 0.1)
    return make_traj(t, 5.0, 0.0)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in module.summary_lines():
        terminalreporter.write_line(line)
