"""Curve data for the shaping function and the comfort penalty."""
from __future__ import annotations

import numpy as np

from ..metrics import ShapingParams, shaping_beta
from ..objective import penalty_psi


def beta_curves(m, p, alphas, x_min=-10.0, x_max=1.0, points=221):
    """Rows ``(alpha, x, beta)`` for every alpha over an evenly spaced grid."""
    xs = np.linspace(x_min, x_max, points)
    rows = []
    for a in alphas:
        ys = shaping_beta(xs, ShapingParams(m, p, a))
        rows += [(a, x, y) for x, y in zip(xs, ys)]
    return ("alpha", "x", "beta"), rows


def psi_curves(ms, ps, x_min=-0.5, x_max=1.0, points=151):
    """Rows ``(m, p, x, psi)`` for every (m, p) combination."""
    xs = np.linspace(x_min, x_max, points)
    rows = []
    for m in ms:
        for p in ps:
            rows += [(m, p, x, penalty_psi(x, m, p)) for x in xs]
    return ("m", "p", "x", "psi"), rows
