"""Composition of conjugate pairs: rewriting one pair in the chart of another.

If (x, y) and (phi, T) both satisfy f' = g-dot, f-dot = r^2 g' on a (t, p)
chart, then X(T, phi) = x and Y(T, phi) = y satisfy the same system on the
(T, phi) chart with R(T, phi) = r, as long as T-dot^2 - r^2 T'^2 != 0.
"""

from __future__ import annotations

import numpy as np

from ..errors import CompatibilityError, TransformError
from ..grid import ResidualReport, ScalarField, differentiate, residual_report
from .charts import invert_chart

DEGENERACY = 1e-6
INTERIOR = 2


def pair_residuals(pair, label: str = "eq10") -> list[ResidualReport]:
    """|x' - y-dot| and |x-dot - r^2 y'| for a ConjugatePair."""
    x, y, r = pair.first, pair.second, pair.r
    h = pair.domain.h
    return [
        residual_report(f"{label}_x_prime", differentiate(x, 2).values - differentiate(y, 1).values,
                        h, INTERIOR),
        residual_report(f"{label}_x_dot",
                        differentiate(x, 1).values - (r * r * differentiate(y, 2)).values,
                        h, INTERIOR),
    ]


def _scale(pair) -> float:
    vals = [np.abs(differentiate(f, ax).values).max() for f in (pair.first, pair.second) for ax in (1, 2)]
    return max(max(vals), 1.0)


def compose_conjugate(r: ScalarField, pair1, pair2, counts=None, target_bounds=None,
                      tol_factor: float = 1.0, margin: int = 2):
    """Express ``pair1`` on the chart given by ``pair2``.

    Parameters
    ----------
    r : ScalarField
        The radius field both pairs refer to.
    pair1 : ConjugatePair
        (x, y).
    pair2 : ConjugatePair
        (phi, T); the new chart is (T, phi), in that axis order.
    tol_factor : float
        Input pairs must satisfy their system to ``tol_factor * h^2 * scale``.

    Returns
    -------
    (X, Y) : ScalarField
        On the uniform (T, phi) rectangle.
    reports : list of ResidualReport
        Residuals of X' = Y-dot and X-dot = R^2 Y' on the new chart.
    """
    for p in (pair1, pair2):
        if p.domain != r.domain:
            raise ValueError("pairs and r must share one chart")
    h = r.domain.h
    for p, name in ((pair1, "pair1"), (pair2, "pair2")):
        tol = tol_factor * h * h * _scale(p)
        for rep in pair_residuals(p, name):
            if rep.max > tol:
                raise CompatibilityError(f"{rep.label} = {rep.max:.3e} exceeds {tol:.3e}: not conjugate")
    phi, T = pair2.first, pair2.second
    Td = differentiate(T, 1).values
    Tp = differentiate(T, 2).values
    rr = r.values**2
    q = Td**2 - rr * Tp**2
    ref = float(np.median(Td**2 + rr * Tp**2))
    if ref == 0 or np.abs(q).min() < DEGENERACY * ref:
        raise TransformError("change of variables is degenerate (T-dot^2 - r^2 T'^2 = 0)")

    inv = invert_chart(T, phi, counts=counts, target_bounds=target_bounds,
                       names=("T", "phi"), margin=margin)
    X = inv.pull(pair1.first)
    Y = inv.pull(pair1.second)
    R = inv.pull(r)
    hn = inv.target.h
    reps = [
        residual_report("eq12_X_prime", differentiate(X, 2).values - differentiate(Y, 1).values,
                        hn, INTERIOR),
        residual_report("eq12_X_dot",
                        differentiate(X, 1).values - (R * R * differentiate(Y, 2)).values,
                        hn, INTERIOR),
    ]
    return (X, Y), reps
