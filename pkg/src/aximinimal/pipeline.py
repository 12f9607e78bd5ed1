"""Chains of transform / scale steps and their verification.

A chain alternates the involutive transform with the scaling symmetry. After
the last step the result is checked against the light-cone equations, and it
can be compared against every pure scaling of the input by a least-squares
fit over (alpha, gamma).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import least_squares

from .errors import DomainError, InversionError, TransformError
from .grid import ResidualReport, differentiate
from .residuals import residual_lightcone
from .transform import (
    LightconeTriple,
    ScalingParams,
    bianchi_transform,
    scale,
)

VERIFY_K = 10.0  # tol = VERIFY_K * h^2 * scale
INTERIOR_FRACTION = 8  # drop n // 8 rows/cols per edge in the final check
FIT_LOG_BOUND = 12.0  # |log alpha|, |log gamma| searched up to this


@dataclass(frozen=True)
class Step:
    op: str
    alpha: float = 1.0
    gamma: float = 1.0

    def __post_init__(self):
        if self.op not in ("transform", "scale"):
            raise ValueError(f"unknown step {self.op!r}")

    @classmethod
    def parse(cls, text: str) -> "Step":
        """'transform', 'T', 'scale:2,1' or 'S:2,1'."""
        head, _, args = text.strip().partition(":")
        head = {"T": "transform", "S": "scale"}.get(head, head)
        if head == "scale":
            vals = [float(x) for x in args.split(",")] if args else [1.0, 1.0]
            if len(vals) != 2:
                raise ValueError(f"scale step needs alpha,gamma: {text!r}")
            return cls("scale", *vals)
        if args:
            raise ValueError(f"transform takes no arguments: {text!r}")
        return cls(head)

    def to_dict(self) -> dict:
        d = {"op": self.op}
        if self.op == "scale":
            d.update(alpha=self.alpha, gamma=self.gamma)
        return d


@dataclass
class PipelineResult:
    triple: LightconeTriple
    steps: list[dict] = field(default_factory=list)
    checks: list[ResidualReport] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def verification_tolerance(triple: LightconeTriple, k: float = VERIFY_K) -> float:
    """K h^2 times the size of the second derivatives of R and zeta on the chart."""
    h = triple.domain.h
    scale_ = max(
        np.abs(differentiate(differentiate(f, ax), ax).values).max()
        for f in (triple.R, triple.zeta) for ax in (1, 2)
    )
    return k * h * h * max(scale_, 1.0)


def verify_triple(triple: LightconeTriple, k: float = VERIFY_K,
                  interior: int | None = None) -> list[ResidualReport]:
    """Light-cone residuals on the interior of the chart, each with tolerance K h^2 scale."""
    if interior is None:
        interior = max(2, min(triple.domain.counts) // INTERIOR_FRACTION)
    tol = verification_tolerance(triple, k)
    return [r.with_tol(tol) for r in residual_lightcone(triple, interior=interior)]


def run_pipeline(triple: LightconeTriple, steps: Sequence[Step | str], counts=None,
                 threshold: float = 1e-6, margin: int = 2, k: float = VERIFY_K) -> PipelineResult:
    """Apply the steps in order and verify the final triple.

    Raises
    ------
    TransformError / InversionError
        With the index and kind of the step that failed (singular transform,
        or a chart that collapsed to an empty rectangle).
    """
    cur = triple
    log = []
    for i, st in enumerate(steps):
        st = Step.parse(st) if isinstance(st, str) else st
        try:
            if st.op == "transform":
                cur, diag = bianchi_transform(cur, counts=counts, threshold=threshold, margin=margin)
                info = {**st.to_dict(), **diag.to_dict()}
            else:
                cur = scale(cur, ScalingParams(st.alpha, st.gamma))
                info = st.to_dict()
        except InversionError as exc:
            raise type(exc)(f"step {i} ({st.op}): {exc}") from exc
        except TransformError as exc:
            raise type(exc)(f"step {i} ({st.op}): {exc}") from exc
        info["chart"] = cur.domain.to_dict()
        log.append(info)
    return PipelineResult(cur, log, verify_triple(cur, k))


def scaling_fit(result: LightconeTriple, reference, starts: Sequence[tuple[float, float]] | None = None) -> dict:
    """Best fit of result.R by alpha * R_ref(alpha gamma p, gamma q).

    ``reference`` is a closed form (callable returning (R, zeta, kappa)) or a
    sampled triple (evaluated by its spline, points outside its chart are
    dropped). Returns alpha, gamma, the max and rms residuals relative to
    max |R|, and the max absolute residual.
    """
    P, Q = result.domain.mesh()
    target = result.R.values.ravel()
    P, Q = P.ravel(), Q.ravel()
    norm = np.abs(target).max()

    if isinstance(reference, LightconeTriple):
        dom = reference.domain

        slack = [1e-12 * (hi - lo) for lo, hi in zip(dom.lower, dom.upper)]

        def model(a, g):
            x, y = a * g * P, g * Q
            inside = ((x >= dom.lower[0] - slack[0]) & (x <= dom.upper[0] + slack[0])
                      & (y >= dom.lower[1] - slack[1]) & (y <= dom.upper[1] + slack[1]))
            val = np.where(inside, np.abs(a) * reference.R.ev(np.clip(x, dom.lower[0], dom.upper[0]),
                                                             np.clip(y, dom.lower[1], dom.upper[1])), np.nan)
            return val
    else:

        def model(a, g):
            try:
                with np.errstate(all="ignore"):
                    return np.abs(a) * reference(a * g * P, g * Q)[0]
            except DomainError:
                return np.full_like(P, np.nan)

    def resid(x):
        a, g = np.exp(x)
        r = (model(a, g) - target) / norm
        return np.where(np.isfinite(r), r, 10.0)

    if starts is None:
        starts = [(a, g) for a in (0.25, 0.5, 1.0, 2.0, 4.0) for g in (0.0625, 0.25, 1.0, 4.0, 16.0)]
    best = None
    for a0, g0 in starts:
        sol = least_squares(resid, np.log([a0, g0]), bounds=(-FIT_LOG_BOUND, FIT_LOG_BOUND),
                            xtol=1e-15, ftol=1e-15, gtol=1e-15)
        if best is None or sol.cost < best.cost:
            best = sol
    a, g = np.exp(best.x)
    r = resid(best.x)
    return {"alpha": float(a), "gamma": float(g), "max_rel_residual": float(np.abs(r).max()),
            "rms_rel_residual": float(np.sqrt(np.mean(r**2))),
            "max_abs_residual": float(np.abs(r).max() * norm)}
