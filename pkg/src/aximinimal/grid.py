"""Uniform rectangular charts, scalar fields sampled on them, and the
numerical calculus (derivatives, interpolation, convergence orders) used by
every other module.

Axis 1 is the "dot" variable (tau or t), axis 2 the "prime" variable
(mu or phi). Field values are stored with shape ``(count1, count2)`` so
``values[i, j]`` sits at ``(x1[i], x2[j])``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.interpolate import RectBivariateSpline

from .errors import DomainError, SingularLocusError

MIN_COUNT = 8
SPLINE_DEGREE = 5  # quintic: interpolated first derivatives stay O(h^5)

# 4th-order first-derivative stencils (coefficients / 12h)
_CENTRAL = np.array([1.0, -8.0, 0.0, 8.0, -1.0])
_EDGE0 = np.array([-25.0, 48.0, -36.0, 16.0, -3.0])
_EDGE1 = np.array([-3.0, -10.0, 18.0, -6.0, 1.0])


@dataclass(frozen=True)
class GridDomain:
    """A uniformly sampled rectangle ``[lower1, upper1] x [lower2, upper2]``.

    ``singular_lines`` holds ``(axis, value)`` pairs the rectangle must keep
    clear of, e.g. ``(1, 0.0)`` for the line tau = 0.
    """

    names: tuple[str, str]
    lower: tuple[float, float]
    upper: tuple[float, float]
    counts: tuple[int, int]
    singular_lines: tuple[tuple[int, float], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "lower", tuple(float(v) for v in self.lower))
        object.__setattr__(self, "upper", tuple(float(v) for v in self.upper))
        object.__setattr__(self, "counts", tuple(int(n) for n in self.counts))
        object.__setattr__(self, "names", tuple(str(n) for n in self.names))
        lines = tuple((int(a), float(v)) for a, v in self.singular_lines)
        object.__setattr__(self, "singular_lines", lines)
        for k in range(2):
            lo, hi = self.lower[k], self.upper[k]
            if not (math.isfinite(lo) and math.isfinite(hi)) or not hi > lo:
                raise DomainError(f"degenerate bounds on axis {k + 1}: [{lo}, {hi}]")
            if self.counts[k] < MIN_COUNT:
                raise DomainError(
                    f"axis {k + 1} has {self.counts[k]} points, need >= {MIN_COUNT}"
                )
        for axis, value in lines:
            if axis not in (1, 2):
                raise DomainError(f"singular line axis must be 1 or 2, got {axis}")
            if self.lower[axis - 1] <= value <= self.upper[axis - 1]:
                raise SingularLocusError(
                    f"domain touches singular line {self.names[axis - 1]} = {value}"
                )

    @property
    def spacing(self) -> tuple[float, float]:
        return tuple(
            (self.upper[k] - self.lower[k]) / (self.counts[k] - 1) for k in range(2)
        )

    @property
    def h(self) -> float:
        """The larger of the two spacings."""
        return max(self.spacing)

    @cached_property
    def axes(self) -> tuple[np.ndarray, np.ndarray]:
        return tuple(
            np.linspace(self.lower[k], self.upper[k], self.counts[k]) for k in range(2)
        )

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(*self.axes, indexing="ij")

    @property
    def shape(self) -> tuple[int, int]:
        return self.counts

    def contains(self, point, strict: bool = True) -> bool:
        p = [float(v) for v in point]
        if strict:
            return all(self.lower[k] < p[k] < self.upper[k] for k in range(2))
        return all(self.lower[k] <= p[k] <= self.upper[k] for k in range(2))

    def refined(self, factor: int = 2) -> "GridDomain":
        """Same rectangle with the spacing divided by ``factor``."""
        counts = tuple((n - 1) * factor + 1 for n in self.counts)
        return GridDomain(self.names, self.lower, self.upper, counts, self.singular_lines)

    def with_counts(self, counts) -> "GridDomain":
        return GridDomain(self.names, self.lower, self.upper, counts, self.singular_lines)

    def to_dict(self) -> dict:
        return {
            "names": list(self.names),
            "lower": list(self.lower),
            "upper": list(self.upper),
            "counts": list(self.counts),
        }


def make_grid(
    bounds: Sequence[Sequence[float]],
    counts: Sequence[int],
    singular_lines: Iterable[tuple[int, float]] = (),
    names: tuple[str, str] = ("tau", "mu"),
) -> GridDomain:
    """Build a chart from ``bounds = [(lo1, hi1), (lo2, hi2)]``.

    Raises
    ------
    DomainError
        For unordered bounds or fewer than 8 points per axis.
    SingularLocusError
        If the rectangle contains or touches a singular line.
    """
    (lo1, hi1), (lo2, hi2) = bounds
    return GridDomain(
        names=tuple(names),
        lower=(lo1, lo2),
        upper=(hi1, hi2),
        counts=tuple(counts),
        singular_lines=tuple(singular_lines),
    )


@dataclass(frozen=True, eq=False)
class ScalarField:
    """Finite values sampled on every node of ``domain``. Immutable."""

    domain: GridDomain
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.array(self.values, dtype=float, copy=True)
        if vals.shape != tuple(self.domain.counts):
            raise DomainError(
                f"field shape {vals.shape} does not match domain {self.domain.counts}"
            )
        if not np.all(np.isfinite(vals)):
            raise DomainError("field contains non-finite values")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_function(cls, domain: GridDomain, fn: Callable) -> "ScalarField":
        x1, x2 = domain.mesh()
        return cls(domain, np.broadcast_to(fn(x1, x2), domain.counts))

    def _coerce(self, other):
        if isinstance(other, ScalarField):
            if other.domain != self.domain:
                raise DomainError("fields live on different domains")
            return other.values
        return other

    def __add__(self, other):
        return ScalarField(self.domain, self.values + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return ScalarField(self.domain, self.values - self._coerce(other))

    def __rsub__(self, other):
        return ScalarField(self.domain, self._coerce(other) - self.values)

    def __mul__(self, other):
        return ScalarField(self.domain, self.values * self._coerce(other))

    __rmul__ = __mul__

    def __neg__(self):
        return ScalarField(self.domain, -self.values)

    @cached_property
    def spline(self) -> RectBivariateSpline:
        x1, x2 = self.domain.axes
        return RectBivariateSpline(x1, x2, self.values, kx=SPLINE_DEGREE, ky=SPLINE_DEGREE, s=0)

    def ev(self, p1, p2, d1: int = 0, d2: int = 0) -> np.ndarray:
        """Vectorized spline evaluation (and partial derivatives), no bounds check."""
        p1, p2 = np.broadcast_arrays(np.asarray(p1, float), np.asarray(p2, float))
        out = self.spline.ev(p1.ravel(), p2.ravel(), dx=d1, dy=d2)
        return out.reshape(p1.shape)


def diff1d(values: np.ndarray, h: float, axis: int = -1) -> np.ndarray:
    """4th-order finite-difference derivative along ``axis``.

    Central 5-point stencil inside, one-sided 5-point stencils on the two
    outermost points at either end. Exact for quartics.
    """
    f = np.moveaxis(np.asarray(values, dtype=float), axis, -1)
    n = f.shape[-1]
    if n < 5:
        raise DomainError("need at least 5 samples to differentiate")
    d = np.empty_like(f)
    d[..., 2:-2] = (
        f[..., :-4] - 8.0 * f[..., 1:-3] + 8.0 * f[..., 3:-1] - f[..., 4:]
    )
    d[..., 0] = f[..., :5] @ _EDGE0
    d[..., 1] = f[..., :5] @ _EDGE1
    d[..., -1] = -(f[..., -5:][..., ::-1] @ _EDGE0)
    d[..., -2] = -(f[..., -5:][..., ::-1] @ _EDGE1)
    return np.moveaxis(d / (12.0 * h), -1, axis)


def differentiate(f: ScalarField, axis: int) -> ScalarField:
    """Partial derivative of ``f`` along axis 1 or 2, on the same domain."""
    if axis not in (1, 2):
        raise DomainError(f"axis must be 1 or 2, got {axis}")
    h = f.domain.spacing[axis - 1]
    return ScalarField(f.domain, diff1d(f.values, h, axis=axis - 1))


def interpolate(f: ScalarField, point) -> float:
    """Spline value of ``f`` at an interior point.

    Grid nodes return the stored sample exactly.
    """
    p1, p2 = (float(v) for v in point)
    dom = f.domain
    if not dom.contains((p1, p2)):
        raise DomainError(f"point {(p1, p2)} is not strictly inside the domain")
    idx = []
    for k, p in enumerate((p1, p2)):
        u = (p - dom.lower[k]) / dom.spacing[k]
        i = int(round(u))
        idx.append(i if abs(u - i) < 1e-12 else None)
    if idx[0] is not None and idx[1] is not None:
        return float(f.values[idx[0], idx[1]])
    return float(f.spline.ev(p1, p2))


@dataclass(frozen=True)
class ResidualReport:
    """Norms of one equation's residual on a chart.

    ``l2`` is the root-mean-square over the evaluated points, so it never
    exceeds ``max``.
    """

    label: str
    max: float
    l2: float
    h: float
    order: float | None = None
    tol: float | None = None

    @property
    def passed(self) -> bool | None:
        if self.tol is None:
            return None
        return bool(self.max <= self.tol)

    def with_tol(self, tol: float) -> "ResidualReport":
        return ResidualReport(self.label, self.max, self.l2, self.h, self.order, tol)

    def to_dict(self) -> dict:
        return {
            "name": self.label,
            "max": self.max,
            "l2": self.l2,
            "h": self.h,
            "order": self.order,
            "tol": self.tol,
            "pass": self.passed,
        }


def residual_report(
    label: str, residual, h: float, interior: int = 0, tol: float | None = None
) -> ResidualReport:
    """Summarize a residual array (or field), optionally dropping ``interior``
    boundary layers on each side of a 2-D array."""
    r = residual.values if isinstance(residual, ScalarField) else np.asarray(residual)
    r = np.asarray(r, dtype=float)
    if interior and r.ndim == 2:
        r = r[interior:-interior, interior:-interior]
    elif interior and r.ndim == 1:
        r = r[interior:-interior]
    a = np.abs(r)
    if a.size == 0 or not np.all(np.isfinite(a)):
        mx = l2 = float("inf")
    else:
        mx = float(a.max())
        l2 = float(np.sqrt(np.mean(a * a)))
    return ResidualReport(label, mx, l2, float(h), None, tol)


def convergence_order(reports: Sequence[ResidualReport], norm: str = "max") -> float:
    """Least-squares slope of log(residual) against log(h).

    Reports should come from successively halved spacings.
    """
    if len(reports) < 3:
        raise ValueError("need at least 3 reports to estimate an order")
    hs = np.array([r.h for r in reports], dtype=float)
    es = np.array([getattr(r, norm) for r in reports], dtype=float)
    ratios = hs[:-1] / hs[1:]
    if not np.allclose(ratios, 2.0, rtol=1e-6):
        raise ValueError(f"spacings must halve between reports, got ratios {ratios}")
    if np.any(es <= 0):
        return float("inf")
    slope, _ = np.polyfit(np.log(hs), np.log(es), 1)
    return float(slope)


# -- serialization ---------------------------------------------------------


def field_to_json(f: ScalarField) -> dict:
    return {"axes": f.domain.to_dict(), "values": f.values.ravel(order="C").tolist()}


def field_from_json(obj: dict) -> ScalarField:
    ax = obj["axes"]
    dom = GridDomain(ax["names"], ax["lower"], ax["upper"], ax["counts"])
    vals = np.asarray(obj["values"], dtype=float).reshape(dom.counts)
    return ScalarField(dom, vals)


def dumps_field(f: ScalarField) -> str:
    return json.dumps(field_to_json(f), sort_keys=True)


def field_to_csv(f: ScalarField, fh=None) -> str | None:
    """Write ``coord1, coord2, value`` rows (17 significant digits)."""
    buf = fh if fh is not None else io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["coord1", "coord2", "value"])
    x1, x2 = f.domain.axes
    for i, a in enumerate(x1):
        for j, b in enumerate(x2):
            w.writerow([f"{a:.17g}", f"{b:.17g}", f"{f.values[i, j]:.17g}"])
    if fh is None:
        return buf.getvalue()
    return None
