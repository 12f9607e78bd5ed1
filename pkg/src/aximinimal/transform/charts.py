"""Inverting a sampled change of coordinates onto a uniform target rectangle.

Given two fields a(p1, p2), b(p1, p2) on a source chart, find for every node
(A, B) of a uniform rectangle inside the image the source point with
a = A, b = B. Each target node gets its own 2-D Newton iteration on the
bicubic-spline interpolants, seeded from the nearest forward-image sample.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import shapely
from scipy.spatial import cKDTree

from ..errors import InversionError, TransformError
from ..grid import GridDomain, ScalarField, differentiate

NEWTON_TOL = 1e-12
NEWTON_MAX_ITER = 50
RASTER = 256
ZOOM_PASSES = 3


@dataclass(frozen=True, eq=False)
class ChartInverse:
    """Source coordinates ``(p1, p2)`` of every node of ``target``."""

    source: GridDomain
    target: GridDomain
    p1: np.ndarray
    p2: np.ndarray
    iterations: int
    max_step: float
    max_residual: float

    def stats(self) -> dict:
        return {
            "iterations": self.iterations,
            "max_step": self.max_step,
            "max_residual": self.max_residual,
            "points": int(self.p1.size),
        }

    def pull(self, f: ScalarField, d1: int = 0, d2: int = 0) -> ScalarField:
        """Resample a source field (or a partial of it) onto the target chart."""
        if f.domain != self.source:
            raise ValueError("field does not live on the source chart")
        return ScalarField(self.target, f.ev(self.p1, self.p2, d1, d2))


def jacobian_determinant(a: ScalarField, b: ScalarField) -> ScalarField:
    return differentiate(a, 1) * differentiate(b, 2) - differentiate(a, 2) * differentiate(b, 1)


def _boundary_polygon(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    ring = np.concatenate(
        [
            np.stack([a[0, :], b[0, :]], axis=1),
            np.stack([a[1:, -1], b[1:, -1]], axis=1),
            np.stack([a[-1, -2::-1], b[-1, -2::-1]], axis=1),
            np.stack([a[-2:0:-1, 0], b[-2:0:-1, 0]], axis=1),
        ]
    )
    return ring


def _largest_rectangle(ok: np.ndarray) -> tuple[int, int, int, int]:
    """Largest all-True axis-aligned block of a boolean matrix.

    Returns ``(i0, i1, j0, j1)`` inclusive row/column ranges (histogram method).
    """
    nrow, ncol = ok.shape
    heights = np.zeros(ncol, dtype=int)
    best = (0, -1, 0, -1)
    best_area = 0
    for i in range(nrow):
        heights = np.where(ok[i], heights + 1, 0)
        stack: list[int] = []
        for j in range(ncol + 1):
            hj = heights[j] if j < ncol else 0
            while stack and heights[stack[-1]] >= hj:
                top = stack.pop()
                height = heights[top]
                left = stack[-1] + 1 if stack else 0
                area = height * (j - left)
                if area > best_area:
                    best_area = area
                    best = (i - height + 1, i, left, j - 1)
            stack.append(j)
    if best_area == 0:
        raise InversionError("image of the chart contains no rectangle")
    return best


def _raster_best(poly, lo, hi, resolution):
    xs = np.linspace(lo[0], hi[0], resolution + 1)
    ys = np.linspace(lo[1], hi[1], resolution + 1)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    inside = shapely.contains_xy(poly, X, Y)
    cells = inside[:-1, :-1] & inside[1:, :-1] & inside[:-1, 1:] & inside[1:, 1:]
    return xs, ys, _largest_rectangle(cells)


def image_rectangle(a: ScalarField, b: ScalarField, margin: int = 2, resolution: int = RASTER,
                    zoom_passes: int = ZOOM_PASSES) -> tuple[tuple[float, float], tuple[float, float]]:
    """Largest axis-aligned rectangle inside the image polygon of the chart
    boundary, shrunk by ``margin`` raster cells on every side.

    The first raster covers the bounding box of the image; thin, slanted
    images are then re-rastered in a window around the current best rectangle
    (``zoom_passes`` times) so its edges are resolved to ``1/resolution`` of
    its own size rather than of the bounding box.
    """
    ring = _boundary_polygon(a.values, b.values)
    poly = shapely.Polygon(ring)
    if not poly.is_valid:
        raise InversionError("chart image folds over itself (boundary self-intersects)")
    box_lo = ring.min(axis=0)
    box_hi = ring.max(axis=0)
    lo, hi = box_lo, box_hi
    for k in range(zoom_passes + 1):
        xs, ys, (i0, i1, j0, j1) = _raster_best(poly, lo, hi, resolution)
        r_lo = np.array([xs[i0], ys[j0]])
        r_hi = np.array([xs[i1 + 1], ys[j1 + 1]])
        if k == zoom_passes:
            break
        w = r_hi - r_lo
        lo = np.maximum(box_lo, r_lo - w)
        hi = np.minimum(box_hi, r_hi + w)
    i0, i1, j0, j1 = i0 + margin, i1 - margin, j0 + margin, j1 - margin
    if i1 < i0 or j1 < j0:
        raise InversionError("image rectangle vanishes after the safety margin")
    return (float(xs[i0]), float(xs[i1 + 1])), (float(ys[j0]), float(ys[j1 + 1]))


def newton_invert(a: ScalarField, b: ScalarField, A: np.ndarray, B: np.ndarray,
                  seed1: np.ndarray, seed2: np.ndarray, tol: float = NEWTON_TOL,
                  max_iter: int = NEWTON_MAX_ITER):
    """Solve a(p) = A, b(p) = B pointwise; returns p1, p2, iterations, last step."""
    dom = a.domain
    lo = np.array(dom.lower)
    hi = np.array(dom.upper)
    p1 = np.array(seed1, dtype=float).ravel()
    p2 = np.array(seed2, dtype=float).ravel()
    A = np.asarray(A, float).ravel()
    B = np.asarray(B, float).ravel()
    active = np.arange(p1.size)
    it = 0
    last_step = 0.0
    while active.size and it < max_iter:
        it += 1
        x, y = p1[active], p2[active]
        ra = a.spline.ev(x, y) - A[active]
        rb = b.spline.ev(x, y) - B[active]
        a1 = a.spline.ev(x, y, dx=1)
        a2 = a.spline.ev(x, y, dy=1)
        b1 = b.spline.ev(x, y, dx=1)
        b2 = b.spline.ev(x, y, dy=1)
        det = a1 * b2 - a2 * b1
        if np.any(det == 0):
            raise TransformError("singular Jacobian during Newton inversion")
        d1 = (b2 * ra - a2 * rb) / det
        d2 = (a1 * rb - b1 * ra) / det
        x_new = np.clip(x - d1, lo[0], hi[0])
        y_new = np.clip(y - d2, lo[1], hi[1])
        step = np.maximum(np.abs(x_new - x), np.abs(y_new - y))
        p1[active], p2[active] = x_new, y_new
        last_step = float(step.max())
        scale = np.maximum(1.0, np.maximum(np.abs(x_new), np.abs(y_new)))
        active = active[step > tol * scale]
    if active.size:
        raise InversionError(
            f"Newton did not converge for {active.size} points in {max_iter} iterations"
        )
    return p1, p2, it, last_step


def invert_chart(a: ScalarField, b: ScalarField, counts=None, target_bounds=None,
                 names=("a", "b"), margin: int = 2, tol: float = NEWTON_TOL,
                 max_iter: int = NEWTON_MAX_ITER, det_threshold: float = 1e-6) -> ChartInverse:
    """Invert the sampled map ``p -> (a(p), b(p))`` onto a uniform rectangle.

    Parameters
    ----------
    counts : (int, int), optional
        Target sampling, defaults to the source counts.
    target_bounds : ((lo1, hi1), (lo2, hi2)), optional
        Use this rectangle instead of the largest inscribed one.
    det_threshold : float
        Refuse if min |det J| < det_threshold * median |det J|, or if the
        Jacobian changes sign.
    """
    src = a.domain
    det = jacobian_determinant(a, b).values
    absdet = np.abs(det)
    med = float(np.median(absdet))
    if med == 0 or absdet.min() < det_threshold * med or not (np.all(det > 0) or np.all(det < 0)):
        raise TransformError(
            f"chart change is singular: min |det| = {absdet.min():.3e}, median {med:.3e}"
        )
    if target_bounds is None:
        target_bounds = image_rectangle(a, b, margin=margin)
    counts = tuple(counts) if counts is not None else src.counts
    target = GridDomain(tuple(names), (target_bounds[0][0], target_bounds[1][0]),
                        (target_bounds[0][1], target_bounds[1][1]), counts)
    A, B = target.mesh()

    # nearest forward-image sample as seed, in range-normalized coordinates
    sa = np.ptp(a.values) or 1.0
    sb = np.ptp(b.values) or 1.0
    tree = cKDTree(np.column_stack([a.values.ravel() / sa, b.values.ravel() / sb]))
    _, idx = tree.query(np.column_stack([A.ravel() / sa, B.ravel() / sb]))
    s1, s2 = src.mesh()
    p1, p2, iters, step = newton_invert(
        a, b, A, B, s1.ravel()[idx], s2.ravel()[idx], tol=tol, max_iter=max_iter
    )
    resid = np.maximum(
        np.abs(a.spline.ev(p1, p2) - A.ravel()) / sa,
        np.abs(b.spline.ev(p1, p2) - B.ravel()) / sb,
    )
    max_res = float(resid.max())
    if max_res > 1e-9:
        raise InversionError(
            f"target point outside the chart image (relative residual {max_res:.3e})"
        )
    return ChartInverse(src, target, p1.reshape(counts), p2.reshape(counts), iters, step, max_res)
