"""The involutive transform: rewrite R(tau, mu) as rho(zeta, kappa).

With L = (R_t^2 - R^2 R_m^2 / eta^2)/2 the Jacobian of (tau, mu) -> (zeta,
kappa) is eta L^2, and rho satisfies rho_zz = rho (rho rho_k)_k (eta = 1 in
the new chart). Its potentials are the old coordinates: the new zeta is tau
and the new kappa is eta * mu (up to additive constants).
"""

from __future__ import annotations

import numpy as np

from ..errors import TransformError
from ..grid import ResidualReport, ScalarField, differentiate, residual_report
from .charts import ChartInverse, invert_chart
from .fields import LightconeTriple, TransformDiagnostics

L_THRESHOLD = 1e-6


def lightcone_density(R: ScalarField, eta: float = 1.0) -> ScalarField:
    """L = (R_t^2 - R^2 R_m^2 / eta^2) / 2."""
    Rt = differentiate(R, 1)
    Rm = differentiate(R, 2)
    return 0.5 * (Rt * Rt - R * R * Rm * Rm * (1.0 / eta**2))


def bianchi_transform(triple: LightconeTriple, counts=None, target_bounds=None,
                      threshold: float = L_THRESHOLD, margin: int = 2):
    """Transform a triple to the (zeta, kappa) chart.

    Parameters
    ----------
    counts : (int, int), optional
        Sampling of the output rectangle, defaults to the input counts.
    target_bounds : optional
        Output rectangle in (zeta, kappa); defaults to the largest one
        inscribed in the image of the input chart.
    threshold : float
        Refuse when min |L| < threshold * median |L|.

    Returns
    -------
    out : LightconeTriple
        rho on the new chart, with zeta = tau and kappa = eta * mu pulled back.
    diag : TransformDiagnostics
    """
    L = lightcone_density(triple.R, triple.eta)
    absL = np.abs(L.values)
    med = float(np.median(absL))
    min_abs = float(absL.min())
    sign_change = not (np.all(L.values > 0) or np.all(L.values < 0))
    if med == 0 or min_abs < threshold * med or sign_change:
        raise TransformError(
            f"transform singular: min |L| = {min_abs:.3e} vs median {med:.3e}"
        )
    inv = invert_chart(
        triple.zeta, triple.kappa, counts=counts, target_bounds=target_bounds,
        names=("zeta", "kappa"), margin=margin,
    )
    dom = inv.target
    rho = inv.pull(triple.R)
    new_zeta = ScalarField(dom, inv.p1)
    new_kappa = ScalarField(dom, triple.eta * inv.p2)
    out = LightconeTriple(dom, rho, new_zeta, new_kappa, 1.0)
    diag = TransformDiagnostics(L, triple.eta * L * L, min_abs, threshold * med, inv)
    return out, diag


def product_identity(inp: LightconeTriple, out: LightconeTriple, correspondence: ChartInverse,
                     interior: int = 2) -> ResidualReport:
    """max |L_out * L_in - 1| over corresponding points (L_in pulled back)."""
    L_out = lightcone_density(out.R, out.eta)
    L_in = correspondence.pull(lightcone_density(inp.R, inp.eta))
    return residual_report("eq16_product", L_out.values * L_in.values - 1.0, out.domain.h, interior)


def pulled_back_derivatives(inp: LightconeTriple, out: LightconeTriple, inv: ChartInverse,
                            interior: int = 2) -> list[ResidualReport]:
    """Check rho_zeta = R_t / L and rho_kappa = -R_m / (eta L) at corresponding points."""
    L = inv.pull(lightcone_density(inp.R, inp.eta)).values
    Rt = inv.pull(differentiate(inp.R, 1)).values
    Rm = inv.pull(differentiate(inp.R, 2)).values
    rz = differentiate(out.R, 1).values
    rk = differentiate(out.R, 2).values
    h = out.domain.h
    return [
        residual_report("eq15_rho_zeta", rz - Rt / L, h, interior),
        residual_report("eq15_rho_kappa", rk + Rm / (inp.eta * L), h, interior),
    ]


def involution_check(triple: LightconeTriple, counts=None, threshold: float = L_THRESHOLD,
                     margin: int = 2) -> ResidualReport:
    """Apply the transform twice and compare |R| with the input on the
    common sub-rectangle (R and -R are identified)."""
    once, _ = bianchi_transform(triple, counts=counts, threshold=threshold, margin=margin)
    twice, _ = bianchi_transform(once, counts=counts, threshold=threshold, margin=margin)
    tau, kmu = twice.domain.mesh()
    mu = kmu / triple.eta
    if triple.solution is not None:
        ref = triple.solution(tau, mu)[0]
    else:
        ref = triple.R.ev(tau, mu)
    diff = np.abs(twice.R.values) - np.abs(ref)
    return residual_report("involution", diff, twice.domain.h)
