"""Conjugate potentials by line integration, and the light-cone chart.

A potential phi with prescribed gradient (d1, d2) exists iff the mixed
partials agree; the defect D2(d1) - D1(d2) is checked before integrating.
Potentials are fixed up to a constant; by default the lower-left corner
value is 0.
"""

from __future__ import annotations

import numpy as np
from scipy.integrate import cumulative_simpson

from ..errors import CompatibilityError
from ..grid import ResidualReport, ScalarField, differentiate, residual_report
from .fields import LightconeTriple, PhysicalPair

COMPAT_TOL = 10.0  # defect <= COMPAT_TOL * h^2 * scale; boundary stencils sit near 3 h^2 scale
SCALE_FLOOR = 1e-6  # keeps roundoff on (nearly) constant gradients from failing
INTERIOR = 4  # two nested 5-point derivatives: edge error reaches 2 rows in per pass


def compatibility_defect(d1: ScalarField, d2: ScalarField, label: str = "compat") -> ResidualReport:
    """Interior norms of D2(d1) - D1(d2), with the tolerance C h^2 scale."""
    a = differentiate(d1, 2).values
    b = differentiate(d2, 1).values
    sl = (slice(INTERIOR, -INTERIOR),) * 2
    scale = max(np.abs(a[sl]).max(), np.abs(b[sl]).max(), SCALE_FLOOR)
    h = d1.domain.h
    rep = residual_report(label, a - b, h, interior=INTERIOR)
    return rep.with_tol(COMPAT_TOL * h * h * scale)


def integrate_gradient(d1: ScalarField, d2: ScalarField, corner: float = 0.0) -> ScalarField:
    """Potential from its gradient: along axis 2 on the first row, then along
    axis 1 up every column (composite Simpson, 4th order)."""
    h1, h2 = d1.domain.spacing
    row = corner + cumulative_simpson(d2.values[0, :], dx=h2, initial=0.0)
    cols = cumulative_simpson(d1.values, dx=h1, axis=0, initial=0.0)
    return ScalarField(d1.domain, row[None, :] + cols)


def _checked(d1, d2, label, corner, check):
    rep = compatibility_defect(d1, d2, label)
    if check and not rep.passed:
        raise CompatibilityError(
            f"{label}: compatibility defect {rep.max:.3e} exceeds {rep.tol:.3e}"
        )
    return integrate_gradient(d1, d2, corner)


def zeta_gradient(R: ScalarField, eta: float = 1.0):
    Rt = differentiate(R, 1)
    Rm = differentiate(R, 2)
    zt = 0.5 * (Rt * Rt + R * R * Rm * Rm * (1.0 / eta**2))
    return zt, Rt * Rm


def compute_zeta(R: ScalarField, eta: float = 1.0, corner: float = 0.0, check: bool = True) -> ScalarField:
    """zeta with zeta_t = (R_t^2 + R^2 R_m^2 / eta^2)/2 and zeta_m = R_t R_m.

    Raises
    ------
    CompatibilityError
        If R is not (numerically) a solution, so no such zeta exists.
    """
    zt, zm = zeta_gradient(R, eta)
    return _checked(zt, zm, "zeta", corner, check)


def compute_kappa(
    R: ScalarField, zeta: ScalarField, eta: float = 1.0, corner: float = 0.0, check: bool = True
) -> ScalarField:
    """kappa with kappa_m = eta zeta_t and kappa_t = R^2 zeta_m / eta."""
    zt = differentiate(zeta, 1)
    zm = differentiate(zeta, 2)
    return _checked(R * R * zm * (1.0 / eta), eta * zt, "kappa", corner, check)


def compute_v(
    r: ScalarField, z: ScalarField, E: float = 1.0, corner: float = 0.0, check: bool = True
) -> ScalarField:
    """v on a (t, phi) chart with v_phi = E z_t and v_t = r^2 z_phi / E."""
    zt = differentiate(z, 1)
    zp = differentiate(z, 2)
    return _checked(r * r * zp * (1.0 / E), E * zt, "v", corner, check)


def lightcone_chart(pair: PhysicalPair, eta: float = 1.0, check: bool = True):
    """tau = (t + z)/2 and mu = (E phi + v)/(2 eta) as fields on the (t, phi) chart.

    Returns ``(tau, mu, reports)`` where the reports hold the residuals of
    eta mu_t = r^2 tau_phi / E and eta mu_phi / E = tau_t.
    """
    t, phi = pair.domain.mesh()
    E = pair.E
    tau = ScalarField(pair.domain, 0.5 * (t + pair.z.values))
    mu = ScalarField(pair.domain, (E * phi + pair.v.values) / (2.0 * eta))
    tt, tp = differentiate(tau, 1), differentiate(tau, 2)
    mt, mp = differentiate(mu, 1), differentiate(mu, 2)
    h = pair.domain.h
    reps = [
        residual_report("eq8_mu_t", eta * mt - pair.r * pair.r * tp * (1.0 / E), h, INTERIOR),
        residual_report("eq8_mu_phi", eta * mp * (1.0 / E) - tt, h, INTERIOR),
    ]
    if check:
        scale = max(np.abs(tt.values).max(), np.abs(tp.values).max(), 1.0)
        tol = COMPAT_TOL * h * h * scale
        reps = [r.with_tol(tol) for r in reps]
        bad = [r for r in reps if not r.passed]
        if bad:
            raise CompatibilityError(
                f"light-cone chart residual {bad[0].label} = {bad[0].max:.3e} above {tol:.3e}"
            )
    return tau, mu, reps


def triple_from_R(R: ScalarField, eta: float = 1.0, zeta0: float = 0.0, kappa0: float = 0.0,
                  check: bool = True) -> LightconeTriple:
    """Complete a sampled R to a triple by integrating both potentials."""
    zeta = compute_zeta(R, eta, zeta0, check)
    kappa = compute_kappa(R, zeta, eta, kappa0, check)
    return LightconeTriple(R.domain, R, zeta, kappa, eta)
