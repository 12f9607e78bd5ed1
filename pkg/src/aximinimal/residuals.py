"""Residuals of the field equations in both gauges, and level-set membership.

Every evaluator accepts either sampled fields (derivatives by 4th-order
finite differences, norms over the interior) or a closed form evaluated on the
nodes of a grid (exact derivatives).
"""

from __future__ import annotations

import numpy as np

from .catalog import hyperboloid_physical_derivs
from .errors import DomainError
from .grid import GridDomain, ResidualReport, ScalarField, differentiate, residual_report
from .transform.fields import LightconeTriple, PhysicalPair

INTERIOR = 2
CROSS_CHECK = 1e-3  # |r_t z_p - r_p z_t| must exceed this for the second-order check


def _fd_derivs(f: ScalarField, prefix: str) -> dict:
    f1 = differentiate(f, 1)
    f2 = differentiate(f, 2)
    return {
        prefix: f.values,
        f"{prefix}_t": f1.values,
        f"{prefix}_m": f2.values,
        f"{prefix}_tt": differentiate(f1, 1).values,
        f"{prefix}_tm": differentiate(f1, 2).values,
        f"{prefix}_mm": differentiate(f2, 2).values,
    }


def lightcone_residual_arrays(d, eta: float = 1.0) -> dict[str, np.ndarray]:
    """Pointwise residuals of the light-cone system from a mapping of derivatives.

    ``d`` needs the keys of :class:`aximinimal.catalog.Derivs` (attribute or
    item access).
    """
    g = d._asdict() if hasattr(d, "_asdict") else d
    R, Rt, Rm, Rtt, Rmm = g["R"], g["R_t"], g["R_m"], g["R_tt"], g["R_mm"]
    zt, zm, ztt, zmm = g["zeta_t"], g["zeta_m"], g["zeta_tt"], g["zeta_mm"]
    kt, km = g["kappa_t"], g["kappa_m"]
    return {
        "eq4_zeta_t": zt - 0.5 * (Rt**2 + R**2 * Rm**2 / eta**2),
        "eq4_zeta_m": zm - Rt * Rm,
        "eq5_R": eta**2 * Rtt - R * (Rm**2 + R * Rmm),
        "eq6_zeta": eta**2 * ztt - (2.0 * R * Rm * zm + R**2 * zmm),
        "eq9_kappa_m": km / eta - zt,
        "eq9_kappa_t": kt - R**2 * zm / eta,
    }


def residual_lightcone(obj, domain: GridDomain | None = None, interior: int | None = None,
                       analytic: bool | None = None) -> list[ResidualReport]:
    """One report per light-cone equation (first-order system, R, zeta, kappa).

    Parameters
    ----------
    obj : LightconeTriple or closed-form solution
        A closed form (anything with ``evaluate(tau, mu) -> Derivs``) needs
        ``domain``.
    interior : int, optional
        Rows/columns dropped at each edge; defaults to 2 for sampled input
        and 0 for exact derivatives.
    analytic : bool, optional
        For a triple that remembers its closed form, use exact derivatives at
        its nodes instead of finite differences. Default False.
    """
    if isinstance(obj, LightconeTriple):
        dom = obj.domain
        eta = obj.eta
        if analytic and obj.solution is not None:
            d = obj.solution.evaluate(*dom.mesh())
            interior = 0 if interior is None else interior
        else:
            d = {**_fd_derivs(obj.R, "R"), **_fd_derivs(obj.zeta, "zeta"), **_fd_derivs(obj.kappa, "kappa")}
            interior = INTERIOR if interior is None else interior
    else:
        if domain is None:
            raise DomainError("a closed-form input needs a domain to evaluate on")
        dom = domain
        eta = getattr(obj, "eta", 1.0)
        d = obj.evaluate(*dom.mesh())
        interior = 0 if interior is None else interior
    arrs = lightcone_residual_arrays(d, eta)
    return [residual_report(k, v, dom.h, interior) for k, v in arrs.items()]


def physical_residual_arrays(d: dict, E: float = 1.0, cross_check: float = CROSS_CHECK) -> dict:
    """Pointwise residuals of the orthonormal-gauge system.

    ``d`` holds r, z, v and their partials with suffixes _t, _p, _tt, _tp, _pp.
    The second-order equations are only kept where |r_t z_p - r_p z_t|
    exceeds ``cross_check`` (elsewhere they are not implied); masked points
    are set to 0.
    """
    r, rt, rp, rtt, rpp = d["r"], d["r_t"], d["r_p"], d["r_tt"], d["r_pp"]
    zt, zp, ztt, zpp = d["z_t"], d["z_p"], d["z_tt"], d["z_pp"]
    vt, vp = d["v_t"], d["v_p"]
    mask = np.abs(rt * zp - rp * zt) > cross_check
    sq = rp**2 + zp**2
    eq24_z = E**2 * ztt - (2.0 * r * rp * zp + r**2 * zpp)
    eq24_r = E**2 * rtt - (2.0 * r * rp**2 + r**2 * rpp) + r * sq
    return {
        "eq2_v_phi": vp / E - zt,
        "eq2_v_t": vt - r**2 * zp / E,
        "eq3_orth": rt * rp + zt * zp,
        "eq3_norm": rt**2 + zt**2 + r**2 * sq / E**2 - 1.0,
        "eq24_z": np.where(mask, eq24_z, 0.0),
        "eq24_r": np.where(mask, eq24_r, 0.0),
    }


def _fd_physical(pair: PhysicalPair) -> dict:
    out = {}
    for name in ("r", "z", "v"):
        g = _fd_derivs(getattr(pair, name), name)
        out.update({k.replace("m", "p") if "_" in k else k: v for k, v in g.items()})
    return out


def residual_physical(obj, domain: GridDomain | None = None, E: float = 1.0,
                      variant: str = "repaired", interior: int | None = None,
                      cross_check: float = CROSS_CHECK) -> list[ResidualReport]:
    """Reports for the (t, phi) system: conjugacy of v, the two constraints,
    and the implied second-order equations.

    ``obj`` is a :class:`PhysicalPair` (finite differences), a mapping of
    exact derivatives as produced by
    :func:`aximinimal.catalog.hyperboloid_physical_derivs` (with ``domain``),
    or the string ``"hyperboloid"`` to evaluate that closed form (``variant``
    selects the repaired or printed branch) on ``domain``.
    """
    if isinstance(obj, PhysicalPair):
        dom, E = obj.domain, obj.E
        d = _fd_physical(obj)
        interior = INTERIOR if interior is None else interior
    else:
        if domain is None:
            raise DomainError("closed-form input needs a domain")
        dom = domain
        d = hyperboloid_physical_derivs(*dom.mesh(), E=E, variant=variant) if obj == "hyperboloid" else obj
        interior = 0 if interior is None else interior
    arrs = physical_residual_arrays(d, E, cross_check)
    return [residual_report(k, v, dom.h, interior) for k, v in arrs.items()]


LEVEL_SETS = ("eq26", "eq33", "eq34", "eq39")


def level_set_constant(which: str, params: dict | None = None) -> float:
    p = dict(params or {})
    if which == "eq26":
        return 16.0 * p.get("eps", 0.0) / 3.0
    if which == "eq33":
        return p.get("beta", 1.0) ** 4 / 1280.0
    if which == "eq39":
        return float(p["C"])
    if which == "eq34":
        return 0.0
    raise KeyError(f"unknown level set {which!r}; expected one of {LEVEL_SETS}")


def level_set_values(which: str, tau, R, zeta, kappa=None, params: dict | None = None):
    """Defining function minus its constant, with t + z = 2 tau, t - z = zeta,
    x^2 + y^2 = R^2.

    eq26: (t^2 - z^2 + R^2)(t + z)^2 = 16 eps / 3
    eq33: t^2 - z^2 - R^2 = C (t + z)^6, C = beta^4 / 1280
    eq39: (2 tau zeta + R^2) zeta^2 = C (the z -> -z mirror of eq26)
    eq34: (2 zeta - tau^5/20)(9 tau^5/20 + 2 zeta) = 4 tau^2 kappa (beta = 1)
    """
    c = level_set_constant(which, params)
    if which == "eq26":
        return (2.0 * tau * zeta + R**2) * 4.0 * tau**2 - c
    if which == "eq33":
        return 2.0 * tau * zeta - R**2 - c * (2.0 * tau) ** 6
    if which == "eq39":
        return (2.0 * tau * zeta + R**2) * zeta**2 - c
    if kappa is None:
        raise ValueError("eq34 needs kappa")
    return (2.0 * zeta - tau**5 / 20.0) * (0.45 * tau**5 + 2.0 * zeta) - 4.0 * tau**2 * kappa


def level_set_check(obj, which: str, params: dict | None = None,
                    domain: GridDomain | None = None) -> ResidualReport:
    """max |defining polynomial - constant| over the nodes of the chart.

    ``obj`` is a triple (its sampled R, zeta, kappa are used) or a closed
    form evaluated on ``domain``. The potentials must be in the gauge the
    level set assumes (the closed-form gauge of the corresponding family).
    """
    level_set_constant(which, params)  # validates ``which``
    if isinstance(obj, LightconeTriple):
        dom = obj.domain
        R, zeta, kappa = obj.R.values, obj.zeta.values, obj.kappa.values
    else:
        if domain is None:
            raise DomainError("closed-form input needs a domain")
        dom = domain
        R, zeta, kappa = obj(*dom.mesh())
    tau = dom.mesh()[0]
    vals = level_set_values(which, tau, R, zeta, kappa, params)
    return residual_report(which, vals, dom.h)
