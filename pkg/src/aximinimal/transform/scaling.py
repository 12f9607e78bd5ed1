"""The two-parameter scaling symmetry and the way back to (t, phi)."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

from ..catalog import Derivs
from ..grid import GridDomain, ScalarField
from .charts import invert_chart
from .fields import LightconeTriple, PhysicalPair, ScalingParams
from .potentials import compute_v

# powers of (alpha, alpha*gamma, gamma) picked up by each Derivs slot:
# overall factor alpha^a gamma^g, then (alpha gamma)^n_t gamma^n_m from the chain rule
_FACTORS = {
    "R": (1, 0), "zeta": (3, 1), "kappa": (4, 1),
}
_ORDERS = {
    "": (0, 0), "_t": (1, 0), "_m": (0, 1), "_tt": (2, 0), "_tm": (1, 1), "_mm": (0, 2),
}


@dataclass(frozen=True)
class ScaledSolution:
    """alpha R(alpha gamma tau, gamma mu) and matching potentials of a closed form."""

    base: Any
    params: ScalingParams

    @property
    def eta(self) -> float:
        return getattr(self.base, "eta", 1.0)

    @property
    def family(self) -> str:
        return f"scaled({getattr(self.base, 'family', '?')})"

    def evaluate(self, tau, mu) -> Derivs:
        a, g = self.params.alpha, self.params.gamma
        tau = np.asarray(tau, float)
        mu = np.asarray(mu, float)
        d = self.base.evaluate(a * g * tau, g * mu)
        out = {}
        for name in Derivs._fields:
            head, _, tail = name.partition("_")
            fa, fg = _FACTORS[head]
            nt, nm = _ORDERS["_" + tail if tail else ""]
            out[name] = getattr(d, name) * a**fa * g**fg * (a * g) ** nt * g**nm
        return Derivs(**out)

    def __call__(self, tau, mu):
        d = self.evaluate(tau, mu)
        return d.R, d.zeta, d.kappa


def _scaled_axis(lo, hi, factor):
    a, b = lo / factor, hi / factor
    return (a, b, False) if factor > 0 else (b, a, True)


def scale(obj, params: ScalingParams):
    """Apply R -> alpha R(alpha gamma tau, gamma mu), zeta -> alpha^3 gamma zeta(..),
    kappa -> alpha^4 gamma kappa(..).

    Closed forms give a :class:`ScaledSolution`. A sampled triple is mapped
    node-for-node onto the preimage chart, so no interpolation is involved.
    If alpha < 0, -R is identified with R.
    """
    if not isinstance(obj, LightconeTriple):
        return ScaledSolution(obj, params)
    a, g = params.alpha, params.gamma
    dom = obj.domain
    lo1, hi1, flip1 = _scaled_axis(dom.lower[0], dom.upper[0], a * g)
    lo2, hi2, flip2 = _scaled_axis(dom.lower[1], dom.upper[1], g)
    factors = (a * g, g)
    lines = tuple((ax, v / factors[ax - 1]) for ax, v in dom.singular_lines)
    new = GridDomain(dom.names, (lo1, lo2), (hi1, hi2), dom.counts, lines)

    def remap(values, factor):
        v = values * factor
        if flip1:
            v = v[::-1, :]
        if flip2:
            v = v[:, ::-1]
        return ScalarField(new, v)

    sol = ScaledSolution(obj.solution, params) if obj.solution is not None else None
    return LightconeTriple(
        new,
        remap(obj.R.values, abs(a)),
        remap(obj.zeta.values, a**3 * g),
        remap(obj.kappa.values, a**4 * g),
        obj.eta,
        sol,
    )


def physical_map(triple: LightconeTriple, E: float = 1.0):
    """Fields t = tau + zeta/2 and phi = (eta mu + kappa/2)/E on the triple's chart."""
    tau, mu = triple.domain.mesh()
    t = ScalarField(triple.domain, tau + 0.5 * triple.zeta.values)
    phi = ScalarField(triple.domain, (triple.eta * mu + 0.5 * triple.kappa.values) / E)
    return t, phi


def to_physical(triple: LightconeTriple, params: ScalingParams | None = None, E: float = 1.0,
                counts=None, target_bounds=None, margin: int = 2) -> PhysicalPair:
    """Orthonormal-gauge (r, z, v) on a uniform (t, phi) rectangle.

    The triple is scaled first, then (tau, mu) -> (t, phi) is inverted point by
    point. v comes from integrating v_phi = E z_t, v_t = r^2 z_phi / E, with
    its constant fixed so that mu = (E phi + v)/(2 eta) at the corner.
    """
    s = scale(triple, params) if params is not None else triple
    t, phi = physical_map(s, E)
    inv = invert_chart(t, phi, counts=counts, target_bounds=target_bounds,
                       names=("t", "phi"), margin=margin)
    r = inv.pull(s.R)
    zeta = inv.pull(s.zeta)
    kappa0 = float(s.kappa.ev(inv.p1[0, 0], inv.p2[0, 0]))
    z = ScalarField(inv.target, inv.p1 - 0.5 * zeta.values)
    v0 = s.eta * inv.p2[0, 0] - 0.5 * kappa0
    v = compute_v(r, z, E, corner=v0)
    return PhysicalPair(inv.target, r, z, v, E, inv)
