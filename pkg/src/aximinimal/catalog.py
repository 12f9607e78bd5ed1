"""Closed-form axially symmetric minimal hypersurfaces in light-cone gauge.

Each family provides R, zeta, kappa on the (tau, mu) chart together with
analytic partial derivatives (second order for R and zeta, first order for
kappa). All closed forms are written for eta = 1; a general eta is obtained
by evaluating at (tau, eta * mu), which maps solutions for eta = 1 onto
solutions for eta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, NamedTuple

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import BPoly

from .errors import DomainError, SingularLocusError, UnknownFamilyError

SQRT2 = math.sqrt(2.0)


class Derivs(NamedTuple):
    """Values and partials of a light-cone triple at one or many points.

    Suffix ``_t`` is d/dtau, ``_m`` is d/dmu.
    """

    R: np.ndarray
    R_t: np.ndarray
    R_m: np.ndarray
    R_tt: np.ndarray
    R_tm: np.ndarray
    R_mm: np.ndarray
    zeta: np.ndarray
    zeta_t: np.ndarray
    zeta_m: np.ndarray
    zeta_tt: np.ndarray
    zeta_tm: np.ndarray
    zeta_mm: np.ndarray
    kappa: np.ndarray
    kappa_t: np.ndarray
    kappa_m: np.ndarray


# mu-derivative order of each Derivs slot, used for the eta rescaling
_MU_ORDER = (0, 0, 1, 0, 1, 2, 0, 0, 1, 0, 1, 2, 0, 0, 1)


# -- elliptic function ------------------------------------------------------


@dataclass(frozen=True, eq=False)
class EllipticF:
    """Odd solution of F'' = 2 F^3 with F(0) = 0, F'(0) = 1, so F'^2 = F^4 + 1.

    The table holds the accepted RK45 steps on s >= 0 up to the point where
    |F| first exceeds ``f_cap``; negative arguments use oddness of F.
    Between steps, F and F' are interpolated by quintic Hermite polynomials,
    using F'' = 2F^3 and F''' = 6F^2 F' at the nodes.
    """

    s: np.ndarray = field(repr=False)
    F: np.ndarray = field(repr=False)
    Fdot: np.ndarray = field(repr=False)
    max_step: float
    f_cap: float

    @classmethod
    def integrate(cls, f_cap: float = 1e3, max_step: float = 2e-3, rtol: float = 3e-14):
        def rhs(_, y):
            return [y[1], 2.0 * y[0] ** 3]

        def blowup(_, y):
            return abs(y[0]) - f_cap

        blowup.terminal = True
        sol = solve_ivp(
            rhs, (0.0, 10.0), [0.0, 1.0], method="RK45",
            rtol=rtol, atol=1e-16, max_step=max_step, events=blowup,
        )
        if sol.status != 1:
            raise RuntimeError("elliptic integration did not reach the blow-up cap")
        return cls(sol.t.copy(), sol.y[0].copy(), sol.y[1].copy(), max_step, f_cap)

    @property
    def s_max(self) -> float:
        """Largest |s| covered by the table."""
        return float(self.s[-1])

    @property
    def _interp(self):
        # not cached_property: frozen + eq=False keeps __dict__, so memoize by hand
        cache = self.__dict__.get("_interp_cache")
        if cache is None:
            F, Fd = self.F, self.Fdot
            F2, F3 = 2.0 * F**3, 6.0 * F**2 * Fd
            f = BPoly.from_derivatives(self.s, np.column_stack([F, Fd, F2]))
            fd = BPoly.from_derivatives(self.s, np.column_stack([Fd, F2, F3]))
            cache = (f, fd)
            self.__dict__["_interp_cache"] = cache
        return cache

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        a = np.abs(s)
        if np.any(a > self.s_max):
            raise DomainError(
                f"|s| = {float(a.max())} beyond the blow-up horizon {self.s_max}"
            )
        f_i, fd_i = self._interp
        sign = np.where(s < 0, -1.0, 1.0)
        return sign * f_i(a), fd_i(a)

    def invariant_defect(self) -> float:
        """max |F'^2 - F^4 - 1| / (1 + F^4) over the stored samples."""
        d = self.Fdot**2 - self.F**4 - 1.0
        return float(np.max(np.abs(d) / (1.0 + self.F**4)))


@lru_cache(maxsize=None)
def default_elliptic() -> EllipticF:
    return EllipticF.integrate()


def elliptic_F(s):
    """(F(s), F'(s)) for the odd branch F(0) = 0, F'(0) = 1."""
    return default_elliptic()(s)


def elliptic_index(tau):
    """s(tau) = (F^4 + 1/3) / (F F')^(3/2), the value of kappa zeta^(-3/2) along
    the elliptic family (independent of mu). Strictly decreasing on
    (0, s_max), from +inf to about 0.03."""
    F, Fd = elliptic_F(tau)
    return (F**4 + 1.0 / 3.0) / (F * Fd) ** 1.5


def elliptic_rho(zeta, kappa, iterations: int = 64):
    """Closed-form image of the elliptic family under the transform.

    rho = zeta^(1/2) H(kappa zeta^(-3/2)), where H is given parametrically by
    H(s(tau)) = sqrt(2 F(tau) / F'(tau)); tau is recovered from s by
    vectorized bisection (s is monotone). Needs zeta > 0, kappa > 0.
    """
    zeta = np.asarray(zeta, float)
    kappa = np.asarray(kappa, float)
    if np.any(zeta <= 0) or np.any(kappa <= 0):
        raise DomainError("elliptic image needs zeta > 0 and kappa > 0")
    target = kappa * zeta**-1.5
    ell = default_elliptic()
    lo = np.full(target.shape, 1e-9)
    hi = np.full(target.shape, ell.s_max)
    if np.any(target >= elliptic_index(lo)) or np.any(target <= elliptic_index(hi)):
        raise DomainError("kappa zeta^(-3/2) outside the range of the elliptic family")
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        above = elliptic_index(mid) > target  # s decreasing: root lies to the right
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)
    tau = 0.5 * (lo + hi)
    F, Fd = elliptic_F(tau)
    return np.sqrt(zeta) * np.sqrt(2.0 * F / Fd)


def elliptic_rho_printed(zeta, kappa):
    """zeta^(1/2) F(kappa zeta^(-3/2)): the commonly quoted form of the same
    image, kept for comparison. It does not reproduce the transform."""
    zeta = np.asarray(zeta, float)
    kappa = np.asarray(kappa, float)
    return np.sqrt(zeta) * elliptic_F(kappa * zeta**-1.5)[0]


# -- analytic solutions -----------------------------------------------------


@dataclass(frozen=True)
class AnalyticSolution:
    """A catalog entry: closed-form R, zeta, kappa with analytic partials."""

    family: str
    params: dict = field(default_factory=dict)
    eta: float = 1.0
    E: float = 1.0

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise UnknownFamilyError(self.family)
        spec = _FAMILIES[self.family]
        extra = set(self.params) - set(spec.params)
        if extra:
            raise DomainError(f"{self.family} has no parameters {sorted(extra)}")
        merged = {**spec.params, **self.params}
        object.__setattr__(self, "params", {k: float(v) for k, v in merged.items()})
        if not self.eta > 0 or not self.E > 0:
            raise DomainError("eta and E must be positive")
        if self.family == "tau_sqrt_mu" and not self.params["beta"] > 0:
            raise DomainError("beta must be positive")

    @property
    def singular_lines(self) -> tuple[tuple[int, float], ...]:
        return _FAMILIES[self.family].singular_lines

    def evaluate(self, tau, mu) -> Derivs:
        """Values and partials at ``(tau, mu)`` (arrays broadcast)."""
        tau, mu = np.broadcast_arrays(np.asarray(tau, float), np.asarray(mu, float))
        base = _FAMILIES[self.family].base(tau, self.eta * mu, **self.params)
        if self.eta == 1.0:
            return base
        return Derivs(*(v * self.eta**k for v, k in zip(base, _MU_ORDER)))

    def __call__(self, tau, mu):
        d = self.evaluate(tau, mu)
        return d.R, d.zeta, d.kappa


def _epsilon_base(tau, mu, eps=0.0, signed=False):
    rad = mu * mu + eps
    if np.any(rad < 0):
        raise SingularLocusError("negative radicand mu^2 + eps")
    if np.any(tau == 0):
        raise SingularLocusError("tau = 0 is singular")
    s = mu if signed else np.sqrt(rad)
    with np.errstate(divide="ignore", invalid="ignore"):
        s_m = np.ones_like(s) if signed else mu / s
        s_mm = np.zeros_like(s) if signed else eps / s**3
    R = SQRT2 * s / tau
    q = mu * mu + eps / 3.0
    p = mu**3 + eps * mu
    return Derivs(
        R=R,
        R_t=-R / tau,
        R_m=SQRT2 * s_m / tau,
        R_tt=2.0 * R / tau**2,
        R_tm=-SQRT2 * s_m / tau**2,
        R_mm=SQRT2 * s_mm / tau,
        zeta=-q / tau**3,
        zeta_t=3.0 * q / tau**4,
        zeta_m=-2.0 * mu / tau**3,
        zeta_tt=-12.0 * q / tau**5,
        zeta_tm=6.0 * mu / tau**4,
        zeta_mm=-2.0 / tau**3 + 0.0 * mu,
        kappa=p / tau**4,
        kappa_t=-4.0 * p / tau**5,
        kappa_m=(3.0 * mu * mu + eps) / tau**4,
    )


def _hyperboloid_base(tau, mu):
    return _epsilon_base(tau, mu, 0.0, signed=True)


def _tau_sqrt_mu_base(tau, mu, beta=1.0):
    if np.any(mu <= 0):
        raise SingularLocusError("tau_sqrt_mu needs mu > 0")
    b, b2 = beta, beta * beta
    s = np.sqrt(mu)
    return Derivs(
        R=b * tau * s,
        R_t=b * s,
        R_m=b * tau / (2.0 * s),
        R_tt=0.0 * tau,
        R_tm=b / (2.0 * s),
        R_mm=-b * tau / (4.0 * s**3),
        zeta=b2 * (mu * tau / 2.0 + b2 * tau**5 / 40.0),
        zeta_t=b2 * (mu / 2.0 + b2 * tau**4 / 8.0),
        zeta_m=b2 * tau / 2.0,
        zeta_tt=b2 * b2 * tau**3 / 2.0,
        zeta_tm=b2 / 2.0 + 0.0 * tau,
        zeta_mm=0.0 * tau,
        kappa=b2 * b2 * tau**4 * mu / 8.0 + b2 * mu * mu / 4.0,
        kappa_t=b2 * b2 * tau**3 * mu / 2.0,
        kappa_m=b2 * b2 * tau**4 / 8.0 + b2 * mu / 2.0,
    )


def _elliptic_base(tau, mu):
    F, Fd = elliptic_F(tau)
    F2 = F * F
    F3, F4 = F2 * F, F2 * F2
    zt = Fd * Fd + 2.0 * F4
    return Derivs(
        R=SQRT2 * F * mu,
        R_t=SQRT2 * Fd * mu,
        R_m=SQRT2 * F + 0.0 * mu,
        R_tt=2.0 * SQRT2 * F3 * mu,
        R_tm=SQRT2 * Fd + 0.0 * mu,
        R_mm=0.0 * mu,
        zeta=F * Fd * mu**2,
        zeta_t=zt * mu**2,
        zeta_m=2.0 * F * Fd * mu,
        zeta_tt=12.0 * F3 * Fd * mu**2,
        zeta_tm=2.0 * zt * mu,
        zeta_mm=2.0 * F * Fd + 0.0 * mu,
        kappa=(F4 + 1.0 / 3.0) * mu**3,
        kappa_t=4.0 * F3 * Fd * mu**3,
        kappa_m=(3.0 * F4 + 1.0) * mu**2,
    )


@dataclass(frozen=True)
class FamilySpec:
    name: str
    params: dict
    base: Callable = field(repr=False)
    singular_lines: tuple = ()
    default_chart: tuple = ((1.0, 2.0), (0.5, 1.5))
    description: str = ""

    def schema(self) -> dict:
        out = {k: {"type": "real", "default": v} for k, v in self.params.items()}
        out["eta"] = {"type": "real", "default": 1.0, "constraint": "> 0"}
        out["E"] = {"type": "real", "default": 1.0, "constraint": "> 0"}
        if self.name == "tau_sqrt_mu":
            out["beta"]["constraint"] = "> 0"
        return out


_FAMILIES: dict[str, FamilySpec] = {
    "hyperboloid": FamilySpec(
        "hyperboloid", {}, _hyperboloid_base, ((1, 0.0),),
        ((1.0, 2.0), (0.5, 1.5)),
        "R = sqrt(2) mu / tau; moving hyperboloids t^2 + x^2 + y^2 = z^2",
    ),
    "epsilon_family": FamilySpec(
        "epsilon_family", {"eps": 0.0}, _epsilon_base, ((1, 0.0),),
        ((1.0, 2.0), (0.5, 1.5)),
        "R = sqrt(2 (mu^2 + eps)) / tau; level set (t^2+x^2+y^2-z^2)(t+z)^2 = 16 eps/3",
    ),
    "tau_sqrt_mu": FamilySpec(
        "tau_sqrt_mu", {"beta": 1.0}, _tau_sqrt_mu_base, ((2, 0.0),),
        ((1.0, 1.5), (2.0, 3.0)),
        "R = beta tau sqrt(mu); level set t^2-x^2-y^2-z^2 = beta^4 (t+z)^6 / 1280",
    ),
    "elliptic": FamilySpec(
        "elliptic", {}, _elliptic_base, ((1, 0.0), (2, 0.0)),
        ((0.4, 0.8), (1.0, 2.0)),
        "R = sqrt(2) F(tau) mu with F'^2 = F^4 + 1",
    ),
}


def list_catalog() -> list[FamilySpec]:
    """The four families, in a fixed order."""
    return [_FAMILIES[k] for k in ("hyperboloid", "epsilon_family", "tau_sqrt_mu", "elliptic")]


def family_spec(name: str) -> FamilySpec:
    try:
        return _FAMILIES[name]
    except KeyError:
        raise UnknownFamilyError(name) from None


def get_solution(family: str, params: dict | None = None, eta: float = 1.0, E: float = 1.0):
    return AnalyticSolution(family, dict(params or {}), eta=eta, E=E)


def eval_solution(family: str, params: dict | None, point) -> Derivs:
    """Closed-form values and partials of ``family`` at a single ``(tau, mu)``."""
    params = dict(params or {})
    eta = params.pop("eta", 1.0)
    E = params.pop("E", 1.0)
    sol = get_solution(family, params, eta=eta, E=E)
    tau, mu = point
    d = sol.evaluate(float(tau), float(mu))
    return Derivs(*(float(v) for v in d))


# -- the hyperboloid in orthonormal gauge ------------------------------------


def _hyperboloid_radicands(t, phi, E, variant):
    S = np.sqrt(1.0 + 8.0 * (E * phi) ** 2 / t**4)
    a = np.sqrt((S + 1.0) / 2.0)
    b = np.sqrt((S - 1.0) / 2.0) if variant == "repaired" else a
    return a, b


def hyperboloid_physical(t, phi, E: float = 1.0, variant: str = "repaired", sign: int = 1):
    """``(r, z)`` of the moving hyperboloid in orthonormal (t, phi) gauge.

    ``variant="repaired"`` uses sqrt((S - 1)/2) in r, which keeps the surface on
    t^2 + r^2 = z^2; ``variant="printed"`` repeats sqrt((S + 1)/2) in both
    functions (so r = |z|) and exists only as a negative control.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t == 0):
        raise SingularLocusError("t = 0 is singular for the hyperboloid")
    if variant not in ("repaired", "printed"):
        raise ValueError(f"unknown variant {variant!r}")
    a, b = _hyperboloid_radicands(t, np.asarray(phi, float), E, variant)
    return np.abs(t) * b, sign * t * a


@lru_cache(maxsize=None)
def _hyperboloid_symbolic(variant: str):
    import sympy as sp

    t, E = sp.symbols("t E", positive=True)
    p = sp.symbols("phi", real=True)
    S = sp.sqrt(1 + 8 * (E * p) ** 2 / t**4)
    a = sp.sqrt((S + 1) / 2)
    b = sp.sqrt((S - 1) / 2) if variant == "repaired" else a
    exprs = {"r": t * b, "z": t * a, "v": E * p / a}
    out = []
    names = []
    for key, ex in exprs.items():
        for suffix, d in (
            ("", ex),
            ("_t", sp.diff(ex, t)),
            ("_p", sp.diff(ex, p)),
            ("_tt", sp.diff(ex, t, 2)),
            ("_tp", sp.diff(ex, t, p)),
            ("_pp", sp.diff(ex, p, 2)),
        ):
            names.append(key + suffix)
            out.append(d)
    fn = sp.lambdify((t, p, E), out, "numpy")
    return names, fn


def hyperboloid_physical_derivs(t, phi, E: float = 1.0, variant: str = "repaired") -> dict:
    """Analytic (t, phi) partials up to second order of r, z and v, t > 0.

    The conjugate potential is v = E phi / sqrt((S + 1)/2), which follows from
    v = eta mu - kappa / 2 on the light-cone side.
    """
    t, phi = np.broadcast_arrays(np.asarray(t, float), np.asarray(phi, float))
    if np.any(t <= 0):
        raise SingularLocusError("analytic derivatives are provided for t > 0 only")
    names, fn = _hyperboloid_symbolic(variant)
    vals = fn(t, phi, float(E))
    return {n: np.broadcast_to(np.asarray(v, float), t.shape) for n, v in zip(names, vals)}
