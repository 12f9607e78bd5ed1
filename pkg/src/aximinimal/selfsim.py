"""Self-similar solutions R = tau^(1/3) f(xi), zeta = tau^(-1/3) g(xi).

With xi = tau mu^(-3/4) the light-cone system reduces to the algebraic
constraint 2 g^3 + f^2 g^2 = C (C < 0) and two ODEs in xi,

    g' = f' (f/3 + xi f')
    2 (xi g' - g/3) = (f/3 + xi f')^2 + (9/16) xi^(14/3) f^2 f'^2

whose solution is known in closed form through z = -g^3:

    xi = z / ((z + C/2)^(3/4) (z - C/4)^(3/8))          (E^2 = 1)

and g solves a polynomial of degree 9 in g^3 (27 in g).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import sympy as sp
from scipy.integrate import quad
from scipy.interpolate import CubicSpline

from .errors import DomainError, ProfileError
from .grid import GridDomain, ResidualReport, ScalarField, diff1d, residual_report
from .transform.fields import LightconeTriple
from .transform.potentials import compute_kappa

CONSTRAINT_TOL = 1e-12


# ---------------------------------------------------------------- closed forms

def _check_C(C: float) -> float:
    C = float(C)
    if not C < 0:
        raise ProfileError("C must be negative")
    return C


def xi_of_z(z, C: float, E2: float = 1.0):
    """Closed-form similarity variable on the branch z > -C/2."""
    z = np.asarray(z, float)
    return z / ((z + C / 2) ** 0.75 * (z - C / 4) ** 0.375) / E2


def dlogxi_dz(z, C: float):
    """d(log xi)/dz from the partial-fraction form of the first ODE."""
    z = np.asarray(z, float)
    return 1.0 / z - 0.75 / (z + C / 2) - 0.375 / (z - C / 4)


def profile_g(z):
    """g = -z^(1/3) (real branch)."""
    return -np.cbrt(np.asarray(z, float))


def profile_f(z, C: float):
    """f = -(1/g) sqrt(C - 2 g^3) = sqrt(C + 2z) / z^(1/3)."""
    z = np.asarray(z, float)
    return np.sqrt(C + 2.0 * z) / np.cbrt(z)


# ---------------------------------------------------------------- profile

@dataclass(frozen=True, eq=False)
class SelfSimilarProfile:
    """Samples (z, g, f, xi) of one branch.

    The samples are uniform in ``s = log(z + C/2)``, the log-distance to the
    pole of the branch, which keeps the profile smooth in the sampling
    variable right up to the end of the range.
    """

    C: float
    z: np.ndarray
    g: np.ndarray
    f: np.ndarray
    xi: np.ndarray
    E2: float = 1.0
    valid: np.ndarray = field(default=None, repr=False)

    def __len__(self):
        return self.z.size

    def constraint_defect(self) -> np.ndarray:
        """2 g^3 + f^2 g^2 - C at every sample."""
        return 2.0 * self.g**3 + self.f**2 * self.g**2 - self.C

    def validate(self, tol: float = CONSTRAINT_TOL) -> None:
        d = np.abs(self.constraint_defect())
        if d.max() > tol * max(1.0, abs(self.C)):
            raise ProfileError(f"constraint violated by {d.max():.3e}")
        if not np.all(self.xi > 0):
            raise ProfileError("xi must be positive")
        dx = np.diff(self.xi)
        if not (np.all(dx > 0) or np.all(dx < 0)):
            raise ProfileError("xi is not monotone along the branch")

    @property
    def s(self) -> np.ndarray:
        return np.log(self.z + self.C / 2)

    @property
    def xi_range(self) -> tuple[float, float]:
        return float(self.xi.min()), float(self.xi.max())

    def table(self) -> np.ndarray:
        """Columns z, g, f, xi."""
        return np.column_stack([self.z, self.g, self.f, self.xi])

    def to_csv(self) -> str:
        lines = ["z,g,f,xi"]
        lines += [",".join(f"{x:.17g}" for x in row) for row in self.table()]
        return "\n".join(lines) + "\n"

    def z_of_xi(self, xi, tol: float = 1e-15, max_iter: int = 50) -> np.ndarray:
        """Invert the closed-form xi(z) on this branch.

        A spline of log z against log xi through the samples gives the seed,
        Newton on log xi(z) polishes it to round-off.
        """
        xi = np.asarray(xi, float)
        lo, hi = self.xi_range
        if np.any(xi < lo * (1 - 1e-12)) or np.any(xi > hi * (1 + 1e-12)):
            raise DomainError(f"xi outside the profile range [{lo:.6g}, {hi:.6g}]")
        order = np.argsort(self.xi)
        seed = CubicSpline(np.log(self.xi[order]), np.log(self.z[order]))
        z = np.exp(seed(np.log(xi)))
        target = np.log(xi * self.E2)
        for _ in range(max_iter):
            step = (np.log(xi_of_z(z, self.C)) - target) / dlogxi_dz(z, self.C)
            z = z - step
            if np.all(np.abs(step) <= tol * np.abs(z)):
                break
        return z


def solve_profile(C: float, z_range: tuple[float, float], n: int = 400, E2: float = 1.0) -> SelfSimilarProfile:
    """Sample the branch g < 0, z = -g^3 > -C/2 on ``n`` points, uniform in
    log(z + C/2).

    Raises
    ------
    ProfileError
        C not negative, empty range, or a range that reaches the pole
        z = -C/2 (where the radicand C + 2z of f vanishes) or beyond.
    """
    C = _check_C(C)
    z0, z1 = map(float, z_range)
    if not z1 > z0 or n < 2:
        raise ProfileError("empty z range")
    if E2 <= 0:
        raise ProfileError("E^2 must be positive")
    if z0 <= -C / 2 or z0 <= C / 4 or z0 <= 0:
        raise ProfileError(f"z range must stay above the pole z = {-C / 2:g}")
    z = np.exp(np.linspace(np.log(z0 + C / 2), np.log(z1 + C / 2), n)) - C / 2
    z[0], z[-1] = z0, z1
    g = profile_g(z)
    f = profile_f(z, C)
    xi = xi_of_z(z, C, E2)
    prof = SelfSimilarProfile(C, z, g, f, xi, E2, np.ones(n, dtype=bool))
    prof.validate()
    return prof


# ---------------------------------------------------------------- ODE residuals

def profile_derivatives(p: SelfSimilarProfile):
    """g' and f' with respect to xi, by 4th-order differences in the sampling
    variable s and the chain rule."""
    s = p.s
    h = (s[-1] - s[0]) / (s.size - 1)
    xz = diff1d(p.xi, h)
    return diff1d(p.g, h) / xz, diff1d(p.f, h) / xz


def ode_residual_arrays(xi, g, f, dg, df):
    a = f / 3.0 + xi * df
    r42 = dg - df * a
    r43 = 2.0 * (xi * dg - g / 3.0) - a**2 - (9.0 / 16.0) * xi ** (14.0 / 3.0) * f**2 * df**2
    return r42, r43


def residual_odes(p: SelfSimilarProfile) -> list[ResidualReport]:
    """Residuals of the two ODEs along the sampled profile."""
    dx = np.diff(p.xi)
    if not (np.all(dx > 0) or np.all(dx < 0)):
        raise ProfileError("xi is not monotone along the profile")
    dg, df = profile_derivatives(p)
    r42, r43 = ode_residual_arrays(p.xi, p.g, p.f, dg, df)
    h = float((p.s[-1] - p.s[0]) / (len(p) - 1))
    return [residual_report("eq42", r42, h), residual_report("eq43", r43, h)]


# ---------------------------------------------------------------- quadrature oracles

def xi_by_quadrature(z, C: float, z_ref: float, E2: float = 1.0) -> np.ndarray:
    """xi(z) from xi(z_ref) by integrating d(log xi) = dz (1/z - 3/4/(z+C/2) - 3/8/(z-C/4))."""
    C = _check_C(C)
    base = np.log(xi_of_z(z_ref, C, E2))
    out = [np.exp(base + quad(lambda s: dlogxi_dz(s, C), z_ref, zz, epsabs=1e-14, epsrel=1e-13)[0])
           for zz in np.atleast_1d(z)]
    return np.array(out)


def partial_fraction_check(C: float, z0: float, z1: float, denominator: str = "g3") -> float:
    """Compare the g-form of -dxi/xi with its partial-fraction z-form over [z0, z1].

    The g-form is -3 (C + g^3)^2 / (g (C + 4 g^3)(C - 2 g^3)) dg integrated
    along g = -z^(1/3); ``denominator="g2"`` uses (C - 2 g^2) instead, as a
    negative control. Returns |difference of the two integrals|.
    """
    C = _check_C(C)

    def g_form(g):
        last = C - 2 * g**3 if denominator == "g3" else C - 2 * g**2
        return -3.0 * (C + g**3) ** 2 / (g * (C + 4 * g**3) * last)

    def z_form(z):
        return -1.0 / z + 0.75 / (z + C / 2) + 0.375 / (z - C / 4)

    ig = quad(g_form, -np.cbrt(z0), -np.cbrt(z1), epsabs=1e-14, epsrel=1e-13)[0]
    iz = quad(z_form, z0, z1, epsabs=1e-14, epsrel=1e-13)[0]
    return abs(ig - iz)


# ---------------------------------------------------------------- the (47) identity

CHECK47_VARIANTS = ("printed", "dimensional", "derived")


def check47(z, C: float, variant: str = "derived"):
    """Both sides of the reduced second ODE, with g^3 = -z, and the target -9 z^2 (C - 4z).

    The factor xi^(8/3)/g^2 is replaced using the closed form of xi
    (E^2 = 1): xi^(8/3)/g^2 = z^2 / ((z + C/2)^2 (z - C/4)).

    variant
        ``"printed"``: fourth term (C + 4g^3)(C - 2g), right side linear in
        (C + 4g^3); ``"dimensional"``: same with (C - 2g^3);
        ``"derived"``: fourth term (C + 4g^3)^2 (C - 2g^3) and right side
        quadratic in (C + 4g^3), which is what the first ODE implies.

    Returns ``(lhs, rhs, target)``. The right side has a removable
    singularity at z = -C/2, handled by cancelling (C - 2g^3)^2 = (C + 2z)^2
    against (z + C/2)^2 analytically.
    """
    if variant not in CHECK47_VARIANTS:
        raise KeyError(f"unknown variant {variant!r}")
    z = np.asarray(z, float)
    C = float(C)
    g3 = -z
    g = -np.cbrt(z)
    a, b, c = C + 4 * g3, C - 2 * g3, C + g3
    common = 6 * a * b * g3 - 6 * g3 * c**2 - b * c**2 + 2 * c * a * b
    if variant == "printed":
        fourth = a * (C - 2 * g)
    elif variant == "dimensional":
        fourth = a * b
    else:
        fourth = a**2 * b
    lhs = common - fourth
    # (9/16) z^2/((z+C/2)^2 (z-C/4)) * (C+2z)^2 = (9/4) z^2/(z-C/4)
    pref = 2.25 * z**2 / (z - C / 4)
    rhs = pref * (a**2 if variant == "derived" else a)
    target = -9.0 * z**2 * (C - 4 * z)
    return lhs, rhs, target


# ---------------------------------------------------------------- degree-27 polynomial

POLY48_VARIANTS = ("consistent", "printed")


def _rational(x: float) -> sp.Rational:
    return sp.Rational(float(x))  # exact binary value of the float


@lru_cache(maxsize=256)
def _poly48(xi: float, C: float, variant: str) -> sp.Poly:
    g = sp.Symbol("g", real=True)
    X, Cq = _rational(xi), _rational(C)
    lhs = X**8 * (g**3 + Cq / 4) ** 3 * (g**3 - Cq / 2) ** 6
    rhs = g**24 if variant == "printed" else -(g**24)
    return sp.Poly(sp.expand(lhs - rhs), g, domain="QQ")


def poly48_coefficients(xi: float, C: float, variant: str = "consistent") -> list:
    """Exact rational coefficients (highest degree first) of the expanded degree-27 polynomial."""
    if variant not in POLY48_VARIANTS:
        raise KeyError(f"unknown variant {variant!r}")
    return _poly48(float(xi), float(C), variant).all_coeffs()


def poly48_roots(xi: float, C: float, variant: str = "consistent", tol: float = 1e-12) -> list[float]:
    """All real roots g of the degree-27 polynomial, ascending.

    ``variant="consistent"`` is xi^8 (g^3 + C/4)^3 (g^3 - C/2)^6 = -g^24,
    which is what the closed form of xi implies; ``"printed"`` has +g^24
    on the right and admits no root with g^3 = -z on the profile.

    The polynomial is expanded in exact rational arithmetic and its real
    roots isolated (sympy), each isolating interval refined below ``tol``.
    """
    if not xi > 0:
        raise DomainError("xi must be positive")
    if variant not in POLY48_VARIANTS:
        raise KeyError(f"unknown variant {variant!r}")
    poly = _poly48(float(xi), float(C), variant)
    eps = _rational(tol / 4)
    roots = []
    for (a, b), _mult in poly.intervals(eps=eps):
        roots.append(float((a + b) / 2))
    return sorted(roots)


def poly48_roots_numeric(xi: float, C: float, variant: str = "consistent") -> np.ndarray:
    """Real roots via the degree-9 polynomial in u = g^3 (numpy companion matrix);
    a floating-point cross-check of :func:`poly48_roots`."""
    sgn = 1.0 if variant == "printed" else -1.0
    P = np.polynomial.Polynomial
    p = xi**8 * P([C / 4, 1.0]) ** 3 * P([-C / 2, 1.0]) ** 6 - sgn * P([0.0] * 8 + [1.0])
    u = p.roots()
    u = np.real(u[np.abs(u.imag) <= 1e-7 * np.maximum(1.0, np.abs(u))])
    return np.sort(np.cbrt(u))


def poly48_branch(xi: float, C: float, g_profile: float, variant: str = "consistent") -> dict:
    """Match a profile value of g against the real roots at its xi."""
    roots = poly48_roots(xi, C, variant)
    if not roots:
        return {"xi": xi, "g": g_profile, "roots": [], "root": None, "error": float("inf"), "branch": None}
    r = np.array(roots)
    i = int(np.argmin(np.abs(np.abs(r) - abs(g_profile))))
    return {
        "xi": float(xi),
        "g": float(g_profile),
        "roots": roots,
        "root": float(r[i]),
        "error": float(abs(abs(r[i]) - abs(g_profile))),
        "branch": "same sign" if np.sign(r[i]) == np.sign(g_profile) else "opposite sign",
    }


# ---------------------------------------------------------------- reconstruction

def similarity_variable(tau, mu):
    """xi = tau mu^(-3/4)."""
    return np.asarray(tau, float) * np.asarray(mu, float) ** -0.75


def reconstruct_Rtilde(p: SelfSimilarProfile, chart: GridDomain, check: bool = True) -> LightconeTriple:
    """Build R = tau^(1/3) f(xi), zeta = tau^(-1/3) g(xi) on a (tau, mu) chart;
    kappa is integrated from them (corner value 0).

    Raises
    ------
    DomainError
        If tau <= 0, mu <= 0, or xi leaves the profile's range.
    """
    tau, mu = chart.mesh()
    if np.any(tau <= 0) or np.any(mu <= 0):
        raise DomainError("the reconstruction needs tau > 0 and mu > 0")
    xi = similarity_variable(tau, mu)
    z = p.z_of_xi(xi)
    R = ScalarField(chart, np.cbrt(tau) * profile_f(z, p.C))
    zeta = ScalarField(chart, profile_g(z) / np.cbrt(tau))
    kappa = compute_kappa(R, zeta, 1.0, check=check)
    return LightconeTriple(chart, R, zeta, kappa, 1.0)


def eq39_values(triple: LightconeTriple, C: float) -> np.ndarray:
    """(2 tau zeta + R^2) zeta^2 - C on the triple's nodes."""
    tau = triple.domain.mesh()[0]
    R, zeta = triple.R.values, triple.zeta.values
    return (2.0 * tau * zeta + R**2) * zeta**2 - C
