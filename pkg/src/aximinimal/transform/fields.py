"""Solution containers for the two gauges and the chart-change bookkeeping."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from ..errors import DomainError
from ..grid import GridDomain, ScalarField


def _same_domain(domain: GridDomain, *fs: ScalarField) -> None:
    for f in fs:
        if f.domain != domain:
            raise DomainError("all fields must share the triple's domain")


@dataclass(frozen=True, eq=False)
class LightconeTriple:
    """R, zeta, kappa sampled on a (tau, mu) chart, for a constant eta.

    ``solution`` optionally keeps the closed form the samples came from, so
    checks can compare against exact values.
    """

    domain: GridDomain
    R: ScalarField
    zeta: ScalarField
    kappa: ScalarField
    eta: float = 1.0
    solution: Any = field(default=None, repr=False)

    def __post_init__(self):
        _same_domain(self.domain, self.R, self.zeta, self.kappa)
        if not self.eta > 0:
            raise DomainError("eta must be positive")
        if not np.all(self.R.values > 0):
            raise DomainError("R must be positive on the chart")

    @classmethod
    def from_solution(cls, solution, domain: GridDomain) -> "LightconeTriple":
        """Sample a closed-form solution on every node of ``domain``."""
        t, m = domain.mesh()
        R, zeta, kappa = solution(t, m)
        eta = getattr(solution, "eta", 1.0)
        return cls(
            domain,
            ScalarField(domain, R),
            ScalarField(domain, zeta),
            ScalarField(domain, kappa),
            eta,
            solution,
        )


@dataclass(frozen=True, eq=False)
class PhysicalPair:
    """r, z and the conjugate potential v on a (t, phi) chart, constant E."""

    domain: GridDomain
    r: ScalarField
    z: ScalarField
    v: ScalarField
    E: float = 1.0
    chart: Any = field(default=None, repr=False)

    def __post_init__(self):
        _same_domain(self.domain, self.r, self.z, self.v)
        if not self.E > 0:
            raise DomainError("E must be positive")


@dataclass(frozen=True, eq=False)
class ConjugatePair:
    """Fields with first' = second-dot and first-dot = r^2 second'."""

    first: ScalarField
    second: ScalarField
    r: ScalarField

    def __post_init__(self):
        _same_domain(self.first.domain, self.second, self.r)

    @property
    def domain(self) -> GridDomain:
        return self.first.domain


@dataclass(frozen=True)
class ScalingParams:
    """R -> alpha R(alpha gamma tau, gamma mu)."""

    alpha: float = 1.0
    gamma: float = 1.0

    def __post_init__(self):
        if self.alpha == 0 or self.gamma == 0:
            raise DomainError("alpha and gamma must be nonzero")
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "gamma", float(self.gamma))

    @property
    def beta(self) -> float:
        """Parameter of the equivalent tau_sqrt_mu member, alpha^2 gamma^(3/2)."""
        return self.alpha**2 * abs(self.gamma) ** 1.5

    def then(self, other: "ScalingParams") -> "ScalingParams":
        return ScalingParams(self.alpha * other.alpha, self.gamma * other.gamma)


@dataclass(frozen=True, eq=False)
class TransformDiagnostics:
    """Density L = (R_t^2 - R^2 R_m^2 / eta^2) / 2 and Jacobian delta = eta L^2."""

    L: ScalarField
    delta: ScalarField
    min_abs_L: float
    threshold: float
    inverse: Any = field(repr=False)

    def to_dict(self) -> dict:
        return {
            "min_abs_L": self.min_abs_L,
            "threshold": self.threshold,
            "newton": self.inverse.stats(),
        }
