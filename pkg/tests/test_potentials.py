import numpy as np
import pytest

from aximinimal.catalog import get_solution, hyperboloid_physical
from aximinimal.errors import CompatibilityError
from aximinimal.grid import ScalarField, differentiate, make_grid
from aximinimal.transform import (
    PhysicalPair,
    compute_kappa,
    compute_v,
    compute_zeta,
    lightcone_chart,
)
from aximinimal.transform.potentials import integrate_gradient, triple_from_R

from conftest import sampled


def gauge_free(a, b):
    """max |a - b| after removing the constant offset at the corner."""
    d = a - b
    return np.abs(d - d[0, 0]).max()


def test_integrate_gradient_recovers_smooth_potential():
    dom = make_grid(((0.0, 1.0), (0.0, 2.0)), (65, 65))
    t, m = dom.mesh()
    f = np.sin(t) * np.exp(m / 2)
    g1 = ScalarField(dom, np.cos(t) * np.exp(m / 2))
    g2 = ScalarField(dom, 0.5 * np.sin(t) * np.exp(m / 2))
    out = integrate_gradient(g1, g2)
    assert out.values[0, 0] == 0.0
    assert gauge_free(out.values, f) < 1e-8


def test_zeta_of_hyperboloid_matches_closed_form():
    errs = []
    for n in (33, 65):
        tr = sampled("hyperboloid", (n, n))
        zeta = compute_zeta(tr.R)
        assert zeta.values[0, 0] == 0.0
        errs.append(gauge_free(zeta.values, tr.zeta.values))
    assert errs[1] < 1e-5
    assert np.log2(errs[0] / errs[1]) >= 1.8


def test_zeta_of_constant_is_zero():
    dom = make_grid(((1.0, 2.0), (0.5, 1.5)), (17, 17))
    zeta = compute_zeta(ScalarField(dom, np.full(dom.counts, 2.0)))
    assert np.abs(zeta.values).max() == 0.0


def test_zeta_of_noise_rejected(rng):
    dom = make_grid(((1.0, 2.0), (0.5, 1.5)), (33, 33))
    R = ScalarField(dom, 1.0 + 0.1 * rng.random(dom.counts))
    with pytest.raises(CompatibilityError):
        compute_zeta(R)


@pytest.mark.parametrize("family", ["hyperboloid", "elliptic"])
def test_kappa_matches_closed_form(family):
    errs = []
    for n in (33, 65, 129):
        tr = sampled(family, (n, n))
        kappa = compute_kappa(tr.R, tr.zeta)
        errs.append(gauge_free(kappa.values, tr.kappa.values) / max(1.0, np.abs(tr.kappa.values).max()))
    assert errs[-1] < 1e-4
    assert np.log2(errs[0] / errs[1]) >= 1.8 and np.log2(errs[1] / errs[2]) >= 1.8


def test_kappa_of_constant_zeta_is_constant():
    dom = make_grid(((1.0, 2.0), (0.5, 1.5)), (17, 17))
    R = ScalarField(dom, np.full(dom.counts, 1.3))
    kappa = compute_kappa(R, ScalarField(dom, np.full(dom.counts, 0.4)), corner=2.0)
    assert np.allclose(kappa.values, 2.0, atol=1e-14)


def test_triple_from_R_with_eta():
    sol = get_solution("hyperboloid", eta=1.5)
    dom = make_grid(((1.0, 2.0), (0.5, 1.5)), (65, 65))
    t, m = dom.mesh()
    R = ScalarField(dom, sol(t, m)[0])
    tr = triple_from_R(R, eta=1.5)
    assert gauge_free(tr.zeta.values, sol(t, m)[1]) < 1e-4
    kappa = sol(t, m)[2]
    assert gauge_free(tr.kappa.values, kappa) < 1e-4 * np.abs(kappa).max()


def test_v_for_trivial_pair():
    dom = make_grid(((1.0, 2.0), (0.0, 1.0)), (17, 17), names=("t", "phi"))
    t, phi = dom.mesh()
    v = compute_v(ScalarField(dom, np.ones(dom.counts)), ScalarField(dom, t))
    assert gauge_free(v.values, phi) < 1e-13


def test_v_inconsistent_pair_rejected():
    dom = make_grid(((1.0, 2.0), (0.0, 1.0)), (33, 33), names=("t", "phi"))
    t, phi = dom.mesh()
    with pytest.raises(CompatibilityError):
        compute_v(ScalarField(dom, 1 + t * phi), ScalarField(dom, t * phi**2))


def hyperboloid_pair(n=65):
    dom = make_grid(((1.0, 2.0), (0.2, 0.8)), (n, n), names=("t", "phi"))
    t, phi = dom.mesh()
    r, z = hyperboloid_physical(t, phi)
    r, z = ScalarField(dom, r), ScalarField(dom, z)
    return PhysicalPair(dom, r, z, compute_v(r, z))


def test_v_of_hyperboloid_matches_closed_form():
    pair = hyperboloid_pair()
    t, phi = pair.domain.mesh()
    S = np.sqrt(1 + 8 * phi**2 / t**4)
    v_exact = phi / np.sqrt((S + 1) / 2)
    assert gauge_free(pair.v.values, v_exact) < 1e-7


def test_lightcone_chart_of_hyperboloid():
    errs = []
    for n in (33, 65, 129):
        pair = hyperboloid_pair(n)
        tau, mu, reps = lightcone_chart(pair)
        errs.append(max(r.max for r in reps))
        # R(tau(t, phi), mu(t, phi)) = r(t, phi); v carries a corner gauge, so fix mu by it
        t, phi = pair.domain.mesh()
        S = np.sqrt(1 + 8 * phi**2 / t**4)
        mu_exact = (phi + phi / np.sqrt((S + 1) / 2)) / 2
        mu_v = mu.values - mu.values[0, 0] + mu_exact[0, 0]
        R = get_solution("hyperboloid")(tau.values, mu_v)[0]
        assert np.abs(R - pair.r.values).max() < 1e-5
    assert np.log2(errs[0] / errs[1]) >= 1.8 and np.log2(errs[1] / errs[2]) >= 1.8


def test_lightcone_chart_trivial_case():
    dom = make_grid(((1.0, 2.0), (0.0, 1.0)), (17, 17), names=("t", "phi"))
    t, phi = dom.mesh()
    one = ScalarField(dom, np.ones(dom.counts))
    pair = PhysicalPair(dom, one, ScalarField(dom, t), ScalarField(dom, phi))
    tau, mu, reps = lightcone_chart(pair)
    assert np.allclose(tau.values, t, atol=1e-15)
    assert max(r.max for r in reps) < 1e-12


def test_lightcone_chart_rejects_inconsistent_pair():
    pair = hyperboloid_pair(33)
    bad = PhysicalPair(pair.domain, pair.r, pair.z, pair.v * 1.3)
    with pytest.raises(CompatibilityError):
        lightcone_chart(bad)


def test_zeta_derivatives_reproduce_equation():
    tr = sampled("elliptic", (65, 65))
    zeta = compute_zeta(tr.R)
    zt = differentiate(zeta, 1).values
    Rt = differentiate(tr.R, 1).values
    Rm = differentiate(tr.R, 2).values
    R = tr.R.values
    assert np.abs(zt - 0.5 * (Rt**2 + R**2 * Rm**2))[2:-2, 2:-2].max() < 1e-6
