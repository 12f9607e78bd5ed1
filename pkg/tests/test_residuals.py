import numpy as np
import pytest

from aximinimal.catalog import get_solution, hyperboloid_physical_derivs
from aximinimal.errors import DomainError
from aximinimal.grid import ScalarField, convergence_order, make_grid
from aximinimal.residuals import (
    level_set_check,
    level_set_values,
    physical_residual_arrays,
    residual_lightcone,
    residual_physical,
)
from aximinimal.transform import LightconeTriple, PhysicalPair

from conftest import chart_for, sampled

FAMILIES = [("hyperboloid", {}), ("epsilon_family", {"eps": 0.3}), ("tau_sqrt_mu", {"beta": 1.0}),
            ("elliptic", {})]
LABELS = {"eq4_zeta_t", "eq4_zeta_m", "eq5_R", "eq6_zeta", "eq9_kappa_m", "eq9_kappa_t"}


@pytest.mark.parametrize("family,params", FAMILIES)
def test_analytic_residuals_vanish(family, params):
    sol = get_solution(family, params)
    reps = residual_lightcone(sol, domain=chart_for(family))
    assert {r.label for r in reps} == LABELS
    assert max(r.max for r in reps) <= 1e-9


def test_triple_with_closed_form_can_use_exact_derivatives():
    tr = sampled("elliptic", (17, 17))
    reps = residual_lightcone(tr, analytic=True)
    assert max(r.max for r in reps) <= 1e-9


def test_linear_triple_has_zero_residual():
    dom = make_grid(((1.0, 2.0), (0.5, 1.5)), (17, 17))
    t, m = dom.mesh()
    tr = LightconeTriple(dom, ScalarField(dom, t), ScalarField(dom, t / 2), ScalarField(dom, m / 2))
    assert max(r.max for r in residual_lightcone(tr)) <= 1e-12


def test_noise_is_reported_not_raised(rng):
    dom = make_grid(((1.0, 2.0), (0.5, 1.5)), (33, 33))
    t, _ = dom.mesh()
    noisy = ScalarField(dom, 1.0 + 0.1 * rng.random(dom.counts))
    tr = LightconeTriple(dom, noisy, ScalarField(dom, t), ScalarField(dom, t))
    reps = residual_lightcone(tr)
    assert max(r.max for r in reps) > 1.0


def test_closed_form_needs_domain():
    with pytest.raises(DomainError):
        residual_lightcone(get_solution("hyperboloid"))


@pytest.mark.parametrize("family,params", FAMILIES)
def test_sampled_residuals_converge(family, params):
    base = chart_for(family, (33, 33))
    sol = get_solution(family, params)
    per = {}
    for k in range(3):
        dom = base.refined(2**k) if k else base
        tr = LightconeTriple.from_solution(sol, dom)
        for r in residual_lightcone(tr, interior=max(2, (dom.counts[0] - 1) // 8)):
            per.setdefault(r.label, []).append(r)
    for label in ("eq5_R", "eq6_zeta"):
        reps = per[label]
        if reps[-1].max < 1e-11:  # exact on this family (polynomial in the sampled variable)
            continue
        assert convergence_order(reps) >= 1.8, label


# -- orthonormal gauge -------------------------------------------------------------

def physical_chart(n=33, phi=(0.1, 0.8)):
    # r vanishes on phi = 0, where its phi-derivative is not defined
    return make_grid(((1.0, 2.0), phi), (n, n), names=("t", "phi"))


@pytest.mark.parametrize("phi", [(0.1, 0.8), (-0.8, -0.1)])
def test_hyperboloid_repaired_physical_residuals(phi):
    reps = residual_physical("hyperboloid", domain=physical_chart(phi=phi))
    assert max(r.max for r in reps) <= 1e-8


def test_hyperboloid_printed_fails_constraint():
    reps = {r.label: r for r in residual_physical("hyperboloid", domain=physical_chart(), variant="printed")}
    assert reps["eq3_norm"].max >= 0.1


def test_trivial_physical_pair_is_exact():
    dom = physical_chart(17)
    t, p = dom.mesh()
    one = ScalarField(dom, np.ones(dom.counts))
    pair = PhysicalPair(dom, one, ScalarField(dom, t), ScalarField(dom, p))
    reps = {r.label: r for r in residual_physical(pair)}
    for k in ("eq2_v_phi", "eq2_v_t", "eq3_orth", "eq3_norm"):
        assert reps[k].max <= 1e-13


def test_sampled_physical_residuals_converge():
    per = {}
    for n in (33, 65, 129):
        dom = make_grid(((1.0, 2.0), (0.2, 0.8)), (n, n), names=("t", "phi"))
        d = hyperboloid_physical_derivs(*dom.mesh())
        pair = PhysicalPair(dom, ScalarField(dom, d["r"]), ScalarField(dom, d["z"]), ScalarField(dom, d["v"]))
        for r in residual_physical(pair):
            per.setdefault(r.label, []).append(r)
    for label, reps in per.items():
        assert convergence_order(reps) >= 1.8, label


def test_second_order_equations_masked_where_not_implied():
    d = {k: np.zeros(3) for k in ("r", "r_t", "r_p", "r_tt", "r_pp", "z_t", "z_p", "z_tt", "z_pp",
                                  "v_t", "v_p")}
    d["r"] = np.ones(3)
    d["r_tt"] = np.ones(3)
    out = physical_residual_arrays(d)
    assert np.all(out["eq24_r"] == 0)


# -- level sets ----------------------------------------------------------------------

@pytest.mark.parametrize("eps", [0.0, 0.3, 1.0])
def test_epsilon_level_set(eps):
    rep = level_set_check(get_solution("epsilon_family", {"eps": eps}), "eq26", {"eps": eps},
                          domain=chart_for("epsilon_family"))
    assert rep.max <= 1e-10


def test_epsilon_level_set_constant_is_16_eps_over_3():
    sol = get_solution("epsilon_family", {"eps": 0.3})
    tau, mu = np.array([1.3]), np.array([0.9])
    R, zeta, _ = sol(tau, mu)
    t, z = tau + zeta / 2, tau - zeta / 2
    value = (t**2 + R**2 - z**2) * (t + z) ** 2
    assert value[0] == pytest.approx(1.6, abs=1e-12)
    assert level_set_values("eq26", tau, R, zeta, params={"eps": 0.3})[0] == pytest.approx(0, abs=1e-12)


@pytest.mark.parametrize("beta", [1.0, 2.0])
def test_tau_sqrt_mu_level_set(beta):
    rep = level_set_check(get_solution("tau_sqrt_mu", {"beta": beta}), "eq33", {"beta": beta},
                          domain=chart_for("tau_sqrt_mu"))
    assert rep.max <= 1e-10


def test_tau_sqrt_mu_polynomial_relation():
    rep = level_set_check(get_solution("tau_sqrt_mu"), "eq34", domain=chart_for("tau_sqrt_mu"))
    assert rep.max <= 1e-10


def test_level_set_on_sampled_triple():
    rep = level_set_check(sampled("epsilon_family", (17, 17), {"eps": 0.3}), "eq26", {"eps": 0.3})
    assert rep.max <= 1e-12


def test_unknown_level_set():
    with pytest.raises(KeyError):
        level_set_check(get_solution("hyperboloid"), "eq99", domain=chart_for("hyperboloid"))
