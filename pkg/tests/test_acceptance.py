"""Acceptance criteria A1-A10, each at its stated tolerance.

Every test records a one-line verdict (see ``conftest.record``), printed in
the pytest summary under "acceptance criteria".
"""

import numpy as np

from aximinimal.catalog import elliptic_rho_printed, family_spec, get_solution, hyperboloid_physical
from aximinimal.cli import main
from aximinimal.grid import ScalarField, convergence_order, make_grid
from aximinimal.pipeline import run_pipeline, scaling_fit, verification_tolerance
from aximinimal.residuals import (
    lightcone_residual_arrays,
    level_set_check,
    residual_lightcone,
    residual_physical,
)
from aximinimal.selfsim import (
    check47,
    eq39_values,
    poly48_branch,
    reconstruct_Rtilde,
    residual_odes,
    solve_profile,
)
from aximinimal.transform import (
    ConjugatePair,
    LightconeTriple,
    PhysicalPair,
    bianchi_transform,
    compose_conjugate,
    compute_v,
    involution_check,
    lightcone_chart,
    product_identity,
)

from conftest import record, sampled

FAMILIES = ["hyperboloid", "epsilon_family", "tau_sqrt_mu", "elliptic"]
PARAMS = {"epsilon_family": {"eps": 0.3}, "tau_sqrt_mu": {"beta": 1.0}}


def _refinement(family, levels=(65, 129, 257)):
    sol = get_solution(family, PARAMS.get(family))
    (t0, t1), (m0, m1) = family_spec(family).default_chart
    per = {}
    for n in levels:
        dom = make_grid(((t0, t1), (m0, m1)), (n, n), singular_lines=sol.singular_lines)
        tr = LightconeTriple.from_solution(sol, dom)
        for r in residual_lightcone(tr, interior=max(2, (n - 1) // 8)):
            per.setdefault(r.label, []).append(r)
    return per


def _fixed_bounds_transforms(family, levels=(33, 65, 129)):
    bounds, runs = None, []
    for n in levels:
        tr = sampled(family, (n, n))
        out, diag = bianchi_transform(tr, target_bounds=bounds)
        bounds = bounds or tuple(zip(out.domain.lower, out.domain.upper))
        runs.append((tr, out, diag))
    return runs


def test_A1_catalog_residuals():
    rng = np.random.default_rng(1)
    worst, orders = {}, {}
    for fam in FAMILIES:
        sol = get_solution(fam, PARAMS.get(fam))
        (t0, t1), (m0, m1) = family_spec(fam).default_chart
        t, m = rng.uniform(t0, t1, 1000), rng.uniform(m0, m1, 1000)
        res = lightcone_residual_arrays(sol.evaluate(t, m), sol.eta)
        worst[fam] = max(np.abs(v).max() for v in res.values())
        per = _refinement(fam)
        for label in ("eq5_R", "eq6_zeta"):
            reps = per[label]
            # a residual at round-off on every level has no meaningful order
            orders[(fam, label)] = np.inf if reps[-1].max < 1e-11 else convergence_order(reps)
    ok = max(worst.values()) <= 1e-9 and min(orders.values()) >= 1.8
    record("A1", ok, f"analytic max {max(worst.values()):.2e} (<= 1e-9); "
                     f"sampled min order {min(orders.values()):.2f} (>= 1.8)")
    assert ok


def test_A2_transform_closed_forms():
    runs = _fixed_bounds_transforms("elliptic")
    devs = []
    for _, out, _ in runs:
        Z, K = out.domain.mesh()
        devs.append(np.abs(out.R.values - elliptic_rho_printed(Z, K)).max())
    h = [out.domain.h for _, out, _ in runs]
    order = float(np.polyfit(np.log(h), np.log(devs), 1)[0])
    hyp, _ = bianchi_transform(sampled("hyperboloid", (129, 129)))
    Z, K = hyp.domain.mesh()
    closure = np.abs(np.abs(hyp.R.values) - np.sqrt(2) * np.abs(K / Z)).max()
    ok = devs[-1] <= 5e-4 and order >= 1.8 and closure <= 1e-6
    record("A2", ok, f"elliptic vs zeta^(1/2) F(kappa zeta^(-3/2)): {devs[-1]:.3e} at 129 (<= 5e-4), "
                     f"order {order:.2f} (>= 1.8); hyperboloid closure {closure:.2e} (<= 1e-6)")
    assert ok


def test_A3_product_identity():
    tr = sampled("hyperboloid", (129, 129))
    out, diag = bianchi_transform(tr)
    hyp = product_identity(tr, out, diag.inverse).max
    reps = [product_identity(t, o, d.inverse) for t, o, d in _fixed_bounds_transforms("elliptic")]
    order = convergence_order(reps)
    ok = hyp <= 1e-6 and reps[-1].max <= 5e-4 and order >= 1.8
    record("A3", ok, f"hyperboloid {hyp:.2e} (<= 1e-6); elliptic {reps[-1].max:.2e} at 129 (<= 5e-4), "
                     f"order {order:.2f} (>= 1.8)")
    assert ok


def test_A4_involution():
    hyp = involution_check(sampled("hyperboloid", (129, 129))).max
    ell = involution_check(sampled("elliptic", (129, 129))).max
    ok = hyp <= 5e-5 and ell <= 5e-5
    record("A4", ok, f"hyperboloid {hyp:.2e}, elliptic {ell:.2e} at 129 (<= 5e-5)")
    assert ok


def test_A5_level_sets():
    worst = 0.0
    for eps in (0.0, 0.3, 1.0):
        sol = get_solution("epsilon_family", {"eps": eps})
        dom = make_grid(family_spec("epsilon_family").default_chart, (65, 65))
        worst = max(worst, level_set_check(sol, "eq26", {"eps": eps}, dom).max)
    for beta in (1.0, 2.0):
        sol = get_solution("tau_sqrt_mu", {"beta": beta})
        dom = make_grid(family_spec("tau_sqrt_mu").default_chart, (65, 65))
        worst = max(worst, level_set_check(sol, "eq33", {"beta": beta}, dom).max)
    prof = solve_profile(-1.0, (0.6, 5.0), 400)
    tr = reconstruct_Rtilde(prof, make_grid(((1.0, 2.0), (0.5, 1.2)), (129, 129)))
    e39 = np.abs(eq39_values(tr, -1.0)).max()
    ok = worst <= 1e-10 and e39 <= 5e-4
    record("A5", ok, f"eq26/eq33 max {worst:.2e} (<= 1e-10); eq39 on reconstruction {e39:.2e} (<= 5e-4)")
    assert ok


def test_A6_hyperboloid_sign_repair():
    worst = 0.0
    printed = np.inf
    for phi in ((0.1, 0.8), (-0.8, -0.1)):
        dom = make_grid(((1.0, 2.0), phi), (33, 33), names=("t", "phi"))
        worst = max(worst, max(r.max for r in residual_physical("hyperboloid", domain=dom)))
        bad = {r.label: r.max for r in residual_physical("hyperboloid", domain=dom, variant="printed")}
        printed = min(printed, max(bad["eq3_orth"], bad["eq3_norm"]))
    t = np.linspace(-2, 2, 101)
    t = t[t != 0]
    T, P = np.meshgrid(t, np.linspace(-1.5, 1.5, 61), indexing="ij")
    r, z = hyperboloid_physical(T, P)
    level = np.abs(T**2 + r**2 - z**2).max()
    ok = worst <= 1e-8 and level <= 1e-12 and printed >= 0.1
    record("A6", ok, f"repaired residuals {worst:.2e} (<= 1e-8), level set {level:.2e} (<= 1e-12); "
                     f"printed constraint {printed:.2f} (>= 0.1)")
    assert ok


def test_A7_self_similar():
    C = -1.0
    p400 = solve_profile(C, (0.6, 5.0), 400)
    p800 = solve_profile(C, (0.6, 5.0), 800)
    constraint = np.abs(p400.constraint_defect()).max()
    r400 = [r.max for r in residual_odes(p400)]
    r800 = [r.max for r in residual_odes(p800)]
    ratio = min(a / b for a, b in zip(r400, r800))
    zs = np.linspace(0.6, 5.0, 50)
    lhs, rhs, target = check47(zs, C, "derived")
    e47 = max(np.abs(lhs - target).max(), np.abs(rhs - target).max())
    idx = np.linspace(0, len(p400) - 1, 20).astype(int)
    branches = [poly48_branch(float(p400.xi[i]), C, float(p400.g[i])) for i in idx]
    e48 = max(b["error"] for b in branches)
    kinds = sorted({b["branch"] for b in branches})
    ok = constraint <= 1e-12 and max(r400) <= 1e-6 and ratio >= 8 and e47 <= 1e-9 and e48 <= 1e-8
    record("A7", ok, f"constraint {constraint:.1e}; ODE {max(r400):.1e} (<= 1e-6), 400->800 x{ratio:.1f} (>= 8); "
                     f"eq47 {e47:.1e} (<= 1e-9); eq48 |root| vs |g| {e48:.1e} (<= 1e-8), branch {kinds}")
    assert ok


def test_A8_conjugate_composition():
    dom = make_grid(((0.0, 1.0), (0.0, 1.0)), (17, 17), names=("t", "phi"))
    t, p = dom.mesh()
    one = ScalarField(dom, np.ones(dom.counts))
    s = ScalarField(dom, t + p)
    _, reps = compose_conjugate(one, ConjugatePair(s, s, one),
                                ConjugatePair(ScalarField(dom, t + 2 * p), ScalarField(dom, 2 * t + p), one))
    linear = max(r.max for r in reps)
    per = {}
    for n in (33, 65, 129):
        d = make_grid(((1.0, 2.0), (0.2, 0.8)), (n, n), names=("t", "phi"))
        T, P = d.mesh()
        r, z = hyperboloid_physical(T, P)
        r, z = ScalarField(d, r), ScalarField(d, z)
        pair = PhysicalPair(d, r, z, compute_v(r, z))
        tau, mu, _ = lightcone_chart(pair)
        _, reps = compose_conjugate(r, ConjugatePair(pair.v, z, r), ConjugatePair(mu, tau, r))
        for rep in reps:
            per.setdefault(rep.label, []).append(rep)
    order = min(convergence_order(v) for v in per.values())
    ok = linear <= 1e-10 and order >= 1.8
    record("A8", ok, f"linear case {linear:.1e} (<= 1e-10); hyperboloid (v,z)/(mu,tau) order {order:.2f} (>= 1.8)")
    assert ok


def test_A9_generation_is_non_trivial():
    tr = sampled("tau_sqrt_mu", (65, 65))
    res = run_pipeline(tr, ["T", "S:2,1", "T"])
    tol = verification_tolerance(res.triple)
    fit = scaling_fit(res.triple, tr.solution)
    beta = fit["alpha"] ** 2 * fit["gamma"] ** 1.5
    ok = res.passed and fit["max_abs_residual"] > 100 * tol
    record("A9", ok, f"eq5-valid {res.passed}; best pure-scaling fit residual {fit['max_abs_residual']:.2e} "
                     f"vs 100 x tol {100 * tol:.2e} (fit alpha={fit['alpha']:.6g}, gamma={fit['gamma']:.6g}, "
                     f"beta={beta:.6g})")
    assert ok


def test_A10_determinism(tmp_path):
    runs = [
        (["transform", "--family", "elliptic", "--check", "eq37_repaired", "--check", "product"],
         ["report.json", "rho.json"]),
        (["scale", "--family", "tau_sqrt_mu", "--alpha", "2", "--format", "csv"], ["report.json", "R_scaled.csv"]),
        (["export", "--family", "epsilon_family", "--eps", "0.3"], ["report.json", "mesh.obj"]),
        (["selfsim", "--roots", "5"], ["report.json", "profile.csv"]),
    ]
    same = True
    for k, (argv, files) in enumerate(runs):
        a, b = tmp_path / f"{k}a", tmp_path / f"{k}b"
        main(["--out", str(a), *argv])
        main(["--out", str(b), *argv])
        same &= all((a / f).read_bytes() == (b / f).read_bytes() for f in files)
    record("A10", same, f"{len(runs)} commands run twice, reports and artifacts byte-identical: {same}")
    assert same
