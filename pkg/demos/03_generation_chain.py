"""Transform, scale, transform: does the chain generate something new?

Starting from R = tau sqrt(mu), the chain [T, S(2,1), T] yields a valid
solution, but a least-squares search over the scaling group finds it is
itself a scaling of the input: the transform conjugates scalings into
scalings. Stopping after [T, S] does give a genuinely different field.
"""

from aximinimal import LightconeTriple, ScalingParams, get_solution, make_grid, run_pipeline, scaling_fit
from aximinimal.pipeline import verification_tolerance
from aximinimal.transform import bianchi_transform, scale

sol = get_solution("tau_sqrt_mu")
tr = LightconeTriple.from_solution(sol, make_grid(((1, 1.5), (2, 3)), (65, 65), sol.singular_lines))

res = run_pipeline(tr, ["T", "S:2,1", "T"])
for step in res.steps:
    print(step["op"], step["chart"]["lower"], step["chart"]["upper"])
print("final residuals pass:", res.passed, f"(tol {verification_tolerance(res.triple):.2e})")
fit = scaling_fit(res.triple, sol)
beta = fit["alpha"] ** 2 * fit["gamma"] ** 1.5
print(f"T S T: best scaling alpha={fit['alpha']:.6f} gamma={fit['gamma']:.6f} (beta={beta:.6f}), "
      f"relative residual {fit['max_rel_residual']:.1e}")

once, _ = bianchi_transform(tr)
fit = scaling_fit(scale(once, ScalingParams(2, 1)), sol)
print(f"T S:   best scaling relative residual {fit['max_rel_residual']:.3f}  (not a scaling)")
