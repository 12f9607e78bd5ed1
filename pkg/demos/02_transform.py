"""The involutive transform on two families.

The hyperboloid maps to itself (up to the sign of R). The elliptic family
maps to a new solution whose closed form is given parametrically through
F; the frequently quoted shortcut rho = zeta^(1/2) F(kappa zeta^(-3/2)) is
compared as well and does not match.
"""

import numpy as np

from aximinimal import LightconeTriple, get_solution, make_grid
from aximinimal.catalog import elliptic_rho, elliptic_rho_printed
from aximinimal.transform import bianchi_transform, involution_check, product_identity

sol = get_solution("hyperboloid")
tr = LightconeTriple.from_solution(sol, make_grid(((1, 2), (0.5, 1.5)), (129, 129), sol.singular_lines))
out, diag = bianchi_transform(tr)
Z, K = out.domain.mesh()
print("hyperboloid")
print("  output chart (zeta, kappa):", out.domain.lower, out.domain.upper)
print(f"  min |L| = {diag.min_abs_L:.3e}; Newton: {diag.inverse.stats()}")
print(f"  | |rho| - sqrt(2) kappa/zeta |  = {np.abs(np.abs(out.R.values) - np.sqrt(2) * np.abs(K / Z)).max():.2e}")
print(f"  L_out * L_in - 1               = {product_identity(tr, out, diag.inverse).max:.2e}")
print(f"  transform twice vs input       = {involution_check(tr).max:.2e}")

sol = get_solution("elliptic")
tr = LightconeTriple.from_solution(sol, make_grid(((0.4, 0.8), (1, 2)), (65, 65), sol.singular_lines))
out, diag = bianchi_transform(tr)
Z, K = out.domain.mesh()
print("elliptic")
print(f"  vs parametric closed form      = {np.abs(out.R.values - elliptic_rho(Z, K)).max():.2e}")
print(f"  vs zeta^(1/2) F(kappa/zeta^1.5) = {np.abs(out.R.values - elliptic_rho_printed(Z, K)).max():.2e}")
print(f"  L_out * L_in - 1               = {product_identity(tr, out, diag.inverse).max:.2e}")
