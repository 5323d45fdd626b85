"""
Backward Euler for the heat equation on the unit square with a majorant on every slab.

    u_t - div(grad u) = f   in (0,1)^2 x (0,1)
                    u = 0   on the boundary
    u = x(1-x)y(1-y)(t^2+t+1)

The flux of each slab is optimised and handed to the next one, so the
accumulated majorant is an upper bound of the energy error at every time.
Halving h divides both the error and the bound by about four.
"""
import numpy as np

from parabolic_majorant import FESpace, MajorantParams, TimeGrid, example
from parabolic_majorant.majorant import run_timestepping_with_majorant

spec = example("ex1")
grid = TimeGrid.uniform(spec.T, 40)
params = MajorantParams()

print(f"{'EL':>6} {'[e]':>11} {'M':>11} {'I_eff':>7}")
prev = None
for n in (4, 8, 16):
    space = FESpace(spec.domain.build_mesh(n), 1)
    res = run_timestepping_with_majorant(spec, space, grid, params)
    s, _ = res.i_eff
    print(f"{space.mesh.n_cells:6d} {res.error:11.4e} {res.total:11.4e} {s:7.3f}")
    if prev is not None:
        print(f"       rate of [e]: {np.log2(prev / res.error):.2f}")
    prev = res.error

# the bound holds slab by slab, not only at the final time
acc_e = np.array(res.accumulated_error)
acc_m = np.array(res.accumulated_majorant)
print("bound holds on every slab:", bool(np.all(acc_e <= acc_m)))
