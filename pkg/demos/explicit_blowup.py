"""
The majorant as a blow-up detector for forward Euler.

Running the explicit scheme at four times its stable step makes the
accumulated majorant explode within a few steps, long before the iterate
overflows. The implicit run on the same mesh and step stays put.
"""
from parabolic_majorant import FESpace, MajorantParams, TimeGrid, example
from parabolic_majorant.majorant import run_timestepping_with_majorant
from parabolic_majorant.parabolic import stable_time_step

spec = example("ex1")
space = FESpace(spec.domain.build_mesh(8), 1)
tau = 4 * stable_time_step(spec, space)
grid = TimeGrid.uniform(8 * tau, 8)
print(f"tau = {tau:.4g} (4x the stable step)")

runs = {s: run_timestepping_with_majorant(spec, space, grid, MajorantParams(), scheme=s)
        for s in ("implicit", "explicit")}
print(f"{'k':>3} {'M implicit':>12} {'M explicit':>12}")
for k in range(1, 8, 2):
    im = runs["implicit"].accumulated_majorant[k]
    ex = runs["explicit"].accumulated_majorant[k]
    print(f"{k + 1:3d} {im:12.4e} {ex:12.4e}")
