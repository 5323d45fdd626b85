"""
Space-time adaptivity for a decaying mode and the effect of sigma.

    sigma u_t - u_xx = 0,  u = 6 sin(pi x) exp(-pi^2 t / sigma)

Both runs mark with the flux indicator. A larger sigma weights the time
derivative more heavily in the equilibrium residual, which the P1 in time
approximation reduces more slowly, which is the likely reason the bound
is less sharp.
"""
from parabolic_majorant import example
from parabolic_majorant.adapt import adapt_spacetime_loop

for sigma in (1.0, 10.0):
    spec = example("ex8", sigma)
    recs = adapt_spacetime_loop(spec, spec.domain.build_spacetime_mesh(spec.T, 4), n_ref=8)
    print(f"sigma = {sigma:g}")
    for k, r in enumerate(recs):
        print(f"  ref {k}: EL {r.mesh.n_cells:4d}  [e] {r.error.combined:.4e}  "
              f"M {r.report.total:.4e}  I_eff {r.report.i_eff_sqrt:.3f}")
