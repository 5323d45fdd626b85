"""
Problem data for

    sigma u_t - div(A grad u) + b . grad u + c u = f   in Q = Omega x (0, T),
    u = u_D on the lateral boundary,  u(., 0) = u_0.

Coefficients are :class:`~parabolic_majorant.expr.ExprFn` objects, so a
problem is plain data that can be written to and read from a config file.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, replace

import numpy as np

from .expr import ExprFn, as_expr
from .mesh import build_box_mesh, build_polygon_mesh, friedrichs_constant_box, retag_boundary


@dataclass(frozen=True)
class Domain:
    """Axis-aligned box (``extents``) or polygon (``polygon`` vertex loop)."""

    kind: str = "box"
    extents: tuple = ((0.0, 1.0), (0.0, 1.0))
    polygon: tuple | None = None

    def __post_init__(self):
        if self.kind not in ("box", "polygon"):
            raise ValueError(f"unknown domain kind {self.kind!r}")
        if self.kind == "polygon" and not self.polygon:
            raise ValueError("polygon domain needs vertices")

    @property
    def dim(self):
        return len(self.extents) if self.kind == "box" else 2

    def bounding_lengths(self):
        if self.kind == "box":
            return [hi - lo for lo, hi in self.extents]
        p = np.asarray(self.polygon, dtype=float)
        return list(p.max(axis=0) - p.min(axis=0))

    def friedrichs_constant(self):
        return friedrichs_constant_box(self.bounding_lengths())

    def build_mesh(self, divisions=None, h=None):
        """Spatial mesh: box with ``divisions`` per axis, or polygon with edge bound ``h``."""
        if self.kind == "box":
            if divisions is None:
                divisions = max(1, int(round(1.0 / h))) if h else 4
            return build_box_mesh(self.extents, divisions)
        if h is None:
            h = 2.0 / divisions if divisions else 0.25
        return build_polygon_mesh(self.polygon, h)

    def build_spacetime_mesh(self, T, divisions, time_divisions=None):
        """Box mesh of ``Omega x (0, T)`` with tags dirichlet / initial / final."""
        if self.kind != "box":
            raise ValueError("space-time meshes are built for box domains only")
        d = self.dim
        divs = list(np.broadcast_to(divisions, (d,)))
        divs.append(time_divisions if time_divisions is not None else divs[0])
        ext = list(self.extents) + [(0.0, float(T))]
        mesh = build_box_mesh(ext, divs)
        return retag_boundary(mesh, spacetime_tagger(T))


def spacetime_tagger(T, tol=1e-12):
    def tag(c):
        if abs(c[-1]) <= tol * max(1.0, T):
            return "initial"
        if abs(c[-1] - T) <= tol * max(1.0, T):
            return "final"
        return "dirichlet"
    return tag


def _expr_tuple(value, n):
    if value is None:
        return None
    return tuple(as_expr(v) for v in value)


@dataclass(frozen=True)
class ProblemSpec:
    """Coefficients and data of a linear parabolic problem.

    ``A`` is a ``dim x dim`` nested tuple of expressions (None means the
    identity), ``b`` a tuple of ``dim`` expressions (None means zero). ``div_b``
    must be supplied by the user whenever ``b`` is not divergence free.
    ``exact_grad`` holds the spatial gradient of ``exact_u`` when known.
    """

    dim: int
    f: ExprFn
    u0: ExprFn
    uD: ExprFn
    T: float = 1.0
    sigma: float = 1.0
    A: tuple | None = None
    b: tuple | None = None
    c: ExprFn | None = None
    div_b: ExprFn | None = None
    exact_u: ExprFn | None = None
    exact_grad: tuple | None = None
    domain: Domain = field(default_factory=Domain)
    C_F: float | None = None
    nu_lower: float | None = None
    nu_upper: float | None = None
    name: str = ""

    def __post_init__(self):
        if self.dim not in (1, 2, 3):
            raise ValueError("dim must be 1, 2 or 3")
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")
        if not self.T > 0:
            raise ValueError("T must be positive")
        set_ = lambda k, v: object.__setattr__(self, k, v)
        for k in ("f", "u0", "uD"):
            set_(k, as_expr(getattr(self, k)))
        for k in ("c", "div_b", "exact_u"):
            if getattr(self, k) is not None:
                set_(k, as_expr(getattr(self, k)))
        if self.A is not None:
            if len(self.A) != self.dim or any(len(r) != self.dim for r in self.A):
                raise ValueError("A must be dim x dim")
            set_("A", tuple(tuple(as_expr(e) for e in r) for r in self.A))
        if self.b is not None:
            if len(self.b) != self.dim:
                raise ValueError("b must have dim entries")
            set_("b", _expr_tuple(self.b, self.dim))
        if self.exact_grad is not None:
            if len(self.exact_grad) != self.dim:
                raise ValueError("exact_grad must have dim entries")
            set_("exact_grad", _expr_tuple(self.exact_grad, self.dim))
        if self.C_F is None:
            set_("C_F", self.domain.friedrichs_constant())
        if not self.C_F > 0:
            raise ValueError("C_F must be positive")
        if self.nu_lower is None or self.nu_upper is None:
            lo, hi = self._sample_ellipticity()
            if self.nu_lower is None:
                set_("nu_lower", lo)
            if self.nu_upper is None:
                set_("nu_upper", hi)
        if not 0 < self.nu_lower <= self.nu_upper:
            raise ValueError("ellipticity bounds must satisfy 0 < nu_lower <= nu_upper")

    # --- evaluation helpers -----------------------------------------------------

    @property
    def has_convection(self):
        return self.b is not None and not all(e.is_constant and e(np.zeros((1, 1)))[0] == 0 for e in self.b)

    @property
    def has_reaction(self):
        return self.c is not None and not (self.c.is_constant and float(self.c(np.zeros(1))) == 0)

    @property
    def time_dependent_operator(self):
        exprs = list(self.b or ()) + [self.c, self.div_b]
        if self.A is not None:
            exprs += [e for r in self.A for e in r]
        return any(e is not None and "t" in e.variables for e in exprs)

    def A_fn(self, x, t=0.0):
        x = np.asarray(x, dtype=float)
        shape = x.shape[:-1]
        d = self.dim
        if self.A is None:
            return np.broadcast_to(np.eye(d), shape + (d, d))
        out = np.empty(np.broadcast_shapes(shape, np.shape(t)) + (d, d))
        for i in range(d):
            for j in range(d):
                out[..., i, j] = self.A[i][j](x, t)
        return out

    def A_inv_fn(self, x, t=0.0):
        if self.A is None:
            x = np.asarray(x)
            return np.broadcast_to(np.eye(self.dim), x.shape[:-1] + (self.dim, self.dim))
        return np.linalg.inv(self.A_fn(x, t))

    def b_fn(self, x, t=0.0):
        x = np.asarray(x, dtype=float)
        shape = np.broadcast_shapes(x.shape[:-1], np.shape(t))
        out = np.zeros(shape + (self.dim,))
        if self.b is not None:
            for i, e in enumerate(self.b):
                out[..., i] = e(x, t)
        return out

    def c_fn(self, x, t=0.0):
        x = np.asarray(x, dtype=float)
        shape = np.broadcast_shapes(x.shape[:-1], np.shape(t))
        return np.zeros(shape) if self.c is None else np.broadcast_to(self.c(x, t), shape)

    def delta2_fn(self, x, t=0.0):
        """``c - div(b) / 2``."""
        out = self.c_fn(x, t)
        if self.div_b is not None:
            out = out - 0.5 * self.div_b(x, t)
        return out

    def grad_u_fn(self, x, t=0.0):
        """Spatial gradient of the exact solution (central differences if no formula)."""
        if self.exact_u is None:
            raise ValueError("problem has no exact solution")
        x = np.asarray(x, dtype=float)
        shape = np.broadcast_shapes(x.shape[:-1], np.shape(t))
        out = np.empty(shape + (self.dim,))
        if self.exact_grad is not None:
            for i, e in enumerate(self.exact_grad):
                out[..., i] = e(x, t)
            return out
        h = 1e-6
        for i in range(self.dim):
            dx = np.zeros(self.dim)
            dx[i] = h
            out[..., i] = (self.exact_u(x + dx, t) - self.exact_u(x - dx, t)) / (2 * h)
        return out

    def _sample_ellipticity(self):
        if self.A is None:
            return 1.0, 1.0
        if self.domain.kind == "box":
            axes = [np.linspace(lo, hi, 7) for lo, hi in self.domain.extents]
        else:
            p = np.asarray(self.domain.polygon)
            axes = [np.linspace(p[:, k].min(), p[:, k].max(), 7) for k in range(2)]
        pts = np.stack([g.ravel() for g in np.meshgrid(*axes, indexing="ij")], axis=1)
        ts = np.linspace(0.0, self.T, 3)
        lam = np.concatenate([np.linalg.eigvalsh(self.A_fn(pts, t)).ravel() for t in ts])
        if np.any(lam <= 0):
            raise ValueError("A is not positive definite at some sample point")
        return float(lam.min()), float(lam.max())

    def check_coefficients(self, points, t=0.0, delta0=0.0):
        """Sample ellipticity and ``delta^2 >= delta0`` at ``points``; raise on violation."""
        lam = np.linalg.eigvalsh(self.A_fn(points, t))
        if np.any(lam < self.nu_lower * (1 - 1e-12)) or np.any(lam > self.nu_upper * (1 + 1e-12)):
            raise ValueError("A violates the declared ellipticity bounds")
        if self.has_convection or self.has_reaction:
            if np.any(self.delta2_fn(points, t) < delta0):
                raise ValueError("c - div(b)/2 falls below delta0")

    def with_sigma(self, sigma):
        return replace(self, sigma=float(sigma))


def spacetime(fn):
    """Wrap ``fn(x, t)`` as a function of space-time points ``(..., d+1)``."""
    def wrapped(p, _t=0.0):
        p = np.asarray(p, dtype=float)
        return fn(p[..., :-1], p[..., -1])
    return wrapped


@dataclass(frozen=True)
class TimeGrid:
    """Breakpoints ``0 = t^0 < ... < t^K = T``."""

    breakpoints: tuple

    def __post_init__(self):
        b = np.asarray(self.breakpoints, dtype=float)
        if b.ndim != 1 or len(b) < 2:
            raise ValueError("need at least two breakpoints")
        if b[0] != 0.0:
            raise ValueError("time grid must start at 0")
        if np.any(np.diff(b) <= 0):
            raise ValueError("breakpoints must be strictly increasing")
        object.__setattr__(self, "breakpoints", tuple(float(v) for v in b))

    @classmethod
    def uniform(cls, T, K):
        b = np.linspace(0.0, T, int(K) + 1)
        b[-1] = T
        return cls(tuple(b))

    @property
    def K(self):
        return len(self.breakpoints) - 1

    @property
    def T(self):
        return self.breakpoints[-1]

    def slabs(self):
        b = self.breakpoints
        return [(k, b[k], b[k + 1] - b[k]) for k in range(self.K)]


# --- manufactured solutions ------------------------------------------------------


def sympy_to_expr(e) -> str:
    """Print a sympy expression in the expression grammar."""
    import sympy

    s = sympy.sstr(e, order="none")
    s = s.replace("**", "^")
    s = re.sub(r"\bAbs\(", "abs(", s)
    s = re.sub(r"\bE\b", "exp(1)", s)
    return s


def manufacture(u, dim, sigma=1.0, A=None, b=None, c=None, **kw) -> ProblemSpec:
    """Problem whose exact solution is ``u`` (expression text).

    The load, initial and boundary data and gradient are derived symbolically.
    """
    import sympy

    X = sympy.symbols("x y z")[:dim]
    t = sympy.Symbol("t")
    loc = {n: s for n, s in zip("xyz", X)}
    loc.update(t=t, pi=sympy.pi, atan2=sympy.atan2, abs=sympy.Abs, sqrt=sympy.sqrt,
               exp=sympy.exp, sin=sympy.sin, cos=sympy.cos)

    def sym(text):
        return sympy.sympify(str(text).replace("^", "**"), locals=loc)

    us = sym(u)
    grad = [sympy.diff(us, xi) for xi in X]
    As = [[sym(A[i][j]) if A is not None else int(i == j) for j in range(dim)] for i in range(dim)]
    bs = [sym(v) for v in b] if b is not None else [0] * dim
    cs = sym(c) if c is not None else 0
    flux = [sum(As[i][j] * grad[j] for j in range(dim)) for i in range(dim)]
    f = (sigma * sympy.diff(us, t) - sum(sympy.diff(flux[i], X[i]) for i in range(dim))
         + sum(bs[i] * grad[i] for i in range(dim)) + cs * us)
    divb = sum(sympy.diff(bs[i], X[i]) for i in range(dim))
    return ProblemSpec(
        dim=dim,
        f=as_expr(sympy_to_expr(sympy.simplify(f) if kw.pop("simplify", False) else f)),
        u0=as_expr(sympy_to_expr(us.subs(t, 0))),
        uD=as_expr(str(u)),
        sigma=float(sigma),
        A=A,
        b=b,
        c=c,
        div_b=as_expr(sympy_to_expr(divb)) if b is not None else None,
        exact_u=as_expr(str(u)),
        exact_grad=tuple(sympy_to_expr(g) for g in grad),
        **kw,
    )


# --- library -----------------------------------------------------------------------

L_SHAPE = ((-1.0, -1.0), (0.0, -1.0), (0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (-1.0, 1.0))
PI_SHAPE = ((-1.0, -1.0), (-0.5, -1.0), (-0.5, 0.0), (0.5, 0.0), (0.5, -1.0), (1.0, -1.0),
            (1.0, 1.0), (-1.0, 1.0))

UNIT_SQUARE = Domain("box", ((0.0, 1.0), (0.0, 1.0)))
UNIT_CUBE = Domain("box", ((0.0, 1.0),) * 3)
UNIT_INTERVAL = Domain("box", ((0.0, 1.0),))


def example(name, sigma=None) -> ProblemSpec:
    """Built-in problems ``ex1`` ... ``ex6`` and ``ex8``.

    ``sigma`` overrides the default of 1; manufactured loads are re-derived.
    """
    s = 1.0 if sigma is None else float(sigma)
    if name == "ex1" or name == "ex6":
        return manufactured_cached(name, "x*(1-x)*y*(1-y)*(t^2+t+1)", 2, UNIT_SQUARE, s)
    if name == "ex2":
        return manufactured_cached(name, "x*(1-x)*y*(1-y)*z*(1-z)*(t^2+t+1)", 3, UNIT_CUBE, s)
    if name == "ex3":
        # branch of the polar angle continuous on the L-shape, cut along the removed quadrant
        u = "(x^2+y^2)^(1/3)*sin(2/3*(atan2(-y,-x)+pi))*(t^2+t+1)"
        spec = manufactured_cached(name, u, 2, Domain("polygon", polygon=L_SHAPE), s)
        # the spatial factor is harmonic, so only the time derivative survives
        f = f"{s!r}*(x^2+y^2)^(1/3)*sin(2/3*(atan2(-y,-x)+pi))*(2*t+1)"
        return replace(spec, f=as_expr(f))
    if name == "ex4":
        return ProblemSpec(dim=2, f="t*sin(t)*sin(pi*x)+t*cos(t)*sin(pi*y)", u0="0", uD="0",
                           T=2.0, sigma=s, domain=Domain("polygon", polygon=PI_SHAPE), name=name)
    if name == "ex5":
        return manufactured_cached(name, "x*(1-x)*(t^2+t+1)", 1, UNIT_INTERVAL, s)
    if name == "ex8":
        u = f"6*sin(pi*x)*exp(-pi^2*t/{s!r})"
        return manufactured_cached(name, u, 1, UNIT_INTERVAL, s)
    if name == "ex7":
        raise ValueError("ex7 needs a curved boundary, which is out of scope")
    raise ValueError(f"unknown problem {name!r}")


EXAMPLES = ("ex1", "ex2", "ex3", "ex4", "ex5", "ex6", "ex8")


_CACHE = {}


def manufactured_cached(name, u, dim, domain, sigma):
    key = (name, u, sigma)
    if key not in _CACHE:
        _CACHE[key] = manufacture(u, dim, sigma=sigma, domain=domain, name=name)
    return _CACHE[key]
