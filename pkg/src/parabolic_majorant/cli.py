"""Command line experiment runner.

A run is described by an INI-like config with the sections ``[problem]``,
``[discretisation]``, ``[majorant]``, ``[adaptivity]`` and ``[output]``; a
``seed`` may precede the first section. Expressions are quoted strings in the
grammar of :mod:`parabolic_majorant.expr`, matrices and vectors are JSON
lists. Results go to ``report.csv`` and ``summary.txt``.

Exit codes: 0 success, 2 config error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .adapt import CRITERIA, adapt_slab_loop, adapt_spacetime_loop
from .expr import ExprDomainError, ExprSyntaxError, parse_expr
from .fem import FESpace
from .linsolve import SolverError
from .majorant import (MajorantParams, efficiency_index, optimize_flux_spacetime,
                       run_timestepping_with_majorant)
from .mesh import write_mesh
from .parabolic import solve_spacetime
from .problem import EXAMPLES, Domain, ProblemSpec, TimeGrid, example, manufacture

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3

CSV_COLUMNS = ("ref_or_slab", "n_cells", "n_dofs", "e_total", "m_d", "m_eq", "majorant_total",
               "i_eff_sqrt", "i_eff_ratio", "wall_ms", "status")


class ConfigError(ValueError):
    """Invalid config; ``line`` is the 1-based line number when known."""

    def __init__(self, message, line=None):
        super().__init__(f"line {line}: {message}" if line else message)
        self.line = line


# --- schema ----------------------------------------------------------------------

def _choice(*options):
    def conv(text):
        if text not in options:
            raise ValueError(f"expected one of {', '.join(options)}")
        return text
    return conv


def _bool(text):
    low = text.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError("expected a boolean (on/off)")


def _expr(text):
    parse_expr(text)
    return text


SCHEMA = {
    "run": {"seed": int},
    "problem": {
        "name": str, "domain": _choice("box", "polygon"), "extents": json.loads,
        "polygon": json.loads, "T": float, "sigma": float, "f": _expr, "u0": _expr, "uD": _expr,
        "exact_u": _expr, "A": json.loads, "b": json.loads, "c": _expr, "div_b": _expr,
        "C_F": float,
    },
    "discretisation": {
        "mode": _choice("timestep", "spacetime"), "scheme": _choice("implicit", "explicit"),
        "K": int, "divisions": int, "time_divisions": int, "h": float, "levels": int,
        "flux_degree": int, "supg": float, "steps": int, "rows": _choice("auto", "levels", "slabs"),
        "report_every": int,
    },
    "majorant": {
        "nu": float, "gamma": float, "mu": str, "beta": float, "L_iter_max": int,
        "beta_min": float, "beta_max": float,
    },
    "adaptivity": {
        "criterion": _choice("none", *CRITERIA), "marking": _choice("bulk", "average"),
        "theta": float, "n_ref": int, "max_ref_per_slab": int,
    },
    "output": {"dir": str, "csv": _bool, "mesh_dumps": _bool, "deterministic": _bool},
}

DEFAULTS = {
    "run": {"seed": 0},
    "discretisation": {"mode": "timestep", "scheme": "implicit", "K": 10, "divisions": 4,
                       "time_divisions": None, "h": None, "levels": 1, "flux_degree": 2,
                       "supg": 0.0, "steps": None, "rows": "auto", "report_every": 1},
    "majorant": {"nu": 1.0, "gamma": 1.0, "mu": "0", "beta": 1.0, "L_iter_max": 3,
                 "beta_min": 1e-6, "beta_max": 1e6},
    "adaptivity": {"criterion": "none", "marking": "bulk", "theta": 0.3, "n_ref": 0,
                   "max_ref_per_slab": 1},
    "output": {"dir": "out", "csv": True, "mesh_dumps": False, "deterministic": False},
}


def parse_config_text(text):
    """Parse config text into ``{section: {key: (value, line)}}`` with unknown keys rejected."""
    out = {s: {} for s in SCHEMA}
    section = "run"
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line[0] in "#;":
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigError(f"malformed section header {line!r}", lineno)
            section = line[1:-1].strip()
            if section not in SCHEMA:
                raise ConfigError(f"unknown section [{section}]", lineno)
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {line!r}", lineno)
        key, value = (p.strip() for p in line.split("=", 1))
        if key not in SCHEMA[section]:
            raise ConfigError(f"unknown key {key!r} in section [{section}]", lineno)
        if key in out[section]:
            raise ConfigError(f"duplicate key {key!r} in section [{section}]", lineno)
        if len(value) >= 2 and value[0] == value[-1] == '"':
            value = value[1:-1]
        try:
            out[section][key] = (SCHEMA[section][key](value), lineno)
        except (ValueError, ExprSyntaxError) as exc:
            raise ConfigError(f"bad value for {key!r}: {exc}", lineno) from None
    return out


# --- run config --------------------------------------------------------------------


@dataclass
class RunConfig:
    """Validated run description."""

    problem: ProblemSpec
    problem_block: dict
    discretisation: dict
    majorant: MajorantParams
    adaptivity: dict
    output: dict
    seed: int = 0
    notes: list = field(default_factory=list)

    @property
    def mode(self):
        return self.discretisation["mode"]

    @property
    def adaptive(self):
        return self.adaptivity["criterion"] != "none"


def _problem_from_block(block, sigma_override=None):
    vals = {k: v for k, (v, _) in block.items()}
    line = lambda k: block[k][1] if k in block else None
    notes = []
    if sigma_override is not None:
        vals["sigma"] = float(sigma_override)
    kind = vals.get("domain", "box")
    try:
        if kind == "box":
            ext = vals.get("extents", [[0.0, 1.0], [0.0, 1.0]])
            domain = Domain("box", tuple((float(a), float(b)) for a, b in ext))
        else:
            if "polygon" not in vals:
                raise ConfigError("polygon domain needs 'polygon'", line("domain"))
            domain = Domain("polygon", polygon=tuple((float(a), float(b)) for a, b in vals["polygon"]))
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"bad domain: {exc}", line("extents") or line("polygon")) from None
    dim = domain.dim
    common = dict(T=float(vals.get("T", 1.0)), domain=domain, name=vals.get("name", ""),
                  C_F=vals.get("C_F"))
    A = vals.get("A")
    b = vals.get("b")
    try:
        A = tuple(tuple(str(e) for e in row) for row in A) if A is not None else None
        b = tuple(str(e) for e in b) if b is not None else None
        exact = vals.get("exact_u")
        sigma = float(vals.get("sigma", 1.0))
        if "f" not in vals:
            if exact is None:
                raise ConfigError("need 'f' or 'exact_u' in [problem]")
            spec = manufacture(exact, dim, sigma=sigma, A=A, b=b, c=vals.get("c"), **common)
            if "div_b" in vals:
                spec = replace(spec, div_b=parse_expr(vals["div_b"]))
        else:
            if sigma_override is not None and exact is not None:
                notes.append("sigma overridden but 'f' is given explicitly; f was not re-derived")
            u0 = vals.get("u0", exact)
            uD = vals.get("uD", exact)
            if u0 is None or uD is None:
                raise ConfigError("need 'u0' and 'uD' (or 'exact_u') in [problem]")
            spec = ProblemSpec(dim=dim, f=vals["f"], u0=u0, uD=uD, sigma=sigma, A=A, b=b,
                               c=vals.get("c"), div_b=vals.get("div_b"), exact_u=exact, **common)
        for k in ("u0", "uD"):
            if k in vals and "f" not in vals:
                spec = replace(spec, **{k: parse_expr(vals[k])})
        if spec.b is not None and spec.div_b is None:
            raise ConfigError("'b' given without 'div_b'", line("b"))
        spec.check_coefficients(domain.build_mesh(divisions=2, h=None).vertices)
    except ConfigError:
        raise
    except (TypeError, ValueError, ExprDomainError) as exc:
        raise ConfigError(f"invalid problem: {exc}") from None
    return spec, notes


def build_config(parsed, sigma=None, theta=None, out_dir=None, deterministic=None) -> RunConfig:
    """Turn a parsed config into a :class:`RunConfig`, applying CLI overrides."""
    take = lambda sec: {**DEFAULTS.get(sec, {}), **{k: v for k, (v, _) in parsed[sec].items()}}
    line = lambda sec, k: parsed[sec][k][1] if k in parsed[sec] else None
    spec, notes = _problem_from_block(parsed["problem"], sigma)
    disc = take("discretisation")
    maj = take("majorant")
    ada = take("adaptivity")
    outp = take("output")
    if theta is not None:
        ada["theta"] = float(theta)
    if out_dir is not None:
        outp["dir"] = str(out_dir)
    if deterministic:
        outp["deterministic"] = True
    if disc["mode"] == "spacetime":
        if disc["scheme"] != "implicit":
            raise ConfigError("mode 'spacetime' has no time-stepping scheme; drop 'scheme'",
                              line("discretisation", "scheme"))
        if spec.domain.kind != "box" or spec.dim > 2:
            raise ConfigError("space-time runs need a 1D or 2D box domain",
                              line("discretisation", "mode"))
    for key in ("K", "divisions", "levels", "report_every"):
        if disc[key] < 1:
            raise ConfigError(f"{key!r} must be >= 1", line("discretisation", key))
    if ada["criterion"] != "none":
        if disc["levels"] != 1:
            raise ConfigError("'levels' > 1 cannot be combined with adaptivity",
                              line("discretisation", "levels"))
        if disc["scheme"] == "explicit":
            raise ConfigError("adaptivity needs the implicit scheme", line("adaptivity", "criterion"))
        if ada["criterion"] == "error" and spec.exact_u is None:
            raise ConfigError("criterion 'error' needs 'exact_u'", line("adaptivity", "criterion"))
        if not 0 < ada["theta"] <= 1:
            raise ConfigError("theta must lie in (0, 1]", line("adaptivity", "theta"))
    try:
        mu = float(maj["mu"])
    except ValueError:
        mu = maj["mu"]
    try:
        params = MajorantParams(nu=maj["nu"], gamma=maj["gamma"], mu=mu, beta=maj["beta"],
                                L_iter_max=maj["L_iter_max"],
                                beta_clamp=(maj["beta_min"], maj["beta_max"]),
                                flux_degree=disc["flux_degree"])
    except (ValueError, ExprSyntaxError) as exc:
        raise ConfigError(f"invalid [majorant] block: {exc}") from None
    seed = parsed["run"]["seed"][0] if "seed" in parsed["run"] else 0
    return RunConfig(spec, parsed["problem"], disc, params, ada, outp, seed, notes)


def load_config(path, **overrides) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    return build_config(parse_config_text(text), **overrides)


# --- built-in problems --------------------------------------------------------------

BUILTIN_DISCRETISATION = {
    "ex1": {"mode": "timestep", "K": 20, "divisions": 4, "levels": 3},
    "ex2": {"mode": "timestep", "K": 10, "divisions": 2, "levels": 2, "flux_degree": 1},
    "ex3": {"mode": "timestep", "K": 10, "h": 0.5},
    "ex4": {"mode": "timestep", "K": 10, "h": 0.5},
    "ex5": {"mode": "spacetime", "divisions": 2, "levels": 5},
    "ex6": {"mode": "spacetime", "divisions": 2, "levels": 3},
    "ex8": {"mode": "spacetime", "divisions": 4},
}
BUILTIN_ADAPTIVITY = {
    "ex3": {"criterion": "indicator", "theta": 0.3},
    "ex4": {"criterion": "indicator", "theta": 0.3},
    "ex8": {"criterion": "indicator", "theta": 0.3, "n_ref": 8},
}


def _q(text):
    return f'"{text}"'


def builtin_config_text(name, sigma=None):
    """Config text for a built-in problem; ``exN`` as in the examples library."""
    spec = example(name, sigma)
    lines = [f"# built-in problem {name}", "seed = 0", "", "[problem]", f"name = {_q(name)}"]
    dom = spec.domain
    if dom.kind == "box":
        lines += ["domain = box", f"extents = {json.dumps([list(e) for e in dom.extents])}"]
    else:
        lines += ["domain = polygon", f"polygon = {json.dumps([list(p) for p in dom.polygon])}"]
    lines += [f"T = {spec.T!r}", f"sigma = {spec.sigma!r}"]
    if spec.exact_u is not None:
        lines.append(f"exact_u = {_q(spec.exact_u.source)}")
    # manufactured loads are re-derived from exact_u; others are written out
    if spec.exact_u is None or name == "ex3":
        lines.append(f"f = {_q(spec.f.source)}")
    if spec.exact_u is None:
        lines += [f"u0 = {_q(spec.u0.source)}", f"uD = {_q(spec.uD.source)}"]
    lines += ["", "[discretisation]"]
    lines += [f"{k} = {v}" for k, v in BUILTIN_DISCRETISATION[name].items()]
    lines += ["", "[majorant]", "nu = 1.0", "gamma = 1.0", "mu = 0", "beta = 1.0", "L_iter_max = 3"]
    ada = {"criterion": "none", **BUILTIN_ADAPTIVITY.get(name, {})}
    lines += ["", "[adaptivity]"] + [f"{k} = {v}" for k, v in ada.items()]
    lines += ["", "[output]", f"dir = {_q('out_' + name)}", "csv = on", "mesh_dumps = off", ""]
    return "\n".join(lines)


# --- execution ---------------------------------------------------------------------


@dataclass
class Row:
    ref_or_slab: int
    n_cells: int
    n_dofs: int
    e_total: float
    m_d: float
    m_eq: float
    majorant_total: float
    i_eff_sqrt: float
    i_eff_ratio: float
    wall_ms: float
    status: str = "ok"

    def csv(self):
        fmt = lambda v: "nan" if v is None else "%.6e" % v
        return ",".join([str(self.ref_or_slab), str(self.n_cells), str(self.n_dofs),
                         fmt(self.e_total), fmt(self.m_d), fmt(self.m_eq), fmt(self.majorant_total),
                         fmt(self.i_eff_sqrt), fmt(self.i_eff_ratio), fmt(self.wall_ms), self.status])


class _Sink:
    """Writes rows as they are produced so partial results survive failures."""

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.dir = Path(cfg.output["dir"])
        self.dir.mkdir(parents=True, exist_ok=True)
        self.rows = []
        self.det = cfg.output["deterministic"]
        self._t = time.perf_counter()
        self._csv = None
        if cfg.output["csv"]:
            self._csv = open(self.dir / "report.csv", "w", newline="")
            self._csv.write(",".join(CSV_COLUMNS) + "\n")
            self._csv.flush()

    def elapsed_ms(self):
        now = time.perf_counter()
        ms, self._t = (now - self._t) * 1e3, now
        return 0.0 if self.det else ms

    def add(self, row: Row, mesh=None):
        self.rows.append(row)
        if self._csv:
            self._csv.write(row.csv() + "\n")
            self._csv.flush()
        if mesh is not None and self.cfg.output["mesh_dumps"]:
            (self.dir / "meshes").mkdir(exist_ok=True)
            write_mesh(mesh, self.dir / "meshes" / f"mesh_{row.ref_or_slab:03d}.txt")

    def close(self, status, message=""):
        if self._csv:
            self._csv.close()
        (self.dir / "summary.txt").write_text(summary_text(self.cfg, self.rows, status, message))


def _row(idx, mesh, n_dofs, rep, m_d, m_eq, total, err, wall, status="ok"):
    s, r = efficiency_index(total, err) if err is not None else (None, None)
    return Row(idx, int(mesh.cells.shape[0]), int(n_dofs), err, m_d, m_eq, total, s, r, wall, status)


def _spatial_mesh(cfg, level):
    disc = cfg.discretisation
    dom = cfg.problem.domain
    if dom.kind == "box":
        return dom.build_mesh(divisions=disc["divisions"] * 2 ** level)
    h = disc["h"] if disc["h"] is not None else 2.0 / disc["divisions"]
    return dom.build_mesh(h=h / 2 ** level)


def _spacetime_mesh(cfg, level):
    disc = cfg.discretisation
    n = disc["divisions"] * 2 ** level
    nt = (disc["time_divisions"] or disc["divisions"]) * 2 ** level
    return cfg.problem.domain.build_spacetime_mesh(cfg.problem.T, n, nt)


def _run_timestep(cfg, sink):
    spec, disc, params = cfg.problem, cfg.discretisation, cfg.majorant
    grid = TimeGrid.uniform(spec.T, disc["K"])
    rows = disc["rows"] if disc["rows"] != "auto" else ("slabs" if disc["levels"] == 1 else "levels")
    status = "ok"
    if cfg.adaptive:
        ada = cfg.adaptivity
        space = FESpace(_spatial_mesh(cfg, 0), 1)
        acc = {"m_d": 0.0, "m_eq": 0.0}

        def on_record(rec):
            acc["m_d"] += rec.report.m_d
            acc["m_eq"] += rec.report.m_eq
            if (rec.k + 1) % disc["report_every"] == 0 or rec.k + 1 == grid.K:
                sink.add(_row(rec.k, rec.mesh, rec.mesh.vertices.shape[0], rec.report, acc["m_d"],
                              acc["m_eq"], rec.accumulated_majorant, rec.accumulated_error,
                              sink.elapsed_ms()), rec.mesh)

        adapt_slab_loop(spec, space, grid, params, ada["marking"], ada["theta"], ada["criterion"],
                        ada["max_ref_per_slab"], on_record=on_record)
        return status
    for level in range(disc["levels"]):
        mesh = _spatial_mesh(cfg, level)
        space = FESpace(mesh, 1)
        acc = {"m_d": 0.0, "m_eq": 0.0}

        def on_slab(k, rep, run_m):
            acc["m_d"] += rep.m_d
            acc["m_eq"] += rep.m_eq
            if rows == "slabs" and ((k + 1) % disc["report_every"] == 0 or k + 1 == grid.K):
                sink.add(_row(k, mesh, space.n_dofs, rep, acc["m_d"], acc["m_eq"], run_m,
                              rep.error_combined, sink.elapsed_ms()))

        res = run_timestepping_with_majorant(spec, space, grid, params, disc["scheme"],
                                             steps=disc["steps"], on_slab=on_slab)
        if res.status != "ok":
            k = len(res.reports)
            sink.add(Row(k, int(mesh.cells.shape[0]), space.n_dofs, None, math.inf, math.inf,
                         math.inf, None, None, sink.elapsed_ms(), res.status))
            status = res.status
            break
        if rows == "levels" and res.reports:
            sink.add(_row(level, mesh, space.n_dofs, res.reports[-1], acc["m_d"], acc["m_eq"],
                          res.total, res.error, sink.elapsed_ms()), mesh)
    return status


def _run_spacetime(cfg, sink):
    spec, disc, params = cfg.problem, cfg.discretisation, cfg.majorant
    if cfg.adaptive:
        ada = cfg.adaptivity
        count = [0]

        def on_record(rec):
            r = rec.report
            sink.add(_row(count[0], rec.mesh, rec.v.space.n_dofs, r, r.m_d, r.m_eq, r.total,
                          r.error_combined, sink.elapsed_ms()), rec.mesh)
            count[0] += 1

        adapt_spacetime_loop(spec, _spacetime_mesh(cfg, 0), params, ada["marking"], ada["theta"],
                             ada["criterion"], ada["n_ref"], disc["supg"], on_record=on_record)
        return "ok"
    for level in range(disc["levels"]):
        mesh = _spacetime_mesh(cfg, level)
        v = solve_spacetime(spec, mesh, supg=disc["supg"])
        _, r = optimize_flux_spacetime(spec, v, params)
        sink.add(_row(level, mesh, v.space.n_dofs, r, r.m_d, r.m_eq, r.total, r.error_combined,
                      sink.elapsed_ms()), mesh)
    return "ok"


def summary_text(cfg: RunConfig, rows, status, message=""):
    spec = cfg.problem
    d = cfg.discretisation
    out = [f"problem: {spec.name or '(unnamed)'}  dim={spec.dim}  sigma={spec.sigma!r}  T={spec.T!r}",
           f"mode: {d['mode']}" + (f"  scheme={d['scheme']}  K={d['K']}" if d["mode"] == "timestep" else ""),
           f"majorant: nu={cfg.majorant.nu!r} gamma={cfg.majorant.gamma!r} "
           f"L_iter_max={cfg.majorant.L_iter_max} flux_degree={cfg.majorant.flux_degree}",
           f"adaptivity: {cfg.adaptivity['criterion']}"
           + (f" ({cfg.adaptivity['marking']}, theta={cfg.adaptivity['theta']!r})" if cfg.adaptive else ""),
           f"seed: {cfg.seed}", ""]
    out.append(f"{'ref':>5} {'EL':>8} {'[e]':>12} {'M':>12} {'I_eff':>7} {'M/[e]':>8}  status")
    for r in rows:
        f = lambda v, w, p: f"{'-':>{w}}" if v is None else f"{v:>{w}.{p}}"
        out.append(f"{r.ref_or_slab:>5} {r.n_cells:>8} {f(r.e_total, 12, '4e')} "
                   f"{f(r.majorant_total, 12, '4e')} {f(r.i_eff_sqrt, 7, '3f')} "
                   f"{f(r.i_eff_ratio, 8, '3f')}  {r.status}")
    out += ["", "I_eff = sqrt(M/[e]); M/[e] is the ratio form.", f"status: {status}"]
    out += [f"note: {n}" for n in cfg.notes]
    if message:
        out.append(message)
    return "\n".join(out) + "\n"


def execute(cfg: RunConfig, stream=sys.stderr) -> int:
    """Run a config and write its artifacts; returns the exit code."""
    for n in cfg.notes:
        print(f"warning: {n}", file=stream)
    sink = _Sink(cfg)
    try:
        with np.errstate(over="ignore", invalid="ignore"):
            if cfg.mode == "spacetime":
                status = _run_spacetime(cfg, sink)
            else:
                status = _run_timestep(cfg, sink)
    except (SolverError, ArithmeticError, np.linalg.LinAlgError) as exc:
        sink.close("failed", f"numerical failure: {exc}")
        print(f"numerical failure: {exc}", file=stream)
        return EXIT_NUMERIC
    sink.close(status)
    return EXIT_OK


def _parser():
    p = argparse.ArgumentParser(prog="parabolic-majorant",
                                description="Guaranteed error bounds for parabolic problems.")
    p.add_argument("command", nargs="?", choices=["run"], help="run a config file or a built-in problem")
    p.add_argument("config", nargs="?", help="config file")
    p.add_argument("--problem", help="built-in problem " + "|".join(EXAMPLES))
    p.add_argument("--out", help="output directory (overrides [output] dir)")
    p.add_argument("--deterministic", action="store_true", help="zero wall_ms for reproducible CSVs")
    p.add_argument("--dump-config", action="store_true", help="print the config and exit")
    p.add_argument("--sigma", type=float, help="override sigma")
    p.add_argument("--theta", type=float, help="override the bulk marking parameter")
    return p


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.problem is not None:
            if args.config is not None:
                raise ConfigError("give either a config file or --problem, not both")
            try:
                text = builtin_config_text(args.problem, args.sigma)
            except ValueError as exc:
                raise ConfigError(str(exc)) from None
            if args.dump_config:
                sys.stdout.write(text)
                return EXIT_OK
            parsed = parse_config_text(text)
            cfg = build_config(parsed, theta=args.theta, out_dir=args.out,
                               deterministic=args.deterministic)
        else:
            if args.config is None:
                raise ConfigError("no config file given (use 'run <config>' or --problem exN)")
            if args.dump_config:
                try:
                    sys.stdout.write(Path(args.config).read_text())
                except OSError as exc:
                    raise ConfigError(f"cannot read config: {exc}") from None
                return EXIT_OK
            cfg = load_config(args.config, sigma=args.sigma, theta=args.theta, out_dir=args.out,
                              deterministic=args.deterministic)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return execute(cfg)


if __name__ == "__main__":
    sys.exit(main())
