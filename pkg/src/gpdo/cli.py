"""Command-line front end: ``gpdo <command> [--config PATH] [--out DIR] ...``.

Every run writes ``result.json`` and ``manifest.json`` (config echo, versions,
timings) into the output directory; failures exit nonzero and print a JSON
error object. Verbosity follows the ``GPDO_LOG`` environment variable.
"""

from __future__ import annotations

import csv
import json
import logging
import os
import platform
import sys
import time
import traceback
from dataclasses import dataclass, field
from pathlib import Path

import click
import numpy as np
import scipy

from . import __version__, fourier, kernels, library
from .grid import GroupGrid, rel_l2, write_csv
from .repn import LIGHT, abelian_grid, heisenberg_grid, load_frequency_grid
from .structure import load_structure

log = logging.getLogger("gpdo")

TOP_KEYS = {"structure", "grid", "frequency", "symbol", "function", "params", "seed", "threads"}


class ConfigError(ValueError):
    def __init__(self, problems: dict):
        self.problems = problems
        super().__init__("; ".join(f"{k}: {v}" for k, v in problems.items()))


@dataclass
class RunConfig:
    structure: str = "heisenberg1"
    grid: dict = field(default_factory=lambda: {"L": 6.0, "P": 32})
    frequency: dict = field(default_factory=dict)
    symbol: dict | None = None
    function: str = "tgauss"
    params: dict = field(default_factory=dict)
    seed: int = 0
    threads: int | None = None

    @classmethod
    def from_dict(cls, doc: dict) -> "RunConfig":
        problems = {}
        unknown = set(doc) - TOP_KEYS
        for k in sorted(unknown):
            problems[k] = "unknown field"
        g = doc.get("grid", {"L": 6.0, "P": 32})
        if not isinstance(g, dict):
            problems["grid"] = "must be an object {L, P}"
        else:
            if not (isinstance(g.get("L"), (int, float)) and g.get("L", 0) > 0):
                problems["grid.L"] = "must be a positive number"
            if not (isinstance(g.get("P"), int) and g.get("P", 0) >= 5):
                problems["grid.P"] = "must be an integer >= 5"
        if "seed" in doc and not isinstance(doc["seed"], int):
            problems["seed"] = "must be an integer"
        if doc.get("threads") is not None and not (isinstance(doc["threads"], int) and doc["threads"] > 0):
            problems["threads"] = "must be a positive integer"
        if "frequency" in doc and not isinstance(doc["frequency"], dict):
            problems["frequency"] = "must be an object"
        if "symbol" in doc and doc["symbol"] is not None and not isinstance(doc["symbol"], (dict, str)):
            problems["symbol"] = "must be an object or a path"
        if problems:
            raise ConfigError(problems)
        kw = {k: doc[k] for k in TOP_KEYS if k in doc}
        return cls(**kw)

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in sorted(TOP_KEYS)}


def _setup_logging():
    level = os.environ.get("GPDO_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def _jsonable(o):
    if isinstance(o, dict):
        return {str(k): _jsonable(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_jsonable(v) for v in o]
    if isinstance(o, np.ndarray):
        return _jsonable(o.tolist())
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.bool_,)):
        return bool(o)
    if isinstance(o, complex):
        return [o.real, o.imag]
    return o


class Run:
    """Context for one command: resolved config, output directory and manifest."""

    def __init__(self, command: str, ctx_obj: dict, overrides: dict):
        self.command = command
        self.t0 = time.perf_counter()
        self.timings = {}
        doc = {}
        if ctx_obj.get("config"):
            doc = json.loads(Path(ctx_obj["config"]).read_text())
        doc.update({k: v for k, v in overrides.items() if v is not None})
        if ctx_obj.get("seed") is not None:
            doc["seed"] = ctx_obj["seed"]
        if ctx_obj.get("threads") is not None:
            doc["threads"] = ctx_obj["threads"]
        self.cfg = RunConfig.from_dict(doc)
        self.refine = ctx_obj.get("refine", 0)
        self.out = Path(ctx_obj.get("out") or f"gpdo-{command}")
        self.out.mkdir(parents=True, exist_ok=True)
        if self.cfg.threads:
            os.environ["GPDO_THREADS"] = str(self.cfg.threads)

    # builders
    def grid(self, **kw) -> GroupGrid:
        g = {**self.cfg.grid, **kw}
        n = 3 if self.structure().n == 3 else self.structure().n
        return GroupGrid(n, float(g["L"]), int(g["P"]))

    def structure(self):
        return load_structure(self.cfg.structure)

    def frequency(self, grid: GroupGrid | None = None, default=None):
        doc = dict(default or {}) if not self.cfg.frequency else dict(self.cfg.frequency)
        if doc.get("backend") == "abelian" or self.structure().n != 3:
            return abelian_grid(grid or self.grid())
        doc.setdefault("backend", "heisenberg")
        return load_frequency_grid(doc).refined(self.refine)

    def symbol(self, fg, grid, override=None):
        from .symbols import load_symbol

        doc = override if override is not None else self.cfg.symbol
        if doc is None:
            raise ConfigError({"symbol": "required for this command"})
        if isinstance(doc, str):
            doc = json.loads(Path(doc).read_text())
        return load_symbol(doc, fg, grid)

    def tick(self, label: str):
        self.timings[label] = time.perf_counter() - self.t0

    def finish(self, result: dict, echo: bool = True) -> dict:
        result = _jsonable(result)
        (self.out / "result.json").write_text(json.dumps(result, indent=2, sort_keys=True))
        manifest = {
            "command": self.command,
            "config": _jsonable(self.cfg.to_dict()),
            "refine": self.refine,
            "versions": {"gpdo": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
                         "python": platform.python_version()},
            "kernel_backend": kernels.BACKEND,
            "threads": fourier.default_threads(),
            "timings": {**self.timings, "total": time.perf_counter() - self.t0},
        }
        (self.out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True))
        if echo:
            click.echo(json.dumps(result, indent=2, sort_keys=True))
        return result


def _fail(command: str, exc: Exception, out: str | None):
    err = {"error": type(exc).__name__, "message": str(exc), "command": command}
    if isinstance(exc, ConfigError):
        err["fields"] = exc.problems
    log.debug("".join(traceback.format_exception(exc)))
    if out:
        Path(out).mkdir(parents=True, exist_ok=True)
        (Path(out) / "error.json").write_text(json.dumps(err, indent=2))
    click.echo(json.dumps(err, indent=2))
    sys.exit(2)


def command(name):
    """Register a subcommand that receives a Run and returns a result dict."""

    def deco(fn):
        @main.command(name, help=fn.__doc__)
        @click.pass_context
        def wrapper(ctx, **kw):
            try:
                run = Run(name, ctx.obj, {})
                res = fn(run, **kw)
                run.finish(res)
            except SystemExit:
                raise
            except Exception as exc:  # noqa: BLE001 - every failure becomes an error document
                _fail(name, exc, ctx.obj.get("out"))

        wrapper.__name__ = fn.__name__
        return wrapper

    return deco


@click.group()
@click.option("--config", type=click.Path(exists=True, dir_okay=False), help="JSON run configuration.")
@click.option("--out", type=click.Path(file_okay=False), help="Output directory.")
@click.option("--seed", type=int, help="Random seed (overrides the config).")
@click.option("--threads", type=int, help="Worker threads for transforms.")
@click.option("--refine", type=click.IntRange(0, 2), default=0, help="Frequency-grid refinement level.")
@click.version_option(__version__)
@click.pass_context
def main(ctx, config, out, seed, threads, refine):
    """Pseudo-differential calculus on the Heisenberg group and R^n."""
    _setup_logging()
    ctx.ensure_object(dict)
    ctx.obj.update(config=config, out=out, seed=seed, threads=threads, refine=refine)


def _opt(*args, **kw):
    return click.option(*args, **kw)


# --- subcommands -----------------------------------------------------------------


@_opt("--group", default=None, help="Built-in structure (heisenberg1, abelian:n) or JSON path.")
@command("structure")
def structure_cmd(run: Run, group):
    """Print dimension, homogeneous dimension, weights and structure checks."""
    s = load_structure(group or run.cfg.structure)
    chk = s.check()
    click.echo(f"n={s.n} Q={s.Q} weights={list(s.weights)} step={s.step}", err=True)
    return {"name": s.name, "n": s.n, "Q": s.Q, "weights": list(s.weights), "step": s.step, "nu0": s.nu0, "checks": chk}


@_opt("--calibrate/--no-calibrate", default=False, help="Least-squares Plancherel constant over reference Gaussians.")
@command("fourier-roundtrip")
def fourier_roundtrip(run: Run, calibrate):
    """Forward and inverse transform of a test function; roundtrip and Parseval errors."""
    grid = run.grid()
    fg = run.frequency(grid)
    f = library.sample(run.cfg.function, grid)
    F = fourier.forward(f, fg)
    run.tick("forward")
    back = fourier.inverse(F, grid)
    run.tick("inverse")
    res = {
        "function": run.cfg.function,
        "frequency": fg.to_dict(),
        "nodes": fg.size,
        "rel_l2_error": rel_l2(back, f),
        "parseval_defect": fourier.parseval_defect(f, fg, F),
        "boundary_warning": f.boundary_flag,
        "trace_class_sum": F.trace_class_sum(),
    }
    if calibrate and fg.backend == "heisenberg":
        refs = [library.sample(f"gauss:{s}", grid) for s in (0.6, 0.7, 0.8, 0.9, 1.0)]
        res["c_P"] = fourier.calibrate_plancherel(refs, fg)
        res["c_P_relative_deviation"] = abs(res["c_P"] / fg.params["c_P"] - 1.0)
    write_csv(back, run.out / "roundtrip.csv")
    return res


@command("quantize")
def quantize(run: Run):
    """Apply Op(sigma) to the configured test function; writes output.csv."""
    from .quantizer import op_apply

    grid = run.grid()
    fg = run.frequency(grid, LIGHT)
    sym = run.symbol(fg, grid)
    f = library.sample(run.cfg.function, grid) if grid.n == 3 else grid.sample(lambda *x: np.exp(-sum(c * c for c in x) / 2))
    u = op_apply(sym, f)
    write_csv(u, run.out / "output.csv")
    return {"symbol": sym.name, "input_norm": f.norm(), "output_norm": u.norm(), "boundary_warning": f.boundary_flag}


def _class_params(run: Run, sym):
    from .symbols import SymbolClassParams

    p = run.cfg.params
    return SymbolClassParams(float(p.get("m", sym.m)), float(p.get("rho", sym.rho)), float(p.get("delta", sym.delta)),
                             sym.fg.spec.nu)


@command("seminorm")
def seminorm_cmd(run: Run):
    """One class seminorm; params: alpha, beta, gamma, m, rho, delta."""
    from .symbols import seminorm

    grid = run.grid()
    fg = run.frequency(grid, LIGHT)
    sym = run.symbol(fg, grid)
    p = run.cfg.params
    n = grid.n
    a, b, g = p.get("alpha", [0] * n), p.get("beta", [0] * n), float(p.get("gamma", 0.0))
    return {"symbol": sym.name, "alpha": a, "beta": b, "gamma": g, "value": seminorm(sym, a, b, g, _class_params(run, sym))}


@command("class-report")
def class_report_cmd(run: Run):
    """Seminorm table over params alphas x betas x gammas, baseline and refined; writes class_report.csv."""
    from .symbols import class_report

    grid = run.grid()
    fg = run.frequency(grid, LIGHT)
    sym = run.symbol(fg, grid)
    p = run.cfg.params
    rows = class_report(sym, _class_params(run, sym), p.get("alphas"), p.get("betas"), tuple(p.get("gammas", [0.0])),
                        refine=max(run.refine, 1))
    with open(run.out / "class_report.csv", "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]))
        w.writeheader()
        w.writerows(rows)
    return {"symbol": sym.name, "rows": rows}


@command("kernel")
def kernel_cmd(run: Run):
    """Kernel slice of a broadcast symbol, shell table (kernel_shells.csv) and decay report."""
    from .quantizer import decay_report, kernel_slice

    grid = run.grid()
    fg = run.frequency(grid)
    sym = run.symbol(fg, grid)
    p = run.cfg.params
    k = kernel_slice(sym, p.get("x", [0] * grid.n), grid)
    edges = np.linspace(0.0, float(p.get("q_max", 6.0)), int(p.get("shells", 24)) + 1)
    table = k.shell_table(edges)
    with open(run.out / "kernel_shells.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["q", "max_abs_kappa", "mean_abs_kappa"])
        for r in table:
            w.writerow([0.5 * (r["q_lo"] + r["q_hi"]), r["max"], r["mean"]])
    rep = decay_report(k, float(p.get("m", sym.m)), float(p.get("rho", sym.rho)), run.structure().Q)
    (run.out / "decay_report.json").write_text(json.dumps(_jsonable(rep), indent=2))
    return {"symbol": sym.name, "decay": rep, **k.meta}


@_opt("--symbol", "symbol_path", type=click.Path(exists=True, dir_okay=False), help="Symbol JSON (overrides the config).")
@_opt("--trials", type=int, default=200, show_default=True)
@command("garding")
def garding_cmd(run: Run, symbol_path, trials):
    """Sharp Garding scan with held-out validation; writes garding_report.json."""
    from .inequalities import garding_scan

    grid = run.grid()
    fg = run.frequency(grid, LIGHT)
    sym = run.symbol(fg, grid, symbol_path)
    rep = garding_scan(sym, grid, trials=trials, seed=run.cfg.seed)
    rep.to_json(run.out / "garding_report.json")
    click.echo(rep.summary(), err=True)
    d = rep.to_dict()
    return {k: d[k] for k in ("symbol", "m", "rho", "delta", "s", "C_est", "violations", "train", "multiplier_nonnegative",
                              "strong_ratio_max", "positivity", "commutation", "seed")}


@command("resolvent")
def resolvent_cmd(run: Run):
    """Manufactured-solution resolvent residual and decay profile on two boxes (params: boxes)."""
    from .inequalities import apply_I_plus_R, resolvent_apply, schwartz_decay_report

    boxes = run.cfg.params.get("boxes", [[6.0, 48], [8.0, 64]])
    fg = run.frequency()
    us, rows = [], []
    for L, P in boxes:
        grid = GroupGrid(3, float(L), int(P))
        g, f = library.manufactured_pair(grid)
        u = resolvent_apply(f, fg)
        rows.append({"L": L, "P": P, "residual": rel_l2(apply_I_plus_R(u), f),
                     "residual_spectral": rel_l2(apply_I_plus_R(u, method="spectral"), f), "recovery": rel_l2(u, g)})
        us.append(u)
        run.tick(f"box L={L}")
    prof = schwartz_decay_report(us)
    (run.out / "decay_profile.json").write_text(json.dumps(_jsonable(prof.to_dict()), indent=2))
    return {"boxes": rows, "boundary_max": prof.boundary_max, "enlargement": prof.enlargement}


@command("oracle-compare")
def oracle_compare_cmd(run: Run):
    """Abelian framework vs brute-force Kohn-Nirenberg quantization on three symbol families."""
    from . import oracle
    from .quantizer import op_apply
    from .symbols import Symbol, difference_op, from_invariant_operator, from_multiplier, identity_symbol, sample_coefficient

    n = int(run.cfg.params.get("n", 2))
    g = run.cfg.grid if run.cfg.grid != {"L": 6.0, "P": 32} else {"L": 10.0, "P": 32}
    grid = GroupGrid(n, float(g["L"]), int(g["P"]))
    fg = abelian_grid(grid)
    f = grid.sample(lambda *x: np.exp(-sum(c * c for c in x) / 2) * (1 + 0.5 * x[0]))
    x1 = sample_coefficient("x1", grid).values.real
    e1 = tuple(int(i == 0) for i in range(n))
    fam = {
        "identity": (identity_symbol(fg), oracle.EuclideanSymbol(lambda x, xi: np.ones_like(xi[0]), x_dependent=False)),
        "laplace_resolvent": (from_multiplier("resolvent", fg),
                              oracle.EuclideanSymbol(lambda x, xi: 1.0 / (1.0 + sum(c * c for c in xi)), x_dependent=False)),
        "mixed_x1_dx1": (Symbol(fg, [(x1, from_invariant_operator(e1, fg).field)], grid=grid),
                         oracle.EuclideanSymbol(lambda x, xi: x[0] * 1j * xi[0])),
    }
    res = {k: oracle.compare(op_apply(s, f), oracle.kn_quantize(p, f)) for k, (s, p) in fam.items()}
    heat = from_multiplier(lambda mu: np.exp(-mu), fg, m=-20)
    pe = oracle.EuclideanSymbol(lambda x, xi: np.exp(-sum(c * c for c in xi)))
    dd = {}
    for j in range(n):
        a = tuple(int(i == j) for i in range(n))
        D = difference_op(heat, a).field[:, 0, 0]
        ref = oracle.xi_derivative(pe, grid, j).ravel()
        dd[str(j + 1)] = float(np.max(np.abs(D - ref)) / np.max(np.abs(ref)))
    res["difference_vs_xi_derivative"] = dd
    return res


if __name__ == "__main__":  # pragma: no cover
    main()
