"""Symbols as matrix fields over (x, lambda), difference operators and class seminorms.

A symbol is stored x-separably as a finite sum

    sigma(x, lambda) = sum_i a_i(x) tau_i(lambda),

with ``a_i`` sampled on a :class:`~gpdo.grid.GroupGrid` (``None`` meaning the
constant 1) and ``tau_i`` one matrix per frequency node. A single term with
``a = None`` is a broadcast (x-independent) symbol. Every operation of the
calculus is linear in either the coefficients or the fields, so nothing ever
materialises the full (x-node, lambda-node) table.

Difference operators on the Heisenberg backend use the commutator identities

    Delta_x s = [pi(Y), s] / (i lambda),   Delta_y s = -[pi(X), s] / (i lambda),
    Delta_t s = i d/dlambda s + (i / 2 lambda) (pi(X) Delta_x s + pi(Y) Delta_y s),

which hold node by node for transforms of functions; the lambda-derivative is
taken by Lagrange differentiation inside each Gauss-Legendre panel. The
literal route, forward(x^alpha inverse(s)), is kept as ``method="pipeline"``.
"""

from __future__ import annotations

import json
import logging
import math
from collections.abc import Callable
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import fourier
from .grid import GroupGrid, SampledFunction, apply_X_beta, monomial_multiply
from .repn import FrequencyGrid, RocklandSpec
from .structure import GradedStructure, abelian, heisenberg1, homogeneous_degree

log = logging.getLogger(__name__)


class SymbolError(ValueError):
    pass


@dataclass(frozen=True)
class SymbolClassParams:
    """Order and type (m, rho, delta) of a class S^m_{rho, delta}; nu is the Rockland degree."""

    m: float
    rho: float = 1.0
    delta: float = 0.0
    nu: int = 2

    def __post_init__(self):
        if not 0.0 <= self.delta <= self.rho <= 1.0 or self.delta == 1.0:
            raise SymbolError(f"need 0 <= delta <= rho <= 1 and delta != 1, got rho={self.rho} delta={self.delta}")
        if self.nu <= 0 or self.nu % 2:
            raise SymbolError("Rockland degree must be even and positive")


@dataclass
class Symbol:
    fg: FrequencyGrid
    terms: list
    grid: GroupGrid | None = None
    m: float = 0.0
    rho: float = 1.0
    delta: float = 0.0
    gamma1: float = 0.0
    gamma2: float = 0.0
    name: str = "symbol"
    meta: dict = field(default_factory=dict)
    recipe: Callable | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        shape = (self.fg.size, self.fg.dim, self.fg.dim)
        terms = []
        for a, tau in self.terms:
            tau = np.asarray(tau, dtype=complex)
            if tau.shape != shape:
                raise SymbolError(f"field shape {tau.shape} does not match the frequency grid {shape}")
            if a is not None:
                if self.grid is None:
                    raise SymbolError("x-dependent terms need a group grid")
                a = np.asarray(a)
                if a.shape != self.grid.shape:
                    raise SymbolError(f"coefficient shape {a.shape} does not match grid {self.grid.shape}")
            terms.append((a, tau))
        if not terms:
            raise SymbolError("a symbol needs at least one term")
        self.terms = terms

    @property
    def broadcast(self) -> bool:
        return len(self.terms) == 1 and self.terms[0][0] is None

    @property
    def field(self) -> np.ndarray:
        """The (nodes, dim, dim) field of a broadcast symbol."""
        if not self.broadcast:
            raise SymbolError(f"{self.name} depends on x")
        return self.terms[0][1]

    @property
    def params(self) -> SymbolClassParams:
        return SymbolClassParams(self.m, self.rho, self.delta, self.fg.spec.nu)

    def _new(self, terms, **kw) -> "Symbol":
        kw.setdefault("recipe", None)
        return replace(self, terms=terms, meta=dict(self.meta), **kw)

    def map_fields(self, fn) -> "Symbol":
        return self._new([(a, fn(tau)) for a, tau in self.terms])

    def __add__(self, other: "Symbol") -> "Symbol":
        if other.fg is not self.fg:
            raise SymbolError("symbols live on different frequency grids")
        grid = self.grid or other.grid
        return replace(self, terms=_merge(self.terms + other.terms), grid=grid, recipe=None, meta={})

    def __mul__(self, c) -> "Symbol":
        recipe = None if self.recipe is None else (lambda fg, r=self.recipe: r(fg) * c)
        return self._new([(a, c * tau) for a, tau in self.terms], recipe=recipe)

    __rmul__ = __mul__

    def adjoint(self) -> "Symbol":
        """Node-wise conjugate transpose; x-dependent coefficients are conjugated as well."""
        terms = [(None if a is None else np.conj(a), np.conj(np.swapaxes(tau, -1, -2))) for a, tau in self.terms]
        return self._new(terms, name=f"{self.name}*")

    def coefficient_rows(self) -> np.ndarray:
        """Distinct coefficient vectors (a_1(x), ..., a_k(x)) over the x-nodes, shape (U, k)."""
        if all(a is None for a, _ in self.terms):
            return np.ones((1, len(self.terms)))
        cols = [np.ones(self.grid.shape) if a is None else a for a, _ in self.terms]
        rows = np.stack([np.ravel(c) for c in cols], axis=-1)
        return np.unique(rows, axis=0)

    def at_row(self, row) -> np.ndarray:
        """sum_i row_i tau_i, the field at every x-node whose coefficients equal ``row``."""
        return sum(c * tau for c, (_, tau) in zip(row, self.terms))

    def at(self, index) -> np.ndarray:
        """Field at the x-node with multi-index ``index``."""
        return self.at_row([1.0 if a is None else a[tuple(index)] for a, _ in self.terms])

    def rebuild(self, fg: FrequencyGrid) -> "Symbol":
        if self.recipe is None:
            raise SymbolError(f"{self.name} cannot be rebuilt on another frequency grid")
        return self.recipe(fg)


def _merge(terms):
    """Combine terms that share the same coefficient object."""
    out = []
    for a, tau in terms:
        for i, (b, sig) in enumerate(out):
            if a is b:
                out[i] = (b, sig + tau)
                break
        else:
            out.append((a, tau))
    return out


def _structure_for(fg: FrequencyGrid) -> GradedStructure:
    return heisenberg1() if fg.backend == "heisenberg" else abelian(fg.params["n"])


def _lattice_grid(fg: FrequencyGrid) -> GroupGrid:
    return GroupGrid(fg.params["n"], fg.params["L"], fg.params["P"])


# --- construction ------------------------------------------------------------


def identity_symbol(fg: FrequencyGrid) -> Symbol:
    eye = np.broadcast_to(np.eye(fg.dim, dtype=complex), (fg.size, fg.dim, fg.dim)).copy()
    return Symbol(fg, [(None, eye)], m=0.0, name="identity", recipe=identity_symbol)


def from_field(F: fourier.FourierField, m: float = 0.0, name: str = "field") -> Symbol:
    """Broadcast symbol whose field is a Fourier transform (or any FourierField)."""
    return Symbol(F.fg, [(None, F.mats.copy())], m=m, name=name, meta=dict(F.meta))


def multiplier_admissibility(phi, m: float, nu: int, orders: int = 4, mu_max: float = 400.0, step: float = 0.01):
    """Numerical check of |phi^(a)(mu)| <= C_a (1 + mu)^(m/nu - a) for a = 0..orders.

    phi^(a) is a forward difference of order a with the scale-adapted step
    h = 0.05 (1 + mu), so power laws give exactly flat weighted profiles and
    round-off stays far below the bound. The bound holds on the lattice iff
    every profile is finite and its maximum over the last quarter of
    [0, mu_max] does not exceed that over the third quarter by more than 1%.
    C_a is the maximum of the profile.
    """
    mu = np.arange(0.0, mu_max + step / 2, step)
    h = 0.05 * (1.0 + mu)
    samples = [np.asarray(phi(mu + k * h), dtype=complex) for k in range(orders + 1)]
    if not all(np.all(np.isfinite(v)) for v in samples):
        raise SymbolError("multiplier returns non-finite values")
    q2, q3 = len(mu) // 2, len(mu) * 3 // 4
    consts, ok = [], True
    for a in range(orders + 1):
        d = sum((-1) ** (a - k) * math.comb(a, k) * samples[k] for k in range(a + 1)) / h**a
        prof = np.abs(d) * (1.0 + mu) ** (a - m / nu)
        c = float(np.max(prof))
        grows = np.max(prof[q3:]) > 1.01 * np.max(prof[q2:q3]) + 1e-300
        ok &= bool(np.isfinite(c) and not grows)
        consts.append(c)
    return {"admissible": ok, "C": consts, "m": m, "nu": nu, "mu_max": mu_max}


def from_multiplier(phi, fg: FrequencyGrid, spec: RocklandSpec | None = None, m: float | None = None, name=None) -> Symbol:
    """sigma(pi) = phi(pi(R)) by the spectral calculus; broadcast.

    ``phi`` is a callable on eigenvalues or a registry name (see :data:`PHI`).
    The order ``m`` defaults to the registry's natural order.
    """
    if spec is not None and spec != fg.spec:
        fg = fg.with_spec(spec)
    label, fn, m0 = resolve_phi(phi)
    m = m0 if m is None else m
    if m is None:
        raise SymbolError(f"give the order m for multiplier {label!r}")
    vals = fg.spectrum()[0]
    if not np.all(np.isfinite(fn(vals))):
        raise SymbolError(f"multiplier {label!r} returns non-finite values on the spectrum")
    field_ = fg.multiplier_field(fn)
    recipe = lambda g: from_multiplier(phi, g, None, m, name)  # noqa: E731
    sym = Symbol(fg, [(None, field_)], m=m, name=name or label, recipe=recipe)
    sym.meta["admissibility"] = multiplier_admissibility(fn, m, fg.spec.nu)
    return sym


def _invariant_field(alpha, fg: FrequencyGrid) -> np.ndarray:
    alpha = tuple(int(a) for a in alpha)
    if fg.backend == "abelian":
        xi = fg.nodes
        vals = np.prod((1j * xi) ** np.array(alpha), axis=1)
        return vals[:, None, None]
    from .repn import generator_matrix

    # exact compression: multiply on an enlarged block and cut
    big = fg.N + sum(alpha) + 1
    out = np.empty((fg.size, fg.dim, fg.dim), dtype=complex)
    for i, lam in enumerate(fg.nodes):
        M = np.eye(big + 1, dtype=complex)
        for j, a in enumerate(alpha):
            G = generator_matrix(lam, j, big)
            for _ in range(a):
                M = M @ G
        out[i] = M[: fg.dim, : fg.dim]
    return out


def from_invariant_operator(alpha, fg: FrequencyGrid) -> Symbol:
    """Symbol pi(X)^alpha = pi(X_1)^a1 pi(X_2)^a2 ... of the invariant operator X^alpha."""
    s = _structure_for(fg)
    if len(alpha) != s.n:
        raise SymbolError(f"multi-index {tuple(alpha)} has wrong length for n={s.n}")
    m = homogeneous_degree(s, alpha)
    recipe = lambda g: from_invariant_operator(alpha, g)  # noqa: E731
    return Symbol(fg, [(None, _invariant_field(alpha, fg))], m=m, name=f"X^{tuple(alpha)}", recipe=recipe)


def from_coefficient_and_multiplier(a, phi, fg: FrequencyGrid, spec: RocklandSpec | None = None, m=None, name=None) -> Symbol:
    """sigma(x, pi) = a(x) phi(pi(R)) for a real coefficient ``a``.

    ``a`` is a :class:`SampledFunction` or a pair (registry name, grid).
    """
    if isinstance(a, tuple):
        aname, grid = a
        a = sample_coefficient(aname, grid)
    else:
        aname = "a"
    if np.max(np.abs(a.values.imag)) > 0:
        raise SymbolError("coefficient must be real-valued")
    base = from_multiplier(phi, fg, spec, m)
    coeff = a.values.real.copy()
    label = name or f"{aname}*{base.name}"

    def recipe(g):
        return from_coefficient_and_multiplier(a, phi, g, spec, m, name)

    sym = Symbol(base.fg, [(coeff, base.field)], grid=a.grid, m=base.m, name=label, recipe=recipe)
    sym.meta["admissibility"] = base.meta["admissibility"]
    return sym


def combine(symbols, name=None) -> Symbol:
    """Sum of symbols on one frequency grid; the order is the largest order."""
    out = symbols[0]
    for s in symbols[1:]:
        out = out + s
    recipes = [s.recipe for s in symbols]
    out.m = max(s.m for s in symbols)
    out.name = name or "+".join(s.name for s in symbols)
    if all(r is not None for r in recipes):
        out.recipe = lambda g: combine([r(g) for r in recipes], out.name)
    return out


# --- registries --------------------------------------------------------------


def _bump(mu, width=4.0):
    z = np.clip(np.asarray(mu, dtype=float) / width, 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        v = np.where(z < 1.0, np.exp(1.0 - 1.0 / (1.0 - z * z)), 0.0)
    return v


PHI = {
    "one": (lambda mu: np.ones_like(mu), 0.0),
    "heat": (lambda mu: np.exp(-mu), -20.0),
    "bump": (_bump, -20.0),
    "resolvent": (lambda mu: 1.0 / (1.0 + mu), -2.0),
}


def resolve_phi(phi, gamma: float | None = None):
    """(label, callable, natural order) for a registry name or a callable.

    Names: ``one``, ``heat``, ``bump``, ``resolvent``, ``power:g`` for
    (1 + mu)^g and ``const:c``. The natural order of power:g is g * nu for
    nu = 2; smoothing multipliers use the surrogate order -20.
    """
    if callable(phi):
        return getattr(phi, "__name__", "phi"), phi, None
    name = str(phi)
    if name == "power" and gamma is not None:
        name = f"power:{gamma}"
    if name in PHI:
        fn, m = PHI[name]
        return name, fn, m
    if name.startswith("power:"):
        g = float(name.split(":", 1)[1])
        return name, (lambda mu: (1.0 + mu) ** g), 2.0 * g
    if name.startswith("const:"):
        c = float(name.split(":", 1)[1])
        return name, (lambda mu: np.full_like(mu, c, dtype=float)), 0.0
    raise SymbolError(f"unknown multiplier {name!r}; known: {sorted(PHI)} + power:g, const:c")


COEFFICIENTS = {
    "1": lambda x: np.ones_like(x[0]),
    "x1": lambda x: x[0],
    "x2": lambda x: x[1],
    "1+tanh(x1)": lambda x: 1.0 + np.tanh(x[0]),
    "1-tanh(x1)": lambda x: 1.0 - np.tanh(x[0]),
    "sech2(x1)": lambda x: 1.0 / np.cosh(x[0]) ** 2,
    "gauss": lambda x: np.exp(-0.5 * sum(c * c for c in x)),
}


def sample_coefficient(name: str, grid: GroupGrid) -> SampledFunction:
    if name.startswith("const:"):
        c = float(name.split(":", 1)[1])
        return SampledFunction(grid, np.full(grid.shape, c, dtype=complex))
    if name not in COEFFICIENTS:
        raise SymbolError(f"unknown coefficient {name!r}; known: {sorted(COEFFICIENTS)} + const:c")
    return SampledFunction(grid, COEFFICIENTS[name](grid.coords()).astype(complex))


def load_symbol(doc, fg: FrequencyGrid, grid: GroupGrid | None = None) -> Symbol:
    """Build a symbol from its JSON description.

    Kinds: ``identity``, ``multiplier`` (phi, optional gamma and m),
    ``invariant`` (alpha), ``coeff_multiplier`` (a, phi, optional gamma and m)
    and ``sum`` (terms: a list of the above).
    """
    if not isinstance(doc, dict):
        doc = json.loads(Path(doc).read_text())
    kind = doc.get("kind")
    if kind == "identity":
        sym = identity_symbol(fg)
    elif kind == "multiplier":
        sym = from_multiplier(_phi_name(doc), fg, m=doc.get("m"))
    elif kind == "invariant":
        sym = from_invariant_operator(doc["alpha"], fg)
    elif kind == "coeff_multiplier":
        if grid is None:
            raise SymbolError("coeff_multiplier symbols need a group grid")
        sym = from_coefficient_and_multiplier((doc["a"], grid), _phi_name(doc), fg, m=doc.get("m"))
    elif kind == "sum":
        sym = combine([load_symbol(t, fg, grid) for t in doc["terms"]], doc.get("name"))
    else:
        raise SymbolError(f"unknown symbol kind {kind!r}")
    for key in ("rho", "delta"):
        if key in doc:
            setattr(sym, key, float(doc[key]))
    if "name" in doc:
        sym.name = doc["name"]
    return sym


def _phi_name(doc) -> str:
    phi = doc.get("phi", "one")
    if phi == "power":
        return f"power:{doc.get('gamma', 1.0)}"
    return phi


# --- difference operators ----------------------------------------------------


def lambda_derivative_matrix(fg: FrequencyGrid) -> np.ndarray:
    """Block-diagonal Lagrange differentiation over the Gauss-Legendre panels."""
    if "dlam" in fg.cache:
        return fg.cache["dlam"]
    p = fg.params["nodes_per_panel"]
    D = np.zeros((fg.size, fg.size))
    for s in range(0, fg.size, p):
        x = fg.nodes[s : s + p]
        diff = x[:, None] - x[None, :]
        np.fill_diagonal(diff, 1.0)
        w = 1.0 / np.prod(diff, axis=1)  # barycentric weights
        blk = (w[None, :] / w[:, None]) / diff
        np.fill_diagonal(blk, 0.0)
        np.fill_diagonal(blk, -blk.sum(axis=1))
        D[s : s + p, s : s + p] = blk
    fg.cache["dlam"] = D
    return D


def _delta_x(fg, M):
    Y = fg.generators()[1]
    return (Y @ M - M @ Y) / (1j * fg.nodes)[:, None, None]


def _delta_y(fg, M):
    X = fg.generators()[0]
    return -(X @ M - M @ X) / (1j * fg.nodes)[:, None, None]


def _delta_t(fg, M):
    X, Y = fg.generators()[:2]
    dM = np.einsum("ij,jkl->ikl", lambda_derivative_matrix(fg), M)
    corr = X @ _delta_x(fg, M) + Y @ _delta_y(fg, M)
    return 1j * dM + (1j / (2.0 * fg.nodes))[:, None, None] * corr


_DELTA = (_delta_x, _delta_y, _delta_t)


def _pipeline(fg: FrequencyGrid, M: np.ndarray, alpha, grid: GroupGrid, threads=None):
    F = fourier.FourierField(fg, M)
    k = fourier.inverse(F, grid, threads)
    xk = monomial_multiply(alpha, k)
    out = fourier.forward(xk, fg, threads)
    return out.mats, k.boundary_flag


def difference_op(sigma: Symbol, alpha, method: str = "auto", grid: GroupGrid | None = None, threads=None) -> Symbol:
    """Delta^alpha sigma, defined by (Delta^alpha f^)(pi) = (x^alpha f)^(pi), term by term.

    ``method``: ``identity`` (Heisenberg commutator identities), ``pipeline``
    (literal route through the inverse transform on ``grid``) or ``auto``
    (identities on the Heisenberg backend, the exact lattice pipeline on the
    abelian backend). Returns a copy with ``Delta^0`` giving the same arrays.
    """
    alpha = tuple(int(a) for a in alpha)
    fg = sigma.fg
    if any(a < 0 for a in alpha) or len(alpha) != _structure_for(fg).n:
        raise SymbolError(f"bad multi-index {alpha}")
    if not any(alpha):
        return sigma._new(list(sigma.terms), name=sigma.name)
    if method == "auto":
        method = "identity" if fg.backend == "heisenberg" else "pipeline"
    meta = {}
    if method == "identity":
        if fg.backend != "heisenberg":
            raise SymbolError("commutator identities are only available on the Heisenberg backend")

        def apply(M):
            for j in (2, 1, 0):
                for _ in range(alpha[j]):
                    M = _DELTA[j](fg, M)
            return M

    elif method == "pipeline":
        grid = grid if grid is not None else (_lattice_grid(fg) if fg.backend == "abelian" else sigma.grid)
        if grid is None:
            raise SymbolError("the pipeline method needs a group grid")
        flags = []

        def apply(M):
            out, flag = _pipeline(fg, M, alpha, grid, threads)
            flags.append(flag)
            return out

        meta = {"boundary_warning": flags}
    else:
        raise SymbolError(f"unknown method {method!r}")
    out = sigma.map_fields(apply)
    out.name = f"Delta^{alpha} {sigma.name}"
    if meta:
        out.meta["boundary_warning"] = any(meta["boundary_warning"])
        if out.meta["boundary_warning"]:
            log.warning("difference_op: intermediate kernel of %s does not decay at the boundary", sigma.name)
    return out


def trusted_block(fg: FrequencyGrid, grid: GroupGrid, alpha) -> np.ndarray:
    """Per-node size of the leading block where identity-based Delta^alpha of a transform is exact.

    Every commutator reads one row past the block; the lambda-derivative
    needs the whole panel inside the resolved band.
    """
    alpha = tuple(alpha)
    band = fourier.band_limits(fg, grid) + 1
    p = fg.params.get("nodes_per_panel", 1)
    panel_min = np.repeat(band.reshape(-1, p).min(axis=1), p) if alpha[2] else band
    shift = alpha[0] + alpha[1] + 2 * alpha[2]
    return np.clip(np.minimum(fg.retained, panel_min - shift), 0, None)


# --- x-derivatives -------------------------------------------------------------


def x_derivative(sigma: Symbol, beta, structure: GradedStructure | None = None) -> Symbol:
    """X_x^beta sigma: left-invariant derivatives of the coefficients in the x-slot."""
    beta = tuple(int(b) for b in beta)
    if not any(beta):
        return sigma._new(list(sigma.terms))
    s = structure or _structure_for(sigma.fg)
    terms = []
    for a, tau in sigma.terms:
        if a is None:
            continue
        da = apply_X_beta(s, beta, SampledFunction(sigma.grid, a)).values
        terms.append((_maybe_constant(da), tau))
    if not terms:
        terms = [(None, np.zeros_like(sigma.terms[0][1]))]
    out = sigma._new(_collapse(terms), name=f"X^{beta} {sigma.name}")
    return out


def _maybe_constant(a: np.ndarray, rtol: float = 1e-12):
    a = a.real if np.max(np.abs(a.imag), initial=0.0) == 0 else a
    scale = np.max(np.abs(a), initial=0.0)
    if scale == 0 or np.ptp(a.real) + np.ptp(np.imag(a)) <= rtol * scale:
        return complex(a.flat[0]) if np.iscomplexobj(a) else float(a.flat[0])
    return a


def _collapse(terms):
    """Fold constant coefficients into the fields; constant terms become broadcast."""
    const, rest = None, []
    for a, tau in terms:
        if a is None or np.ndim(a) == 0:
            c = 1.0 if a is None else a
            const = c * tau if const is None else const + c * tau
        else:
            rest.append((a, tau))
    return ([(None, const)] if const is not None else []) + rest


# --- seminorms ---------------------------------------------------------------


def _sandwich(fg: FrequencyGrid, left: float, M: np.ndarray, right: float) -> np.ndarray:
    w, v = fg.spectrum()
    if v is None:
        dl = (1.0 + w) ** left
        dr = (1.0 + w) ** right
        return dl[:, :, None] * M * dr[:, None, :]
    return fg.power_field(left) @ M @ fg.power_field(right)


def operand_norms(sigma: Symbol, left: float, right: float, retained: bool = True) -> np.ndarray:
    """max over x of the largest singular value of (I+R)^left sigma (I+R)^right, per node."""
    fg = sigma.fg
    r = fg.retained if retained else fg.dim
    best = np.zeros(fg.size)
    for row in sigma.coefficient_rows():
        S = _sandwich(fg, left, sigma.at_row(row), right)[:, :r, :r]
        best = np.maximum(best, np.linalg.norm(S, ord=2, axis=(1, 2)))
    return best


def seminorm(sigma: Symbol, alpha, beta, gamma: float, params: SymbolClassParams | None = None) -> float:
    """Class seminorm: sup over (x, lambda) of

        ||pi(I+R)^((rho[alpha] - m - delta[beta] + gamma)/nu) X_x^beta Delta^alpha sigma pi(I+R)^(-gamma/nu)||

    with the operator norm taken on the retained block.
    """
    params = params or sigma.params
    fg = sigma.fg
    if params.nu != fg.spec.nu:
        raise SymbolError(f"class degree nu={params.nu} does not match the Rockland operator (nu={fg.spec.nu})")
    s = _structure_for(fg)
    a_deg = homogeneous_degree(s, alpha)
    b_deg = homogeneous_degree(s, beta)
    z = difference_op(x_derivative(sigma, beta, s), alpha)
    left = (params.rho * a_deg - params.m - params.delta * b_deg + gamma) / params.nu
    return float(np.max(operand_norms(z, left, -gamma / params.nu)))


def class_report(sigma: Symbol, params: SymbolClassParams | None = None, alphas=None, betas=None, gammas=(0.0,), refine: int = 1):
    """Seminorm table over alphas x betas x gammas at the baseline and refined frequency grids."""
    params = params or sigma.params
    n = _structure_for(sigma.fg).n
    alphas = alphas or [(0,) * n]
    betas = betas or [(0,) * n]
    finer = sigma.rebuild(sigma.fg.refined(refine)) if refine else None
    if finer is not None:
        finer.m, finer.rho, finer.delta = sigma.m, sigma.rho, sigma.delta
    rows = []
    for a in alphas:
        for b in betas:
            for g in gammas:
                v0 = seminorm(sigma, a, b, g, params)
                v1 = seminorm(finer, a, b, g, params) if finer is not None else math.nan
                ratio = v1 / v0 if v0 > 0 else (1.0 if v1 == 0 else math.inf)
                rows.append({"alpha": list(a), "beta": list(b), "gamma": g, "baseline": v0, "refined": v1, "ratio": ratio})
    return rows
