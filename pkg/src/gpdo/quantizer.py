"""Quantization Op(sigma), convolution kernels, kernel decay and L^2 norm estimates.

For a separable symbol sum_i a_i(x) tau_i the quantization is

    Op(sigma) f(x) = sum_i a_i(x) sum_lambda w tr(pi_lambda(x) tau_i(lambda) f^(lambda)),

so one forward transform of f and one inverse transform per term suffice.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from . import fourier, kernels
from .grid import GroupGrid, SampledFunction, shells
from .repn import displacement_alpha
from .structure import heisenberg1, homogeneous_norm, inverse as group_inverse, multiply
from .symbols import Symbol, SymbolError, _structure_for

log = logging.getLogger(__name__)


def op_apply(sigma: Symbol, f: SampledFunction, threads=None, F: fourier.FourierField | None = None) -> SampledFunction:
    """Op(sigma) f on the grid of ``f``; pass ``F`` to reuse a forward transform."""
    if sigma.grid is not None and sigma.grid != f.grid:
        raise SymbolError("symbol coefficients and input live on different grids")
    F = fourier.forward(f, sigma.fg, threads) if F is None else F
    out = np.zeros(f.grid.shape, dtype=complex)
    for a, tau in sigma.terms:
        u = fourier.inverse(fourier.FourierField(sigma.fg, tau @ F.mats), f.grid, threads).values
        out += u if a is None else a * u
    return SampledFunction(f.grid, out, {"boundary_warning": f.boundary_flag})


def adjoint(sigma: Symbol) -> Symbol:
    """Symbol of Op(sigma)^* for broadcast sigma (node-wise conjugate transpose)."""
    if not sigma.broadcast:
        raise SymbolError("adjoints of x-dependent symbols need the full composition calculus")
    return sigma.adjoint()


# --- kernels -------------------------------------------------------------------


@dataclass
class KernelSlice:
    """Convolution kernel kappa_x of Op(sigma) at a base point, K(x, y) = kappa_x(y^-1 x)."""

    x: np.ndarray
    kappa: SampledFunction
    sigma_name: str = ""
    meta: dict = field(default_factory=dict)

    def norms(self) -> np.ndarray:
        g = self.kappa.grid
        s = heisenberg1() if g.n == 3 else _structure_for_n(g.n)
        return homogeneous_norm(s, g.points()).reshape(g.shape)

    def shell_table(self, edges) -> list[dict]:
        q = self.norms()
        a = np.abs(self.kappa.values)
        rows = []
        for lo, hi, m in zip(edges[:-1], edges[1:], shells(q, edges)):
            if m.any():
                rows.append({"q_lo": lo, "q_hi": hi, "count": int(m.sum()), "max": float(a[m].max()), "mean": float(a[m].mean())})
        return rows


def _structure_for_n(n):
    from .structure import abelian

    return abelian(n)


def kernel_slice(sigma: Symbol, x, grid: GroupGrid, threads=None) -> KernelSlice:
    """Inverse transform of sigma(x, .) sampled on ``grid``.

    ``x`` is the multi-index of an x-node of the symbol grid; it is ignored
    for broadcast symbols.
    """
    if sigma.broadcast:
        M = sigma.field
        base = np.zeros(grid.n)
    else:
        idx = tuple(int(i) for i in x)
        M = sigma.at(idx)
        base = np.array([sigma.grid.axis[i] for i in idx])
    F = fourier.FourierField(sigma.fg, M)
    k = fourier.inverse(F, grid, threads)
    meta = {"trace_class_sum": F.trace_class_sum(), "boundary_warning": k.boundary_flag}
    return KernelSlice(base, k, sigma.name, meta)


def evaluate_inverse(F: fourier.FourierField, points: np.ndarray, band_grid: GroupGrid) -> np.ndarray:
    """sum_lambda w tr(pi_lambda(g) F(lambda)) at arbitrary Heisenberg points g.

    Uses the band of ``band_grid`` so the values agree with :func:`fourier.inverse`
    on that grid's nodes.
    """
    fg = F.fg
    N = fg.N
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    kmax = fourier.band_limits(fg, band_grid)
    out = np.zeros(len(pts), dtype=complex)
    for i, lam in enumerate(fg.nodes):
        K = kmax[i]
        if K < 0:
            continue
        a = displacement_alpha(lam, pts[:, 0], pts[:, 1])
        rho, phi = np.abs(a), np.angle(a)
        T = kernels.trace_coeffs(rho, np.ascontiguousarray(F.mats[i, : K + 1, : K + 1]), int(K))
        E = np.exp(1j * np.outer(phi, np.arange(-K, K + 1)))
        out += fg.weights[i] * np.exp(1j * lam * pts[:, 2]) * np.sum(E * T, axis=1)
    return out


def convolve_at(sigma: Symbol, f: SampledFunction, x0) -> complex:
    """Direct kernel quadrature sum_y w f(y) kappa(y^-1 x0), O(grid size) per output point."""
    if not sigma.broadcast or sigma.fg.backend != "heisenberg":
        raise SymbolError("direct convolution is implemented for broadcast Heisenberg symbols")
    s = heisenberg1()
    ys = f.grid.points()
    q = multiply(s, group_inverse(ys), np.broadcast_to(np.asarray(x0, float), ys.shape))
    kap = evaluate_inverse(fourier.FourierField(sigma.fg, sigma.field), q, f.grid)
    return complex(f.grid.cell * np.sum(f.values.ravel() * kap))


# --- decay ---------------------------------------------------------------------


def _fit_slope(logq, logk):
    """Least-squares slope with a 95% normal-approximation interval."""
    A = np.stack([logq, np.ones_like(logq)], axis=1)
    coef, *_ = np.linalg.lstsq(A, logk, rcond=None)
    resid = logk - A @ coef
    dof = max(len(logq) - 2, 1)
    s2 = float(resid @ resid) / dof
    cov = s2 * np.linalg.inv(A.T @ A)
    half = 1.96 * float(np.sqrt(cov[0, 0]))
    return float(coef[0]), (float(coef[0]) - half, float(coef[0]) + half)


def decay_report(k: KernelSlice, m: float, rho: float, Q: int, near=(0.1, 1.0), nshells: int = 8, min_count: int = 30,
                 orders=(2, 4, 6), probe: float = 4.0, probe_halfwidth: float = 0.25, exclude_boundary: int = 2):
    """Near-diagonal slope of log max|kappa| against log|q| and far-field constants C_M.

    Near field: shells geometrically spaced in ``near``; shells with fewer than
    ``min_count`` samples are skipped and reported. Far field: C_M is the sup
    of |kappa(q)| |q|^M over interior samples with |q| >= 1, and the margin at
    ``probe`` is C_M probe^-M - max |kappa| over the shell |q| = probe +- halfwidth.
    """
    q = k.norms()
    a = np.abs(k.kappa.values)
    interior = k.kappa.grid.interior_mask(exclude_boundary)
    edges = np.geomspace(near[0], near[1], nshells + 1)
    logq, logk, skipped = [], [], []
    for lo, hi, msk in zip(edges[:-1], edges[1:], shells(q, edges)):
        msk &= interior
        if msk.sum() < min_count:
            skipped.append([float(lo), float(hi), int(msk.sum())])
            continue
        logq.append(np.log(np.sqrt(lo * hi)))
        logk.append(np.log(a[msk].max()))
    report = {
        "near_bound": -(Q + m) / rho,
        "skipped_shells": skipped,
        "partial": bool(skipped),
    }
    if len(logq) >= 2:
        slope, ci = _fit_slope(np.array(logq), np.array(logk))
        report.update(near_slope=slope, near_slope_ci=list(ci))
    else:
        report.update(near_slope=None, near_slope_ci=None, partial=True)
    far = interior & (q >= 1.0)
    shell = interior & (np.abs(q - probe) <= probe_halfwidth)
    CM, margin = {}, {}
    for M in orders:
        CM[str(M)] = float(np.max(a[far] * q[far] ** M)) if far.any() else None
        if shell.any() and CM[str(M)] is not None:
            margin[str(M)] = CM[str(M)] * probe**-M - float(a[shell].max())
        else:
            margin[str(M)] = None
    report.update(CM=CM, margin=margin, probe=probe, probe_count=int(shell.sum()))
    return report


# --- L^2 norm -------------------------------------------------------------------


def l2_norm_estimate(sigma: Symbol, grid: GroupGrid, iterations: int = 8, seed: int = 0, threads=None, start=None):
    """Power iteration on T^* T for T = Op(sigma) (broadcast symbols).

    Returns the estimate sqrt(<T^*T v, v>), the Rayleigh-quotient history,
    the last relative change and a convergence flag (change <= 0.05).
    """
    if iterations < 8:
        raise ValueError("need at least 8 iterations")
    sig_star = adjoint(sigma)
    if start is None:
        rng = np.random.default_rng(seed)
        coords = grid.coords()
        env = np.exp(-0.5 * sum((c / 2.0) ** 2 for c in coords))
        v = env * (rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape))
        v = SampledFunction(grid, v)
        # smooth the random start through the symbol-free roundtrip
        v = op_apply(_identity_like(sigma), v, threads)
    else:
        v = start
    v = v * (1.0 / v.norm())
    history = []
    for _ in range(iterations):
        w = op_apply(sig_star, op_apply(sigma, v, threads), threads)
        rq = float(w.inner(v).real)
        history.append(rq)
        nw = w.norm()
        if nw == 0:
            break
        v = w * (1.0 / nw)
    est = float(np.sqrt(max(history[-1], 0.0)))
    change = abs(history[-1] - history[-2]) / abs(history[-1]) if len(history) > 1 and history[-1] else 0.0
    return {
        "estimate": est,
        "rayleigh": history,
        "relative_change": change,
        "converged": change <= 0.05,
        "monotone": bool(np.all(np.diff(history) >= -1e-12 * max(abs(history[-1]), 1.0))),
    }


def _identity_like(sigma: Symbol) -> Symbol:
    from .symbols import identity_symbol

    return identity_symbol(sigma.fg)
