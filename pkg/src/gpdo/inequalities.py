"""Sobolev norms, sharp Garding scans and resolvent-based decay evidence.

Sobolev norms are evaluated on the dual side,

    ||f||_{L^2_a}^2 = sum_lambda w tr(F^* pi(I+R)^(2a/nu) F),   F = f^,

which is exactly monotone in ``a`` because the spectral weights are >= 1.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np

from . import fourier
from .grid import GroupGrid, SampledFunction, apply_X_beta
from .quantizer import op_apply
from .repn import FrequencyGrid
from .structure import heisenberg1, homogeneous_norm
from .symbols import Symbol, SymbolError, _sandwich, _structure_for, from_multiplier


class HypothesisError(SymbolError):
    """A symbol fails the positivity or spectral-commutation hypothesis."""


def sobolev_norm(f: SampledFunction, a: float, fg: FrequencyGrid, F: fourier.FourierField | None = None) -> float:
    """||(I+R)^(a/nu) f||_{L^2} through the Plancherel pairing."""
    F = fourier.forward(f, fg) if F is None else F
    G = _sandwich(fg, a / fg.spec.nu, F.mats, 0.0)
    return float(np.sqrt(max(fourier.plancherel_pairing(fourier.FourierField(fg, G), fourier.FourierField(fg, G)).real, 0.0)))


def apply_I_plus_R(f: SampledFunction, method: str = "fd") -> SampledFunction:
    """f - X^2 f - Y^2 f for the Heisenberg sub-Laplacian.

    Parameters
    ----------
    f : SampledFunction
        Samples on a 3-dimensional grid.
    method : {"fd", "spectral"}
        ``"fd"`` uses the 4th-order stencils of :func:`apply_X_beta`.
        ``"spectral"`` differentiates with the periodic FFT along each axis,
        which is spectrally accurate once f has decayed at the box edge.
    """
    if method == "fd":
        s = heisenberg1()
        return f - apply_X_beta(s, (2, 0, 0), f) - apply_X_beta(s, (0, 2, 0), f)
    if method != "spectral":
        raise ValueError(f"unknown method {method!r}")
    g = f.grid
    k = 2.0 * np.pi * np.fft.fftfreq(g.P, d=g.h)

    def d(v, ax):
        shape = [1, 1, 1]
        shape[ax] = g.P
        return np.fft.ifft(1j * k.reshape(shape) * np.fft.fft(v, axis=ax), axis=ax)

    x, y, _ = g.coords()
    X = lambda v: d(v, 0) - 0.5 * y * d(v, 2)  # noqa: E731
    Y = lambda v: d(v, 1) + 0.5 * x * d(v, 2)  # noqa: E731
    v = f.values
    return SampledFunction(g, v - X(X(v)) - Y(Y(v)), dict(f.meta))


# --- hypothesis checks -----------------------------------------------------------


def positivity_check(sigma: Symbol, tol: float = 1e-10) -> dict:
    """Smallest eigenvalue of the Hermitian part of sigma(x, lambda) on the retained block."""
    r = sigma.fg.retained
    lo = np.inf
    for row in sigma.coefficient_rows():
        M = sigma.at_row(row)[:, :r, :r]
        H = 0.5 * (M + np.conj(np.swapaxes(M, -1, -2)))
        lo = min(lo, float(np.min(np.linalg.eigvalsh(H))))
    return {"passed": lo >= -tol, "min_eigenvalue": lo, "tol": tol}


def commutation_check(sigma: Symbol, tol: float = 1e-10) -> dict:
    """Off-diagonal mass and ||[sigma, pi(R)]|| on the retained block, maximised over nodes.

    On the sublaplacian backend pi(R) is diagonal with simple spectrum, so
    commuting with its spectral measure is the same as being diagonal.
    """
    fg = sigma.fg
    r = fg.retained
    w, v = fg.spectrum()
    offd, comm = 0.0, 0.0
    for row in sigma.coefficient_rows():
        M = sigma.at_row(row)
        if v is None:
            Mr = M[:, :r, :r]
            od = Mr.copy()
            idx = np.arange(r)
            od[:, idx, idx] = 0
            offd = max(offd, float(np.max(np.abs(od), initial=0.0)))
            C = Mr * (w[:, None, :r] - w[:, :r, None])
        else:
            # work in the eigenbasis of pi(R)
            Me = np.conj(np.swapaxes(v, -1, -2)) @ M @ v
            od = Me.copy()
            idx = np.arange(fg.dim)
            od[:, idx, idx] = 0
            offd = max(offd, float(np.max(np.abs(od[:, :r, :r]), initial=0.0)))
            C = (Me * (w[:, None, :] - w[:, :, None]))[:, :r, :r]
        comm = max(comm, float(np.max(np.linalg.norm(C, ord=2, axis=(1, 2)), initial=0.0)))
    return {"passed": max(offd, comm) <= tol, "offdiagonal": offd, "commutator": comm, "tol": tol}


# --- Garding -------------------------------------------------------------------------


@dataclass
class GardingReport:
    symbol: str
    m: float
    rho: float
    delta: float
    s: float
    s_strong: float
    positivity: dict
    commutation: dict
    re_form: list = field(default_factory=list)
    sobolev_sq: list = field(default_factory=list)
    sobolev_strong_sq: list = field(default_factory=list)
    l2_sq: list = field(default_factory=list)
    train: int = 0
    C_est: float = 0.0
    inflation: float = 1.05
    violations: int = 0
    multiplier_nonnegative: bool | None = None
    strong_ratio_max: float = 0.0
    seed: int = 0

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self, path=None) -> str:
        txt = json.dumps(self.to_dict(), indent=2)
        if path is not None:
            with open(path, "w") as fh:
                fh.write(txt)
        return txt

    def summary(self) -> str:
        held = len(self.re_form) - self.train
        lines = [
            f"{'symbol':<12}{self.symbol}",
            f"{'order m':<12}{self.m:g}   rho={self.rho:g} delta={self.delta:g}   s={self.s:g}",
            f"{'positivity':<12}{self.positivity['min_eigenvalue']:+.3e}",
            f"{'commutator':<12}{max(self.commutation['offdiagonal'], self.commutation['commutator']):.3e}",
            f"{'C_est':<12}{self.C_est:.6e}   (train {self.train}, held-out {held})",
            f"{'violations':<12}{self.violations}",
        ]
        return "\n".join(lines)


def trial_function(grid: GroupGrid, seed: int, index: int) -> SampledFunction:
    """Modulated Gaussian e^{i theta.x} e^{-|(x - x0)/w|^2 / 2}; parameters depend only on (seed, index)."""
    rng = np.random.default_rng([seed, index])
    theta = rng.uniform(-2.0, 2.0, grid.n)
    x0 = rng.uniform(-1.0, 1.0, grid.n)
    w = rng.uniform(0.5, 0.8, grid.n)
    coords = grid.coords()
    phase = sum(th * c for th, c in zip(theta, coords))
    env = sum(((c - c0) / ww) ** 2 for c, c0, ww in zip(coords, x0, w))
    return SampledFunction(grid, np.exp(1j * phase - 0.5 * env))


def garding_scan(sigma: Symbol, grid: GroupGrid, trials: int = 200, seed: int = 0, train_fraction: float = 0.5,
                 inflation: float = 1.05, tol: float = 1e-9, threads=None) -> GardingReport:
    """Estimate C in Re<Op(sigma) f, f> >= -C ||f||^2_{L^2_s}, s = (m - (rho - delta))/2.

    The first ``train_fraction`` of the trials fix C_est; the rest are held
    out and counted as violations when Re<Tf, f> < -(inflation C_est + tol) ||f||_s^2.
    """
    pos = positivity_check(sigma)
    com = commutation_check(sigma)
    if not (pos["passed"] and com["passed"]):
        raise HypothesisError(f"{sigma.name}: positivity {pos['min_eigenvalue']:.3e}, "
                              f"commutator {max(com['offdiagonal'], com['commutator']):.3e}")
    fg = sigma.fg
    s = (sigma.m - (sigma.rho - sigma.delta)) / 2.0
    rep = GardingReport(sigma.name, sigma.m, sigma.rho, sigma.delta, s, sigma.m / 2.0, pos, com,
                        inflation=inflation, seed=seed)
    for i in range(trials):
        f = trial_function(grid, seed, i)
        F = fourier.forward(f, fg, threads)
        Tf = op_apply(sigma, f, threads, F=F)
        rep.re_form.append(float(Tf.inner(f).real))
        rep.sobolev_sq.append(sobolev_norm(f, s, fg, F) ** 2)
        rep.sobolev_strong_sq.append(sobolev_norm(f, sigma.m / 2.0, fg, F) ** 2)
        rep.l2_sq.append(f.norm() ** 2)
    re, sob = np.array(rep.re_form), np.array(rep.sobolev_sq)
    rep.train = int(round(trials * train_fraction))
    rep.C_est = float(max(0.0, np.max(-re[: rep.train] / sob[: rep.train], initial=0.0)))
    held = slice(rep.train, None)
    rep.violations = int(np.sum(re[held] < -(inflation * rep.C_est + tol) * sob[held]))
    rep.strong_ratio_max = float(np.max(-re / np.array(rep.sobolev_strong_sq)))
    if sigma.broadcast:
        rep.multiplier_nonnegative = bool(np.all(re >= -tol * np.array(rep.l2_sq)))
    return rep


# --- resolvent and decay ---------------------------------------------------------------


def resolvent_apply(f: SampledFunction, fg: FrequencyGrid, threads=None) -> SampledFunction:
    """u = Op((I + pi(R))^-1) f, the exact inverse of I + R as a multiplier."""
    return op_apply(from_multiplier("resolvent", fg), f, threads)


@dataclass
class DecayProfile:
    L: list
    betas: list
    Ms: list
    weighted: dict  # "beta|M" -> list over boxes
    boundary_max: list
    enlargement: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def schwartz_decay_report(us, betas=((0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)), Ms=(0, 2, 4, 6)) -> DecayProfile:
    """Weighted sup norms sup (1+|x|)^M |X^beta u| over one or more boxes.

    ``us`` is a SampledFunction or a sequence of them on growing boxes; the
    enlargement entries are ratios between the first and the last box
    (boundary max: first / last, weighted sups: last / first).
    """
    if isinstance(us, SampledFunction):
        us = [us]
    s = _structure_for_grid(us[0].grid)
    prof = DecayProfile([u.grid.L for u in us], [list(b) for b in betas], list(Ms), {}, [u.boundary_max for u in us])
    for u in us:
        q = homogeneous_norm(s, u.grid.points()).reshape(u.grid.shape)
        for b in betas:
            v = np.abs(apply_X_beta(s, b, u).values)
            for M in Ms:
                prof.weighted.setdefault(f"{tuple(b)}|{M}", []).append(float(np.max((1.0 + q) ** M * v)))
    if len(us) > 1:
        b0, b1 = prof.boundary_max[0], prof.boundary_max[-1]
        prof.enlargement["boundary_shrink"] = b0 / b1 if b1 > 0 else (np.inf if b0 > 0 else 1.0)
        for k, vals in prof.weighted.items():
            prof.enlargement[k] = vals[-1] / vals[0] if vals[0] > 0 else (1.0 if vals[-1] == 0 else np.inf)
    return prof


def _structure_for_grid(grid: GroupGrid):
    if grid.n == 3:
        return heisenberg1()
    from .structure import abelian

    return abelian(grid.n)
