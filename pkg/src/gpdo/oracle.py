"""Brute-force Kohn-Nirenberg quantization on R^n with numpy's FFT.

Used as an independent reference for the abelian backend: nothing here
touches the frequency-grid or symbol machinery.

Lattice conventions (shared with the abelian backend): cell-centred nodes
x_j = -L + (j + 1/2) h, h = 2L/P, and frequencies xi_k = k pi / L for
k = -P/2 .. P/2 - 1, with

    f^(xi) = h^n sum_x f(x) e^{-i x.xi},
    a(x, D) f(x) = (dxi / 2 pi)^n sum_xi e^{i x.xi} p(x, xi) f^(xi).
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from .grid import GroupGrid, SampledFunction


@dataclass
class EuclideanSymbol:
    """p(x, xi) as a vectorised callable ``func(x, xi)``.

    ``x`` and ``xi`` are lists of n arrays that broadcast against each other.
    Set ``x_dependent=False`` when p depends on xi only; the FFT path is then used.
    """

    func: Callable
    m: float = 0.0
    x_dependent: bool = True
    name: str = "p"


def xi_axis(grid: GroupGrid) -> np.ndarray:
    return (np.arange(grid.P) - grid.P // 2) * (np.pi / grid.L)


def fft_forward(f: SampledFunction) -> np.ndarray:
    """f^ on the frequency lattice, axes in increasing xi."""
    g = f.grid
    xi = xi_axis(g)
    v = np.fft.fftshift(np.fft.fftn(f.values), axes=tuple(range(g.n)))
    # shift the origin of x from node 0 to -L + h/2
    ph = np.exp(-1j * xi * (g.axis[0]))
    for ax in range(g.n):
        shape = [1] * g.n
        shape[ax] = g.P
        v = v * ph.reshape(shape)
    return v * g.h**g.n


def fft_inverse(vals: np.ndarray, grid: GroupGrid) -> np.ndarray:
    xi = xi_axis(grid)
    ph = np.exp(1j * xi * grid.axis[0])
    v = vals.astype(complex)
    for ax in range(grid.n):
        shape = [1] * grid.n
        shape[ax] = grid.P
        v = v * ph.reshape(shape)
    v = np.fft.ifftn(np.fft.ifftshift(v, axes=tuple(range(grid.n))))
    # ifftn carries 1/P^n; the lattice weight is (dxi / 2pi)^n = (1 / (P h))^n
    return v / grid.h**grid.n


def kn_quantize(p: EuclideanSymbol, f: SampledFunction) -> SampledFunction:
    """a(x, D) f on the lattice of ``f``."""
    g = f.grid
    F = fft_forward(f)
    xi1 = xi_axis(g)
    if not p.x_dependent:
        xi = np.meshgrid(*([xi1] * g.n), indexing="ij")
        pv = np.broadcast_to(p.func(None, xi), F.shape)
        return SampledFunction(g, fft_inverse(pv * F, g))
    xs = [c.ravel()[:, None] for c in g.coords()]
    xi = [c.ravel()[None, :] for c in np.meshgrid(*([xi1] * g.n), indexing="ij")]
    phase = np.exp(1j * sum(a * b for a, b in zip(xs, xi)))
    pv = np.broadcast_to(p.func(xs, xi), phase.shape)
    w = (np.pi / g.L / (2.0 * np.pi)) ** g.n
    out = (phase * pv) @ F.ravel() * w
    return SampledFunction(g, out.reshape(g.shape))


def xi_derivative(p: EuclideanSymbol, grid: GroupGrid, j: int, eps: float = 1e-30) -> np.ndarray:
    """i d/dxi_j p on the lattice by the complex-step method (real-analytic, real-valued p)."""
    xi1 = xi_axis(grid)
    xi = np.meshgrid(*([xi1] * grid.n), indexing="ij")
    xi_c = [c.astype(complex) for c in xi]
    xi_c[j] = xi_c[j] + 1j * eps
    return 1j * np.imag(p.func(None, xi_c)) / eps


def compare(framework: SampledFunction, oracle: SampledFunction) -> dict:
    """Relative L^2 discrepancy and per-node maximum between two pipelines."""
    d = framework.values - oracle.values
    ref = np.linalg.norm(oracle.values)
    return {
        "rel_l2": float(np.linalg.norm(d) / ref) if ref > 0 else float(np.linalg.norm(d)),
        "max_abs": float(np.max(np.abs(d))),
    }
