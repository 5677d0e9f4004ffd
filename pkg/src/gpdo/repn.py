"""Schrodinger representations of H^1, abelian characters and Rockland spectral calculus.

Convention for the Heisenberg group (basis X, Y, T with [X, Y] = T):

    pi_l(X) = d/du,   pi_l(Y) = i l u,   pi_l(T) = i l,

on L^2(R), written in the |l|-scaled Hermite basis e_k(u) = |l|^(1/4) h_k(sqrt|l| u).
In this basis pi_l(exp(xX + yY + tT)) = exp(i l t) D(alpha) with D the
harmonic-oscillator displacement operator and
alpha = sqrt(|l| / 2) (-x + i sgn(l) y).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.linalg import expm

from . import kernels

C_PLANCHEREL = (2.0 * np.pi) ** -2


class RepresentationError(ValueError):
    pass


def tail_buffer(N: int) -> int:
    return math.ceil(0.2 * (N + 1))


@dataclass(frozen=True)
class RocklandSpec:
    kind: str = "sublaplacian"
    nu: int = 2

    def __post_init__(self):
        if self.kind not in ("sublaplacian", "graded_powers", "laplacian"):
            raise RepresentationError(f"unknown Rockland operator {self.kind!r}")
        if self.nu <= 0 or self.nu % 2:
            raise RepresentationError("Rockland degree must be even and positive")


SUBLAPLACIAN = RocklandSpec("sublaplacian", 2)
GRADED_POWERS = RocklandSpec("graded_powers", 4)
LAPLACIAN = RocklandSpec("laplacian", 2)


@dataclass
class FrequencyGrid:
    """Discretised unitary dual: quadrature nodes with Plancherel weights.

    Heisenberg backend: ``nodes`` are nonzero lambda values (symmetric about 0)
    and ``weights`` include the density c_P |lambda|; every node carries an
    (N+1) x (N+1) matrix. Abelian backend: ``nodes`` has shape (K, n) on the
    lattice dual to a GroupGrid and every node carries a 1 x 1 matrix.
    """

    backend: str
    nodes: np.ndarray
    weights: np.ndarray
    N: int = 0
    spec: RocklandSpec = SUBLAPLACIAN
    params: dict = field(default_factory=dict)
    cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        self.nodes = np.asarray(self.nodes, dtype=float)
        self.weights = np.asarray(self.weights, dtype=float)
        if self.backend == "heisenberg":
            if np.any(self.nodes == 0):
                raise RepresentationError("lambda = 0 is not in the support of the Plancherel measure")
            if self.B >= self.N + 1:
                raise RepresentationError("tail buffer leaves no retained block")
        if np.any(self.weights <= 0):
            raise RepresentationError("quadrature weights must be positive")

    @property
    def size(self) -> int:
        return len(self.nodes)

    @property
    def dim(self) -> int:
        return self.N + 1

    @property
    def B(self) -> int:
        return tail_buffer(self.N) if self.backend == "heisenberg" else 0

    @property
    def retained(self) -> int:
        return self.dim - self.B

    def with_spec(self, spec: RocklandSpec) -> "FrequencyGrid":
        return FrequencyGrid(self.backend, self.nodes, self.weights, self.N, spec, dict(self.params))

    def refined(self, level: int = 1) -> "FrequencyGrid":
        """Per level: N grows by a fifth, lambda_min halves and two panels are added.

        lambda_max is left alone: it is capped by the t-Nyquist frequency of
        the group grid, beyond which the t-quadrature aliases.
        """
        if self.backend != "heisenberg" or level == 0:
            return self
        p = dict(self.params)
        for _ in range(level):
            p["lambda_min"] /= 2.0
            p["panels"] += 2
            p["N"] += p["N"] // 5
        return heisenberg_grid(**p, spec=self.spec)

    def to_dict(self) -> dict:
        return {"backend": self.backend, **self.params, "rockland": self.spec.kind}

    def generators(self) -> np.ndarray:
        """pi(X_j) at every node, shape (3, nodes, dim, dim) (Heisenberg only)."""
        if "gen" not in self.cache:
            self.cache["gen"] = np.stack(
                [np.stack([generator_matrix(l, j, self.N) for l in self.nodes]) for j in range(3)]
            )
        return self.cache["gen"]

    def spectrum(self):
        """Rockland eigenvalues (nodes, dim) and eigenvectors (None on diagonal backends)."""
        key = ("spec", self.spec)
        if key not in self.cache:
            if self.backend == "abelian":
                self.cache[key] = (np.sum(self.nodes**2, axis=1)[:, None], None)
            else:
                pairs = [rockland_spectrum(l, self.spec, self.N) for l in self.nodes]
                w = np.stack([p[0] for p in pairs])
                v = None if pairs[0][1] is None else np.stack([p[1] for p in pairs])
                self.cache[key] = (w, v)
        return self.cache[key]

    def multiplier_field(self, phi) -> np.ndarray:
        """phi(pi(R)) at every node, shape (nodes, dim, dim); phi acts on eigenvalues."""
        w, v = self.spectrum()
        d = np.asarray(phi(w), dtype=complex)
        if v is None:
            out = np.zeros(d.shape + (d.shape[-1],), dtype=complex)
            idx = np.arange(d.shape[-1])
            out[:, idx, idx] = d
            return out
        return np.einsum("lij,lj,lkj->lik", v, d, v.conj())

    def power_field(self, gamma: float) -> np.ndarray:
        """pi(I + R)^gamma at every node."""
        return self.multiplier_field(lambda mu: (1.0 + mu) ** gamma)


BASELINE = dict(lambda_min=1e-3, lambda_max=8.0, panels=12, nodes_per_panel=5, N=160, max_panel_width=0.5)
LIGHT = dict(lambda_min=0.05, lambda_max=8.0, panels=8, nodes_per_panel=4, N=24, max_panel_width=0.5)


def heisenberg_grid(
    lambda_min: float = BASELINE["lambda_min"],
    lambda_max: float = BASELINE["lambda_max"],
    panels: int = BASELINE["panels"],
    nodes_per_panel: int = BASELINE["nodes_per_panel"],
    N: int = BASELINE["N"],
    c_P: float = C_PLANCHEREL,
    spec: RocklandSpec = SUBLAPLACIAN,
    max_panel_width: float | None = BASELINE["max_panel_width"],
) -> FrequencyGrid:
    """Composite Gauss-Legendre on +-[lambda_min, lambda_max].

    Panel edges are geometric; panels wider than ``max_panel_width`` are split
    evenly so the rule stays exact on the oscillation e^{i lambda (t - t')}
    across the box.
    """
    if not 0 < lambda_min < lambda_max:
        raise RepresentationError("need 0 < lambda_min < lambda_max")
    edges = np.geomspace(lambda_min, lambda_max, panels + 1)
    if max_panel_width:
        parts = [np.linspace(a, b, math.ceil((b - a) / max_panel_width) + 1)[:-1] for a, b in zip(edges[:-1], edges[1:])]
        edges = np.append(np.concatenate(parts), lambda_max)
    x, w = np.polynomial.legendre.leggauss(nodes_per_panel)
    a, b = edges[:-1, None], edges[1:, None]
    pos = (0.5 * (b - a) * x + 0.5 * (b + a)).ravel()
    wpos = (0.5 * (b - a) * w).ravel()
    nodes = np.concatenate([-pos[::-1], pos])
    weights = c_P * np.abs(nodes) * np.concatenate([wpos[::-1], wpos])
    params = dict(
        lambda_min=lambda_min,
        lambda_max=lambda_max,
        panels=panels,
        nodes_per_panel=nodes_per_panel,
        N=N,
        c_P=c_P,
        max_panel_width=max_panel_width,
    )
    return FrequencyGrid("heisenberg", nodes, weights, N, spec, params)


def abelian_grid(grid) -> FrequencyGrid:
    """Frequency lattice dual to a cell-centred GroupGrid: spacing pi / L, P points per axis."""
    dxi = np.pi / grid.L
    axis = (np.arange(grid.P) - grid.P // 2) * dxi
    mesh = np.meshgrid(*([axis] * grid.n), indexing="ij")
    nodes = np.stack([m.ravel() for m in mesh], axis=-1)
    weights = np.full(len(nodes), (dxi / (2.0 * np.pi)) ** grid.n)
    return FrequencyGrid("abelian", nodes, weights, 0, LAPLACIAN, {"L": grid.L, "P": grid.P, "n": grid.n})


def load_frequency_grid(doc: dict | str | Path, grid=None) -> FrequencyGrid:
    if not isinstance(doc, dict):
        doc = json.loads(Path(doc).read_text())
    doc = dict(doc)
    backend = doc.pop("backend", "heisenberg")
    if backend == "abelian":
        if grid is None:
            raise RepresentationError("abelian frequency grid needs the group grid")
        return abelian_grid(grid)
    kind = doc.pop("rockland", "sublaplacian")
    spec = SUBLAPLACIAN if kind == "sublaplacian" else GRADED_POWERS
    allowed = {"lambda_min", "lambda_max", "panels", "nodes_per_panel", "N", "c_P", "max_panel_width"}
    unknown = set(doc) - allowed
    if unknown:
        raise RepresentationError(f"unknown frequency-grid fields: {sorted(unknown)}")
    return heisenberg_grid(**doc, spec=spec)


# --- ladder matrices -------------------------------------------------------


def _check_lambda(lam: float):
    if lam == 0:
        raise RepresentationError("lambda = 0 is not in the support of the Plancherel measure")


def position_matrix(lam: float, dim: int) -> np.ndarray:
    """Matrix of multiplication by u in the scaled Hermite basis."""
    _check_lambda(lam)
    off = np.sqrt(np.arange(1, dim) / (2.0 * abs(lam)))
    return np.diag(off, 1) + np.diag(off, -1)


def derivative_matrix(lam: float, dim: int) -> np.ndarray:
    """Matrix of d/du in the scaled Hermite basis."""
    _check_lambda(lam)
    off = np.sqrt(abs(lam) * np.arange(1, dim) / 2.0)
    return np.diag(off, 1) - np.diag(off, -1)


def generator_matrix(lam: float, j: int, N: int) -> np.ndarray:
    """pi_lambda(X_j) truncated to (N+1) x (N+1); j = 0, 1, 2 for X, Y, T."""
    dim = N + 1
    if j == 0:
        return derivative_matrix(lam, dim).astype(complex)
    if j == 1:
        return 1j * lam * position_matrix(lam, dim)
    if j == 2:
        _check_lambda(lam)
        return 1j * lam * np.eye(dim)
    raise RepresentationError(f"generator index {j} out of range")


def rockland_matrix(lam: float, spec: RocklandSpec, N: int) -> np.ndarray:
    """pi_lambda(R) on the first N+1 Hermite functions (exact compression)."""
    _check_lambda(lam)
    dim = N + 1
    if spec.kind in ("sublaplacian", "laplacian"):
        return np.diag(abs(lam) * (2.0 * np.arange(dim) + 1.0)).astype(complex)
    # X^4 + Y^4 - T^2, built on an enlarged block so the compression is exact
    big = dim + 4
    A = derivative_matrix(lam, big)
    Bm = 1j * lam * position_matrix(lam, big)
    A2, B2 = A @ A, Bm @ Bm
    R = A2 @ A2 + B2 @ B2 + lam**2 * np.eye(big)
    return R[:dim, :dim].astype(complex)


def rockland_spectrum(lam: float, spec: RocklandSpec, N: int):
    """Eigenvalues and eigenvectors (None when diagonal) of pi_lambda(R)."""
    if spec.kind in ("sublaplacian", "laplacian"):
        return abs(lam) * (2.0 * np.arange(N + 1) + 1.0), None
    R = rockland_matrix(lam, spec, N)
    w, v = np.linalg.eigh(0.5 * (R + R.conj().T))
    return w, v


def spectral_power(lam: float, spec: RocklandSpec, gamma: float, N: int) -> np.ndarray:
    """pi_lambda(I + R)^gamma by the spectral theorem."""
    w, v = rockland_spectrum(lam, spec, N)
    d = (1.0 + w) ** gamma
    if v is None:
        return np.diag(d).astype(complex)
    return (v * d) @ v.conj().T


def group_rep_matrix(lam: float, g, N: int) -> np.ndarray:
    """exp(x pi(X) + y pi(Y) + t pi(T)) of the truncated generators (scaling and squaring).

    Exactly unitary; agrees with the true representation on the retained
    block for moderate |alpha|. See :func:`schrodinger_matrix` for the exact
    compression used by the Fourier transform.
    """
    x, y, t = (float(v) for v in g)
    Z = x * generator_matrix(lam, 0, N) + y * generator_matrix(lam, 1, N) + t * generator_matrix(lam, 2, N)
    return expm(Z)


def displacement_alpha(lam: float, x, y):
    return np.sqrt(abs(lam) / 2.0) * (-np.asarray(x) + 1j * np.sign(lam) * np.asarray(y))


def schrodinger_matrix(lam: float, g, N: int) -> np.ndarray:
    """Exact matrix elements <e_k, pi_lambda(g) e_j>, k, j = 0..N (Laguerre closed form)."""
    _check_lambda(lam)
    x, y, t = (float(v) for v in g)
    alpha = displacement_alpha(lam, x, y)
    return np.exp(1j * lam * t) * kernels.displacement_matrix(complex(alpha), N)


def abelian_character(xi, x) -> complex:
    return complex(np.exp(1j * np.dot(np.asarray(xi, float), np.asarray(x, float))))
