"""Box grids on the group, sampled functions, finite differences and file I/O."""

from __future__ import annotations

import csv
import itertools
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .structure import GradedStructure, eval_polynomial, left_invariant_field_coeffs

BOUNDARY_TOL = 1e-8
MAGIC = b"GPDOFN1\0"


@dataclass(frozen=True)
class GroupGrid:
    """Cell-centred product grid on [-L, L]^n with uniform (periodic trapezoidal) weights.

    Nodes are ``-L + (j + 1/2) h`` with ``h = 2L / P``; the origin is a node
    exactly when ``P`` is odd.
    """

    n: int
    L: float
    P: int

    def __post_init__(self):
        if self.n < 1 or self.P < 5 or self.L <= 0:
            raise ValueError(f"invalid grid n={self.n} L={self.L} P={self.P}")

    @property
    def h(self) -> float:
        return 2.0 * self.L / self.P

    @property
    def axis(self) -> np.ndarray:
        return -self.L + (np.arange(self.P) + 0.5) * self.h

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.P,) * self.n

    @property
    def cell(self) -> float:
        """Quadrature weight of every node."""
        return self.h**self.n

    @property
    def weights(self) -> np.ndarray:
        return np.full(self.shape, self.cell)

    def coords(self) -> list[np.ndarray]:
        return list(np.meshgrid(*([self.axis] * self.n), indexing="ij"))

    def points(self) -> np.ndarray:
        """All nodes as an array of shape (P**n, n) in C order."""
        return np.stack([c.ravel() for c in self.coords()], axis=-1)

    def boundary_mask(self) -> np.ndarray:
        m = np.zeros(self.shape, dtype=bool)
        for ax in range(self.n):
            idx = [slice(None)] * self.n
            idx[ax] = 0
            m[tuple(idx)] = True
            idx[ax] = -1
            m[tuple(idx)] = True
        return m

    def interior_mask(self, depth: int = 2) -> np.ndarray:
        m = np.ones(self.shape, dtype=bool)
        for ax in range(self.n):
            idx = [slice(None)] * self.n
            idx[ax] = slice(0, depth)
            m[tuple(idx)] = False
            idx[ax] = slice(self.P - depth, None)
            m[tuple(idx)] = False
        return m

    def sample(self, func) -> "SampledFunction":
        return SampledFunction(self, np.asarray(func(*self.coords()), dtype=complex))

    def zeros(self) -> "SampledFunction":
        return SampledFunction(self, np.zeros(self.shape, dtype=complex))

    def with_L(self, L: float) -> "GroupGrid":
        """Same spacing on an enlarged (or reduced) box."""
        P = int(round(self.P * L / self.L))
        return GroupGrid(self.n, self.h * P / 2.0, P)


@dataclass
class SampledFunction:
    grid: GroupGrid
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != self.grid.shape:
            raise ValueError(f"values shape {self.values.shape} does not match grid {self.grid.shape}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("sampled function has non-finite values")

    @property
    def boundary_max(self) -> float:
        return float(np.max(np.abs(self.values[self.grid.boundary_mask()])))

    @property
    def boundary_flag(self) -> bool:
        """True when the function does not decay below tolerance on the boundary shell."""
        return self.boundary_max > BOUNDARY_TOL

    def norm(self) -> float:
        return float(np.sqrt(self.grid.cell * np.sum(np.abs(self.values) ** 2)))

    def inner(self, other: "SampledFunction") -> complex:
        """<self, other> = sum w f conj(g)."""
        return complex(self.grid.cell * np.vdot(other.values, self.values))

    def _new(self, values, **meta) -> "SampledFunction":
        return SampledFunction(self.grid, values, {**self.meta, **meta})

    def __add__(self, other):
        return self._new(self.values + other.values)

    def __sub__(self, other):
        return self._new(self.values - other.values)

    def __mul__(self, c):
        if isinstance(c, SampledFunction):
            return self._new(self.values * c.values)
        return self._new(self.values * c)

    __rmul__ = __mul__

    def conj(self) -> "SampledFunction":
        return self._new(np.conj(self.values))


def rel_l2(f: SampledFunction, ref: SampledFunction, mask=None) -> float:
    d = f.values - ref.values
    r = ref.values
    if mask is not None:
        d, r = d[mask], r[mask]
    return float(np.linalg.norm(d) / np.linalg.norm(r))


def partial(f: SampledFunction, axis: int) -> np.ndarray:
    """d/dx_axis by 4th-order central differences; 2nd order on the two outer layers."""
    v = np.moveaxis(f.values, axis, 0)
    h = f.grid.h
    d = np.empty_like(v)
    d[2:-2] = (-v[4:] + 8 * v[3:-1] - 8 * v[1:-3] + v[:-4]) / (12 * h)
    d[1] = (v[2] - v[0]) / (2 * h)
    d[-2] = (v[-1] - v[-3]) / (2 * h)
    d[0] = (-3 * v[0] + 4 * v[1] - v[2]) / (2 * h)
    d[-1] = (3 * v[-1] - 4 * v[-2] + v[-3]) / (2 * h)
    return np.moveaxis(d, 0, axis)


def apply_field(s: GradedStructure, j: int, f: SampledFunction) -> SampledFunction:
    """Left-invariant vector field X_j (0-based) applied to samples."""
    coords = f.grid.coords()
    out = np.zeros_like(f.values)
    for k, poly in enumerate(left_invariant_field_coeffs(s, j)):
        if poly:
            out += eval_polynomial(poly, coords) * partial(f, k)
    return f._new(out)


def apply_X_beta(s: GradedStructure, beta, f: SampledFunction) -> SampledFunction:
    """X^beta f = X_1^b1 (X_2^b2 ( ... X_n^bn f)); the rightmost factor acts first."""
    beta = tuple(int(b) for b in beta)
    if len(beta) != s.n:
        raise ValueError(f"multi-index {beta} has wrong length for n={s.n}")
    out = f._new(f.values.copy(), boundary_warning=f.boundary_flag)
    for j in reversed(range(s.n)):
        for _ in range(beta[j]):
            out = apply_field(s, j, out)
    return out


def monomial_multiply(alpha, f: SampledFunction) -> SampledFunction:
    out = f.values.copy()
    for x, a in zip(f.grid.coords(), alpha):
        if a:
            out = out * x**a
    return f._new(out)


def write_csv(f: SampledFunction, path) -> None:
    pts = f.grid.points()
    vals = f.values.ravel()
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([f"x{i + 1}" for i in range(f.grid.n)] + ["re", "im"])
        for p, v in zip(pts, vals):
            w.writerow([repr(float(c)) for c in p] + [repr(float(v.real)), repr(float(v.imag))])


def read_csv(path) -> SampledFunction:
    with open(path) as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], np.array(rows[1:], dtype=float)
    n = len(header) - 2
    P = int(round(len(body) ** (1.0 / n)))
    axis = np.unique(body[:, 0])
    h = axis[1] - axis[0]
    grid = GroupGrid(n, P * h / 2.0, P)
    if not np.allclose(grid.points(), body[:, :n], atol=1e-9 * grid.L):
        raise ValueError(f"{path}: nodes do not form a cell-centred box grid in C order")
    return SampledFunction(grid, (body[:, n] + 1j * body[:, n + 1]).reshape(grid.shape))


def write_binary(f: SampledFunction, path) -> None:
    header = MAGIC + struct.pack("<HHf", f.grid.n, f.grid.P, f.grid.L)
    Path(path).write_bytes(header + np.ascontiguousarray(f.values, dtype="<c16").tobytes())


def read_binary(path) -> SampledFunction:
    raw = Path(path).read_bytes()
    if raw[:8] != MAGIC:
        raise ValueError(f"{path}: bad magic {raw[:8]!r}")
    n, P, L = struct.unpack("<HHf", raw[8:16])
    grid = GroupGrid(n, float(L), P)
    vals = np.frombuffer(raw[16:], dtype="<c16")
    if vals.size != P**n:
        raise ValueError(f"{path}: expected {P ** n} values, found {vals.size}")
    return SampledFunction(grid, vals.reshape(grid.shape).astype(complex))


def shells(norms: np.ndarray, edges) -> list[np.ndarray]:
    """Index masks of the homogeneous-norm shells [edges[i], edges[i+1])."""
    return [(norms >= a) & (norms < b) for a, b in itertools.pairwise(edges)]
