"""Graded Lie group structure in exponential coordinates of the first kind.

Points of the group are identified with coordinate vectors in R^n through the
exponential map, so the group law is the Baker-Campbell-Hausdorff product of
the Lie algebra. For step <= 3 the series terminates after the degree-3
commutators, which is all the shipped structures need.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import reduce
from pathlib import Path

import numpy as np


class StructureError(ValueError):
    """Raised for malformed structures or dimension mismatches."""


@dataclass(frozen=True)
class GradedStructure:
    """Structure constants and dilation weights of a graded Lie algebra.

    ``c[j, k, l]`` is the coefficient of ``X_l`` in ``[X_j, X_k]`` (0-based).
    """

    weights: tuple[int, ...]
    c: np.ndarray
    nu0: int
    name: str = "custom"
    step: int = field(init=False)

    def __post_init__(self):
        n = len(self.weights)
        c = np.asarray(self.c, dtype=float)
        if c.shape != (n, n, n):
            raise StructureError(f"structure constants must have shape {(n, n, n)}, got {c.shape}")
        if any(w <= 0 for w in self.weights):
            raise StructureError("weights must be positive integers")
        if list(self.weights) != sorted(self.weights):
            raise StructureError("weights must be nondecreasing (basis adapted to the gradation)")
        if any(self.nu0 % w for w in self.weights):
            raise StructureError(f"nu0={self.nu0} is not a common multiple of the weights")
        c.setflags(write=False)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "step", _nilpotency_step(c))

    @property
    def n(self) -> int:
        return len(self.weights)

    @property
    def Q(self) -> int:
        return int(sum(self.weights))

    def bracket(self, a, b):
        """Lie bracket of coordinate vectors; broadcasts over leading axes."""
        return np.einsum("jkl,...j,...k->...l", self.c, a, b)

    def ad(self, j: int) -> np.ndarray:
        """Matrix of ad(X_j) acting on coordinate vectors (column convention)."""
        return self.c[j].T

    def check(self, atol: float = 1e-12) -> dict:
        """Antisymmetry, Jacobi, gradation compatibility and nilpotency checks."""
        c = self.c
        w = np.array(self.weights)
        antisym = float(np.max(np.abs(c + c.transpose(1, 0, 2)), initial=0.0))
        # [X_i,[X_j,X_k]] + cyclic, as a rank-4 tensor
        jac = (
            np.einsum("jkm,iml->ijkl", c, c)
            + np.einsum("kim,jml->ijkl", c, c)
            + np.einsum("ijm,kml->ijkl", c, c)
        )
        jacobi = float(np.max(np.abs(jac), initial=0.0))
        nz = np.argwhere(c != 0)
        graded = all(w[l] == w[j] + w[k] for j, k, l in nz)
        nil = all(
            not np.any(np.linalg.matrix_power(self.ad(j), self.step + 1))
            for j in range(self.n)
        )
        return {
            "antisymmetry": antisym,
            "jacobi": jacobi,
            "graded": bool(graded),
            "nilpotent": bool(nil),
            "ok": antisym <= atol and jacobi <= atol and graded and nil,
        }

    def to_dict(self) -> dict:
        brackets = [
            {"j": int(j) + 1, "k": int(k) + 1, "l": int(l) + 1, "c": float(self.c[j, k, l])}
            for j, k, l in np.argwhere(self.c != 0)
            if j < k
        ]
        return {"weights": list(self.weights), "brackets": brackets, "nu0": self.nu0}


def _nilpotency_step(c: np.ndarray) -> int:
    n = c.shape[0]
    if n == 0 or not np.any(c):
        return 1
    ads = [c[j].T for j in range(n)]
    # step = smallest k such that every product of k adjoint matrices vanishes
    prods = ads
    k = 1
    while True:
        prods = [a @ p for a in ads for p in prods]
        k += 1
        if not any(np.any(p) for p in prods):
            return k
        if k > n:
            raise StructureError("structure constants are not nilpotent")


def heisenberg1() -> GradedStructure:
    c = np.zeros((3, 3, 3))
    c[0, 1, 2] = 1.0
    c[1, 0, 2] = -1.0
    return GradedStructure(weights=(1, 1, 2), c=c, nu0=2, name="heisenberg1")


def abelian(n: int) -> GradedStructure:
    if n < 1:
        raise StructureError("abelian dimension must be positive")
    return GradedStructure(weights=(1,) * n, c=np.zeros((n, n, n)), nu0=1, name=f"abelian:{n}")


def from_dict(doc: dict) -> GradedStructure:
    weights = tuple(int(w) for w in doc["weights"])
    n = len(weights)
    c = np.zeros((n, n, n))
    for br in doc.get("brackets", []):
        j, k, l = int(br["j"]) - 1, int(br["k"]) - 1, int(br["l"]) - 1
        if not all(0 <= i < n for i in (j, k, l)):
            raise StructureError(f"bracket index out of range: {br}")
        c[j, k, l] = float(br["c"])
        c[k, j, l] = -float(br["c"])
    nu0 = int(doc.get("nu0") or reduce(math.lcm, weights))
    return GradedStructure(weights=weights, c=c, nu0=nu0, name=doc.get("name", "custom"))


def load_structure(spec: str | dict | Path) -> GradedStructure:
    """Resolve a built-in name (``heisenberg1``, ``abelian:<n>``), a dict or a JSON file."""
    if isinstance(spec, dict):
        return from_dict(spec)
    spec = str(spec)
    if spec == "heisenberg1":
        return heisenberg1()
    if spec.startswith("abelian:"):
        return abelian(int(spec.split(":", 1)[1]))
    path = Path(spec)
    if path.exists():
        return from_dict(json.loads(path.read_text()))
    raise StructureError(f"unknown structure {spec!r}")


def _as_point(s: GradedStructure, a) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.shape[-1] != s.n:
        raise StructureError(f"expected points of dimension {s.n}, got shape {a.shape}")
    return a


def multiply(s: GradedStructure, a, b) -> np.ndarray:
    """Group product exp(A)exp(B) in exponential coordinates (step <= 3)."""
    a = _as_point(s, a)
    b = _as_point(s, b)
    if s.step > 3:
        raise StructureError("BCH product implemented for step <= 3 only")
    ab = s.bracket(a, b)
    out = a + b + 0.5 * ab
    if s.step >= 3:
        out = out + (s.bracket(a, ab) - s.bracket(b, ab)) / 12.0
    return out


def inverse(a) -> np.ndarray:
    return -np.asarray(a, dtype=float)


def dilate(s: GradedStructure, r: float, x) -> np.ndarray:
    if r <= 0:
        raise ValueError("dilation factor must be positive")
    x = _as_point(s, x)
    return x * np.power(float(r), np.array(s.weights, dtype=float))


def homogeneous_norm(s: GradedStructure, x) -> np.ndarray:
    """|x| = (sum_j |x_j|^(2 nu0 / w_j))^(1 / (2 nu0)), homogeneous of degree one."""
    x = _as_point(s, x)
    p = 2.0 * s.nu0 / np.array(s.weights, dtype=float)
    return np.sum(np.abs(x) ** p, axis=-1) ** (1.0 / (2.0 * s.nu0))


def homogeneous_degree(s: GradedStructure, alpha) -> int:
    alpha = tuple(int(a) for a in alpha)
    if len(alpha) != s.n or min(alpha, default=0) < 0:
        raise StructureError(f"invalid multi-index {alpha}")
    return int(sum(w * a for w, a in zip(s.weights, alpha)))


Polynomial = dict[tuple[int, ...], float]


def left_invariant_field_coeffs(s: GradedStructure, j: int) -> list[Polynomial]:
    """Coefficients p_k of X_j = sum_k p_k(x) d/dx_k, as {exponent: coefficient} maps.

    ``j`` is 0-based. Obtained by differentiating x . exp(tau X_j) at tau = 0:
    p = e_j + [x, e_j]/2 + [x, [x, e_j]]/12.
    """
    n = s.n
    if not 0 <= j < n:
        raise StructureError(f"field index {j} out of range for n={n}")
    polys: list[Polynomial] = [dict() for _ in range(n)]

    def add(k, expo, val):
        if val != 0.0:
            polys[k][expo] = polys[k].get(expo, 0.0) + val

    add(j, (0,) * n, 1.0)
    # [x, e_j]_l = sum_i c[i, j, l] x_i
    lin = s.c[:, j, :]  # (i, l)
    for i in range(n):
        e = [0] * n
        e[i] = 1
        for l in range(n):
            add(l, tuple(e), 0.5 * lin[i, l])
    if s.step >= 3:
        # [x, [x, e_j]]_l = sum_{i, i', m} c[i, m, l] c[i', j, m] x_i x_i'
        quad = np.einsum("iml,km->ikl", s.c, lin)
        for i in range(n):
            for i2 in range(n):
                e = [0] * n
                e[i] += 1
                e[i2] += 1
                for l in range(n):
                    add(l, tuple(e), quad[i, i2, l] / 12.0)
    return [{k: v for k, v in p.items() if v != 0.0} for p in polys]


def eval_polynomial(poly: Polynomial, coords: list[np.ndarray]) -> np.ndarray | float:
    out = 0.0
    for expo, val in poly.items():
        term = val
        for x, e in zip(coords, expo):
            if e:
                term = term * x**e
        out = out + term
    return out
