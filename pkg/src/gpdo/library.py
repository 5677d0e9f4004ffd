"""Named test functions on the Heisenberg box.

``tgauss`` and ``hermite4`` have vanishing low t-moments, so their
transforms vanish to second and fourth order at lambda = 0 and are
resolved by a truncated Hermite basis even where the Plancherel density
degenerates.
"""

from __future__ import annotations

import numpy as np

from .grid import GroupGrid, SampledFunction


def _g(x, y, t):
    return np.exp(-(x * x + y * y + t * t) / 2.0)


FUNCTIONS = {
    "gauss": _g,
    "tgauss": lambda x, y, t: (1.0 - t * t) * _g(x, y, t),
    "hermite4": lambda x, y, t: (t**4 - 6.0 * t * t + 3.0) * _g(x, y, t),
    "xgauss": lambda x, y, t: (1.0 + 0.3 * x) * np.exp(-(x * x + 1.2 * y * y + t * t) / 2.0),
    "inverse_square": lambda x, y, t: 1.0 / (1.0 + x * x + y * y + t * t),
}


def sample(name: str, grid: GroupGrid) -> SampledFunction:
    if name.startswith("gauss:"):
        # gauss:s, isotropic width s
        s = float(name.split(":", 1)[1])
        return grid.sample(lambda *x: np.exp(-sum(c * c for c in x) / (2.0 * s * s)))
    if name not in FUNCTIONS:
        raise KeyError(f"unknown test function {name!r}; known: {sorted(FUNCTIONS)} + gauss:s")
    return grid.sample(FUNCTIONS[name])


def manufactured_pair(grid: GroupGrid):
    """(g, f) with f = (I + R) g in closed form for g = hermite4, R = -(X^2 + Y^2).

    With r2 = x^2 + y^2:
    f = [r2 (-t^6/4 + 11 t^4/4 - 21 t^2/4 + 3/4) + 3 t^4 - 18 t^2 + 9] e^{-(r2 + t^2)/2}.
    """

    def rhs(x, y, t):
        r2 = x * x + y * y
        poly = r2 * (-(t**6) / 4.0 + 11.0 * t**4 / 4.0 - 21.0 * t * t / 4.0 + 0.75) + 3.0 * t**4 - 18.0 * t * t + 9.0
        return poly * _g(x, y, t)

    return sample("hermite4", grid), SampledFunction(grid, rhs(*grid.coords()))
