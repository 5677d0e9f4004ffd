import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gpdo import fourier, library, oracle
from gpdo.grid import GroupGrid, SampledFunction, apply_X_beta, rel_l2
from gpdo.inequalities import apply_I_plus_R
from gpdo.quantizer import op_apply
from gpdo.repn import LIGHT, abelian_grid, heisenberg_grid
from gpdo.structure import heisenberg1
from gpdo.symbols import from_multiplier

G24 = GroupGrid(3, 6.0, 24)


@pytest.fixture(scope="module")
def fg():
    return heisenberg_grid(**LIGHT)


def test_zero_in_zero_out(fg):
    F = fourier.forward(G24.zeros(), fg)
    assert not np.any(F.mats)
    assert not np.any(fourier.inverse(fourier.zero_field(fg), G24).values)


def test_band_limits(fg, box):
    k = fourier.band_limits(fg, box)
    expect = np.clip(np.floor(((np.pi / box.h) ** 2 / np.abs(fg.nodes) - 1) / 2), -1, fg.N)
    assert np.array_equal(k, expect)  # lambda_max = 8 is below the t-Nyquist frequency of this box
    coarse = fourier.band_limits(fg, G24)
    assert np.all(coarse[np.abs(fg.nodes) >= np.pi / G24.h - np.pi / (2 * G24.L)] == -1)
    F = fourier.forward(library.sample("tgauss", box), fg)
    assert not np.any(F.mats[~fourier.band_mask(fg, box)])


def test_roundtrip_resolvable(fg):
    f = library.sample("tgauss", G24)
    assert rel_l2(fourier.inverse(fourier.forward(f, fg), G24), f) < 1e-3


def test_parseval_improves_under_refinement(fg):
    f = library.sample("gauss", G24)
    d = [fourier.parseval_defect(f, fg.refined(k)) for k in range(3)]
    assert d[0] > d[1] > d[2]


def test_inverse_is_adjoint_of_forward(fg):
    r = np.random.default_rng(4)
    f = SampledFunction(G24, r.standard_normal(G24.shape) + 1j * r.standard_normal(G24.shape))
    M = r.standard_normal((fg.size, fg.dim, fg.dim)) + 1j * r.standard_normal((fg.size, fg.dim, fg.dim))
    F = fourier.FourierField(fg, M * fourier.band_mask(fg, G24))
    lhs = fourier.plancherel_pairing(fourier.forward(f, fg), F)
    rhs = f.inner(fourier.inverse(F, G24))
    assert abs(lhs - rhs) <= 1e-10 * abs(lhs)


def test_pairing_properties(fg):
    f = library.sample("tgauss", G24)
    h = G24.sample(lambda x, y, t: (1 - t * t) * np.exp(-((x - 0.5) ** 2 + y * y + t * t) / 2) * (1 + 0.2j * y))
    F, Hh = fourier.forward(f, fg), fourier.forward(h, fg)
    assert fourier.plancherel_pairing(fourier.zero_field(fg), Hh) == 0
    assert fourier.plancherel_pairing(F, F).real >= -1e-10
    p = fourier.plancherel_pairing(F, Hh)
    assert abs(p - f.inner(h)) <= 1e-2 * abs(f.inner(h))


@settings(max_examples=8, deadline=None)
@given(st.integers(0, 2**31))
def test_pairing_nonnegative_on_real_schwartz(seed):
    fg = heisenberg_grid(**{**LIGHT, "N": 12, "panels": 3})
    r = np.random.default_rng(seed)
    c = r.uniform(-1, 1, 3)
    w = r.uniform(0.6, 1.2)
    f = G24.sample(lambda x, y, t: np.exp(-((x - c[0]) ** 2 + (y - c[1]) ** 2 + (t - c[2]) ** 2) / (2 * w * w)))
    F = fourier.forward(f, fg)
    assert fourier.plancherel_pairing(F, F).real >= -1e-10


def test_sublaplacian_multiplier_matches_differential_operator(fg):
    # left-invariant multipliers commute with inversion: phi(R) = 1 + mu against I + R by finite differences
    g = GroupGrid(3, 6.0, 48)
    f = library.sample("tgauss", g)
    u = op_apply(from_multiplier("power:1", fg), f)
    assert rel_l2(u, apply_I_plus_R(f)) < 1e-2


def test_threads_do_not_change_results(fg):
    f = library.sample("hermite4", G24)
    a = fourier.forward(f, fg, threads=1)
    b = fourier.forward(f, fg, threads=3)
    assert np.array_equal(a.mats, b.mats)
    assert np.array_equal(fourier.inverse(a, G24, threads=1).values, fourier.inverse(a, G24, threads=3).values)


def test_backend_mismatch(fg):
    with pytest.raises(fourier.BackendMismatch):
        fourier.forward(GroupGrid(2, 1.0, 8).zeros(), fg)
    with pytest.raises(fourier.BackendMismatch):
        fourier.forward(GroupGrid(2, 1.0, 8).zeros(), abelian_grid(GroupGrid(2, 1.0, 10)))


def test_abelian_forward_matches_fft():
    g = GroupGrid(2, 5.0, 20)
    f = g.sample(lambda x, y: np.exp(-(x * x + 2 * y * y)) * (1 + 0.5j * x))
    F = fourier.forward(f, abelian_grid(g))
    ref = oracle.fft_forward(f).ravel()
    assert np.max(np.abs(F.mats[:, 0, 0] - ref)) <= 1e-12 * np.abs(ref).max()
    back = fourier.inverse(F, g)
    assert rel_l2(back, f) <= 1e-12


def test_trace_class_and_hs_diagnostics(fg):
    F = fourier.forward(library.sample("tgauss", G24), fg)
    assert np.isfinite(F.trace_class_sum()) and F.trace_class_sum() > 0
    assert F.hs_norms().shape == (fg.size,)
    assert np.all(F.hs_norms(retained=True) <= F.hs_norms() + 1e-15)


def test_left_right_adjoint(fg):
    F = fourier.forward(library.sample("xgauss", G24), fg)
    X = fg.generators()[0]
    assert np.allclose(F.left(X).mats, X @ F.mats)
    assert np.allclose(F.adjoint().adjoint().mats, F.mats)


def test_X_multiplier_on_fourier_side(fg):
    # inverse of pi(X) F(pi) is X f under the quantization convention
    g = GroupGrid(3, 6.0, 48)
    f = library.sample("tgauss", g)
    X = fg.generators()[0]
    F = fourier.forward(f, fg)
    u = fourier.inverse(F.left(X), g)
    assert rel_l2(u, apply_X_beta(heisenberg1(), (1, 0, 0), f)) < 1e-2
