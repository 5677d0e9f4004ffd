import numpy as np
import pytest

from gpdo import fourier, library
from gpdo import quantizer as Q
from gpdo import symbols as S
from gpdo.grid import GroupGrid, rel_l2
from gpdo.repn import LIGHT, heisenberg_grid
from gpdo.structure import heisenberg1, multiply

H = heisenberg1()
G24 = GroupGrid(3, 6.0, 24)
G16 = GroupGrid(3, 6.0, 16)


@pytest.fixture(scope="module")
def fg():
    return heisenberg_grid(**LIGHT)


@pytest.fixture(scope="module")
def heat(fg):
    return S.from_multiplier("heat", fg)


def test_identity_quantization_roundtrip(fg):
    f = library.sample("tgauss", G24)
    u = Q.op_apply(S.identity_symbol(fg), f)
    assert rel_l2(u, f) <= 1e-3
    assert "boundary_warning" in u.meta


def test_grid_mismatch_rejected(fg):
    s = S.from_coefficient_and_multiplier(("1+tanh(x1)", G24), "heat", fg)
    with pytest.raises(S.SymbolError):
        Q.op_apply(s, library.sample("tgauss", G16))


def test_linearity(fg, heat):
    f = library.sample("tgauss", G16)
    g = library.sample("gauss", G16)
    X = S.from_invariant_operator((1, 0, 0), fg)
    lhs = Q.op_apply(heat * 2.0 + X, f + g * 3.0).values
    parts = [Q.op_apply(heat, f), Q.op_apply(heat, g), Q.op_apply(X, f), Q.op_apply(X, g)]
    rhs = 2 * parts[0].values + 6 * parts[1].values + parts[2].values + 3 * parts[3].values
    assert np.max(np.abs(lhs - rhs)) <= 1e-12 * np.max(np.abs(rhs))


def test_left_invariance(fg, heat):
    # Op(sigma) commutes with left translation for broadcast sigma
    a = np.array([0.3, -0.2, 0.1])
    tg = library.FUNCTIONS["tgauss"]
    shifted = G24.sample(lambda x, y, t: tg(*np.moveaxis(multiply(H, a, np.stack([x, y, t], -1)), -1, 0)))
    lhs = Q.op_apply(heat, shifted).values
    F = fourier.forward(library.sample("tgauss", G24), fg)
    moved = multiply(H, a, G24.points())
    rhs = Q.evaluate_inverse(fourier.FourierField(fg, heat.field @ F.mats), moved, G24).reshape(G24.shape)
    assert np.linalg.norm(lhs - rhs) / np.linalg.norm(rhs) <= 1e-5


def test_evaluate_inverse_matches_grid_inverse(fg):
    F = fourier.forward(library.sample("tgauss", G16), fg)
    on_grid = fourier.inverse(F, G16).values.ravel()
    pts = Q.evaluate_inverse(F, G16.points(), G16)
    assert np.max(np.abs(pts - on_grid)) <= 1e-10 * np.max(np.abs(on_grid))


def test_heat_kernel_properties(fg, heat):
    g = GroupGrid(3, 6.0, 24)
    k = Q.kernel_slice(heat, None, g)
    v = k.kappa.values
    assert np.max(np.abs(v.imag)) <= 1e-12
    # peak sits at the cells nearest the origin
    assert np.isclose(np.max(np.abs(v)), v.real[11:13, 11:13, 11:13].min())
    assert np.array_equal(Q.kernel_slice(heat, (3, 3, 3), g).kappa.values, v)
    assert "trace_class_sum" in k.meta and "boundary_warning" in k.meta


def test_kernel_of_x_dependent_symbol(fg):
    s = S.from_coefficient_and_multiplier(("1+tanh(x1)", G16), "heat", fg)
    k = Q.kernel_slice(s, (12, 3, 5), G16)
    ref = Q.kernel_slice(S.from_multiplier("heat", fg), None, G16).kappa.values
    factor = 1 + np.tanh(G16.axis[12])
    assert np.allclose(k.kappa.values, factor * ref, rtol=1e-12, atol=1e-15)
    assert np.allclose(k.x, [G16.axis[12], G16.axis[3], G16.axis[5]])


def test_shell_table(fg, heat):
    k = Q.kernel_slice(heat, None, G16)
    rows = k.shell_table([0.0, 1.0, 2.0, 4.0])
    assert [r["q_lo"] for r in rows] == [0.0, 1.0, 2.0]
    assert all(r["max"] >= r["mean"] >= 0 for r in rows)
    assert rows[0]["max"] > rows[-1]["max"]


def test_identity_kernel_concentrates(fg):
    # the band-limited delta grows at the origin as the grid refines
    peaks = []
    for P in (16, 32):
        k = Q.kernel_slice(S.identity_symbol(fg), None, GroupGrid(3, 3.0, P))
        peaks.append(np.max(np.abs(k.kappa.values)))
        rep = Q.decay_report(k, 0, 1, 4, near=(0.1, 1), nshells=6, exclude_boundary=0)
        assert rep["partial"] and rep["near_bound"] == -4.0
    assert peaks[1] > 3 * peaks[0]


def test_decay_report_fields(fg, heat):
    k = Q.kernel_slice(heat, None, GroupGrid(3, 6.0, 24))
    rep = Q.decay_report(k, -20, 1, 4, near=(0.5, 3.0), nshells=4, min_count=5)
    assert set(rep) >= {"near_bound", "near_slope", "near_slope_ci", "skipped_shells", "partial", "CM", "margin", "probe"}
    assert set(rep["CM"]) == {"2", "4", "6"}
    lo, hi = rep["near_slope_ci"]
    assert lo <= rep["near_slope"] <= hi
    # a Gaussian-like kernel is decreasing in |q|
    assert rep["near_slope"] < 0


def test_fit_slope_exact_line():
    x = np.linspace(0, 1, 7)
    slope, ci = Q._fit_slope(x, 3 - 2.5 * x)
    assert abs(slope + 2.5) <= 1e-12 and ci[1] - ci[0] <= 1e-9


def test_convolve_at_matches_op_apply(fg, heat):
    f = library.sample("tgauss", G16)
    u = Q.op_apply(heat, f)
    rt = rel_l2(Q.op_apply(S.identity_symbol(fg), f), f)
    pts = G16.points().reshape(*G16.shape, 3)
    scale = np.max(np.abs(u.values))
    for idx in [(8, 8, 8), (5, 9, 7), (10, 4, 8)]:
        assert abs(Q.convolve_at(heat, f, pts[idx]) - u.values[idx]) / scale <= 2 * rt


def test_convolve_at_rejects_x_dependent(fg):
    s = S.from_coefficient_and_multiplier(("1+tanh(x1)", G16), "heat", fg)
    with pytest.raises(S.SymbolError):
        Q.convolve_at(s, library.sample("tgauss", G16), np.zeros(3))


def test_adjoint_consistency(fg, heat):
    sig = S.from_invariant_operator((1, 0, 0), fg) + heat
    f = library.sample("tgauss", G24)
    h = G24.sample(lambda x, y, t: (1 - t * t) * np.exp(-((x - 0.5) ** 2 + y * y + t * t) / 2))
    lhs = Q.op_apply(sig, f).inner(h)
    rhs = f.inner(Q.op_apply(Q.adjoint(sig), h))
    assert abs(lhs - rhs) <= 1e-6 * abs(lhs)


def test_adjoint_of_x_dependent_rejected(fg):
    s = S.from_coefficient_and_multiplier(("1+tanh(x1)", G16), "heat", fg)
    with pytest.raises(S.SymbolError):
        Q.adjoint(s)


def test_l2_norm_estimates(fg, heat):
    ident = S.identity_symbol(fg)
    e = Q.l2_norm_estimate(ident, G24)
    assert 0.97 <= e["estimate"] <= 1.03
    assert e["converged"] and e["monotone"] and len(e["rayleigh"]) == 8
    e3 = Q.l2_norm_estimate(ident * 3.0, G24)
    assert abs(e3["estimate"] / e["estimate"] - 3.0) <= 1e-10
    # the heat multiplier is a contraction
    assert Q.l2_norm_estimate(heat, G24)["estimate"] <= 1.05
    with pytest.raises(ValueError):
        Q.l2_norm_estimate(ident, G24, iterations=7)
