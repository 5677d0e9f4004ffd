import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gpdo import fourier, library
from gpdo import symbols as S
from gpdo.grid import GroupGrid, monomial_multiply
from gpdo.repn import LIGHT, SUBLAPLACIAN, abelian_grid, heisenberg_grid, spectral_power

G24 = GroupGrid(3, 6.0, 24)
E = [(1, 0, 0), (0, 1, 0), (0, 0, 1)]


@pytest.fixture(scope="module")
def fg():
    return heisenberg_grid(**LIGHT)


def test_class_params_validation():
    S.SymbolClassParams(1.0, 1.0, 0.5)
    for rho, delta in [(0.5, 0.7), (1.2, 0.0), (1.0, 1.0), (0.5, -0.1)]:
        with pytest.raises(S.SymbolError):
            S.SymbolClassParams(0.0, rho, delta)
    with pytest.raises(S.SymbolError):
        S.SymbolClassParams(0.0, nu=3)


def test_multiplier_examples(fg):
    one = S.from_multiplier("one", fg)
    assert np.array_equal(one.field, S.identity_symbol(fg).field)
    half = S.from_multiplier(lambda mu: (1 + mu) ** 0.5, fg, m=1.0)
    ref = np.stack([spectral_power(l, SUBLAPLACIAN, 0.5, fg.N) for l in fg.nodes])
    assert np.array_equal(half.field, ref)
    with pytest.raises(S.SymbolError), np.errstate(divide="ignore"):
        S.from_multiplier(lambda mu: 1 / (mu - mu), fg, m=0)
    with pytest.raises(S.SymbolError):
        S.from_multiplier(lambda mu: mu, fg)  # no order given


def test_multiplier_admissibility():
    assert S.multiplier_admissibility(lambda mu: (1 + mu) ** -1.0, -2.0, 2)["admissible"]
    assert S.multiplier_admissibility(lambda mu: np.exp(-mu), -20.0, 2)["admissible"]
    # (1+mu)^1 is not of order 0
    assert not S.multiplier_admissibility(lambda mu: 1 + mu, 0.0, 2)["admissible"]
    # oscillating multiplier loses decay under differentiation
    assert not S.multiplier_admissibility(lambda mu: np.cos(mu), 0.0, 2)["admissible"]


def test_invariant_operator_examples(fg):
    I = S.from_invariant_operator((0, 0, 0), fg)
    assert I.m == 0 and np.array_equal(I.field, S.identity_symbol(fg).field)
    T = S.from_invariant_operator((0, 0, 1), fg)
    assert T.m == 2
    assert np.array_equal(T.field, (1j * fg.nodes)[:, None, None] * np.eye(fg.dim))
    XY = S.from_invariant_operator((1, 1, 0), fg).field
    X, Y = fg.generators()[:2]
    r = fg.dim - 1  # the product of two tridiagonals is exact up to the last row
    assert np.allclose(XY[:, :r, :r], (X @ Y)[:, :r, :r])


def test_coefficient_multiplier(fg):
    s = S.from_coefficient_and_multiplier(("1", G24), "heat", fg)
    assert np.array_equal(s.at((3, 4, 5)), S.from_multiplier("heat", fg).field)
    s = S.from_coefficient_and_multiplier(("1+tanh(x1)", G24), "heat", fg)
    assert not s.broadcast and len(s.coefficient_rows()) == 24
    lo = min(np.linalg.eigvalsh(s.at_row(r)).min() for r in s.coefficient_rows())
    assert lo >= 0
    with pytest.raises(S.SymbolError):
        S.from_coefficient_and_multiplier(G24.sample(lambda x, y, t: 1j * x), "heat", fg)


def test_load_symbol_kinds(fg):
    a = S.load_symbol({"kind": "multiplier", "phi": "heat", "m": -10}, fg)
    assert a.m == -10 and a.broadcast
    b = S.load_symbol({"kind": "invariant", "alpha": [0, 0, 1]}, fg)
    assert b.m == 2
    c = S.load_symbol({"kind": "coeff_multiplier", "a": "1+tanh(x1)", "phi": "power", "gamma": 0.5}, fg, G24)
    assert c.m == 1.0 and not c.broadcast
    d = S.load_symbol({"kind": "sum", "terms": [{"kind": "identity"}, {"kind": "multiplier", "phi": "heat"}]}, fg)
    assert np.allclose(d.field, a.field + np.eye(fg.dim))
    with pytest.raises(S.SymbolError):
        S.load_symbol({"kind": "bogus"}, fg)
    with pytest.raises(S.SymbolError):
        S.load_symbol({"kind": "multiplier", "phi": "nope"}, fg)


def test_rebuild_on_refined_grid(fg):
    s = S.from_coefficient_and_multiplier(("sech2(x1)", G24), "power:1", fg)
    r = s.rebuild(fg.refined(1))
    assert r.fg.N == 28 and r.m == s.m


def test_delta_zero_is_bitwise(fg):
    s = S.from_field(fourier.forward(library.sample("tgauss", G24), fg))
    assert np.array_equal(S.difference_op(s, (0, 0, 0)).field, s.field)


def test_delta_of_generators():
    # x_j applied to the kernel of X_k gives -delta_jk times the delta distribution
    fg = heisenberg_grid(0.05, 8.0, 6, 20, 40, max_panel_width=None)  # wide panels for the lambda-derivative
    r = fg.retained
    for j in range(3):
        for k in range(3):
            D = S.difference_op(S.from_invariant_operator(E[k], fg), E[j]).field[:, :r, :r]
            want = -np.eye(r) if j == k else np.zeros((r, r))
            assert np.max(np.abs(D - want)) <= 1e-10, (j, k)


def test_delta_identities_match_definition(box):
    # identities against the literal definition (x^a f)^ on their trusted block
    fg = heisenberg_grid(0.05, 8.0, 6, 20, 40, max_panel_width=None)
    f = library.sample("xgauss", box)
    sig = S.from_field(fourier.forward(f, fg))
    for a in E:
        D = S.difference_op(sig, a).field
        R = fourier.forward(monomial_multiply(a, f), fg).mats
        kb = S.trusted_block(fg, box, a)
        err = max(np.abs(D[i, :k, :k] - R[i, :k, :k]).max() for i, k in enumerate(kb) if k > 0)
        assert err <= 1e-8 * np.abs(R).max()


def test_delta_pipeline_route(fg):
    # the literal route through the inverse transform, accurate to the roundtrip error
    f = library.sample("tgauss", G24)
    sig = S.from_field(fourier.forward(f, fg))
    P = S.difference_op(sig, (1, 0, 0), method="pipeline", grid=G24)
    R = fourier.forward(monomial_multiply((1, 0, 0), f), fg).mats
    assert np.linalg.norm(P.field - R) <= 1e-2 * np.linalg.norm(R)
    assert "boundary_warning" in P.meta


def test_lambda_derivative_exact_on_polynomials(fg):
    D = S.lambda_derivative_matrix(fg)
    p = fg.params["nodes_per_panel"]
    for k in range(p):
        assert np.allclose(D @ fg.nodes**k, k * fg.nodes ** max(k - 1, 0) * (k > 0), rtol=1e-9, atol=1e-9)


def test_difference_op_abelian_pipeline_is_exact():
    g = GroupGrid(2, 6.0, 16)
    afg = abelian_grid(g)
    f = g.sample(lambda x, y: np.exp(-(x * x + y * y)))
    sig = S.from_field(fourier.forward(f, afg))
    D = S.difference_op(sig, (1, 0)).field
    R = fourier.forward(monomial_multiply((1, 0), f), afg).mats
    assert np.max(np.abs(D - R)) <= 1e-12 * np.abs(R).max()


def test_difference_op_errors(fg):
    s = S.identity_symbol(fg)
    with pytest.raises(S.SymbolError):
        S.difference_op(s, (1, 0))
    with pytest.raises(S.SymbolError):
        S.difference_op(s, (1, 0, 0), method="pipeline")
    with pytest.raises(S.SymbolError):
        S.difference_op(s, (1, 0, 0), method="magic")


def test_x_derivative_examples(fg):
    b = S.from_multiplier("heat", fg)
    z = S.x_derivative(b, (1, 0, 0))
    assert z.broadcast and not np.any(z.field)
    assert S.x_derivative(b, (0, 0, 0)).field is not None
    s = S.from_coefficient_and_multiplier(("x1", G24), "heat", fg)
    d = S.x_derivative(s, (1, 0, 0))
    # X x = 1, exact for the order-4 stencil on a linear function, including the one-sided boundary rows
    assert d.broadcast
    assert np.allclose(d.field, b.field, rtol=1e-6, atol=1e-12)


def test_seminorm_examples(fg):
    I = S.identity_symbol(fg)
    for g in (0.0, 2.0, -2.0):
        assert S.seminorm(I, (0, 0, 0), (0, 0, 0), g, S.SymbolClassParams(0.0)) == pytest.approx(1.0, abs=1e-14)
    sp_ = S.from_multiplier("power:1", fg)
    assert S.seminorm(sp_, (0, 0, 0), (0, 0, 0), 0.0, S.SymbolClassParams(2.0)) == 1.0
    with pytest.raises(S.SymbolError):
        S.seminorm(I, (0, 0, 0), (0, 0, 0), 0.0, S.SymbolClassParams(0.0, nu=4))


@settings(max_examples=10, deadline=None)
@given(st.floats(-5, 5).filter(lambda c: abs(c) > 1e-3), st.sampled_from(E + [(0, 0, 0)]))
def test_seminorm_homogeneity(c, alpha):
    fg = heisenberg_grid(**{**LIGHT, "N": 12, "panels": 3})
    s = S.from_multiplier("resolvent", fg)
    p = S.SymbolClassParams(-2.0)
    base = S.seminorm(s, alpha, (0, 0, 0), 0.0, p)
    assert S.seminorm(c * s, alpha, (0, 0, 0), 0.0, p) == pytest.approx(abs(c) * base, rel=1e-12)


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**31))
def test_seminorm_triangle(seed):
    fg = heisenberg_grid(**{**LIGHT, "N": 12, "panels": 3})
    r = np.random.default_rng(seed)
    shape = (fg.size, fg.dim, fg.dim)
    a = S.Symbol(fg, [(None, r.standard_normal(shape) + 1j * r.standard_normal(shape))])
    b = S.Symbol(fg, [(None, r.standard_normal(shape))])
    p = S.SymbolClassParams(0.0)
    for alpha in [(0, 0, 0), (1, 0, 0)]:
        lhs = S.seminorm(a + b, alpha, (0, 0, 0), 0.0, p)
        assert lhs <= S.seminorm(a, alpha, (0, 0, 0), 0.0, p) + S.seminorm(b, alpha, (0, 0, 0), 0.0, p) + 1e-12


@given(st.floats(-4, 4), st.floats(0, 4))
def test_inclusion_monotonicity(m1, dm):
    fg = heisenberg_grid(**{**LIGHT, "N": 12, "panels": 3})
    s = S.from_multiplier("heat", fg)
    v1 = S.seminorm(s, (0, 0, 0), (0, 0, 0), 0.0, S.SymbolClassParams(m1))
    v2 = S.seminorm(s, (0, 0, 0), (0, 0, 0), 0.0, S.SymbolClassParams(m1 + dm))
    assert v2 <= v1 * (1 + 1e-14)


def test_class_reports(fg):
    rows = S.class_report(S.identity_symbol(fg), S.SymbolClassParams(0.0), alphas=[(0, 0, 0)], gammas=(0.0, 2.0))
    assert all(r["baseline"] <= 1 + 1e-10 and r["refined"] <= 1 + 1e-10 for r in rows)
    rows = S.class_report(S.from_multiplier("power:1", fg), S.SymbolClassParams(2.0), alphas=[(0, 0, 0), (1, 0, 0)])
    assert all(0.8 <= r["ratio"] <= 1.2 and math.isfinite(r["baseline"]) for r in rows)
    heat = S.from_multiplier("heat", fg, m=-10)
    rows = S.class_report(heat, S.SymbolClassParams(-10.0), alphas=[(0, 0, 0), (1, 0, 0), (0, 0, 1)])
    assert all(math.isfinite(r["baseline"]) and math.isfinite(r["refined"]) for r in rows)


def test_x_dependent_seminorm_uses_all_rows(fg):
    s = S.from_coefficient_and_multiplier(("1+tanh(x1)", G24), "resolvent", fg)
    v = S.seminorm(s, (0, 0, 0), (0, 0, 0), 0.0, S.SymbolClassParams(-2.0))
    assert v == pytest.approx(np.max(1 + np.tanh(G24.axis)), rel=1e-12)
    vb = S.seminorm(s, (0, 0, 0), (1, 0, 0), 0.0, S.SymbolClassParams(-2.0))
    assert 0.9 < vb <= 1.0 + 1e-3  # sup of sech^2 on the grid
