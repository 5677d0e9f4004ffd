import json

import numpy as np
import pytest

from gpdo import fourier, library
from gpdo import inequalities as I
from gpdo import quantizer as Q
from gpdo import symbols as S
from gpdo.grid import GroupGrid, rel_l2
from gpdo.repn import LIGHT, heisenberg_grid

G24 = GroupGrid(3, 6.0, 24)


@pytest.fixture(scope="module")
def fg():
    return heisenberg_grid(**LIGHT)


@pytest.fixture(scope="module")
def tg():
    return library.sample("tgauss", G24)


def test_sobolev_order_zero_is_plancherel_norm(fg, tg):
    F = fourier.forward(tg, fg)
    ref = np.sqrt(fourier.plancherel_pairing(F, F).real)
    assert abs(I.sobolev_norm(tg, 0.0, fg) - ref) <= 1e-13 * ref
    assert abs(I.sobolev_norm(tg, 0.0, fg) - tg.norm()) <= 1e-6 * tg.norm()


def test_sobolev_order_nu_is_norm_of_I_plus_R(fg, tg):
    u = Q.op_apply(S.from_multiplier(lambda mu: 1 + mu, fg, m=2), tg)
    assert abs(I.sobolev_norm(tg, 2.0, fg) - u.norm()) <= 1e-5 * u.norm()


def test_sobolev_monotone_in_order(fg, tg):
    F = fourier.forward(tg, fg)
    vals = [I.sobolev_norm(tg, a, fg, F) for a in (-1.0, 0.0, 0.5, 1.0, 2.0)]
    assert np.all(np.diff(vals) > 0)


def test_apply_I_plus_R_on_manufactured_pair():
    g = GroupGrid(3, 6.0, 48)
    f, rhs = library.manufactured_pair(g)
    assert rel_l2(I.apply_I_plus_R(f), rhs) <= 1e-2


def test_spectral_I_plus_R_on_manufactured_pair():
    g = GroupGrid(3, 8.0, 64)
    f, rhs = library.manufactured_pair(g)
    assert rel_l2(I.apply_I_plus_R(f, method="spectral"), rhs) <= 1e-9
    with pytest.raises(ValueError):
        I.apply_I_plus_R(f, method="chebyshev")


def test_positivity_check(fg):
    r = I.positivity_check(S.identity_symbol(fg))
    assert r["passed"] and r["min_eigenvalue"] == 1.0
    # pi(X) is skew-adjoint, so its Hermitian part vanishes
    assert I.positivity_check(S.from_invariant_operator((1, 0, 0), fg))["min_eigenvalue"] == 0.0
    assert not I.positivity_check(S.identity_symbol(fg) * -1.0)["passed"]


def test_commutation_check(fg):
    r = I.commutation_check(S.from_multiplier("heat", fg))
    assert r["passed"] and max(r["offdiagonal"], r["commutator"]) <= 1e-12
    r = I.commutation_check(S.from_invariant_operator((1, 0, 0), fg))
    assert not r["passed"] and r["commutator"] > 1.0


def test_random_diagonal_commutes(fg):
    d = np.random.default_rng(4).uniform(0, 2, (len(fg.nodes), fg.dim))
    M = np.zeros((len(fg.nodes), fg.dim, fg.dim), dtype=complex)
    idx = np.arange(fg.dim)
    M[:, idx, idx] = d
    r = I.commutation_check(S.from_field(fourier.FourierField(fg, M)))
    assert r["passed"] and r["commutator"] <= 1e-14


def test_garding_refuses_non_commuting_symbol(fg):
    with pytest.raises(I.HypothesisError):
        I.garding_scan(S.from_invariant_operator((1, 0, 0), fg), G24, trials=2)


def test_garding_report(fg, tmp_path):
    rep = I.garding_scan(S.from_multiplier("heat", fg), G24, trials=6, seed=3)
    assert rep.train == 3 and len(rep.re_form) == 6
    assert rep.violations == 0 and rep.C_est == 0.0 and rep.multiplier_nonnegative
    assert rep.s == (rep.m - 1.0) / 2.0
    p = tmp_path / "g.json"
    rep.to_json(p)
    assert json.loads(p.read_text()) == json.loads(rep.to_json())
    assert "violations" in rep.summary() and "heat" in rep.summary()


def test_trial_functions_deterministic():
    a = I.trial_function(G24, 7, 3).values
    assert np.array_equal(a, I.trial_function(G24, 7, 3).values)
    assert not np.array_equal(a, I.trial_function(G24, 7, 4).values)
    assert not np.array_equal(a, I.trial_function(G24, 8, 3).values)


def test_resolvent_of_zero(fg):
    z = G24.sample(lambda x, y, t: 0 * x)
    assert np.max(np.abs(I.resolvent_apply(z, fg).values)) == 0.0


def test_resolvent_inverts_I_plus_R(fg):
    g = GroupGrid(3, 6.0, 48)
    f = library.sample("hermite4", g)
    u = I.resolvent_apply(f, fg)
    assert rel_l2(I.apply_I_plus_R(u), f) <= 1e-2


def test_decay_profile_of_zero():
    z = G24.sample(lambda x, y, t: 0 * x)
    p = I.schwartz_decay_report([z, z])
    assert all(v == [0.0, 0.0] for v in p.weighted.values())
    assert p.enlargement["boundary_shrink"] == 1.0
    assert set(p.to_dict()) == {"L", "betas", "Ms", "weighted", "boundary_max", "enlargement"}


def test_decay_profile_weights():
    g = GroupGrid(3, 6.0, 24)
    u = g.sample(lambda x, y, t: np.exp(-(x * x + y * y + t * t)))
    p = I.schwartz_decay_report(u, betas=((0, 0, 0),), Ms=(0, 2))
    w0, w2 = p.weighted["(0, 0, 0)|0"][0], p.weighted["(0, 0, 0)|2"][0]
    assert w0 <= 1.0 and w2 >= w0
