import math

import numpy as np
import pytest

from helpers import fd_gradient, random_stress, rel_err
from triaxdamage import material_model as mm
from triaxdamage import tensors as T
from triaxdamage.errors import NegativeStrainError, SaturatedDamageError

P = mm.REFERENCE


def test_params_validation_and_packing():
    with pytest.raises(ValueError):
        mm.MaterialParams(E=-1.0)
    with pytest.raises(ValueError):
        mm.MaterialParams(nu=0.5)
    with pytest.raises(ValueError):
        mm.MaterialParams(m=0)
    arr = P.to_array()
    assert len(arr) == len(mm.MaterialParams._ARRAY_FIELDS)
    assert arr[0] == P.E and arr[-1] == P.max_iter


def test_presets():
    off = P.without_corrections()
    assert (off.c_eta, off.c_theta_t, off.c_theta_s, off.c_theta_c) == (0, 1, 1, 1)
    assert (off.d_eta_t, off.d_theta_s, off.d_eta_c) == (0, 0, 0)
    assert mm.LODE_DEMO.c_theta_s == 0.92 and mm.LODE_DEMO.c_theta_c == 1.05 and mm.LODE_DEMO.c_eta == 0


@pytest.mark.parametrize("E, nu, lam, mu", [
    (71150.0, 0.3, 41048.08, 27365.38),
    (71150.0, 0.0, 0.0, 35575.0),
    (1.0, 0.25, 0.4, 0.4),
])
def test_elastic_constants(E, nu, lam, mu):
    got = mm.elastic_constants(P.with_(E=E, nu=nu))
    assert got == pytest.approx((lam, mu), abs=1e-2)


def test_hardening_values():
    assert mm.hardening(0.0, P)[0] == 370.0
    assert mm.hardening(1.0, P)[0] == pytest.approx(990.0)
    assert mm.hardening(0.47, P)[0] == pytest.approx(829.78, abs=0.01)
    with pytest.raises(NegativeStrainError):
        mm.hardening(-1e-3, P)


def test_yield_stress_values():
    off = P.without_corrections()
    for eta in (-0.5, 0.2, 0.9):
        for t0 in (-1, 0, 0.4, 1):
            assert mm.yield_stress(0.3, eta, t0, off) == pytest.approx(mm.hardening(0.3, P)[0])
    assert mm.yield_stress(0.0, P.eta0, 0.0, P) == pytest.approx(316.35)
    assert mm.yield_stress(0.0, P.eta0, 1.0, P) == pytest.approx(370 * (0.855 + 0.145 * 6 / 7))
    assert mm.yield_stress(0.0, P.eta0, 1.0, P) == pytest.approx(362.34, abs=5e-3)


@pytest.mark.parametrize("eta, theta0, h, tol", [
    (0.0124, 0.0355, 1.54867, 1e-4),
    (0.9274, 0.9984, 1.666339, 5e-4),
    (0.1173, 0.3381, 1.44491, 5e-4),
    (0.4, 0.0, 1.55, 1e-12),
])
def test_stress_state_parameter_h(eta, theta0, h, tol):
    assert mm.stress_state_param_h(eta, theta0, P) == pytest.approx(h, abs=tol)


def test_h_reference_limit():
    # m -> large: g(±1) -> 1, so h(η0, 1) -> 1
    assert mm.stress_state_param_h(P.eta0, 1.0, P.with_(m=400)) == pytest.approx(1.0, abs=1e-2)


def test_elastic_stress():
    eps = T.sym(1e-3, -2e-4, 5e-5, 3e-4, 0, -1e-4)
    s0 = mm.elastic_stress(eps, 0.0, 1.0, P)
    lam, mu = mm.elastic_constants(P)
    ref = lam * T.trace(eps) * T.IDENTITY + 2 * mu * eps
    assert np.allclose(s0, ref)
    assert np.allclose(mm.elastic_stress(eps, 0.25, 2.0, P), 0.5 * s0)
    assert np.all(mm.elastic_stress(np.zeros(6), 0.3, 1.2, P) == 0)
    with pytest.raises(SaturatedDamageError):
        mm.elastic_stress(eps, 0.9, 1.2, P)


def test_energy_release():
    eps = T.diag(0.001, -0.0003, -0.0003)
    assert mm.energy_release_Y(eps, 1.0, P) == pytest.approx(0.035575, abs=1e-9)
    assert mm.energy_release_Y(eps, 0.0, P) == 0.0
    assert mm.energy_release_Y(np.zeros(6), 1.3, P) == 0.0


def test_damage_potential_rate():
    p = P.with_(Y0=1.0)
    assert mm.damage_potential_rate(0.5, 0.0, 1.0, p) == 0.0
    assert mm.damage_potential_rate(1.0 + p.gamma, 0.0, 1.0, p) == pytest.approx(1.0)
    assert mm.damage_potential_rate(1.0 + 2 * p.gamma, 0.25, 2.0, p) == pytest.approx(8.0)


def test_yield_function_values():
    # zero stress is the degenerate state (η = 0, θ0 = 1)
    assert mm.yield_function_f(np.zeros(6), 0.0, 0.0, P) == pytest.approx(-mm.yield_stress(0.0, 0.0, 1.0, P))
    off = P.without_corrections()
    sb = mm.hardening(0.2, P)[0]
    assert mm.yield_function_f(T.diag(sb, 0, 0), 0.2, 0.0, off) == pytest.approx(0, abs=1e-10)
    # h = 1 at (η0, θ0 = 1) with d_theta_s = 0; σeq = 0.9 σy and D = 0.19
    p = P.with_(d_theta_s=0.0, d_eta_t=0.0, d_eta_c=0.0, c_eta=0.0)
    sy = mm.yield_stress(0.0, 1 / 3, 1.0, p)
    assert mm.yield_function_f(T.diag(0.9 * sy, 0, 0), 0.0, 0.19, p) == pytest.approx(0, abs=1e-9)


def test_df_dD():
    sig = T.diag(300, 0, 0)
    st = T.stress_state(sig)
    h = mm.stress_state_param_h(st.eta, st.theta0, P)
    assert mm.df_dD(sig, 0.0, P) == pytest.approx(h * 300 / 2)
    rng = np.random.default_rng(11)
    for _ in range(10):
        sig = random_stress(rng)
        D = rng.uniform(0, 0.4)
        d = 1e-6
        fd = (mm.yield_function_f(sig, 0.1, D + d, P) - mm.yield_function_f(sig, 0.1, D - d, P)) / (2 * d)
        assert mm.df_dD(sig, D, P) == pytest.approx(fd, rel=1e-6)


def test_df_debar():
    off = P.without_corrections()
    e = 0.2
    assert mm.df_debar(e, 0.1, 0.5, off) == pytest.approx(-P.n * P.B * e ** (P.n - 1))
    rng = np.random.default_rng(12)
    for _ in range(10):
        eta, t0, e = rng.uniform(-0.5, 1.0), rng.uniform(-1, 1), rng.uniform(0.01, 1.0)
        d = 1e-7
        fd = -(mm.yield_stress(e + d, eta, t0, P) - mm.yield_stress(e - d, eta, t0, P)) / (2 * d)
        assert mm.df_debar(e, eta, t0, P) == pytest.approx(fd, rel=1e-6)
    for eta in np.linspace(-0.6, P.eta0 + 1 / P.c_eta - 1e-9, 40):
        for t0 in (-1, 0, 1):
            assert mm.df_debar(0.3, eta, t0, P) <= 0


def test_df_dsigma_von_mises_limit():
    off = P.without_corrections()
    sig = T.sym(200, -50, 30, 40, 10, -20)
    assert np.allclose(mm.df_dsigma(sig, 0.1, 0.0, off), T.dseq_dsigma(sig))


def test_df_dsigma_matches_finite_differences():
    rng = np.random.default_rng(13)
    for _ in range(25):
        sig = random_stress(rng, min_sin3=1e-3)
        e, D = rng.uniform(0.01, 0.8), rng.uniform(0, 0.4)
        f = lambda s: mm.yield_function_f(s, e, D, P)
        fd = fd_gradient(f, sig)
        assert rel_err(mm.df_dsigma(sig, e, D, P, full=True), fd) < 1e-5
        assert rel_err(mm.df_dsigma(sig, e, D, P), T.deviator(fd)) < 1e-5
        fh = lambda s: mm.stress_state_param_h(T.stress_state(s).eta, T.stress_state(s).theta0, P)
        assert rel_err(mm.dh_dsigma(sig, P), fd_gradient(fh, sig)) < 1e-5


def test_df_dsigma_at_axisymmetric_states():
    for sig in (T.diag(400, 0, 0), T.diag(-400, 0, 0), T.diag(300, 300, 0)):
        g = mm.df_dsigma(sig, 0.1, 0.1, P)
        assert np.all(np.isfinite(g))
        # the Lode chain vanishes there: only the σeq and η chains remain
        assert np.allclose(T.deviator(g), g)
        assert abs(T.ddot(g, T.IDENTITY)) < 1e-12


def test_lode_weight():
    lw = mm.lode_weight(1.0, 6)
    assert lw.g == pytest.approx(6 / 7)
    assert lw.dg_dtheta0 == 0.0
    assert mm.lode_weight(0.0, 6).g == 0.0
