"""Constitutive laws of the stress-state dependent elastoplastic-damage model.

Everything here is a pure function of its arguments.  Stresses are MPa,
strains dimensionless, symmetric tensors use the storage of
:mod:`triaxdamage.tensors`.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields, replace

import numpy as np

from . import tensors as T
from .errors import NegativeStrainError, SaturatedDamageError

#: ε̄p floor used when evaluating the hardening slope (the power law is
#: singular at 0 for n < 1)
SLOPE_FLOOR = 1e-8


@dataclass(frozen=True)
class MaterialParams:
    """Material constants plus numerical controls.

    Defaults are the 2024-T351 aluminium set.  ``gamma`` may be ``inf`` to
    switch damage growth off.
    """

    E: float = 71150.0
    nu: float = 0.3
    A: float = 370.0
    B: float = 620.0
    n: float = 0.396
    Y0: float = 0.0
    alpha: float = 2.0
    beta: float = 1.0
    gamma: float = 12.8
    c_eta: float = 0.09
    c_theta_t: float = 1.0
    c_theta_s: float = 0.855
    c_theta_c: float = 0.9
    d_eta_t: float = 1.3
    d_theta_s: float = 0.55
    d_eta_c: float = 0.6
    m: int = 6
    eta0: float = 0.4
    Dc: float = 0.99
    tol_f: float = 1e-8
    max_iter: int = 50

    def __post_init__(self):
        problems = []
        if not self.E > 0:
            problems.append("E must be > 0")
        if not -1.0 < self.nu < 0.5:
            problems.append("nu must lie in (-1, 0.5)")
        if not self.n > 0:
            problems.append("n must be > 0")
        if self.alpha < 0 or self.beta < 0:
            problems.append("alpha and beta must be >= 0")
        if not self.gamma > 0:
            problems.append("gamma must be > 0")
        if int(self.m) != self.m or self.m < 1:
            problems.append("m must be an integer >= 1")
        if not 0.0 < self.Dc <= 1.0:
            problems.append("Dc must lie in (0, 1]")
        if not self.tol_f > 0:
            problems.append("tol_f must be > 0")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            problems.append("max_iter must be a positive integer")
        if problems:
            raise ValueError("invalid MaterialParams: " + "; ".join(problems))
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "max_iter", int(self.max_iter))

    # packing order shared with the compiled kernel
    _ARRAY_FIELDS = (
        "E", "nu", "A", "B", "n", "Y0", "alpha", "beta", "gamma", "c_eta",
        "c_theta_t", "c_theta_s", "c_theta_c", "d_eta_t", "d_theta_s", "d_eta_c",
        "m", "eta0", "Dc", "tol_f", "max_iter",
    )

    def to_array(self) -> np.ndarray:
        return np.array([float(getattr(self, k)) for k in self._ARRAY_FIELDS])

    def as_dict(self) -> dict:
        return asdict(self)

    def with_(self, **changes) -> "MaterialParams":
        return replace(self, **changes)

    def without_corrections(self) -> "MaterialParams":
        """Plain von Mises yield and a stress-state independent h = 1."""
        return replace(
            self, c_eta=0.0, c_theta_t=1.0, c_theta_s=1.0, c_theta_c=1.0,
            d_eta_t=0.0, d_theta_s=0.0, d_eta_c=0.0,
        )

    def without_damage(self) -> "MaterialParams":
        return replace(self, gamma=math.inf)


def param_names():
    return [f.name for f in fields(MaterialParams)]


#: calibrated reference material (the dataclass defaults)
REFERENCE = MaterialParams()
#: demo constants used for the yield-surface comparison (triaxiality ignored)
LODE_DEMO = MaterialParams(c_eta=0.0, c_theta_t=1.0, c_theta_s=0.92, c_theta_c=1.05, m=6)
VON_MISES = REFERENCE.without_corrections()

PRESETS = {"reference": REFERENCE, "lode_demo": LODE_DEMO, "von_mises": VON_MISES}


# --------------------------------------------------------------------------
# Lode weighting
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class LodeWeight:
    g: float
    dg_dtheta0: float


def lode_weight(theta0: float, m: int) -> LodeWeight:
    """Smoothed Lode shape ``g = θ0² - (θ0²)^(m+1)/(m+1)`` and its derivative."""
    t2 = theta0 * theta0
    t2m = t2**m
    return LodeWeight(t2 - t2m * t2 / (m + 1), 2.0 * theta0 * (1.0 - t2m))


def _c_theta_ax(theta0, p: MaterialParams):
    return p.c_theta_t if theta0 >= 0.0 else p.c_theta_c


def _d_eta_ax(theta0, p: MaterialParams):
    # θ0 = 0 has g = 0, so the branch does not matter there
    return p.d_eta_t if theta0 > 0.0 else p.d_eta_c


# --------------------------------------------------------------------------
# elasticity and hardening
# --------------------------------------------------------------------------


def elastic_constants(params: MaterialParams):
    """Lamé constants ``(λ, μ)`` with the standard shear modulus E / (2(1+ν))."""
    E, nu = params.E, params.nu
    return nu * E / ((1.0 + nu) * (1.0 - 2.0 * nu)), E / (2.0 * (1.0 + nu))


def elastic_stiffness(params: MaterialParams) -> np.ndarray:
    """Isotropic stiffness as a 6x6 Voigt matrix (acts on engineering shear)."""
    lam, mu = elastic_constants(params)
    C = np.zeros((6, 6))
    C[:3, :3] = lam
    C[[0, 1, 2], [0, 1, 2]] += 2.0 * mu
    C[[3, 4, 5], [3, 4, 5]] = mu
    return C


def hardening(ebar_p: float, params: MaterialParams = REFERENCE):
    """Power-law flow curve ``σ̄ = A + B ε̄pⁿ`` and its slope."""
    if ebar_p < 0:
        raise NegativeStrainError(f"equivalent plastic strain {ebar_p} < 0")
    p = params
    e = max(ebar_p, SLOPE_FLOOR)
    return p.A + p.B * ebar_p**p.n, p.n * p.B * e ** (p.n - 1.0)


def _triax_factor(eta, p):
    return 1.0 - p.c_eta * (eta - p.eta0)


def _lode_factor(theta0, p):
    return p.c_theta_s + (_c_theta_ax(theta0, p) - p.c_theta_s) * lode_weight(theta0, p.m).g


def yield_stress(ebar_p, eta, theta0, params: MaterialParams = REFERENCE) -> float:
    sbar, _ = hardening(ebar_p, params)
    return sbar * _triax_factor(eta, params) * _lode_factor(theta0, params)


def stress_state_param_h(eta, theta0, params: MaterialParams = REFERENCE) -> float:
    """Damage stress-state parameter h(η, θ0); below 1 slows damage (crack closure)."""
    p = params
    g = lode_weight(theta0, p.m).g
    return 1.0 + p.d_theta_s + (_d_eta_ax(theta0, p) * (eta - p.eta0) - p.d_theta_s) * g


def _omega(h, D):
    w = 1.0 - h * D
    if w <= 0.0:
        raise SaturatedDamageError(f"1 - hD = {w:.3e} <= 0 (h={h}, D={D})")
    return w


def elastic_stress(eps_e, D, h, params: MaterialParams = REFERENCE) -> np.ndarray:
    w = _omega(h, D)
    lam, mu = elastic_constants(params)
    eps_e = np.asarray(eps_e, dtype=float)
    return w * (2.0 * mu * eps_e + lam * T.trace(eps_e) * T.IDENTITY)


def undamaged_stress(eps_e, params: MaterialParams = REFERENCE) -> np.ndarray:
    lam, mu = elastic_constants(params)
    eps_e = np.asarray(eps_e, dtype=float)
    return 2.0 * mu * eps_e + lam * T.trace(eps_e) * T.IDENTITY


def energy_release_Y(eps_e, h, params: MaterialParams = REFERENCE) -> float:
    lam, mu = elastic_constants(params)
    eps_e = np.asarray(eps_e, dtype=float)
    return h * (mu * T.ddot(eps_e, eps_e) + 0.5 * lam * T.trace(eps_e) ** 2)


def damage_potential_rate(Y, D, h, params: MaterialParams = REFERENCE) -> float:
    """``∂F_Y/∂Y = (1-hD)^-β ⟨(Y - Y0)/γ⟩^α``, the damage growth per unit multiplier."""
    p = params
    w = _omega(h, D)
    x = (Y - p.Y0) / p.gamma
    if x <= 0.0:
        return 0.0
    return x**p.alpha / w**p.beta


# --------------------------------------------------------------------------
# yield function and its derivatives
# --------------------------------------------------------------------------


def yield_function_f(sigma, ebar_p, D, params: MaterialParams = REFERENCE) -> float:
    sigma = np.asarray(sigma, dtype=float)
    st = T.stress_state(sigma)
    h = stress_state_param_h(st.eta, st.theta0, params)
    w = _omega(h, D)
    return st.sigma_eq / math.sqrt(w) - yield_stress(ebar_p, st.eta, st.theta0, params)


def df_dD(sigma, D, params: MaterialParams = REFERENCE) -> float:
    st = T.stress_state(np.asarray(sigma, dtype=float))
    h = stress_state_param_h(st.eta, st.theta0, params)
    w = _omega(h, D)
    return h * st.sigma_eq / (2.0 * w**1.5)


def df_debar(ebar_p, eta, theta0, params: MaterialParams = REFERENCE) -> float:
    """``∂f/∂ε̄p`` at fixed stress: minus the corrected hardening slope."""
    _, slope = hardening(ebar_p, params)
    return -_triax_factor(eta, params) * _lode_factor(theta0, params) * slope


def _stress_partials(sigma, ebar_p, D, p: MaterialParams):
    """Scalar partials of f with respect to (σeq, η, θ0) and the pieces needed
    to assemble tensor gradients."""
    st = T.stress_state(sigma)
    lw = lode_weight(st.theta0, p.m)
    d_ax = _d_eta_ax(st.theta0, p)
    c_ax = _c_theta_ax(st.theta0, p)
    h = 1.0 + p.d_theta_s + (d_ax * (st.eta - p.eta0) - p.d_theta_s) * lw.g
    w = _omega(h, D)
    sbar, _ = hardening(ebar_p, p)
    tri = _triax_factor(st.eta, p)
    lode = p.c_theta_s + (c_ax - p.c_theta_s) * lw.g
    df_dh = D * st.sigma_eq / (2.0 * w**1.5)
    return dict(
        st=st, lw=lw, h=h, w=w,
        # dh/dη, and dh/dθ0 divided by dg/dθ0 (the guarded chain supplies dg)
        dh_deta=d_ax * lw.g, dh_dg=d_ax * (st.eta - p.eta0) - p.d_theta_s,
        dsy_deta=-sbar * p.c_eta * lode, dsy_dg=sbar * tri * (c_ax - p.c_theta_s),
        df_dseq=1.0 / math.sqrt(w), df_dh=df_dh,
    )


def dh_dsigma(sigma, params: MaterialParams = REFERENCE, full: bool = True) -> np.ndarray:
    """Gradient of h(η(σ), θ0(σ)); ``full=False`` keeps only the deviatoric part."""
    sigma = np.asarray(sigma, dtype=float)
    p = params
    st = T._require_nondegenerate(sigma)
    lw = lode_weight(st.theta0, p.m)
    d_ax = _d_eta_ax(st.theta0, p)
    deta = T.deta_dsigma_full(sigma) if full else T.deta_dsigma(sigma)
    chain = T.lode_chain(sigma, lw.dg_dtheta0)
    return d_ax * lw.g * deta + (d_ax * (st.eta - p.eta0) - p.d_theta_s) * chain


def df_dsigma(sigma, ebar_p, D, params: MaterialParams = REFERENCE, full: bool = False) -> np.ndarray:
    """Gradient of the yield function with respect to stress.

    By default only the deviatoric part is returned, which is the plastic
    flow direction.  ``full=True`` adds the hydrostatic contribution coming
    from the triaxiality dependence (needed by the consistency condition).
    """
    sigma = np.asarray(sigma, dtype=float)
    T._require_nondegenerate(sigma)
    q = _stress_partials(sigma, ebar_p, D, params)
    deta = T.deta_dsigma_full(sigma) if full else T.deta_dsigma(sigma)
    chain = T.lode_chain(sigma, q["lw"].dg_dtheta0)
    dh = q["dh_deta"] * deta + q["dh_dg"] * chain
    dsy = q["dsy_deta"] * deta + q["dsy_dg"] * chain
    return q["df_dseq"] * T.dseq_dsigma(sigma) + q["df_dh"] * dh - dsy
