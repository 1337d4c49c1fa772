"""Strain-driven update of a single material point.

Elastic predictor followed by a fully implicit return map on the plastic
multiplier increment and the end-of-step damage.  The solve itself runs in
the update kernel (compiled when available, see :mod:`triaxdamage._backend`);
this module wraps it with state objects and the elastoplastic tangent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _backend
from . import material_model as mm
from . import tensors as T
from .errors import ConvergenceError, TriaxDamageError


@dataclass(frozen=True)
class MaterialState:
    """Internal state of one material point.

    The plastic strain tensor is not stored; it is the total strain minus
    ``eps_e`` under the small-strain additive split.
    """

    eps_e: np.ndarray = field(default_factory=lambda: np.zeros(6))
    ebar_p: float = 0.0
    D: float = 0.0
    sigma: np.ndarray = field(default_factory=lambda: np.zeros(6))
    h: float = 1.0
    fractured: bool = False

    @classmethod
    def virgin(cls, params: mm.MaterialParams = mm.REFERENCE) -> "MaterialState":
        h = mm.stress_state_param_h(0.0, 1.0, params)
        return cls(np.zeros(6), 0.0, 0.0, np.zeros(6), h, False)


@dataclass(frozen=True)
class StepResult:
    state: MaterialState
    plastic: bool
    delta_lambda: float
    iterations: int
    f_residual: float
    tangent: np.ndarray | None = None
    softening: bool = False


def trial_step(state: MaterialState, delta_eps, params: mm.MaterialParams = mm.REFERENCE):
    """Elastic predictor: ``(sigma_trial, f_trial)`` with damage frozen at ``state.D``.

    h depends on stress only through η and θ0, which are invariant under the
    scalar degradation factor, so h(σ_trial) is read off the undamaged trial
    stress directly (the h ↔ σ fixed point is reached in one sweep).
    """
    if state.fractured:
        raise TriaxDamageError("material point is fractured")
    eps_tr = state.eps_e + T.as_sym(delta_eps)
    st = T.stress_state(mm.undamaged_stress(eps_tr, params))
    h = mm.stress_state_param_h(st.eta, st.theta0, params)
    sigma = mm.elastic_stress(eps_tr, state.D, h, params)
    return sigma, mm.yield_function_f(sigma, state.ebar_p, state.D, params)


def return_map(state: MaterialState, delta_eps, params: mm.MaterialParams = mm.REFERENCE,
               tangent: bool = True, kernel=None) -> StepResult:
    """Advance ``state`` by the strain increment ``delta_eps``.

    Fracture (D >= Dc, hD >= Dc or 1 - hD <= 1e-6) is reported through
    ``state.fractured``; the returned state then sits exactly at the
    critical damage within the increment.  The test on hD matters when
    h > 1: D itself is then bounded by 1/h and may never reach Dc.
    """
    if state.fractured:
        raise TriaxDamageError("material point is fractured")
    k = kernel if kernel is not None else _backend.kernel
    deps = T.as_sym(delta_eps)
    (eps_e, ebar_p, D, h, sigma, plastic, dlam, iters, f_res, fractured,
     status) = k.update_point(params.to_array(), np.asarray(state.eps_e, dtype=float),
                              float(state.ebar_p), float(state.D), deps)
    if status != 0:
        raise ConvergenceError(
            f"return map did not converge in {params.max_iter} iterations "
            f"(|f| = {abs(f_res):.3e})",
            residual=abs(f_res),
        )
    new = MaterialState(np.array(eps_e, dtype=float), float(ebar_p), float(D),
                        np.array(sigma, dtype=float), float(h), bool(fractured))
    step = StepResult(new, bool(plastic), float(dlam), int(iters), float(f_res))
    if tangent and not fractured:
        C, soft = _tangent(new, step.plastic, params)
        step = StepResult(new, step.plastic, step.delta_lambda, step.iterations,
                          step.f_residual, C, soft)
    return step


def _flow_pieces(state: MaterialState, params):
    n = mm.df_dsigma(state.sigma, state.ebar_p, state.D, params)
    k = math.sqrt(2.0 / 3.0 * T.ddot(n, n))
    Y = mm.energy_release_Y(state.eps_e, state.h, params)
    q = mm.damage_potential_rate(Y, state.D, state.h, params)
    return n, k, q


def plastic_modulus(state: MaterialState, params: mm.MaterialParams = mm.REFERENCE) -> float:
    """Hardening modulus ``-∂f/∂ε̄p · dε̄p/dλ - ∂f/∂D · dD/dλ`` at a plastic state."""
    n, k, q = _flow_pieces(state, params)
    st = T.stress_state(state.sigma)
    fe = mm.df_debar(state.ebar_p, st.eta, st.theta0, params)
    fD = mm.df_dD(state.sigma, state.D, params)
    return -fe * k - fD * q


def _mandel_stiffness(params):
    lam, mu = mm.elastic_constants(params)
    C = np.zeros((6, 6))
    C[:3, :3] = lam
    C[np.arange(6), np.arange(6)] += 2.0 * mu
    return C


def _tangent(state: MaterialState, plastic: bool, params):
    """Continuum elastoplastic-damage tangent as a Voigt 6x6 matrix.

    Rate form of σ = (1 - h(σ) D) C : εe; the h(σ) dependence enters through
    ``M = I + (D/ω) σ ⊗ ∂h/∂σ``.  With M = I this is exactly

        C_ω - (C_ω:n - ∂σ/∂D ∂F/∂Y) ⊗ (∂f/∂σ : C_ω) / H_ep,
        H_ep = h_p + ∂f/∂σ : C_ω : n - ∂f/∂σ : ∂σ/∂D ∂F/∂Y.

    Returns ``(tangent, softening)`` where softening flags H_ep <= 0.
    """
    h, D = state.h, state.D
    w = 1.0 - h * D
    Cm = w * _mandel_stiffness(params)
    sig = state.sigma
    M = np.eye(6)
    st = T.stress_state(sig)
    if D != 0.0 and not st.degenerate:
        M += (D / w) * np.outer(T.to_mandel(sig), T.to_mandel(mm.dh_dsigma(sig, params)))
    P = np.linalg.solve(M, Cm)
    soft = False
    if plastic:
        n, k, q = _flow_pieces(state, params)
        fs = T.to_mandel(mm.df_dsigma(sig, state.ebar_p, D, params, full=True))
        fe = mm.df_debar(state.ebar_p, st.eta, st.theta0, params)
        fD = mm.df_dD(sig, D, params)
        b = np.linalg.solve(M, Cm @ T.to_mandel(n) + (h * q / w) * T.to_mandel(sig))
        H = fs @ b - fD * q - fe * k
        soft = H <= 0.0
        P = P - np.outer(b, P.T @ fs) / H
    inv = 1.0 / T.MANDEL
    return inv[:, None] * P * inv[None, :], soft


def consistent_tangent(step: StepResult, params: mm.MaterialParams = mm.REFERENCE) -> np.ndarray:
    """Tangent of a converged step (Voigt convention: acts on engineering shear)."""
    if step.tangent is not None:
        return step.tangent
    return _tangent(step.state, step.plastic, params)[0]


def elastic_tangent(state: MaterialState, params: mm.MaterialParams = mm.REFERENCE) -> np.ndarray:
    return _tangent(state, False, params)[0]


def apply_tangent(tangent: np.ndarray, delta_eps) -> np.ndarray:
    """``dσ`` (tensor components) for a tensor-component strain increment."""
    return tangent @ T.to_voigt_strain(T.as_sym(delta_eps))
