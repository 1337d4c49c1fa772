"""Symmetric second-order tensors, stress invariants and Lode geometry.

A symmetric tensor is stored as a length-6 float array in the order
``(t11, t22, t33, t12, t23, t13)``.  Shear entries are *tensor* components,
not doubled engineering shears, so the double contraction weights them by 2:

    a : b = a11 b11 + a22 b22 + a33 b33 + 2 (a12 b12 + a23 b23 + a13 b13)

Gradients returned here follow the same convention: ``G`` is such that
``df = G : dσ`` for a symmetric perturbation ``dσ``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateStressError, LodeSingularityError

SymTensor = np.ndarray

#: contraction weights for the tensor-shear storage
WEIGHTS = np.array([1.0, 1.0, 1.0, 2.0, 2.0, 2.0])
IDENTITY = np.array([1.0, 1.0, 1.0, 0.0, 0.0, 0.0])
#: Mandel scaling: mandel = MANDEL * tensor_components
MANDEL = np.array([1.0, 1.0, 1.0, math.sqrt(2.0), math.sqrt(2.0), math.sqrt(2.0)])

#: guard on |sin 3θ| below which the raw Lode gradient is treated as singular
SIN3THETA_GUARD = 1e-6
#: σeq below this (relative to the tensor norm, floored at 1) counts as zero
DEGENERATE_TOL = 1e-12


def sym(t11=0.0, t22=0.0, t33=0.0, t12=0.0, t23=0.0, t13=0.0) -> SymTensor:
    return np.array([t11, t22, t33, t12, t23, t13], dtype=float)


def diag(a, b, c) -> SymTensor:
    return sym(a, b, c)


def as_sym(a) -> SymTensor:
    """Coerce a 6-sequence or a symmetric 3x3 matrix into tensor storage."""
    arr = np.asarray(a, dtype=float)
    if arr.shape == (3, 3):
        return from_matrix(arr)
    if arr.shape != (6,):
        raise ValueError(f"expected 6 components or a 3x3 matrix, got shape {arr.shape}")
    return arr.copy()


def to_matrix(a: SymTensor) -> np.ndarray:
    return np.array(
        [[a[0], a[3], a[5]], [a[3], a[1], a[4]], [a[5], a[4], a[2]]], dtype=float
    )


def from_matrix(m) -> SymTensor:
    m = np.asarray(m, dtype=float)
    return np.array(
        [
            m[0, 0],
            m[1, 1],
            m[2, 2],
            0.5 * (m[0, 1] + m[1, 0]),
            0.5 * (m[1, 2] + m[2, 1]),
            0.5 * (m[0, 2] + m[2, 0]),
        ]
    )


def ddot(a: SymTensor, b: SymTensor) -> float:
    return float(np.dot(WEIGHTS * a, b))


def norm(a: SymTensor) -> float:
    return math.sqrt(ddot(a, a))


def trace(a: SymTensor) -> float:
    return float(a[0] + a[1] + a[2])


def deviator(a: SymTensor) -> SymTensor:
    out = np.array(a, dtype=float)
    out[:3] -= trace(a) / 3.0
    return out


def square(a: SymTensor) -> SymTensor:
    """Matrix product ``a·a`` (symmetric for symmetric ``a``)."""
    a11, a22, a33, a12, a23, a13 = a
    return np.array(
        [
            a11 * a11 + a12 * a12 + a13 * a13,
            a12 * a12 + a22 * a22 + a23 * a23,
            a13 * a13 + a23 * a23 + a33 * a33,
            a11 * a12 + a12 * a22 + a13 * a23,
            a12 * a13 + a22 * a23 + a23 * a33,
            a11 * a13 + a12 * a23 + a13 * a33,
        ]
    )


def det(a: SymTensor) -> float:
    a11, a22, a33, a12, a23, a13 = a
    return float(
        a11 * a22 * a33
        + 2.0 * a12 * a23 * a13
        - a11 * a23 * a23
        - a22 * a13 * a13
        - a33 * a12 * a12
    )


def to_mandel(a: SymTensor) -> np.ndarray:
    return MANDEL * a


def from_mandel(v) -> SymTensor:
    return np.asarray(v, dtype=float) / MANDEL


def to_voigt_strain(eps: SymTensor) -> np.ndarray:
    """Tensor components to engineering-shear Voigt strain."""
    return WEIGHTS * eps


# --------------------------------------------------------------------------
# invariants and stress state
# --------------------------------------------------------------------------


def invariants(sigma: SymTensor):
    """Return ``(I1, J2, J3)``: trace and the 2nd/3rd invariants of the deviator."""
    s = deviator(sigma)
    return trace(sigma), 0.5 * ddot(s, s), det(s)


def derived_quantities(sigma: SymTensor):
    """Return ``(sigma_m, sigma_eq, r)`` with ``r`` the signed real cube root."""
    i1, j2, j3 = invariants(sigma)
    sigma_eq = math.sqrt(3.0 * max(j2, 0.0))
    return i1 / 3.0, sigma_eq, float(np.cbrt(13.5 * j3))


@dataclass(frozen=True)
class StressState:
    """Scalar descriptors of a stress tensor.

    ``degenerate`` is set when ``sigma_eq`` vanishes; the angular fields then
    hold the designated defaults (η = 0, χ = 1, θ = 0, θ0 = 1).
    """

    sigma_m: float
    sigma_eq: float
    r: float
    eta: float
    chi: float
    theta: float
    theta0: float
    degenerate: bool = False


def _is_degenerate(sigma_eq: float, sigma: SymTensor) -> bool:
    return sigma_eq <= DEGENERATE_TOL * max(1.0, norm(sigma))


def stress_state(sigma: SymTensor) -> StressState:
    sigma = np.asarray(sigma, dtype=float)
    sigma_m, sigma_eq, r = derived_quantities(sigma)
    if _is_degenerate(sigma_eq, sigma):
        return StressState(sigma_m, sigma_eq, r, 0.0, 1.0, 0.0, 1.0, True)
    # χ from J3 directly: (r/σeq)^3 loses a few ulps through the cube root
    _, j2, j3 = invariants(sigma)
    chi = min(1.0, max(-1.0, 13.5 * j3 / sigma_eq**3))
    theta = math.acos(chi) / 3.0
    return StressState(
        sigma_m=sigma_m,
        sigma_eq=sigma_eq,
        r=r,
        eta=sigma_m / sigma_eq,
        chi=chi,
        theta=theta,
        theta0=1.0 - 6.0 * theta / math.pi,
    )


# --------------------------------------------------------------------------
# stress gradients
# --------------------------------------------------------------------------


def _require_nondegenerate(sigma):
    st = stress_state(sigma)
    if st.degenerate:
        raise DegenerateStressError("equivalent stress is zero; gradient undefined")
    return st


def dseq_dsigma(sigma: SymTensor) -> SymTensor:
    """Gradient of the von Mises stress, ``(3/2) s / σeq``."""
    sigma = np.asarray(sigma, dtype=float)
    st = _require_nondegenerate(sigma)
    return 1.5 * deviator(sigma) / st.sigma_eq


def deta_dsigma(sigma: SymTensor) -> SymTensor:
    """Deviatoric part of the triaxiality gradient, ``-3η s / (2 σeq²)``.

    The hydrostatic part ``δ/(3σeq)`` is left out on purpose: the flow rule
    only uses the deviatoric gradient.  See :func:`deta_dsigma_full`.
    """
    sigma = np.asarray(sigma, dtype=float)
    st = _require_nondegenerate(sigma)
    return -1.5 * st.eta / st.sigma_eq**2 * deviator(sigma)


def deta_dsigma_full(sigma: SymTensor) -> SymTensor:
    sigma = np.asarray(sigma, dtype=float)
    st = _require_nondegenerate(sigma)
    return deta_dsigma(sigma) + IDENTITY / (3.0 * st.sigma_eq)


def dchi_dsigma(sigma: SymTensor) -> SymTensor:
    """Gradient of ``χ = 27 J3 / (2 σeq³)``; it vanishes at χ = ±1."""
    sigma = np.asarray(sigma, dtype=float)
    st = _require_nondegenerate(sigma)
    s = deviator(sigma)
    j2 = 0.5 * ddot(s, s)
    dj3 = square(s) - (2.0 / 3.0) * j2 * IDENTITY
    seq = st.sigma_eq
    return 13.5 * dj3 / seq**3 - 4.5 * st.chi / seq**2 * s


def dtheta0_dsigma(sigma: SymTensor, guard: float = SIN3THETA_GUARD) -> SymTensor:
    """Gradient of the Lode parameter θ0 = 1 - 6θ/π.

    Assembled by the chain rule through χ = cos 3θ; the result is deviatoric.
    Raises :class:`LodeSingularityError` when ``|sin 3θ| <= guard``.
    """
    sigma = np.asarray(sigma, dtype=float)
    st = _require_nondegenerate(sigma)
    sin3 = math.sin(3.0 * st.theta)
    if abs(sin3) <= guard:
        raise LodeSingularityError(f"|sin 3θ| = {abs(sin3):.3e} at or below guard {guard}")
    return 2.0 / (math.pi * sin3) * dchi_dsigma(sigma)


def dtheta0_dsigma_printed(sigma: SymTensor) -> SymTensor:
    """The closed form as commonly printed, kept for comparison only.

    ``9/(π σeq sin3θ) · (cos3θ/σeq · s - 3/σeq² · s·s)``.  It differs from
    the true gradient in sign and in the missing ``-(2/3) J2 δ`` term, which
    the test-suite demonstrates against finite differences.
    """
    sigma = np.asarray(sigma, dtype=float)
    st = _require_nondegenerate(sigma)
    s = deviator(sigma)
    seq = st.sigma_eq
    coef = 9.0 / (math.pi * seq * math.sin(3.0 * st.theta))
    return coef * (st.chi / seq * s - 3.0 / seq**2 * square(s))


def lode_chain(sigma: SymTensor, dg_dtheta0: float, guard: float = SIN3THETA_GUARD) -> SymTensor:
    """Guarded product ``dg/dθ0 · dθ0/dσ``.

    Returns the zero tensor where the raw Lode gradient is singular; there the
    smoothing factor ``1 - (θ0²)^m`` inside ``dg/dθ0`` already annihilates it.
    """
    sigma = np.asarray(sigma, dtype=float)
    if dg_dtheta0 == 0.0:
        return np.zeros(6)
    try:
        return dg_dtheta0 * dtheta0_dsigma(sigma, guard)
    except LodeSingularityError:
        return np.zeros(6)


def principal_stress_direction(eta: float, theta0: float) -> SymTensor:
    """Diagonal stress with unit σeq, triaxiality ``eta`` and Lode parameter ``theta0``."""
    theta = math.pi * (1.0 - theta0) / 6.0
    s = [
        (2.0 / 3.0) * math.cos(theta - 2.0 * math.pi * k / 3.0) for k in range(3)
    ]
    return diag(eta + s[0], eta + s[1], eta + s[2])
