"""Load-path drivers, sweeps and calibration fits built on the point integrator."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares

from . import integrator as I
from . import material_model as mm
from . import tensors as T
from .errors import ConvergenceError, InsufficientDataError, TriaxDamageError

STRAIN = "strain"
STRESS = "stress"

#: power-law damage locus ε̄f = LOCUS_COEF * h ** LOCUS_EXP
LOCUS_COEF = 0.44717
LOCUS_EXP = -1.72555

#: accepted mixed-control stress error, relative to E
CONTROL_TOL = 1e-6
# target of the mixed-control Newton; CONTROL_TOL is only the acceptance bound
_CONTROL_TARGET = 1e-12


class MixedControlError(ConvergenceError):
    """Stress-controlled components could not be matched.

    ``records`` holds the steps completed before the failure.
    """

    def __init__(self, message, residual=float("nan"), component=None, records=None):
        super().__init__(message, residual)
        self.component = component
        self.records = records or []


@dataclass(frozen=True)
class PathSpec:
    """Loading program: each component is strain- or stress-controlled and
    ramped linearly from zero to its target over ``steps`` increments."""

    steps: int
    modes: tuple = (STRAIN,) * 6
    targets: tuple = (0.0,) * 6

    def __post_init__(self):
        if int(self.steps) != self.steps or self.steps < 1:
            raise ValueError("steps must be a positive integer")
        if len(self.modes) != 6 or len(self.targets) != 6:
            raise ValueError("need a control mode and a target for each of the 6 components")
        bad = [m for m in self.modes if m not in (STRAIN, STRESS)]
        if bad:
            raise ValueError(f"unknown control mode(s) {bad}")
        if STRAIN not in self.modes:
            raise ValueError("at least one component must be strain-controlled")
        object.__setattr__(self, "modes", tuple(self.modes))
        object.__setattr__(self, "targets", tuple(float(t) for t in self.targets))
        object.__setattr__(self, "steps", int(self.steps))

    @classmethod
    def uniaxial_tension(cls, strain=0.7, steps=2000):
        return cls(steps, (STRAIN,) + (STRESS,) * 5, (strain,) + (0.0,) * 5)

    @classmethod
    def uniaxial_compression(cls, strain=0.7, steps=2000):
        return cls(steps, (STRAIN,) + (STRESS,) * 5, (-abs(strain),) + (0.0,) * 5)

    @classmethod
    def simple_shear(cls, strain=0.5, steps=2000):
        """Tensor shear ε12 driven; every other stress component held at zero."""
        modes = (STRESS, STRESS, STRESS, STRAIN, STRESS, STRESS)
        return cls(steps, modes, (0.0, 0.0, 0.0, strain, 0.0, 0.0))

    @classmethod
    def preset(cls, name, strain=None, steps=None):
        makers = {
            "uniaxial_tension": cls.uniaxial_tension,
            "uniaxial_compression": cls.uniaxial_compression,
            "simple_shear": cls.simple_shear,
        }
        if name not in makers:
            raise ValueError(f"unknown path preset {name!r}; choose from {sorted(makers)}")
        kw = {}
        if strain is not None:
            kw["strain"] = strain
        if steps is not None:
            kw["steps"] = steps
        return makers[name](**kw)


PATH_PRESETS = ("uniaxial_tension", "uniaxial_compression", "simple_shear")


@dataclass(frozen=True)
class SimRecord:
    step: int
    eps: np.ndarray
    sigma: np.ndarray
    ebar_p: float
    D: float
    h: float
    eta: float
    theta0: float
    f_res: float
    plastic: bool
    fractured: bool


def _record(step, eps, res: I.StepResult):
    s = res.state
    st = T.stress_state(s.sigma)
    return SimRecord(step, eps.copy(), s.sigma.copy(), s.ebar_p, s.D, s.h,
                     st.eta, st.theta0, res.f_residual, res.plastic, s.fractured)


def _solve_step(state, deps, free, A, b, params, kernel=None):
    """Return-map a strain increment whose ``free`` components are chosen so
    that ``A @ sigma = b``.  ``deps`` supplies the fixed components and the
    initial guess for the free ones."""
    deps = np.array(deps, dtype=float)
    if not len(free):
        return I.return_map(state, deps, params, kernel=kernel), deps
    free = np.asarray(free)
    wfree = T.WEIGHTS[free]
    if not np.any(deps[free]):
        # no history to extrapolate from: elastic predictor for the free part
        Ce = I.elastic_tangent(state, params) * T.WEIGHTS[None, :]
        r0 = A @ (state.sigma + Ce @ deps) - b
        deps[free] -= np.linalg.solve(A @ Ce[:, free], r0)
    scale = params.E
    tol_ok = CONTROL_TOL * scale
    tol_target = _CONTROL_TARGET * scale
    best = None
    for it in range(40):
        res = I.return_map(state, deps, params, kernel=kernel)
        r = A @ res.state.sigma - b
        err = float(np.max(np.abs(r)))
        if best is None or err < best[0]:
            best = (err, res, deps.copy(), int(np.argmax(np.abs(r))))
        if err <= tol_target:
            break
        if it >= 25 and err <= tol_ok:
            break
        if it < 20:
            Tn = res.tangent if res.tangent is not None else I.elastic_tangent(res.state, params)
            J = A @ (Tn[:, free] * wfree[None, :])
        else:
            # finite-difference Jacobian for stubborn steps
            J = np.empty((len(b), len(free)))
            for j, c in enumerate(free):
                du = 1e-7 * max(1e-3, abs(deps[c]))
                d2 = deps.copy()
                d2[c] += du
                s2 = I.return_map(state, d2, params, tangent=False, kernel=kernel).state.sigma
                J[:, j] = (A @ s2 - b - r) / du
        try:
            du = np.linalg.solve(J, -r)
        except np.linalg.LinAlgError:
            break
        deps[free] += du
    err, res, deps_best, comp = best
    if err > tol_ok:
        raise MixedControlError(
            f"mixed control did not converge: worst stress error {err:.3e} MPa "
            f"on constraint {comp}", residual=err, component=comp)
    return res, deps_best


def run_path(params: mm.MaterialParams, path: PathSpec, kernel=None, state=None):
    """Drive one material point along ``path``; returns one record per step.

    Stops after the first fractured step.  On a control failure raises
    :class:`MixedControlError` carrying the completed records.
    """
    state = state if state is not None else I.MaterialState.virgin(params)
    modes = np.array(path.modes)
    targets = np.array(path.targets)
    strain_idx = np.flatnonzero(modes == STRAIN)
    free = np.flatnonzero(modes == STRESS)
    A = np.zeros((len(free), 6))
    A[np.arange(len(free)), free] = 1.0
    eps = np.zeros(6)
    guess = np.zeros(6)
    records = []
    for k in range(1, path.steps + 1):
        deps = guess.copy()
        # prescribed components follow target * k / steps exactly
        prescribed = targets[strain_idx] * k / path.steps
        deps[strain_idx] = prescribed - eps[strain_idx]
        b = targets[free] * k / path.steps
        try:
            res, deps = _solve_step(state, deps, free, A, b, params, kernel)
        except (MixedControlError, ConvergenceError) as exc:
            raise MixedControlError(str(exc), exc.residual,
                                    getattr(exc, "component", None), records) from exc
        eps = eps + deps
        eps[strain_idx] = prescribed
        state = res.state
        records.append(_record(k, eps, res))
        guess = deps
        if state.fractured:
            break
    return records


def run_proportional(params: mm.MaterialParams, eta, theta0, d_eps=1e-3, max_strain=3.0,
                     kernel=None):
    """Proportional stress path with fixed (η, θ0).

    The largest principal component of the target stress direction is strain
    driven; the others follow it in fixed ratio and shears stay at zero.
    Runs until fracture or until the driven strain reaches ``max_strain``.
    """
    d = T.principal_stress_direction(eta, theta0)
    k = int(np.argmax(np.abs(d[:3])))
    free = np.array([i for i in range(6) if i != k])
    A = np.zeros((5, 6))
    for row, j in enumerate(free):
        A[row, j] = 1.0
        if j < 3:
            A[row, k] = -d[j] / d[k]
    b = np.zeros(5)
    inc = math.copysign(d_eps, d[k])
    state = I.MaterialState.virgin(params)
    eps = np.zeros(6)
    guess = np.zeros(6)
    records = []
    nsteps = int(math.ceil(max_strain / d_eps))
    for step in range(1, nsteps + 1):
        deps = guess.copy()
        deps[k] = inc
        res, deps = _solve_step(state, deps, free, A, b, params, kernel)
        eps = eps + deps
        state = res.state
        records.append(_record(step, eps, res))
        guess = deps
        if state.fractured:
            break
    return records


def fracture_strain(records):
    """ε̄p at the first fractured record, or ``None``.

    The integrator already places a fractured state at D = Dc inside its
    increment, so no further interpolation is needed.
    """
    for r in records:
        if r.fractured:
            return r.ebar_p
    return None


@dataclass(frozen=True)
class PathSummary:
    peak_stress: float
    ebar_p_at_peak: float
    fracture_strain: float | None
    steps: int


def summarize(records) -> PathSummary:
    seq = np.array([T.stress_state(r.sigma).sigma_eq for r in records])
    i = int(np.argmax(seq)) if len(seq) else 0
    return PathSummary(
        float(seq[i]) if len(seq) else 0.0,
        records[i].ebar_p if records else 0.0,
        fracture_strain(records),
        len(records),
    )


# --------------------------------------------------------------------------
# yield surface
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class YieldSurface:
    """Normalized radius σy/σ̄ against θ0, plus its π-plane unfolding.

    ``phi`` is the polar angle in the deviatoric plane measured from a
    tension meridian; the sector [0, π/3] is mirrored around the full turn.
    """

    theta0: np.ndarray
    radius: np.ndarray
    phi: np.ndarray
    polar_theta0: np.ndarray
    polar_radius: np.ndarray


def _normalized_radius(params, ebar_p, eta, theta0):
    sbar, _ = mm.hardening(ebar_p, params)
    return mm.yield_stress(ebar_p, eta, theta0, params) / sbar


def fold_angle(phi):
    """θ0 of the π-plane direction at polar angle ``phi`` (from a tension meridian)."""
    sector = math.fmod(phi, 2.0 * math.pi / 3.0)
    if sector < 0:
        sector += 2.0 * math.pi / 3.0
    theta = sector if sector <= math.pi / 3.0 else 2.0 * math.pi / 3.0 - sector
    return 1.0 - 6.0 * theta / math.pi


def polar_radius(params, phi, ebar_p=0.0, eta=None):
    eta = params.eta0 if eta is None else eta
    return _normalized_radius(params, ebar_p, eta, fold_angle(phi))


def yield_surface_sweep(params: mm.MaterialParams, ebar_p=0.0, eta=None, samples=181):
    if samples < 3:
        raise ValueError("samples must be >= 3")
    eta = params.eta0 if eta is None else eta
    theta0 = np.linspace(-1.0, 1.0, samples)
    radius = np.array([_normalized_radius(params, ebar_p, eta, t) for t in theta0])
    phi = np.linspace(0.0, 2.0 * math.pi, 6 * (samples - 1) + 1)
    pt = np.array([fold_angle(a) for a in phi])
    pr = np.array([_normalized_radius(params, ebar_p, eta, t) for t in pt])
    return YieldSurface(theta0, radius, phi, pt, pr)


# --------------------------------------------------------------------------
# damage locus
# --------------------------------------------------------------------------


def locus_from_h(h):
    if not h > 0:
        raise ValueError(f"stress-state parameter must be positive, got {h}")
    return LOCUS_COEF * h**LOCUS_EXP


@dataclass(frozen=True)
class LocusRow:
    eta: float
    theta0: float
    h: float
    ebar_f: float
    status: str = "ok"


@dataclass
class LocusTable:
    rows: list = field(default_factory=list)

    def column(self, name):
        return np.array([getattr(r, name) for r in self.rows])


#: default sweep grid spanning the tabulated specimens and the negative cut-off region
DEFAULT_ETA_GRID = tuple(np.round(np.arange(-0.6, 1.0 + 1e-9, 0.05), 10))
DEFAULT_THETA0_GRID = (-1.0, -0.5, 0.0, 0.5, 1.0)


def _locus_cell(args):
    params, eta, theta0, mode, d_eps, max_strain = args
    h = mm.stress_state_param_h(eta, theta0, params)
    if mode == "power_law":
        if h <= 0:
            return LocusRow(eta, theta0, h, math.nan, "failed: h <= 0")
        return LocusRow(eta, theta0, h, locus_from_h(h))
    try:
        recs = run_proportional(params, eta, theta0, d_eps=d_eps, max_strain=max_strain)
    except TriaxDamageError as exc:
        return LocusRow(eta, theta0, h, math.nan, f"failed: {exc}")
    ef = fracture_strain(recs)
    if ef is None:
        return LocusRow(eta, theta0, h, math.nan, "failed: no fracture")
    return LocusRow(eta, theta0, h, ef)


def damage_locus_sweep(params: mm.MaterialParams, eta_grid=DEFAULT_ETA_GRID,
                       theta0_grid=DEFAULT_THETA0_GRID, mode="power_law", pairs=None,
                       d_eps=1e-3, max_strain=3.0, workers=1):
    """Fracture strain over a (η, θ0) grid, or over explicit ``pairs``.

    ``mode`` is ``"power_law"`` (h mapped through the fitted power law) or
    ``"simulated"`` (proportional paths run to fracture).  A failing cell is
    marked in its status and the sweep continues.
    """
    if mode not in ("power_law", "simulated"):
        raise ValueError(f"unknown locus mode {mode!r}")
    if pairs is None:
        if not len(eta_grid) or not len(theta0_grid):
            raise ValueError("empty sweep grid")
        pairs = [(e, t) for t in theta0_grid for e in eta_grid]
    jobs = [(params, float(e), float(t), mode, d_eps, max_strain) for e, t in pairs]
    if workers > 1 and mode == "simulated":
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_locus_cell, jobs))
    else:
        rows = [_locus_cell(j) for j in jobs]
    return LocusTable(rows)


# --------------------------------------------------------------------------
# calibration
# --------------------------------------------------------------------------


def fit_power_law(points):
    """Least squares of ``log ε̄f = log c + k log h``; returns ``(c, k)``."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 2 or pts.shape[1] != 2:
        raise InsufficientDataError("need at least 2 (h, ebar_f) points")
    h, ef = pts[:, 0], pts[:, 1]
    if np.any(h <= 0) or np.any(ef <= 0):
        raise ValueError("h and ebar_f must be positive")
    if np.ptp(h) == 0:
        raise InsufficientDataError("all h values are equal")
    slope, icept = np.polyfit(np.log(h), np.log(ef), 1)
    return float(math.exp(icept)), float(slope)


@dataclass(frozen=True)
class HardeningFit:
    A: float
    B: float
    n: float
    residual: float


def fit_hardening(points) -> HardeningFit:
    """Fit ``σ̄ = A + B ε̄pⁿ`` to pre-necking (ε̄p, σ̄) data.

    Levenberg-Marquardt from A0 = min σ̄, B0 = max σ̄ - min σ̄, n0 = 0.5.
    ``residual`` is the root-mean-square misfit in MPa.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 3:
        raise InsufficientDataError("need at least 3 (ebar_p, sigma_bar) points")
    e, s = pts[:, 0], pts[:, 1]
    if np.any(e < 0):
        raise ValueError("ebar_p must be nonnegative")
    if np.ptp(e) == 0:
        raise InsufficientDataError("all strains are equal")

    def resid(x):
        return x[0] + x[1] * np.power(e, x[2]) - s

    def jac(x):
        with np.errstate(divide="ignore", invalid="ignore"):
            en = np.power(e, x[2])
            dn = np.where(e > 0, x[1] * en * np.log(np.where(e > 0, e, 1.0)), 0.0)
        return np.column_stack([np.ones_like(e), en, dn])

    x0 = [s.min(), max(s.max() - s.min(), 1e-12), 0.5]
    sol = least_squares(resid, x0, jac=jac, method="lm", xtol=1e-15, ftol=1e-15,
                        gtol=1e-15, max_nfev=20000)
    if not sol.success:
        raise ConvergenceError(f"hardening fit failed: {sol.message}",
                               residual=float(np.sqrt(np.mean(sol.fun**2))))
    A, B, n = sol.x
    return HardeningFit(float(A), float(B), float(n), float(np.sqrt(np.mean(sol.fun**2))))
