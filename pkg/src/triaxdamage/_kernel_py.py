"""Pure-Python material-point update kernel.

This is the reference implementation of the hot loop; ``_ckernel.pyx`` is a
typed transcription of the same algorithm and must stay in lock-step with it.
Everything works on plain floats and 6-lists (tensor-shear storage) so that
both versions follow the same arithmetic.

Props packing order is ``MaterialParams._ARRAY_FIELDS``.
"""

import math

PI = math.pi
SLOPE_FLOOR = 1e-8
SIN3_GUARD = 1e-6
SAT_EPS = 1e-6          # fractured once 1 - hD <= SAT_EPS
DIR_TOL = 1e-10         # relative change of the flow direction at convergence
TIGHT = 1e-3            # iterate to TIGHT * tol_f when the solve allows it
MAX_CUTS = 10
FP_SWEEPS = 200       # flow-direction fixed-point sweeps in the scalar fallback
MIN_RELAX = 1.0 / 64.0

# status codes
OK = 0
NO_CONVERGENCE = 1


class _Mat:
    __slots__ = (
        "E", "nu", "A", "B", "n", "Y0", "alpha", "beta", "gamma", "c_eta",
        "ctt", "cts", "ctc", "det", "dts", "dec", "m", "eta0", "Dc", "tol_f",
        "max_iter", "lam", "mu",
    )

    def __init__(self, props):
        (self.E, self.nu, self.A, self.B, self.n, self.Y0, self.alpha, self.beta,
         self.gamma, self.c_eta, self.ctt, self.cts, self.ctc, self.det, self.dts,
         self.dec, m, self.eta0, self.Dc, self.tol_f, max_iter) = [float(v) for v in props]
        self.m = int(m)
        self.max_iter = int(max_iter)
        self.lam = self.nu * self.E / ((1.0 + self.nu) * (1.0 - 2.0 * self.nu))
        self.mu = self.E / (2.0 * (1.0 + self.nu))


def _ddot(a, b):
    return (a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
            + 2.0 * (a[3] * b[3] + a[4] * b[4] + a[5] * b[5]))


def _elastic(mat, e):
    tr = mat.lam * (e[0] + e[1] + e[2])
    m2 = 2.0 * mat.mu
    return [m2 * e[0] + tr, m2 * e[1] + tr, m2 * e[2] + tr, m2 * e[3], m2 * e[4], m2 * e[5]]


class _Stress:
    """Invariant data of one stress tensor."""

    __slots__ = ("s", "seq", "eta", "chi", "theta", "theta0", "sin3", "degenerate")

    def __init__(self, sig):
        p = (sig[0] + sig[1] + sig[2]) / 3.0
        s = [sig[0] - p, sig[1] - p, sig[2] - p, sig[3], sig[4], sig[5]]
        j2 = 0.5 * _ddot(s, s)
        seq = math.sqrt(3.0 * j2)
        nrm = math.sqrt(_ddot(sig, sig))
        self.s = s
        self.seq = seq
        if seq <= 1e-12 * max(1.0, nrm):
            self.degenerate = True
            self.eta, self.chi, self.theta, self.theta0, self.sin3 = 0.0, 1.0, 0.0, 1.0, 0.0
            return
        self.degenerate = False
        j3 = (s[0] * s[1] * s[2] + 2.0 * s[3] * s[4] * s[5]
              - s[0] * s[4] * s[4] - s[1] * s[5] * s[5] - s[2] * s[3] * s[3])
        chi = 13.5 * j3 / (seq * seq * seq)
        if chi > 1.0:
            chi = 1.0
        elif chi < -1.0:
            chi = -1.0
        self.eta = p / seq
        self.chi = chi
        self.theta = math.acos(chi) / 3.0
        self.theta0 = 1.0 - 6.0 * self.theta / PI
        self.sin3 = math.sin(3.0 * self.theta)


def _lode_chain(st, dg):
    """dg/dθ0 · dθ0/dσ (deviatoric), zero inside the singular band."""
    if dg == 0.0 or abs(st.sin3) <= SIN3_GUARD:
        return [0.0] * 6
    s = st.s
    seq = st.seq
    j2 = 0.5 * _ddot(s, s)
    sq = [
        s[0] * s[0] + s[3] * s[3] + s[5] * s[5],
        s[3] * s[3] + s[1] * s[1] + s[4] * s[4],
        s[5] * s[5] + s[4] * s[4] + s[2] * s[2],
        s[0] * s[3] + s[3] * s[1] + s[5] * s[4],
        s[3] * s[5] + s[1] * s[4] + s[4] * s[2],
        s[0] * s[5] + s[3] * s[4] + s[5] * s[2],
    ]
    a = 13.5 / (seq * seq * seq)
    b = 4.5 * st.chi / (seq * seq)
    c = dg * 2.0 / (PI * st.sin3)
    out = [0.0] * 6
    for i in range(6):
        dj3 = sq[i] - (2.0 / 3.0) * j2 if i < 3 else sq[i]
        out[i] = c * (a * dj3 - b * s[i])
    return out


class _Eval:
    """Residuals, frozen-direction Jacobian and refreshed flow direction at (Δλ, D)."""

    __slots__ = ("ok", "eps_e", "sig0", "h", "w", "ebar", "sy", "r1", "r2",
                 "j11", "j12", "j21", "j22", "n_new", "q")


def _evaluate(mat, eps_tr, ebar_n, D_n, dlam, D, nv):
    ev = _Eval()
    eps_e = [eps_tr[i] - dlam * nv[i] for i in range(6)]
    sig0 = _elastic(mat, eps_e)
    st = _Stress(sig0)
    ev.ok = False
    if st.degenerate:
        return ev
    t0 = st.theta0
    t2 = t0 * t0
    t2m = t2 ** mat.m
    g = t2 - t2m * t2 / (mat.m + 1)
    dg = 2.0 * t0 * (1.0 - t2m)
    d_ax = mat.det if t0 > 0.0 else mat.dec
    c_ax = mat.ctt if t0 >= 0.0 else mat.ctc
    dh_dg = d_ax * (st.eta - mat.eta0) - mat.dts
    h = 1.0 + mat.dts + dh_dg * g
    w = 1.0 - h * D
    if w <= 0.0:
        return ev
    sqw = math.sqrt(w)
    kn = math.sqrt(_ddot(nv, nv) * (2.0 / 3.0))
    ebar = ebar_n + dlam * kn
    sbar = mat.A + mat.B * ebar ** mat.n
    slope = mat.n * mat.B * max(ebar, SLOPE_FLOOR) ** (mat.n - 1.0)
    tri = 1.0 - mat.c_eta * (st.eta - mat.eta0)
    lode = mat.cts + (c_ax - mat.cts) * g
    sy = sbar * tri * lode
    seq = st.seq
    f = sqw * seq - sy
    psi0 = 0.5 * _ddot(sig0, eps_e)
    Y = h * psi0
    X = (Y - mat.Y0) / mat.gamma
    if X > 0.0:
        Xa = X ** mat.alpha
        wb = w ** mat.beta
        q = Xa / wb
    else:
        Xa = 0.0
        wb = 1.0
        q = 0.0
    r2 = D - D_n - dlam * q

    # gradients with respect to the undamaged stress (all deviatoric)
    s = st.s
    L = _lode_chain(st, dg)
    ceq = 1.5 / seq
    ceta = -1.5 * st.eta / (seq * seq)
    m2 = -2.0 * mat.mu
    v = [m2 * nv[i] for i in range(6)]
    sv = _ddot(s, v)
    seq_d = ceq * sv
    eta_d = ceta * sv
    gl_d = _ddot(L, v)
    h_d = d_ax * g * eta_d + dh_dg * gl_d
    tri_d = -mat.c_eta * eta_d
    lode_d = (c_ax - mat.cts) * gl_d
    sy_d = slope * kn * tri * lode + sbar * (tri_d * lode + tri * lode_d)
    w_d = -D * h_d
    f_d = sqw * seq_d + seq * w_d / (2.0 * sqw) - sy_d
    f_D = -h * seq / (2.0 * sqw)
    psi_d = -_ddot(sig0, nv)
    Y_d = h_d * psi0 + h * psi_d
    if X > 0.0:
        q_d = (-mat.beta * w_d / w * q
               + mat.alpha * X ** (mat.alpha - 1.0) * Y_d / mat.gamma / wb)
        q_D = mat.beta * h / w * q
    else:
        q_d = 0.0
        q_D = 0.0

    # refreshed flow direction at σ = w σ0 (gradients of scale-invariant
    # quantities pick up a factor 1/w)
    df_dh = D * seq / (2.0 * sqw)
    k_eta = (df_dh * d_ax * g + sbar * mat.c_eta * lode) * ceta / w
    k_L = (df_dh * dh_dg - sbar * tri * (c_ax - mat.cts)) / w
    k_eq = ceq / sqw
    n_new = [k_eq * s[i] + k_eta * s[i] + k_L * L[i] for i in range(6)]

    ev.ok = True
    ev.eps_e = eps_e
    ev.sig0 = sig0
    ev.h = h
    ev.w = w
    ev.ebar = ebar
    ev.sy = sy
    ev.r1 = f
    ev.r2 = r2
    ev.j11 = f_d
    ev.j12 = f_D
    ev.j21 = -q - dlam * q_d
    ev.j22 = 1.0 - dlam * q_D
    ev.n_new = n_new
    ev.q = q
    return ev


def _critical(mat, h, D):
    """Fracture test on the damage and on the effective damage hD.

    For h > 1 the damage itself is capped at 1/h < 1, so Dc is applied to hD
    as well; 1 - hD <= SAT_EPS covers Dc = 1.
    """
    return D >= mat.Dc or h * D >= mat.Dc or 1.0 - h * D <= SAT_EPS


def _critical_damage(mat, h):
    """Damage at which :func:`_critical` first holds for a given h."""
    if h <= 0.0:
        return mat.Dc
    d = mat.Dc
    if mat.Dc / h < d:
        d = mat.Dc / h
    if (1.0 - SAT_EPS) / h < d:
        d = (1.0 - SAT_EPS) / h
    return d


def _rel_change(a, b):
    num = 0.0
    den = 0.0
    for i in range(6):
        num += (a[i] - b[i]) ** 2
        den += b[i] ** 2
    if den == 0.0:
        return 0.0 if num == 0.0 else math.inf
    return math.sqrt(num / den)


def _merit(ev, scale):
    r = ev.r1 / scale
    return r * r + ev.r2 * ev.r2


def _newton(mat, eps_tr, ebar_n, D_n, nv, sy_scale):
    """Local Newton on (Δλ, D) with the flow direction refreshed every iterate.

    Returns (converged, dlam, D, nv, ev, iterations).
    """
    tol1 = mat.tol_f * sy_scale
    tol2 = mat.tol_f
    dlam = 0.0
    D = D_n
    ev = _evaluate(mat, eps_tr, ebar_n, D_n, dlam, D, nv)
    if not ev.ok:
        return False, dlam, D, nv, ev, 0
    it = 0
    while it < mat.max_iter:
        it += 1
        dchange = _rel_change(ev.n_new, nv)
        small = abs(ev.r1) <= TIGHT * tol1 and abs(ev.r2) <= TIGHT * tol2
        if small and dchange <= DIR_TOL:
            return True, dlam, D, nv, ev, it
        if small:
            nv = ev.n_new
            ev2 = _evaluate(mat, eps_tr, ebar_n, D_n, dlam, D, nv)
            if not ev2.ok:
                return False, dlam, D, nv, ev, it
            ev = ev2
            continue
        det = ev.j11 * ev.j22 - ev.j12 * ev.j21
        if det == 0.0 or det != det:
            break
        ddl = (-ev.r1 * ev.j22 + ev.j12 * ev.r2) / det
        dD = (-ev.j11 * ev.r2 + ev.j21 * ev.r1) / det
        m0 = _merit(ev, sy_scale)
        t = 1.0
        accepted = None
        for _ in range(MAX_CUTS + 1):
            dl_try = dlam + t * ddl
            D_try = D + t * dD
            if dl_try < 0.0:
                dl_try = 0.0
            if D_try < D_n:
                D_try = D_n
            trial = _evaluate(mat, eps_tr, ebar_n, D_n, dl_try, D_try, nv)
            if trial.ok and _merit(trial, sy_scale) < m0:
                accepted = (dl_try, D_try, trial)
                break
            t *= 0.5
        if accepted is None:
            # no descent along the Newton direction; converged if within tol_f
            if abs(ev.r1) <= tol1 and abs(ev.r2) <= tol2 and dchange <= DIR_TOL:
                return True, dlam, D, nv, ev, it
            break
        dlam, D, ev = accepted
        nv = ev.n_new
        ev2 = _evaluate(mat, eps_tr, ebar_n, D_n, dlam, D, nv)
        if not ev2.ok:
            break
        ev = ev2
    ok = (ev.ok and abs(ev.r1) <= tol1 and abs(ev.r2) <= tol2
          and _rel_change(ev.n_new, nv) <= 1e3 * DIR_TOL)
    return ok, dlam, D, nv, ev, it


# --------------------------------------------------------------------------
# scalar fallback: damage solved exactly for a given Δλ, Δλ by bisection
# --------------------------------------------------------------------------


def _damage_root(mat, h, Y, D_n, dlam):
    """Smallest D >= D_n with D - D_n - Δλ X^α (1-hD)^-β = 0, or -1.0 if none
    exists (runaway damage)."""
    X = (Y - mat.Y0) / mat.gamma
    if X <= 0.0 or dlam == 0.0:
        return D_n
    c = dlam * X ** mat.alpha
    beta = mat.beta
    if 1.0 - h * D_n <= 0.0:
        return -1.0
    if beta == 0.0:
        D = D_n + c
        return D if 1.0 - h * D > 0.0 else -1.0
    if h <= 0.0:
        lo = D_n
        hi = D_n + c * (1.0 - h * D_n) ** (-beta)
    else:
        peak = (1.0 - (c * beta * h) ** (1.0 / (beta + 1.0))) / h
        if peak <= D_n:
            return -1.0
        if peak - D_n - c * (1.0 - h * peak) ** (-beta) < 0.0:
            return -1.0
        lo = D_n
        hi = peak
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if mid - D_n - c * (1.0 - h * mid) ** (-beta) < 0.0:
            lo = mid
        else:
            hi = mid
    return hi


class _Scalar:
    __slots__ = ("runaway", "f", "D", "h", "nv", "eps_e", "sig0", "w", "ebar", "sy")


def _scalar_eval(mat, eps_tr, ebar_n, D_n, dlam, nv):
    """f at Δλ with D solved exactly and the flow direction iterated to a
    fixed point.

    The map n -> n(εtr - Δλ n) overshoots for large increments, so the
    update is under-relaxed, halving the factor whenever the change stops
    shrinking."""
    out = _Scalar()
    relax = 1.0
    prev = math.inf
    for _ in range(FP_SWEEPS):
        eps_e = [eps_tr[i] - dlam * nv[i] for i in range(6)]
        sig0 = _elastic(mat, eps_e)
        st = _Stress(sig0)
        t0 = st.theta0
        t2 = t0 * t0
        g = t2 - t2 ** mat.m * t2 / (mat.m + 1)
        d_ax = mat.det if t0 > 0.0 else mat.dec
        h = 1.0 + mat.dts + (d_ax * (st.eta - mat.eta0) - mat.dts) * g
        Y = h * 0.5 * _ddot(sig0, eps_e)
        D = _damage_root(mat, h, Y, D_n, dlam)
        out.h = h
        out.eps_e = eps_e
        out.sig0 = sig0
        if D < 0.0 or st.degenerate:
            out.runaway = D < 0.0
            out.f = -1.0
            out.D = D
            out.nv = nv
            return out
        ev = _evaluate(mat, eps_tr, ebar_n, D_n, dlam, D, nv)
        if not ev.ok:
            out.runaway = True
            out.f = -1.0
            out.D = -1.0
            out.nv = nv
            return out
        out.runaway = False
        out.f = ev.r1
        out.D = D
        out.w = ev.w
        out.ebar = ev.ebar
        out.sy = ev.sy
        change = _rel_change(ev.n_new, nv)
        out.nv = nv
        if change <= DIR_TOL:
            break
        if change > 0.5 * prev and relax > MIN_RELAX:
            relax *= 0.5
        prev = change
        nv = [nv[i] + relax * (ev.n_new[i] - nv[i]) for i in range(6)]
    return out


def _bisect_multiplier(mat, eps_tr, ebar_n, D_n, nv, f_tr, sy_scale):
    """Bracket and bisect f(Δλ) = 0 on the scalar route.

    Returns (dlam, scalar_eval, runaway_hit)."""
    lo = 0.0
    hi = max(f_tr / (3.0 * mat.mu), 1e-12)
    sc_hi = _scalar_eval(mat, eps_tr, ebar_n, D_n, hi, nv)
    for _ in range(80):
        if sc_hi.runaway or sc_hi.f <= 0.0:
            break
        lo = hi
        nv = sc_hi.nv
        hi *= 2.0
        sc_hi = _scalar_eval(mat, eps_tr, ebar_n, D_n, hi, nv)
    best = sc_hi
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        sc = _scalar_eval(mat, eps_tr, ebar_n, D_n, mid, nv)
        if sc.runaway or sc.f <= 0.0:
            hi = mid
            best = sc
            if not sc.runaway and -sc.f <= TIGHT * mat.tol_f * sy_scale:
                break
        else:
            lo = mid
            nv = sc.nv
            if sc.f <= TIGHT * mat.tol_f * sy_scale:
                hi = mid
                best = sc
                break
    return hi, best, best.runaway


def _fracture_point(mat, eps_tr, ebar_n, D_n, nv, dlam_max):
    """Smallest Δλ in [0, dlam_max] at which D reaches its critical value
    (see :func:`_critical`) or runaway sets in."""

    def crossed(sc):
        if sc.runaway:
            return True
        return _critical(mat, sc.h, sc.D)

    lo = 0.0
    hi = dlam_max
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        sc = _scalar_eval(mat, eps_tr, ebar_n, D_n, mid, nv)
        if crossed(sc):
            hi = mid
        else:
            lo = mid
            nv = sc.nv
    sc = _scalar_eval(mat, eps_tr, ebar_n, D_n, lo, nv)
    return lo, sc


def update_point(props, eps_e, ebar_p, D, deps):
    """Strain-driven update of one material point.

    Returns ``(eps_e, ebar_p, D, h, sigma, plastic, dlam, iterations,
    f_residual, fractured, status)``.
    """
    mat = _Mat(props)
    eps_tr = [float(eps_e[i]) + float(deps[i]) for i in range(6)]
    ebar_n = float(ebar_p)
    D_n = float(D)
    sig0 = _elastic(mat, eps_tr)
    st = _Stress(sig0)
    t0 = st.theta0
    t2 = t0 * t0
    g = t2 - t2 ** mat.m * t2 / (mat.m + 1)
    d_ax = mat.det if t0 > 0.0 else mat.dec
    c_ax = mat.ctt if t0 >= 0.0 else mat.ctc
    h = 1.0 + mat.dts + (d_ax * (st.eta - mat.eta0) - mat.dts) * g
    w = 1.0 - h * D_n
    sbar = mat.A + mat.B * ebar_n ** mat.n
    sy = sbar * (1.0 - mat.c_eta * (st.eta - mat.eta0)) * (mat.cts + (c_ax - mat.cts) * g)
    if _critical(mat, h, D_n):
        wc = w if w > 0.0 else 0.0
        sig = [wc * x for x in sig0]
        return (eps_tr, ebar_n, D_n, h, sig, False, 0.0, 0, math.nan, True, OK)
    f_tr = math.sqrt(w) * st.seq - sy
    if f_tr <= 0.0:
        sig = [w * x for x in sig0]
        return (eps_tr, ebar_n, D_n, h, sig, False, 0.0, 0, f_tr, False, OK)

    sy_scale = abs(sy) if sy != 0.0 else 1.0
    # initial flow direction at the trial state
    ev0 = _evaluate(mat, eps_tr, ebar_n, D_n, 0.0, D_n, [0.0] * 6)
    nv = ev0.n_new
    ok, dlam, D_new, nv, ev, iters = _newton(mat, eps_tr, ebar_n, D_n, nv, sy_scale)
    fractured = False
    if ok:
        eps_new, ebar_new, h_new, w_new = ev.eps_e, ev.ebar, ev.h, ev.w
        sig0_new, f_res = ev.sig0, ev.r1
        if _critical(mat, h_new, D_new):
            fractured = True
    else:
        dlam, sc, runaway = _bisect_multiplier(mat, eps_tr, ebar_n, D_n, nv, f_tr, sy_scale)
        iters = mat.max_iter
        if runaway or _critical(mat, sc.h, sc.D):
            fractured = True
            ev_like = sc
        elif abs(sc.f) <= mat.tol_f * sy_scale:
            ok = True
            ev_like = sc
        else:
            sig = [w * x for x in sig0]
            return (eps_tr, ebar_n, D_n, h, sig, True, dlam, iters, sc.f, False,
                    NO_CONVERGENCE)
        nv = sc.nv
        D_new = sc.D
        if not fractured:
            eps_new, ebar_new, h_new, w_new = sc.eps_e, sc.ebar, sc.h, sc.w
            sig0_new, f_res = sc.sig0, sc.f

    if fractured:
        dlam, sc = _fracture_point(mat, eps_tr, ebar_n, D_n, nv, dlam)
        D_new = sc.D if sc.D >= D_n else D_n
        eps_new, h_new = sc.eps_e, sc.h
        kn = math.sqrt(_ddot(sc.nv, sc.nv) * (2.0 / 3.0))
        ebar_new = ebar_n + dlam * kn
        w_new = 1.0 - h_new * D_new
        sig0_new = sc.sig0
        f_res = sc.f if not sc.runaway else math.nan
        # place the point exactly at the critical damage
        Dcrit = _critical_damage(mat, h_new)
        if D_new < Dcrit:
            D_new = Dcrit
            w_new = 1.0 - h_new * D_new
    wc = w_new if w_new > 0.0 else 0.0
    sig = [wc * x for x in sig0_new]
    return (eps_new, ebar_new, D_new, h_new, sig, True, dlam, iters, f_res, fractured, OK)
