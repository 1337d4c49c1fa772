# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled material-point update kernel.

Typed transcription of ``_kernel_py``; the two must implement the same
algorithm step for step.  See that module for the commentary.
"""

from libc.math cimport sqrt, pow, acos, sin, fabs, INFINITY, NAN

cdef double PI = 3.141592653589793
cdef double SLOPE_FLOOR = 1e-8
cdef double SIN3_GUARD = 1e-6
cdef double SAT_EPS = 1e-6
cdef double DIR_TOL = 1e-10
cdef double TIGHT = 1e-3
cdef int MAX_CUTS = 10
cdef int FP_SWEEPS = 200
cdef double MIN_RELAX = 1.0 / 64.0

OK = 0
NO_CONVERGENCE = 1


cdef struct Mat:
    double E, nu, A, B, n, Y0, alpha, beta, gamma, c_eta
    double ctt, cts, ctc, det, dts, dec, eta0, Dc, tol_f
    double lam, mu
    int m, max_iter


cdef struct Stress:
    double s[6]
    double seq, eta, chi, theta, theta0, sin3
    bint degenerate


cdef struct Eval:
    bint ok
    double eps_e[6]
    double sig0[6]
    double n_new[6]
    double h, w, ebar, sy, r1, r2, j11, j12, j21, j22, q


cdef struct Scalar:
    bint runaway
    double f, D, h, w, ebar, sy
    double nv[6]
    double eps_e[6]
    double sig0[6]


cdef Mat _make_mat(props) except *:
    cdef Mat mat
    vals = [float(v) for v in props]
    (mat.E, mat.nu, mat.A, mat.B, mat.n, mat.Y0, mat.alpha, mat.beta, mat.gamma,
     mat.c_eta, mat.ctt, mat.cts, mat.ctc, mat.det, mat.dts, mat.dec) = vals[:16]
    mat.m = int(vals[16])
    mat.eta0 = vals[17]
    mat.Dc = vals[18]
    mat.tol_f = vals[19]
    mat.max_iter = int(vals[20])
    mat.lam = mat.nu * mat.E / ((1.0 + mat.nu) * (1.0 - 2.0 * mat.nu))
    mat.mu = mat.E / (2.0 * (1.0 + mat.nu))
    return mat


cdef inline double _ddot(const double* a, const double* b) noexcept nogil:
    return (a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
            + 2.0 * (a[3] * b[3] + a[4] * b[4] + a[5] * b[5]))


cdef inline void _elastic(const Mat* mat, const double* e, double* out) noexcept nogil:
    cdef double tr = mat.lam * (e[0] + e[1] + e[2])
    cdef double m2 = 2.0 * mat.mu
    out[0] = m2 * e[0] + tr
    out[1] = m2 * e[1] + tr
    out[2] = m2 * e[2] + tr
    out[3] = m2 * e[3]
    out[4] = m2 * e[4]
    out[5] = m2 * e[5]


cdef void _stress(const double* sig, Stress* st) noexcept nogil:
    cdef double p = (sig[0] + sig[1] + sig[2]) / 3.0
    cdef double* s = st.s
    cdef double j2, seq, nrm, j3, chi
    s[0] = sig[0] - p
    s[1] = sig[1] - p
    s[2] = sig[2] - p
    s[3] = sig[3]
    s[4] = sig[4]
    s[5] = sig[5]
    j2 = 0.5 * _ddot(s, s)
    seq = sqrt(3.0 * j2)
    nrm = sqrt(_ddot(sig, sig))
    st.seq = seq
    if seq <= 1e-12 * (nrm if nrm > 1.0 else 1.0):
        st.degenerate = True
        st.eta = 0.0
        st.chi = 1.0
        st.theta = 0.0
        st.theta0 = 1.0
        st.sin3 = 0.0
        return
    st.degenerate = False
    j3 = (s[0] * s[1] * s[2] + 2.0 * s[3] * s[4] * s[5]
          - s[0] * s[4] * s[4] - s[1] * s[5] * s[5] - s[2] * s[3] * s[3])
    chi = 13.5 * j3 / (seq * seq * seq)
    if chi > 1.0:
        chi = 1.0
    elif chi < -1.0:
        chi = -1.0
    st.eta = p / seq
    st.chi = chi
    st.theta = acos(chi) / 3.0
    st.theta0 = 1.0 - 6.0 * st.theta / PI
    st.sin3 = sin(3.0 * st.theta)


cdef void _lode_chain(const Stress* st, double dg, double* out) noexcept nogil:
    cdef int i
    cdef double sq[6]
    cdef const double* s = st.s
    cdef double seq, j2, a, b, c, dj3
    if dg == 0.0 or fabs(st.sin3) <= SIN3_GUARD:
        for i in range(6):
            out[i] = 0.0
        return
    seq = st.seq
    j2 = 0.5 * _ddot(s, s)
    sq[0] = s[0] * s[0] + s[3] * s[3] + s[5] * s[5]
    sq[1] = s[3] * s[3] + s[1] * s[1] + s[4] * s[4]
    sq[2] = s[5] * s[5] + s[4] * s[4] + s[2] * s[2]
    sq[3] = s[0] * s[3] + s[3] * s[1] + s[5] * s[4]
    sq[4] = s[3] * s[5] + s[1] * s[4] + s[4] * s[2]
    sq[5] = s[0] * s[5] + s[3] * s[4] + s[5] * s[2]
    a = 13.5 / (seq * seq * seq)
    b = 4.5 * st.chi / (seq * seq)
    c = dg * 2.0 / (PI * st.sin3)
    for i in range(6):
        if i < 3:
            dj3 = sq[i] - (2.0 / 3.0) * j2
        else:
            dj3 = sq[i]
        out[i] = c * (a * dj3 - b * s[i])


cdef void _evaluate(const Mat* mat, const double* eps_tr, double ebar_n, double D_n,
                    double dlam, double D, const double* nv, Eval* ev) noexcept nogil:
    cdef int i
    cdef Stress st
    cdef double L[6]
    cdef double v[6]
    cdef double t0, t2, t2m, g, dg, d_ax, c_ax, dh_dg, h, w, sqw, kn, ebar, sbar, slope
    cdef double tri, lode, sy, seq, f, psi0, Y, X, Xa, wb, q, r2
    cdef double ceq, ceta, m2, sv, seq_d, eta_d, gl_d, h_d, tri_d, lode_d, sy_d, w_d
    cdef double f_d, f_D, psi_d, Y_d, q_d, q_D, df_dh, k_eta, k_L, k_eq
    for i in range(6):
        ev.eps_e[i] = eps_tr[i] - dlam * nv[i]
    _elastic(mat, ev.eps_e, ev.sig0)
    _stress(ev.sig0, &st)
    ev.ok = False
    if st.degenerate:
        return
    t0 = st.theta0
    t2 = t0 * t0
    t2m = pow(t2, <double>mat.m)
    g = t2 - t2m * t2 / (mat.m + 1)
    dg = 2.0 * t0 * (1.0 - t2m)
    d_ax = mat.det if t0 > 0.0 else mat.dec
    c_ax = mat.ctt if t0 >= 0.0 else mat.ctc
    dh_dg = d_ax * (st.eta - mat.eta0) - mat.dts
    h = 1.0 + mat.dts + dh_dg * g
    w = 1.0 - h * D
    if w <= 0.0:
        return
    sqw = sqrt(w)
    kn = sqrt(_ddot(nv, nv) * (2.0 / 3.0))
    ebar = ebar_n + dlam * kn
    sbar = mat.A + mat.B * pow(ebar, mat.n)
    slope = mat.n * mat.B * pow(ebar if ebar > SLOPE_FLOOR else SLOPE_FLOOR, mat.n - 1.0)
    tri = 1.0 - mat.c_eta * (st.eta - mat.eta0)
    lode = mat.cts + (c_ax - mat.cts) * g
    sy = sbar * tri * lode
    seq = st.seq
    f = sqw * seq - sy
    psi0 = 0.5 * _ddot(ev.sig0, ev.eps_e)
    Y = h * psi0
    X = (Y - mat.Y0) / mat.gamma
    if X > 0.0:
        Xa = pow(X, mat.alpha)
        wb = pow(w, mat.beta)
        q = Xa / wb
    else:
        Xa = 0.0
        wb = 1.0
        q = 0.0
    r2 = D - D_n - dlam * q

    _lode_chain(&st, dg, L)
    ceq = 1.5 / seq
    ceta = -1.5 * st.eta / (seq * seq)
    m2 = -2.0 * mat.mu
    for i in range(6):
        v[i] = m2 * nv[i]
    sv = _ddot(st.s, v)
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
    psi_d = -_ddot(ev.sig0, nv)
    Y_d = h_d * psi0 + h * psi_d
    if X > 0.0:
        q_d = (-mat.beta * w_d / w * q
               + mat.alpha * pow(X, mat.alpha - 1.0) * Y_d / mat.gamma / wb)
        q_D = mat.beta * h / w * q
    else:
        q_d = 0.0
        q_D = 0.0

    df_dh = D * seq / (2.0 * sqw)
    k_eta = (df_dh * d_ax * g + sbar * mat.c_eta * lode) * ceta / w
    k_L = (df_dh * dh_dg - sbar * tri * (c_ax - mat.cts)) / w
    k_eq = ceq / sqw
    for i in range(6):
        ev.n_new[i] = k_eq * st.s[i] + k_eta * st.s[i] + k_L * L[i]

    ev.ok = True
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
    ev.q = q


cdef inline bint _critical(const Mat* mat, double h, double D) noexcept nogil:
    return D >= mat.Dc or h * D >= mat.Dc or 1.0 - h * D <= SAT_EPS


cdef inline double _critical_damage(const Mat* mat, double h) noexcept nogil:
    cdef double d = mat.Dc
    if h <= 0.0:
        return d
    if mat.Dc / h < d:
        d = mat.Dc / h
    if (1.0 - SAT_EPS) / h < d:
        d = (1.0 - SAT_EPS) / h
    return d


cdef double _rel_change(const double* a, const double* b) noexcept nogil:
    cdef double num = 0.0, den = 0.0
    cdef int i
    for i in range(6):
        num += (a[i] - b[i]) * (a[i] - b[i])
        den += b[i] * b[i]
    if den == 0.0:
        return 0.0 if num == 0.0 else INFINITY
    return sqrt(num / den)


cdef inline double _merit(const Eval* ev, double scale) noexcept nogil:
    cdef double r = ev.r1 / scale
    return r * r + ev.r2 * ev.r2


cdef inline void _copy6(double* dst, const double* src) noexcept nogil:
    cdef int i
    for i in range(6):
        dst[i] = src[i]


cdef bint _newton(const Mat* mat, const double* eps_tr, double ebar_n, double D_n,
                  double* nv, double sy_scale, double* dlam_out, double* D_out,
                  Eval* ev, int* iters) noexcept nogil:
    """Mirrors ``_kernel_py._newton``; ``nv`` and ``ev`` are updated in place."""
    cdef double tol1 = mat.tol_f * sy_scale
    cdef double tol2 = mat.tol_f
    cdef double dlam = 0.0, D = D_n
    cdef double dchange, det, ddl, dD, m0, t, dl_try, D_try
    cdef bint small, accepted, ok
    cdef int it = 0, cut
    cdef Eval ev2, trial
    _evaluate(mat, eps_tr, ebar_n, D_n, dlam, D, nv, ev)
    if not ev.ok:
        dlam_out[0] = dlam
        D_out[0] = D
        iters[0] = 0
        return False
    while it < mat.max_iter:
        it += 1
        dchange = _rel_change(ev.n_new, nv)
        small = fabs(ev.r1) <= TIGHT * tol1 and fabs(ev.r2) <= TIGHT * tol2
        if small and dchange <= DIR_TOL:
            dlam_out[0] = dlam
            D_out[0] = D
            iters[0] = it
            return True
        if small:
            _copy6(nv, ev.n_new)
            _evaluate(mat, eps_tr, ebar_n, D_n, dlam, D, nv, &ev2)
            if not ev2.ok:
                dlam_out[0] = dlam
                D_out[0] = D
                iters[0] = it
                return False
            ev[0] = ev2
            continue
        det = ev.j11 * ev.j22 - ev.j12 * ev.j21
        if det == 0.0 or det != det:
            break
        ddl = (-ev.r1 * ev.j22 + ev.j12 * ev.r2) / det
        dD = (-ev.j11 * ev.r2 + ev.j21 * ev.r1) / det
        m0 = _merit(ev, sy_scale)
        t = 1.0
        accepted = False
        for cut in range(MAX_CUTS + 1):
            dl_try = dlam + t * ddl
            D_try = D + t * dD
            if dl_try < 0.0:
                dl_try = 0.0
            if D_try < D_n:
                D_try = D_n
            _evaluate(mat, eps_tr, ebar_n, D_n, dl_try, D_try, nv, &trial)
            if trial.ok and _merit(&trial, sy_scale) < m0:
                accepted = True
                break
            t *= 0.5
        if not accepted:
            if fabs(ev.r1) <= tol1 and fabs(ev.r2) <= tol2 and dchange <= DIR_TOL:
                dlam_out[0] = dlam
                D_out[0] = D
                iters[0] = it
                return True
            break
        dlam = dl_try
        D = D_try
        ev[0] = trial
        _copy6(nv, ev.n_new)
        _evaluate(mat, eps_tr, ebar_n, D_n, dlam, D, nv, &ev2)
        if not ev2.ok:
            break
        ev[0] = ev2
    ok = (ev.ok and fabs(ev.r1) <= tol1 and fabs(ev.r2) <= tol2
          and _rel_change(ev.n_new, nv) <= 1e3 * DIR_TOL)
    dlam_out[0] = dlam
    D_out[0] = D
    iters[0] = it
    return ok


cdef double _damage_root(const Mat* mat, double h, double Y, double D_n,
                         double dlam) noexcept nogil:
    cdef double X = (Y - mat.Y0) / mat.gamma
    cdef double c, beta, lo, hi, peak, mid, D
    cdef int k
    if X <= 0.0 or dlam == 0.0:
        return D_n
    c = dlam * pow(X, mat.alpha)
    beta = mat.beta
    if 1.0 - h * D_n <= 0.0:
        return -1.0
    if beta == 0.0:
        D = D_n + c
        return D if 1.0 - h * D > 0.0 else -1.0
    if h <= 0.0:
        lo = D_n
        hi = D_n + c * pow(1.0 - h * D_n, -beta)
    else:
        peak = (1.0 - pow(c * beta * h, 1.0 / (beta + 1.0))) / h
        if peak <= D_n:
            return -1.0
        if peak - D_n - c * pow(1.0 - h * peak, -beta) < 0.0:
            return -1.0
        lo = D_n
        hi = peak
    for k in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if mid - D_n - c * pow(1.0 - h * mid, -beta) < 0.0:
            lo = mid
        else:
            hi = mid
    return hi


cdef void _scalar_eval(const Mat* mat, const double* eps_tr, double ebar_n, double D_n,
                       double dlam, const double* nv_in, Scalar* out) noexcept nogil:
    cdef double nv[6]
    cdef Stress st
    cdef Eval ev
    cdef double t0, t2, g, d_ax, h, Y, D, change
    cdef double relax = 1.0, prev = INFINITY
    cdef int sweep, i
    _copy6(nv, nv_in)
    out.w = 0.0
    out.ebar = 0.0
    out.sy = 0.0
    for sweep in range(FP_SWEEPS):
        for i in range(6):
            out.eps_e[i] = eps_tr[i] - dlam * nv[i]
        _elastic(mat, out.eps_e, out.sig0)
        _stress(out.sig0, &st)
        t0 = st.theta0
        t2 = t0 * t0
        g = t2 - pow(t2, <double>mat.m) * t2 / (mat.m + 1)
        d_ax = mat.det if t0 > 0.0 else mat.dec
        h = 1.0 + mat.dts + (d_ax * (st.eta - mat.eta0) - mat.dts) * g
        Y = h * 0.5 * _ddot(out.sig0, out.eps_e)
        D = _damage_root(mat, h, Y, D_n, dlam)
        out.h = h
        if D < 0.0 or st.degenerate:
            out.runaway = D < 0.0
            out.f = -1.0
            out.D = D
            _copy6(out.nv, nv)
            return
        _evaluate(mat, eps_tr, ebar_n, D_n, dlam, D, nv, &ev)
        if not ev.ok:
            out.runaway = True
            out.f = -1.0
            out.D = -1.0
            _copy6(out.nv, nv)
            return
        out.runaway = False
        out.f = ev.r1
        out.D = D
        out.w = ev.w
        out.ebar = ev.ebar
        out.sy = ev.sy
        change = _rel_change(ev.n_new, nv)
        _copy6(out.nv, nv)
        if change <= DIR_TOL:
            break
        if change > 0.5 * prev and relax > MIN_RELAX:
            relax *= 0.5
        prev = change
        for i in range(6):
            nv[i] = nv[i] + relax * (ev.n_new[i] - nv[i])


cdef double _bisect_multiplier(const Mat* mat, const double* eps_tr, double ebar_n,
                               double D_n, const double* nv_in, double f_tr,
                               double sy_scale, Scalar* best) noexcept nogil:
    cdef double nv[6]
    cdef double lo = 0.0, hi, mid
    cdef Scalar sc_hi, sc
    cdef int k
    _copy6(nv, nv_in)
    hi = f_tr / (3.0 * mat.mu)
    if hi < 1e-12:
        hi = 1e-12
    _scalar_eval(mat, eps_tr, ebar_n, D_n, hi, nv, &sc_hi)
    for k in range(80):
        if sc_hi.runaway or sc_hi.f <= 0.0:
            break
        lo = hi
        _copy6(nv, sc_hi.nv)
        hi *= 2.0
        _scalar_eval(mat, eps_tr, ebar_n, D_n, hi, nv, &sc_hi)
    best[0] = sc_hi
    for k in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        _scalar_eval(mat, eps_tr, ebar_n, D_n, mid, nv, &sc)
        if sc.runaway or sc.f <= 0.0:
            hi = mid
            best[0] = sc
            if not sc.runaway and -sc.f <= TIGHT * mat.tol_f * sy_scale:
                break
        else:
            lo = mid
            _copy6(nv, sc.nv)
            if sc.f <= TIGHT * mat.tol_f * sy_scale:
                hi = mid
                best[0] = sc
                break
    return hi


cdef inline bint _crossed(const Mat* mat, const Scalar* sc) noexcept nogil:
    if sc.runaway:
        return True
    return _critical(mat, sc.h, sc.D)


cdef double _fracture_point(const Mat* mat, const double* eps_tr, double ebar_n,
                            double D_n, const double* nv_in, double dlam_max,
                            Scalar* out) noexcept nogil:
    cdef double nv[6]
    cdef double lo = 0.0, hi = dlam_max, mid
    cdef Scalar sc
    cdef int k
    _copy6(nv, nv_in)
    for k in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        _scalar_eval(mat, eps_tr, ebar_n, D_n, mid, nv, &sc)
        if _crossed(mat, &sc):
            hi = mid
        else:
            lo = mid
            _copy6(nv, sc.nv)
    _scalar_eval(mat, eps_tr, ebar_n, D_n, lo, nv, out)
    return lo


cdef list _tolist(const double* a):
    return [a[0], a[1], a[2], a[3], a[4], a[5]]


def update_point(props, eps_e, ebar_p, D, deps):
    """Strain-driven update of one material point (see ``_kernel_py.update_point``)."""
    cdef Mat mat = _make_mat(props)
    cdef double eps_tr[6]
    cdef double sig0[6]
    cdef double sig[6]
    cdef double nv[6]
    cdef double zero[6]
    cdef double eps_new[6]
    cdef double sig0_new[6]
    cdef Stress st
    cdef Eval ev0, ev
    cdef Scalar sc
    cdef double ebar_n = float(ebar_p)
    cdef double D_n = float(D)
    cdef double t0, t2, g, d_ax, c_ax, h, w, sbar, sy, f_tr, sy_scale, wc
    cdef double dlam = 0.0, D_new = 0.0, ebar_new = 0.0, h_new = 0.0, w_new = 0.0
    cdef double f_res = 0.0, kn, Dcrit
    cdef int i, iters = 0
    cdef bint ok, fractured, runaway
    for i in range(6):
        eps_tr[i] = float(eps_e[i]) + float(deps[i])
        zero[i] = 0.0
    _elastic(&mat, eps_tr, sig0)
    _stress(sig0, &st)
    t0 = st.theta0
    t2 = t0 * t0
    g = t2 - pow(t2, <double>mat.m) * t2 / (mat.m + 1)
    d_ax = mat.det if t0 > 0.0 else mat.dec
    c_ax = mat.ctt if t0 >= 0.0 else mat.ctc
    h = 1.0 + mat.dts + (d_ax * (st.eta - mat.eta0) - mat.dts) * g
    w = 1.0 - h * D_n
    sbar = mat.A + mat.B * pow(ebar_n, mat.n)
    sy = sbar * (1.0 - mat.c_eta * (st.eta - mat.eta0)) * (mat.cts + (c_ax - mat.cts) * g)
    if _critical(&mat, h, D_n):
        wc = w if w > 0.0 else 0.0
        for i in range(6):
            sig[i] = wc * sig0[i]
        return (_tolist(eps_tr), ebar_n, D_n, h, _tolist(sig), False, 0.0, 0, NAN,
                True, OK)
    f_tr = sqrt(w) * st.seq - sy
    if f_tr <= 0.0:
        for i in range(6):
            sig[i] = w * sig0[i]
        return (_tolist(eps_tr), ebar_n, D_n, h, _tolist(sig), False, 0.0, 0, f_tr,
                False, OK)

    sy_scale = fabs(sy) if sy != 0.0 else 1.0
    _evaluate(&mat, eps_tr, ebar_n, D_n, 0.0, D_n, zero, &ev0)
    _copy6(nv, ev0.n_new)
    ok = _newton(&mat, eps_tr, ebar_n, D_n, nv, sy_scale, &dlam, &D_new, &ev, &iters)
    fractured = False
    if ok:
        _copy6(eps_new, ev.eps_e)
        ebar_new = ev.ebar
        h_new = ev.h
        w_new = ev.w
        _copy6(sig0_new, ev.sig0)
        f_res = ev.r1
        if _critical(&mat, h_new, D_new):
            fractured = True
    else:
        dlam = _bisect_multiplier(&mat, eps_tr, ebar_n, D_n, nv, f_tr, sy_scale, &sc)
        runaway = sc.runaway
        iters = mat.max_iter
        if runaway or _critical(&mat, sc.h, sc.D):
            fractured = True
        elif fabs(sc.f) <= mat.tol_f * sy_scale:
            ok = True
        else:
            for i in range(6):
                sig[i] = w * sig0[i]
            return (_tolist(eps_tr), ebar_n, D_n, h, _tolist(sig), True, dlam, iters,
                    sc.f, False, NO_CONVERGENCE)
        _copy6(nv, sc.nv)
        D_new = sc.D
        if not fractured:
            _copy6(eps_new, sc.eps_e)
            ebar_new = sc.ebar
            h_new = sc.h
            w_new = sc.w
            _copy6(sig0_new, sc.sig0)
            f_res = sc.f

    if fractured:
        dlam = _fracture_point(&mat, eps_tr, ebar_n, D_n, nv, dlam, &sc)
        D_new = sc.D if sc.D >= D_n else D_n
        _copy6(eps_new, sc.eps_e)
        h_new = sc.h
        kn = sqrt(_ddot(sc.nv, sc.nv) * (2.0 / 3.0))
        ebar_new = ebar_n + dlam * kn
        w_new = 1.0 - h_new * D_new
        _copy6(sig0_new, sc.sig0)
        f_res = NAN if sc.runaway else sc.f
        Dcrit = _critical_damage(&mat, h_new)
        if D_new < Dcrit:
            D_new = Dcrit
            w_new = 1.0 - h_new * D_new
    wc = w_new if w_new > 0.0 else 0.0
    for i in range(6):
        sig[i] = wc * sig0_new[i]
    return (_tolist(eps_new), ebar_new, D_new, h_new, _tolist(sig), True, dlam, iters,
            f_res, fractured, OK)
