# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled two-state affine LTI kernels (see ``_pykernels`` for the contract)."""
from libc.math cimport fabs, ceil, log2, pow

cdef int _TAYLOR_ORDER = 16
cdef int _MAX_ITER = 200


cdef inline void _expm(double a11, double a12, double a21, double a22,
                       double b1, double b2, double dt, double* out) nogil:
    cdef double m11 = a11 * dt, m12 = a12 * dt, m21 = a21 * dt, m22 = a22 * dt
    cdef double n1 = b1 * dt, n2 = b2 * dt
    cdef double norm = fabs(m11) + fabs(m12) + fabs(n1)
    cdef double norm2 = fabs(m21) + fabs(m22) + fabs(n2)
    cdef int s = 0, k, i
    cdef double scale, inv
    cdef double e11 = 1.0, e12 = 0.0, e21 = 0.0, e22 = 1.0, f1 = 0.0, f2 = 0.0
    cdef double t11, t12, t21, t22, u1, u2
    if norm2 > norm:
        norm = norm2
    if norm > 0.25:
        s = <int>ceil(log2(norm / 0.25))
        scale = pow(2.0, -s)
        m11 *= scale
        m12 *= scale
        m21 *= scale
        m22 *= scale
        n1 *= scale
        n2 *= scale
    for k in range(_TAYLOR_ORDER, 0, -1):
        inv = 1.0 / k
        t11 = (m11 * e11 + m12 * e21) * inv
        t12 = (m11 * e12 + m12 * e22) * inv
        t21 = (m21 * e11 + m22 * e21) * inv
        t22 = (m21 * e12 + m22 * e22) * inv
        u1 = (m11 * f1 + m12 * f2 + n1) * inv
        u2 = (m21 * f1 + m22 * f2 + n2) * inv
        e11 = 1.0 + t11
        e12 = t12
        e21 = t21
        e22 = 1.0 + t22
        f1 = u1
        f2 = u2
    for i in range(s):
        t11 = e11 * e11 + e12 * e21
        t12 = e11 * e12 + e12 * e22
        t21 = e21 * e11 + e22 * e21
        t22 = e21 * e12 + e22 * e22
        u1 = e11 * f1 + e12 * f2 + f1
        u2 = e21 * f1 + e22 * f2 + f2
        e11 = t11
        e12 = t12
        e21 = t21
        e22 = t22
        f1 = u1
        f2 = u2
    out[0] = e11
    out[1] = e12
    out[2] = e21
    out[3] = e22
    out[4] = f1
    out[5] = f2


def expm_affine(double a11, double a12, double a21, double a22,
                double b1, double b2, double dt):
    cdef double out[6]
    _expm(a11, a12, a21, a22, b1, b2, dt, out)
    return out[0], out[1], out[2], out[3], out[4], out[5]


def propagate(double a11, double a12, double a21, double a22,
              double b1, double b2, double x1, double x2, double dt):
    cdef double out[6]
    if dt == 0.0:
        return x1, x2
    _expm(a11, a12, a21, a22, b1, b2, dt, out)
    return out[0] * x1 + out[1] * x2 + out[4], out[2] * x1 + out[3] * x2 + out[5]


def find_event(double a11, double a12, double a21, double a22,
               double b1, double b2, double x1, double x2,
               double w1, double w2, double w0, double wt,
               double tmax, int nscan, double rtol):
    cdef double S[6]
    cdef double P[6]
    cdef double e0 = w1 * x1 + w2 * x2 + w0
    cdef double h, ta, ya1, ya2, ea, tb = 0.0, yb1 = x1, yb2 = x2, eb = e0
    cdef double lo, hi, elo, ehi, tc, ec, c1, c2, tol
    cdef int k, it, side = 0
    cdef bint bracket = False
    if e0 <= 0.0:
        return True, 0.0, x1, x2
    if tmax <= 0.0:
        return False, 0.0, x1, x2

    h = tmax / nscan
    _expm(a11, a12, a21, a22, b1, b2, h, S)
    ta = 0.0
    ya1 = x1
    ya2 = x2
    ea = e0
    for k in range(1, nscan + 1):
        yb1 = S[0] * ya1 + S[1] * ya2 + S[4]
        yb2 = S[2] * ya1 + S[3] * ya2 + S[5]
        tb = tmax if k == nscan else k * h
        eb = w1 * yb1 + w2 * yb2 + w0 + wt * tb
        if eb <= 0.0:
            bracket = True
            break
        ta = tb
        ya1 = yb1
        ya2 = yb2
        ea = eb
    if not bracket:
        return False, tmax, yb1, yb2
    if eb == 0.0:
        return True, tb, yb1, yb2

    lo = 0.0
    hi = tb - ta
    elo = ea
    ehi = eb
    tol = rtol * tmax
    for it in range(_MAX_ITER):
        if hi - lo <= tol:
            break
        tc = (lo * ehi - hi * elo) / (ehi - elo)
        if not (lo < tc < hi):
            tc = 0.5 * (lo + hi)
        _expm(a11, a12, a21, a22, b1, b2, tc, P)
        c1 = P[0] * ya1 + P[1] * ya2 + P[4]
        c2 = P[2] * ya1 + P[3] * ya2 + P[5]
        ec = w1 * c1 + w2 * c2 + w0 + wt * (ta + tc)
        if ec > 0.0:
            lo = tc
            elo = ec
            if side == -1:
                ehi *= 0.5
            side = -1
        elif ec < 0.0:
            hi = tc
            ehi = ec
            if side == 1:
                elo *= 0.5
            side = 1
        else:
            lo = tc
            hi = tc
            break
    _expm(a11, a12, a21, a22, b1, b2, hi, P)
    c1 = P[0] * ya1 + P[1] * ya2 + P[4]
    c2 = P[2] * ya1 + P[3] * ya2 + P[5]
    return True, ta + hi, c1, c2
