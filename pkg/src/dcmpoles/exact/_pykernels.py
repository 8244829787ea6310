"""Pure-Python implementation of the two-state affine LTI kernels.

This module mirrors ``_ckernels.pyx`` line for line and is used whenever the
compiled extension is unavailable.  Both expose the same three functions:

``expm_affine(a11, a12, a21, a22, b1, b2, dt)``
    Exact discretisation of ``x' = A x + b`` over ``dt``; returns the
    transition matrix entries and the forced response ``(e11, e12, e21, e22,
    f1, f2)`` so that ``x(dt) = E x(0) + f``.

``propagate(a11, a12, a21, a22, b1, b2, x1, x2, dt)``
    ``x(dt)`` as a tuple.

``find_event(a11, a12, a21, a22, b1, b2, x1, x2, w1, w2, w0, wt, tmax, nscan, rtol)``
    First time ``t`` in ``[0, tmax]`` at which ``w1 x1(t) + w2 x2(t) + w0 +
    wt t`` drops to zero or below.  Returns ``(found, t, y1, y2)``.
"""
import math

_TAYLOR_ORDER = 16
_MAX_ITER = 200


def expm_affine(a11, a12, a21, a22, b1, b2, dt):
    # exp of the augmented matrix [[A, b], [0, 0]] * dt by scaling and squaring
    m11 = a11 * dt
    m12 = a12 * dt
    m21 = a21 * dt
    m22 = a22 * dt
    n1 = b1 * dt
    n2 = b2 * dt
    norm = max(abs(m11) + abs(m12) + abs(n1), abs(m21) + abs(m22) + abs(n2))
    s = 0
    if norm > 0.25:
        s = int(math.ceil(math.log2(norm / 0.25)))
        scale = 2.0 ** (-s)
        m11 *= scale
        m12 *= scale
        m21 *= scale
        m22 *= scale
        n1 *= scale
        n2 *= scale

    # Horner evaluation of sum M^k / k!; last row of M is zero so the
    # affine column is carried separately.
    e11, e12, e21, e22, f1, f2 = 1.0, 0.0, 0.0, 1.0, 0.0, 0.0
    for k in range(_TAYLOR_ORDER, 0, -1):
        inv = 1.0 / k
        # P <- I + (M P) / k
        t11 = (m11 * e11 + m12 * e21) * inv
        t12 = (m11 * e12 + m12 * e22) * inv
        t21 = (m21 * e11 + m22 * e21) * inv
        t22 = (m21 * e12 + m22 * e22) * inv
        u1 = (m11 * f1 + m12 * f2 + n1) * inv
        u2 = (m21 * f1 + m22 * f2 + n2) * inv
        e11, e12, e21, e22 = 1.0 + t11, t12, t21, 1.0 + t22
        f1, f2 = u1, u2

    for _ in range(s):
        t11 = e11 * e11 + e12 * e21
        t12 = e11 * e12 + e12 * e22
        t21 = e21 * e11 + e22 * e21
        t22 = e21 * e12 + e22 * e22
        u1 = e11 * f1 + e12 * f2 + f1
        u2 = e21 * f1 + e22 * f2 + f2
        e11, e12, e21, e22, f1, f2 = t11, t12, t21, t22, u1, u2
    return e11, e12, e21, e22, f1, f2


def propagate(a11, a12, a21, a22, b1, b2, x1, x2, dt):
    if dt == 0.0:
        return x1, x2
    e11, e12, e21, e22, f1, f2 = expm_affine(a11, a12, a21, a22, b1, b2, dt)
    return e11 * x1 + e12 * x2 + f1, e21 * x1 + e22 * x2 + f2


def find_event(a11, a12, a21, a22, b1, b2, x1, x2, w1, w2, w0, wt, tmax, nscan, rtol):
    e0 = w1 * x1 + w2 * x2 + w0
    if e0 <= 0.0:
        return True, 0.0, x1, x2
    if tmax <= 0.0:
        return False, 0.0, x1, x2

    h = tmax / nscan
    s11, s12, s21, s22, g1, g2 = expm_affine(a11, a12, a21, a22, b1, b2, h)
    ta, ya1, ya2, ea = 0.0, x1, x2, e0
    bracket = False
    for k in range(1, nscan + 1):
        yb1 = s11 * ya1 + s12 * ya2 + g1
        yb2 = s21 * ya1 + s22 * ya2 + g2
        tb = tmax if k == nscan else k * h
        eb = w1 * yb1 + w2 * yb2 + w0 + wt * tb
        if eb <= 0.0:
            bracket = True
            break
        ta, ya1, ya2, ea = tb, yb1, yb2, eb
    if not bracket:
        return False, tmax, yb1, yb2
    if eb == 0.0:
        return True, tb, yb1, yb2

    # Illinois regula falsi on [ta, tb], propagating from the left scan node.
    base1, base2, tbase = ya1, ya2, ta
    lo, hi, elo, ehi = 0.0, tb - ta, ea, eb
    tol = rtol * tmax
    side = 0
    c1, c2 = yb1, yb2
    for _ in range(_MAX_ITER):
        if hi - lo <= tol:
            break
        tc = (lo * ehi - hi * elo) / (ehi - elo)
        if not (lo < tc < hi):
            tc = 0.5 * (lo + hi)
        c1, c2 = propagate(a11, a12, a21, a22, b1, b2, base1, base2, tc)
        ec = w1 * c1 + w2 * c2 + w0 + wt * (tbase + tc)
        if ec > 0.0:
            lo, elo = tc, ec
            if side == -1:
                ehi *= 0.5
            side = -1
        elif ec < 0.0:
            hi, ehi = tc, ec
            if side == 1:
                elo *= 0.5
            side = 1
        else:
            lo = hi = tc
            break
    c1, c2 = propagate(a11, a12, a21, a22, b1, b2, base1, base2, hi)
    return True, tbase + hi, c1, c2
