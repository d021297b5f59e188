"""Airy function, integer-order Bessel J and Gauss-Legendre rules.

Everything here is plain double precision with no special-function library
underneath; the analytic modules build their kernels on these three
primitives.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = [
    "QuadratureRule",
    "airy",
    "airy_array",
    "bessel_j",
    "bessel_j_sequence",
    "gauss_legendre",
]

UNDERFLOW = 1e-300

_AI0 = 1.0 / (3.0 ** (2.0 / 3.0) * math.gamma(2.0 / 3.0))
_AIP0 = -1.0 / (3.0 ** (1.0 / 3.0) * math.gamma(1.0 / 3.0))

# |x| >= _ASYMPTOTIC_CUT: asymptotic series; the optimal truncation error there
# is ~1e-15 relative.  Inside, the Airy ODE is continued by Taylor steps from
# the anchors at +-_ASYMPTOTIC_CUT (stable directions on both sides).
_ASYMPTOTIC_CUT = 8.0
_MACLAURIN_CUT = 2.0
_MAX_STEP = 1.0


def _flush(v):
    return 0.0 if abs(v) < UNDERFLOW else v


def _asymptotic_coeffs(kmax=40):
    u = [1.0]
    for k in range(1, kmax):
        u.append(u[-1] * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216.0 * k))
    v = [-(6 * k + 1) / (6 * k - 1) * uk for k, uk in enumerate(u)]
    return u, v


_U, _V = _asymptotic_coeffs()


def _sum_asymptotic(coeffs, zeta_inv, sign_pattern):
    """Sum ``sign(k) c_k zeta^-k`` up to the smallest term."""
    total = 0.0
    last = math.inf
    p = 1.0
    for k, c in enumerate(coeffs):
        term = c * p
        if abs(term) > last:
            break
        total += sign_pattern(k) * term
        last = abs(term)
        if last < 1e-18 * abs(total):
            break
        p *= zeta_inv
    return total


def _airy_asymptotic_positive(x):
    zeta = 2.0 / 3.0 * x * math.sqrt(x)
    alt = lambda k: -1.0 if k % 2 else 1.0
    su = _sum_asymptotic(_U, 1.0 / zeta, alt)
    sv = _sum_asymptotic(_V, 1.0 / zeta, alt)
    e = math.exp(-zeta) / (2.0 * math.sqrt(math.pi))
    x4 = x ** 0.25
    return e / x4 * su, -x4 * e * sv


def _airy_asymptotic_negative(x):
    z = -x
    zeta = 2.0 / 3.0 * z * math.sqrt(z)
    zi = 1.0 / zeta
    alt = lambda k: -1.0 if k % 2 else 1.0
    # split the series into even/odd indexed parts
    p = _sum_asymptotic(_U[0::2], zi * zi, alt)
    q = zi * _sum_asymptotic(_U[1::2], zi * zi, alt)
    r = _sum_asymptotic(_V[0::2], zi * zi, alt)
    s = zi * _sum_asymptotic(_V[1::2], zi * zi, alt)
    theta = zeta - math.pi / 4.0
    c, sn = math.cos(theta), math.sin(theta)
    z4 = z ** 0.25
    rp = math.sqrt(math.pi)
    return (c * p + sn * q) / (rp * z4), z4 * (sn * r - c * s) / rp


def _taylor_step(x0, y, dy, h):
    """Advance (y, y') of y'' = x y from x0 to x0 + h by its power series."""
    c_prev, c_cur, c_next = y, dy, 0.5 * x0 * y  # c_{n-1}, c_n, c_{n+1} at n = 1
    val = y + dy * h + c_next * h * h
    der = dy + 2.0 * c_next * h
    hp = h * h  # h^(n+1)
    small = 0
    n = 1
    while n < 400:
        c_new = (x0 * c_cur + c_prev) / ((n + 2) * (n + 1))
        hp *= h
        tv = c_new * hp
        td = (n + 2) * c_new * hp / h if h != 0.0 else 0.0
        val += tv
        der += td
        scale = abs(val) + abs(der) + 1e-300
        small = small + 1 if abs(tv) + abs(td) < 1e-17 * scale else 0
        if small >= 3:
            break
        c_prev, c_cur, c_next = c_cur, c_next, c_new
        n += 1
    return val, der


def _continue(x0, y, dy, x):
    steps = max(1, math.ceil(abs(x - x0) / _MAX_STEP))
    h = (x - x0) / steps
    for i in range(steps):
        y, dy = _taylor_step(x0 + i * h, y, dy, h)
    return y, dy


_ANCHOR_POS = _airy_asymptotic_positive(_ASYMPTOTIC_CUT)
_ANCHOR_NEG = _airy_asymptotic_negative(-_ASYMPTOTIC_CUT)


def airy(x):
    """Return ``(Ai(x), Ai'(x))`` for real ``|x| <= 200``.

    Magnitudes below 1e-300 are flushed to zero.
    """
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"airy: non-finite argument {x!r}")
    if abs(x) > 200.0:
        raise DomainError(f"airy: |x| = {abs(x)} exceeds 200")
    if x >= _ASYMPTOTIC_CUT:
        ai, aip = _airy_asymptotic_positive(x)
    elif x <= -_ASYMPTOTIC_CUT:
        ai, aip = _airy_asymptotic_negative(x)
    elif abs(x) <= _MACLAURIN_CUT:
        ai, aip = _taylor_step(0.0, _AI0, _AIP0, x)
    elif x > 0:
        ai, aip = _continue(_ASYMPTOTIC_CUT, *_ANCHOR_POS, x)
    else:
        ai, aip = _continue(-_ASYMPTOTIC_CUT, *_ANCHOR_NEG, x)
    return _flush(ai), _flush(aip)


def airy_array(xs):
    """Vectorised :func:`airy`; returns two arrays shaped like ``xs``."""
    xs = np.asarray(xs, dtype=float)
    ai = np.empty_like(xs)
    aip = np.empty_like(xs)
    for idx, x in np.ndenumerate(xs):
        ai[idx], aip[idx] = airy(x)
    return ai, aip


def bessel_j_sequence(nmax, x):
    """Return ``[J_0(x), ..., J_nmax(x)]`` by Miller's backward recurrence.

    The recurrence starts at ``max(nmax, ceil(x)) + max(20, ceil(1.5 x))`` and
    the result is normalised with ``J_0 + 2 sum J_2k = 1``.
    """
    nmax = int(nmax)
    x = float(x)
    if nmax < 0:
        raise DomainError("bessel_j_sequence: nmax must be non-negative")
    if not math.isfinite(x) or x < 0.0:
        raise DomainError(f"bessel_j: argument must be finite and >= 0, got {x!r}")
    out = np.zeros(nmax + 1)
    if x == 0.0:
        out[0] = 1.0
        return out
    if x < 1e-3:
        # the recurrence would overflow; four series terms are exact here
        half = x / 2.0
        for n in range(nmax + 1):
            lead = n * math.log(half) - math.lgamma(n + 1)
            if lead < -700.0:
                break
            s = sum((-half * half) ** m / (math.factorial(m) * math.prod(range(n + 1, n + m + 1))) for m in range(4))
            out[n] = math.exp(lead) * s
        out[np.abs(out) < UNDERFLOW] = 0.0
        return out
    start = max(nmax, math.ceil(x)) + max(20, math.ceil(1.5 * x))
    start += start % 2
    vals = np.zeros(start + 2)
    j_hi, j_cur = 0.0, 1e-30
    vals[start] = j_cur
    two_over_x = 2.0 / x
    for k in range(start, 0, -1):
        j_lo = k * two_over_x * j_cur - j_hi
        vals[k - 1] = j_lo
        j_hi, j_cur = j_cur, j_lo
        if abs(j_cur) > 1e250:
            vals[k - 1 :] *= 1e-250
            j_hi *= 1e-250
            j_cur *= 1e-250
    norm = vals[0] + 2.0 * vals[2 : start + 1 : 2].sum()
    res = vals[: nmax + 1] / norm
    res[np.abs(res) < UNDERFLOW] = 0.0
    return res


def bessel_j(order, x):
    """Integer-order Bessel function of the first kind, ``J_order(x)``, x >= 0."""
    if int(order) != order or order < 0:
        raise DomainError(f"bessel_j: order must be a non-negative integer, got {order!r}")
    return float(bessel_j_sequence(int(order), x)[int(order)])


@dataclass(frozen=True)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray
    interval: tuple

    def integrate(self, f):
        return float(np.dot(self.weights, f(self.nodes)))


def _legendre_pair(m, t):
    """Return (P_m(t), P_{m-1}(t)) by the three-term recurrence."""
    p_prev = np.ones_like(t)
    p = t.copy()
    for j in range(2, m + 1):
        p_prev, p = p, ((2 * j - 1) * t * p - (j - 1) * p_prev) / j
    return p, p_prev


def gauss_legendre(m, a=-1.0, b=1.0):
    """m-point Gauss-Legendre rule on [a, b], nodes by Newton on P_m."""
    if int(m) != m or m < 1:
        raise DomainError(f"gauss_legendre: m must be a positive integer, got {m!r}")
    if m > 512:
        raise DomainError("gauss_legendre: m > 512 not supported")
    if not (math.isfinite(a) and math.isfinite(b)) or a >= b:
        raise DomainError(f"gauss_legendre: need a < b, got [{a}, {b}]")
    m = int(m)
    k = np.arange(1, m + 1)
    t = np.cos(np.pi * (k - 0.25) / (m + 0.5))
    for _ in range(100):
        p, p_prev = _legendre_pair(m, t)
        dp = m * (t * p - p_prev) / (t * t - 1.0)
        dt = p / dp
        t = t - dt
        if np.max(np.abs(dt)) < 1e-16:
            break
    p, p_prev = _legendre_pair(m, t)
    dp = m * (t * p - p_prev) / (t * t - 1.0)
    w = 2.0 / ((1.0 - t * t) * dp * dp)
    order = np.argsort(t)
    t, w = t[order], w[order]
    half = 0.5 * (b - a)
    nodes = a + half * (t + 1.0)
    return QuadratureRule(nodes=nodes, weights=w * half, interval=(float(a), float(b)))
