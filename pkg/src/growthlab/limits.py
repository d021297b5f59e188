"""Limit kernels and limit laws.

Airy kernel and the Tracy-Widom GUE distribution ``F2`` (Fredholm
determinant and Painleve II routes), the discrete Bessel kernel with the
Poissonized longest-increasing-subsequence law, and the fluctuation
constants of geometric last-passage percolation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.integrate import solve_ivp

from .combinatorics import LIS_DP_MAX, lis_count_at_most
from .errors import AccuracyError, DomainError, InstabilityError
from .special import airy, airy_array, bessel_j_sequence, gauss_legendre

__all__ = [
    "HastingsMcLeodSolution",
    "Tw2Table",
    "airy_kernel",
    "airy_kernel_matrix",
    "discrete_bessel_kernel",
    "discrete_bessel_quotient",
    "fredholm_det_nystrom",
    "f2",
    "hastings_mcleod",
    "l_alpha_cdf",
    "poissonized_lis_cdf",
    "thm32_scaling",
    "tw2_fredholm",
    "tw2_mean",
    "tw2_painleve",
    "tw2_table",
]

XI_MIN, XI_MAX = -10.0, 6.0
HM_RIGHT = 8.0
HM_RTOL = 1e-13


# --- Airy kernel ---------------------------------------------------------


def airy_kernel(x, y):
    """``A(x, y) = (Ai(x) Ai'(y) - Ai'(x) Ai(y)) / (x - y)``, with the limit
    ``Ai'(x)^2 - x Ai(x)^2`` on the diagonal."""
    if abs(x) > 50 or abs(y) > 50:
        raise DomainError("airy_kernel: arguments must satisfy |x|, |y| <= 50")
    ax, dx = airy(x)
    if x == y:
        return dx * dx - x * ax * ax
    ay, dy = airy(y)
    return (ax * dy - dx * ay) / (x - y)


def airy_kernel_matrix(xs):
    """Matrix ``A(x_i, x_j)`` for distinct nodes ``xs``."""
    xs = np.asarray(xs, dtype=float)
    ai, aip = airy_array(xs)
    diff = xs[:, None] - xs[None, :]
    np.fill_diagonal(diff, 1.0)
    K = (np.outer(ai, aip) - np.outer(aip, ai)) / diff
    np.fill_diagonal(K, aip * aip - xs * ai * ai)
    return K


def fredholm_det_nystrom(kernel_matrix, a, length, m):
    """``det(I - K)`` on ``L^2(a, a + length)`` by m-point Gauss-Legendre.

    ``kernel_matrix`` maps a node array to the kernel matrix on those nodes.
    The discretisation is symmetrised as ``I - W^1/2 K W^1/2``.
    """
    rule = gauss_legendre(m, a, a + length)
    sw = np.sqrt(rule.weights)
    K = kernel_matrix(rule.nodes)
    return float(np.linalg.det(np.eye(m) - sw[:, None] * K * sw[None, :]))


def _check_xi(xi):
    if not math.isfinite(xi) or not XI_MIN <= xi <= XI_MAX:
        raise DomainError(f"F2 evaluation needs xi in [{XI_MIN}, {XI_MAX}], got {xi!r}")


def _tw2_fredholm_pair(xi):
    coarse = fredholm_det_nystrom(airy_kernel_matrix, xi, 14.0, 60)
    fine = fredholm_det_nystrom(airy_kernel_matrix, xi, 18.0, 80)
    return fine, abs(fine - coarse)


def tw2_fredholm(xi, tol=1e-8, with_error=False):
    """Tracy-Widom ``F2(xi) = det(I - A)`` on ``L^2(xi, inf)``.

    Nystrom with (m, L) = (60, 14), checked against (80, 18); the finer value
    is returned.  Raises AccuracyError if the two differ by more than ``tol``.
    """
    xi = float(xi)
    _check_xi(xi)
    value, est = _tw2_fredholm_pair(xi)
    if est > tol:
        raise AccuracyError(f"Nystrom F2({xi}) not converged: estimate {est:.3g}", achieved=est)
    value = min(max(value, 0.0), 1.0)
    return (value, est) if with_error else value


# --- Hastings-McLeod -----------------------------------------------------


@dataclass(frozen=True)
class HastingsMcLeodSolution:
    """Hastings-McLeod solution of ``u'' = x u + 2 u^3`` on ``[x_min, 8]``.

    ``q(x) = int_x^inf (t - x) u(t)^2 dt`` is carried along, so that
    ``F2(x) = exp(-q(x))``.
    """

    x_grid: np.ndarray
    u: np.ndarray
    u_prime: np.ndarray
    q: np.ndarray
    dense: object = field(repr=False, compare=False)

    @property
    def x_min(self):
        return float(self.x_grid[-1])

    def at(self, x):
        """``(u, u', q)`` at ``x`` from the dense interpolant."""
        if not self.x_min <= x <= HM_RIGHT:
            raise DomainError(f"x = {x} outside [{self.x_min}, {HM_RIGHT}]")
        y = self.dense(x)
        return float(y[0]), float(y[1]), float(y[2])


def _airy_tail_q(x):
    """``int_x^inf (t - x) Ai(t)^2 dt`` in closed form."""
    ai, aip = airy(x)
    return (2 * x * x * ai * ai - 2 * x * aip * aip - ai * aip) / 3.0


def _pii_rhs(x, y):
    u, up, q, qp = y
    return [up, x * u + 2.0 * u ** 3, qp, u * u]


def _blowup(x, y):
    return abs(y[0]) - 1e6


_blowup.terminal = True


def hastings_mcleod(x_min=-10.0, rtol=HM_RTOL, step=0.01) -> HastingsMcLeodSolution:
    """Integrate Painleve II from ``x = 8`` leftwards to ``x_min``.

    Starts from ``u(8) = Ai(8)``, ``u'(8) = Ai'(8)`` (the cubic term is below
    1e-20 there) and uses DOP853 with relative tolerance ``rtol``.
    """
    if not math.isfinite(x_min) or not -10.0 <= x_min < HM_RIGHT:
        raise DomainError(f"hastings_mcleod: x_min must lie in [-10, 8), got {x_min!r}")
    ai, aip = airy(HM_RIGHT)
    y0 = [ai, aip, _airy_tail_q(HM_RIGHT), -(aip * aip - HM_RIGHT * ai * ai)]
    sol = solve_ivp(
        _pii_rhs,
        (HM_RIGHT, x_min),
        y0,
        method="DOP853",
        rtol=max(rtol, 2.3e-14),
        atol=1e-300,
        dense_output=True,
        events=_blowup,
    )
    if sol.status == 1 or not sol.success:
        where = sol.t[-1]
        raise InstabilityError(f"Painleve II integration blew up near x = {where:.4g}", achieved=where)
    n = int(round((HM_RIGHT - x_min) / step))
    grid = np.linspace(HM_RIGHT, x_min, n + 1)
    ys = sol.sol(grid)
    if (ys[0] <= 0).any():
        raise InstabilityError("Painleve II solution left the positive branch")
    return HastingsMcLeodSolution(
        x_grid=grid, u=ys[0], u_prime=ys[1], q=ys[2], dense=sol.sol
    )


@lru_cache(maxsize=4)
def _hm_cached(rtol):
    return hastings_mcleod(-10.0, rtol=rtol)


def tw2_painleve(xi, with_error=False):
    """``F2(xi) = exp(-int_xi^inf (x - xi) u(x)^2 dx)`` with ``u`` Hastings-McLeod.

    The error estimate compares against an integration at ten times the
    tolerance.
    """
    xi = float(xi)
    if not math.isfinite(xi) or xi < -10.0:
        raise DomainError(f"tw2_painleve needs xi >= -10, got {xi!r}")
    if xi >= HM_RIGHT:
        value = math.exp(-_airy_tail_q(xi))
        return (value, 0.0) if with_error else value
    value = math.exp(-_hm_cached(HM_RTOL).at(xi)[2])
    if not with_error:
        return value
    coarse = math.exp(-_hm_cached(10 * HM_RTOL).at(xi)[2])
    return value, abs(value - coarse)


# --- tables --------------------------------------------------------------


@dataclass(frozen=True)
class Tw2Table:
    xi_grid: np.ndarray
    f2_values: np.ndarray
    method: str
    tolerance: float
    est_error: np.ndarray
    clamped: np.ndarray

    def to_csv(self):
        from .stats import format_float

        lines = ["xi,f2,method,est_error"]
        for x, f, e in zip(self.xi_grid, self.f2_values, self.est_error):
            lines.append(f"{format_float(x)},{format_float(f)},{self.method},{format_float(e)}")
        return "\n".join(lines) + "\n"


def _f2_point(xi, method):
    if method == "fredholm":
        return tw2_fredholm(xi, tol=math.inf, with_error=True)
    if method == "painleve":
        return tw2_painleve(xi, with_error=True)
    raise DomainError(f"unknown F2 method {method!r}")


def tw2_table(xi_min=-8.0, xi_max=4.0, step=0.1, method="fredholm") -> Tw2Table:
    """Tabulate ``F2`` on an even grid.

    Points outside ``[-10, 6]`` are clamped to 0 or 1 and flagged; their
    error estimate is the value of ``F2`` (or ``1 - F2``) at the clamp.
    """
    if not (step > 0 and xi_max >= xi_min):
        raise DomainError("tw2_table: need step > 0 and xi_max >= xi_min")
    n = int(math.floor((xi_max - xi_min) / step + 1e-9))
    grid = np.round(xi_min + step * np.arange(n + 1), 12)
    vals = np.empty_like(grid)
    errs = np.empty_like(grid)
    clamped = np.zeros(grid.shape, dtype=bool)
    for i, xi in enumerate(grid):
        if xi < XI_MIN:
            vals[i], errs[i], clamped[i] = 0.0, _f2_point(XI_MIN, method)[0], True
        elif xi > XI_MAX:
            vals[i], errs[i], clamped[i] = 1.0, 1.0 - _f2_point(XI_MAX, method)[0], True
        else:
            vals[i], errs[i] = _f2_point(float(xi), method)
    tol = float(errs.max()) if errs.size else 0.0
    return Tw2Table(grid, vals, method, tol, errs, clamped)


def f2(xi):
    """``F2`` for any real ``xi``: Painleve route on [-10, 8], 0 below, tail above."""
    xi = float(xi)
    if xi < XI_MIN:
        return 0.0
    return tw2_painleve(xi)


def tw2_mean(method="painleve", m=200):
    """``int xi dF2(xi)`` as ``int_0^inf (1 - F2) - int_-inf^0 F2`` on [-10, 8]."""
    rule_pos = gauss_legendre(m, 0.0, HM_RIGHT)
    rule_neg = gauss_legendre(m, XI_MIN, 0.0)
    if method == "painleve":
        fn = tw2_painleve
    elif method == "fredholm":
        fn = lambda x: tw2_fredholm(min(x, XI_MAX), tol=math.inf)
    else:
        raise DomainError(f"unknown F2 method {method!r}")
    pos = sum(w * (1.0 - fn(x)) for x, w in zip(rule_pos.nodes, rule_pos.weights))
    neg = sum(w * fn(x) for x, w in zip(rule_neg.nodes, rule_neg.weights))
    return pos - neg


# --- discrete Bessel -----------------------------------------------------


def _bessel_bound_index(z, eps=1e-20):
    """Smallest k > z with ``(z/2)^k / k! < eps``; bounds |J_j(z)| for j >= k."""
    k = max(1, math.ceil(z))
    if z == 0:
        return k
    log_half, log_eps = math.log(0.5 * z), math.log(eps)
    while k * log_half - math.lgamma(k + 1) > log_eps:
        k += 1
    return k


def _signed_bessel(z, lo, hi):
    """Array of ``J_k(z)`` for integers ``lo <= k <= hi``; J_{-k} = (-1)^k J_k."""
    top = max(abs(lo), abs(hi))
    seq = bessel_j_sequence(top, z)
    ks = np.arange(lo, hi + 1)
    vals = seq[np.abs(ks)]
    neg = ks < 0
    vals[neg] *= np.where(ks[neg] % 2 == 0, 1.0, -1.0)
    return vals


def _check_alpha(alpha):
    if not math.isfinite(alpha) or alpha < 0 or alpha > 1e4:
        raise DomainError(f"alpha must lie in [0, 1e4], got {alpha!r}")


def _bessel_gram(alpha, points):
    """Series kernel ``sum_{s>=1} J_{x+s} J_{y+s}`` on integer ``points``."""
    z = 2.0 * math.sqrt(alpha)
    points = np.asarray(points, dtype=np.int64)
    lo = int(points.min()) + 1
    cut = _bessel_bound_index(z)
    hi = max(int(points.max()) + 1, cut) + cut
    J = _signed_bessel(z, lo, hi)
    span = hi - int(points.max())
    idx = (points - lo + 1)[:, None] + np.arange(span)[None, :]
    H = J[idx]
    # every omitted term has index > cut, bounded by (z/2)^k/k!
    return H @ H.T


def discrete_bessel_kernel(alpha, x, y):
    """Discrete Bessel kernel ``B^alpha(x, y)`` via its series form."""
    _check_alpha(alpha)
    for v in (x, y):
        if int(v) != v or abs(v) > 1e4:
            raise DomainError(f"discrete Bessel kernel needs integers with |x| <= 1e4, got {v!r}")
    if alpha == 0:
        return 0.0
    G = _bessel_gram(alpha, [int(x), int(y)])
    return float(G[0, 1])


def discrete_bessel_quotient(alpha, x, y):
    """``sqrt(alpha) (J_x J_{y+1} - J_{x+1} J_y) / (x - y)`` at ``z = 2 sqrt(alpha)``."""
    _check_alpha(alpha)
    if x == y:
        raise DomainError("quotient form is undefined on the diagonal")
    z = 2.0 * math.sqrt(alpha)
    lo, hi = min(x, y), max(x, y) + 1
    J = _signed_bessel(z, lo, hi)
    j = lambda k: J[k - lo]
    return float(math.sqrt(alpha) * (j(x) * j(y + 1) - j(x + 1) * j(y)) / (x - y))


def _l_alpha_det(alpha, n, K):
    pts = np.arange(n, n + K)
    B = _bessel_gram(alpha, pts)
    return float(np.linalg.det(np.eye(K) - B))


def l_alpha_cdf(alpha, n, tol=1e-12):
    """``P[L(alpha) <= n] = det(I - B^alpha)`` on ``l^2({n, n+1, ...})``.

    The operator is cut to ``{n, ..., n+K-1}``, starting from
    ``K = ceil(4 sqrt(alpha)) + 40`` and doubling until the determinant moves
    by less than ``tol``.
    """
    _check_alpha(alpha)
    if int(n) != n or n < 0:
        raise DomainError(f"n must be a non-negative integer, got {n!r}")
    n = int(n)
    if alpha == 0:
        return 1.0
    K = math.ceil(4 * math.sqrt(alpha)) + 40
    prev = _l_alpha_det(alpha, n, K)
    for _ in range(6):
        K *= 2
        cur = _l_alpha_det(alpha, n, K)
        if abs(cur - prev) < tol:
            return min(max(cur, 0.0), 1.0)
        prev = cur
    raise AccuracyError(f"l_alpha_cdf({alpha}, {n}) truncation not certified", achieved=abs(cur - prev))


def poissonized_lis_cdf(alpha, n, tail=1e-12):
    """``sum_N e^{-alpha} alpha^N / N! P[l_N <= n]`` with exact LIS laws.

    The sum stops at the first ``N_max`` whose Poisson tail bound
    ``pmf(N_max + 1) / (1 - alpha / (N_max + 2))`` is below ``tail``.
    """
    _check_alpha(alpha)
    if int(n) != n or n < 0:
        raise DomainError(f"n must be a non-negative integer, got {n!r}")
    if alpha == 0:
        return 1.0
    log_a = math.log(alpha)
    log_pmf = lambda N: -alpha + N * log_a - math.lgamma(N + 1)
    total = 0.0
    N = 0
    while True:
        if N > LIS_DP_MAX:
            raise AccuracyError("Poisson tail not certified within the exact LIS range", achieved=bound)
        p = math.exp(log_pmf(N))
        total += p * lis_count_at_most(N, int(n)) / math.factorial(N)
        if N + 2 > alpha:
            bound = math.exp(log_pmf(N + 1)) / (1.0 - alpha / (N + 2))
            if bound < tail:
                return total
        else:
            bound = math.inf
        N += 1


# --- scaling constants ---------------------------------------------------


def thm32_scaling(gamma, q):
    """Centering ``omega`` and scale ``sigma`` for ``G([gamma N], N)``."""
    if not (math.isfinite(gamma) and gamma >= 1):
        raise DomainError(f"gamma must be >= 1, got {gamma!r}")
    if not 0 < q < 1:
        raise DomainError(f"q must lie in (0, 1), got {q!r}")
    sq = math.sqrt(q * gamma)
    omega = (1 + sq) ** 2 / (1 - q) - 1
    sigma = (
        (q / gamma) ** (1 / 6)
        * (math.sqrt(gamma) + math.sqrt(q)) ** (2 / 3)
        * (1 + sq) ** (2 / 3)
        / (1 - q)
    )
    return omega, sigma
