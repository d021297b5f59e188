"""Orthogonal polynomial ensembles on discrete and continuous weights.

An N-point ensemble with weight ``w`` on ``Omega`` has density proportional
to ``prod_{i<j} (x_i - x_j)^2 prod_j w(x_j)``.  Its correlation functions
are determinants of the Christoffel-Darboux kernel of the orthonormal
polynomials of ``w``; the law of the rightmost particle is a Fredholm
determinant of that kernel.  Discrete weights on the non-negative integers
are truncated where the remaining mass is negligible.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    ConditioningError,
    AccuracyError,
    DomainError,
    PreconditionError,
    ResourceError,
)
from .limits import fredholm_det_nystrom

__all__ = [
    "DiscreteWeight",
    "KernelMatrix",
    "OrthoPolySystem",
    "brute_correlation",
    "cd_kernel",
    "cd_kernel_sum",
    "correlation_fn",
    "ensemble_density",
    "fredholm_expectation_check",
    "gue_xmax_cdf",
    "hermite_functions",
    "kernel_matrix",
    "meixner_ensemble",
    "meixner_lpp_cdf",
    "meixner_weight",
    "stieltjes_system",
    "xmax_cdf_discrete",
    "xmax_cdf_gram",
]

TAIL_TOL = 1e-14
ORTHO_TOL = 1e-10


@dataclass(frozen=True)
class DiscreteWeight:
    """Positive weight on ``{0, 1, ..., M_cut}``.

    ``tail_bound`` is a bound on the mass beyond ``M_cut`` relative to the
    total (zero for a weight that genuinely lives on a finite set).
    """

    values: np.ndarray
    tail_bound: float = 0.0

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).ravel().copy()
        if v.size == 0 or not np.all(np.isfinite(v)) or (v <= 0).any():
            raise DomainError("weight values must be finite and positive on the support")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def support(self):
        return np.arange(self.values.size)

    @property
    def size(self):
        return self.values.size

    @property
    def mass(self):
        return float(self.values.sum())

    @classmethod
    def truncate(cls, fn, moment_degree=0, rel_tol=TAIL_TOL, max_cut=200_000):
        """Cut ``fn`` on the non-negative integers where its tail is negligible.

        Uses the ratio test: once ``r(x) = w(x+1)/w(x) < 1`` and assuming the
        ratio is non-increasing from there on, the tail beyond ``x`` is at
        most ``w(x) r / (1 - r)``.  With ``moment_degree = d`` the same test is
        applied to ``w(x) (1 + x)^d``, which is what orthogonality sums of
        polynomials of total degree ``d`` need.
        """
        d = int(moment_degree)
        vals = [float(fn(0))]
        logm = lambda x: d * math.log1p(x)
        total_m = vals[0]
        total = vals[0]
        x = 0
        while x < max_cut:
            nxt = float(fn(x + 1))
            if nxt < 0 or not math.isfinite(nxt):
                raise DomainError(f"weight evaluates to {nxt!r} at x = {x + 1}")
            if nxt == 0.0:
                # finite support; everything beyond is zero
                return cls(np.array(vals), 0.0)
            vals.append(nxt)
            x += 1
            total += nxt
            wm = nxt * math.exp(logm(x))
            total_m += wm
            r = nxt / vals[-2]
            rm = r * math.exp(logm(x + 1) - logm(x)) if d else r
            if rm < 1.0:
                tail_m = wm * rm / (1.0 - rm)
                tail = nxt * r / (1.0 - r)
                if tail_m < rel_tol * total_m and tail < rel_tol * total:
                    return cls(np.array(vals), tail / total)
        raise ResourceError(f"weight tail not below {rel_tol} within {max_cut} points")


def _check_finite_weight(weight):
    if weight.tail_bound >= TAIL_TOL:
        raise PreconditionError(f"weight truncation tail {weight.tail_bound:.3g} is not below {TAIL_TOL}")


@dataclass(frozen=True)
class OrthoPolySystem:
    """Orthonormal polynomials ``p_0..p_K`` of a discrete weight.

    ``x p_k = b_{k+1} p_{k+1} + alpha_k p_k + b_k p_{k-1}`` with
    ``b_k = sqrt(beta_k)`` and ``b_k = kappa_{k-1} / kappa_k``.  ``norm_k`` is
    the weighted norm of the monic polynomial of degree k.  ``table[k]``
    holds ``p_k`` on the support.
    """

    alpha: np.ndarray
    beta: np.ndarray
    norm: np.ndarray
    kappa_ratio: np.ndarray
    table: np.ndarray

    @property
    def K(self):
        return self.alpha.size - 1

    def evaluate(self, x, k_max=None):
        """``[p_0(x), ..., p_kmax(x)]`` by the three-term recurrence."""
        k_max = self.K if k_max is None else k_max
        out = np.empty(k_max + 1)
        out[0] = 1.0 / self.norm[0]
        prev = 0.0
        for k in range(k_max):
            nxt = ((x - self.alpha[k]) * out[k] - self.kappa_ratio[k] * prev) / self.kappa_ratio[k + 1]
            prev = out[k]
            out[k + 1] = nxt
        return out


def stieltjes_system(weight: DiscreteWeight, K: int) -> OrthoPolySystem:
    """Recurrence coefficients of ``weight`` by the discrete Stieltjes procedure."""
    K = int(K)
    if K < 0 or K > weight.size - 1:
        raise PreconditionError(f"need 0 <= K <= |support| - 1 = {weight.size - 1}, got {K}")
    x = weight.support.astype(float)
    w = weight.values / weight.mass
    P = np.zeros((K + 1, x.size))
    alpha = np.zeros(K + 1)
    beta = np.zeros(K + 1)
    beta[0] = weight.mass
    P[0] = 1.0
    prev = np.zeros_like(x)
    b_prev = 0.0
    for k in range(K + 1):
        alpha[k] = np.dot(x * P[k] * P[k], w)
        if k == K:
            break
        r = (x - alpha[k]) * P[k] - b_prev * prev
        # one pass of re-orthogonalisation against the earlier polynomials
        r -= P[: k + 1].T @ (P[: k + 1] @ (r * w))
        b2 = float(np.dot(r * r, w))
        if not b2 > 1e-300:
            raise ConditioningError(f"indefinite moments at degree {k + 1}", achieved=b2)
        b = math.sqrt(b2)
        beta[k + 1] = b2
        prev, b_prev = P[k], b
        P[k + 1] = r / b
    gram = (P * w) @ P.T
    err = float(np.max(np.abs(gram - np.eye(K + 1))))
    if err > ORTHO_TOL:
        raise ConditioningError(f"orthonormality defect {err:.3g}", achieved=err)
    kappa_ratio = np.sqrt(beta)
    kappa_ratio[0] = 0.0
    norm = np.sqrt(np.cumprod(beta))
    table = P / math.sqrt(weight.mass)
    return OrthoPolySystem(alpha, beta, norm, kappa_ratio, table)


def _point_index(weight, x):
    if int(x) != x or not 0 <= x < weight.size:
        raise DomainError(f"{x!r} is not a support point")
    return int(x)


def _check_n(ops, N):
    if int(N) != N or not 1 <= N <= ops.K:
        raise PreconditionError(f"need 1 <= N <= K = {ops.K}, got {N!r}")


def cd_kernel(ops: OrthoPolySystem, weight: DiscreteWeight, N, x, y) -> float:
    """Christoffel-Darboux kernel ``K_N(x, y)`` of the N-point ensemble.

    Off the diagonal the quotient form
    ``b_N (p_N(x) p_{N-1}(y) - p_{N-1}(x) p_N(y)) / (x - y) sqrt(w(x) w(y))``;
    on the diagonal the sum ``sum_{k<N} p_k(x)^2 w(x)``.
    """
    _check_n(ops, N)
    i, j = _point_index(weight, x), _point_index(weight, y)
    P, w = ops.table, weight.values
    if i == j:
        return float(np.dot(P[:N, i], P[:N, i]) * w[i])
    num = P[N, i] * P[N - 1, j] - P[N - 1, i] * P[N, j]
    return float(ops.kappa_ratio[N] * num / (i - j) * math.sqrt(w[i] * w[j]))


def cd_kernel_sum(ops: OrthoPolySystem, weight: DiscreteWeight, N, x, y) -> float:
    """``sum_{k<N} p_k(x) p_k(y) sqrt(w(x) w(y))``."""
    _check_n(ops, N)
    i, j = _point_index(weight, x), _point_index(weight, y)
    P, w = ops.table, weight.values
    return float(np.dot(P[:N, i], P[:N, j]) * math.sqrt(w[i] * w[j]))


@dataclass(frozen=True)
class KernelMatrix:
    domain: tuple
    entries: np.ndarray

    def __post_init__(self):
        e = np.array(self.entries, dtype=float)
        if e.ndim != 2 or e.shape[0] != e.shape[1] or e.shape[0] != len(self.domain):
            raise DomainError("kernel entries must be a square matrix matching the domain")
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)
        object.__setattr__(self, "domain", tuple(int(d) for d in self.domain))

    def index(self, x):
        try:
            return self.domain.index(int(x))
        except ValueError:
            raise DomainError(f"{x!r} is not in the kernel domain") from None

    def restrict(self, points):
        idx = [self.index(p) for p in points]
        return self.entries[np.ix_(idx, idx)]


def kernel_matrix(ops: OrthoPolySystem, weight: DiscreteWeight, N, points=None) -> KernelMatrix:
    """``K_N`` on ``points`` (default: the whole support), quotient form off
    the diagonal."""
    _check_n(ops, N)
    pts = weight.support if points is None else np.asarray([_point_index(weight, p) for p in points])
    P = ops.table[:, pts]
    sw = np.sqrt(weight.values[pts])
    a, b = P[N] * sw, P[N - 1] * sw
    diff = pts[:, None] - pts[None, :]
    same = diff == 0
    num = np.outer(a, b) - np.outer(b, a)
    K = ops.kappa_ratio[N] * num / np.where(same, 1, diff)
    diag = np.einsum("ki,ki->i", P[:N], P[:N]) * sw * sw
    K[same] = np.broadcast_to(diag[:, None], K.shape)[same]
    return KernelMatrix(tuple(int(p) for p in pts), K)


def correlation_fn(kernel: KernelMatrix, points) -> float:
    """``rho_m(x_1..x_m) = det(K_N(x_i, x_j))``."""
    points = [int(p) for p in points]
    if len(set(points)) != len(points):
        raise PreconditionError("correlation points must be distinct")
    if not points:
        return 1.0
    return float(np.linalg.det(kernel.restrict(points)))


def _tuples(weight, N):
    if weight.size > 30 or N > 4:
        raise ResourceError("direct summation is limited to |support| <= 30 and N <= 4")
    grids = np.meshgrid(*([weight.support] * N), indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def ensemble_density(weight: DiscreteWeight, N):
    """All N-tuples of the support and their probabilities."""
    X = _tuples(weight, N)
    w = weight.values / weight.mass
    dens = np.prod(w[X], axis=1)
    for i, j in itertools.combinations(range(N), 2):
        dens = dens * (X[:, i] - X[:, j]).astype(float) ** 2
    return X, dens / dens.sum()


def brute_correlation(weight: DiscreteWeight, N, points) -> float:
    """``N!/(N-m)!`` times the marginal of the ensemble density, by direct
    summation over the free coordinates."""
    if N > 3:
        raise ResourceError("brute_correlation is limited to N <= 3")
    points = [_point_index(weight, p) for p in points]
    m = len(points)
    if m > N:
        raise PreconditionError("more points than particles")
    X, dens = ensemble_density(weight, N)
    mask = np.all(X[:, :m] == np.asarray(points, dtype=X.dtype), axis=1)
    return math.factorial(N) / math.factorial(N - m) * float(dens[mask].sum())


def fredholm_expectation_check(weight: DiscreteWeight, N, f, ops=None):
    """``(E[prod (1 + f(x_j))], det(I + f K_N))`` over the support."""
    fv = np.array([f(int(x)) for x in weight.support], dtype=float) if callable(f) else np.asarray(f, float)
    X, dens = ensemble_density(weight, N)
    lhs = float(np.dot(dens, np.prod(1.0 + fv[X], axis=1)))
    ops = ops or stieltjes_system(weight, N)
    K = kernel_matrix(ops, weight, N).entries
    rhs = float(np.linalg.det(np.eye(weight.size) + fv[:, None] * K))
    return lhs, rhs


# --- Meixner -------------------------------------------------------------


def _check_mnq(M, N, q):
    if int(N) != N or N < 1:
        raise DomainError(f"N must be a positive integer, got {N!r}")
    if int(M) != M or M < N:
        raise PreconditionError(f"need M >= N, got M={M!r}, N={N!r}")
    if not 0 < q < 1:
        raise DomainError(f"q must lie in (0, 1), got {q!r}")


def meixner_weight(M, N, q, x) -> float:
    """``binom(M - N + x, x) q^x``."""
    _check_mnq(M, N, q)
    if int(x) != x or x < 0:
        raise DomainError(f"x must be a non-negative integer, got {x!r}")
    M, N, x = int(M), int(N), int(x)
    if x <= 500:
        return math.comb(M - N + x, x) * q ** x
    logw = math.lgamma(M - N + x + 1) - math.lgamma(x + 1) - math.lgamma(M - N + 1) + x * math.log(q)
    return math.exp(logw)


def meixner_ensemble(M, N, q):
    """Truncated Meixner weight and its orthonormal system up to degree N."""
    _check_mnq(M, N, q)
    weight = DiscreteWeight.truncate(lambda x: meixner_weight(M, N, q, x), moment_degree=2 * N + 2)
    if weight.size < N + 1:
        # the truncation must leave room for p_N
        weight = DiscreteWeight(
            np.array([meixner_weight(M, N, q, x) for x in range(N + 1)]), weight.tail_bound
        )
    return weight, stieltjes_system(weight, N)


def _det_checked(A):
    sign, logdet = np.linalg.slogdet(A)
    det = float(sign * math.exp(logdet)) if sign != 0 else 0.0
    cond = np.linalg.cond(A)
    # relative error ~ cond * eps; only the absolute error matters here
    if abs(det) * cond * np.finfo(float).eps > 1e-12:
        raise ConditioningError(f"unstable determinant (condition {cond:.3g})", achieved=cond)
    return det


def xmax_cdf_discrete(weight: DiscreteWeight, N, a, ops=None) -> float:
    """``P[x_max <= a] = det(I - K_N)`` restricted to support points ``> a``."""
    _check_finite_weight(weight)
    if a >= weight.size - 1:
        return 1.0
    if a < 0:
        return 0.0
    ops = ops or stieltjes_system(weight, N)
    pts = np.arange(int(math.floor(a)) + 1, weight.size)
    K = kernel_matrix(ops, weight, N, pts).entries
    det = _det_checked(np.eye(pts.size) - K)
    return min(max(det, 0.0), 1.0)


def xmax_cdf_gram(weight: DiscreteWeight, N, a, ops=None) -> float:
    """``P[x_max <= a] = det(sum_{x <= a} p_i(x) p_j(x) w(x))_{i,j<N}``."""
    _check_finite_weight(weight)
    ops = ops or stieltjes_system(weight, N)
    k = int(math.floor(a)) + 1
    if k <= 0:
        return 0.0
    P = ops.table[:N, :k]
    G = (P * weight.values[:k]) @ P.T
    return float(np.linalg.det(G))


def meixner_lpp_cdf(M, N, q, g) -> float:
    """``P[G(M, N) <= g]`` for geometric LPP through the Meixner ensemble.

    The N particles are distinct non-negative integers, so the rightmost one
    is at least ``N - 1``; the last-passage time equals ``x_max - (N - 1)``.
    """
    weight, ops = _meixner_cached(int(M), int(N), float(q))
    return xmax_cdf_discrete(weight, int(N), g + N - 1, ops)


_MEIXNER_CACHE: dict = {}


def _meixner_cached(M, N, q):
    key = (M, N, q)
    if key not in _MEIXNER_CACHE:
        _MEIXNER_CACHE[key] = meixner_ensemble(M, N, q)
    return _MEIXNER_CACHE[key]


# --- GUE -----------------------------------------------------------------


def hermite_functions(n, x):
    """``phi_0..phi_{n-1}`` at ``x``: orthonormal in ``L^2(R)``,
    ``phi_k = H_k e^{-x^2/2} / sqrt(2^k k! sqrt(pi))``."""
    x = np.asarray(x, dtype=float)
    out = np.zeros((n,) + x.shape)
    out[0] = math.pi ** -0.25 * np.exp(-0.5 * x * x)
    if n > 1:
        out[1] = math.sqrt(2.0) * x * out[0]
    for k in range(1, n - 1):
        out[k + 1] = math.sqrt(2.0 / (k + 1)) * x * out[k] - math.sqrt(k / (k + 1)) * out[k - 1]
    return out


def gue_xmax_cdf(N, xi, tol=1e-8) -> float:
    """``P[(sqrt(2N) x_max - 2N) / N^(1/3) <= xi]`` for the N-point GUE
    (weight ``e^{-x^2}``).

    ``det(I - K_N)`` on ``(a, inf)``, ``a = sqrt(2N) + xi / (sqrt(2) N^(1/6))``,
    by Nystrom in the edge variable on ``[xi, max(xi, 0) + L]`` with
    ``L = 14`` and ``L = 18`` as a refinement check.  Below ``xi = -10`` the
    value is below 1e-13 for every N <= 100 and 0 is returned.
    """
    if int(N) != N or not 1 <= N <= 100:
        raise DomainError(f"gue_xmax_cdf needs 1 <= N <= 100, got {N!r}")
    xi = float(xi)
    if math.isnan(xi):
        raise DomainError("xi is NaN")
    if xi < -10.0:
        return 0.0
    if xi > 60.0:
        return 1.0
    N = int(N)
    c = math.sqrt(2.0) * N ** (1 / 6)
    root = math.sqrt(2.0 * N)

    def kernel(s):
        x = root + s / c
        phi = hermite_functions(N, x)
        return phi.T @ phi / c

    vals = []
    for m, L in ((60, 14.0), (80, 18.0)):
        length = max(xi, 0.0) + L - xi
        vals.append(fredholm_det_nystrom(kernel, xi, length, math.ceil(m * length / L)))
    est = abs(vals[1] - vals[0])
    if est > tol:
        raise AccuracyError(f"GUE edge determinant not converged: estimate {est:.3g}", achieved=est)
    return min(max(vals[1], 0.0), 1.0)
