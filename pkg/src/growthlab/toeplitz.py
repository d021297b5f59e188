"""Toeplitz determinants, their exact identities, and CUE Monte Carlo.

``D_n(f) = det(f_hat[i - j])`` for ``1 <= i, j <= n``.  Exact symbols
(Laurent polynomials with rational coefficients) give exact determinants;
numeric symbols come from a trapezoid rule with a refinement check.  For
unitary Haar averages ``D_n(f) = E[prod_j f(e^{i theta_j})]`` is tested by
sampling matrices rather than eigenvalues.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .combinatorics import _elementary_all, bareiss_det, gessel_rhs, macmahon_product
from .errors import AccuracyError, DomainError, PreconditionError, ResourceError
from .rng import SeededStream

__all__ = [
    "FourierSymbol",
    "UnitarySample",
    "cue_moment_exact",
    "cue_moment_mc",
    "fourier_coeffs_exact",
    "fourier_coeffs_numeric",
    "gessel_check",
    "haar_unitary",
    "heine_check",
    "laurent_product",
    "macmahon_symbol",
    "macmahon_toeplitz_check",
    "poissonized_toeplitz",
    "toeplitz_det",
    "weyl_mc_check",
]


@dataclass(frozen=True)
class FourierSymbol:
    """Fourier coefficients ``k -> f_hat_k`` of a function on the circle.

    ``complete`` symbols are Laurent polynomials: absent coefficients are
    zero.  Otherwise only ``|k| <= bandwidth`` is known.
    """

    coeffs: dict
    exact: bool = False
    complete: bool = False
    bandwidth: int = 0
    aliasing_error: float = 0.0

    def __post_init__(self):
        if not self.complete and self.coeffs:
            object.__setattr__(self, "bandwidth", max(abs(k) for k in self.coeffs))

    def __getitem__(self, k):
        if k in self.coeffs:
            return self.coeffs[k]
        if self.complete or abs(k) <= self.bandwidth:
            return Fraction(0) if self.exact else 0.0
        raise PreconditionError(f"Fourier coefficient {k} is not available")

    def is_real_symmetric(self, tol=0.0):
        """``f_hat_{-k} == conj(f_hat_k)`` for every stored k."""
        for k, c in self.coeffs.items():
            d = self[-k] - complex(c).conjugate() if not self.exact else self[-k] - c
            if abs(d) > tol:
                return False
        return True


def _fft_coeffs(f, K, grid):
    theta = 2.0 * np.pi * np.arange(grid) / grid
    vals = np.array([f(t) for t in theta], dtype=complex)
    if not np.all(np.isfinite(vals)):
        raise DomainError("symbol has non-finite samples")
    c = np.fft.fft(vals) / grid
    ks = np.arange(-K, K + 1)
    return ks, c[ks % grid], float(np.max(np.abs(vals)))


def fourier_coeffs_numeric(f, K, grid=4096) -> FourierSymbol:
    """Coefficients ``|k| <= K`` by the trapezoid rule on ``grid`` points.

    The aliasing error estimate is the largest change under doubling the
    grid.  Real parts are kept when every imaginary part is below 1e-14 of
    the symbol's sup norm.
    """
    K, grid = int(K), int(grid)
    if K < 0 or grid < 4 * K or grid < 1 or grid & (grid - 1):
        raise DomainError("need a power-of-two grid with grid >= 4K")
    ks, c1, scale = _fft_coeffs(f, K, grid)
    _, c2, _ = _fft_coeffs(f, K, 2 * grid)
    alias = float(np.max(np.abs(c2 - c1))) if K >= 0 else 0.0
    if np.max(np.abs(c2.imag)) <= 1e-14 * max(scale, 1.0):
        c2 = c2.real
    coeffs = {int(k): v.item() for k, v in zip(ks, c2)}
    return FourierSymbol(coeffs, exact=False, complete=False, aliasing_error=alias)


def laurent_product(*factors):
    """Exact product of Laurent polynomials given as ``{power: coeff}`` dicts."""
    out = {0: Fraction(1)}
    for fac in factors:
        nxt = {}
        for i, a in out.items():
            for j, b in fac.items():
                nxt[i + j] = nxt.get(i + j, 0) + a * Fraction(b)
        out = nxt
    return {k: v for k, v in out.items() if v != 0}


def fourier_coeffs_exact(a, b) -> FourierSymbol:
    """Symbol of ``prod_l (1 + a_l / z)(1 + b_l z)``.

    ``f_hat_k = sum_i e_i(b) e_{i-k}(a)`` with ``e`` the elementary symmetric
    polynomials.
    """
    if len(a) > 8 or len(b) > 8:
        raise DomainError("fourier_coeffs_exact takes at most 8 parameters per side")
    ea, eb = _elementary_all(a), _elementary_all(b)
    coeffs = {}
    for i, ei in enumerate(eb):
        for j, ej in enumerate(ea):
            c = ei * ej
            if c:
                coeffs[i - j] = coeffs.get(i - j, Fraction(0)) + c
    coeffs = {k: v for k, v in coeffs.items() if v != 0}
    return FourierSymbol(coeffs, exact=True, complete=True)


def toeplitz_matrix(symbol: FourierSymbol, n):
    return [[symbol[i - j] for j in range(n)] for i in range(n)]


def toeplitz_det(symbol: FourierSymbol, n):
    """``D_n = det(f_hat_{i-j})``; ``D_0 = 1``.  Exact for exact symbols."""
    if int(n) != n or n < 0:
        raise DomainError(f"order must be a non-negative integer, got {n!r}")
    n = int(n)
    if n == 0:
        return Fraction(1) if symbol.exact else 1.0
    T = toeplitz_matrix(symbol, n)
    if symbol.exact:
        return bareiss_det(T)
    d = np.linalg.det(np.array(T))
    return d.item()


# --- exact identities ----------------------------------------------------


def heine_check(weight, phi, psi):
    """Both sides of Heine's identity on a finite set.

    ``weight`` maps points of Omega to exact weights; ``phi``, ``psi`` are
    lists of n functions.  Returns ``(lhs, rhs)`` with
    ``lhs = 1/n! sum_{Omega^n} det(phi_i(x_j)) det(psi_i(x_j)) prod w(x_j)``
    and ``rhs = det(sum_x phi_i(x) psi_j(x) w(x))``.
    """
    n = len(phi)
    if len(psi) != n:
        raise DomainError("phi and psi must have the same length")
    omega = list(weight)
    if len(omega) > 12 or n > 4:
        raise ResourceError("heine_check is limited to |Omega| <= 12 and n <= 4")
    if n == 0:
        return Fraction(1), Fraction(1)
    w = {x: Fraction(weight[x]) for x in omega}
    ph = {x: [Fraction(f(x)) for f in phi] for x in omega}
    ps = {x: [Fraction(f(x)) for f in psi] for x in omega}
    total = Fraction(0)
    # tuples with a repeated point have two equal columns: both dets vanish
    for xs in itertools.permutations(omega, n):
        A = [[ph[x][i] for x in xs] for i in range(n)]
        B = [[ps[x][i] for x in xs] for i in range(n)]
        da = bareiss_det(A)
        if da == 0:
            continue
        total += da * bareiss_det(B) * math.prod(w[x] for x in xs)
    lhs = total / math.factorial(n)
    G = [[sum(ph[x][i] * ps[x][j] * w[x] for x in omega) for j in range(n)] for i in range(n)]
    return lhs, bareiss_det(G)


def gessel_check(n, a, b):
    """``(D_n(prod (1 + a/z)(1 + b z)), sum_{lambda_1 <= n} s_lambda(a) s_lambda(b))``."""
    if len(a) > 3 or len(b) > 3 or n > 5:
        raise ResourceError("gessel_check is limited to lengths <= 3 and n <= 5")
    for v in list(a) + list(b):
        if not 0 <= Fraction(v) < 1:
            raise DomainError("Gessel parameters must lie in [0, 1)")
    return toeplitz_det(fourier_coeffs_exact(a, b), n), gessel_rhs(n, a, b)


def macmahon_symbol(a, b) -> FourierSymbol:
    """Integer symbol ``(1 - e^{-i theta})^a (1 - e^{i theta})^b``."""
    left = laurent_product(*([{0: 1, -1: -1}] * a))
    right = laurent_product(*([{0: 1, 1: -1}] * b))
    return FourierSymbol(laurent_product(left, right), exact=True, complete=True)


def macmahon_toeplitz_check(a, b, n):
    """``(D_n((1 - e^{-i theta})^a (1 - e^{i theta})^b), MacMahon(a, b, n))``.

    The determinant equals the box count of plane partitions with no sign
    factor: for ``a = 1, b = 0`` the matrix is unit triangular.
    """
    for v in (a, b, n):
        if int(v) != v or v < 0:
            raise DomainError("a, b, n must be non-negative integers")
    if a > 4 or b > 4 or n > 5:
        raise ResourceError("macmahon_toeplitz_check is limited to a, b <= 4 and n <= 5")
    return toeplitz_det(macmahon_symbol(a, b), n), Fraction(macmahon_product(a, b, n))


def cue_moment_exact(n, k) -> int:
    """``prod_{j<n} j! (j + 2k)! / ((j + k)!)^2`` = ``E|det(I - U)|^{2k}`` over U(n)."""
    if int(n) != n or int(k) != k or n < 0 or k < 0:
        raise DomainError("n and k must be non-negative integers")
    if n > 400 or k > 30:
        raise DomainError("cue_moment_exact is limited to n <= 400, k <= 30")
    f = math.factorial
    val = math.prod(Fraction(f(j) * f(j + 2 * k), f(j + k) ** 2) for j in range(n))
    assert val.denominator == 1
    return int(val)


def poissonized_toeplitz(alpha, n, tol=1e-12) -> float:
    """``e^{-alpha} D_n(e^{2 sqrt(alpha) cos theta})``.

    Raises AccuracyError when the aliasing estimate, relative to ``f_hat_0``,
    exceeds ``tol``.
    """
    if not 0 <= alpha <= 100:
        raise DomainError(f"alpha must lie in [0, 100], got {alpha!r}")
    if int(n) != n or not 0 <= n <= 40:
        raise DomainError(f"n must be an integer in [0, 40], got {n!r}")
    n = int(n)
    if n == 0:
        return math.exp(-alpha)
    z = 2.0 * math.sqrt(alpha)
    sym = fourier_coeffs_numeric(lambda t: math.exp(z * math.cos(t)), max(n - 1, 1))
    if sym.aliasing_error > tol * abs(sym[0]):
        raise AccuracyError("trapezoid coefficients not converged", achieved=sym.aliasing_error)
    # fold e^{-alpha} into the symbol to keep D_n in range
    c = math.exp(-alpha / n)
    T = np.array(toeplitz_matrix(FourierSymbol({k: v * c for k, v in sym.coeffs.items()}), n))
    det = float(np.linalg.det(T))
    # pivoted LU loses about cond * eps relative accuracy
    err = abs(det) * np.linalg.cond(T) * np.finfo(float).eps
    if err > 1e-9:
        raise AccuracyError(f"Toeplitz determinant ill-conditioned (error ~{err:.2g})", achieved=err)
    return det


# --- Haar unitary Monte Carlo --------------------------------------------


@dataclass(frozen=True)
class UnitarySample:
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        U = self.matrix
        n = U.shape[0]
        resid = np.max(np.abs(U.conj().T @ U - np.eye(n)))
        if resid > 1e-12:
            raise AccuracyError(f"unitarity residual {resid:.3g}", achieved=resid)

    @property
    def n(self):
        return self.matrix.shape[0]


def haar_unitary(n, rng) -> UnitarySample:
    """Haar unitary from a complex Gaussian matrix by QR with the phases of
    ``diag(R)`` moved into Q."""
    if int(n) != n or not 1 <= n <= 64:
        raise DomainError(f"n must be an integer in [1, 64], got {n!r}")
    g = rng.generator() if isinstance(rng, SeededStream) else rng
    Z = (g.standard_normal((n, n)) + 1j * g.standard_normal((n, n))) / math.sqrt(2.0)
    Q, R = np.linalg.qr(Z)
    d = np.diagonal(R)
    return UnitarySample(Q * (d / np.abs(d))[None, :])


def _mean_stderr(vals):
    vals = np.asarray(vals)
    mean = vals.mean()
    err = vals.std(ddof=1) / math.sqrt(vals.size) if vals.size > 1 else math.inf
    return mean, float(err)


def cue_moment_mc(n, k, theta, samples, seed, base=0):
    """Mean and standard error of ``|det(I - U e^{-i theta})|^{2k}`` over
    ``samples`` Haar draws; draw ``i`` uses stream ``base + i``."""
    if int(k) != k or not 0 <= k <= 4:
        raise DomainError(f"k must be an integer in [0, 4], got {k!r}")
    phase = complex(math.cos(theta), -math.sin(theta))
    vals = np.empty(samples)
    for i in range(samples):
        U = haar_unitary(n, SeededStream(seed, base + i)).matrix
        vals[i] = abs(np.linalg.det(np.eye(n) - U * phase)) ** (2 * k)
    mean, err = _mean_stderr(vals)
    return float(mean), err


def _trace_powers(U, kmax):
    tr = {0: complex(U.shape[0])}
    P = np.eye(U.shape[0], dtype=complex)
    for k in range(1, kmax + 1):
        P = P @ U
        t = np.trace(P)
        tr[k], tr[-k] = t, t.conjugate()
    return tr


def weyl_mc_check(g_coeffs, n, samples, seed, base=0):
    """Haar average of ``exp(tr g(U))`` against ``D_n(e^g)``.

    ``g_coeffs`` maps ``k`` (``|k| <= 3``) to the Laurent coefficient of
    ``g``.  Returns ``(mc_mean, mc_stderr, det_side)``.
    """
    if any(abs(k) > 3 for k in g_coeffs):
        raise DomainError("g must be a Laurent polynomial with |k| <= 3")
    if int(n) != n or not 1 <= n <= 16:
        raise DomainError(f"n must be an integer in [1, 16], got {n!r}")
    kmax = max((abs(k) for k in g_coeffs), default=0)
    vals = np.empty(samples, dtype=complex)
    for i in range(samples):
        U = haar_unitary(n, SeededStream(seed, base + i)).matrix
        tr = _trace_powers(U, kmax)
        vals[i] = np.exp(sum(c * tr[k] for k, c in g_coeffs.items()))

    def g(t):
        return sum(c * complex(math.cos(k * t), math.sin(k * t)) for k, c in g_coeffs.items())

    sym = fourier_coeffs_numeric(lambda t: np.exp(g(t)), max(n - 1, 1))
    det_side = toeplitz_det(sym, n)
    if abs(vals.imag).max() < 1e-12 * max(1.0, abs(vals.real).max()):
        vals = vals.real
    mean, err = _mean_stderr(vals)
    return mean.item(), err, det_side
