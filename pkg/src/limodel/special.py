"""Complex special functions: log-gamma, digamma, zeta and the xi family.

All public functions accept a Python scalar or a numpy array and return the
same shape (a ``complex`` for scalar input).  Zeta is continued by
Euler-Maclaurin summation for ``Re(s) >= -1/2`` and by the functional equation
for ``Re(s) < -1/2``.

The xi-derived quantities are built from a *projective pair* ``(a, b)``
proportional to ``(xi(s), xi'(s))`` with the common factor
``s/2 * pi^(-s/2) * Gamma(s/2)`` divided out.  Ratios such as
``xi/(xi+xi')`` or ``(xi-xi')/(xi+xi')`` never see the exponential decay of
Gamma, and the pair stays finite at zeros of zeta and at ``s = 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import AccuracyError, DomainError, NearZeroError, PoleError

EULER_GAMMA = 0.57721566490153286061
LOG_PI = math.log(math.pi)
LOG_2PI = math.log(2.0 * math.pi)

_POLE_EPS = 1e-14
_CHUNK_ELEMS = 1 << 21
_EM_MAX_ORDER = 25
_TWO_PI_LD = np.longdouble("6.28318530717958647692528676655900577")


@dataclass(frozen=True)
class EvalOptions:
    target_abs_err: float = 1e-12
    max_terms: int = 10_000
    height_bound: float = 1e4

    def __post_init__(self):
        if not self.target_abs_err > 0:
            raise DomainError("target_abs_err must be positive")
        if self.max_terms < 16:
            raise DomainError("max_terms must be >= 16")


DEFAULT_OPTS = EvalOptions()


@lru_cache(maxsize=None)
def bernoulli_numbers(n_max: int) -> tuple[Fraction, ...]:
    """Exact B_0..B_n_max (convention B_1 = -1/2)."""
    B = [Fraction(0)] * (n_max + 1)
    B[0] = Fraction(1)
    for m in range(1, n_max + 1):
        acc = Fraction(0)
        for k in range(m):
            acc += math.comb(m + 1, k) * B[k]
        B[m] = -acc / (m + 1)
    return tuple(B)


@lru_cache(maxsize=None)
def _em_coefficients(order: int) -> np.ndarray:
    """B_{2k}/(2k)! for k = 1..order."""
    B = bernoulli_numbers(2 * order)
    return np.array([float(B[2 * k] / math.factorial(2 * k)) for k in range(1, order + 1)])


def _prep(x):
    arr = np.asarray(x, dtype=complex)
    return np.atleast_1d(arr).ravel().copy(), arr.shape, arr.ndim == 0


def _out(v, shape, scalar):
    if scalar:
        return complex(v[0])
    return v.reshape(shape)


def _check_not_pole(s: np.ndarray, what: str):
    near = (np.abs(s.imag) < _POLE_EPS) & (s.real < _POLE_EPS)
    if np.any(near):
        k = np.round(s.real[near])
        bad = np.abs(s[near] - k) < _POLE_EPS
        if np.any(bad):
            raise PoleError(f"{what}: pole at non-positive integer s = {s[near][bad][0]}")


# ---------------------------------------------------------------------------
# Gamma family
# ---------------------------------------------------------------------------

def _shift_count(s: np.ndarray, threshold: float = 10.0) -> np.ndarray:
    return np.maximum(0, np.ceil(threshold - s.real)).astype(int)


def _log_gamma(s: np.ndarray) -> np.ndarray:
    m = _shift_count(s)
    z = s + m
    acc = np.zeros_like(s)
    for j in range(int(m.max(initial=0))):
        mask = j < m
        acc[mask] += np.log(s[mask] + j)
    B = bernoulli_numbers(24)
    zinv = 1.0 / z
    z2 = zinv * zinv
    series = np.zeros_like(s)
    term = zinv
    for k in range(1, 13):
        series += float(B[2 * k] / (2 * k * (2 * k - 1))) * term
        term = term * z2
    return (z - 0.5) * np.log(z) - z + 0.5 * LOG_2PI + series - acc


def _digamma(w: np.ndarray) -> np.ndarray:
    m = _shift_count(w)
    z = w + m
    acc = np.zeros_like(w)
    for j in range(int(m.max(initial=0))):
        mask = j < m
        acc[mask] += 1.0 / (w[mask] + j)
    B = bernoulli_numbers(24)
    zinv = 1.0 / z
    z2 = zinv * zinv
    series = np.zeros_like(w)
    term = z2
    for k in range(1, 13):
        series += float(B[2 * k] / (2 * k)) * term
        term = term * z2
    return np.log(z) - 0.5 * zinv - series - acc


def log_gamma(s):
    """Principal branch of log Gamma(s).

    Stirling series after an upward shift to ``Re >= 10``; the shift adds
    principal logs of ``s + j``, which reproduces the principal branch with
    its cut on the negative real axis.
    """
    v, shape, scalar = _prep(s)
    _check_not_pole(v, "log_gamma")
    return _out(_log_gamma(v), shape, scalar)


def digamma(w):
    """psi(w) = Gamma'/Gamma(w), by recurrence shift plus asymptotic expansion."""
    v, shape, scalar = _prep(w)
    _check_not_pole(v, "digamma")
    return _out(_digamma(v), shape, scalar)


# ---------------------------------------------------------------------------
# Zeta by Euler-Maclaurin
# ---------------------------------------------------------------------------

def _em_cutoff(s: np.ndarray) -> np.ndarray:
    n = np.maximum(20.0, np.maximum(np.ceil(0.7 * np.abs(s.imag)), np.ceil(0.3 * np.abs(s))))
    return (16 * np.ceil(n / 16)).astype(int)


def _neg_power(s: np.ndarray, logm: np.ndarray) -> np.ndarray:
    """exp(-outer(s, logm)) with the phase reduced in extended precision.

    At height t the phase t*log(m) runs to thousands of radians; forming it in
    double precision would cost ~1e-13 of absolute accuracy per term.
    """
    lm = np.asarray(logm, dtype=np.longdouble)
    phase = np.fmod(np.multiply.outer(s.imag.astype(np.longdouble), lm), _TWO_PI_LD)
    mag = np.exp(-np.multiply.outer(s.real, lm.astype(float)))
    return mag * np.exp(-1j * phase.astype(float))


def _em_group(s: np.ndarray, N: int, tol: float):
    """Regular parts R, R' of zeta at cutoff N; zeta = R + N^(1-s)/(s-1).

    Returns (R, dR, converged) where converged is a boolean array.
    """
    logm = np.log(np.arange(1, N, dtype=np.longdouble))
    R = np.empty_like(s)
    dR = np.empty_like(s)
    rows = max(1, _CHUNK_ELEMS // max(N, 1))
    for lo in range(0, len(s), rows):
        sl = s[lo:lo + rows]
        E = _neg_power(sl, logm)
        R[lo:lo + rows] = E.sum(axis=1)
        dR[lo:lo + rows] = -(E @ logm.astype(float))
    logN = math.log(N)
    Ns = _neg_power(s, np.log(np.longdouble([N])))[:, 0]
    R += 0.5 * Ns
    dR -= 0.5 * logN * Ns

    coef = _em_coefficients(_EM_MAX_ORDER)
    p = s.copy()                        # rising factorial s(s+1)...(s+2k-2)
    dp = np.ones_like(s)
    power = Ns / N                      # N^(-s-2k+1) at k = 1
    converged = np.zeros(len(s), dtype=bool)
    prev = np.full(len(s), np.inf)
    for k in range(1, _EM_MAX_ORDER + 1):
        c = coef[k - 1]
        t = c * p * power
        dt = c * (dp - logN * p) * power
        live = ~converged
        R[live] += t[live]
        dR[live] += dt[live]
        size = np.maximum(np.abs(t), np.abs(dt))
        converged |= size < tol
        # divergence of the asymptotic tail: give up on these points
        diverging = live & (size > prev) & (k > 3)
        if np.all(converged | diverging):
            break
        prev = size
        a = s + (2 * k - 1)
        b = s + 2 * k
        dp = dp * a * b + p * (a + b)
        p = p * a * b
        power = power / (N * N)
    return R, dR, converged


def _em_parts(s: np.ndarray, opts: EvalOptions):
    """Return (R, dR, N) with zeta(s) = R + N^(1-s)/(s-1) for each point."""
    if np.any(np.abs(s.imag) > opts.height_bound):
        raise DomainError(f"|Im s| exceeds height bound {opts.height_bound:g}")
    Ncut = _em_cutoff(s)
    R = np.empty_like(s)
    dR = np.empty_like(s)
    tol = 0.1 * opts.target_abs_err
    todo = np.arange(len(s))
    while len(todo):
        Nt = Ncut[todo]
        if np.any(Nt > opts.max_terms):
            raise AccuracyError(
                f"Euler-Maclaurin needs more than max_terms={opts.max_terms} terms")
        retry = []
        for N in np.unique(Nt):
            idx = todo[Nt == N]
            r, dr, ok = _em_group(s[idx], int(N), tol)
            R[idx] = r
            dR[idx] = dr
            retry.append(idx[~ok])
        todo = np.concatenate(retry) if retry else np.array([], dtype=int)
        Ncut[todo] *= 2
    return R, dR, Ncut


def _pole_power(s: np.ndarray, N: np.ndarray) -> np.ndarray:
    """N^(-s) elementwise, phase reduced in extended precision."""
    lN = np.log(np.asarray(N, dtype=np.longdouble))
    phase = np.fmod(s.imag.astype(np.longdouble) * lN, _TWO_PI_LD)
    return np.exp(-s.real * lN.astype(float)) * np.exp(-1j * phase.astype(float))


def _zeta_direct(s: np.ndarray, opts: EvalOptions):
    R, dR, N = _em_parts(s, opts)
    logN = np.log(N)
    pole = N * _pole_power(s, N)
    inv = 1.0 / (s - 1.0)
    z = R + pole * inv
    dz = dR - pole * (logN * inv + inv * inv)
    return z, dz


def _g_direct(s: np.ndarray, opts: EvalOptions):
    """g(s) = (s-1) zeta(s) and g'(s), free of the pole at s = 1."""
    R, dR, N = _em_parts(s, opts)
    logN = np.log(N)
    pole = N * _pole_power(s, N)
    g = (s - 1.0) * R + pole
    dg = R + (s - 1.0) * dR - logN * pole
    return g, dg


def _log_sin(z: np.ndarray) -> np.ndarray:
    """A logarithm of sin(z) that does not overflow for large |Im z|."""
    out = np.empty_like(z)
    up = z.imag >= 0
    with np.errstate(divide="ignore"):
        zu = z[up]
        out[up] = -1j * zu - math.log(2) - 0.5j * math.pi + np.log(np.expm1(2j * zu))
        zd = z[~up]
        out[~up] = 1j * zd - math.log(2) - 0.5j * math.pi + np.log(-np.expm1(-2j * zd))
    return out


def _log_cos(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    up = z.imag >= 0
    with np.errstate(divide="ignore"):
        zu = z[up]
        out[up] = -1j * zu - math.log(2) + np.log1p(np.exp(2j * zu))
        zd = z[~up]
        out[~up] = 1j * zd - math.log(2) + np.log1p(np.exp(-2j * zd))
    return out


def _zeta_reflected(s: np.ndarray, opts: EvalOptions):
    """zeta, zeta' for Re(s) < -1/2 via zeta(s) = chi(s) zeta(1-s)."""
    w = 1.0 - s
    zw, dzw = _zeta_direct(w, opts)
    la = s * math.log(2) + (s - 1.0) * LOG_PI + _log_gamma(w)
    with np.errstate(under="ignore"):
        chi = np.exp(la + _log_sin(0.5 * math.pi * s))
        cos_part = 0.5 * math.pi * np.exp(la + _log_cos(0.5 * math.pi * s))
    dchi = chi * (LOG_2PI - _digamma(w)) + cos_part
    return chi * zw, dchi * zw - chi * dzw


def _zeta_pair(s: np.ndarray, opts: EvalOptions):
    z = np.empty_like(s)
    dz = np.empty_like(s)
    # reflecting near s = 0 would evaluate zeta(1-s) on top of its pole
    neg = s.real < -0.5
    if np.any(~neg):
        z[~neg], dz[~neg] = _zeta_direct(s[~neg], opts)
    if np.any(neg):
        z[neg], dz[neg] = _zeta_reflected(s[neg], opts)
    return z, dz


def _check_zeta_pole(s: np.ndarray):
    if np.any(np.abs(s - 1.0) < _POLE_EPS):
        raise PoleError("zeta has a pole at s = 1")


def zeta(s, opts: EvalOptions = DEFAULT_OPTS):
    """Riemann zeta(s) for s != 1."""
    v, shape, scalar = _prep(s)
    _check_zeta_pole(v)
    z, _ = _zeta_pair(v, opts)
    return _out(z, shape, scalar)


def zeta_and_derivative(s, opts: EvalOptions = DEFAULT_OPTS):
    """(zeta(s), zeta'(s)) with zeta' from the termwise-differentiated sum."""
    v, shape, scalar = _prep(s)
    _check_zeta_pole(v)
    z, dz = _zeta_pair(v, opts)
    return _out(z, shape, scalar), _out(dz, shape, scalar)


def zeta_logderiv(s, opts: EvalOptions = DEFAULT_OPTS):
    """zeta'(s)/zeta(s). Raises NearZeroError within ~1e-10 of a zero."""
    v, shape, scalar = _prep(s)
    _check_zeta_pole(v)
    z, dz = _zeta_pair(v, opts)
    if np.any(np.abs(z) < 1e-10 * np.abs(dz)):
        raise NearZeroError("zeta_logderiv evaluated within 1e-10 of a zero of zeta")
    return _out(dz / z, shape, scalar)


def zeta_minus_one(j: int, opts: EvalOptions = DEFAULT_OPTS) -> float:
    """zeta(j) - 1 for real j >= 2 with full relative accuracy."""
    if j < 2:
        raise DomainError("zeta_minus_one needs j >= 2")
    if j > 60:
        return math.fsum(m ** (-float(j)) for m in (2, 3, 4, 5))
    z = complex(zeta(float(j), opts)).real
    if j <= 12:
        return z - 1.0
    # direct sum with an Euler-Maclaurin tail, no cancellation against 1
    M = 16
    head = math.fsum(m ** (-float(j)) for m in range(2, M))
    tail = M ** (1.0 - j) / (j - 1.0) + 0.5 * M ** (-float(j)) + j / 12.0 * M ** (-j - 1.0)
    return head + tail


# ---------------------------------------------------------------------------
# xi and friends
# ---------------------------------------------------------------------------

def _archimedean(s: np.ndarray) -> np.ndarray:
    """1/s - log(pi)/2 + psi(s/2)/2: the gamma-factor part of xi'/xi minus 1/(s-1)."""
    return 1.0 / s - 0.5 * LOG_PI + 0.5 * _digamma(0.5 * s)


def xi_pair(s, opts: EvalOptions = DEFAULT_OPTS):
    """Projective pair (a, b) with (xi(s), xi'(s)) = c * (a, b).

    For Re(s) >= 1/2, ``c = s/2 pi^(-s/2) Gamma(s/2)`` and ``a = (s-1) zeta(s)``.
    Otherwise the pair comes from ``w = 1-s`` using xi(s) = xi(w) and
    xi'(s) = -xi'(w).  Returns (a, b, w_used) where w_used is the point
    whose gamma factor is c.
    """
    v, shape, scalar = _prep(s)
    a, b, w = _xi_pair(v, opts)
    return _out(a, shape, scalar), _out(b, shape, scalar), _out(w, shape, scalar)


def _xi_pair(s: np.ndarray, opts: EvalOptions):
    refl = s.real < 0.5
    w = np.where(refl, 1.0 - s, s)
    g, dg = _g_direct(w, opts)
    b = g * _archimedean(w) + dg
    b = np.where(refl, -b, b)
    return g, b, w


def _log_prefactor(w: np.ndarray) -> np.ndarray:
    return np.log(0.5 * w) - 0.5 * w * LOG_PI + _log_gamma(0.5 * w)


def xi(s, opts: EvalOptions = DEFAULT_OPTS):
    """Riemann xi(s) = s(s-1)/2 pi^(-s/2) Gamma(s/2) zeta(s)."""
    v, shape, scalar = _prep(s)
    a, _, w = _xi_pair(v, opts)
    with np.errstate(under="ignore"):
        val = np.exp(_log_prefactor(w)) * a
    return _out(val, shape, scalar)


def xi_and_derivative(s, opts: EvalOptions = DEFAULT_OPTS):
    v, shape, scalar = _prep(s)
    a, b, w = _xi_pair(v, opts)
    with np.errstate(under="ignore"):
        c = np.exp(_log_prefactor(w))
    return _out(c * a, shape, scalar), _out(c * b, shape, scalar)


def xi_logderiv(s, opts: EvalOptions = DEFAULT_OPTS):
    """xi'(s)/xi(s); finite limits at s = 0 and s = 1 come out of the pair form."""
    v, shape, scalar = _prep(s)
    a, b, _ = _xi_pair(v, opts)
    if np.any(np.abs(a) < 1e-10 * np.abs(b)):
        raise NearZeroError("xi_logderiv evaluated within 1e-10 of a zero of xi")
    return _out(b / a, shape, scalar)


def E_fn(z, opts: EvalOptions = DEFAULT_OPTS):
    """E(z) = xi(1/2 - iz) + xi'(1/2 - iz)."""
    v, shape, scalar = _prep(z)
    a, b, w = _xi_pair(0.5 - 1j * v, opts)
    with np.errstate(under="ignore"):
        c = np.exp(_log_prefactor(w))
    return _out(c * (a + b), shape, scalar)


def A_fn(z, opts: EvalOptions = DEFAULT_OPTS):
    """A(z) = (E(z) + conj(E(conj z)))/2 = xi(1/2 - iz)."""
    v, shape, scalar = _prep(z)
    return _out(np.atleast_1d(xi(0.5 - 1j * v, opts)), shape, scalar)


def Theta_fn(z, opts: EvalOptions = DEFAULT_OPTS):
    """Theta(z) = conj(E(conj z))/E(z) = (xi - xi')/(xi + xi') at s = 1/2 - iz."""
    v, shape, scalar = _prep(z)
    a, b, _ = _xi_pair(0.5 - 1j * v, opts)
    den = a + b
    if np.any(np.abs(den) < 1e-300) or np.any(np.abs(den) < 1e-10 * (np.abs(a) + np.abs(b))):
        raise PoleError("Theta evaluated at a zero of E")
    return _out((a - b) / den, shape, scalar)
