"""Stieltjes constants and the Laurent coefficients eta_k of -zeta'/zeta(s+1).

    -zeta'/zeta(s+1) = 1/s + sum_k eta_k s^k

The production route goes through the Stieltjes constants and formal power
series.  ``eta_from_vonmangoldt`` is an independent, slow check built on
prime sums.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError
from .special import bernoulli_numbers

MAX_K = 20
_EM_CUTOFF = 6
_EM_ORDER = 20
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class EtaTable:
    max_k: int
    eta: tuple[float, ...]
    gamma_stieltjes: tuple[float, ...]
    err_est: tuple[float, ...]

    def __post_init__(self):
        if not (len(self.eta) == len(self.gamma_stieltjes) == len(self.err_est) == self.max_k + 1):
            raise DomainError("EtaTable lengths must equal max_k + 1")


@lru_cache(maxsize=None)
def _derivative_polys(k: int, order: int) -> tuple[tuple[int, ...], ...]:
    """Integer coefficients of P_r with d^r/dx^r [(log x)^k / x] = x^(-1-r) P_r(log x)."""
    P = [0] * k + [1]
    polys = [tuple(P)]
    for r in range(order):
        dP = [i * P[i] for i in range(1, len(P))] + [0]
        P = [-(1 + r) * P[i] + dP[i] for i in range(len(P))]
        polys.append(tuple(P))
    return tuple(polys)


def _stieltjes_one(k: int) -> tuple[float, float]:
    N = _EM_CUTOFF
    L = math.log(N)
    terms = [math.log(m) ** k / m for m in range(2, N + 1)]
    if k == 0:
        terms.append(1.0)
    terms.append(-L ** (k + 1) / (k + 1))
    terms.append(-0.5 * L ** k / N)
    B = bernoulli_numbers(2 * _EM_ORDER)
    polys = _derivative_polys(k, 2 * _EM_ORDER)
    last = 0.0
    for j in range(1, _EM_ORDER + 1):
        P = polys[2 * j - 1]
        deriv = math.fsum(c * L ** i for i, c in enumerate(P)) * float(N) ** (-2 * j)
        last = -float(B[2 * j] / math.factorial(2 * j)) * deriv
        terms.append(last)
    value = math.fsum(terms)
    err = abs(last) + 8 * _EPS * math.fsum(abs(t) for t in terms)
    return value, err


def stieltjes_constants(max_k: int) -> list[float]:
    """gamma_0..gamma_max_k, the Taylor data of zeta(1+s) - 1/s.

    Euler-Maclaurin applied to sum (log m)^k/m - (log N)^(k+1)/(k+1) at a
    small cutoff; the cutoff is kept low because the cancellation against
    (log N)^(k+1) costs digits for large k.
    """
    return [v for v, _ in _stieltjes_with_err(max_k)]


def _stieltjes_with_err(max_k: int) -> list[tuple[float, float]]:
    if not 0 <= max_k <= MAX_K:
        raise DomainError(f"max_k must be in [0, {MAX_K}]")
    return [_stieltjes_one(k) for k in range(max_k + 1)]


def _series_logderiv_eta(gammas: list[float], max_k: int) -> list[float]:
    # F(s) = s*zeta(1+s) = 1 + sum_k (-1)^k gamma_k s^(k+1)/k!
    F = [1.0] + [(-1) ** k * gammas[k] / math.factorial(k) for k in range(max_k + 1)]
    dF = [(i + 1) * F[i + 1] for i in range(max_k + 1)]
    # Q = dF / F, triangular division
    Q = []
    for i in range(max_k + 1):
        acc = [dF[i]] + [-F[j] * Q[i - j] for j in range(1, i + 1)]
        Q.append(math.fsum(acc) / F[0])
    # -zeta'/zeta(1+s) = 1/s - F'/F
    return [-q for q in Q]


def eta_from_powerseries(max_k: int) -> EtaTable:
    """eta_0..eta_max_k from the logarithmic derivative of s*zeta(1+s).

    Only the first max_k + 2 coefficients of s*zeta(1+s) influence
    eta_0..eta_max_k, so the series is carried to exactly that length.
    """
    pairs = _stieltjes_with_err(max_k)
    gam = [v for v, _ in pairs]
    gerr = [e for _, e in pairs]
    eta = _series_logderiv_eta(gam, max_k)
    up = _series_logderiv_eta([g + e for g, e in zip(gam, gerr)], max_k)
    down = _series_logderiv_eta([g - e for g, e in zip(gam, gerr)], max_k)
    err = [max(abs(u - v), abs(d - v)) + 4 * _EPS * (1 + abs(v))
           for u, d, v in zip(up, down, eta)]
    return EtaTable(max_k, tuple(eta), tuple(gam), tuple(err))


# ---------------------------------------------------------------------------
# Prime sums
# ---------------------------------------------------------------------------

def von_mangoldt(M: int) -> np.ndarray:
    """Array lam with lam[m] = Lambda(m) for 0 <= m <= M (lam[0] = lam[1] = 0)."""
    M = int(M)
    lam = np.zeros(M + 1)
    if M < 2:
        return lam
    sieve = np.ones(M + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(M) + 1):
        if sieve[p]:
            sieve[p * p::p] = False
    primes = np.flatnonzero(sieve)
    lam[primes] = np.log(primes)
    for p in primes[primes <= math.isqrt(M)]:
        q = int(p) * int(p)
        lp = math.log(p)
        while q <= M:
            lam[q] = lp
            q *= int(p)
    return lam


def chebyshev_psi(x: float) -> float:
    return math.fsum(von_mangoldt(int(x)))


def _hann_log_mean(values: np.ndarray, lo: int, hi: int) -> float:
    xs = np.arange(lo, hi + 1, dtype=float)
    u = (np.log(xs) - math.log(lo)) / (math.log(hi) - math.log(lo))
    w = np.sin(math.pi * u) ** 2 / xs
    return float(np.dot(w, values[lo:hi + 1]) / w.sum())


def eta_from_vonmangoldt(k: int, cutoff: float = 1e6) -> tuple[float, float]:
    """Slow prime-sum estimate of eta_k. Returns (value, residual).

    The truncated bracket
        sum_{m<=x} Lambda(m)(log m)^k/m - (log x)^(k+1)/(k+1)
    gets its endpoint error (psi(x) - x + log 2pi)(log x)^k/x removed by Abel
    summation; what remains oscillates with the zeta zeros and is damped by a
    Hann-weighted mean over log x on [cutoff/16, cutoff].  The residual is the
    change against the window [cutoff/256, cutoff/16].
    """
    if not 0 <= k <= 6:
        raise DomainError("eta_from_vonmangoldt supports 0 <= k <= 6")
    X = int(cutoff)
    if X > 10 ** 7:
        raise DomainError("cutoff must be <= 1e7")
    if X < 4096:
        raise DomainError("cutoff too small for the two smoothing windows (need >= 4096)")
    lam = von_mangoldt(X)
    x = np.arange(X + 1, dtype=float)
    x[0] = 1.0
    lx = np.log(x)
    g = lx ** k / x
    S = np.cumsum(lam * g)
    psi_err = np.cumsum(lam) - x + math.log(2 * math.pi)
    bracket = S - lx ** (k + 1) / (k + 1) - psi_err * g
    sign = (-1) ** k / math.factorial(k)
    a = sign * _hann_log_mean(bracket, X // 16, X)
    b = sign * _hann_log_mean(bracket, X // 256, X // 16)
    resid = abs(a - b)
    if resid > 1e-2:
        raise DomainError(f"cutoff too small: extrapolation residual {resid:.2e} > 1e-2")
    return a, resid
