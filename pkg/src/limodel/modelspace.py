"""H_n, G_n, the zero sum M_n, and the basis functions F_gamma.

With P = xi/(xi+xi') and Q = xi'/(xi+xi') (so P + Q = 1),

    H_n(s) = P (s-1)^(n-1)/s^n
             + [1 - (1-1/s)^n] (Q - P (xi'/xi(0) + 1))
             - P sum_{d=1}^{n-1} D_d s^(-d)

where D_d = sum_j binom(n, j) (-1)^(j-1) c_{j-d} collects the double sum
over j and k with c_k = (-1)^k eta_k + (1 - 2^(-k-1)) zeta(k+1).  P and Q
come from the projective xi pair, so they are finite at zeros of xi (P
vanishes there) and at s = 1.  Only s = 0 needs special handling: inside
|s| < 0.5 the value is taken as the mean over a circle of radius 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from . import special
from .errors import DomainError, PoleError
from .quad import QuadConfig, QuadResult, inner_product_line
from .special import DEFAULT_OPTS, EvalOptions
from .stieltjes import EtaTable, eta_from_powerseries
from .zeros import ZeroTable

ORIGIN_WINDOW = 0.5
ORIGIN_RADIUS = 2.0
ORIGIN_POINTS = 64
BASIS_WINDOW = 1e-4
BASIS_RADIUS = 1e-3


@dataclass(frozen=True)
class HnContext:
    n: int
    eta: EtaTable
    xi_ld_at_0: float
    zeta_values: tuple[float, ...]      # zeta(2)..zeta(n)
    inner_coeffs: tuple[float, ...]     # D_1..D_{n-1}
    opts: EvalOptions = DEFAULT_OPTS

    def __post_init__(self):
        if self.eta.max_k < self.n - 1:
            raise DomainError(f"eta table has max_k={self.eta.max_k}, need >= n-1 = {self.n - 1}")
        vals = (self.xi_ld_at_0, *self.zeta_values, *self.inner_coeffs)
        if not all(math.isfinite(v) for v in vals):
            raise DomainError("HnContext holds non-finite cached values")


def make_context(n: int, eta: EtaTable | None = None,
                 opts: EvalOptions = DEFAULT_OPTS) -> HnContext:
    if n < 1:
        raise DomainError("n must be a positive integer")
    if eta is None:
        eta = eta_from_powerseries(max(n - 1, 0))
    if eta.max_k < n - 1:
        raise DomainError(f"H_{n} needs eta_0..eta_{n - 1}; table stops at {eta.max_k}")
    zvals = tuple(complex(special.zeta(float(j), opts)).real for j in range(2, n + 1))
    c = [0.0] + [(-1) ** k * eta.eta[k] + (1 - 2.0 ** (-k - 1)) * zvals[k - 1]
                 for k in range(1, n)]
    D = []
    for d in range(1, n):
        D.append(math.fsum(math.comb(n, j) * (-1) ** (j - 1) * c[j - d] for j in range(d + 1, n + 1)))
    xi0 = complex(special.xi_logderiv(0.0, opts)).real
    return HnContext(n, eta, xi0, zvals, tuple(D), opts)


def _projective_PQ(s: np.ndarray, opts: EvalOptions):
    a, b, _ = special._xi_pair(s, opts)
    den = a + b
    scale = np.abs(a) + np.abs(b)
    bad = (np.abs(den) <= 1e-10 * scale) & (np.abs(a) > 1e-6 * scale)
    if np.any(bad):
        raise PoleError(f"H_n: zero of xi+xi' that is not a zero of xi near s = {s[bad][0]}")
    return a / den, b / den


def xi_ratio(s, opts: EvalOptions = DEFAULT_OPTS):
    """P(s) = xi/(xi+xi') = (1 + Theta)/2 at s, finite at zeros of xi."""
    v, shape, scalar = special._prep(s)
    return special._out(_projective_PQ(v, opts)[0], shape, scalar)


def _H_direct(ctx: HnContext, s: np.ndarray) -> np.ndarray:
    n = ctx.n
    P, Q = _projective_PQ(s, ctx.opts)
    u = 1.0 / s
    c1 = 1.0 - (1.0 - u) ** n
    poly = np.zeros_like(s)
    for D in reversed(ctx.inner_coeffs):
        poly = (poly + D) * u
    return P * (s - 1.0) ** (n - 1) * u ** n + c1 * (Q - P * (ctx.xi_ld_at_0 + 1.0)) - P * poly


def circle_mean(f, center, radius: float, points: int) -> np.ndarray:
    """Mean of f over a circle: the value at the center for f analytic inside."""
    center = np.atleast_1d(np.asarray(center, dtype=complex))
    ang = np.exp(2j * np.pi * np.arange(points) / points)
    pts = center[:, None] + radius * ang[None, :]
    vals = np.asarray(f(pts.ravel())).reshape(pts.shape)
    return vals.mean(axis=1)


def H_n(ctx: HnContext, s):
    v, shape, scalar = special._prep(s)
    out = np.empty_like(v)
    near0 = np.abs(v) < ORIGIN_WINDOW
    if np.any(~near0):
        out[~near0] = _H_direct(ctx, v[~near0])
    if np.any(near0):
        out[near0] = circle_mean(lambda p: _H_direct(ctx, p), v[near0], ORIGIN_RADIUS, ORIGIN_POINTS)
    return special._out(out, shape, scalar)


def G_n(ctx: HnContext, z):
    """G_n(z) = H_n(1/2 - iz)."""
    v, shape, scalar = special._prep(z)
    return special._out(np.atleast_1d(H_n(ctx, 0.5 - 1j * v)), shape, scalar)


def H1_closed_form(s, opts: EvalOptions = DEFAULT_OPTS):
    """-(1/s) (xi'/xi(0) - xi'/xi(s)) / (1 + xi'/xi(s))."""
    x0 = complex(special.xi_logderiv(0.0, opts)).real
    X = special.xi_logderiv(s, opts)
    return -(x0 - X) / (s * (1.0 + X))


def removable_limit(f, s0, radius: float = 1e-3, points: int = 4):
    """Value at s0 reconstructed from a small circle around it."""
    return complex(circle_mean(f, s0, radius, points)[0])


# ---------------------------------------------------------------------------
# Zero sums
# ---------------------------------------------------------------------------

def zero_weight(n: int, rho):
    """1 - (1 - 1/rho)^n, the Mellin transform of g_n at rho."""
    rho = np.asarray(rho, dtype=complex)
    return 1.0 - (1.0 - 1.0 / rho) ** n


def mellin_g_n(n: int, s):
    """Mellin transform of g_n as the finite sum over binomials."""
    s = np.asarray(s, dtype=complex)
    return sum(math.comb(n, j) * (-1) ** (j - 1) / s ** j for j in range(1, n + 1))


def g_n(n: int, x):
    """The test function g_n on (0, inf): a polynomial in log x on (0,1), n/2 at 1, 0 above."""
    x = np.asarray(x, dtype=float)
    lx = np.log(np.where(x > 0, x, 1.0))
    below = sum(math.comb(n, j) * lx ** (j - 1) / math.factorial(j - 1) for j in range(1, n + 1))
    return np.where(x < 1, below, np.where(x == 1, n / 2, 0.0))


def zero_density(t):
    """d/dt of the Riemann-von Mangoldt main term: log(t/2pi)/(2pi)."""
    return np.log(np.asarray(t) / (2 * math.pi)) / (2 * math.pi)


def M_n_truncated(n: int, zeros: ZeroTable, s) -> tuple[complex, float]:
    """-i sum over table zeros (both 1/2 -+ i gamma) of m [1-(1-1/rho)^n]/(s-rho).

    The tail budget is twice the density integral of the per-pair bound
    |w(t)| (1/|s-rho(t)| + 1/|s-conj rho(t)|) beyond the table height; it is
    infinite when s comes within distance 1 of the tail region.
    """
    if n < 1:
        raise DomainError("n must be a positive integer")
    s = complex(s)
    g = zeros.ordinates
    m = zeros.multiplicities
    rho = 0.5 - 1j * g
    rho_bar = 0.5 + 1j * g
    dmin = min(np.min(np.abs(s - rho), initial=np.inf), np.min(np.abs(s - rho_bar), initial=np.inf))
    if dmin < 1e-6:
        raise PoleError(f"M_n evaluated within {dmin:.1e} of a zero")
    terms = m * (zero_weight(n, rho) / (s - rho) + zero_weight(n, rho_bar) / (s - rho_bar))
    value = -1j * complex(math.fsum(terms.real), math.fsum(terms.imag))

    T = zeros.height_bound
    if abs(s.imag) > T - 1 and abs(s.real - 0.5) < 1:
        return value, math.inf

    def pair_bound(t):
        w = abs(complex(zero_weight(n, 0.5 - 1j * t)))
        return float(zero_density(t)) * w * (1 / abs(s - (0.5 - 1j * t)) + 1 / abs(s - (0.5 + 1j * t)))

    tail, _ = integrate.quad(pair_bound, T, np.inf, limit=200)
    return value, 2.0 * tail


# ---------------------------------------------------------------------------
# Basis functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BasisFunction:
    gamma: float
    multiplicity: int = 1

    def __post_init__(self):
        if self.multiplicity < 1:
            raise DomainError("multiplicity must be positive")

    @classmethod
    def from_table(cls, table: ZeroTable, index: int, mirror: bool = False) -> "BasisFunction":
        """Basis function for the index-th stored ordinate (0-based); mirror gives -gamma."""
        g = float(table.ordinates[index])
        return cls(-g if mirror else g, int(table.multiplicities[index]))


def _F_direct(b: BasisFunction, z: np.ndarray, opts: EvalOptions) -> np.ndarray:
    P, _ = _projective_PQ(0.5 - 1j * z, opts)
    return math.sqrt(b.multiplicity / math.pi) * 1j * P / (z - b.gamma)


def F_gamma(b: BasisFunction, z, opts: EvalOptions = DEFAULT_OPTS):
    """F_gamma(z) = sqrt(m/pi) i (1 + Theta(z)) / (2 (z - gamma)).

    Uses (1 + Theta)/2 = xi/(xi+xi').  At z = gamma the value is the limit
    1/sqrt(pi m) from Theta'(gamma)/2 = -i/m; within 1e-4 of gamma the
    value is the 4-point mean over a circle of radius 1e-3.
    """
    v, shape, scalar = special._prep(z)
    out = np.empty_like(v)
    d = np.abs(v - b.gamma)
    exact = d < 1e-12 * max(1.0, abs(b.gamma))
    near = (d < BASIS_WINDOW) & ~exact
    far = ~(exact | near)
    out[exact] = 1.0 / math.sqrt(math.pi * b.multiplicity)
    if np.any(near):
        out[near] = circle_mean(lambda p: _F_direct(b, p, opts), v[near], BASIS_RADIUS, 4)
    if np.any(far):
        out[far] = _F_direct(b, v[far], opts)
    return special._out(out, shape, scalar)


def expected_coefficient(n: int, b: BasisFunction) -> complex:
    """sqrt(pi m) [1 - (1 - 1/(1/2 - i gamma))^n]."""
    return math.sqrt(math.pi * b.multiplicity) * complex(zero_weight(n, 0.5 - 1j * b.gamma))


def expansion_coefficient(ctx: HnContext, b: BasisFunction,
                          quad_cfg: QuadConfig | None = None) -> QuadResult:
    """<G_n, F_gamma> in L^2(R), by quadrature."""
    cfg = quad_cfg or QuadConfig(span=500.0, tail_model="none")
    return inner_product_line(lambda x: G_n(ctx, x), lambda x: F_gamma(b, x, ctx.opts), cfg)
