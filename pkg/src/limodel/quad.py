"""Adaptive Gauss-Kronrod quadrature on the real line with a log^2 t / t^2 tail model.

Panels are processed in vectorized batches: every still-active panel is
evaluated with the 7-point Gauss / 15-point Kronrod pair in one call to the
integrand, rejected panels are bisected, and the loop repeats.  Accepted
panels are summed in left-to-right order, so results are deterministic.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from .errors import BudgetExceededError, DomainError, FitFailureError

# Kronrod abscissae, positive half, descending; odd indices are the Gauss nodes
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])          # 15 nodes, ascending
W_KRONROD = np.concatenate([_WGK[:-1], _WGK[::-1]])
W_GAUSS = np.zeros(15)
W_GAUSS[1:7:2] = _WG[:3]
W_GAUSS[7] = _WG[3]
W_GAUSS[9:15:2] = _WG[2::-1]

_EPS = np.finfo(float).eps
FIT_BINS = 64
MIN_FIT_SPAN = 50.0
FIT_RESIDUAL_MAX = 0.30
TAIL_ERR_FRACTION = 0.5

Integrand = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class QuadConfig:
    span: float = 500.0
    rel_tol: float = 1e-6
    tail_model: str = "log2_over_t"
    max_subdivisions: int = 200_000
    panel_width: float = 0.5

    def __post_init__(self):
        if self.tail_model not in ("log2_over_t", "none"):
            raise DomainError(f"unknown tail model {self.tail_model!r}")
        if not self.span > 0 or not self.rel_tol > 0 or not self.panel_width > 0:
            raise DomainError("span, rel_tol and panel_width must be positive")
        if self.tail_model == "log2_over_t" and self.span < MIN_FIT_SPAN:
            raise FitFailureError(
                f"span={self.span:g} too small: the log^2(t)/t^2 tail fit uses the window "
                f"[span/2, span] and requires span >= {MIN_FIT_SPAN:g}")


@dataclass
class QuadResult:
    value: complex | float
    core_err: float
    tail_value: complex | float = 0.0
    tail_err: float = 0.0
    nodes_used: int = 0
    fit_constant: complex | float | None = None
    fit_residual: float | None = None

    @property
    def total(self):
        return self.value + self.tail_value

    @property
    def total_err(self) -> float:
        return self.core_err + self.tail_err

    def to_dict(self) -> dict:
        d = asdict(self)
        for key in ("value", "tail_value", "fit_constant"):
            v = d[key]
            if isinstance(v, complex) or isinstance(v, np.complexfloating):
                d[key] = [float(v.real), float(v.imag)] if v.imag != 0 else float(v.real)
            elif v is not None:
                d[key] = float(v)
        tot = self.total
        d["total"] = float(tot.real) if np.iscomplexobj(tot) and tot.imag == 0 else (
            [float(tot.real), float(tot.imag)] if np.iscomplexobj(tot) else float(tot))
        d["core_err"] = float(self.core_err)
        d["tail_err"] = float(self.tail_err)
        d["total_err"] = float(self.total_err)
        return d


@dataclass
class _Panels:
    """Accepted panels from one adaptive run, sorted by left edge."""
    a: np.ndarray
    b: np.ndarray
    value: np.ndarray
    err: np.ndarray
    nodes: int = 0
    subdivisions: int = 0
    complete: bool = True
    extra: dict = field(default_factory=dict)


def _ordered_sum(x: np.ndarray):
    if np.iscomplexobj(x):
        return complex(math.fsum(x.real), math.fsum(x.imag))
    return math.fsum(x)


def _gk_batch(f: Integrand, a: np.ndarray, b: np.ndarray):
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    x = mid[:, None] + half[:, None] * NODES[None, :]
    fx = np.asarray(f(x.ravel())).reshape(x.shape)
    K = half * (fx @ W_KRONROD)
    G = half * (fx @ W_GAUSS)
    absK = np.abs(half) * (np.abs(fx) @ W_KRONROD)
    err = np.abs(K - G) + 50 * _EPS * absK
    return K, err


def _adaptive(f: Integrand, edges: np.ndarray, rel_tol: float, max_sub: int) -> _Panels:
    a = edges[:-1].astype(float)
    b = edges[1:].astype(float)
    length = float(edges[-1] - edges[0])
    acc_a, acc_b, acc_v, acc_e = [], [], [], []
    nodes = 0
    subdivisions = 0
    scale = None
    while len(a):
        K, err = _gk_batch(f, a, b)
        nodes += 15 * len(a)
        if scale is None:
            scale = abs(_ordered_sum(K)) / length
        ok = err <= rel_tol * np.maximum(np.abs(K), scale * (b - a))
        # panels that can no longer be split meaningfully are accepted as-is
        ok |= (b - a) < 1e-12 * max(1.0, np.max(np.abs(edges)))
        acc_a.append(a[ok]); acc_b.append(b[ok]); acc_v.append(K[ok]); acc_e.append(err[ok])
        a, b = a[~ok], b[~ok]
        if len(a) == 0:
            break
        subdivisions += len(a)
        if subdivisions > max_sub:
            acc_a.append(a); acc_b.append(b); acc_v.append(K[~ok]); acc_e.append(err[~ok])
            return _finish(acc_a, acc_b, acc_v, acc_e, nodes, subdivisions, complete=False)
        m = 0.5 * (a + b)
        a, b = np.concatenate([a, m]), np.concatenate([m, b])
    return _finish(acc_a, acc_b, acc_v, acc_e, nodes, subdivisions, complete=True)


def _finish(acc_a, acc_b, acc_v, acc_e, nodes, subdivisions, complete) -> _Panels:
    a = np.concatenate(acc_a)
    order = np.argsort(a, kind="stable")
    return _Panels(a[order], np.concatenate(acc_b)[order], np.concatenate(acc_v)[order],
                   np.concatenate(acc_e)[order], nodes, subdivisions, complete)


def _seed_edges(lo: float, hi: float, width: float, multiple_of: int = 1) -> np.ndarray:
    n = int(math.ceil((hi - lo) / width / multiple_of)) * multiple_of
    return np.linspace(lo, hi, max(n, 1) + 1)


def log2_tail_integral(C, a: float):
    """C * integral_a^inf log(t)^2 / t^2 dt = C (log^2 a + 2 log a + 2) / a."""
    la = math.log(a)
    return C * (la * la + 2 * la + 2) / a


def _bin_model(lo: float, hi: float, nbins: int) -> tuple[np.ndarray, np.ndarray]:
    edges = np.linspace(lo, hi, nbins + 1)
    J = np.array([log2_tail_integral(1.0, e) for e in edges])
    return edges, J[:-1] - J[1:]


def fit_log2_tail(panels: _Panels, lo: float, hi: float, nbins: int = FIT_BINS):
    """Least-squares C for integrand ~ C log^2 t / t^2 on [lo, hi], lo > 1.

    The 64 samples are the cumulative integrals from lo to each bin edge:
    cumulating averages out oscillation at the scale of the zero spacing.
    Returns (C, relative residual).
    """
    edges, J = _bin_model(lo, hi, nbins)
    mids = 0.5 * (panels.a + panels.b)
    inwin = (mids >= lo) & (mids <= hi)
    idx = np.clip(np.searchsorted(edges, mids[inwin], side="right") - 1, 0, nbins - 1)
    I = np.zeros(nbins, dtype=panels.value.dtype)
    np.add.at(I, idx, panels.value[inwin])
    y = np.cumsum(I)
    m = np.cumsum(J)
    C = np.dot(m, y) / np.dot(m, m)
    model = C * m
    denom = math.sqrt(float(np.sum(np.abs(model) ** 2)))
    resid = math.sqrt(float(np.sum(np.abs(y - model) ** 2))) / denom if denom > 0 else math.inf
    return C, resid


def _check_budget(panels: _Panels, cfg: QuadConfig, what: str):
    if not panels.complete:
        partial = QuadResult(_ordered_sum(panels.value), float(np.sum(panels.err)),
                             nodes_used=panels.nodes)
        raise BudgetExceededError(
            f"{what}: max_subdivisions={cfg.max_subdivisions} reached", partial=partial)


def integrate_interval(f: Integrand, lo: float, hi: float, cfg: QuadConfig) -> QuadResult:
    """Core-only integral over [lo, hi] with the panel machinery of cfg."""
    panels = _adaptive(f, _seed_edges(lo, hi, cfg.panel_width), cfg.rel_tol, cfg.max_subdivisions)
    _check_budget(panels, cfg, "integrate_interval")
    return QuadResult(_ordered_sum(panels.value), float(np.sum(panels.err)), nodes_used=panels.nodes)


def integrate_line(f: Integrand, cfg: QuadConfig) -> QuadResult:
    """Integral of f over the real line: core on [-span, span] plus optional tails."""
    S = cfg.span
    if cfg.tail_model == "none":
        edges = _seed_edges(-S, S, cfg.panel_width)
        panels = _adaptive(f, edges, cfg.rel_tol, cfg.max_subdivisions)
        _check_budget(panels, cfg, "integrate_line")
        return QuadResult(_ordered_sum(panels.value), float(np.sum(panels.err)),
                          nodes_used=panels.nodes)

    # seed so that fit bins on [S/2, S] are unions of seed panels, mirrored on the left
    right = _seed_edges(0.0, S, cfg.panel_width, multiple_of=2 * FIT_BINS)
    edges = np.concatenate([-right[:0:-1], right])
    panels = _adaptive(f, edges, cfg.rel_tol, cfg.max_subdivisions)
    _check_budget(panels, cfg, "integrate_line")
    Cr, rr = fit_log2_tail(panels, S / 2, S)
    mirrored = _Panels(-panels.b[::-1], -panels.a[::-1], panels.value[::-1], panels.err[::-1])
    Cl, rl = fit_log2_tail(mirrored, S / 2, S)
    resid = max(rr, rl)
    if resid > FIT_RESIDUAL_MAX:
        raise FitFailureError(
            f"tail fit residual {resid:.0%} on window [span/2, span] exceeds "
            f"{FIT_RESIDUAL_MAX:.0%}; increase span")
    tail = log2_tail_integral(Cr, S) + log2_tail_integral(Cl, S)
    return QuadResult(_ordered_sum(panels.value), float(np.sum(panels.err)), tail,
                      TAIL_ERR_FRACTION * abs(tail), panels.nodes, 0.5 * (Cr + Cl), resid)


def integrate_half_line_doubled(f: Integrand, cfg: QuadConfig) -> QuadResult:
    """2 * integral_0^inf f for an even integrand, tail fitted on [span/2, span]."""
    S = cfg.span
    edges = _seed_edges(0.0, S, cfg.panel_width, multiple_of=2 * FIT_BINS)
    panels = _adaptive(f, edges, cfg.rel_tol, cfg.max_subdivisions)
    _check_budget(panels, cfg, "norm")
    core = 2 * _ordered_sum(panels.value)
    core_err = 2 * float(np.sum(panels.err))
    if cfg.tail_model == "none":
        return QuadResult(core, core_err, nodes_used=panels.nodes)
    C, resid = fit_log2_tail(panels, S / 2, S)
    if resid > FIT_RESIDUAL_MAX:
        raise FitFailureError(
            f"tail fit residual {resid:.0%} on window [span/2, span] exceeds "
            f"{FIT_RESIDUAL_MAX:.0%}; increase span")
    if np.iscomplexobj(C):
        C = complex(C)
    tail = 2 * log2_tail_integral(C, S)
    return QuadResult(core, core_err, tail, TAIL_ERR_FRACTION * abs(tail), panels.nodes, C, resid)


def inner_product_line(f: Integrand, g: Integrand, cfg: QuadConfig) -> QuadResult:
    """<f, g> = integral of f(x) conj(g(x)) dx over the real line."""
    return integrate_line(lambda x: f(x) * np.conj(g(x)), cfg)


def norm_Gn(ctx, cfg: QuadConfig | None = None) -> QuadResult:
    """||G_n||^2 on the real line.

    |G_n|^2 is even because G_n(-x) = conj G_n(x), so only [0, span] is
    integrated and the result doubled.
    """
    from .modelspace import G_n

    cfg = cfg or QuadConfig()
    res = integrate_half_line_doubled(lambda x: np.abs(G_n(ctx, x)) ** 2, cfg)
    if res.fit_constant is not None:
        res.fit_constant = float(np.real(res.fit_constant))
    return res
