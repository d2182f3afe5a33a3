"""Li coefficients lambda_n by three routes, with error budgets and verdicts.

* zero sum over a ZeroTable, plus a smooth-density correction for the zeros
  above the table height;
* arithmetic formula in the Laurent coefficients eta_k and zeta(j);
* (2 pi)^-1 ||G_n||^2 by quadrature.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import integrate

from . import special
from .errors import DomainError, OverflowRiskError
from .modelspace import make_context, zero_density
from .quad import QuadConfig, QuadResult, norm_Gn
from .stieltjes import EtaTable, eta_from_powerseries
from .zeros import ZeroTable, load_or_compute

SCHEMA = "li-report-v1"
MAX_N = 60
MIN_TABLE_HEIGHT = 50.0
TAIL_SAFETY = 2.0
_EPS = np.finfo(float).eps


# ---------------------------------------------------------------------------
# Zero-sum route
# ---------------------------------------------------------------------------

def pair_weight(n: int, t):
    """2 Re[1 - (1 - 1/rho)^n] for rho = 1/2 - it; the contribution of the pair +-t.

    On the critical line 1 - 1/rho = exp(-2i atan(1/(2t))), so the weight is
    4 sin^2(n atan(1/(2t))), free of cancellation at large t.
    """
    t = np.asarray(t, dtype=float)
    return 4.0 * np.sin(n * np.arctan(0.5 / t)) ** 2


def _pair_weight_deriv(n: int, t: float) -> float:
    return -8.0 * n * math.sin(2 * n * math.atan(0.5 / t)) / (4 * t * t + 1)


def count_error_bound(t: float) -> float:
    """Explicit bound on |N(t) - (t/2pi) log(t/2pi e) - 7/8| (Trudgian 2014), t >= e."""
    return 0.112 * math.log(t) + 0.278 * math.log(math.log(t)) + 2.510 + 0.2 / t


def zero_sum_tail(n: int, T: float) -> tuple[float, float]:
    """(correction, budget) for the zeros above T.

    correction = integral_T^inf w(t) dN_0(t) with dN_0 the smooth zero density.
    Writing N = N_0 + R and integrating by parts, the remainder is bounded by
    R_max(T) w(T) + integral_T^inf R_max(t) |w'(t)| dt; the budget is twice that.
    """
    # t = T e^v turns the algebraic decay into exponential decay in v
    def in_log(g):
        return lambda v: g(T * math.exp(v)) * T * math.exp(v)

    corr, _ = integrate.quad(in_log(lambda t: float(zero_density(t)) * float(pair_weight(n, t))),
                             0.0, 80.0, limit=200, epsabs=0, epsrel=1e-10)
    var, _ = integrate.quad(in_log(lambda t: count_error_bound(t) * abs(_pair_weight_deriv(n, t))),
                            0.0, 80.0, limit=200, epsabs=0, epsrel=1e-8)
    edge = count_error_bound(T) * float(pair_weight(n, T))
    return float(corr), float(TAIL_SAFETY * (edge + var))


def li_zero_sum_parts(n: int, zeros: ZeroTable) -> tuple[float, float, float]:
    """(partial sum over the table, tail correction, tail budget)."""
    if n < 1:
        raise DomainError("n must be a positive integer")
    if zeros.height_bound < MIN_TABLE_HEIGHT:
        raise DomainError(f"zero table height {zeros.height_bound:g} < {MIN_TABLE_HEIGHT:g}")
    if len(zeros) == 0:
        raise DomainError("zero table is empty")
    partial = math.fsum((zeros.multiplicities * pair_weight(n, zeros.ordinates)).tolist())
    corr, budget = zero_sum_tail(n, zeros.height_bound)
    budget += 4 * _EPS * len(zeros) * abs(partial)
    return partial, corr, budget


def li_zero_sum(n: int, zeros: ZeroTable) -> tuple[float, float]:
    """lambda_n from the zeros: (value, tail_budget); value includes the tail correction."""
    partial, corr, budget = li_zero_sum_parts(n, zeros)
    return partial + corr, budget


# ---------------------------------------------------------------------------
# Arithmetic route
# ---------------------------------------------------------------------------

def li_arithmetic_with_err(n: int, eta: EtaTable) -> tuple[float, float]:
    """lambda_n from eta_0..eta_{n-1} and zeta(2..n), with an error estimate.

    The zeta sum is rewritten as (1 - n) + sum binom(n,j)(-1)^(j-1) r_j with
    r_j = (1 - 2^-j) zeta(j) - 1, so the alternating binomials act on small
    numbers.
    """
    if n < 1:
        raise DomainError("n must be a positive integer")
    if n > MAX_N:
        raise OverflowRiskError(f"n={n} > {MAX_N}: binomial cancellation exceeds binary64")
    if eta.max_k < n - 1:
        raise DomainError(f"eta table too short: max_k={eta.max_k}, need {n - 1}")
    t1 = [-math.comb(n, j) * eta.eta[j - 1] for j in range(1, n + 1)]
    t1_err = math.fsum(math.comb(n, j) * eta.err_est[j - 1] for j in range(1, n + 1))
    t2 = [1.0, -(special.EULER_GAMMA + math.log(4 * math.pi)) * n / 2]
    t3 = [-(1.0 - n)]
    for j in range(2, n + 1):
        r = (1.0 - 2.0 ** -j) * special.zeta_minus_one(j) - 2.0 ** -j
        t3.append(-math.comb(n, j) * (-1) ** (j - 1) * r)
    terms = t1 + t2 + t3
    value = math.fsum(float(x) for x in terms)
    err = float(t1_err + 8 * _EPS * math.fsum(abs(float(x)) for x in terms))
    return value, err


def li_arithmetic(n: int, eta: EtaTable) -> float:
    return li_arithmetic_with_err(n, eta)[0]


# ---------------------------------------------------------------------------
# Report
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Verdict:
    pair: str
    a: float
    b: float
    tol: float

    @property
    def diff(self) -> float:
        return abs(self.a - self.b)

    @property
    def passed(self) -> bool:
        return self.diff <= self.tol

    def to_dict(self) -> dict:
        return {"pair": self.pair, "a": self.a, "b": self.b, "diff": float(self.diff),
                "tol": self.tol, "pass": bool(self.passed)}

    def explain(self) -> str:
        word = "PASS" if self.passed else "FAIL"
        return f"{word} {self.pair}: |{self.a!r} - {self.b!r}| = {self.diff:.3e} vs tol {self.tol:.3e}"


@dataclass
class LiReport:
    n: int
    lambda_zero_sum: float | None = None
    zero_sum_tail_budget: float | None = None
    zero_sum_partial: float | None = None
    zero_sum_correction: float | None = None
    zero_height: float | None = None
    lambda_arithmetic: float | None = None
    arithmetic_err: float | None = None
    lambda_norm: float | None = None
    norm_err_budget: float | None = None
    norm_detail: dict | None = None
    verdicts: list[Verdict] = field(default_factory=list)

    def __post_init__(self):
        if self.n < 1:
            raise DomainError("n must be a positive integer")
        if self.zero_sum_tail_budget is not None and not self.zero_sum_tail_budget > 0:
            raise DomainError("zero-sum tail budget must be positive")

    @property
    def all_pass(self) -> bool:
        return all(v.passed for v in self.verdicts)

    def derive_verdicts(self):
        """Tolerances are the sums of the two routes' budgets."""
        routes = {}
        if self.lambda_zero_sum is not None:
            routes["zero_sum"] = (self.lambda_zero_sum, self.zero_sum_tail_budget)
        if self.lambda_arithmetic is not None:
            routes["arithmetic"] = (self.lambda_arithmetic, self.arithmetic_err)
        if self.lambda_norm is not None:
            routes["norm"] = (self.lambda_norm, self.norm_err_budget)
        names = [k for k in ("zero_sum", "arithmetic", "norm") if k in routes]
        self.verdicts = [
            Verdict(f"{p}~{q}", float(routes[p][0]), float(routes[q][0]),
                    float(routes[p][1] + routes[q][1]))
            for i, p in enumerate(names) for q in names[i + 1:]]
        return self

    def to_dict(self) -> dict:
        zs = None
        if self.lambda_zero_sum is not None:
            zs = {"value": self.lambda_zero_sum, "tail": self.zero_sum_tail_budget,
                  "partial": self.zero_sum_partial, "correction": self.zero_sum_correction,
                  "T": self.zero_height}
        ar = None
        if self.lambda_arithmetic is not None:
            ar = {"value": self.lambda_arithmetic, "err": self.arithmetic_err}
        nm = None
        if self.lambda_norm is not None:
            nm = {"value": self.lambda_norm, "err": self.norm_err_budget, "quad": self.norm_detail}
        return {"schema": SCHEMA, "n": self.n, "zero_sum": zs, "arithmetic": ar, "norm": nm,
                "verdicts": [v.to_dict() for v in self.verdicts]}

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_dict(cls, d: dict) -> "LiReport":
        if d.get("schema") != SCHEMA:
            raise DomainError(f"expected schema {SCHEMA!r}, got {d.get('schema')!r}")
        zs = d.get("zero_sum") or {}
        ar = d.get("arithmetic") or {}
        nm = d.get("norm") or {}
        rep = cls(
            n=d["n"],
            lambda_zero_sum=zs.get("value"), zero_sum_tail_budget=zs.get("tail"),
            zero_sum_partial=zs.get("partial"), zero_sum_correction=zs.get("correction"),
            zero_height=zs.get("T"),
            lambda_arithmetic=ar.get("value"), arithmetic_err=ar.get("err"),
            lambda_norm=nm.get("value"), norm_err_budget=nm.get("err"), norm_detail=nm.get("quad"),
            verdicts=[Verdict(v["pair"], v["a"], v["b"], v["tol"]) for v in d.get("verdicts", [])])
        for v, raw in zip(rep.verdicts, d.get("verdicts", [])):
            if raw.get("pass") != v.passed:
                raise DomainError(f"verdict {v.pair} does not follow from its recorded numbers")
        return rep

    @classmethod
    def from_json(cls, text: str) -> "LiReport":
        return cls.from_dict(json.loads(text))


# ---------------------------------------------------------------------------
# Verification driver
# ---------------------------------------------------------------------------

METHODS = ("zeros", "arith", "norm")


@dataclass
class VerifyConfig:
    T: float = 1000.0
    span: float = 500.0
    rel_tol: float = 1e-6
    methods: tuple[str, ...] = METHODS
    cache_dir: Path | str | None = None
    recompute: bool = False
    zeros: ZeroTable | None = None
    eta: EtaTable | None = None

    def __post_init__(self):
        bad = set(self.methods) - set(METHODS)
        if bad or not self.methods:
            raise DomainError(f"methods must be a non-empty subset of {METHODS}")
        if not self.T > 0 or not self.span > 0 or not self.rel_tol > 0:
            raise DomainError("T, span and rel_tol must be positive")

    def quad_config(self) -> QuadConfig:
        return QuadConfig(span=self.span, rel_tol=self.rel_tol)

    def zero_table(self) -> ZeroTable:
        if self.zeros is None:
            self.zeros = load_or_compute(self.T, self.cache_dir, self.recompute)
        elif self.zeros.height_bound > self.T:
            return self.zeros.truncated(self.T)
        return self.zeros

    def eta_table(self, n: int) -> EtaTable:
        if self.eta is None or self.eta.max_k < n - 1:
            self.eta = eta_from_powerseries(max(n - 1, 0))
        return self.eta


def li_norm(n: int, cfg: QuadConfig, eta: EtaTable | None = None) -> tuple[float, float, QuadResult]:
    """(2 pi)^-1 ||G_n||^2 as (value, error budget, raw quadrature result)."""
    res = norm_Gn(make_context(n, eta), cfg)
    return float(np.real(res.total)) / (2 * math.pi), float(res.total_err) / (2 * math.pi), res


def li_verify(n: int, config: VerifyConfig | None = None) -> LiReport:
    config = config or VerifyConfig()
    if n < 1:
        raise DomainError("n must be a positive integer")
    qcfg = config.quad_config() if "norm" in config.methods else None
    rep = LiReport(n)
    if "arith" in config.methods or "norm" in config.methods:
        eta = config.eta_table(n)
    if "arith" in config.methods:
        rep.lambda_arithmetic, rep.arithmetic_err = li_arithmetic_with_err(n, eta)
    if "zeros" in config.methods:
        table = config.zero_table()
        partial, corr, budget = li_zero_sum_parts(n, table)
        rep.lambda_zero_sum = partial + corr
        rep.zero_sum_tail_budget = budget
        rep.zero_sum_partial = partial
        rep.zero_sum_correction = corr
        rep.zero_height = table.height_bound
    if "norm" in config.methods:
        val, err, res = li_norm(n, qcfg, eta)
        rep.lambda_norm, rep.norm_err_budget = val, err
        rep.norm_detail = res.to_dict()
    return rep.derive_verdicts()
