import json
import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from derived_values import LAMBDA
from limodel.errors import BudgetExceededError, DomainError, FitFailureError
from limodel.modelspace import G_n, make_context
from limodel.quad import (QuadConfig, QuadResult, _adaptive, _seed_edges, fit_log2_tail,
                          inner_product_line, integrate_interval, integrate_line, log2_tail_integral,
                          norm_Gn)

CONVERGENCE = Path(__file__).resolve().parent.parent / "fixtures" / "norm_convergence.json"

# (integrand, lo, hi, exact)
CLOSED_FORMS = [
    (np.exp, 0.0, 1.0, math.e - 1),
    (np.sin, 0.0, math.pi, 2.0),
    (np.cos, 0.0, math.pi / 2, 1.0),
    (lambda x: x * x, 0.0, 3.0, 9.0),
    (lambda x: 1 / (1 + x * x), -10.0, 10.0, 2 * math.atan(10)),
    (np.sqrt, 0.0, 1.0, 2 / 3),
    (np.log, 0.0, 1.0, -1.0),
    (lambda x: np.exp(-x * x), -6.0, 6.0, math.sqrt(math.pi) * math.erf(6)),
    (lambda x: 1 / x, 1.0, math.e, 1.0),
    (lambda x: x * np.exp(-x), 0.0, 20.0, 1 - 21 * math.exp(-20)),
    (lambda x: np.cos(50 * x), 0.0, 1.0, math.sin(50) / 50),
    (lambda x: np.exp(1j * x), 0.0, 2 * math.pi, 0.0),
    (lambda x: np.abs(x - 0.3), 0.0, 1.0, 0.29),
    (np.log1p, 0.0, 1.0, 2 * math.log(2) - 1),
    (lambda x: x ** 5 - x, -1.0, 2.0, 9.0),
    (lambda x: np.sin(x) ** 2, 0.0, 10.0, 5 - math.sin(20) / 4),
    (lambda x: 1 / (x * x + 1e-2), -1.0, 1.0, 20 * math.atan(10)),
    (lambda x: np.exp(-x) * np.cos(x), 0.0, 30.0,
     0.5 + math.exp(-30) * (math.sin(30) - math.cos(30)) / 2),
    (np.tanh, -2.0, 3.0, math.log(math.cosh(3)) - math.log(math.cosh(2))),
    (lambda x: np.exp(2j * x) / (1 + x * x), -5.0, 5.0, None),
]


def _exact_complex_lorentz():
    # integral_{-5}^{5} e^{2ix}/(1+x^2) = integral cos(2x)/(1+x^2), done at high precision
    import mpmath as mp
    mp.mp.dps = 30
    return float(mp.quad(lambda x: mp.cos(2 * x) / (1 + x * x), [-5, 0, 5]))


def test_corpus_has_20_fixtures():
    assert len(CLOSED_FORMS) == 20


@pytest.mark.parametrize("rel_tol", [1e-6, 1e-10])
@pytest.mark.parametrize("k", range(20))
def test_error_estimate_is_conservative(k, rel_tol):
    f, lo, hi, exact = CLOSED_FORMS[k]
    if exact is None:
        exact = _exact_complex_lorentz()
    res = integrate_interval(f, lo, hi, QuadConfig(span=1, rel_tol=rel_tol, tail_model="none"))
    assert abs(res.value - exact) <= res.core_err
    assert res.core_err <= 1e3 * rel_tol * max(1.0, abs(exact))


def test_odd_integrand_vanishes():
    res = integrate_line(lambda x: x * np.exp(-x * x), QuadConfig(span=50, tail_model="none"))
    assert abs(res.total) < 1e-12


def test_lorentzian_over_wide_core():
    # the core alone gives 2 atan(1e4); pi needs the 2e-4 beyond the span
    res = integrate_line(lambda x: 1 / (1 + x * x), QuadConfig(span=1e4, tail_model="none"))
    assert abs(res.total - 2 * math.atan(1e4)) < 1e-9
    assert res.tail_value == 0 and res.nodes_used > 0


def test_log2_tail_closed_form():
    assert log2_tail_integral(1.0, 1.0) == 2.0
    a = 50.0
    la = math.log(a)
    assert log2_tail_integral(3.0, a) == pytest.approx(3 * (la * la + 2 * la + 2) / a)


def test_tail_model_recovers_pure_log2_integrand():
    f = lambda x: np.log(np.maximum(np.abs(x), 2.0)) ** 2 / np.maximum(x * x, 4.0)
    res = integrate_line(f, QuadConfig(span=200))
    assert abs(res.fit_constant - 1) < 1e-3
    core = integrate_line(f, QuadConfig(span=200, tail_model="none")).total
    assert abs(res.tail_value - 2 * log2_tail_integral(1.0, 200)) < 1e-3 * res.tail_value
    assert res.total > core


def test_result_total_and_error():
    r = QuadResult(1.0, 0.1, 0.5, 0.25, 10)
    assert r.total == 1.5 and r.total_err == pytest.approx(0.35)
    d = r.to_dict()
    assert d["total"] == 1.5 and d["total_err"] == pytest.approx(0.35)
    json.dumps(d)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.1, 3.0), st.floats(-2.0, 2.0), st.floats(0.5, 4.0))
def test_conjugate_symmetry(freq, shift, width):
    f = lambda x: np.exp(1j * freq * x) / (1 + ((x - shift) / width) ** 2)
    g = lambda x: (1 + 1j * x) / (1 + x * x) ** 1.5
    cfg = QuadConfig(span=60, tail_model="none")
    fg = inner_product_line(f, g, cfg).total
    gf = inner_product_line(g, f, cfg).total
    assert abs(fg - np.conj(gf)) < 1e-10


@pytest.mark.parametrize("n", [1, 2, 4])
def test_doubling_is_legal(n):
    ctx = make_context(n)
    f = lambda x: np.abs(G_n(ctx, x)) ** 2
    cfg = QuadConfig(span=120, tail_model="none")
    left = integrate_interval(f, -120.0, 0.0, cfg).value
    right = integrate_interval(f, 0.0, 120.0, cfg).value
    assert abs(left - right) <= 1e-8 * (left + right)


def test_tail_fit_positive_and_stable_under_window_shift():
    ctx = make_context(1)
    f = lambda x: np.abs(G_n(ctx, x)) ** 2
    panels = _adaptive(f, _seed_edges(0.0, 625.0, 0.5, multiple_of=128), 1e-6, 200_000)
    c0, r0 = fit_log2_tail(panels, 250.0, 500.0)
    c1, r1 = fit_log2_tail(panels, 312.5, 625.0)
    assert c0 > 0 and c1 > 0
    assert abs(c1 - c0) <= 0.2 * c0
    assert max(r0, r1) < 0.3


def test_budget_exceeded_carries_partial_result():
    cfg = QuadConfig(span=1, tail_model="none", max_subdivisions=10)
    with pytest.raises(BudgetExceededError) as info:
        integrate_interval(lambda x: np.sin(1 / x), 1e-3, 1.0, cfg)
    part = info.value.partial
    assert isinstance(part, QuadResult)
    assert math.isfinite(part.value) and part.nodes_used > 0
    assert info.value.exit_code == 4


def test_short_span_names_fit_window():
    with pytest.raises(FitFailureError, match="window"):
        QuadConfig(span=10)
    QuadConfig(span=10, tail_model="none")


def test_bad_residual_is_a_fit_failure():
    with pytest.raises(FitFailureError, match="window"):
        integrate_line(lambda x: np.cos(x / 15) / np.sqrt(1 + x * x), QuadConfig(span=100))


def test_config_validation():
    with pytest.raises(DomainError):
        QuadConfig(tail_model="exp")
    with pytest.raises(DomainError):
        QuadConfig(rel_tol=0)


def test_norm_route_n1(eta20):
    res = norm_Gn(make_context(1, eta20))
    lam = float(res.total) / (2 * math.pi)
    assert abs(lam - LAMBDA[0]) <= 0.02 * LAMBDA[0]
    assert res.tail_err == pytest.approx(0.5 * abs(res.tail_value))
    assert res.fit_constant > 0
    assert abs(lam - LAMBDA[0]) <= res.total_err / (2 * math.pi)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_parseval_lower_bound_fifty_ordinates(n, zeros1000, eta20):
    res = norm_Gn(make_context(n, eta20))
    rho = 0.5 - 1j * zeros1000.ordinates[:50]
    assert len(rho) == 50
    w2 = zeros1000.multiplicities[:50] * np.abs(1 - (1 - 1 / rho) ** n) ** 2
    one_sided = math.pi * float(w2.sum())
    # conjugate zeros contribute equal terms, so the symmetric partial sum is twice that
    assert one_sided <= 2 * one_sided <= res.total + res.total_err


def test_norm_is_deterministic():
    ctx = make_context(2)
    cfg = QuadConfig(span=200)
    assert norm_Gn(ctx, cfg).to_dict() == norm_Gn(ctx, cfg).to_dict()


def test_recorded_convergence_is_monotone():
    data = json.loads(CONVERGENCE.read_text())
    runs = {r["span"]: r for r in data["runs"]}
    assert runs[800.0]["abs_diff"] <= runs[400.0]["abs_diff"]
    assert abs(data["lambda_arithmetic"] - LAMBDA[0]) < 1e-12
    for r in runs.values():
        assert r["abs_diff"] <= r["err"]


def test_recorded_convergence_reproduces():
    data = json.loads(CONVERGENCE.read_text())
    run = next(r for r in data["runs"] if r["span"] == 400.0)
    res = norm_Gn(make_context(1), QuadConfig(span=400))
    assert abs(float(res.total) / (2 * math.pi) - run["value"]) < 1e-13
