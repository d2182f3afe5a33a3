"""Regenerate fixtures/norm_convergence.json: the n = 1 norm route at two spans.

    python3 tests/make_norm_convergence.py

Records (2 pi)^-1 ||G_1||^2 with its error budget at span 400 and span 800,
together with the arithmetic value it converges to.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

from limodel.li import li_arithmetic
from limodel.modelspace import make_context
from limodel.quad import QuadConfig, norm_Gn
from limodel.stieltjes import eta_from_powerseries

FIXTURE = Path(__file__).resolve().parent.parent / "fixtures" / "norm_convergence.json"
SPANS = (400.0, 800.0)


def run() -> dict:
    ctx = make_context(1)
    target = li_arithmetic(1, eta_from_powerseries(1))
    rows = []
    for span in SPANS:
        res = norm_Gn(ctx, QuadConfig(span=span))
        value = float(res.total) / (2 * math.pi)
        rows.append({"span": span, "value": value, "err": res.total_err / (2 * math.pi),
                     "abs_diff": abs(value - target), "fit_constant": float(res.fit_constant),
                     "fit_residual": res.fit_residual})
    return {"n": 1, "lambda_arithmetic": target, "runs": rows}


if __name__ == "__main__":
    FIXTURE.write_text(json.dumps(run(), indent=2) + "\n")
    print(FIXTURE.read_text())
