"""Li coefficients by zero sums, the arithmetic formula and the L2 norm of G_n."""

from .errors import (AccuracyError, BudgetExceededError, CacheError, DomainError, FitFailureError,
                     LiModelError, MissedZeroError, NearZeroError, OverflowRiskError, PoleError)
from .li import LiReport, VerifyConfig, li_arithmetic, li_verify, li_zero_sum
from .modelspace import (BasisFunction, F_gamma, G_n, H_n, HnContext, M_n_truncated,
                         expansion_coefficient, make_context)
from .quad import QuadConfig, QuadResult, integrate_line, norm_Gn
from .special import EvalOptions, xi, xi_logderiv, zeta
from .stieltjes import EtaTable, eta_from_powerseries, stieltjes_constants
from .zeros import ZeroTable, find_zeros, load_or_compute

__version__ = "0.1.0"
