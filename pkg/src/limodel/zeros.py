"""Critical-line zeros of zeta: Hardy Z function, sign-change scan, zero cache."""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from filelock import FileLock
from scipy.optimize import brentq

from . import special
from .errors import CacheError, DomainError, MissedZeroError
from .special import DEFAULT_OPTS, EvalOptions

log = logging.getLogger(__name__)

CACHE_NAME = "zeros_v1.csv"
GRID_STEP = 0.05
MAX_HALVINGS = 4
ROOT_XTOL = 1e-12


@dataclass(frozen=True)
class ZeroTable:
    height_bound: float
    ordinates: np.ndarray
    multiplicities: np.ndarray = field(default=None)
    source: str = "computed"

    def __post_init__(self):
        ords = np.asarray(self.ordinates, dtype=float)
        mult = (np.ones(len(ords), dtype=int) if self.multiplicities is None
                else np.asarray(self.multiplicities, dtype=int))
        if len(mult) != len(ords):
            raise DomainError("ordinates and multiplicities differ in length")
        if len(ords) and (np.any(np.diff(ords) <= 0) or ords[0] <= 0
                          or ords[-1] > self.height_bound):
            raise DomainError("ordinates must be strictly increasing in (0, height_bound]")
        if np.any(mult < 1):
            raise DomainError("multiplicities must be positive")
        object.__setattr__(self, "ordinates", ords)
        object.__setattr__(self, "multiplicities", mult)

    def __len__(self):
        return len(self.ordinates)

    @property
    def count(self) -> int:
        return int(self.multiplicities.sum())

    def truncated(self, T: float) -> "ZeroTable":
        if T > self.height_bound:
            raise DomainError(f"table only certified up to T={self.height_bound:g}")
        keep = self.ordinates <= T
        return ZeroTable(T, self.ordinates[keep], self.multiplicities[keep], self.source)

    def to_text(self) -> str:
        lines = [f"# zeros_v1 T={self.height_bound!r} count={len(self)}"]
        simple = np.all(self.multiplicities == 1)
        for g, m in zip(self.ordinates, self.multiplicities):
            lines.append(f"{g:.12g}" if simple else f"{g:.12g},{m}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "ZeroTable":
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        if not lines or not lines[0].startswith("# zeros_v1"):
            raise CacheError("not a zeros_v1 file")
        header = dict(item.split("=", 1) for item in lines[0].split()[2:])
        try:
            T = float(header["T"])
            count = int(header["count"])
        except (KeyError, ValueError) as exc:
            raise CacheError(f"bad zeros_v1 header: {lines[0]!r}") from exc
        ords, mults = [], []
        for ln in lines[1:]:
            parts = ln.split(",")
            ords.append(float(parts[0]))
            mults.append(int(parts[1]) if len(parts) > 1 else 1)
        if len(ords) != count:
            raise CacheError(f"header says {count} zeros, file has {len(ords)}")
        return cls(T, np.array(ords), np.array(mults, dtype=int), source="loaded")


def riemann_siegel_theta(t, opts: EvalOptions = DEFAULT_OPTS):
    t = np.asarray(t, dtype=float)
    lg = special.log_gamma(0.25 + 0.5j * t.astype(complex))
    return np.imag(lg) - 0.5 * t * special.LOG_PI


def hardy_Z(t, opts: EvalOptions = DEFAULT_OPTS):
    """Z(t) = exp(i theta(t)) zeta(1/2 + it), real for real t."""
    arr = np.asarray(t, dtype=float)
    if np.any(arr < 0):
        raise DomainError("hardy_Z needs t >= 0")
    th = riemann_siegel_theta(arr, opts)
    z = special.zeta(0.5 + 1j * arr.astype(complex), opts)
    val = np.real(np.exp(1j * th) * z)
    return float(val) if arr.ndim == 0 else val


def zero_count_estimate(T: float) -> float:
    """Main term (T/2pi) log(T/2pi) - T/2pi of the Riemann-von Mangoldt formula."""
    if T <= 2 * math.pi * math.e:
        raise DomainError("zero_count_estimate needs T > 2*pi*e")
    x = T / (2 * math.pi)
    return x * math.log(x) - x


def _rvm_expected(T: float) -> float:
    x = T / (2 * math.pi)
    return x * math.log(x) - x + 7.0 / 8.0


def _scan(T: float, step: float, opts: EvalOptions, workers: int) -> np.ndarray:
    n = int(math.ceil(T / step))
    grid = np.linspace(0.0, n * step, n + 1)
    grid = grid[grid <= T]
    if grid[-1] < T:
        grid = np.append(grid, T)
    chunks = np.array_split(grid, max(1, min(len(grid) // 2000, 64)))
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            vals = list(pool.map(lambda c: hardy_Z(c, opts), chunks))
    else:
        vals = [hardy_Z(c, opts) for c in chunks]
    Z = np.concatenate(vals)

    roots = []
    Zf = lambda x: float(hardy_Z(x, opts))
    for i in range(len(grid) - 1):
        a, b = grid[i], grid[i + 1]
        za, zb = Z[i], Z[i + 1]
        if za == 0.0:
            if a > 0:
                roots.append(a)
            continue
        if za * zb < 0:
            roots.append(brentq(Zf, a, b, xtol=ROOT_XTOL, rtol=4 * np.finfo(float).eps))
    if Z[-1] == 0.0 and grid[-1] > 0:
        roots.append(grid[-1])
    return np.array(roots)


def _flag_multiple(roots: np.ndarray, opts: EvalOptions):
    h = 1e-5
    for g in roots:
        dZ = (hardy_Z(g + h, opts) - hardy_Z(g - h, opts)) / (2 * h)
        if abs(dZ) < 1e-6:
            log.warning("possible multiple zero near t=%.12g (|Z'|=%.2e)", g, abs(dZ))


def find_zeros(T: float, opts: EvalOptions = DEFAULT_OPTS, step: float = GRID_STEP,
               workers: int = 1) -> ZeroTable:
    """All zeros 1/2 + i*gamma with 0 < gamma <= T, as a ZeroTable.

    Sign changes of Z on a grid are refined by Brent's method.  If the count
    drifts from the Riemann-von Mangoldt estimate by more than 2, the grid
    step is halved (up to four times) before giving up.
    """
    if T < 10:
        raise DomainError("find_zeros needs T >= 10")
    expected = _rvm_expected(T)
    for _ in range(MAX_HALVINGS + 1):
        roots = _scan(T, step, opts, workers)
        if abs(len(roots) - expected) <= 2:
            _flag_multiple(roots, opts)
            return ZeroTable(float(T), roots, source="computed")
        log.info("found %d zeros below %g, expected %.2f; halving step", len(roots), T, expected)
        step /= 2
    raise MissedZeroError(
        f"found {len(roots)} zeros below T={T:g} but Riemann-von Mangoldt expects {expected:.2f}")


def default_cache_dir() -> Path:
    env = os.environ.get("LI_CACHE_DIR")
    if env:
        return Path(env)
    return Path(os.environ.get("XDG_CACHE_HOME", Path.home() / ".cache")) / "limodel"


def load_or_compute(T: float, cache_dir: Path | str | None = None, recompute: bool = False,
                    opts: EvalOptions = DEFAULT_OPTS, workers: int = 1) -> ZeroTable:
    """Zero table up to T, from the cache when it reaches high enough."""
    cache_dir = Path(cache_dir) if cache_dir is not None else default_cache_dir()
    try:
        cache_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise CacheError(f"cannot create cache dir {cache_dir}: {exc}") from exc
    path = cache_dir / CACHE_NAME
    with FileLock(str(path) + ".lock"):
        if path.exists() and not recompute:
            try:
                table = ZeroTable.from_text(path.read_text())
            except (OSError, DomainError, ValueError) as exc:
                raise CacheError(f"unreadable cache {path}: {exc}") from exc
            if table.height_bound >= T:
                return table.truncated(T)
        table = find_zeros(T, opts, workers=workers)
        try:
            path.write_text(table.to_text())
        except OSError as exc:
            raise CacheError(f"cannot write cache {path}: {exc}") from exc
    # reread so callers see exactly what the cache holds
    return ZeroTable.from_text(table.to_text()).truncated(T)
