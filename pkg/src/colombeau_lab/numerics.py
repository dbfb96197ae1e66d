"""Quadrature rules and asymptotic-order estimation.

Two quadrature paths coexist:

* a float path (:func:`integrate`, :func:`composite_rule`) for everyday
  integrals of real functions, composite Gauss-Legendre with 16 nodes per
  panel;
* a high-precision path (:data:`HP`, :func:`hp_rule`) on the reference
  interval [-1, 1].  Mollifier moment systems are solved against this
  discrete rule, so moments that vanish by construction vanish to working
  precision when integrated with the same rule.  This is what makes
  O(eps^n) exponents with n ~ 7 measurable at eps = 2^-14.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from functools import lru_cache
from typing import Callable, Iterable, Sequence

import mpmath
import numpy as np

from .exceptions import InvalidArgument

DEFAULT_NODES = 16
DEFAULT_PANELS = 64
HP_PANELS = 16
WORKING_DPS = 60

# Private context: never touches the global mpmath precision.
HP = mpmath.MPContext()
HP.dps = WORKING_DPS

# Values computed on the HP path are trusted down to about this magnitude
# (cancellation noise of O(1) quantities sits near 10^-WORKING_DPS).
HP_FLOOR = 1e-45
DEFAULT_FLOOR = 1e-300


# ---------------------------------------------------------------- quadrature


@lru_cache(maxsize=None)
def _leggauss(nodes: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(nodes)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def composite_rule(
    a: float, b: float, panels: int = DEFAULT_PANELS, nodes: int = DEFAULT_NODES
) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of composite Gauss-Legendre on [a, b]."""
    if panels < 1:
        raise InvalidArgument("panels must be >= 1")
    x, w = _leggauss(nodes)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    xs = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    ws = (half[:, None] * w[None, :]).ravel()
    return xs, ws


def integrate(
    f: Callable, a: float, b: float, panels: int = DEFAULT_PANELS, nodes: int = DEFAULT_NODES
) -> float:
    """Composite Gauss-Legendre integral of ``f`` over [a, b].

    ``f`` is called once on the full node array; scalar-only callables are
    vectorized transparently.
    """
    if b < a:
        raise InvalidArgument("integrate requires a <= b")
    if a == b:
        return 0.0
    xs, ws = composite_rule(a, b, panels, nodes)
    try:
        vals = np.asarray(f(xs), dtype=float)
        if vals.shape != xs.shape:
            raise ValueError
    except (TypeError, ValueError):
        vals = np.array([float(f(x)) for x in xs])
    return float(np.dot(ws, vals))


def _hp_legendre_nodes(n: int) -> tuple[list, list]:
    # Newton on P_n from the float roots; converges in a handful of steps.
    xs, ws = [], []
    for x0 in np.polynomial.legendre.leggauss(n)[0]:
        x = HP.mpf(float(x0))
        for _ in range(100):
            p0, p1 = HP.one, x
            for k in range(2, n + 1):
                p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
            dp = n * (x * p1 - p0) / (x * x - 1)
            step = p1 / dp
            x -= step
            if abs(step) < HP.mpf(10) ** (-WORKING_DPS - 5):
                break
        p0, p1 = HP.one, x
        for k in range(2, n + 1):
            p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
        dp = n * (x * p1 - p0) / (x * x - 1)
        xs.append(x)
        ws.append(2 / ((1 - x * x) * dp * dp))
    return xs, ws


@lru_cache(maxsize=None)
def hp_rule(nodes: int = DEFAULT_NODES, panels: int = HP_PANELS) -> tuple[tuple, tuple]:
    """High-precision composite Gauss-Legendre rule on [-1, 1]."""
    gx, gw = _hp_legendre_nodes(nodes)
    h = HP.mpf(2) / panels
    xs, ws = [], []
    for p in range(panels):
        left = -1 + p * h
        for x, w in zip(gx, gw):
            xs.append(left + (x + 1) * h / 2)
            ws.append(w * h / 2)
    return tuple(xs), tuple(ws)


# ------------------------------------------------------------------ grids


def geometric_grid(eps0: float, ratio: float, count: int) -> list[float]:
    """``[eps0, eps0*ratio, eps0*ratio**2, ...]`` of length ``count``."""
    if not eps0 > 0:
        raise InvalidArgument("eps0 must be positive")
    if not 0 < ratio < 1:
        raise InvalidArgument("ratio must lie in (0, 1)")
    if count < 2:
        raise InvalidArgument("count must be >= 2")
    return [eps0 * ratio**i for i in range(count)]


DEFAULT_EPS_GRID = tuple(geometric_grid(2.0**-4, 0.5, 11))


# ---------------------------------------------------------- order fitting


@dataclass(frozen=True)
class OrderEstimate:
    """Least-squares exponent m in |value| ~ C * eps^m."""

    exponent: float
    prefactor_log: float
    residual_rms: float
    n_points_used: int
    window: tuple[float, float]
    saturated: bool = False

    def to_dict(self) -> dict:
        d = asdict(self)
        d["window"] = list(self.window)
        return d


def log_abs(value) -> float:
    """log|value| for floats, complex numbers and HP numbers; -inf at 0.

    HP numbers are handled in their own exponent range so that values below
    the double-precision underflow threshold still carry a logarithm.
    """
    if isinstance(value, (HP.mpf, HP.mpc, mpmath.mpf, mpmath.mpc)):
        a = abs(value)
        return -math.inf if a == 0 else float(HP.log(a))
    a = abs(complex(value))
    if a == 0 or not math.isfinite(a):
        return -math.inf if a == 0 else math.inf
    return math.log(a)


def fit_order(samples: Iterable[tuple[float, object]], floor: float = DEFAULT_FLOOR) -> OrderEstimate:
    """Fit the exponent of an O(eps^m) law from ``(eps, value)`` samples.

    Values with |value| <= floor (including exact zeros) are excluded.  With
    fewer than two usable samples the estimate is *saturated*: the exponent
    is +inf, meaning "below the floor at every eps".
    """
    samples = list(samples)
    for eps, _ in samples:
        if not eps > 0:
            raise InvalidArgument(f"non-positive eps in samples: {eps}")
    log_floor = math.log(floor)
    xs, ys = [], []
    for eps, value in samples:
        ly = log_abs(value)
        if ly > log_floor and math.isfinite(ly):
            xs.append(math.log(eps))
            ys.append(ly)
    eps_all = [e for e, _ in samples]
    window = (min(eps_all), max(eps_all)) if eps_all else (math.nan, math.nan)
    if len(xs) < 2:
        return OrderEstimate(math.inf, math.nan, 0.0, len(xs), window, saturated=True)
    X = np.column_stack([np.asarray(xs), np.ones(len(xs))])
    coef, *_ = np.linalg.lstsq(X, np.asarray(ys), rcond=None)
    resid = np.asarray(ys) - X @ coef
    used = [math.exp(x) for x in xs]
    return OrderEstimate(
        exponent=float(coef[0]),
        prefactor_log=float(coef[1]),
        residual_rms=float(np.sqrt(np.mean(resid**2))),
        n_points_used=len(xs),
        window=(min(used), max(used)),
        saturated=False,
    )


def sup_abs(values: Sequence) -> float | object:
    """Sequential max of |v| over ``values`` (fixed order, deterministic).

    Returns the maximizing magnitude in the widest type present, so HP values
    below double range are not flushed to zero.
    """
    best = None
    best_log = -math.inf
    for v in values:
        lv = log_abs(v)
        if best is None or lv > best_log:
            best, best_log = abs(v), lv
    return 0.0 if best is None else best
