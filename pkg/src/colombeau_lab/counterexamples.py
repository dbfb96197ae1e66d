"""The functionals P and Q and the decay experiments built on them.

Both are series over k >= 1 whose k-th term is

    (1/k!) * G_k(phi) * <phi|phi>^(k + 1/k) * <v_k, phi>

with G_k = g(<phi|phi>^(k+1/k) e(v(phi))) for P and
G_k = h_k(<phi|phi>^(3/2) <v_{1/2}, phi>) for Q.  Neither depends on x.

Terms are assembled in log space: under S_eps, <phi|phi> grows like 1/eps
and the power k + 1/k overflows long before the factorial wins.  Moments
<v_k, phi> come from the symbolic structure (:func:`exact_moment`), so the
ones that vanish by construction are zero to working precision (odd ones
of even functions exactly) and never pollute the double-precision sum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .exceptions import InvalidArgument, TruncationFailure
from .numerics import DEFAULT_EPS_GRID, HP, OrderEstimate, fit_order, geometric_grid
from .testing import Representative
from .testobjects import (
    TestFunction,
    abs_integral,
    certify_family,
    exact_moment,
    half_moment,
    l2_inner,
    linear_combine,
    make_Aq_generic,
    make_half_moment_direction,
    scale,
)

EXPLORATORY = "exploratory: numerical exhibit, not a proof"


# ------------------------------------------------------------- helpers


def g(x: float) -> float:
    return x / (1.0 + x * x)


def e_fun(x: float) -> float:
    return math.exp(-1.0 / x) if x > 0 else 0.0


def gamma_k(k: int) -> float:
    if k < 1:
        raise InvalidArgument("k must be a positive integer")
    return k + 1.0 / k


def bump_sigma(x: float) -> float:
    """Smooth even cutoff: 1 on |x| <= 1/2, 0 on |x| >= 3/2."""
    a = e_fun(1.5 - abs(x))
    b = e_fun(abs(x) - 0.5)
    return a / (a + b)


def smoothstep_sigma(x: float) -> float:
    """Second cutoff with the same plateaus (clamped quintic smoothstep)."""
    t = min(max(abs(x) - 0.5, 0.0), 1.0)
    return 1.0 - t * t * t * (t * (6 * t - 15) + 10)


def h_k(k: int, x: float, sigma: Callable[[float], float] = bump_sigma) -> float:
    s = sigma(x)
    two_g = 2.0 * g(x)
    tail = math.copysign(abs(two_g) ** gamma_k(k), x) if x else 0.0
    return s * two_g + (1.0 - s) * tail


def _log_abs_h_k(k: int, x: float, sigma: Callable[[float], float]) -> float:
    # log|h_k(x)|, without underflow once sigma(x) = 0
    if x == 0:
        return -math.inf
    if sigma(x) == 0.0:
        return gamma_k(k) * math.log(abs(2.0 * g(x)))
    v = h_k(k, x, sigma)
    return math.log(abs(v)) if v else -math.inf


def v_fun(phi: TestFunction) -> float:
    """<phi|phi>^(1/2) <v_{1/2}, phi>; invariant under S_eps on the line."""
    return math.sqrt(l2_inner(phi)) * half_moment(phi)


# ------------------------------------------------------------ series


@dataclass(frozen=True)
class SeriesEvalConfig:
    tail_tol: float = 1e-30
    k_max_hard: int = 60
    record_terms: bool = False

    def __post_init__(self):
        if not self.tail_tol > 0:
            raise InvalidArgument("tail_tol must be positive")
        if self.k_max_hard < 2:
            raise InvalidArgument("k_max_hard must be >= 2")


@dataclass
class SeriesResult:
    value: float
    k_used: int
    tail_bound: float
    terms: list[float] = field(default_factory=list)


@dataclass(frozen=True)
class _Invariants:
    l2: float
    half: float
    radius: float
    abs_mass: float


def _invariants(phi: TestFunction) -> _Invariants:
    return _Invariants(l2_inner(phi), half_moment(phi), phi.support_radius, abs_integral(phi))


def _log_moment(phi: TestFunction, k: int) -> tuple[float, float]:
    m = exact_moment(phi, k)
    if m == 0:
        return 0.0, -math.inf
    return (1.0 if m > 0 else -1.0), float(HP.log(abs(m)))


def _log_tail(log_A: float, log_a: float, log_mass: float, K: int, half_factor: bool) -> float:
    """log of a bound on sum_{k > K} (c/k!) A^(k+1/k) a^k int|phi|.

    Consecutive bound terms have ratio <= A a / (k+1) because A >= 1, so
    the tail is at most the first omitted term over (1 - A a / (K+2)).
    """
    k = K + 1
    first = (k + 1.0 / k) * log_A + k * log_a + log_mass - math.lgamma(k + 1)
    if half_factor:
        first -= math.log(2.0)
    r = math.exp(log_A + log_a) / (K + 2)
    if r >= 1:
        return math.inf
    return first - math.log1p(-r)


def _sum_series(
    phi: TestFunction,
    cfg: SeriesEvalConfig,
    log_factor: Callable[[int], float],
    half_factor: bool,
    inv: _Invariants,
    k_fixed: int | None = None,
) -> SeriesResult:
    log_A = math.log(max(1.0, inv.l2))
    log_a = math.log(inv.radius)
    # int|phi| comes from quadrature across the kinks of |phi|; a 1% cushion
    # keeps the bound conservative.
    log_mass = math.log(inv.abs_mass) + math.log1p(0.01) if inv.abs_mass > 0 else -math.inf
    terms: list[float] = []
    log_tail = math.inf
    k_limit = k_fixed if k_fixed is not None else cfg.k_max_hard
    for k in range(1, k_limit + 1):
        sign, lm = _log_moment(phi, k)
        lf = log_factor(k)
        if lm == -math.inf or lf == -math.inf:
            terms.append(0.0)
        else:
            terms.append(sign * math.exp(lf + lm - math.lgamma(k + 1)))
        log_tail = _log_tail(log_A, log_a, log_mass, k, half_factor)
        if k_fixed is None and log_tail <= math.log(cfg.tail_tol):
            break
    tail = math.exp(log_tail) if log_tail < 700 else math.inf
    if k_fixed is None and not tail <= cfg.tail_tol:
        raise TruncationFailure(
            f"tail bound {tail:.3e} above {cfg.tail_tol:.1e} after {len(terms)} terms", tail, len(terms)
        )
    value = math.fsum(terms)
    return SeriesResult(value, len(terms), tail, terms if cfg.record_terms else [])


def _p_log_factor(inv: _Invariants) -> Callable[[int], float] | None:
    v = math.sqrt(inv.l2) * inv.half
    if not v > 0:
        return None
    log_e = -1.0 / v  # log e(v)
    log_l2 = math.log(inv.l2)

    def log_factor(k: int) -> float:
        # log of g(y) * <phi|phi>^gamma_k with y = <phi|phi>^gamma_k e(v):
        # g(y) * y / e(v), and log(g(y) y) = 2 log y - log(1 + y^2).
        ly = gamma_k(k) * log_l2 + log_e
        if ly > 0:
            log_gy_y = -math.log1p(math.exp(-2 * ly))
        else:
            log_gy_y = 2 * ly - math.log1p(math.exp(2 * ly))
        return log_gy_y - log_e

    return log_factor


def eval_P(phi: TestFunction, cfg: SeriesEvalConfig = SeriesEvalConfig(), k_fixed: int | None = None) -> SeriesResult:
    """P(phi) with a certified tail bound (uses |g| <= 1/2)."""
    inv = _invariants(phi)
    lf = _p_log_factor(inv)
    if lf is None:
        # e(v) = 0 makes every g-factor g(0) = 0
        return SeriesResult(0.0, 0, 0.0)
    return _sum_series(phi, cfg, lf, True, inv, k_fixed)


def eval_Q(
    phi: TestFunction,
    cfg: SeriesEvalConfig = SeriesEvalConfig(),
    sigma: Callable[[float], float] = bump_sigma,
    k_fixed: int | None = None,
) -> SeriesResult:
    """Q(phi) with a certified tail bound (uses |h_k| <= 1)."""
    inv = _invariants(phi)
    z = inv.l2**1.5 * inv.half
    if z == 0:
        return SeriesResult(0.0, 0, 0.0)
    sgn_z = 1.0 if z > 0 else -1.0
    log_l2 = math.log(inv.l2)

    def log_factor(k: int) -> float:
        return _log_abs_h_k(k, z, sigma) + gamma_k(k) * log_l2

    res = _sum_series(phi, cfg, log_factor, False, inv, k_fixed)
    # h_k is odd: the sign of z multiplies every term
    if sgn_z < 0:
        res.value = -res.value
        res.terms = [-t for t in res.terms]
    return res


def as_representative(which: str = "P", cfg: SeriesEvalConfig = SeriesEvalConfig()) -> Representative:
    """P or Q as an x-independent representative."""
    if which == "P":
        return Representative(lambda phi, x: eval_P(phi, cfg).value, lambda phi, x, k: 0.0, "P")
    if which == "Q":
        return Representative(lambda phi, x: eval_Q(phi, cfg).value, lambda phi, x, k: 0.0, "Q")
    raise InvalidArgument("which must be 'P' or 'Q'")


# --------------------------------------------------------- experiments


def decay_mollifier(q: int, radius: float = 1.0, min_half: float = 0.05) -> TestFunction:
    """Generic A_q mollifier with half-moment > 0.

    If the half-moment is too small it is raised with an even direction from
    A_{q0}, which leaves moments 0..q untouched.
    """
    phi = make_Aq_generic(q, radius)
    h = half_moment(phi)
    target = min_half * math.sqrt(radius)
    if h <= target:
        phi = linear_combine([(1, phi), (target - h + target, make_half_moment_direction(q, radius))])
    return phi


@dataclass
class DecayRow:
    q: int
    eps: float
    value: float
    k_used: int
    tail_bound: float


@dataclass
class DecayResult:
    orders: dict[int, OrderEstimate]
    rows: list[DecayRow]
    functional: str

    def to_dict(self) -> dict:
        return {
            "functional": self.functional,
            "orders": {str(q): o.to_dict() for q, o in self.orders.items()},
        }


def experiment_decay(
    q_list: Sequence[int],
    eps_grid: Sequence[float] = DEFAULT_EPS_GRID,
    radius: float = 1.0,
    functional: str = "P",
    sigma: Callable[[float], float] = bump_sigma,
    cfg: SeriesEvalConfig = SeriesEvalConfig(),
) -> DecayResult:
    """Fitted eps-order of |F(S_eps phi_q)| for fixed A_q mollifiers phi_q."""
    orders: dict[int, OrderEstimate] = {}
    rows: list[DecayRow] = []
    for q in q_list:
        phi = decay_mollifier(q, radius)
        samples = []
        for eps in eps_grid:
            phi_eps = scale(phi, eps)
            res = eval_P(phi_eps, cfg) if functional == "P" else eval_Q(phi_eps, cfg, sigma)
            rows.append(DecayRow(q, eps, res.value, res.k_used, res.tail_bound))
            samples.append((eps, res.value))
        orders[q] = fit_order(samples)
    return DecayResult(orders, rows, functional)


def experiment_P_decay(
    q_list: Sequence[int], eps_grid: Sequence[float] = DEFAULT_EPS_GRID, radius: float = 1.0,
    cfg: SeriesEvalConfig = SeriesEvalConfig(),
) -> DecayResult:
    return experiment_decay(q_list, eps_grid, radius, "P", cfg=cfg)


def experiment_Q_decay(
    q_list: Sequence[int],
    eps_grid: Sequence[float] = DEFAULT_EPS_GRID,
    radius: float = 1.0,
    sigma: Callable[[float], float] = bump_sigma,
    cfg: SeriesEvalConfig = SeriesEvalConfig(),
) -> DecayResult:
    return experiment_decay(q_list, eps_grid, radius, "Q", sigma, cfg)


# ---------------------------------------------------------- witness


DEFAULT_T_GRID = tuple(geometric_grid(1.0, 10 ** (-3 / 299), 300))

# Witness members have <phi|phi> a up to ~25 (q <= 4), where the a^k int|phi|
# moment bound needs ~100 terms before the factorial wins.  The certificate is the
# same; only the cap moves.
WITNESS_CFG = SeriesEvalConfig(k_max_hard=200)


@dataclass
class WitnessReport:
    q: int
    t_grid: list[float]
    eps_grid: list[float]
    per_t_orders: list[OrderEstimate]
    per_t_asymptotic_orders: list[OrderEstimate]
    sup_order: OrderEstimate
    sup_rows: list[tuple[float, float, float]]
    gap: float
    exhibited: bool
    label: str = EXPLORATORY
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        finite = [o.exponent for o in self.per_t_asymptotic_orders if not o.saturated]
        return {
            "label": self.label,
            "q": self.q,
            "t_range": [min(self.t_grid), max(self.t_grid)],
            "n_t": len(self.t_grid),
            "eps_grid": list(self.eps_grid),
            "sup_order": self.sup_order.to_dict(),
            "min_per_t_asymptotic_order": min(finite) if finite else None,
            "max_per_t_asymptotic_order": max(finite) if finite else None,
            "min_per_t_order_on_grid": min(o.exponent for o in self.per_t_orders),
            "gap": self.gap,
            "non_uniformity_exhibited": self.exhibited,
            "warnings": list(self.warnings),
        }


def witness_family(q: int, radius: float = 1.0) -> tuple[TestFunction, TestFunction]:
    """(phi_base, eta) with phi_t = phi_base + t eta, t in (0, 1].

    phi_1 is the generic A_q mollifier and phi_base its projection to
    half-moment 0 along an even A_{q0} direction, so half_moment(phi_t) =
    t * half_moment(phi_1) and every member stays between the two endpoints.
    """
    phi = make_Aq_generic(q, radius)
    h = half_moment(phi)
    unit = make_half_moment_direction(q, radius)
    eta = linear_combine([(h / half_moment(unit), unit)])
    base = linear_combine([(1, phi), (-1, eta)])
    return base, eta


def _asymptotic_grid(phi: TestFunction, q: int, count: int = 8, y_min: float = 1e6) -> list[float]:
    # eps small enough that y_{q+1} = <phi_eps|phi_eps>^gamma e(v) >= y_min,
    # i.e. the member is in its eps -> 0 regime.
    inv = _invariants(phi)
    v = math.sqrt(inv.l2) * inv.half
    gam = gamma_k(q + 1)
    # log y = gam (log l2 - log eps) - 1/v >= log y_min
    log_eps = math.log(inv.l2) - (math.log(y_min) + 1.0 / v) / gam
    eps0 = min(1.0, math.exp(log_eps))
    return geometric_grid(eps0, 0.5, count)


def experiment_witness_search(
    q: int,
    t_grid: Sequence[float] = DEFAULT_T_GRID,
    eps_grid: Sequence[float] = DEFAULT_EPS_GRID,
    radius: float = 1.0,
    cfg: SeriesEvalConfig = WITNESS_CFG,
    required_gap: float = 0.5,
) -> WitnessReport:
    """Search for non-uniform decay of P over phi_t = phi_base + t eta.

    For every fixed t the decay is eventually of order q+1, but the constant
    blows up like 1/e(v(phi_t)) as t -> 0.  The report fits (a) each member
    on the configured grid and on a grid pushed into its own asymptotic
    regime, and (b) sup_t |P| on the configured grid.  The exhibit succeeds
    when (b) falls at least ``required_gap`` below the smallest asymptotic
    per-member order.
    """
    t_grid = sorted(float(t) for t in t_grid)
    if not t_grid or t_grid[0] <= 0 or t_grid[-1] > 1:
        raise InvalidArgument("t values must lie in (0, 1]")
    base, eta = witness_family(q, radius)
    members = [linear_combine([(1, base), (t, eta)]) for t in t_grid]
    fam = certify_family([members[0], members[-1]], derivative_order=1, label="witness")
    # phi_t is affine in t, so bounds at the endpoints bound every member.
    if not fam.check():
        raise InvalidArgument("witness family failed boundedness certification")

    per_t, per_t_asym = [], []
    table = np.zeros((len(members), len(eps_grid)))
    for i, phi in enumerate(members):
        vals = [eval_P(scale(phi, eps), cfg).value for eps in eps_grid]
        table[i] = np.abs(vals)
        per_t.append(fit_order(zip(eps_grid, vals)))
        agrid = _asymptotic_grid(phi, q)
        per_t_asym.append(fit_order((e, eval_P(scale(phi, e), cfg).value) for e in agrid))
    sups = table.max(axis=0)
    arg = table.argmax(axis=0)
    sup_order = fit_order(zip(eps_grid, sups))
    finite = [o.exponent for o in per_t_asym if not o.saturated]
    warnings = []
    if not finite:
        warnings.append("no member produced a finite asymptotic order")
    gap = (min(finite) - sup_order.exponent) if finite else math.nan
    exhibited = bool(finite) and gap >= required_gap
    if not exhibited:
        warnings.append(f"sup-order gap {gap:.3f} below required {required_gap}")
    return WitnessReport(
        q=q,
        t_grid=t_grid,
        eps_grid=list(eps_grid),
        per_t_orders=per_t,
        per_t_asymptotic_orders=per_t_asym,
        sup_order=sup_order,
        sup_rows=[(eps, float(s), t_grid[j]) for eps, s, j in zip(eps_grid, sups, arg)],
        gap=gap,
        exhibited=exhibited,
        warnings=warnings,
    )
