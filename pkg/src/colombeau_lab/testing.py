"""Numerical moderateness and negligibility tests.

Representatives are evaluated in the C-formalism: ``R(phi, x)`` with phi
centered at the origin, and ``R_eps(phi, x) = R(S_eps phi, x)``.  Every
"for all bounded B" is replaced by the finite families handed in, every
"for all x in K" by an equispaced sample of K, and every O(eps^n) by a
fitted exponent over an eps-grid.  Reports carry the family label so that
their claims stay tied to what was actually tested.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from . import numerics
from .exceptions import InvalidArgument, PreconditionViolation
from .numerics import DEFAULT_EPS_GRID, HP, HP_FLOOR, OrderEstimate, fit_order, sup_abs
from .testobjects import (
    MASS_TOL,
    BoundedFamily,
    TestFunction,
    exact_moment,
    linear_combine,
    scale,
)

ORDER_TOLERANCE = 0.25
DEFAULT_X_SAMPLES = 33
DEFAULT_N_MAX = 10
GATEAUX_STEPS = (1e-2, 5e-3, 2.5e-3)


def fd_step(x) -> float:
    return 1e-4 * (1 + abs(float(x)))


def _central_difference(f: Callable, x, order: int, h):
    # Second-order central stencil for the order-th derivative.
    total = 0
    for i in range(order + 1):
        total += (-1) ** i * math.comb(order, i) * f(x + (HP.mpf(order) / 2 - i) * h)
    return total / h**order


@dataclass(frozen=True)
class Representative:
    """A map (phi, x) -> number, optionally with analytic x-derivatives."""

    eval: Callable[[TestFunction, Any], Any]
    analytic_dx: Callable[[TestFunction, Any, int], Any] | None = None
    label: str = "R"
    domain: tuple[float, float] = (-math.inf, math.inf)

    def __call__(self, phi: TestFunction, x) -> Any:
        return self.eval(phi, x)

    def dx(self, phi: TestFunction, x, order: int = 1):
        """x-derivative: analytic when available, else central differences."""
        if order == 0:
            return self.eval(phi, x)
        if self.analytic_dx is not None:
            return self.analytic_dx(phi, x, order)
        h = HP.mpf(fd_step(x))
        return _central_difference(lambda y: self.eval(phi, y), HP.mpf(x), order, h)

    def derivative(self, order: int) -> "Representative":
        if order == 0:
            return self
        return Representative(lambda phi, x: self.dx(phi, x, order), None, f"d^{order}/dx^{order} {self.label}", self.domain)

    def __add__(self, other: "Representative") -> "Representative":
        dx = None
        if self.analytic_dx and other.analytic_dx:
            dx = lambda phi, x, k: self.analytic_dx(phi, x, k) + other.analytic_dx(phi, x, k)
        return Representative(
            lambda phi, x: self.eval(phi, x) + other.eval(phi, x), dx, f"({self.label} + {other.label})", _meet(self, other)
        )

    def __neg__(self) -> "Representative":
        dx = None
        if self.analytic_dx:
            dx = lambda phi, x, k: -self.analytic_dx(phi, x, k)
        return Representative(lambda phi, x: -self.eval(phi, x), dx, f"-{self.label}", self.domain)

    def __sub__(self, other: "Representative") -> "Representative":
        rep = self + (-other)
        return Representative(rep.eval, rep.analytic_dx, f"({self.label} - {other.label})", rep.domain)

    def __mul__(self, other: "Representative") -> "Representative":
        dx = None
        if self.analytic_dx and other.analytic_dx:

            def dx(phi, x, k):
                # Leibniz rule
                return sum(
                    math.comb(k, i) * self.dx(phi, x, i) * other.dx(phi, x, k - i) for i in range(k + 1)
                )

        return Representative(
            lambda phi, x: self.eval(phi, x) * other.eval(phi, x), dx, f"{self.label}*{other.label}", _meet(self, other)
        )


def _meet(a: Representative, b: Representative) -> tuple[float, float]:
    return (max(a.domain[0], b.domain[0]), min(a.domain[1], b.domain[1]))


ZERO = Representative(lambda phi, x: HP.zero, lambda phi, x, k: HP.zero, "0")


def check_mass(phi: TestFunction, tol: float = MASS_TOL) -> None:
    if abs(exact_moment(phi, 0) - 1) > tol:
        raise InvalidArgument("test function must have unit mass")


def eval_scaled(R: Representative, phi: TestFunction, eps: float, x) -> Any:
    """R_eps(phi, x) = R(S_eps phi, x)."""
    if not eps > 0:
        raise InvalidArgument("eps must be positive")
    check_mass(phi)
    return R(scale(phi, eps), x)


def x_grid(K: Sequence[float], samples: int) -> list[float]:
    a, b = K
    if not a <= b:
        raise InvalidArgument("K must be an interval [a, b] with a <= b")
    if samples < 1:
        raise InvalidArgument("need at least one x sample")
    if samples == 1 or a == b:
        return [0.5 * (a + b)]
    return [float(v) for v in np.linspace(a, b, samples)]


def _sup_sweep(
    R: Representative, members: Sequence[TestFunction], eps_grid: Sequence[float], xs: Sequence[float]
) -> list:
    """sup over (member, x) of |R_eps| for each eps, reduced in a fixed order."""
    sups = []
    for eps in eps_grid:
        vals = []
        for phi in members:
            check_mass(phi)
            phi_eps = scale(phi, eps)
            vals.extend(R(phi_eps, x) for x in xs)
        sups.append(sup_abs(vals))
    return sups


def _as_float(v) -> float:
    try:
        return float(v)
    except (OverflowError, TypeError):
        return float(abs(complex(v)))


# ---------------------------------------------------------------- reports


@dataclass
class NegligibilityReport:
    K: tuple[float, float]
    n_target: int
    family_id: str
    q_found: int | None
    per_q_orders: dict[int, OrderEstimate]
    verdict: bool
    rows: list[tuple[int, float, float]] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    order_tolerance: float = ORDER_TOLERANCE
    label: str = ""

    def to_dict(self) -> dict:
        return {
            "representative": self.label,
            "K": list(self.K),
            "n_target": self.n_target,
            "family_id": self.family_id,
            "q_found": self.q_found,
            "per_q_orders": {str(q): o.to_dict() for q, o in self.per_q_orders.items()},
            "verdict": "pass" if self.verdict else "fail",
            "order_tolerance": self.order_tolerance,
            "warnings": list(self.warnings),
            "caveat": BoundedFamily.CAVEAT,
        }


@dataclass
class DerivativeNegligibilityReport:
    per_order: dict[int, NegligibilityReport]
    verdict: bool

    def to_dict(self) -> dict:
        return {
            "per_order": {str(a): r.to_dict() for a, r in self.per_order.items()},
            "verdict": "pass" if self.verdict else "fail",
        }


@dataclass
class ModerateReport:
    order: OrderEstimate
    moderate: bool
    n_max: int
    family_id: str
    rows: list[tuple[float, float]] = field(default_factory=list)
    label: str = ""

    def to_dict(self) -> dict:
        return {
            "representative": self.label,
            "order": self.order.to_dict(),
            "moderate": self.moderate,
            "n_max": self.n_max,
            "family_id": self.family_id,
            "caveat": BoundedFamily.CAVEAT,
        }


def _family_id(families: Sequence[BoundedFamily]) -> str:
    return "+".join(f.label for f in families)


# ----------------------------------------------------------------- tests


def test_negligible_c0(
    R: Representative,
    K: Sequence[float],
    n: int,
    families: Sequence[BoundedFamily],
    q_range: Sequence[int],
    eps_grid: Sequence[float] = DEFAULT_EPS_GRID,
    x_samples: int = DEFAULT_X_SAMPLES,
    order_tolerance: float = ORDER_TOLERANCE,
    floor: float = HP_FLOOR,
) -> NegligibilityReport:
    """Condition (0): some q makes sup |R_eps| = O(eps^n) over A_q members and K."""
    q_lo, q_hi = q_range
    xs = x_grid(K, x_samples)
    per_q: dict[int, OrderEstimate] = {}
    rows: list[tuple[int, float, float]] = []
    warnings: list[str] = []
    q_found = None
    for q in range(q_lo, q_hi + 1):
        members = [m for fam in families for m in fam.select(q)]
        if not members:
            warnings.append(f"no family member certified in A_{q}; q = {q} skipped")
            continue
        sups = _sup_sweep(R, members, eps_grid, xs)
        est = fit_order(zip(eps_grid, sups), floor=floor)
        per_q[q] = est
        rows.extend((q, eps, _as_float(s)) for eps, s in zip(eps_grid, sups))
        if q_found is None and est.exponent >= n - order_tolerance:
            q_found = q
    return NegligibilityReport(
        K=(float(K[0]), float(K[1])),
        n_target=n,
        family_id=_family_id(families),
        q_found=q_found,
        per_q_orders=per_q,
        verdict=q_found is not None,
        rows=rows,
        warnings=warnings,
        order_tolerance=order_tolerance,
        label=R.label,
    )


# pytest would otherwise collect these as tests
test_negligible_c0.__test__ = False


def test_negligible_c1(
    R: Representative,
    K: Sequence[float],
    alpha_max: int,
    n: int,
    families: Sequence[BoundedFamily],
    q_range: Sequence[int],
    eps_grid: Sequence[float] = DEFAULT_EPS_GRID,
    x_samples: int = DEFAULT_X_SAMPLES,
    order_tolerance: float = ORDER_TOLERANCE,
    floor: float = HP_FLOOR,
) -> DerivativeNegligibilityReport:
    """Condition (1): condition (0) for every x-derivative up to alpha_max."""
    per_order = {
        a: test_negligible_c0(
            R.derivative(a), K, n, families, q_range, eps_grid, x_samples, order_tolerance, floor
        )
        for a in range(alpha_max + 1)
    }
    return DerivativeNegligibilityReport(per_order, all(r.verdict for r in per_order.values()))


test_negligible_c1.__test__ = False


def _check_directions(directions: Sequence[TestFunction]) -> None:
    for psi in directions:
        if abs(exact_moment(psi, 0)) > MASS_TOL:
            raise InvalidArgument("directions must have zero mass")


def _richardson(values: Sequence, ratio: float = 2.0, power: int = 2):
    # values[i] computed at step t0 / ratio^i with error series in t^power, t^(2 power), ...
    table = list(values)
    p = power
    while len(table) > 1:
        f = ratio**p
        table = [(f * table[i + 1] - table[i]) / (f - 1) for i in range(len(table) - 1)]
        p += power
    return table[0]


def directional_d1(
    R: Representative,
    phi: TestFunction,
    directions: Sequence[TestFunction],
    x,
    k: int = 1,
    steps: Sequence[float] = GATEAUX_STEPS,
):
    """k-th Gateaux derivative of R in the phi-slot (k = 1 or 2).

    Central differences in t with Richardson extrapolation over ``steps``
    (each half the previous).  For k = 2 with a single direction the
    direction is used twice.
    """
    if k not in (1, 2):
        raise InvalidArgument("only k = 1 and k = 2 are supported")
    if not directions:
        raise InvalidArgument("at least one direction is required")
    _check_directions(directions)
    if k == 1:
        psi = directions[0]

        def quotient(t):
            t = HP.mpf(t)
            plus = R(linear_combine([(1, phi), (t, psi)]), x)
            minus = R(linear_combine([(1, phi), (-t, psi)]), x)
            return (plus - minus) / (2 * t)

    else:
        psi1 = directions[0]
        psi2 = directions[1] if len(directions) > 1 else directions[0]

        def quotient(t):
            t = HP.mpf(t)
            total = 0
            for s1, s2, sign in ((1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1)):
                total += sign * R(linear_combine([(1, phi), (s1 * t, psi1), (s2 * t, psi2)]), x)
            return total / (4 * t * t)

    return _richardson([quotient(t) for t in steps])


def test_moderate(
    R: Representative,
    K: Sequence[float],
    families: Sequence[BoundedFamily],
    eps_grid: Sequence[float] = DEFAULT_EPS_GRID,
    x_samples: int = DEFAULT_X_SAMPLES,
    n_max: int = DEFAULT_N_MAX,
    floor: float = HP_FLOOR,
) -> ModerateReport:
    """Growth exponent of sup |R_eps| over A_0 members and K.

    Moderate iff the fitted exponent is >= -n_max.
    """
    members = [m for fam in families for m in fam.select(0)]
    if not members:
        raise InvalidArgument("no family member has unit mass")
    xs = x_grid(K, x_samples)
    sups = _sup_sweep(R, members, eps_grid, xs)
    est = fit_order(zip(eps_grid, sups), floor=floor)
    return ModerateReport(
        order=est,
        moderate=est.exponent >= -n_max,
        n_max=n_max,
        family_id=_family_id(families),
        rows=[(eps, _as_float(s)) for eps, s in zip(eps_grid, sups)],
        label=R.label,
    )


test_moderate.__test__ = False


# ------------------------------------------------------ Landau argument


@dataclass
class LandauReport:
    n: int
    q: int
    N: int
    second_derivative_order: OrderEstimate
    quotient_order: OrderEstimate
    remainder_order: OrderEstimate
    dx_order: OrderEstimate
    quotient_bound: float
    remainder_predicted: float
    c0: NegligibilityReport
    moderate: ModerateReport
    rows: list[tuple[float, float, float, float]] = field(default_factory=list)

    @property
    def quotient_ok(self) -> bool:
        return self.quotient_order.exponent >= self.quotient_bound - ORDER_TOLERANCE

    @property
    def dx_ok(self) -> bool:
        return self.dx_order.exponent >= self.n - ORDER_TOLERANCE

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "q": self.q,
            "N": self.N,
            "step": f"eps^{self.n + self.N}",
            "second_derivative_order": self.second_derivative_order.to_dict(),
            "difference_quotient": {
                "order": self.quotient_order.to_dict(),
                "guaranteed_at_least": self.quotient_bound,
                "ok": self.quotient_ok,
            },
            "remainder": {
                "order": self.remainder_order.to_dict(),
                "predicted": self.remainder_predicted,
            },
            "finite_difference_dx": {"order": self.dx_order.to_dict(), "ok": self.dx_ok},
            "c0": self.c0.to_dict(),
            "moderate": self.moderate.to_dict(),
        }


def demo_c0_implies_c1(
    R: Representative,
    K: Sequence[float],
    n: int,
    q: int,
    families: Sequence[BoundedFamily],
    eps_grid: Sequence[float] = DEFAULT_EPS_GRID,
    x_samples: int = DEFAULT_X_SAMPLES,
    floor: float = HP_FLOOR,
) -> LandauReport:
    """Evaluate the two-term decomposition behind (0) => (1).

    With ``h = eps^(n+N)``, where eps^-N bounds the second x-derivative,

        d/dx R_eps(x) = (R_eps(x+h) - R_eps(x)) / h  -  1/2 R_eps''(x_theta) h.

    The first term is O(eps^n) whenever R_eps = O(eps^(2n+N)); the second is
    O(eps^(n+N)) times the second-derivative size.  Both terms and a plain
    central difference in x (step proportional to eps) are measured and fitted.
    """
    c0 = test_negligible_c0(R, K, n, families, (q, q), eps_grid, x_samples, floor=floor)
    if not c0.verdict:
        raise PreconditionViolation("R fails the (0) negligibility test", c0)
    mod = test_moderate(R, K, families, eps_grid, x_samples, floor=floor)
    if not mod.moderate:
        raise PreconditionViolation("R fails the moderateness test", mod)

    members = [m for fam in families for m in fam.select(q)]
    xs = x_grid(K, x_samples)
    d2_sups, t1_sups, t2_sups, dx_sups = [], [], [], []
    for eps in eps_grid:
        scaled = [scale(m, eps) for m in members]
        d2_sups.append(sup_abs([R.dx(p, x, 2) for p in scaled for x in xs]))
    d2_order = fit_order(zip(eps_grid, d2_sups), floor=floor)
    N = 0 if d2_order.saturated else max(0, math.ceil(-d2_order.exponent - ORDER_TOLERANCE))
    rows = []
    for eps, d2 in zip(eps_grid, d2_sups):
        h = HP.mpf(eps) ** (n + N)
        scaled = [scale(m, eps) for m in members]
        t1, t2, dx = [], [], []
        for p in scaled:
            for x in xs:
                xh = HP.mpf(x)
                t1.append((R(p, xh + h) - R(p, xh)) / h)
                t2.append(R.dx(p, xh, 2) * h / 2)
                # plain finite difference, independent of any analytic derivative
                hfd = HP.mpf(fd_step(x)) * eps
                dx.append(_central_difference(lambda y: R(p, y), xh, 1, hfd))
        t1_sups.append(sup_abs(t1))
        t2_sups.append(sup_abs(t2))
        dx_sups.append(sup_abs(dx))
        rows.append((eps, _as_float(t1_sups[-1]), _as_float(t2_sups[-1]), _as_float(dx_sups[-1])))
    t1_order = fit_order(zip(eps_grid, t1_sups), floor=floor)
    t2_order = fit_order(zip(eps_grid, t2_sups), floor=floor)
    dx_order = fit_order(zip(eps_grid, dx_sups), floor=floor)
    predicted = math.inf if d2_order.saturated else n + N + d2_order.exponent
    return LandauReport(
        n=n,
        q=q,
        N=N,
        second_derivative_order=d2_order,
        quotient_order=t1_order,
        remainder_order=t2_order,
        dx_order=dx_order,
        quotient_bound=float(n),
        remainder_predicted=predicted,
        c0=c0,
        moderate=mod,
        rows=rows,
    )
