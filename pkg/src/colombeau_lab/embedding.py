"""Embeddings of smooth functions and distributions as representatives.

Convention (C-formalism): ``iota(f)(phi, x) = int f(x + xi) phi(xi) dxi`` and
``sigma(f)(phi, x) = f(x)``.  For even mollifiers the sign of xi is
immaterial; non-even ones pin it.

Smooth functions are passed as callables on high-precision numbers
(:data:`numerics.HP`); :func:`named_function` supplies the common ones with
their derivatives.  ``iota(f) - sigma(f)`` is O(eps^(q+1)) and is only
visible above the cancellation noise because the convolution runs at working
precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

from . import numerics
from .exceptions import DomainError, InvalidArgument
from .numerics import DEFAULT_EPS_GRID, HP, HP_FLOOR, OrderEstimate, fit_order
from .testing import Representative, _sup_sweep, x_grid
from .testobjects import TestFunction, exact_moment, make_Aq_generic

Interval = tuple[float, float]
WHOLE_LINE: Interval = (-math.inf, math.inf)


@dataclass(frozen=True)
class SmoothFunction:
    """A smooth function on HP numbers with an optional derivative table."""

    name: str
    f: Callable
    nth_derivative: Callable[[int], Callable] | None = None

    def __call__(self, y):
        return self.f(y)


def _poly(coeffs: Sequence[float]) -> SmoothFunction:
    cs = [HP.mpf(c) for c in coeffs]

    def deriv(n: int) -> Callable:
        dc = list(cs)
        for _ in range(n):
            dc = [k * c for k, c in enumerate(dc)][1:] or [HP.zero]
        return lambda y: HP.polyval(list(reversed(dc)), y)

    name = "poly:" + ",".join(f"{float(c):g}" for c in coeffs)
    return SmoothFunction(name, deriv(0), deriv)


_NAMED = {
    "sin": SmoothFunction("sin", HP.sin, lambda n: lambda y: HP.sin(y + n * HP.pi / 2)),
    "cos": SmoothFunction("cos", HP.cos, lambda n: lambda y: HP.cos(y + n * HP.pi / 2)),
    "exp": SmoothFunction("exp", HP.exp, lambda n: HP.exp),
    "x": _poly([0, 1]),
    "x^2": _poly([0, 0, 1]),
    "x^3": _poly([0, 0, 0, 1]),
}


def named_function(name: str) -> SmoothFunction:
    """``sin``, ``cos``, ``exp``, ``x``, ``x^2``, ``x^3`` or ``poly:c0,c1,...``."""
    if name in _NAMED:
        return _NAMED[name]
    if name.startswith("poly:"):
        try:
            return _poly([float(c) for c in name[5:].split(",")])
        except ValueError:
            raise InvalidArgument(f"bad polynomial spec {name!r}") from None
    raise InvalidArgument(f"unknown function {name!r}; known: {sorted(_NAMED)} or poly:c0,c1,...")


def product(f1: Callable, f2: Callable) -> SmoothFunction:
    def deriv(n: int) -> Callable:
        d1 = getattr(f1, "nth_derivative", None)
        d2 = getattr(f2, "nth_derivative", None)
        return lambda y: sum(math.comb(n, i) * d1(i)(y) * d2(n - i)(y) for i in range(n + 1))

    has = getattr(f1, "nth_derivative", None) and getattr(f2, "nth_derivative", None)
    name = f"{getattr(f1, 'name', 'f1')}*{getattr(f2, 'name', 'f2')}"
    return SmoothFunction(name, lambda y: f1(y) * f2(y), deriv if has else None)


def _label(f) -> str:
    return getattr(f, "name", getattr(f, "__name__", "f"))


def const_embed(f: Callable, domain: Interval = WHOLE_LINE) -> Representative:
    """sigma(f): R(phi, x) = f(x), whatever phi is."""
    nth = getattr(f, "nth_derivative", None)
    dx = (lambda phi, x, k: nth(k)(HP.mpf(x))) if nth else None
    return Representative(lambda phi, x: f(HP.mpf(x)), dx, f"sigma({_label(f)})", domain)


def _check_domain(phi: TestFunction, x, domain: Interval) -> None:
    r = phi.support_radius
    if float(x) - r < domain[0] or float(x) + r > domain[1]:
        raise DomainError(f"x = {float(x)} with support radius {r} leaves the domain {domain}")


def embed_smooth(f: Callable, domain: Interval = WHOLE_LINE) -> Representative:
    """iota(f): R(phi, x) = int f(x + xi) phi(xi) dxi at working precision."""

    def conv(g: Callable) -> Callable:
        def ev(phi: TestFunction, x):
            _check_domain(phi, x, domain)
            x = HP.mpf(x)
            return phi.hp_integrate(lambda xi: g(x + xi))

        return ev

    nth = getattr(f, "nth_derivative", None)
    dx = (lambda phi, x, k: conv(nth(k))(phi, x)) if nth else None
    return Representative(conv(f), dx, f"iota({_label(f)})", domain)


def embed_locally_integrable(
    f: Callable[[float], float], kinks: Sequence[float] = (), domain: Interval = WHOLE_LINE, label: str = "f"
) -> Representative:
    """iota(f) for a locally integrable f (double precision, split at kinks).

    ``f`` takes float arrays.  Panels are split at each kink so no panel
    straddles a point of non-smoothness.
    """

    def ev(phi: TestFunction, x):
        _check_domain(phi, x, domain)
        x = float(x)
        r = phi.support_radius
        cuts = sorted({-r, r, *[k - x for k in kinks if -r < k - x < r]})
        return sum(
            numerics.integrate(lambda xi: f(x + xi) * phi(xi), a, b)
            for a, b in zip(cuts[:-1], cuts[1:])
        )

    return Representative(ev, None, f"iota({label})", domain)


def embed_delta() -> Representative:
    """iota(delta): R(phi, x) = phi(-x)."""
    return Representative(lambda phi, x: phi.hp_value(-HP.mpf(x)), None, "iota(delta)")


def embed_vk(k: int) -> Representative:
    """iota(v_k) with <v_k, phi> = int xi^k phi: R(phi, x) = int (x + xi)^k phi(xi) dxi."""
    if k < 0:
        raise InvalidArgument("k must be nonnegative")

    def ev(phi: TestFunction, x):
        x = HP.mpf(x)
        return HP.fsum(math.comb(k, j) * x ** (k - j) * exact_moment(phi, j) for j in range(k + 1))

    return Representative(ev, None, f"iota(v_{k})")


# ------------------------------------------------------------ checks


def _sweep_order(
    R: Representative,
    mollifier: TestFunction,
    eps_grid: Sequence[float],
    K: Interval,
    x_samples: int,
    floor: float,
) -> tuple[OrderEstimate, list]:
    sups = _sup_sweep(R, [mollifier], eps_grid, x_grid(K, x_samples))
    return fit_order(zip(eps_grid, sups), floor=floor), sups


def check_iota_sigma(
    f: Callable,
    q: int,
    eps_grid: Sequence[float] = DEFAULT_EPS_GRID,
    K: Interval = (-1.0, 1.0),
    x_samples: int = 9,
    mollifier: TestFunction | None = None,
    floor: float = HP_FLOOR,
) -> OrderEstimate:
    """Fitted eps-order of sup_K |iota(f) - sigma(f)| along S_eps of an A_q mollifier.

    The default mollifier is :func:`make_Aq_generic`, whose (q+1)-th moment
    is nonzero, so the expected order for non-polynomial f is q + 1.
    """
    phi = mollifier if mollifier is not None else make_Aq_generic(q)
    R = embed_smooth(f) - const_embed(f)
    return _sweep_order(R, phi, eps_grid, K, x_samples, floor)[0]


def check_product(
    f1: Callable,
    f2: Callable,
    q: int,
    eps_grid: Sequence[float] = DEFAULT_EPS_GRID,
    K: Interval = (-1.0, 1.0),
    x_samples: int = 9,
    mollifier: TestFunction | None = None,
    floor: float = HP_FLOOR,
) -> OrderEstimate:
    """Fitted eps-order of sup_K |iota(f1) iota(f2) - iota(f1 f2)|."""
    phi = mollifier if mollifier is not None else make_Aq_generic(q)
    R = embed_smooth(f1) * embed_smooth(f2) - embed_smooth(product(f1, f2))
    return _sweep_order(R, phi, eps_grid, K, x_samples, floor)[0]
