"""Test functions, mollifiers with vanishing moments, and test-object paths.

A :class:`TestFunction` is kept symbolically as

    phi(xi) = amplitude / scale * sum_t p_t(xi / scale) * bump_{a_t}(xi / scale)

with ``bump_a(xi) = exp(-1 / (1 - (xi/a)^2))`` on ``|xi| < a``.  Coefficients
are high-precision numbers (:data:`numerics.HP`); moment constraints are
imposed against the discrete high-precision rule, so the structural moments
returned by :func:`exact_moment` vanish to working precision.  Everything a
user would call "the moment" (:func:`moment`, :func:`l2_inner`, ...) is an
ordinary double-precision quadrature of the evaluator and serves as the
independent check.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from functools import cached_property, lru_cache
from typing import Callable, Iterable, Sequence

import numpy as np
from numpy.polynomial import Polynomial

from . import numerics
from .classification import TypeTag
from .exceptions import ConstructionFailure, InvalidArgument
from .numerics import HP, WORKING_DPS

MAX_Q = 12
# Largest Hankel condition number accepted; beyond it the float evaluator of
# the solved mollifier loses the 1e-8 moment accuracy.
MAX_CONDITION = 1e13
MASS_TOL = 1e-8


# ------------------------------------------------------------------ bump


def bump(u):
    """exp(-1/(1-u^2)) on |u| < 1, zero elsewhere (vectorized)."""
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    inside = np.abs(u) < 1.0
    ui = u[inside]
    out[inside] = np.exp(-1.0 / (1.0 - ui * ui))
    return out if out.ndim else float(out)


def _hp_bump(u):
    if abs(u) >= 1:
        return HP.zero
    return HP.exp(-1 / (1 - u * u))


@lru_cache(maxsize=None)
def _bump_numerator(m: int) -> Polynomial:
    # d^m/du^m bump(u) = N_m(u) / (1-u^2)^(2m) * bump(u)
    if m == 0:
        return Polynomial([1.0])
    prev = _bump_numerator(m - 1)
    e = 2 * (m - 1)
    u = Polynomial([0.0, 1.0])
    d = Polynomial([1.0, 0.0, -1.0])
    return prev.deriv() * d * d + 2 * e * u * prev * d - 2 * u * prev


def bump_derivative(u, m: int):
    """m-th derivative of :func:`bump`, evaluated without 0*inf overflow."""
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    inside = np.abs(u) < 1.0
    ui = u[inside]
    d = 1.0 - ui * ui
    out[inside] = _bump_numerator(m)(ui) * np.exp(-1.0 / d - 2 * m * np.log(d))
    return out if out.ndim else float(out)


@lru_cache(maxsize=None)
def _hp_nodes() -> tuple[tuple, tuple, tuple]:
    xs, ws = numerics.hp_rule()
    return xs, ws, tuple(_hp_bump(x) for x in xs)


_BUMP_MOMENTS: list = []


def bump_moment(n: int):
    """B_n = sum_i w_i u_i^n bump(u_i): the discrete-rule moment on [-1, 1]."""
    if n >= len(_BUMP_MOMENTS):
        xs, ws, bs = _hp_nodes()
        for k in range(len(_BUMP_MOMENTS), n + 1):
            _BUMP_MOMENTS.append(
                HP.zero if k % 2 else HP.fsum(w * b * x**k for x, w, b in zip(xs, ws, bs))
            )
    return _BUMP_MOMENTS[n]


@lru_cache(maxsize=None)
def _bump_half_moment(n: int) -> float:
    # int |u|^(1/2) u^n bump(u) du; substitute u = +-t^2 to remove the kink.
    if n % 2:
        return 0.0
    return 2.0 * numerics.integrate(lambda t: 2 * t**2 * t ** (2 * n) * bump(t * t), 0.0, 1.0)


# ---------------------------------------------------------- test function


@dataclass(frozen=True)
class Term:
    """p(xi) * bump(xi / radius) with p given by ascending coefficients."""

    radius: float
    coeffs: tuple

    def __post_init__(self):
        if not self.radius > 0:
            raise InvalidArgument("support radius must be positive")
        object.__setattr__(self, "coeffs", tuple(HP.mpf(c) for c in self.coeffs))


@dataclass(frozen=True)
class TestFunction:
    terms: tuple[Term, ...]
    scale: float = 1.0
    amplitude: float = 1.0

    __test__ = False  # not a pytest class

    @property
    def support_radius(self) -> float:
        return self.scale * max(t.radius for t in self.terms)

    @property
    def coeffs(self) -> tuple:
        if len(self.terms) != 1:
            raise InvalidArgument("coeffs is only defined for single-term functions")
        return self.terms[0].coeffs

    @cached_property
    def _float_terms(self) -> tuple:
        return tuple((t.radius, np.array([float(c) for c in t.coeffs])) for t in self.terms)

    def __call__(self, xi):
        """Evaluate phi at ``xi`` (scalar or array) in double precision."""
        y = np.asarray(xi, dtype=float) / self.scale
        total = np.zeros_like(y)
        for a, c in self._float_terms:
            total = total + np.polynomial.polynomial.polyval(y, c) * bump(y / a)
        total = total * (self.amplitude / self.scale)
        return total if total.ndim else float(total)

    evaluator = __call__

    def derivative(self, xi, order: int):
        """d^order phi / dxi^order, from the analytic bump derivatives."""
        if order == 0:
            return self(xi)
        y = np.asarray(xi, dtype=float) / self.scale
        total = np.zeros_like(y)
        for a, c in self._float_terms:
            p = Polynomial(c)
            for i in range(order + 1):
                pi = p.deriv(i) if i else p
                total = total + (
                    math.comb(order, i) * pi(y) * a ** -(order - i) * bump_derivative(y / a, order - i)
                )
        total = total * (self.amplitude / self.scale ** (order + 1))
        return total if total.ndim else float(total)

    def hp_value(self, xi):
        """phi(xi) at working precision."""
        y = HP.mpf(xi) / self.scale
        total = HP.zero
        for t in self.terms:
            b = _hp_bump(y / t.radius)
            if b:
                total += HP.polyval(list(reversed(t.coeffs)), y) * b
        return total * HP.mpf(self.amplitude) / self.scale

    @cached_property
    def hp_quadrature(self) -> tuple[tuple, tuple]:
        """(nodes xi_i, weights W_i) with int F(xi) phi(xi) dxi ~ sum W_i F(xi_i).

        Built from the discrete rule the mollifier constraints were solved
        against, so polynomial moments are reproduced exactly.
        """
        xs, ws, bs = _hp_nodes()
        amp = HP.mpf(self.amplitude)
        s = HP.mpf(self.scale)
        nodes, weights = [], []
        for t in self.terms:
            a = HP.mpf(t.radius)
            rc = list(reversed(t.coeffs))
            for u, w, b in zip(xs, ws, bs):
                if b == 0:
                    continue
                nodes.append(s * a * u)
                weights.append(amp * a * w * b * HP.polyval(rc, a * u))
        return tuple(nodes), tuple(weights)

    def hp_integrate(self, F: Callable):
        """int F(xi) phi(xi) dxi with the high-precision rule; F takes HP numbers."""
        nodes, weights = self.hp_quadrature
        return HP.fdot(weights, [F(x) for x in nodes])

    def flatten(self) -> "TestFunction":
        """Equivalent function with scale = amplitude = 1 (radii and coefficients absorb them)."""
        if self.scale == 1.0 and self.amplitude == 1.0:
            return self
        s = HP.mpf(self.scale)
        amp = HP.mpf(self.amplitude)
        terms = tuple(
            Term(t.radius * self.scale, tuple(amp * c / s ** (j + 1) for j, c in enumerate(t.coeffs)))
            for t in self.terms
        )
        return TestFunction(terms)

    # --- serialization

    def to_dict(self) -> dict:
        def term_dict(t: Term) -> dict:
            return {
                "radius": t.radius,
                "coeffs": [float(c) for c in t.coeffs],
                "coeffs_hp": [HP.nstr(c, WORKING_DPS + 6) for c in t.coeffs],
            }

        if len(self.terms) == 1:
            d = term_dict(self.terms[0])
        else:
            d = {"terms": [term_dict(t) for t in self.terms]}
        d["scale"] = self.scale
        d["amplitude"] = self.amplitude
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, d: dict) -> "TestFunction":
        def term(td: dict) -> Term:
            coeffs = td.get("coeffs_hp") or td["coeffs"]
            return Term(float(td["radius"]), tuple(HP.mpf(c) for c in coeffs))

        raw = d["terms"] if "terms" in d else [d]
        return cls(
            tuple(term(t) for t in raw),
            scale=float(d.get("scale", 1.0)),
            amplitude=float(d.get("amplitude", 1.0)),
        )

    @classmethod
    def from_json(cls, text: str) -> "TestFunction":
        return cls.from_dict(json.loads(text))


def zero_function(radius: float = 1.0) -> TestFunction:
    return TestFunction((Term(radius, (0,)),))


# ------------------------------------------------------- construction


def make_bump(radius: float) -> TestFunction:
    if not radius > 0:
        raise InvalidArgument("radius must be positive")
    return TestFunction((Term(float(radius), (1,)),))


def _solve_moment_system(rows: Sequence[int], degree: int, rhs: Sequence) -> tuple[list, float]:
    # Unknowns: c_0..c_degree of p(u) on the unit bump; equation r reads
    # sum_k c_k B_{r+k} = rhs_r.
    M = HP.matrix([[bump_moment(r + k) for k in range(degree + 1)] for r in rows])
    b = HP.matrix([HP.mpf(v) for v in rhs])
    try:
        Minv = HP.inverse(M)
    except ZeroDivisionError:
        raise ConstructionFailure("moment system is singular", math.inf) from None
    cond = float(HP.mnorm(M, 1) * HP.mnorm(Minv, 1))
    c = HP.lu_solve(M, b)
    return [c[i] for i in range(degree + 1)], cond


def _on_radius(coeffs_unit: Sequence, radius: float) -> Term:
    # phi_a(xi) = phi_1(xi / a) / a  keeps every moment condition.
    a = HP.mpf(radius)
    return Term(float(radius), tuple(c / a ** (j + 1) for j, c in enumerate(coeffs_unit)))


@lru_cache(maxsize=None)
def _aq_unit(q: int) -> tuple[tuple, float]:
    rows = list(range(q + 1))
    coeffs, cond = _solve_moment_system(rows, q, [1] + [0] * q)
    return tuple(coeffs), cond


def hankel_condition(q: int) -> float:
    return _aq_unit(q)[1]


def make_Aq(q: int, radius: float = 1.0) -> TestFunction:
    """Polynomial-times-bump mollifier with mass 1 and moments 1..q equal to 0."""
    if q < 0 or int(q) != q:
        raise InvalidArgument("q must be a nonnegative integer")
    if not radius > 0:
        raise InvalidArgument("radius must be positive")
    if q > MAX_Q:
        raise ConstructionFailure(f"q = {q} exceeds the supported maximum {MAX_Q}", None)
    coeffs, cond = _aq_unit(int(q))
    if cond > MAX_CONDITION:
        raise ConstructionFailure(f"Hankel system for q = {q} is ill-conditioned", cond)
    return TestFunction((_on_radius(coeffs, radius),))


def make_moment_direction(k: int, radius: float = 1.0) -> TestFunction:
    """Zero-mass direction whose first nonvanishing moment is moment k (= 1).

    Moments 0..k-1 vanish, so this is an A_{q0} direction for every q < k.
    """
    if k < 1:
        raise InvalidArgument("k must be >= 1")
    coeffs, _ = _solve_moment_system(list(range(k + 1)), k, [0] * k + [1])
    a = HP.mpf(radius)
    # moment k of the radius-a version picks up a^k
    coeffs = [c / a**k for c in coeffs]
    return TestFunction((_on_radius(coeffs, radius),))


def make_half_moment_direction(q: int, radius: float = 1.0) -> TestFunction:
    """Even zero-mass direction with moments 0..q vanishing and half-moment 1."""
    m = q // 2 + 1
    # unknowns d_0..d_m on xi^(2i); rows: even moments 0..2(m-1), half moment
    M = HP.matrix(m + 1, m + 1)
    for r in range(m):
        for i in range(m + 1):
            M[r, i] = bump_moment(2 * r + 2 * i)
    for i in range(m + 1):
        M[m, i] = HP.mpf(_bump_half_moment(2 * i))
    b = HP.matrix([0] * m + [1])
    d = HP.lu_solve(M, b)
    coeffs = [HP.zero] * (2 * m + 1)
    for i in range(m + 1):
        coeffs[2 * i] = d[i]
    # half moment of the radius-a version picks up a^(1/2)
    a = HP.mpf(radius)
    coeffs = [c / HP.sqrt(a) for c in coeffs]
    return TestFunction((_on_radius(coeffs, radius),))


def make_Aq_generic(q: int, radius: float = 1.0) -> TestFunction:
    """A_q mollifier whose first free moment (q+1) is nonzero.

    :func:`make_Aq` is even, so for even q its moment q+1 vanishes too and
    every O(eps^(q+1)) law jumps to eps^(q+2).  Adding a multiple of the
    (q+1)-moment direction restores the generic behaviour.
    """
    phi = make_Aq(q, radius)
    if q % 2 == 1:
        return phi
    target = abs(exact_moment(phi, q + 2)) / radius
    return linear_combine([(1, phi), (target, make_moment_direction(q + 1, radius))])


# ----------------------------------------------------------- operations


def scale(phi: TestFunction, eps: float) -> TestFunction:
    """S_eps phi(xi) = eps^-1 phi(xi / eps)."""
    if not eps > 0:
        raise InvalidArgument("scale requires eps > 0")
    return replace(phi, scale=phi.scale * eps)


def _quad(phi: TestFunction, weight: Callable, panels: int = numerics.DEFAULT_PANELS) -> float:
    r = phi.support_radius
    return numerics.integrate(lambda x: weight(x) * phi(x), -r, r, panels=panels)


def moment(phi: TestFunction, k: int) -> float:
    """Quadrature of int xi^k phi(xi) dxi over the support."""
    if k < 0:
        raise InvalidArgument("k must be nonnegative")
    return _quad(phi, lambda x: x**k)


def exact_moment(phi: TestFunction, k: int):
    """Structural moment from the symbolic form, at working precision."""
    total = HP.zero
    for t in phi.terms:
        a = HP.mpf(t.radius)
        for j, c in enumerate(t.coeffs):
            if c:
                total += c * a ** (j + k + 1) * bump_moment(j + k)
    return HP.mpf(phi.amplitude) * HP.mpf(phi.scale) ** k * total


def half_moment(phi: TestFunction) -> float:
    """int |xi|^(1/2) phi(xi) dxi, split at 0 with xi = +-t^2 on each side."""
    root = math.sqrt(phi.support_radius)

    def integrand(t):
        t2 = t * t
        return 2 * t2 * (phi(t2) + phi(-t2))

    return numerics.integrate(integrand, 0.0, root)


def l2_inner(phi: TestFunction) -> float:
    """<phi|phi> = int phi^2."""
    return _quad(phi, phi)


def inner(phi: TestFunction, psi: TestFunction) -> float:
    r = max(phi.support_radius, psi.support_radius)
    return numerics.integrate(lambda x: phi(x) * psi(x), -r, r)


def abs_integral(phi: TestFunction) -> float:
    return _quad(phi, lambda x: np.sign(phi(x)), panels=4 * numerics.DEFAULT_PANELS)


def linear_combine(pairs: Iterable[tuple[float, TestFunction]]) -> TestFunction:
    """Pointwise linear combination; terms with equal radius are merged."""
    pairs = list(pairs)
    if not pairs:
        raise InvalidArgument("linear_combine needs at least one term")
    scales = {phi.scale for _, phi in pairs}
    common = scales.pop() if len(scales) == 1 else None
    merged: dict[float, list] = {}
    for coef, phi in pairs:
        if common is None:
            phi = phi.flatten()
            amp = HP.mpf(coef)
        else:
            amp = HP.mpf(coef) * HP.mpf(phi.amplitude)
        for t in phi.terms:
            acc = merged.setdefault(t.radius, [])
            if len(acc) < len(t.coeffs):
                acc.extend([HP.zero] * (len(t.coeffs) - len(acc)))
            for j, c in enumerate(t.coeffs):
                acc[j] += amp * c
    terms = tuple(Term(r, tuple(c)) for r, c in sorted(merged.items()))
    return TestFunction(terms, scale=common if common is not None else 1.0)


# -------------------------------------------------------- moment checks

MOMENT_KINDS = ("exact", "zero_mass", "unconstrained")


@dataclass(frozen=True)
class MomentProfile:
    """Claimed moment behaviour.

    ``exact``: mass 1 and moments 1..q zero (A_q).  ``zero_mass``: mass 0 and
    moments 1..q zero; this is how perturbation directions (A_{q0}) are
    modelled here.  ``unconstrained``: nothing is claimed.
    """

    q: int
    kind: str = "exact"

    def __post_init__(self):
        if self.kind not in MOMENT_KINDS:
            raise InvalidArgument(f"unknown moment profile kind {self.kind!r}")
        if self.q < 0:
            raise InvalidArgument("q must be nonnegative")


@dataclass(frozen=True)
class MomentReport:
    passed: bool
    residuals: dict
    profile: MomentProfile
    tol: float

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "residuals": {str(k): v for k, v in self.residuals.items()},
            "q": self.profile.q,
            "kind": self.profile.kind,
            "tol": self.tol,
        }


def verify_moments(phi: TestFunction, profile: MomentProfile, tol: float = 1e-8) -> MomentReport:
    """Certify a moment profile with double-precision quadrature."""
    if not tol > 0:
        raise InvalidArgument("tol must be positive")
    residuals: dict[int, float] = {}
    if profile.kind != "unconstrained":
        target0 = 1.0 if profile.kind == "exact" else 0.0
        residuals[0] = abs(moment(phi, 0) - target0)
        for j in range(1, profile.q + 1):
            residuals[j] = abs(moment(phi, j))
    passed = all(r <= tol for r in residuals.values())
    return MomentReport(passed, residuals, profile, tol)


def moment_order(phi: TestFunction, q_max: int = MAX_Q, tol: float = 1e-8) -> int | None:
    """Largest q <= q_max with phi certified exact-A_q, or None if not even A_0."""
    if abs(moment(phi, 0) - 1.0) > tol:
        return None
    q = 0
    while q < q_max and abs(moment(phi, q + 1)) <= tol:
        q += 1
    return q


# -------------------------------------------------------- test objects


@dataclass(frozen=True)
class TestObjectPath:
    """eps- (and possibly x-) parametrized family of test functions."""

    type_tag: TypeTag
    generator: Callable[[float, float], TestFunction]
    q: int | None = None

    __test__ = False

    def __call__(self, eps: float, x: float = 0.0) -> TestFunction:
        return self.generator(eps, x)


def make_asymptotic_path(
    q: int,
    base: TestFunction,
    direction: TestFunction,
    x_modulation: Callable[[float], float] | None = None,
) -> TestObjectPath:
    """phi(eps, x) = base + eps^q * rho(x) * direction."""
    if abs(exact_moment(direction, 0)) > MASS_TOL:
        raise InvalidArgument("direction must have zero mass")
    if abs(exact_moment(base, 0) - 1) > MASS_TOL:
        raise InvalidArgument("base must have unit mass")
    if x_modulation is None:
        tag = TypeTag("e", "A")

        def gen(eps: float, x: float = 0.0) -> TestFunction:
            return linear_combine([(1, base), (eps**q, direction)])
    else:
        tag = TypeTag("ex", "Aginf")

        def gen(eps: float, x: float = 0.0) -> TestFunction:
            return linear_combine([(1, base), (eps**q * x_modulation(x), direction)])

    return TestObjectPath(tag, gen, q)


def make_constant_path(phi: TestFunction, q: int | None = None) -> TestObjectPath:
    tag = TypeTag("c", "V" if q else "0")
    return TestObjectPath(tag, lambda eps, x=0.0: phi, q)


# ----------------------------------------------------------- families


@dataclass(frozen=True)
class BoundedFamily:
    """Finite stand-in for a bounded subset of D(R).

    Claims made over a family hold *for these members only*; there is no
    finite certificate for an infinite bounded set.
    """

    members: tuple[TestFunction, ...]
    common_radius: float
    derivative_bound_order: int
    certified_bounds: tuple[float, ...]
    label: str = "family"
    # certified A_q order per member; None when the mass is not 1
    member_orders: tuple = ()

    CAVEAT = "claims hold for the supplied finite families only"

    def select(self, q: int) -> list[TestFunction]:
        """Members certified exact-A_q."""
        return [m for m, o in zip(self.members, self.member_orders) if o is not None and o >= q]

    def check(self, samples: int = 4001) -> bool:
        """Re-sample derivative sup-norms on a fresh grid against the certificate."""
        xs = np.linspace(-self.common_radius, self.common_radius, samples)
        for m in self.members:
            if m.support_radius > self.common_radius:
                return False
            for d in range(self.derivative_bound_order + 1):
                if np.max(np.abs(m.derivative(xs, d))) > self.certified_bounds[d]:
                    return False
        return True


def certify_family(
    members: Sequence[TestFunction],
    derivative_order: int = 2,
    label: str = "family",
    samples: int = 2001,
    margin: float = 1.25,
) -> BoundedFamily:
    if not members:
        raise InvalidArgument("a family needs at least one member")
    radius = max(m.support_radius for m in members)
    xs = np.linspace(-radius, radius, samples)
    bounds = []
    for d in range(derivative_order + 1):
        sup = max(float(np.max(np.abs(m.derivative(xs, d)))) for m in members)
        bounds.append(sup * margin)
    orders = tuple(moment_order(m) for m in members)
    return BoundedFamily(tuple(members), radius, derivative_order, tuple(bounds), label, orders)


def make_family(
    q_max: int = 6,
    radius: float = 1.0,
    per_q: int = 1,
    seed: int = 0,
    jitter: float = 0.1,
    derivative_order: int = 2,
) -> BoundedFamily:
    """Generic A_q mollifiers for q = 0..q_max plus seeded A_{q0} perturbations.

    Member ``(q, 0)`` is :func:`make_Aq_generic`; further members add a random
    multiple (|c| <= jitter) of the (q+2)-moment direction, which keeps the
    member in A_q.  The seed is the only source of randomness.
    """
    rng = np.random.default_rng(seed)
    members = []
    for q in range(q_max + 1):
        base = make_Aq_generic(q, radius)
        members.append(base)
        for _ in range(per_q - 1):
            c = float(rng.uniform(-jitter, jitter))
            members.append(linear_combine([(1, base), (c, make_moment_direction(q + 2, radius))]))
    label = f"generic-Aq(q<={q_max},r={radius},per_q={per_q},seed={seed})"
    return certify_family(members, derivative_order, label=label)
