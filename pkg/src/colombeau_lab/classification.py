"""Test-object types, admissible quotients and the algebra diagram.

A type ``[p, M]`` pairs a parametrization ``p`` (constant ``c``, ``e`` for
phi(eps), ``ex`` for phi(eps, x)) with a moment condition ``M``.  Test-object
classes are ordered componentwise; the order is stored as covering relations
and closed transitively, then checked against the known count of 46
admissible pairs and 9 distinct algebras.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache

from .exceptions import InvalidArgument, LatticeMisconfiguration

PARAMS = ("c", "e", "ex")
MOMENTS = ("0", "V", "A", "Al", "Ag", "Alinf", "Aginf")
A_VARIANTS = frozenset({"A", "Al", "Ag", "Alinf", "Aginf"})

_PARAM_PRETTY = {"c": "c", "e": "ε", "ex": "εx"}
_MOMENT_PRETTY = {
    "0": "0",
    "V": "V",
    "A": "A",
    "Al": "A_l",
    "Ag": "A_g",
    "Alinf": "A_l^∞",
    "Aginf": "A_g^∞",
}

# Parametrizations form a chain: a constant phi is an eps-path, an eps-path is
# an (eps, x)-path.
_PARAM_RANK = {"c": 0, "e": 1, "ex": 2}

# (smaller class, larger class).  Exactly vanishing moments imply every
# asymptotic variant; an x-independent eps-path with asymptotically vanishing
# moments has vanishing x-derivatives, so [A] sits below [A_g^inf]; global
# uniformity and derivative uniformity each weaken towards A_l; every A-variant
# lies inside the unconstrained class 0.
_MOMENT_COVERS = (
    ("V", "A"),
    ("A", "Aginf"),
    ("Aginf", "Ag"),
    ("Aginf", "Alinf"),
    ("Ag", "Al"),
    ("Alinf", "Al"),
    ("Al", "0"),
)

EXPECTED_TYPES = 11
EXPECTED_ADMISSIBLE = 46
EXPECTED_ALGEBRAS = 9


@dataclass(frozen=True, order=True)
class TypeTag:
    param: str
    moments: str

    def __post_init__(self):
        if self.param not in PARAMS or self.moments not in MOMENTS:
            raise InvalidArgument(f"unknown type symbol [{self.param},{self.moments}]")
        if not _valid(self.param, self.moments):
            raise InvalidArgument(f"[{self.param},{self.moments}] is not an admissible type")

    @classmethod
    def parse(cls, text: str) -> "TypeTag":
        try:
            p, m = text.strip().split(":")
        except ValueError:
            raise InvalidArgument(f"type tag must look like 'ex:Aginf', got {text!r}") from None
        return cls(p, m)

    def __str__(self) -> str:
        return f"{self.param}:{self.moments}"

    @property
    def pretty(self) -> str:
        return f"[{_PARAM_PRETTY[self.param]},{_MOMENT_PRETTY[self.moments]}]"


def _valid(param: str, moments: str) -> bool:
    if moments == "A":
        return param == "e"
    if moments in A_VARIANTS:
        return param == "ex"
    return True


@lru_cache(maxsize=None)
def _moment_leq() -> frozenset:
    rel = {(m, m) for m in MOMENTS} | set(_MOMENT_COVERS)
    while True:
        extra = {(a, d) for (a, b), (c, d) in itertools.product(rel, rel) if b == c} - rel
        if not extra:
            return frozenset(rel)
        rel |= extra


def enumerate_types() -> list[TypeTag]:
    """All valid type tags in a fixed order."""
    tags = [TypeTag(p, m) for p in PARAMS for m in MOMENTS if _valid(p, m)]
    if len(tags) != EXPECTED_TYPES:
        raise LatticeMisconfiguration(f"expected {EXPECTED_TYPES} types, found {len(tags)}")
    return tags


def class_subset(small: TypeTag, large: TypeTag) -> bool:
    """Is every test object of type ``small`` also one of type ``large``?"""
    return (
        _PARAM_RANK[small.param] <= _PARAM_RANK[large.param]
        and (small.moments, large.moments) in _moment_leq()
    )


def testclass_leq(x: TypeTag, y: TypeTag) -> bool:
    """True iff the test objects of ``y`` are among those of ``x``.

    Testing against ``x`` is then at least as demanding, so moderateness of
    type ``x`` implies moderateness of type ``y``.
    """
    return class_subset(y, x)


def admissible_quotients() -> list[tuple[TypeTag, TypeTag]]:
    tags = enumerate_types()
    pairs = [
        (x, y)
        for x in tags
        for y in tags
        if (y.moments in A_VARIANTS or y.moments == "V") and testclass_leq(x, y)
    ]
    if len(pairs) != EXPECTED_ADMISSIBLE:
        raise LatticeMisconfiguration(
            f"encoded order yields {len(pairs)} admissible pairs, expected {EXPECTED_ADMISSIBLE}"
        )
    return pairs


# ------------------------------------------------------------- algebras

# These three types define the same moderate and negligible functions.
_MERGED = ("Ag", "Alinf", "Aginf")

_NAMES = {
    "G^d": TypeTag("ex", "0"),
    "G^1": TypeTag("e", "A"),
    "G^2": TypeTag("ex", "Aginf"),
    "G^e_0": TypeTag("c", "V"),
}

_DIFFEO_INVARIANT = {TypeTag("ex", "0"), TypeTag("ex", "Aginf"), TypeTag("ex", "Al")}
_EXCEPTIONAL = TypeTag("ex", "Al")

# Canonical homomorphisms, one entry per arrow of the diagram.
_DIAGRAM = (
    ("ex:0", "e:0"),
    ("e:0", "c:0"),
    ("ex:0", "ex:Aginf"),
    ("e:0", "e:A"),
    ("c:0", "c:V"),
    ("ex:Al", "ex:Aginf"),
    ("ex:Aginf", "e:A"),
    ("ex:Aginf", "ex:V"),
    ("e:A", "e:V"),
    ("ex:V", "e:V"),
    ("e:V", "c:V"),
)


@dataclass(frozen=True)
class AlgebraId:
    representative_tag: TypeTag
    members: tuple[TypeTag, ...]
    known_names: tuple[str, ...] = field(default=())

    def __str__(self) -> str:
        return str(self.representative_tag)

    @property
    def label(self) -> str:
        text = " = ".join(t.pretty for t in self.members)
        if self.known_names:
            text += " (" + ", ".join(self.known_names) + ")"
        return text


@dataclass(frozen=True)
class AlgebraFlags:
    diffeo_invariant: bool
    differential_algebra: bool
    iota_equals_sigma_on_smooth: bool

    @property
    def diffeo_invariant_colombeau(self) -> bool:
        # Diffeomorphism invariant *and* a Colombeau algebra proper
        # (iota restricted to smooth functions equals sigma).
        return self.diffeo_invariant and self.iota_equals_sigma_on_smooth


def _representative(tag: TypeTag) -> TypeTag:
    if tag.param == "ex" and tag.moments in _MERGED:
        return TypeTag("ex", "Aginf")
    return tag


@lru_cache(maxsize=None)
def equivalence_classes() -> tuple[AlgebraId, ...]:
    groups: dict[TypeTag, list[TypeTag]] = {}
    for tag in enumerate_types():
        groups.setdefault(_representative(tag), []).append(tag)
    out = []
    for rep, members in groups.items():
        names = tuple(n for n, t in _NAMES.items() if t == rep)
        out.append(AlgebraId(rep, tuple(members), names))
    if len(out) != EXPECTED_ALGEBRAS:
        raise LatticeMisconfiguration(f"expected {EXPECTED_ALGEBRAS} algebras, found {len(out)}")
    return tuple(out)


def algebra_of(tag: TypeTag | str) -> AlgebraId:
    if isinstance(tag, str):
        tag = TypeTag.parse(tag)
    rep = _representative(tag)
    for alg in equivalence_classes():
        if alg.representative_tag == rep:
            return alg
    raise InvalidArgument(f"no algebra for {tag}")  # pragma: no cover


def named_algebra(name: str) -> AlgebraId:
    if name not in _NAMES:
        raise InvalidArgument(f"unknown algebra name {name!r}; known: {sorted(_NAMES)}")
    return algebra_of(_NAMES[name])


def resolve_algebra(text: str) -> AlgebraId:
    """Accept either a known name (``G^d``) or a type tag (``ex:Ag``)."""
    if text in _NAMES:
        return named_algebra(text)
    return algebra_of(TypeTag.parse(text))


def diagram_edges() -> list[tuple[AlgebraId, AlgebraId]]:
    return [(algebra_of(a), algebra_of(b)) for a, b in _DIAGRAM]


@lru_cache(maxsize=None)
def _reachable() -> dict[AlgebraId, frozenset]:
    succ: dict[AlgebraId, list[AlgebraId]] = {a: [] for a in equivalence_classes()}
    for a, b in diagram_edges():
        succ[a].append(b)
    reach = {}
    for start in succ:
        seen = {start}
        queue = deque([start])
        while queue:
            for nxt in succ[queue.popleft()]:
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
        reach[start] = frozenset(seen)
    return reach


def hom_exists(x: AlgebraId, y: AlgebraId) -> bool:
    """Is there a canonical homomorphism from ``x`` into ``y``?"""
    return y in _reachable()[x]


def flags(x: AlgebraId) -> AlgebraFlags:
    rep = x.representative_tag
    return AlgebraFlags(
        diffeo_invariant=rep in _DIFFEO_INVARIANT,
        differential_algebra=rep != _EXCEPTIONAL,
        iota_equals_sigma_on_smooth=rep != _EXCEPTIONAL,
    )


def emit_dot() -> str:
    algs = equivalence_classes()
    ids = {a: f"n{i}" for i, a in enumerate(algs)}
    lines = ["digraph colombeau_algebras {", "  rankdir=LR;", "  node [shape=box];"]
    for a in algs:
        f = flags(a)
        style = ', style="bold"' if f.diffeo_invariant else ""
        lines.append(f'  {ids[a]} [label="{a.label}"{style}];')
    for a, b in diagram_edges():
        lines.append(f"  {ids[a]} -> {ids[b]};")
    lines.append("}")
    return "\n".join(lines) + "\n"
