"""Convolution of finite-support functors on a groupoid, at the level of objects.

A functor from a degree-preserving groupoid (braids or permutations) into
the completed category is recorded by its value at each degree. The
convolution tensor is::

    (F * G)(l) = sum over (m, n) of  hom(m + n, l) . (F(m) (x) G(n))

where ``k . X`` is the direct sum of k copies of X and a countable number
of copies of a non-zero object is ``Inf``. No quotient by the groupoid
action is taken.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from .errors import UsageError
from .report import CheckReport
from .starcomp import INF, CompletedObj, Fin, Inf, tensor_obj

__all__ = [
    "FiniteCard",
    "CountablyInfinite",
    "COUNTABLE",
    "Card",
    "GroupoidProfile",
    "BRAID",
    "SYMMETRIC",
    "profile_by_name",
    "DimFunctor",
    "copower",
    "direct_sum",
    "convolve",
    "unit_functor",
    "pointwise_tensor",
    "law_suite",
]

DEFAULT_MAX_DEGREE = 16


@dataclass(frozen=True)
class FiniteCard:
    k: int


@dataclass(frozen=True)
class CountablyInfinite:
    pass


COUNTABLE = CountablyInfinite()
Card = Union[FiniteCard, CountablyInfinite]


@dataclass(frozen=True)
class GroupoidProfile:
    name: str
    hom_card: Callable[[int, int], Card] = field(compare=False)


def _braid_hom(m: int, n: int) -> Card:
    if m != n:
        return FiniteCard(0)
    return FiniteCard(1) if n < 2 else COUNTABLE


def _symmetric_hom(m: int, n: int) -> Card:
    return FiniteCard(math.factorial(n)) if m == n else FiniteCard(0)


BRAID = GroupoidProfile("braid", _braid_hom)
SYMMETRIC = GroupoidProfile("symmetric", _symmetric_hom)


def profile_by_name(name: str) -> GroupoidProfile:
    try:
        return {"braid": BRAID, "symmetric": SYMMETRIC}[name]
    except KeyError:
        raise UsageError(f"unknown profile {name!r}; expected 'braid' or 'symmetric'") from None


class DimFunctor:
    """Finite-support map from degrees to completed objects; absent means ``Fin(0)``."""

    __slots__ = ("_support",)

    def __init__(self, support=None):
        items = {}
        for degree, obj in (support or {}).items():
            degree = int(degree)
            if degree < 0:
                raise UsageError("degrees are non-negative")
            if not isinstance(obj, (Fin, Inf)):
                raise UsageError(f"not a completed object: {obj!r}")
            if obj != Fin(0):
                items[degree] = obj
        self._support = dict(sorted(items.items()))

    @property
    def support(self) -> dict:
        return dict(self._support)

    def __call__(self, degree: int) -> CompletedObj:
        return self._support.get(degree, Fin(0))

    def __eq__(self, other):
        return isinstance(other, DimFunctor) and self._support == other._support

    def __hash__(self):
        return hash(tuple(self._support.items()))

    def __repr__(self):
        inner = ", ".join(f"{d}: {o}" for d, o in self._support.items())
        return f"DimFunctor({{{inner}}})"

    def to_json(self) -> dict:
        return {"support": {str(d): _obj_token(o) for d, o in self._support.items()}}

    @classmethod
    def from_json(cls, obj) -> "DimFunctor":
        try:
            support = obj["support"]
            return cls({int(d): _parse_token(tok) for d, tok in support.items()})
        except (KeyError, TypeError, AttributeError, ValueError) as exc:
            raise UsageError(f"bad functor encoding: {exc}") from exc


def _obj_token(o: CompletedObj) -> str:
    return "inf" if isinstance(o, Inf) else f"fin:{o.n}"


def _parse_token(tok: str) -> CompletedObj:
    if tok == "inf":
        return INF
    if isinstance(tok, str) and tok.startswith("fin:") and tok[4:].isdigit():
        return Fin(int(tok[4:]))
    raise UsageError(f"bad object token {tok!r}")


def copower(c: Card, d: CompletedObj) -> CompletedObj:
    if isinstance(c, FiniteCard):
        if c.k == 0:
            return Fin(0)
        return INF if isinstance(d, Inf) else Fin(c.k * d.n)
    return Fin(0) if d == Fin(0) else INF


def direct_sum(objs) -> CompletedObj:
    total = 0
    for o in objs:
        if isinstance(o, Inf):
            return INF
        total += o.n
    return Fin(total)


def convolve(f: DimFunctor, g: DimFunctor, profile: GroupoidProfile, max_degree: int = DEFAULT_MAX_DEGREE) -> DimFunctor:
    """Convolution tensor at degrees ``0..max_degree``.

    Sums over every pair of support degrees, not only ``m + n = l``; the
    profile's hom cardinality removes the rest.
    """
    if max_degree < 0:
        raise UsageError("max_degree must be non-negative")
    out = {}
    for l in range(max_degree + 1):
        out[l] = direct_sum(
            copower(profile.hom_card(m + n, l), tensor_obj(fm, gn))
            for m, fm in f.support.items()
            for n, gn in g.support.items()
        )
    return DimFunctor(out)


def unit_functor(profile: GroupoidProfile, max_degree: int = DEFAULT_MAX_DEGREE) -> DimFunctor:
    return DimFunctor({l: copower(profile.hom_card(0, l), Fin(1)) for l in range(max_degree + 1)})


def pointwise_tensor(f: DimFunctor, g: DimFunctor) -> DimFunctor:
    degrees = set(f.support) | set(g.support)
    return DimFunctor({d: tensor_obj(f(d), g(d)) for d in degrees})


def obj_geq(a: CompletedObj, b: CompletedObj) -> bool:
    if isinstance(a, Inf):
        return True
    return isinstance(b, Fin) and a.n >= b.n


# ------------------------------------------------------------------ suites

def random_functor(rng, max_support_degree=4, max_dim=3, inf_rate=0.1) -> DimFunctor:
    support = {}
    for d in range(max_support_degree + 1):
        roll = rng.random()
        if roll < 0.4:
            continue
        support[d] = INF if rng.random() < inf_rate else Fin(int(rng.integers(1, max_dim + 1)))
    return DimFunctor(support)


def associativity_failures(triples, profile, max_degree):
    bad = []
    for f, g, h in triples:
        left = convolve(convolve(f, g, profile, max_degree), h, profile, max_degree)
        right = convolve(f, convolve(g, h, profile, max_degree), profile, max_degree)
        if left != right:
            bad.append({"f": f.to_json(), "g": g.to_json(), "h": h.to_json(),
                        "left": left.to_json(), "right": right.to_json()})
    return bad


def law_suite(seed: int = 0, samples: int = 200, max_degree: int = 12) -> list[CheckReport]:
    rng = np.random.default_rng(seed)
    pairs = [(random_functor(rng), random_functor(rng)) for _ in range(samples)]
    reports = []
    for profile in (BRAID, SYMMETRIC):
        bad_comm = sum(convolve(f, g, profile, max_degree) != convolve(g, f, profile, max_degree) for f, g in pairs)
        reports.append(CheckReport(f"convolution_commutative_{profile.name}", bad_comm == 0,
                                   {"pairs": samples, "failures": bad_comm}))

        bad_support = 0
        for f, g in pairs:
            sumset = {m + n for m in f.support for n in g.support if m + n <= max_degree}
            bad_support += set(convolve(f, g, profile, max_degree).support) != sumset
        reports.append(CheckReport(f"convolution_support_{profile.name}", bad_support == 0,
                                   {"pairs": samples, "failures": bad_support}))

        unit = unit_functor(profile, max_degree)
        bad_lax, bad_strict = 0, 0
        for f, _ in pairs:
            jf = convolve(unit, f, profile, max_degree)
            bad_lax += not all(obj_geq(jf(l), f(l)) for l in range(max_degree + 1))
            strict = all(jf(l) == f(l) for l in range(max_degree + 1))
            # copies of Inf are Inf, so those degrees cannot witness laxity
            finite_high = {d for d, o in f.support.items() if d >= 2 and isinstance(o, Fin)}
            bad_strict += strict != (not finite_high)
        reports.append(CheckReport(f"unit_laxity_{profile.name}", bad_lax == 0 and bad_strict == 0,
                                   {"functors": samples, "lax_failures": bad_lax, "strictness_mismatches": bad_strict}))

    bad_abs = 0
    for f, g in pairs:
        fg = convolve(f, g, BRAID, max_degree)
        for l in range(max_degree + 1):
            nonzero = any(tensor_obj(f(m), g(l - m)) != Fin(0) for m in range(l + 1))
            expected = (INF if l >= 2 else fg(l)) if nonzero else Fin(0)
            bad_abs += fg(l) != expected
    reports.append(CheckReport("braid_absorption", bad_abs == 0, {"pairs": samples, "failures": bad_abs}))

    triples = [(random_functor(rng, 3), random_functor(rng, 3), random_functor(rng, 3)) for _ in range(50)]
    bad = associativity_failures(triples, BRAID, max_degree)
    reports.append(CheckReport("convolution_associative_braid", not bad, {"triples": 50, "failures": len(bad)}))
    # Without the quotient by the groupoid action the permutation profile
    # over-counts: recorded, not asserted.
    bad = associativity_failures(triples, SYMMETRIC, max_degree)
    reports.append(CheckReport(
        "convolution_associative_symmetric_informational", True,
        {"triples": 50, "non_associative_triples": len(bad), "example": bad[0] if bad else None},
    ))
    return reports
