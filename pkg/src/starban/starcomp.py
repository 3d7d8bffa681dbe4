"""Object calculus of two star-completions, in exact arithmetic.

``Fin(n)`` stands for the n-dimensional Hilbert space and ``Inf`` for an
adjoined terminal object playing the part of l2(N): ``Fin(0)`` and ``Inf``
are dual to each other, and tensoring with ``Inf`` gives ``Inf`` except
against the zero space. Hom-sets are modelled by their size only.

The second instance is the multiplicative positive rationals with 0 and
infinity adjoined (``r * inf = inf`` for r != 0, ``0 * inf = 0``).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Union

from .errors import UsageError
from .report import CheckReport

__all__ = [
    "Fin",
    "Inf",
    "INF",
    "CompletedObj",
    "VectDim",
    "Singleton",
    "SINGLETON",
    "HomCard",
    "tensor_obj",
    "dual_obj",
    "par_obj",
    "hom_card",
    "card_key",
    "law_suite_completion",
    "Zero",
    "Pos",
    "Infty",
    "ZERO",
    "INFTY",
    "posreal_tensor",
    "posreal_dual",
    "posreal_par",
    "law_suite_posreal",
    "DEFAULT_POSREAL_GRID",
    "completion_table",
]


@dataclass(frozen=True, order=True)
class Fin:
    n: int

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 0:
            raise UsageError(f"Fin needs a non-negative integer, got {self.n!r}")

    def __str__(self):
        return f"Fin({self.n})"


@dataclass(frozen=True)
class Inf:
    def __str__(self):
        return "Inf"


INF = Inf()
CompletedObj = Union[Fin, Inf]


def tensor_obj(a: CompletedObj, b: CompletedObj) -> CompletedObj:
    if isinstance(a, Fin) and isinstance(b, Fin):
        return Fin(a.n * b.n)
    if a == Fin(0) or b == Fin(0):
        return Fin(0)
    return INF


def dual_obj(a: CompletedObj) -> CompletedObj:
    if a == Fin(0):
        return INF
    if isinstance(a, Inf):
        return Fin(0)
    return a


def par_obj(a: CompletedObj, b: CompletedObj) -> CompletedObj:
    return dual_obj(tensor_obj(dual_obj(a), dual_obj(b)))


@dataclass(frozen=True)
class VectDim:
    d: int

    def __str__(self):
        return f"VectDim({self.d})"


@dataclass(frozen=True)
class Singleton:
    def __str__(self):
        return "Singleton"


SINGLETON = Singleton()
HomCard = Union[VectDim, Singleton]


def hom_card(a: CompletedObj, b: CompletedObj) -> HomCard:
    """Size of the hom-set. Any hom touching ``Inf`` has exactly one element.

    Maps into ``Inf`` are unique because it is terminal. Maps out of it are
    taken unique too: that is the only choice (up to size) under which the
    star-autonomy bijection holds on every triple.
    """
    if isinstance(a, Fin) and isinstance(b, Fin):
        return VectDim(a.n * b.n)
    return SINGLETON


def card_key(h: HomCard):
    """Comparison key: a zero-dimensional space and a singleton both have one element."""
    if isinstance(h, Singleton) or h.d == 0:
        return ("one",)
    return ("dim", h.d)


def completed_objects(max_fin: int) -> list:
    return [Fin(n) for n in range(max_fin + 1)] + [INF]


def _failures(name, cases, limit=20):
    return {"law": name, "checked": cases[0], "failures": cases[1][:limit], "failure_count": len(cases[1])}


def law_suite_completion(max_fin: int = 5, hom: Callable = hom_card) -> CheckReport:
    """Exhaustive law check over ``{Fin(0..max_fin), Inf}``.

    ``hom`` can be swapped to test alternative hom-size assignments.
    """
    if max_fin < 2:
        raise UsageError("max_fin must be at least 2")
    objs = completed_objects(max_fin)
    laws = []

    bad = [str(a) for a in objs if dual_obj(dual_obj(a)) != a]
    laws.append(_failures("involution", (len(objs), bad)))

    bad = [str(a) for a in objs if tensor_obj(Fin(1), a) != a or tensor_obj(a, Fin(1)) != a]
    laws.append(_failures("unit", (len(objs), bad)))

    pairs = list(itertools.product(objs, repeat=2))
    bad = [[str(a), str(b)] for a, b in pairs if tensor_obj(a, b) != tensor_obj(b, a)]
    laws.append(_failures("commutativity", (len(pairs), bad)))

    bad = [[str(a), str(b)] for a, b in pairs if dual_obj(tensor_obj(a, b)) != par_obj(dual_obj(a), dual_obj(b))]
    laws.append(_failures("de_morgan", (len(pairs), bad)))

    triples = list(itertools.product(objs, repeat=3))
    bad = [
        [str(a), str(b), str(c)]
        for a, b, c in triples
        if tensor_obj(tensor_obj(a, b), c) != tensor_obj(a, tensor_obj(b, c))
    ]
    laws.append(_failures("associativity", (len(triples), bad)))

    bad = []
    for a, b, c in triples:
        lhs = hom(tensor_obj(a, b), c)
        rhs = hom(a, dual_obj(tensor_obj(b, dual_obj(c))))
        if card_key(lhs) != card_key(rhs):
            bad.append([str(a), str(b), str(c), str(lhs), str(rhs)])
    laws.append(_failures("star_autonomy_cardinality", (len(triples), bad)))

    return CheckReport(
        "completion_laws",
        all(law["failure_count"] == 0 for law in laws),
        {"max_fin": max_fin, "objects": len(objs), "laws": laws},
    )


def completion_table(max_fin: int) -> dict:
    objs = completed_objects(max_fin)
    names = [str(o) for o in objs]
    return {
        "objects": names,
        "dual": {str(a): str(dual_obj(a)) for a in objs},
        "tensor": {str(a): {str(b): str(tensor_obj(a, b)) for b in objs} for a in objs},
        "par": {str(a): {str(b): str(par_obj(a, b)) for b in objs} for a in objs},
        "hom_card": {str(a): {str(b): str(hom_card(a, b)) for b in objs} for a in objs},
    }


# --------------------------------------------------- positive reals with 0, inf


@dataclass(frozen=True)
class Zero:
    def __str__(self):
        return "0"


@dataclass(frozen=True)
class Pos:
    q: Fraction

    def __post_init__(self):
        q = Fraction(self.q)
        if q <= 0:
            raise UsageError(f"Pos needs a positive rational, got {q}")
        object.__setattr__(self, "q", q)

    def __str__(self):
        return str(self.q)


@dataclass(frozen=True)
class Infty:
    def __str__(self):
        return "inf"


ZERO = Zero()
INFTY = Infty()
PosRealObj = Union[Zero, Pos, Infty]


def posreal_tensor(a: PosRealObj, b: PosRealObj) -> PosRealObj:
    if isinstance(a, Zero) or isinstance(b, Zero):
        return ZERO
    if isinstance(a, Infty) or isinstance(b, Infty):
        return INFTY
    return Pos(a.q * b.q)


def posreal_dual(a: PosRealObj) -> PosRealObj:
    if isinstance(a, Zero):
        return INFTY
    if isinstance(a, Infty):
        return ZERO
    return Pos(1 / a.q)


def posreal_par(a: PosRealObj, b: PosRealObj) -> PosRealObj:
    return posreal_dual(posreal_tensor(posreal_dual(a), posreal_dual(b)))


def _rank(a: PosRealObj):
    # total order 0 < q < inf
    if isinstance(a, Zero):
        return (0, Fraction(0))
    if isinstance(a, Infty):
        return (2, Fraction(0))
    return (1, a.q)


def posreal_leq(a: PosRealObj, b: PosRealObj) -> bool:
    return _rank(a) <= _rank(b)


DEFAULT_POSREAL_GRID = (
    ZERO, Pos(Fraction(1, 4)), Pos(Fraction(1, 2)), Pos(1), Pos(2), Pos(4), INFTY,
)


def _bijection_failures(grid, hom_nonempty) -> list:
    # thin reading: a hom-set has one element or none
    bad = []
    for a, b, c in itertools.product(grid, repeat=3):
        lhs = hom_nonempty(posreal_tensor(a, b), c)
        rhs = hom_nonempty(a, posreal_dual(posreal_tensor(b, posreal_dual(c))))
        if lhs != rhs:
            bad.append([str(a), str(b), str(c)])
    return bad


def law_suite_posreal(grid: Iterable[PosRealObj] = DEFAULT_POSREAL_GRID) -> CheckReport:
    """Commutativity, associativity, unit, involution and de Morgan, exactly.

    Hom-sets are not part of the structure; as information the report also
    evaluates the star-autonomy bijection under two thin readings, the
    discrete one (homs are identities only) and the one ordered by size.
    """
    grid = list(grid)
    if not {ZERO, Pos(1), INFTY} <= set(grid):
        raise UsageError("grid must contain 0, 1 and inf")
    one = Pos(1)
    laws = []
    pairs = list(itertools.product(grid, repeat=2))
    triples = list(itertools.product(grid, repeat=3))
    t, d = posreal_tensor, posreal_dual

    laws.append(_failures("commutativity", (len(pairs), [[str(a), str(b)] for a, b in pairs if t(a, b) != t(b, a)])))
    laws.append(_failures("associativity", (
        len(triples), [[str(a), str(b), str(c)] for a, b, c in triples if t(t(a, b), c) != t(a, t(b, c))])))
    laws.append(_failures("unit", (len(grid), [str(a) for a in grid if t(one, a) != a or t(a, one) != a])))
    laws.append(_failures("involution", (len(grid), [str(a) for a in grid if d(d(a)) != a])))
    laws.append(_failures("de_morgan", (
        len(pairs), [[str(a), str(b)] for a, b in pairs if d(t(a, b)) != posreal_par(d(a), d(b))])))

    discrete = _bijection_failures(grid, lambda x, y: x == y)
    ordered = _bijection_failures(grid, posreal_leq)
    return CheckReport(
        "posreal_laws",
        all(law["failure_count"] == 0 for law in laws),
        {
            "grid": [str(g) for g in grid],
            "laws": laws,
            "hom_readings": {
                "discrete": {"bijection_holds": not discrete, "failures": discrete[:10], "failure_count": len(discrete)},
                "ordered": {"bijection_holds": not ordered, "failures": ordered[:10], "failure_count": len(ordered)},
            },
        },
    )


def parse_posreal(text: str) -> PosRealObj:
    text = text.strip()
    if text in ("0",):
        return ZERO
    if text in ("inf", "Infty", "oo"):
        return INFTY
    try:
        return Pos(Fraction(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"not a grid element: {text!r}") from exc
