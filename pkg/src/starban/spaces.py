"""Finite-dimensional Banach spaces built from C by direct sums and duality.

A space is an expression tree::

    Scalar()                 C with |z|
    L2(n)                    C^n with the Euclidean norm
    SumL1([e, ...])          ||(a, b)|| = ||a|| + ||b||
    SumL2([e, ...])          ||(a, b)|| = sqrt(||a||^2 + ||b||^2)
    ProdSup([e, ...])        ||(a, b)|| = max(||a||, ||b||)
    Dual(e)                  [e, C] with the dual norm

Coordinates of a vector are laid out by depth-first traversal of the tree,
so the children of a sum own consecutive blocks. Functionals pair with
vectors through the bilinear form ``sum(v_i * w_i)``.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from . import numkernel
from .errors import ParseError, UsageError
from .report import CheckReport

__all__ = [
    "Scalar",
    "L2",
    "SumL1",
    "SumL2",
    "ProdSup",
    "Dual",
    "SpaceExpr",
    "Vector",
    "dim",
    "norm",
    "dual_space",
    "pairing",
    "norming_vector",
    "is_l2_type",
    "operator_norm_estimate",
    "is_contraction",
    "ContractionReport",
    "parse_space",
    "format_space",
]


@dataclass(frozen=True)
class Scalar:
    pass


@dataclass(frozen=True)
class L2:
    n: int

    def __post_init__(self):
        if self.n < 0:
            raise UsageError("l2 dimension must be non-negative")


@dataclass(frozen=True)
class SumL1:
    children: tuple

    def __init__(self, children: Sequence["SpaceExpr"]):
        object.__setattr__(self, "children", tuple(children))


@dataclass(frozen=True)
class SumL2:
    children: tuple

    def __init__(self, children: Sequence["SpaceExpr"]):
        object.__setattr__(self, "children", tuple(children))


@dataclass(frozen=True)
class ProdSup:
    children: tuple

    def __init__(self, children: Sequence["SpaceExpr"]):
        object.__setattr__(self, "children", tuple(children))


@dataclass(frozen=True)
class Dual:
    child: "SpaceExpr"


SpaceExpr = Union[Scalar, L2, SumL1, SumL2, ProdSup, Dual]
_SUMS = (SumL1, SumL2, ProdSup)


@dataclass(frozen=True)
class Vector:
    space: SpaceExpr
    coords: np.ndarray

    def __post_init__(self):
        coords = np.asarray(self.coords, dtype=np.complex128).reshape(-1)
        if coords.size != dim(self.space):
            raise UsageError(f"vector has {coords.size} coordinates, space has dimension {dim(self.space)}")
        object.__setattr__(self, "coords", coords)


def dim(s: SpaceExpr) -> int:
    if isinstance(s, Scalar):
        return 1
    if isinstance(s, L2):
        return s.n
    if isinstance(s, _SUMS):
        return sum(dim(c) for c in s.children)
    if isinstance(s, Dual):
        return dim(s.child)
    raise UsageError(f"not a space expression: {s!r}")


def dual_space(s: SpaceExpr) -> SpaceExpr:
    """Structural dual: l1 and sup sums swap, l2 pieces are self-dual, Dual cancels."""
    if isinstance(s, (Scalar, L2)):
        return s
    if isinstance(s, SumL1):
        return ProdSup([dual_space(c) for c in s.children])
    if isinstance(s, ProdSup):
        return SumL1([dual_space(c) for c in s.children])
    if isinstance(s, SumL2):
        return SumL2([dual_space(c) for c in s.children])
    if isinstance(s, Dual):
        return s.child
    raise UsageError(f"not a space expression: {s!r}")


def is_l2_type(s: SpaceExpr) -> bool:
    """True when the norm is the Euclidean norm of the coordinates."""
    if isinstance(s, (Scalar, L2)):
        return True
    if isinstance(s, SumL2):
        return all(is_l2_type(c) for c in s.children)
    if isinstance(s, Dual):
        return is_l2_type(s.child)
    if isinstance(s, (SumL1, ProdSup)):
        # a sum with at most one non-trivial summand is still Euclidean
        nontrivial = [c for c in s.children if dim(c) > 0]
        return len(nontrivial) <= 1 and all(is_l2_type(c) for c in nontrivial)
    return False


def _blocks(children, coords):
    start = 0
    for c in children:
        d = dim(c)
        yield c, coords[start : start + d]
        start += d


def _coords_of(s: SpaceExpr, v) -> np.ndarray:
    if isinstance(v, Vector):
        if v.space != s:
            raise UsageError("vector belongs to a different space")
        return v.coords
    coords = np.asarray(v, dtype=np.complex128).reshape(-1)
    if coords.size != dim(s):
        raise UsageError(f"vector has {coords.size} coordinates, space has dimension {dim(s)}")
    if not np.all(np.isfinite(coords)):
        raise UsageError("vector coordinates must be finite")
    return coords


def _norm(s: SpaceExpr, x: np.ndarray) -> float:
    if isinstance(s, (Scalar, L2)):
        return float(np.sqrt(np.sum(x.real**2 + x.imag**2)))
    if isinstance(s, Dual):
        return _norm(dual_space(s.child), x)
    parts = [_norm(c, block) for c, block in _blocks(s.children, x)]
    if not parts:
        return 0.0
    if isinstance(s, SumL1):
        return float(sum(parts))
    if isinstance(s, SumL2):
        return float(np.sqrt(sum(p * p for p in parts)))
    return float(max(parts))


def norm(s: SpaceExpr, v) -> float:
    """Norm of ``v`` (a ``Vector`` of ``s`` or a raw coordinate sequence)."""
    return _norm(s, _coords_of(s, v))


def pairing(v, w) -> complex:
    """Bilinear pairing of a vector with a functional, both as coordinates."""
    v = np.asarray(v.coords if isinstance(v, Vector) else v, dtype=np.complex128).reshape(-1)
    w = np.asarray(w.coords if isinstance(w, Vector) else w, dtype=np.complex128).reshape(-1)
    if v.size != w.size:
        raise UsageError("pairing needs equal lengths")
    return complex(np.sum(v * w))


def _unit_axis(s: SpaceExpr) -> np.ndarray:
    x = np.zeros(dim(s), dtype=np.complex128)
    if x.size:
        x[0] = 1.0
        x /= _norm(s, x)
    return x


def _norming(s: SpaceExpr, f: np.ndarray) -> tuple[np.ndarray, float]:
    # Returns (x, ||f||_{s*}) with ||x||_s = 1 and pairing(x, f) = ||f||_{s*}.
    if isinstance(s, Dual):
        return _norming(dual_space(s.child), f)
    if isinstance(s, (Scalar, L2)):
        size = float(np.sqrt(np.sum(f.real**2 + f.imag**2)))
        if size == 0.0:
            return _unit_axis(s), 0.0
        return f.conj() / size, size
    pieces = [(c, _norming(c, block)) for c, block in _blocks(s.children, f)]
    if not pieces:
        return np.zeros(0, dtype=np.complex128), 0.0
    sizes = [val for _, (_, val) in pieces]
    if isinstance(s, ProdSup):
        return np.concatenate([x for _, (x, _) in pieces]), float(sum(sizes))
    if isinstance(s, SumL1):
        best = int(np.argmax(sizes))
        xs = [x if k == best else np.zeros_like(x) for k, (_, (x, _)) in enumerate(pieces)]
        if sizes[best] == 0.0:
            return _unit_axis(s), 0.0
        return np.concatenate(xs), float(sizes[best])
    total = float(np.sqrt(sum(v * v for v in sizes)))
    if total == 0.0:
        return _unit_axis(s), 0.0
    return np.concatenate([x * (val / total) for _, (x, val) in pieces]), total


def norming_vector(s: SpaceExpr, f) -> tuple[Vector, float]:
    """A unit vector ``x`` of ``s`` at which the functional ``f`` attains its dual norm."""
    f = np.asarray(f.coords if isinstance(f, Vector) else f, dtype=np.complex128).reshape(-1)
    if f.size != dim(s):
        raise UsageError("functional has the wrong length")
    x, value = _norming(s, f)
    return Vector(s, x), value


def _normalize_phase(x: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(np.abs(x) > 1e-14)
    if nz.size == 0:
        return x
    lead = x[nz[0]]
    return x * (abs(lead) / lead)


def _check_map(a, dom: SpaceExpr, cod: SpaceExpr) -> np.ndarray:
    a = numkernel.as_matrix(a)
    if a.shape != (dim(cod), dim(dom)):
        raise UsageError(f"map of shape {a.shape} does not go from dimension {dim(dom)} to {dim(cod)}")
    return a


def _ascent(a, dom, cod, x, max_iter=200):
    # Alternating maximization: norming functional on the codomain, then
    # norming vector on the domain. The ratio never decreases.
    ratio = _norm(cod, a @ x)
    for _ in range(max_iter):
        y = a @ x
        if not np.any(y):
            break
        w, _ = _norming(dual_space(cod), y)
        x_new, _ = _norming(dom, a.T @ w)
        new_ratio = _norm(cod, a @ x_new)
        if new_ratio <= ratio * (1 + 1e-15) + 1e-300:
            if new_ratio > ratio:
                x, ratio = x_new, new_ratio
            break
        x, ratio = x_new, new_ratio
    return x, ratio


def operator_norm_estimate(
    a, dom: SpaceExpr, cod: SpaceExpr, restarts: int = 64, seed: int = 0
) -> tuple[float, Vector]:
    """Lower bound on the operator norm of ``a: dom -> cod`` with the vector attaining it.

    Exact (up to SVD accuracy) when both spaces are Euclidean. Otherwise the
    starts are the all-ones vector, each basis vector, then ``restarts``
    random vectors drawn from ``seed + k``; each is refined by alternating
    maximization and the best ratio is returned.
    """
    a = _check_map(a, dom, cod)
    if restarts < 1:
        raise UsageError("restarts must be at least 1")
    n = dim(dom)
    if n == 0 or a.shape[0] == 0:
        return 0.0, Vector(dom, _unit_axis(dom))
    if is_l2_type(dom) and is_l2_type(cod):
        res = numkernel.svd(a)
        x = _normalize_phase(res.right[:, 0])
        return float(res.singulars[0]), Vector(dom, x)

    starts = [np.ones(n, dtype=np.complex128)]
    for k in range(n):
        e = np.zeros(n, dtype=np.complex128)
        e[k] = 1.0
        starts.append(e)
    for k in range(restarts):
        rng = np.random.default_rng(seed + k)
        starts.append(rng.normal(size=n) + 1j * rng.normal(size=n))

    best_ratio, best_x = -1.0, None
    for x0 in starts:
        size = _norm(dom, x0)
        if size == 0.0:
            continue
        x, ratio = _ascent(a, dom, cod, x0 / size)
        if ratio > best_ratio + 1e-12:
            best_ratio, best_x = ratio, x
    x = _normalize_phase(best_x)
    # recompute from the final vector so the bound is a genuine ratio
    return _norm(cod, a @ x) / _norm(dom, x), Vector(dom, x)


@dataclass(frozen=True)
class ContractionReport:
    passed: bool
    estimate: float
    witness: Vector
    spectral_checked: bool

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "estimate": self.estimate,
            "witness": [[float(z.real), float(z.imag)] for z in self.witness.coords],
            "spectral_checked": self.spectral_checked,
        }


def is_contraction(
    a, dom: SpaceExpr, cod: SpaceExpr, tol: float = 1e-9, restarts: int = 64, seed: int = 0
) -> ContractionReport:
    """Decide whether ``a`` has operator norm at most ``1 + tol``.

    A ``False`` verdict is always backed by the witness vector. A ``True``
    verdict is exact only when both spaces are Euclidean; otherwise it means
    the search found nothing larger.
    """
    estimate, witness = operator_norm_estimate(a, dom, cod, restarts, seed)
    l2 = is_l2_type(dom) and is_l2_type(cod)
    passed = estimate <= 1 + tol
    if l2:
        passed = passed and numkernel.spectral_norm(_check_map(a, dom, cod)) <= 1 + tol
    return ContractionReport(passed=passed, estimate=estimate, witness=witness, spectral_checked=l2)


# ---------------------------------------------------------------- text grammar

_TOKEN = re.compile(r"\s*(?:(?P<name>[A-Za-z][A-Za-z0-9]*)|(?P<int>\d+)|(?P<punct>[(),]))")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def _peek(self):
        m = _TOKEN.match(self.text, self.pos)
        if m is None or m.end() == self.pos:
            return None, None, self._skip_ws()
        kind = m.lastgroup
        return kind, m.group(kind), m.start(kind)

    def _skip_ws(self):
        p = self.pos
        while p < len(self.text) and self.text[p].isspace():
            p += 1
        return p

    def _take(self, kind=None, value=None):
        m = _TOKEN.match(self.text, self.pos)
        where = self._skip_ws()
        if m is None or m.end() == self.pos:
            what = "end of input" if where >= len(self.text) else repr(self.text[where])
            raise ParseError(f"unexpected {what}", where)
        got_kind = m.lastgroup
        got = m.group(got_kind)
        if (kind and got_kind != kind) or (value and got != value):
            raise ParseError(f"expected {value or kind}, found {got!r}", m.start(got_kind))
        self.pos = m.end()
        return got, m.start(got_kind)

    def expr(self) -> SpaceExpr:
        name, where = self._take("name")
        if name == "C":
            return Scalar()
        if name == "l2":
            self._take("punct", "(")
            n, _ = self._take("int")
            self._take("punct", ")")
            return L2(int(n))
        if name == "dual":
            self._take("punct", "(")
            child = self.expr()
            self._take("punct", ")")
            return Dual(child)
        ctor = {"sum1": SumL1, "sum2": SumL2, "sup": ProdSup}.get(name)
        if ctor is None:
            raise ParseError(f"unknown constructor {name!r}", where)
        self._take("punct", "(")
        children = []
        kind, value, _ = self._peek()
        if not (kind == "punct" and value == ")"):
            children.append(self.expr())
            while True:
                kind, value, _ = self._peek()
                if kind == "punct" and value == ",":
                    self._take()
                    children.append(self.expr())
                else:
                    break
        self._take("punct", ")")
        return ctor(children)


def parse_space(text: str) -> SpaceExpr:
    """Parse ``C``, ``l2(n)``, ``sum1(..)``, ``sum2(..)``, ``sup(..)``, ``dual(..)``.

    >>> parse_space("sum1(C, l2(3))")
    SumL1(children=(Scalar(), L2(n=3)))
    """
    p = _Parser(text)
    expr = p.expr()
    end = p._skip_ws()
    if end != len(text):
        raise ParseError(f"trailing input {text[end:]!r}", end)
    return expr


def format_space(s: SpaceExpr) -> str:
    if isinstance(s, Scalar):
        return "C"
    if isinstance(s, L2):
        return f"l2({s.n})"
    if isinstance(s, Dual):
        return f"dual({format_space(s.child)})"
    name = {SumL1: "sum1", SumL2: "sum2", ProdSup: "sup"}[type(s)]
    return f"{name}({','.join(format_space(c) for c in s.children)})"


# ------------------------------------------------------------------ suites

_CHAIN_BASE = (
    Scalar(),
    L2(2),
    L2(3),
    SumL1([Scalar(), Scalar()]),
    ProdSup([Scalar(), Scalar()]),
    Dual(SumL1([Scalar(), Scalar()])),
)


def chain_children(max_dim: int = 6) -> list[tuple]:
    """Every multiset (two or more) of base summands with total dimension <= max_dim."""
    out = []
    for size in range(2, max_dim + 1):
        for combo in itertools.combinations_with_replacement(_CHAIN_BASE, size):
            if sum(dim(c) for c in combo) <= max_dim:
                out.append(combo)
    return out


def expression_family(max_dim: int = 6) -> list[SpaceExpr]:
    """Deterministic spread of expressions up to ``max_dim``, nested to depth three."""
    leaves = [Scalar(), L2(0), L2(1), L2(2), L2(3)]
    family = list(leaves)
    ctors = (SumL1, SumL2, ProdSup)
    firsts = []
    for ctor in ctors:
        for children in ([Scalar(), Scalar()], [Scalar(), L2(2)], [L2(2), L2(3)], [Scalar(), L2(0), Scalar()],
                         [Scalar()] * 3):
            e = ctor(children)
            if dim(e) <= max_dim:
                firsts.append(e)
    family += firsts + [Dual(e) for e in firsts]
    for outer in ctors:
        for inner in firsts:
            for other in (Scalar(), Dual(SumL1([Scalar(), Scalar()]))):
                e = outer([inner, other])
                if dim(e) <= max_dim and type(inner) is not outer:
                    family.append(e)
    return family


def law_suite(max_dim: int = 6, seed: int = 0, vectors: int = 200, restarts: int = 16) -> list[CheckReport]:
    reports = []
    family = expression_family(max_dim)
    rng = np.random.default_rng(seed)
    axiom_failures = []
    pairing_failures = []
    for s in family:
        d = dim(s)
        ds = dual_space(s)
        for _ in range(vectors):
            v = rng.normal(size=d) + 1j * rng.normal(size=d)
            w = rng.normal(size=d) + 1j * rng.normal(size=d)
            lam = complex(rng.normal(), rng.normal())
            nv, nw = norm(s, v), norm(s, w)
            if abs(norm(s, lam * v) - abs(lam) * nv) > 1e-12 * max(1.0, abs(lam) * nv):
                axiom_failures.append(["homogeneity", format_space(s)])
            if norm(s, v + w) > nv + nw + 1e-12 * max(1.0, nv + nw):
                axiom_failures.append(["triangle", format_space(s)])
            if d and nv <= 1e-12:
                axiom_failures.append(["positivity", format_space(s)])
            bound = nv * norm(ds, w)
            if abs(pairing(v, w)) > bound + 1e-12 * max(1.0, bound):
                pairing_failures.append(format_space(s))
        if d and norm(s, np.zeros(d)) != 0.0:
            axiom_failures.append(["zero", format_space(s)])
    reports.append(CheckReport("norm_axioms", not axiom_failures,
                               {"expressions": len(family), "vectors": vectors, "failures": axiom_failures[:20]}))
    reports.append(CheckReport("duality_pairing_bound", not pairing_failures,
                               {"expressions": len(family), "failures": pairing_failures[:20]}))

    dual_free = [s for s in family if "dual" not in format_space(s)]
    bad = [format_space(s) for s in dual_free if dual_space(dual_space(s)) != s]
    reports.append(CheckReport("dual_involution", not bad, {"expressions": len(dual_free), "failures": bad}))

    cases = chain_children(max_dim)
    chain_bad, pointwise_bad, reverse_missing = [], [], []
    for children in cases:
        d = sum(dim(c) for c in children)
        eye = numkernel.identity(d)
        s1, s2, sp = SumL1(children), SumL2(children), ProdSup(children)
        label = format_space(SumL1(children))[5:-1]
        for dom, cod in ((s1, s2), (s2, sp)):
            if not is_contraction(eye, dom, cod, restarts=restarts, seed=seed).passed:
                chain_bad.append([label, format_space(dom), format_space(cod)])
        for dom, cod in ((s2, s1), (sp, s2)):
            rep = is_contraction(eye, dom, cod, restarts=restarts, seed=seed)
            # the witness must itself exhibit the failure
            ratio = norm(cod, rep.witness.coords) / norm(dom, rep.witness.coords)
            if rep.passed or ratio <= 1 + 1e-9:
                reverse_missing.append([label, format_space(dom), format_space(cod)])
        for _ in range(5):
            x = rng.normal(size=d) + 1j * rng.normal(size=d)
            if not norm(s1, x) + 1e-12 >= norm(s2, x) >= norm(sp, x) - 1e-12:
                pointwise_bad.append(label)
    reports.append(CheckReport("contraction_chain", not chain_bad,
                               {"cases": len(cases), "failures": chain_bad}))
    reports.append(CheckReport("reverse_chain_witnessed", not reverse_missing,
                               {"cases": len(cases), "failures": reverse_missing}))
    reports.append(CheckReport("pointwise_norm_chain", not pointwise_bad,
                               {"cases": len(cases), "failures": pointwise_bad}))
    return reports
