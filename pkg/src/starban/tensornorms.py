"""Projective, injective and Hilbert norms on C^n (x) C^m with certificates.

An element ``sum_ij c[i, j] e_i (x) e_j`` is stored by its coefficient
matrix ``c``; the elementary tensor ``x (x) y`` has coefficients ``outer(x, y)``.

With Euclidean factors the three norms are the nuclear, spectral and
Frobenius norms of ``c``. The projective value is not taken on trust: every
call returns an explicit decomposition (upper bound) and an explicit
functional of injective norm one (lower bound) and checks that they meet.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import numkernel
from .errors import NumericalFailure, UsageError
from .report import CheckReport

__all__ = [
    "TensorElement",
    "NormCertificate",
    "hilbert_norm",
    "injective_norm",
    "projective_norm",
    "tensor_pairing",
    "correction_witness",
    "contraction_direction_check",
]


@dataclass(frozen=True)
class TensorElement:
    coeffs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coeffs", numkernel.as_matrix(self.coeffs))

    @property
    def n(self) -> int:
        return self.coeffs.shape[0]

    @property
    def m(self) -> int:
        return self.coeffs.shape[1]

    @classmethod
    def elementary(cls, x, y) -> "TensorElement":
        return cls(np.outer(np.asarray(x, dtype=complex), np.asarray(y, dtype=complex)))

    @classmethod
    def from_terms(cls, n: int, m: int, terms) -> "TensorElement":
        c = np.zeros((n, m), dtype=np.complex128)
        for x, y in terms:
            c += np.outer(x, y)
        return cls(c)


@dataclass(frozen=True)
class NormCertificate:
    """Bracket ``lower <= value <= upper`` for a projective tensor norm.

    ``upper_witness`` is a list of ``(x, y)`` pairs whose elementary tensors
    sum to the element, with ``upper = sum |x| |y|``. ``lower_witness`` is a
    matrix ``W`` with spectral norm one and ``lower = |<element, W>| / |W|``.
    """

    value: float
    upper: float
    lower: float
    upper_witness: list = field(repr=False)
    lower_witness: np.ndarray = field(repr=False)

    @property
    def gap(self) -> float:
        return self.upper - self.lower

    def reconstruction_error(self, t: TensorElement) -> float:
        rebuilt = TensorElement.from_terms(t.n, t.m, self.upper_witness).coeffs
        return numkernel.frobenius_norm(rebuilt - t.coeffs)

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "upper": self.upper,
            "lower": self.lower,
            "gap": self.gap,
            "upper_witness": [
                {"left": _vec_json(x), "right": _vec_json(y)} for x, y in self.upper_witness
            ],
            "lower_witness": numkernel.matrix_to_json(self.lower_witness),
        }


def _vec_json(v) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(v).reshape(-1)]


def tensor_pairing(t: TensorElement, w) -> complex:
    """``<t, W> = sum_ij c[i, j] conj(W[i, j])``; bounded by ``proj(t) * |W|_op``."""
    w = numkernel.as_matrix(w)
    if w.shape != t.coeffs.shape:
        raise UsageError("pairing needs matching shapes")
    return complex(np.sum(t.coeffs * w.conj()))


def hilbert_norm(t: TensorElement) -> float:
    return numkernel.frobenius_norm(t.coeffs)


def injective_norm(t: TensorElement, tol: float = numkernel.DEFAULT_TOL) -> float:
    return numkernel.spectral_norm(t.coeffs, tol)


def projective_norm(t: TensorElement, tol: float = 1e-9) -> NormCertificate:
    """Certified projective norm.

    The SVD ``c = sum s_k u_k v_k^H`` yields the decomposition
    ``sum (s_k u_k) (x) conj(v_k)`` and the partial isometry
    ``W = sum u_k v_k^H``. Raises ``NumericalFailure`` if the two bounds are
    more than ``tol`` apart.
    """
    if not tol > 0:
        raise UsageError("tol must be positive")
    res = numkernel.svd(t.coeffs)
    keep = res.singulars > 0.0
    terms = [
        (res.singulars[k] * res.left[:, k], res.right[:, k].conj())
        for k in np.flatnonzero(keep)
    ]
    upper = float(sum(np.linalg.norm(x) * np.linalg.norm(y) for x, y in terms))
    w = res.left[:, keep] @ res.right[:, keep].conj().T
    if w.size == 0:
        w = np.zeros(t.coeffs.shape, dtype=np.complex128)
    w_norm = numkernel.spectral_norm(w)
    lower = abs(tensor_pairing(t, w)) / w_norm if w_norm > 0 else 0.0
    value = float(np.sum(res.singulars))
    cert = NormCertificate(value=value, upper=upper, lower=lower, upper_witness=terms, lower_witness=w)
    if cert.gap > tol:
        raise NumericalFailure("projective norm certificate does not close", cert.gap)
    return cert


def embedded_identity(n: int, m: int) -> TensorElement:
    c = np.zeros((n, m), dtype=np.complex128)
    for k in range(min(n, m)):
        c[k, k] = 1.0
    return TensorElement(c)


def correction_witness(n: int, m: int) -> dict:
    """Element of C^n (x) C^m on which the comparison map to l2(n*m) shrinks norms.

    The embedded identity of size d = min(n, m) has projective norm d and
    Hilbert norm sqrt(d), so the canonical contraction onto l2(n*m) divides
    its norm by sqrt(d) and has no contractive inverse.
    """
    if n < 2 or m < 2:
        raise UsageError("need n, m >= 2: with a one-dimensional factor the norms agree")
    t = embedded_identity(n, m)
    cert = projective_norm(t)
    hilb = hilbert_norm(t)
    inj = injective_norm(t)
    ratio = cert.value / hilb
    d = min(n, m)
    return {
        "rows": n,
        "cols": m,
        "element": numkernel.matrix_to_json(t.coeffs),
        "projective": cert.value,
        "hilbert": hilb,
        "injective": inj,
        "ratio": ratio,
        "expected_ratio": math.sqrt(d),
        "certificate_gap": cert.gap,
        "upper_witness": cert.to_json()["upper_witness"],
        "lower_witness": numkernel.matrix_to_json(cert.lower_witness),
        "strict_contraction": ratio > 1 + 1e-9,
        "note": (
            f"l2({n}) (x) l2({m}) -> l2({n * m}) is a contraction that divides the norm of this "
            f"element by {ratio:.12g}; its inverse has norm at least sqrt({d}), so the map is a "
            "bijection of the underlying spaces but not an isomorphism of Banach spaces. A bijective "
            "contraction is an epimorphism, yet epimorphism plus density does not give an isometry."
        ),
    }


def random_tensor(rng: np.random.Generator, maxdim: int, min_dim: int = 1) -> TensorElement:
    n = int(rng.integers(min_dim, maxdim + 1))
    m = int(rng.integers(min_dim, maxdim + 1))
    rank = int(rng.integers(1, min(n, m) + 1))
    left = rng.normal(size=(n, rank)) + 1j * rng.normal(size=(n, rank))
    right = rng.normal(size=(rank, m)) + 1j * rng.normal(size=(rank, m))
    return TensorElement(left @ right)


def contraction_direction_check(samples: int = 1000, maxdim: int = 6, seed: int = 0, slack: float = 1e-12) -> CheckReport:
    """Check ``projective >= hilbert >= injective`` on seeded random tensors."""
    if samples < 1:
        raise UsageError("samples must be at least 1")
    rng = np.random.default_rng(seed)
    violations = []
    min_ph = math.inf
    min_hi = math.inf
    for k in range(samples):
        t = random_tensor(rng, maxdim)
        proj = projective_norm(t).value
        hilb = hilbert_norm(t)
        inj = injective_norm(t)
        # relative slack: the norms scale with the entries
        scale = max(1.0, proj)
        if proj < hilb - slack * scale or hilb < inj - slack * scale:
            violations.append({"sample": k, "projective": proj, "hilbert": hilb, "injective": inj})
        min_ph = min(min_ph, proj / hilb)
        min_hi = min(min_hi, hilb / inj)
    return CheckReport(
        "tensor_contraction_direction",
        not violations,
        {
            "samples": samples,
            "maxdim": maxdim,
            "seed": seed,
            "violations": violations,
            "min_projective_over_hilbert": min_ph,
            "min_hilbert_over_injective": min_hi,
        },
    )


def law_suite(max_dim: int = 8, seed: int = 0) -> list[CheckReport]:
    reports = []
    gaps = []
    for d in range(2, max(2, max_dim) + 1):
        w = correction_witness(d, d)
        gaps.append({"d": d, "ratio": w["ratio"], "error": abs(w["ratio"] - math.sqrt(d))})
    reports.append(
        CheckReport("correction_ratio_sqrt_d", all(g["error"] <= 1e-9 for g in gaps), {"cases": gaps})
    )
    reports.append(contraction_direction_check(1000, 6, seed))
    return reports
