"""Dense complex linear algebra: products, adjoints, SVD and the three matrix norms.

Matrices are plain 2-D ``numpy.complex128`` arrays. Zero-sized shapes such as
``(0, 3)`` are valid and stand for maps into or out of the zero space.

The SVD is a one-sided (Hestenes) Jacobi iteration on columns. Nothing in this
module draws random numbers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalFailure, UsageError

__all__ = [
    "SvdResult",
    "as_matrix",
    "adjoint",
    "matmul",
    "identity",
    "svd",
    "frobenius_norm",
    "spectral_norm",
    "nuclear_norm",
    "matrix_to_json",
    "matrix_from_json",
]

DEFAULT_TOL = 1e-12
MAX_SWEEPS = 100
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class SvdResult:
    """Thin SVD ``m = left @ diag(singulars) @ adjoint(right)``.

    ``left`` is rows x k and ``right`` is cols x k with k = min(rows, cols);
    both have orthonormal columns and ``singulars`` is non-increasing.
    """

    left: np.ndarray
    singulars: np.ndarray
    right: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.left * self.singulars) @ self.right.conj().T


def as_matrix(m) -> np.ndarray:
    """Coerce ``m`` to a finite 2-D complex array (copying only when needed)."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2:
        raise UsageError(f"expected a 2-D matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise UsageError("matrix entries must be finite")
    return a


def adjoint(m) -> np.ndarray:
    return as_matrix(m).conj().T


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.complex128)


def matmul(a, b) -> np.ndarray:
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise UsageError(f"cannot multiply {a.shape} by {b.shape}")
    if a.shape[1] == 0:
        return np.zeros((a.shape[0], b.shape[1]), dtype=np.complex128)
    return a @ b


def _complete_columns(u: np.ndarray, missing: list[int]) -> None:
    # Fill the listed (zero) columns of u with an orthonormal completion, in place.
    rows = u.shape[0]
    for j in missing:
        for k in range(rows):
            cand = np.zeros(rows, dtype=np.complex128)
            cand[k] = 1.0
            for _ in range(2):
                cand -= u @ (u.conj().T @ cand)
            norm = np.linalg.norm(cand)
            if norm > 0.5:
                u[:, j] = cand / norm
                break


def _jacobi_tall(a: np.ndarray) -> SvdResult:
    # One-sided Jacobi for rows >= cols. Rotates columns of a (and of v)
    # until every pair is numerically orthogonal.
    m, n = a.shape
    a = a.copy()
    v = identity(n)
    threshold = 8.0 * max(m, 1) * _EPS
    norms2 = np.einsum("ij,ij->j", a.conj(), a).real
    # columns this small are flushed to zero, costing at most eps * ||a||_F
    negligible = (_EPS * np.sqrt(norms2.sum())) ** 2 / max(n, 1)
    converged = n < 2
    for _ in range(MAX_SWEEPS):
        if converged:
            break
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                alpha = norms2[p]
                beta = norms2[q]
                if alpha <= negligible or beta <= negligible:
                    for j in (p, q):
                        if 0.0 < norms2[j] <= negligible:
                            a[:, j] = 0.0
                            norms2[j] = 0.0
                    continue
                ap = a[:, p]
                aq = a[:, q]
                gamma = np.vdot(ap, aq)
                mag = abs(gamma)
                if mag <= threshold * np.sqrt(alpha) * np.sqrt(beta):
                    continue
                rotated = True
                phase = gamma / mag
                zeta = (beta - alpha) / (2.0 * mag)
                t = (1.0 if zeta >= 0 else -1.0) / (abs(zeta) + np.sqrt(1.0 + zeta * zeta))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = c * t
                aq_ph = aq * phase.conjugate()
                new_p = c * ap - s * aq_ph
                new_q = s * ap + c * aq_ph
                a[:, p] = new_p
                a[:, q] = new_q
                vp = v[:, p]
                vq = v[:, q] * phase.conjugate()
                v[:, p], v[:, q] = c * vp - s * vq, s * vp + c * vq
                norms2[p] = np.vdot(new_p, new_p).real
                norms2[q] = np.vdot(new_q, new_q).real
        converged = not rotated
    if not converged:
        return None  # type: ignore[return-value]
    sigma = np.sqrt(np.einsum("ij,ij->j", a.conj(), a).real)
    order = np.argsort(-sigma, kind="stable")
    sigma = sigma[order]
    a = a[:, order]
    v = v[:, order]
    u = np.zeros((m, n), dtype=np.complex128)
    nonzero = sigma > 0.0
    u[:, nonzero] = a[:, nonzero] / sigma[nonzero]
    missing = [j for j in range(n) if not nonzero[j]]
    if missing:
        _complete_columns(u, missing)
    return SvdResult(left=u, singulars=sigma, right=v)


def svd(m, tol: float = DEFAULT_TOL) -> SvdResult:
    """Thin singular value decomposition by one-sided Jacobi rotations.

    Raises ``NumericalFailure`` when the sweep cap is hit or the
    reconstruction error exceeds ``tol * max(1, ||m||_F)``.

    >>> svd([[3, 0], [0, 4]]).singulars.tolist()
    [4.0, 3.0]
    """
    if not tol > 0:
        raise UsageError("tol must be positive")
    a = as_matrix(m)
    rows, cols = a.shape
    k = min(rows, cols)
    if k == 0:
        return SvdResult(
            left=np.zeros((rows, 0), dtype=np.complex128),
            singulars=np.zeros(0),
            right=np.zeros((cols, 0), dtype=np.complex128),
        )
    if rows >= cols:
        res = _jacobi_tall(a)
    else:
        res = _jacobi_tall(a.conj().T)
        if res is not None:
            res = SvdResult(left=res.right, singulars=res.singulars, right=res.left)
    scale = max(1.0, float(np.linalg.norm(a)))
    if res is None:
        raise NumericalFailure(f"Jacobi SVD did not converge in {MAX_SWEEPS} sweeps", float("nan"))
    residual = float(np.linalg.norm(res.reconstruct() - a))
    if residual > tol * scale:
        raise NumericalFailure("SVD reconstruction out of tolerance", residual)
    return res


def frobenius_norm(m) -> float:
    a = as_matrix(m)
    return float(np.sqrt(np.sum(a.real**2 + a.imag**2)))


def spectral_norm(m, tol: float = DEFAULT_TOL) -> float:
    s = svd(m, tol).singulars
    return float(s[0]) if s.size else 0.0


def nuclear_norm(m, tol: float = DEFAULT_TOL) -> float:
    return float(np.sum(svd(m, tol).singulars))


def matrix_to_json(m) -> dict:
    """Encode as ``{"rows", "cols", "entries": [[re, im], ...]}`` in row-major order."""
    a = as_matrix(m)
    return {
        "rows": int(a.shape[0]),
        "cols": int(a.shape[1]),
        "entries": [[float(z.real), float(z.imag)] for z in a.reshape(-1)],
    }


def matrix_from_json(obj: dict) -> np.ndarray:
    try:
        rows = int(obj["rows"])
        cols = int(obj["cols"])
        entries = obj["entries"]
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"bad matrix encoding: {exc}") from exc
    if rows < 0 or cols < 0 or len(entries) != rows * cols:
        raise UsageError(f"matrix encoding has {len(entries)} entries for shape ({rows}, {cols})")
    flat = [complex(float(re), float(im)) for re, im in entries]
    return as_matrix(np.array(flat, dtype=np.complex128).reshape(rows, cols))
