import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from starban import numkernel as nk
from starban.errors import NumericalFailure, UsageError

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False, allow_subnormal=False)


@st.composite
def matrices(draw, max_side=7):
    rows = draw(st.integers(0, max_side))
    cols = draw(st.integers(0, max_side))
    re = draw(hnp.arrays(np.float64, (rows, cols), elements=finite))
    im = draw(hnp.arrays(np.float64, (rows, cols), elements=finite))
    return re + 1j * im


def random_unitary(rng, n):
    q, r = np.linalg.qr(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def test_matmul_identity_law():
    m = np.array([[1 + 2j, 3], [-1j, 0.5]])
    assert np.array_equal(nk.matmul(nk.identity(2), m), m)


def test_matmul_degenerate_dims():
    out = nk.matmul(np.zeros((0, 3)), np.ones((3, 4)))
    assert out.shape == (0, 4)
    assert nk.matmul(np.ones((2, 0)), np.ones((0, 3))).shape == (2, 3)
    assert not np.any(nk.matmul(np.ones((2, 0)), np.ones((0, 3))))


def test_matmul_nilpotent():
    n = np.array([[0, 1], [0, 0]])
    assert not np.any(nk.matmul(n, n))


def test_matmul_mismatch():
    with pytest.raises(UsageError):
        nk.matmul(np.ones((2, 3)), np.ones((2, 3)))


def test_non_finite_rejected():
    with pytest.raises(UsageError):
        nk.svd([[np.nan, 0], [0, 1]])
    with pytest.raises(UsageError):
        nk.frobenius_norm([[np.inf]])


def test_bad_tol():
    with pytest.raises(UsageError):
        nk.svd(np.eye(2), tol=0)


@pytest.mark.parametrize(
    "m, expected",
    [
        (np.eye(2), [1, 1]),
        (np.diag([3, 4]), [4, 3]),
        ([[0, 2], [0, 0]], [2, 0]),
    ],
)
def test_svd_examples(m, expected):
    res = nk.svd(m)
    assert res.singulars == pytest.approx(expected, abs=1e-14)


def test_svd_empty():
    res = nk.svd(np.zeros((0, 3)))
    assert res.singulars.size == 0
    assert res.left.shape == (0, 0) and res.right.shape == (3, 0)


@pytest.mark.parametrize(
    "m, fro, op, nuc",
    [
        (np.diag([3, 4]), 5, 4, 7),
        (np.eye(2), np.sqrt(2), 1, 2),
        (np.array([[1, 0], [0, 0]]), 1, 1, 1),
        (np.zeros((0, 0)), 0, 0, 0),
        (np.zeros((3, 0)), 0, 0, 0),
    ],
)
def test_norm_examples(m, fro, op, nuc):
    assert nk.frobenius_norm(m) == pytest.approx(fro, abs=1e-14)
    assert nk.spectral_norm(m) == pytest.approx(op, abs=1e-14)
    assert nk.nuclear_norm(m) == pytest.approx(nuc, abs=1e-14)


@given(matrices())
def test_svd_contract(m):
    res = nk.svd(m)
    k = min(m.shape)
    assert res.left.shape == (m.shape[0], k) and res.right.shape == (m.shape[1], k)
    assert nk.frobenius_norm(res.reconstruct() - m) <= 1e-12 * max(1.0, nk.frobenius_norm(m))
    assert np.all(res.singulars >= 0)
    assert np.all(np.diff(res.singulars) <= 0)
    assert np.allclose(res.left.conj().T @ res.left, np.eye(k), atol=1e-12)
    assert np.allclose(res.right.conj().T @ res.right, np.eye(k), atol=1e-12)


@given(matrices())
def test_singulars_match_lapack(m):
    # LAPACK serves only as an outside reference here
    expected = np.linalg.svd(m, compute_uv=False) if min(m.shape) else np.zeros(0)
    assert np.allclose(nk.svd(m).singulars, expected, atol=1e-11 * max(1.0, nk.frobenius_norm(m)))


@given(matrices())
def test_norm_chain(m):
    s, f, n = nk.spectral_norm(m), nk.frobenius_norm(m), nk.nuclear_norm(m)
    assert s <= f + 1e-12 * max(1.0, f)
    assert f <= n + 1e-12 * max(1.0, n)


@pytest.mark.parametrize("seed", range(10))
def test_unitary_invariance(seed):
    rng = np.random.default_rng(seed)
    n, k = rng.integers(1, 7, size=2)
    m = rng.normal(size=(n, k)) + 1j * rng.normal(size=(n, k))
    u, v = random_unitary(rng, n), random_unitary(rng, k)
    t = u @ m @ v
    for norm in (nk.frobenius_norm, nk.spectral_norm, nk.nuclear_norm):
        assert abs(norm(t) - norm(m)) <= 1e-9


@pytest.mark.parametrize("seed", range(10))
def test_rank_one_norms_coincide(seed):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=4) + 1j * rng.normal(size=4)
    y = rng.normal(size=3) + 1j * rng.normal(size=3)
    m = np.outer(x, y)
    f = nk.frobenius_norm(m)
    assert nk.spectral_norm(m) == pytest.approx(f, abs=1e-9)
    assert nk.nuclear_norm(m) == pytest.approx(f, abs=1e-9)


def test_svd_64_square():
    rng = np.random.default_rng(3)
    m = rng.normal(size=(64, 64)) + 1j * rng.normal(size=(64, 64))
    res = nk.svd(m)
    assert nk.frobenius_norm(res.reconstruct() - m) <= 1e-12 * nk.frobenius_norm(m)


def test_svd_rank_deficient_completes_left_basis():
    m = np.array([[1, 1], [1, 1], [0, 0]], dtype=complex)
    res = nk.svd(m)
    assert res.singulars == pytest.approx([2, 0], abs=1e-14)
    assert np.allclose(res.left.conj().T @ res.left, np.eye(2), atol=1e-14)


def test_non_convergence_reports_failure(monkeypatch):
    monkeypatch.setattr(nk, "MAX_SWEEPS", 0)
    with pytest.raises(NumericalFailure):
        nk.svd([[1, 2], [3, 4]])


def test_matrix_json_roundtrip():
    m = np.array([[1 + 2j, -3], [0.5j, 4]])
    enc = nk.matrix_to_json(m)
    assert enc == {"rows": 2, "cols": 2, "entries": [[1.0, 2.0], [-3.0, 0.0], [0.0, 0.5], [4.0, 0.0]]}
    assert np.array_equal(nk.matrix_from_json(enc), m)
    assert nk.matrix_from_json({"rows": 0, "cols": 2, "entries": []}).shape == (0, 2)


def test_matrix_json_rejects_bad_lengths():
    with pytest.raises(UsageError):
        nk.matrix_from_json({"rows": 2, "cols": 2, "entries": [[1, 0]]})
    with pytest.raises(UsageError):
        nk.matrix_from_json({"rows": 2})
