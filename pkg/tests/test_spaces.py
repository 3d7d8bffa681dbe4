import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import sphere_ratio_max
from starban import spaces as sp
from starban.errors import ParseError, UsageError
from starban.spaces import L2, Dual, ProdSup, Scalar, SumL1, SumL2

C = Scalar()

leaves = st.one_of(st.just(C), st.integers(0, 3).map(L2))
exprs = st.recursive(
    leaves,
    lambda kids: st.one_of(
        st.lists(kids, min_size=1, max_size=3).map(SumL1),
        st.lists(kids, min_size=1, max_size=3).map(SumL2),
        st.lists(kids, min_size=1, max_size=3).map(ProdSup),
        kids.map(Dual),
    ),
    max_leaves=6,
)


def coords(draw_seed, s):
    rng = np.random.default_rng(draw_seed)
    d = sp.dim(s)
    return rng.normal(size=d) + 1j * rng.normal(size=d)


@pytest.mark.parametrize(
    "s, d", [(C, 1), (SumL1([C, L2(3)]), 4), (Dual(ProdSup([C, C])), 2), (L2(0), 0), (SumL2([]), 0)]
)
def test_dim(s, d):
    assert sp.dim(s) == d


@pytest.mark.parametrize("ctor, value", [(SumL1, 7), (SumL2, 5), (ProdSup, 4)])
def test_norm_examples(ctor, value):
    assert sp.norm(ctor([C, C]), [3, 4]) == pytest.approx(value, abs=1e-14)


def test_norm_nested_and_dual():
    s = SumL1([L2(2), ProdSup([C, C])])
    assert sp.norm(s, [3, 4, 1, -2j]) == pytest.approx(7, abs=1e-14)
    assert sp.norm(Dual(SumL1([C, C])), [3, 4]) == pytest.approx(4, abs=1e-14)


def test_norm_mismatched_space():
    with pytest.raises(UsageError):
        sp.norm(SumL1([C, C]), [1, 2, 3])
    with pytest.raises(UsageError):
        sp.Vector(L2(2), [1])


@pytest.mark.parametrize(
    "s, expected",
    [
        (SumL1([C, C]), ProdSup([C, C])),
        (L2(5), L2(5)),
        (Dual(ProdSup([L2(2)])), ProdSup([L2(2)])),
        (SumL2([SumL1([C, C]), C]), SumL2([ProdSup([C, C]), C])),
    ],
)
def test_dual_space(s, expected):
    assert sp.dual_space(s) == expected


def test_is_l2_type():
    assert sp.is_l2_type(L2(3))
    assert sp.is_l2_type(SumL2([C, L2(2)]))
    assert sp.is_l2_type(SumL1([L2(3)]))
    assert not sp.is_l2_type(SumL1([C, C]))
    assert sp.is_l2_type(Dual(SumL2([C, C])))


def test_pairing():
    assert sp.pairing([1, 2j], [3, 1]) == 3 + 2j
    with pytest.raises(UsageError):
        sp.pairing([1], [1, 2])


def test_operator_norm_l1_to_l2_matches_sphere_oracle():
    dom, cod = SumL1([C, C]), SumL2([C, C])
    est, witness = sp.operator_norm_estimate(np.eye(2), dom, cod)
    oracle = sphere_ratio_max(np.eye(2), lambda v: sp.norm(dom, v), lambda v: sp.norm(cod, v))
    assert est == pytest.approx(1, abs=1e-12)
    assert oracle == pytest.approx(1, abs=1e-12)
    assert np.count_nonzero(np.abs(witness.coords) > 1e-12) == 1


@pytest.mark.parametrize("n", [1, 2, 5])
def test_operator_norm_isometry(n):
    assert sp.operator_norm_estimate(np.eye(n), L2(n), L2(n))[0] == pytest.approx(1, abs=1e-12)


def test_operator_norm_homogeneous():
    assert sp.operator_norm_estimate(2 * np.eye(2), L2(2), L2(2))[0] == pytest.approx(2, abs=1e-12)


@pytest.mark.parametrize("k", [2, 3, 4])
def test_operator_norm_sup_to_l1(k):
    est, x = sp.operator_norm_estimate(np.eye(k), ProdSup([C] * k), SumL1([C] * k))
    assert est == pytest.approx(k, abs=1e-12)
    assert np.allclose(np.abs(x.coords), 1)


@pytest.mark.parametrize("seed", range(6))
def test_operator_norm_dominates_sphere_samples(seed):
    rng = np.random.default_rng(seed)
    dom = SumL1([C, L2(2)])
    cod = ProdSup([C, C, C])
    a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    est, x = sp.operator_norm_estimate(a, dom, cod)
    brute = sphere_ratio_max(a, lambda v: sp.norm(dom, v), lambda v: sp.norm(cod, v), samples=5000, seed=seed)
    assert est >= brute - 1e-9
    assert est == pytest.approx(sp.norm(cod, a @ x.coords) / sp.norm(dom, x.coords), rel=1e-12)


def test_operator_norm_bad_shape():
    with pytest.raises(UsageError):
        sp.operator_norm_estimate(np.eye(3), L2(2), L2(2))


def test_contraction_examples():
    two = [C, C]
    assert sp.is_contraction(np.eye(2), SumL1(two), SumL2(two)).passed
    assert sp.is_contraction(np.eye(2), SumL2(two), ProdSup(two)).passed
    rep = sp.is_contraction(np.eye(2), ProdSup(two), SumL1(two))
    assert not rep.passed
    assert rep.estimate == pytest.approx(2, abs=1e-12)
    assert np.allclose(rep.witness.coords, [1, 1])


def test_contraction_l2_uses_spectral():
    rep = sp.is_contraction(np.diag([1, 0.5]), L2(2), L2(2))
    assert rep.passed and rep.spectral_checked


@given(exprs, st.integers(0, 2**32 - 1), st.integers(0, 2**32 - 1))
def test_norm_axioms(s, seed_v, seed_w):
    v, w = coords(seed_v, s), coords(seed_w, s)
    nv, nw = sp.norm(s, v), sp.norm(s, w)
    lam = complex(*np.random.default_rng(seed_v).normal(size=2))
    assert sp.norm(s, lam * v) == pytest.approx(abs(lam) * nv, rel=1e-12, abs=1e-300)
    assert sp.norm(s, v + w) <= nv + nw + 1e-12
    assert sp.dim(s) == 0 or nv > 0
    assert sp.norm(s, np.zeros(sp.dim(s))) == 0


@given(exprs, st.integers(0, 2**32 - 1))
def test_pairing_bound_and_norming_vector(s, seed):
    f = coords(seed, s)
    ds = sp.dual_space(s)
    v = coords(seed + 1, s)
    assert abs(sp.pairing(v, f)) <= sp.norm(s, v) * sp.norm(ds, f) * (1 + 1e-12)
    x, value = sp.norming_vector(s, f)
    if sp.dim(s):
        assert sp.norm(s, x) == pytest.approx(1, abs=1e-12)
        assert sp.pairing(x, f) == pytest.approx(value, abs=1e-12 * max(1, value))
        assert value == pytest.approx(sp.norm(ds, f), rel=1e-12)


@given(exprs)
def test_dual_involution_and_dim(s):
    assert sp.dim(sp.dual_space(s)) == sp.dim(s)
    assert sp.norm(sp.dual_space(sp.dual_space(s)), np.ones(sp.dim(s))) == pytest.approx(
        sp.norm(s, np.ones(sp.dim(s))), abs=1e-12
    )
    if "dual" not in sp.format_space(s):
        assert sp.dual_space(sp.dual_space(s)) == s


@given(st.lists(leaves, min_size=1, max_size=4), st.integers(0, 2**32 - 1))
def test_pointwise_chain(children, seed):
    x = coords(seed, SumL1(children))
    n1, n2, ninf = (sp.norm(c(children), x) for c in (SumL1, SumL2, ProdSup))
    assert n1 + 1e-12 >= n2 >= ninf - 1e-12


@given(exprs)
def test_format_parse_roundtrip(s):
    assert sp.parse_space(sp.format_space(s)) == s


def test_parse_examples():
    assert sp.parse_space("sum1(C, l2(3))") == SumL1([C, L2(3)])
    assert sp.parse_space(" dual( sup(C,C) ) ") == Dual(ProdSup([C, C]))
    assert sp.parse_space("sum2()") == SumL2([])


@pytest.mark.parametrize(
    "text, position",
    [("sum1(C,", 7), ("l2(x)", 3), ("foo(C)", 0), ("C C", 2), ("", 0), ("sup(C))", 6)],
)
def test_parse_errors_report_position(text, position):
    with pytest.raises(ParseError) as info:
        sp.parse_space(text)
    assert info.value.position == position
    assert f"position {position}" in str(info.value)


def test_law_suite_small():
    reports = sp.law_suite(max_dim=4, vectors=20, restarts=4)
    assert all(r.passed for r in reports), [r.check for r in reports if not r.passed]
