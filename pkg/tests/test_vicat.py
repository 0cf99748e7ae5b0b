import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from vimod.errors import ArityError, DomainError, SizeCapError
from vimod.vicat import VICategory, VIMorphism, category, degrees_up_to


def _mod_p_product(p, A, B):
    return (A.astype(np.int64) @ B.astype(np.int64)) % p


@st.composite
def chains(draw, q):
    """Three composable VI morphisms a -> b -> c -> d over F_q."""
    cat = category(q)
    dims = sorted(draw(st.lists(st.integers(0, 3), min_size=4, max_size=4)))
    fs = []
    for s, t in zip(dims, dims[1:]):
        hs = cat.homs(s, t)
        fs.append(hs.morphism(draw(st.integers(0, len(hs) - 1))))
    return fs


@settings(max_examples=80, deadline=None)
@given(st.sampled_from([2, 3, 4]).flatmap(lambda q: st.tuples(st.just(q), chains(q))))
def test_composition_is_associative_with_identities(data):
    q, (f, g, h) = data
    cat = category(q)
    assert cat.compose(h, cat.compose(g, f)) == cat.compose(cat.compose(h, g), f)
    assert cat.compose(cat.identity(f.target), f) == f
    assert cat.compose(f, cat.identity(f.source)) == f
    assert cat.compose(g, f).is_injective(cat.F)


@settings(max_examples=50, deadline=None)
@given(st.sampled_from([2, 3, 5]).flatmap(lambda q: st.tuples(st.just(q), chains(q))))
def test_composition_matches_integer_matrix_product_for_prime_fields(data):
    q, (f, g, _) = data
    assert (category(q).compose(g, f).mat == _mod_p_product(q, g.mat, f.mat)).all()


@pytest.mark.parametrize("q,n,a", [(2, 1, 3), (2, 2, 3), (3, 1, 2), (3, 2, 3)])
def test_compose_index_maps_agree_with_direct_composition(q, n, a):
    cat = category(q)
    for f in cat.enumerate(a, a + 1)[:: max(1, cat.hom_count(a, a + 1) // 7)]:
        idx = cat.compose_index_1(f, n)
        src, dst = cat.homs(n, a), cat.homs(n, a + 1)
        for k in range(len(src)):
            assert dst.morphism(int(idx[k])) == cat.compose(f, src.morphism(k))
    for h in cat.enumerate(n - 1, n)[:5]:
        idx = cat.precompose_index_1(h, a)
        for k in range(len(cat.homs(n, a))):
            assert cat.homs(n - 1, a).morphism(int(idx[k])) == cat.compose(cat.homs(n, a).morphism(k), h)


def test_product_index_maps():
    cat = category(2)
    n = (1, 1)
    f = cat.morphism_m([np.array([[1, 0], [1, 1], [0, 1]]), np.array([[0, 1], [1, 0]])])
    idx = cat.compose_index(f, n)
    src, dst = cat.product_homs(n, f.source), cat.product_homs(n, f.target)
    assert len(idx) == len(src) == 3 * 3
    for k, g in enumerate(src):
        assert dst.morphism(int(idx[k])) == cat.compose(f, g)
        assert src.index_of(g) == k
    assert len(dst) == cat.hom_count(n, f.target) == 7 * 3


def test_hom_counts():
    cat = category(2)
    assert cat.hom_count(2, 3) == 42
    assert cat.hom_count((1, 2), (2, 2)) == 3 * 6
    assert category(3).hom_count(0, 4) == 1
    assert cat.hom_count(3, 2) == 0
    with pytest.raises(ArityError):
        cat.hom_count((1,), (1, 2))


def test_degrees_in_window():
    assert list(degrees_up_to(1, 2)) == [(0,), (1,), (2,)]
    assert len(list(degrees_up_to(2, 3))) == 10


def test_rejects_bad_morphisms():
    cat = category(2)
    with pytest.raises(DomainError):
        cat.morphism(np.array([[1, 1], [1, 1]]))
    with pytest.raises(DomainError):
        cat.compose(cat.identity(2), cat.identity(3))
    with pytest.raises(DomainError):
        cat.homs(1, 2).index_of(np.array([[[0], [0]]], dtype=np.uint8))
    with pytest.raises(SizeCapError):
        VICategory(3, count_cap=100).homs(3, 3)
    with pytest.raises(DomainError):
        cat.sigma((0, 2))


def test_structural_morphisms():
    cat = category(3)
    for f in cat.enumerate(1, 2):
        for g in cat.enumerate(2, 2)[:6]:
            assert cat.iota(cat.compose(g, f)) == cat.compose(cat.iota(g), cat.iota(f))
    # every sigma(c) fixes the inclusion varpi
    for c in itertools.product(range(3), repeat=2):
        assert cat.compose(cat.sigma(c), cat.varpi(2)) == cat.varpi(2)
    assert len(cat.u_group(2)) == 9
    assert cat.sigma((1,), a=(1, 0), i=0).parts[1] == cat.identity(0)
    assert cat.varpi((1, 2), i=1).target == (1, 3)
    with pytest.raises(ArityError):
        cat.varpi((1, 2), i=2)


@pytest.mark.parametrize("q,n,a", [(2, 1, 2), (2, 2, 3), (3, 2, 2), (4, 1, 2)])
def test_reduced_forms(q, n, a):
    cat = category(q)
    mats = cat.homs(n, a + 1).mats
    fbar_batch, c_batch = cat.reduce_batch(mats)
    reps = set()
    for k, f in enumerate(cat.enumerate(n, a + 1)):
        fbar, c = cat.reduce_morphism(f)
        assert (fbar_batch[k] == fbar.mat).all() and tuple(c_batch[k]) == c
        assert cat.compose(cat.sigma(c), f) == fbar
        assert cat.reduce_morphism(fbar)[0] == fbar
        j = cat.pivot_column(f)
        if j is not None:
            assert not fbar.mat[1:, j].any()
        # the reduced form is constant on U-orbits
        for g in cat.u_group(a)[:4]:
            assert cat.reduce_morphism(cat.compose(g, f))[0] == fbar
        reps.add(fbar)
    # one reduced form per orbit
    orbits = {frozenset(cat.u_orbit(f)) for f in cat.enumerate(n, a + 1)}
    assert len(reps) == len(orbits)


def test_reduce_examples():
    cat = category(2)
    f = VIMorphism.from_matrix(np.array([[1, 0], [1, 1], [1, 0]]))
    fbar, c = cat.reduce_morphism(f)
    assert c == (1, 1)
    assert fbar.rows() == [[1, 0], [0, 1], [0, 0]]
    f0 = cat.identity(0)
    with pytest.raises(DomainError):
        cat.reduce_morphism(f0)
    e = VIMorphism.from_matrix(np.zeros((2, 0), dtype=np.uint8))
    assert cat.reduce_morphism(e) == (e, (0,))


@pytest.mark.parametrize("q,a", [(2, 1), (2, 3), (3, 2), (4, 2), (5, 2)])
def test_hyperplanes(q, a):
    cat = category(q)
    hs = cat.hyperplane_inclusions(a)
    assert len(hs) == (q**a - 1) // (q - 1)
    # distinct hyperplanes have distinct images
    images = set()
    for h in hs:
        assert h.source == a - 1 and h.is_injective(cat.F)
        span = set()
        for v in itertools.product(range(q), repeat=a - 1):
            w = np.zeros(a, dtype=np.int64)
            for coef, col in zip(v, h.mat.T):
                w = cat.F.add_table[w, cat.F.mul_table[coef, col]]
            span.add(tuple(w))
        assert len(span) == q ** (a - 1)
        images.add(frozenset(span))
    assert len(images) == len(hs)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([2, 3]).flatmap(lambda q: st.tuples(st.just(q), chains(q))))
def test_factor_through_inclusion(data):
    q, (f, _, _) = data
    cat = category(q)
    g, j = cat.factor_through_inclusion(f)
    assert g.source == g.target == f.target and g.is_injective(cat.F)
    assert cat.compose(g, j) == f


def test_first_row_split_round_trip():
    f = VIMorphism.from_matrix(np.array([[1, 2], [0, 1], [2, 2]]))
    s = f.split()
    assert s.beta == (1, 2) and s.join() == f
    with pytest.raises(DomainError):
        VIMorphism.from_matrix(np.zeros((0, 0), dtype=np.uint8)).split()
