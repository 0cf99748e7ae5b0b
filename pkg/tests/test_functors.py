import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from vimod.errors import ArityError, DomainError, TruncationError
from vimod.ffield import injective_count
from vimod.functors import (cokernel_D, d_presentation, epsilon_kernel_K, free_coinvariant_dim,
                            h0, h0_hor, h0_hor_presentation, h0_ver, orbit_count, reduced_count,
                            shift_modified, shift_modified_presentation, shift_natural,
                            shift_natural_presentation, split_shift_free)
from vimod.linalg import coefficient_field
from vimod.vicat import VImMorphism, category
from vimod.vmod import (Context, FreeEvaluation, FreeSpec, PresentedEvaluation, Presentation, Relation,
                        SubquotientEvaluation, Term, free_presentation, point_module, random_presentation, restrict_axis)


def free(q, gens, window, m=1):
    return FreeEvaluation(Context(q, m, window=window), FreeSpec(tuple(gens)))


def presented(pres, q=2, m=1, window=4):
    return PresentedEvaluation(Context(q, m, window=window), pres)


def vi(q, n, a):
    return injective_count(q, n, a)


def test_natural_shift_examples():
    assert shift_natural(free(2, [(0,)], 4)).module.dims().as_list() == [1, 1, 1, 1]
    assert shift_natural(free(2, [(1,)], 4)).module.dim((2,)) == 7 == 2 * 3 + 1 * 1


def test_modified_shift_examples():
    assert shift_modified(free(2, [(0,)], 4)).module.dims().as_list() == [1, 1, 1, 1]
    assert shift_modified(free(2, [(1,)], 3)).module.dim((2,)) == 4 == 3 + 1


@pytest.mark.parametrize("q,n", [(2, 1), (2, 2), (3, 1), (3, 2)])
def test_shifted_free_dimension_identities(q, n):
    P = free(q, [(n,)], 4 if q == 2 else 3)
    nat = shift_natural(P).module
    mod = shift_modified(P).module
    for a in range(nat.window + 1):
        assert nat.dim((a,)) == q**n * vi(q, n, a) + (q**n - 1) * q ** (n - 1) * vi(q, n - 1, a)
        assert mod.dim((a,)) == vi(q, n, a) + (q**n - 1) * vi(q, n - 1, a)
        assert mod.dim((a,)) == orbit_count(q, n, a) == reduced_count(q, n, a) == free_coinvariant_dim(q, n, a)


def test_split_classification_example():
    rep = split_shift_free(2, 1, 2)
    assert rep.total == 7 and rep.v_classes == 2 and rep.w_classes == 1 and rep.ok
    assert all(split_shift_free(q, n, a).ok for q in (2, 3) for n in (1, 2) for a in range(3))
    with pytest.raises(DomainError):
        split_shift_free(2, 0, 1)


def test_averaging_idempotent():
    V = presented(random_presentation(Context(3, 1, window=3), random.Random(1), d_max=1, r_max=2), q=3, window=3)
    S = shift_modified(V)
    for a in range(3):
        A = S.averaging((a,))
        n = len(A)
        A2 = [[sum((A[i][k] * A[k][j] for k in range(n)), Fraction(0)) for j in range(n)] for i in range(n)]
        assert A2 == A
        assert _rank(A) == S.module.dim((a,))
    with pytest.raises(DomainError):
        shift_natural(V).averaging((0,))


def _rank(rows):
    rows = [list(r) for r in rows]
    r = 0
    for c in range(len(rows[0]) if rows else 0):
        piv = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c] / rows[r][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        r += 1
    return r


def test_k_and_d_of_free_and_point_modules():
    for n in range(3):
        data = cokernel_D(free(2, [(n,)], 4), check_lemma=True)
        assert all(k == 0 for k, _, _, _ in data.table.values())
        assert [data.table[(a,)][3] for a in range(4)] == [(2**n - 1) * vi(2, n - 1, a) for a in range(4)]
        assert data.exact
    assert [cokernel_D(free(2, [(1,)], 4)).D.dim((a,)) for a in range(4)] == [1, 1, 1, 1]
    assert [cokernel_D(free(2, [(2,)], 4)).D.dim((a,)) for a in range(4)] == [0, 3, 9, 21]
    k0 = presented(point_module(2))
    data = cokernel_D(k0, check_lemma=True)
    assert data.table[(0,)] == (1, 1, 0, 0)
    assert all(v == (0, 0, 0, 0) for a, v in data.table.items() if a != (0,))
    K, _ = epsilon_kernel_K(k0)
    assert [K.dim((a,)) for a in range(4)] == [1, 0, 0, 0]


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([(2, 1, 4), (3, 1, 3), (2, 2, 3)]))
def test_four_term_identity_and_presentation_routes(seed, qmw):
    q, m, w = qmw
    ctx = Context(q, m, window=w)
    pres = random_presentation(ctx, random.Random(seed), d_max=1, r_max=2)
    V = PresentedEvaluation(ctx, pres)
    for i in range(m):
        data = cokernel_D(V, i, check_lemma=True)
        assert data.exact
        smaller = ctx.with_window(w - 1)
        S_pres = PresentedEvaluation(smaller, shift_modified_presentation(pres, i, q, ctx.K))
        N_pres = PresentedEvaluation(smaller, shift_natural_presentation(pres, i, q, ctx.K))
        D_pres = PresentedEvaluation(smaller, d_presentation(pres, i, q, ctx.K))
        for a, (k, v, s, d) in data.table.items():
            assert S_pres.dim(a) == s
            assert D_pres.dim(a) == d
            assert N_pres.dim(a) == shift_natural(V, i).module.dim(a)


def test_shifts_are_exact_on_relation_sequences():
    ctx = Context(2, 1, window=4)
    for seed in range(5):
        pres = random_presentation(ctx, random.Random(seed), d_max=1, r_max=2)
        V = PresentedEvaluation(ctx, pres)
        U = SubquotientEvaluation(V.free, lambda a: [], lambda a: V.boundary_columns(a), name="U")
        for shift in (shift_natural, shift_modified):
            sV, sP, sU = shift(V).module, shift(V.free).module, shift(U).module
            for a in sV.degrees():
                assert sP.dim(a) == sU.dim(a) + sV.dim(a)


def test_shifts_commute_for_two_axes():
    ctx = Context(2, 2, window=4)
    pres = random_presentation(ctx, random.Random(12), d_max=1, r_max=2)
    V = PresentedEvaluation(ctx, pres)
    ab = shift_natural(shift_natural(V, 0).module, 1).module
    ba = shift_natural(shift_natural(V, 1).module, 0).module
    cat = ctx.cat
    for a in ab.degrees():
        assert ab.dim(a) == ba.dim(a)
    f = cat.varpi((0, 1), 0)
    assert ab.action_matrix(f) == ba.action_matrix(f)
    mab = shift_modified(shift_modified(V, 0).module, 1).module
    mba = shift_modified(shift_modified(V, 1).module, 0).module
    assert mab.dims() == mba.dims()


def test_h0_examples():
    assert h0(free(2, [(1,)], 3)).dims().as_list() == [0, 1, 0, 0]
    assert h0(free(3, [(2,)], 3)).dims().as_list() == [0, 0, 48, 0]
    k0 = presented(point_module(2))
    assert h0(k0).dims() == k0.dims()
    cat = category(2)
    # M(1) with its whole degree-2 part killed is concentrated in degree 1
    conc = Presentation(FreeSpec(((1,),)), (Relation((2,), (Term(0, VImMorphism((cat.varpi(1),)), 1),)),))
    C = presented(conc)
    assert C.dims().as_list() == [0, 1, 0, 0, 0]
    assert h0(C).dims() == C.dims()


def test_horizontal_and_vertical_h0():
    P = free(2, [(1, 1)], 4, m=2)
    H = h0_hor(P)
    for a in H.degrees():
        assert H.dim(a) == (vi(2, 1, a[1]) if a[0] == 1 else 0)
    Hv = h0_ver(P)
    for a in Hv.degrees():
        assert Hv.dim(a) == (vi(2, 1, a[0]) if a[1] == 1 else 0)
    R = restrict_axis(H, 0, 1)
    assert R.dims().as_list() == [vi(2, 1, b) for b in range(4)]
    with pytest.raises(ArityError):
        h0_hor(free(2, [(1,)], 3))


@pytest.mark.parametrize("seed", range(4))
def test_h0_hor_commutes_with_modified_shift_on_second_axis(seed):
    ctx = Context(2, 2, window=4)
    pres = random_presentation(ctx, random.Random(seed), d_max=1, r_max=2)
    V = PresentedEvaluation(ctx, pres)
    lhs = h0_hor(shift_modified(V, 1).module)
    rhs = shift_modified(h0_hor(V), 1).module
    assert lhs.dims() == rhs.dims()
    via_pres = PresentedEvaluation(ctx, h0_hor_presentation(pres, 2, ctx.window))
    assert via_pres.dims() == h0_hor(V).dims()


def test_shift_needs_room():
    V = free(2, [(0,)], 0)
    with pytest.raises(TruncationError):
        shift_natural(V)
    with pytest.raises(ArityError):
        shift_modified(free(2, [(0,)], 2), 1)


def test_prime_coefficients_give_same_dimensions():
    # permutation modules and the point module have field-independent tables
    for pres in (free_presentation([(1,)]), free_presentation([(2,)]), point_module(3)):
        a = cokernel_D(PresentedEvaluation(Context(3, 1, window=3), pres)).table
        b = cokernel_D(PresentedEvaluation(Context(3, 1, coefficient_field("Fp:101"), 3), pres)).table
        assert a == b
