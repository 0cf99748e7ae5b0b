import json
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from vimod.errors import ArityError, TruncationError, ValidationError
from vimod.linalg import coefficient_field
from vimod.vicat import VImMorphism, category
from vimod.vmod import (Context, FreeEvaluation, FreeSpec, PresentedEvaluation, Presentation, Relation, Term,
                        dumps_presentation, eval_free, eval_presentation, free_action, free_dim,
                        free_presentation, loads_presentation, point_module, random_presentation,
                        restrict_axis, restrict_presentation, save_presentation, load_presentation,
                        zero_presentation)


def fraction_rank(rows):
    """Plain Gaussian elimination over Q, kept apart from the package's echelon code."""
    rows = [[Fraction(x) for x in r] for r in rows if any(r)]
    rank, col = 0, 0
    width = len(rows[0]) if rows else 0
    while rank < len(rows) and col < width:
        piv = next((i for i in range(rank, len(rows)) if rows[i][col]), None)
        if piv is None:
            col += 1
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for i in range(len(rows)):
            if i != rank and rows[i][col]:
                c = rows[i][col] / rows[rank][col]
                rows[i] = [x - c * y for x, y in zip(rows[i], rows[rank])]
        rank += 1
        col += 1
    return rank


def brute_presented_dim(ctx, pres, a):
    """dim (P/U)_a from the pushforwards of every relation, enumerated directly."""
    cat = ctx.cat
    basis = [(j, f) for j, n in enumerate(pres.gens) for f in cat.enumerate(n, a)]
    index = {b: k for k, b in enumerate(basis)}
    rows = []
    for rel in pres.relations:
        for g in cat.enumerate(rel.degree, a):
            v = [Fraction(0)] * len(basis)
            for t in rel.terms:
                v[index[(t.gen, cat.compose(g, t.morphism))]] += Fraction(t.scalar)
            rows.append(v)
    return len(basis) - fraction_rank(rows)


def matprod(A, B):
    return [[sum((A[i][k] * B[k][j] for k in range(len(B))), Fraction(0)) for j in range(len(B[0]))]
            for i in range(len(A))]


def test_free_dimension_examples():
    ctx = Context(2, 1, window=3)
    assert len(eval_free(ctx, FreeSpec(((1,),)), (2,))) == 3
    assert len(eval_free(ctx, FreeSpec(((2,),)), (1,))) == 0
    ctx2 = Context(2, 2, window=2)
    assert FreeEvaluation(ctx2, FreeSpec(((1, 1),))).dim((1, 1)) == 1
    assert FreeEvaluation(ctx2, FreeSpec(((1, 0), (0, 1)))).dims().to_json() == {
        "0,0": 0, "0,1": 1, "1,0": 1, "0,2": 3, "1,1": 2, "2,0": 3}


@pytest.mark.parametrize("q,n", [(2, (1, 1)), (2, (2, 0)), (3, (1, 0)), (2, (0, 2))])
def test_free_dims_are_products(q, n):
    ctx = Context(q, 2, window=4)
    V = FreeEvaluation(ctx, FreeSpec((n,)))
    for a, d in V.dims().items():
        assert d == free_dim(q, (n[0],), (a[0],)) * free_dim(q, (n[1],), (a[1],))
        assert d == len(list(category(q).product_homs(n, a)))


def test_free_actions_are_column_selections_and_varpi_is_injective():
    ctx = Context(2, 1, window=3)
    spec = FreeSpec(((1,),))
    cat = ctx.cat
    ident = VImMorphism((cat.identity(2),))
    M = free_action(ctx, spec, ident)
    assert M == [[int(i == j) for j in range(3)] for i in range(3)]
    for a in range(3):
        vp = cat.varpi((a,), 0)
        M = np.array(free_action(ctx, spec, vp), dtype=float)
        assert (M.sum(axis=0) == 1).all()
        assert len({tuple(c) for c in M.T}) == M.shape[1]


def test_point_module_and_zero_module():
    V = PresentedEvaluation(Context(2, 1, window=4), point_module(2))
    assert V.dims().as_list() == [1, 0, 0, 0, 0]
    V2 = PresentedEvaluation(Context(3, 2, window=3), point_module(3, 2))
    assert V2.dims().support_degree() == 0 and V2.dim((0, 0)) == 1
    Z = PresentedEvaluation(Context(2, 1, window=3), zero_presentation((1,)))
    assert Z.dims().as_list() == [0, 0, 0, 0]


def test_no_relations_matches_free():
    ctx = Context(3, 1, window=3)
    pres = free_presentation([(1,), (2,)])
    V = PresentedEvaluation(ctx, pres)
    P = FreeEvaluation(ctx, pres.free)
    assert V.dims() == P.dims()
    f = ctx.cat.varpi((1,), 0)
    assert V.action_matrix(f) == P.action_matrix(f)


@pytest.mark.parametrize("q,m,seed", [(2, 1, 0), (2, 1, 1), (3, 1, 2), (2, 2, 3), (2, 2, 4), (4, 1, 5)])
def test_presented_dims_against_direct_span(q, m, seed):
    ctx = Context(q, m, window=3 if m == 1 else 2)
    pres = random_presentation(ctx, random.Random(seed), d_max=1, r_max=2)
    V = PresentedEvaluation(ctx, pres)
    for a in ctx.degrees():
        assert V.dim(a) == brute_presented_dim(ctx, pres, a)
    d, cols, proj = eval_presentation(ctx, pres, (0,) * m)
    assert d == len(cols) == len(proj)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([(2, 1), (3, 1), (2, 2)]))
def test_actions_are_functorial(seed, qm):
    q, m = qm
    ctx = Context(q, m, window=3 if m == 1 else 2)
    rng = random.Random(seed)
    V = PresentedEvaluation(ctx, random_presentation(ctx, rng, d_max=1, r_max=2))
    cat = ctx.cat
    a = tuple(rng.randint(0, 1) for _ in range(m))
    b = tuple(x + (rng.randint(0, 1) if i == 0 else 0) for i, x in enumerate(a))
    c = tuple(x + 1 if i == m - 1 else x for i, x in enumerate(b))
    if sum(c) > V.window:
        return
    hs_f, hs_g = cat.product_homs(a, b), cat.product_homs(b, c)
    f = hs_f.morphism(rng.randrange(len(hs_f)))
    g = hs_g.morphism(rng.randrange(len(hs_g)))
    if V.dim(a) == 0 or V.dim(c) == 0:
        return
    lhs = V.action_matrix(cat.compose(g, f))
    rhs = matprod(V.action_matrix(g), V.action_matrix(f)) if V.dim(b) else [[0] * V.dim(a)] * V.dim(c)
    assert lhs == rhs


def test_restriction_examples():
    ctx = Context(2, 2, window=4)
    V = FreeEvaluation(ctx, FreeSpec(((1, 1),)))
    assert restrict_axis(V, 0, 0).dims().support_degree() == -1
    assert restrict_axis(V, 0, 1).dims().as_list() == [free_dim(2, (1,), (a,)) for a in range(4)]
    W = FreeEvaluation(ctx, FreeSpec(((2, 1),)))
    R = restrict_axis(W, 0, 2)
    assert R.dims().as_list() == [6 * free_dim(2, (1,), (a,)) for a in range(3)]
    pres = restrict_presentation(free_presentation([(2, 1)]), 0, 2, 2)
    assert pres.gens == ((1,),) * 6
    with pytest.raises(ArityError):
        restrict_axis(FreeEvaluation(Context(2, 1), FreeSpec(((1,),))), 0, 1)


def test_restricted_presentation_matches_restricted_evaluation():
    ctx = Context(2, 2, window=3)
    for seed in range(4):
        pres = random_presentation(ctx, random.Random(seed), d_max=1, r_max=2)
        V = PresentedEvaluation(ctx, pres)
        for v in range(3):
            R = restrict_axis(V, 0, v)
            W = PresentedEvaluation(Context(2, 1, window=3 - v), restrict_presentation(pres, 0, v, 2))
            assert R.dims().as_list() == W.dims().as_list()


def test_truncation_and_arity_errors():
    V = FreeEvaluation(Context(2, 1, window=2), FreeSpec(((1,),)))
    with pytest.raises(TruncationError):
        V.dim((3,))
    with pytest.raises(ArityError):
        V.dim((1, 1))


def test_json_round_trip_is_byte_identical(tmp_path):
    ctx = Context(3, 2, coefficient_field("Fp:7"), 3)
    pres = random_presentation(ctx, random.Random(8), d_max=1, r_max=2)
    text = dumps_presentation(ctx, pres)
    path = tmp_path / "p.json"
    save_presentation(path, ctx, pres)
    ctx2, pres2 = load_presentation(path)
    assert ctx2 == ctx and pres2 == pres
    assert dumps_presentation(ctx2, pres2) == text == path.read_text()
    q_ctx = Context(2, 1, window=3)
    assert dumps_presentation(*loads_presentation(dumps_presentation(q_ctx, point_module(2)))) == \
        dumps_presentation(q_ctx, point_module(2))


def _doc(**over):
    doc = {"q": 2, "m": 1, "coeff": "Q", "window": 3, "generators": [[1]],
           "relations": [{"degree": [2], "terms": [{"gen": 0, "morphism": [[[1], [0]]], "scalar": "1/2"}]}]}
    doc.update(over)
    return doc


def test_loader_rejections():
    ctx, pres = loads_presentation(json.dumps(_doc()))
    assert pres.relations[0].terms[0].scalar == Fraction(1, 2)
    bad_rank = _doc(relations=[{"degree": [2], "terms": [{"gen": 0, "morphism": [[[0], [0]]], "scalar": "1"}]}])
    with pytest.raises(ValidationError, match="relation 0"):
        loads_presentation(json.dumps(bad_rank))
    with pytest.raises(ValidationError, match="invertible"):
        loads_presentation(json.dumps(_doc(coeff={"Fp": 2})))
    with pytest.raises(ValidationError):
        loads_presentation(json.dumps(_doc(extra=1)))
    with pytest.raises(ValidationError):
        loads_presentation("{not json")
    with pytest.raises(ValidationError):
        loads_presentation(json.dumps(_doc(window=1)))
    with pytest.raises(ValidationError):
        loads_presentation(json.dumps(_doc(generators=[[1, 1]])))


def test_presentation_validation():
    ctx = Context(2, 1, window=3)
    wrong = Presentation(FreeSpec(((1,),)), (Relation((2,), (Term(0, VImMorphism((ctx.cat.identity(2),)), 1),)),))
    with pytest.raises(ValidationError):
        PresentedEvaluation(ctx, wrong)
