"""Shift functors, the kernel/cokernel functors K and D, and H_0.

Two routes are provided.

Evaluation route: the functors act on any ``GradedEvaluation`` degree by
degree.  The natural shift precomposes with ``iota_i``; the modified shift
divides out the span of ``g_*(v) - v`` for ``g`` in the unipotent group
``U_i(a)``, which is the kernel of the averaging idempotent.

Presentation route: the shift of a free module is again free with an explicit
basis change, so shifting a presentation generator by generator and relation
by relation yields a presentation of the shifted module.  This is the route
used for homology in large windows.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product as iproduct

import numpy as np

from . import linalg
from .errors import ArityError, DomainError, TruncationError
from .ffield import encode, injective_count, matmul, rank, rank_profile
from .vicat import VImMorphism, VIMorphism, add_deg, category, degrees_up_to, sub_deg, unit
from .vmod import (FreeSpec, GradedEvaluation, Presentation, Relation, SubquotientEvaluation,
                   Term, total)


def _check_axis(V, i):
    if not 0 <= i < V.m:
        raise ArityError(f"axis {i} out of range for arity {V.m}")
    if V.window < 1:
        raise TruncationError("the window is too small to shift")


# ---------------------------------------------------------------------------
# evaluation route
# ---------------------------------------------------------------------------

class ShiftedEvaluation(GradedEvaluation):
    """``(Sigma_i V)_a = V_{a+e_i}`` with ``f`` acting as ``iota_i(f)``."""

    def __init__(self, V: GradedEvaluation, i: int):
        _check_axis(V, i)
        self.V = V
        self.i = i
        self.ctx = V.ctx
        self.m = V.m
        self.window = V.window - 1
        self._e = unit(V.m, i)

    def dim(self, a) -> int:
        return self.V.dim(add_deg(self.check(a), self._e))

    def act(self, f: VImMorphism, v: dict) -> dict:
        self.check(f.source)
        return self.V.act(self.cat.iota(f, self.i), v)


@dataclass
class ShiftResult:
    module: GradedEvaluation
    kind: str
    axis: int
    source: GradedEvaluation

    def averaging(self, a):
        """Dense matrix of the averaging idempotent on ``V_{a+e_i}`` (modified kind only)."""
        if self.kind != "modified":
            raise DomainError("the averaging idempotent belongs to the modified shift")
        return averaging_matrix(self.source, self.axis, a)


def shift_natural(V: GradedEvaluation, i: int = 0) -> ShiftResult:
    return ShiftResult(ShiftedEvaluation(V, i), "natural", i, V)


def u_generators(cat, a, i):
    """Generators ``sigma_i(lambda e_j)`` of ``U_i(a)``; ``lambda`` runs over an F_p-basis of F_q."""
    F = cat.F
    lambdas = [F.p ** t for t in range(F.e)]
    out = []
    for j in range(a[i]):
        for lam in lambdas:
            c = [0] * a[i]
            c[j] = lam
            out.append(cat.sigma(c, a, i))
    return out


def u_elements(cat, a, i):
    return [cat.sigma(c, a, i) for c in iproduct(range(cat.q), repeat=a[i])]


def _modified(V: GradedEvaluation, i: int) -> SubquotientEvaluation:
    S = ShiftedEvaluation(V, i)
    K = V.K
    one = K.convert(1)
    e = unit(V.m, i)

    def span_T(a):
        b = add_deg(a, e)
        out = []
        for g in u_generators(V.cat, a, i):
            for k in range(V.dim(b)):
                w = V.act(g, {k: one})
                linalg.axpy(w, K.convert(-1), {k: one}, K.p)
                if w:
                    out.append(w)
        return out

    return SubquotientEvaluation(S, span_T, name=f"modified shift on axis {i}")


def shift_modified(V: GradedEvaluation, i: int = 0) -> ShiftResult:
    return ShiftResult(_modified(V, i), "modified", i, V)


def averaging_matrix(V: GradedEvaluation, i: int, a):
    """``|U_i(a)|^{-1} sum_g g_*`` on ``V_{a+e_i}`` as a dense list of rows."""
    a = tuple(a)
    b = add_deg(a, unit(V.m, i))
    K = V.K
    n = V.dim(b)
    group = u_elements(V.cat, a, i)
    inv = K.inv(K.convert(len(group)))
    cols = []
    for k in range(n):
        acc = {}
        for g in group:
            linalg.axpy(acc, inv, V.act(g, {k: K.convert(1)}), K.p)
        cols.append(acc)
    zero = K.convert(0)
    M = [[zero] * n for _ in range(n)]
    for j, c in enumerate(cols):
        for r, x in c.items():
            M[r][j] = x
    return M


def _varpi_images(V, a, i):
    one = V.K.convert(1)
    f = V.cat.varpi(a, i)
    return [V.act(f, {k: one}) for k in range(V.dim(a))]


def epsilon_kernel_K(V: GradedEvaluation, i: int = 0, check_lemma: bool = True):
    """``K_i V = ker(varpi_* : V -> Sigma_i V)``.

    With ``check_lemma`` the kernel of ``V -> bar Sigma_i V`` is computed as
    well and compared degree by degree; a mismatch raises.
    Returns ``(K, Sbar)`` where ``Sbar`` is the modified shift used.
    """
    _check_axis(V, i)
    Sbar = _modified(V, i)

    def span_S(a):
        return linalg.kernel(V.K, _varpi_images(V, a, i))

    Kmod = SubquotientEvaluation(V, lambda a: [], span_S, window=V.window - 1, name=f"K_{i}")
    if check_lemma:
        for a in degrees_up_to(V.m, V.window - 1):
            ker_eps = span_S(a)
            eb = [Sbar.express(a, w) for w in _varpi_images(V, a, i)]
            ker_bar = linalg.kernel(V.K, eb)
            joint = linalg.rank_of(V.K, ker_eps + ker_bar)
            if not (len(ker_eps) == len(ker_bar) == joint):
                raise AssertionError(f"ker epsilon != ker epsilon-bar at degree {a}")
    return Kmod, Sbar


@dataclass
class FourTermData:
    K: GradedEvaluation
    V: GradedEvaluation
    Sbar: GradedEvaluation
    D: GradedEvaluation
    axis: int
    table: dict = field(default_factory=dict)

    @property
    def exact(self) -> bool:
        return all(k - v + s - d == 0 for k, v, s, d in self.table.values())


def cokernel_D(V: GradedEvaluation, i: int = 0, check_lemma: bool = False) -> FourTermData:
    """``D_i V = coker(bar epsilon_i)`` together with the four-term dimension table."""
    Kmod, Sbar = epsilon_kernel_K(V, i, check_lemma=check_lemma)

    def span_T(a):
        return [Sbar.express(a, w) for w in _varpi_images(V, a, i)]

    D = SubquotientEvaluation(Sbar, span_T, name=f"D_{i}")
    table = {}
    for a in degrees_up_to(V.m, V.window - 1):
        table[a] = (Kmod.dim(a), V.dim(a), Sbar.dim(a), D.dim(a))
    return FourTermData(Kmod, V, Sbar, D, i, table)


def _lower_span(V: GradedEvaluation, axes):
    one = V.K.convert(1)

    def span_T(a):
        out = []
        for i in axes:
            if a[i] == 0:
                continue
            b = sub_deg(a, unit(V.m, i))
            n = V.dim(b)
            for f in V.cat.hyperplane_morphisms(a, i):
                for k in range(n):
                    w = V.act(f, {k: one})
                    if w:
                        out.append(w)
        return out

    return span_T


def h0(V: GradedEvaluation) -> SubquotientEvaluation:
    """``H_0 V = V / (images of all non-invertible morphisms)``."""
    return SubquotientEvaluation(V, _lower_span(V, range(V.m)), name="H0")


def h0_hor(V: GradedEvaluation) -> SubquotientEvaluation:
    """Quotient by images of morphisms that are identities off axis 0."""
    if V.m < 2:
        raise ArityError("horizontal H0 needs arity at least 2")
    return SubquotientEvaluation(V, _lower_span(V, [0]), name="H0hor")


def h0_ver(V: GradedEvaluation) -> SubquotientEvaluation:
    """Quotient by images of morphisms that are the identity on axis 0."""
    if V.m < 2:
        raise ArityError("vertical H0 needs arity at least 2")
    return SubquotientEvaluation(V, _lower_span(V, range(1, V.m)), name="H0ver")


# ---------------------------------------------------------------------------
# decomposition of shifted free modules
# ---------------------------------------------------------------------------

def _beta_code(q, beta) -> int:
    c = 0
    for x in beta:
        c = c * q + int(x)
    return c


def _beta_from_code(q, n, code):
    out = []
    for _ in range(n):
        out.append(code % q)
        code //= q
    return tuple(reversed(out))


def modified_generator(cat, n: int, beta) -> VIMorphism:
    """The generator of the summand ``P(beta)`` of ``bar Sigma M(n)``.

    ``beta = 0``: ``varpi`` in ``VI(n, n+1)``.  Otherwise the automorphism of
    ``F^n`` with first row ``beta`` whose lower block is the identity of size
    ``n-1`` with a zero column inserted at the pivot of ``beta``.
    """
    if not any(beta):
        return cat.varpi(n)
    j = next(k for k, x in enumerate(beta) if x)
    M = np.zeros((n, n), dtype=np.uint8)
    M[0] = beta
    cols = [c for c in range(n) if c != j]
    for r, c in enumerate(cols):
        M[r + 1, c] = 1
    return VIMorphism.from_matrix(M)


def modified_classify(cat, f: VIMorphism):
    """``f in VI(n, b+1)`` -> ``(beta_code, delta)`` with ``[f] = iota(delta)_* [generator]``."""
    fbar, _ = cat.reduce_morphism(f)
    M = fbar.mat
    beta = M[0]
    gamma = M[1:]
    nz = np.nonzero(beta)[0]
    if len(nz) == 0:
        return 0, VIMorphism.from_matrix(gamma)
    j = int(nz[0])
    delta = np.delete(gamma, j, axis=1)
    return _beta_code(cat.q, beta), VIMorphism.from_matrix(delta)


def _normalized_lines(q, n):
    out = []
    for b in iproduct(range(q), repeat=n):
        nz = [x for x in b if x]
        if nz and nz[0] == 1:
            out.append(b)
    return out


def natural_labels(cat, n: int):
    """Summand labels of ``Sigma M(n)``: ``("V", beta)`` then ``("W", b, beta)``."""
    F = cat.F
    q = cat.q
    labels = [("V", beta) for beta in iproduct(range(q), repeat=n)]
    for b in _normalized_lines(q, n):
        for beta in iproduct(range(q), repeat=n):
            s = 0
            for x, y in zip(beta, b):
                s = F.add(s, F.mul(x, y))
            if s:
                labels.append(("W", b, beta))
    return labels


def natural_generator(cat, label) -> VIMorphism:
    """``[beta; I]`` for ``V(beta)``; for ``W(B, beta)`` the endomorphism with first row
    ``beta`` and lower block ``I - b e_p^T`` minus its (zero) row ``p``."""
    F = cat.F
    if label[0] == "V":
        beta = label[1]
        n = len(beta)
        M = np.zeros((n + 1, n), dtype=np.uint8)
        M[0] = beta
        M[1:] = np.eye(n, dtype=np.uint8)
        return VIMorphism.from_matrix(M)
    _, b, beta = label
    n = len(b)
    p = next(k for k, x in enumerate(b) if x)
    A = np.eye(n, dtype=np.uint8)
    for r in range(n):
        A[r, p] = F.sub(int(A[r, p]), int(b[r]))
    rows = [A[r] for r in range(n) if r != p]
    M = np.vstack([np.array(beta, dtype=np.uint8).reshape(1, n)] + [r.reshape(1, n) for r in rows])
    return VIMorphism.from_matrix(M)


def natural_classify(cat, f: VIMorphism, label_index: dict):
    """``f in VI(n, b+1)`` -> ``(label_position, delta)`` with ``f = iota(delta) o generator``."""
    F = cat.F
    M = f.mat
    n = f.source
    beta = tuple(int(x) for x in M[0])
    gamma = M[1:]
    if n == 0 or rank(F, gamma) == n:
        return label_index[("V", beta)], VIMorphism.from_matrix(gamma)
    _, _, ker = rank_profile(F, gamma)
    b = ker[0]
    lead = next(k for k, x in enumerate(b) if x)
    s = F.inv(int(b[lead]))
    b = tuple(F.mul(s, int(x)) for x in b)
    delta = np.delete(gamma, lead, axis=1)
    return label_index[("W", b, beta)], VIMorphism.from_matrix(delta)


@dataclass
class SplitReport:
    """Classification of the basis ``VI(n, a+1)`` of ``(Sigma M(n))_a``."""

    q: int
    n: int
    a: int
    total: int
    v_counts: dict
    w_counts: dict
    p_counts: dict

    @property
    def v_classes(self):
        return len(self.v_counts)

    @property
    def w_classes(self):
        return len(self.w_counts)

    def expected(self):
        q, n, a = self.q, self.n, self.a
        return {
            "total": q**n * injective_count(q, n, a) + (q**n - 1) * q ** (n - 1) * injective_count(q, n - 1, a),
            "v_each": injective_count(q, n, a),
            "w_each": injective_count(q, n - 1, a),
            "v_classes": q**n,
            "w_classes": (q**n - 1) * q ** (n - 1),
            "p_zero": injective_count(q, n, a),
            "p_each": injective_count(q, n - 1, a),
            "p_total": injective_count(q, n, a) + (q**n - 1) * injective_count(q, n - 1, a),
        }

    @property
    def ok(self) -> bool:
        e = self.expected()
        q, n = self.q, self.n
        v_classes = e["v_classes"] if e["v_each"] else 0
        w_classes = e["w_classes"] if e["w_each"] else 0
        p_classes = (1 if e["p_zero"] else 0) + ((q**n - 1) if e["p_each"] else 0)
        return (self.total == e["total"]
                and self.v_classes == v_classes
                and self.w_classes == w_classes
                and all(c == e["v_each"] for c in self.v_counts.values())
                and all(c == e["w_each"] for c in self.w_counts.values())
                and self.p_counts.get((0,) * n, 0) == e["p_zero"]
                and all(c == e["p_each"] for b, c in self.p_counts.items() if any(b))
                and len(self.p_counts) == p_classes
                and sum(self.p_counts.values()) == e["p_total"])


def split_shift_free(q: int, n: int, a: int) -> SplitReport:
    """Label every ``f in VI(n, a+1)`` by ``(beta_f, ker gamma_f)`` and by reduced form.

    The kernel of every ``gamma_f`` is found at once by multiplying the whole
    batch against every nonzero vector of F^n.
    """
    if n < 1:
        raise DomainError("split_shift_free needs n >= 1")
    cat = category(q)
    F = cat.F
    mats = cat.homs(n, a + 1).mats
    N = len(mats)
    beta = mats[:, 0, :]
    gamma = mats[:, 1:, :]
    lines = _normalized_lines(q, n)
    X = np.array(lines, dtype=np.uint8).T  # n x L
    prod = matmul(F, gamma, X)  # N x a x L
    zero_cols = ~prod.any(axis=1)  # N x L
    n_ker = zero_cols.sum(axis=1)
    if (n_ker > 1).any():
        raise AssertionError("a kernel of gamma_f has dimension above 1")
    bcodes = encode(F, beta[:, None, :]) if n else np.zeros(N, dtype=np.int64)
    v_counts, w_counts = {}, {}
    which = np.argmax(zero_cols, axis=1)
    for k in range(N):
        bt = _beta_from_code(q, n, int(bcodes[k]))
        if n_ker[k] == 0:
            v_counts[bt] = v_counts.get(bt, 0) + 1
        else:
            key = (lines[int(which[k])], bt)
            w_counts[key] = w_counts.get(key, 0) + 1
    fbar, _ = cat.reduce_batch(mats)
    is_reduced = (fbar == mats).all(axis=(1, 2))
    p_counts = {}
    for k in np.nonzero(is_reduced)[0]:
        bt = _beta_from_code(q, n, int(bcodes[k]))
        p_counts[bt] = p_counts.get(bt, 0) + 1
    return SplitReport(q, n, a, N, v_counts, w_counts, p_counts)


def orbit_count(q: int, n: int, a: int) -> int:
    """Number of ``U(a)``-orbits on ``VI(n, a+1)``, counted from orbit sizes."""
    cat = category(q)
    mats = cat.homs(n, a + 1).mats
    beta_zero = ~mats[:, 0, :].any(axis=1) if n else np.ones(len(mats), dtype=bool)
    fixed = int(beta_zero.sum())
    moving = len(mats) - fixed
    if moving % (q**a):
        raise AssertionError("orbit sizes do not divide the moving part")
    return fixed + moving // q**a


def free_coinvariant_dim(q: int, n: int, a: int) -> int:
    """``dim (M(n)_{a+1})_{U(a)}`` for the free VI-module, computed from orbits.

    ``U(a)`` permutes the basis ``VI(n, a+1)``, so the coinvariants have one
    basis vector per orbit.  Orbits are found by min-label propagation along
    the generators, without using orbit sizes.
    """
    cat = category(q)
    N = cat.hom_count(n, a + 1)
    labels = np.arange(N, dtype=np.int64)
    perms = [cat.compose_index_1(g.parts[0], n) for g in u_generators(cat, (a,), 0)]
    changed = True
    while changed:
        changed = False
        for p in perms:
            pulled = np.minimum(labels, labels[p])
            np.minimum.at(pulled, p, labels)
            if (pulled != labels).any():
                labels, changed = pulled, True
    return int(np.unique(labels).size)


def reduced_count(q: int, n: int, a: int) -> int:
    """Number of ``f in VI(n, a+1)`` equal to their reduced form."""
    cat = category(q)
    mats = cat.homs(n, a + 1).mats
    fbar, _ = cat.reduce_batch(mats)
    return int((fbar == mats).all(axis=(1, 2)).sum())


# ---------------------------------------------------------------------------
# presentation route
# ---------------------------------------------------------------------------

def _embed(f: VImMorphism, i: int, part: VIMorphism) -> VImMorphism:
    parts = list(f.parts)
    parts[i] = part
    return VImMorphism(tuple(parts))


def _collect(K, terms):
    """Merge terms with equal ``(gen, morphism)``; drop zero scalars; fixed order."""
    acc = {}
    order = []
    for g, f, s in terms:
        key = (g, f)
        if key not in acc:
            order.append(key)
            acc[key] = K.convert(0)
        acc[key] = K.convert(acc[key] + K.convert(s))
    return tuple(Term(g, f, acc[(g, f)]) for g, f in order if acc[(g, f)])


def _shift_presentation(pres: Presentation, i: int, q: int, K, kind: str):
    cat = category(q)
    if not pres.gens:
        return Presentation(FreeSpec(()), ()), []
    m = len(pres.gens[0])
    if not 0 <= i < m:
        raise ArityError(f"axis {i} out of range for arity {m}")
    e = unit(m, i)

    def labels_for(nv):
        if kind == "modified":
            return [("P", _beta_from_code(q, nv, c)) for c in range(q**nv)]
        return natural_labels(cat, nv)

    def label_degree(n, label):
        lower = (label[0] == "P" and any(label[1])) or label[0] == "W"
        return sub_deg(n, e) if lower else tuple(n)

    gens = []
    base = []
    gen_labels = []
    for j, n in enumerate(pres.gens):
        base.append(len(gens))
        labs = labels_for(n[i])
        for lab in labs:
            gens.append(label_degree(n, lab))
            gen_labels.append((j, lab))
    label_pos = {}
    for j, n in enumerate(pres.gens):
        if kind == "natural":
            label_pos[j] = {lab: k for k, lab in enumerate(labels_for(n[i]))}

    def classify(j, f: VImMorphism):
        part = f.parts[i]
        if kind == "modified":
            code, delta = modified_classify(cat, part)
            return base[j] + code, _embed(f, i, delta)
        pos, delta = natural_classify(cat, part, label_pos[j])
        return base[j] + pos, _embed(f, i, delta)

    rels = []
    for rel in pres.relations:
        r = rel.degree
        for lab in labels_for(r[i]):
            if kind == "modified":
                g = modified_generator(cat, r[i], lab[1])
            else:
                g = natural_generator(cat, lab)
            deg = label_degree(r, lab)
            terms = []
            for t in rel.terms:
                h = t.morphism
                composed = _embed(h, i, cat.compose(g, h.parts[i]))
                gen, delta = classify(t.gen, composed)
                terms.append((gen, delta, t.scalar))
            collected = _collect(K, terms)
            if collected:
                rels.append(Relation(deg, collected))
    return Presentation(FreeSpec(tuple(gens)), tuple(rels)), gen_labels


def shift_modified_presentation(pres: Presentation, i: int, q: int, K):
    """Presentation of ``bar Sigma_i (P/U)`` from the free decomposition of ``bar Sigma_i P``.

    Generators come in blocks, one per original generator ``j``: first the
    summand ``P(0)`` (degree ``n_j``), then ``P(beta)`` for nonzero ``beta``
    in lexicographic order (degree ``n_j - e_i``).
    """
    return _shift_presentation(pres, i, q, K, "modified")[0]


def shift_natural_presentation(pres: Presentation, i: int, q: int, K):
    """Presentation of ``Sigma_i (P/U)``; blocks ``V(beta)`` then ``W(B, beta)`` per generator."""
    return _shift_presentation(pres, i, q, K, "natural")[0]


def d_presentation(pres: Presentation, i: int, q: int, K):
    """Presentation of ``D_i (P/U)``: kill the ``P(0)`` generators of the modified shift."""
    shifted, labels = _shift_presentation(pres, i, q, K, "modified")
    cat = category(q)
    extra = []
    for g, (j, lab) in enumerate(labels):
        if not any(lab[1]):
            n = shifted.gens[g]
            extra.append(Relation(n, (Term(g, cat.identity(n), 1),)))
    return Presentation(shifted.free, shifted.relations + tuple(extra))


def h0_hor_presentation(pres: Presentation, q: int, window: int):
    """Presentation of horizontal ``H_0``: add ``(varpi_0)_*`` of every generator."""
    cat = category(q)
    extra = []
    for j, n in enumerate(pres.gens):
        if total(n) + 1 <= window:
            f = cat.varpi(n, 0)
            extra.append(Relation(f.target, (Term(j, f, 1),)))
    return Presentation(pres.free, pres.relations + tuple(extra))


def iterate_modified_presentation(pres: Presentation, s: int, q: int, K):
    """``bar Sigma_1^s ... bar Sigma_m^s`` applied to a presentation."""
    m = len(pres.gens[0]) if pres.gens else 1
    out = pres
    for i in range(m):
        for _ in range(s):
            out = shift_modified_presentation(out, i, q, K)
    return out
