"""Homology of VI^m-modules inside a window: t_i, degree and regularity.

For a free module ``C`` write ``C~`` for the span of basis elements whose
generator degree differs from the current degree; this is exactly the image
of all non-invertible morphisms, so ``H_0(C)_a = C_a / C~_a`` has the
generator-degree coordinates as basis.

Given a partial free resolution ``C_1 -> C_0 -> V`` with ``Z_i`` the kernel
at ``C_i`` (``Z_0`` is the kernel of ``C_0 -> V``), the long exact sequences
of ``H_*`` give for ``i >= 1``::

    dim H_i(V)_a = dim (Z_{i-1,a} intersected with C~_{i-1,a}) - dim Z~_{i-1,a}

where ``Z~`` is the part of ``Z`` generated from lower degrees.  Because
``Z_{b}`` is stable under automorphisms, ``Z~_a`` is spanned by pushforwards
of ``Z_{a-e_j}`` along one inclusion per hyperplane.

Two methods are available.

``"pushforward"`` takes the presentation ``Q -> P -> V`` (relations and
generators) as ``C_1 -> C_0`` and evaluates the formula above for
``i = 1, 2``; ``i = 3`` adds a free cover of ``Z_1``.

``"complex"`` builds a free resolution of any evaluated module by greedy
covers and reads off the homology of ``H_0`` applied to it.  It is slower and
serves as an independent check in small windows.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from . import linalg
from .errors import DomainError, SizeCapError, TruncationError
from .linalg import Echelon
from .vicat import VImMorphism, VIMorphism, degrees_up_to, sub_deg, unit
from .vmod import (Context, FreeEvaluation, FreeMap, FreeSpec, GradedEvaluation, Presentation,
                   PresentedEvaluation, total)

import numpy as np

DEFAULT_CAP = 400_000


@dataclass
class InvariantReport:
    """``t_i`` for ``0 <= i <= i_max``, degree and regularity, all within ``window``."""

    t: dict
    degree: int
    reg: int
    window: int
    truncated: bool
    flags: dict = field(default_factory=dict)
    dims: dict = field(default_factory=dict)
    method: str = "pushforward"

    def to_dict(self) -> dict:
        return {
            "t": {str(i): self.t[i] for i in sorted(self.t)},
            "degree": self.degree,
            "reg": self.reg,
            "window": self.window,
            "truncated": self.truncated,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def degree_and_reg(report: InvariantReport):
    """``(degree, reg)`` recorded in a report."""
    return report.degree, report.reg


def _finish(hdims: dict, vdims: dict, window: int, i_max: int, method: str, capped=()) -> InvariantReport:
    t = {}
    flags = {}
    for i in range(i_max + 1):
        support = [total(a) for a, d in hdims[i].items() if d]
        t[i] = max(support, default=-1)
        flags[i] = (t[i] == window) or (i in capped)
    degree = max((total(a) for a, d in vdims.items() if d), default=-1)
    flags["degree"] = degree == window
    reg = max(t[i] - i for i in range(i_max + 1))
    return InvariantReport(t, degree, reg, window, any(flags.values()), flags,
                           {i: dict(hdims[i]) for i in hdims}, method)


def _pushforward_span(free: FreeEvaluation, lower: dict, a, m: int, cat, K, target=None, E=None):
    """Echelon of ``sum_j sum_H (f_H)_* lower[a - e_j]``, stopping at ``target`` rank."""
    E = Echelon(K) if E is None else E
    for j in range(m):
        if a[j] == 0:
            continue
        b = sub_deg(a, unit(m, j))
        vecs = lower.get(b) or []
        if not vecs:
            continue
        for f in cat.hyperplane_morphisms(a, j):
            mp = free.pushmap(f)
            for z in vecs:
                if target is not None and E.rank >= target:
                    return E
                E.add({int(mp[k]): x for k, x in z.items()})
    return E


def _homology_pushforward(ctx: Context, pres: Presentation, window: int, i_max: int, cap: int):
    V = PresentedEvaluation(ctx, pres, window)
    P, Q, d1 = V.free, V.relations_free, V.boundary
    K = ctx.K
    cat = ctx.cat
    m = ctx.m
    degs = degrees_up_to(m, window)
    hd = {i: {} for i in range(i_max + 1)}
    vdims = {}
    Z1 = {}
    Ztilde_full = {}
    need_kernel = i_max >= 2
    for a in degs:
        cols = d1.columns(a)
        if len(cols) > cap or P.dim(a) > cap:
            raise SizeCapError(f"degree {a}: {len(cols)} relation columns exceed the cap {cap}")
        gen_Q = set(Q.gen_columns(a))
        gen_P = set(P.gen_columns(a))
        lower_idx = [k for k in range(len(cols)) if k not in gen_Q]
        upper_idx = [k for k in range(len(cols)) if k in gen_Q]
        track = need_kernel and total(a) < window
        E = Echelon(K, track=track)
        kernel = []
        for k in lower_idx:
            c = E.add(cols[k], {k: 1} if track else None)
            if track and c:
                kernel.append(c)
        rank_tilde = E.rank
        for k in upper_idx:
            c = E.add(cols[k], {k: 1} if track else None)
            if track and c:
                kernel.append(c)
        rank_U = E.rank
        vdims[a] = P.dim(a) - rank_U
        if gen_P:
            G = Echelon(K)
            for c in cols:
                w = {k: x for k, x in c.items() if k in gen_P}
                if w:
                    G.add(w)
            rank_gen = G.rank
        else:
            rank_gen = 0
        hd[0][a] = len(gen_P) - rank_gen
        if i_max >= 1:
            h1 = rank_U - rank_gen - rank_tilde
            if h1 < 0:
                raise AssertionError(f"negative H1 dimension at {a}")
            hd[1][a] = h1
        if need_kernel:
            Z1[a] = kernel
            target = len(lower_idx) - rank_tilde
            if target:
                Zt = _pushforward_span(Q, Z1, a, m, cat, K, target=target)
                hd[2][a] = target - Zt.rank
                if i_max >= 3:
                    Ztilde_full[a] = Zt if Zt.rank == target else _pushforward_span(Q, Z1, a, m, cat, K)
            else:
                hd[2][a] = 0
                if i_max >= 3:
                    Ztilde_full[a] = Echelon(K)
    if i_max >= 3:
        _third_homology(ctx, Q, d1, Z1, Ztilde_full, degs, window, hd, cap)
    return _finish(hd, vdims, window, i_max, "pushforward")


def _third_homology(ctx, Q, d1, Z1, Ztilde, degs, window, hd, cap):
    """H_3 via a free cover ``C_2`` of ``Z_1`` generated by complements of ``Z~_1``."""
    K = ctx.K
    cat = ctx.cat
    m = ctx.m
    gens, images = [], []
    for a in degs:
        if total(a) >= window:
            continue
        E = Ztilde[a]
        for z in Z1[a]:
            if E.add(z) is None:
                gens.append(a)
                images.append(z)
    C2 = FreeEvaluation(ctx, FreeSpec(tuple(gens)), window)
    d2 = FreeMap(C2, Q, images)
    Z2 = {}
    for a in degs:
        if C2.dim(a) > cap:
            raise SizeCapError(f"degree {a}: third resolution term has {C2.dim(a)} > {cap} basis elements")
        cols = d2.columns(a)
        gen_C = set(C2.gen_columns(a))
        lower_idx = [k for k in range(len(cols)) if k not in gen_C]
        track = total(a) < window
        E = Echelon(K, track=track)
        kernel = []
        for k in lower_idx:
            c = E.add(cols[k], {k: 1} if track else None)
            if track and c:
                kernel.append(c)
        rank_tilde = E.rank
        for k in range(len(cols)):
            if k in gen_C:
                c = E.add(cols[k], {k: 1} if track else None)
                if track and c:
                    kernel.append(c)
        Z2[a] = kernel
        target = len(lower_idx) - rank_tilde
        if target:
            Zt = _pushforward_span(C2, Z2, a, m, cat, K, target=target)
            hd[3][a] = target - Zt.rank
        else:
            hd[3][a] = 0


# ---------------------------------------------------------------------------
# independent method: greedy free resolution and H_0 of it
# ---------------------------------------------------------------------------

def gl_generators(cat, a):
    """Generators of ``Aut(a)`` in VI^m: transvections and one scaling per axis."""
    F = cat.F
    lambdas = [F.p ** t for t in range(F.e)]
    out = []
    ident = [np.eye(x, dtype=np.uint8) for x in a]
    for i, n in enumerate(a):
        mats = []
        for r in range(n):
            for s in range(n):
                if r != s:
                    for lam in lambdas:
                        M = np.eye(n, dtype=np.uint8)
                        M[r, s] = lam
                        mats.append(M)
        if n and F.q > 2:
            M = np.eye(n, dtype=np.uint8)
            M[0, 0] = F.primitive
            mats.append(M)
        for M in mats:
            parts = [VIMorphism.from_matrix(M if k == i else ident[k]) for k in range(len(a))]
            out.append(VImMorphism(tuple(parts)))
    return out


def _close(E: Echelon, seeds, act, gens):
    queue = []
    for v in seeds:
        if E.add(v) is None:
            queue.append(v)
    while queue:
        v = queue.pop()
        for g in gens:
            w = act(g, v)
            if E.add(w) is None:
                queue.append(w)


def _greedy_cover(ctx, degs, window, space_basis, act, push_lower, cap):
    """Generators ``[(degree, vector)]`` of a submodule given per degree by ``space_basis``.

    ``push_lower(a, lower)`` returns the echelon of the submodule generated in
    degrees below ``a`` (given each lower degree's full basis in ``lower``).
    """
    cat = ctx.cat
    gens = []
    full = {}
    for a in degs:
        basis = space_basis(a)
        E = push_lower(a, full)
        if E.rank < len(basis):
            autos = gl_generators(cat, a)
            for v in basis:
                if E.rank >= len(basis):
                    break
                if not E.contains(v):
                    gens.append((a, v))
                    _close(E, [v], lambda g, w: act(g, w), autos)
                    if len(gens) > cap:
                        raise SizeCapError("too many generators in a greedy cover")
        full[a] = basis
    return gens


def _homology_complex(V: GradedEvaluation, window: int, i_max: int, cap: int):
    ctx = V.ctx
    K = ctx.K
    cat = ctx.cat
    m = V.m
    degs = degrees_up_to(m, window)
    one = K.convert(1)

    def v_basis(a):
        return [{k: one} for k in range(V.dim(a))]

    def v_push(a, lower):
        E = Echelon(K)
        for j in range(m):
            if a[j] == 0:
                continue
            b = sub_deg(a, unit(m, j))
            for f in cat.hyperplane_morphisms(a, j):
                for v in lower.get(b, []):
                    E.add(V.act(f, v))
        return E

    gens0 = _greedy_cover(ctx, degs, window, v_basis, V.act, v_push, cap)
    levels = []  # (free module, columns function, gen degrees)
    C0 = FreeEvaluation(ctx, FreeSpec(tuple(a for a, _ in gens0)), window)

    def cols0(a):
        out = []
        for n, v in gens0:
            for g in cat.product_homs(n, a) if all(x <= y for x, y in zip(n, a)) else []:
                out.append(V.act(g, v))
        return out

    levels.append((C0, cols0))
    prev_free, prev_cols = C0, cols0
    for level in range(1, i_max + 2):
        Z = {}
        for a in degs:
            cols = prev_cols(a)
            if len(cols) > cap:
                raise SizeCapError(f"resolution term too large at {a}")
            Z[a] = linalg.kernel(K, cols)

        def z_basis(a, Z=Z):
            return Z[a]

        def z_push(a, lower, free=prev_free):
            return _pushforward_span(free, lower, a, m, cat, K)

        gens = _greedy_cover(ctx, degs, window, z_basis, prev_free.act, z_push, cap)
        C = FreeEvaluation(ctx, FreeSpec(tuple(a for a, _ in gens)), window)
        dmap = FreeMap(C, prev_free, [v for _, v in gens])
        levels.append((C, dmap.columns))
        prev_free, prev_cols = C, dmap.columns

    hd = {i: {} for i in range(i_max + 1)}
    vdims = {a: V.dim(a) for a in degs}
    for a in degs:
        ranks = {}
        sizes = {}
        for i, (C, cols) in enumerate(levels):
            gen_here = C.gen_columns(a)
            sizes[i] = len(gen_here)
            if i == 0:
                ranks[0] = 0
                continue
            lower_gen = set(levels[i - 1][0].gen_columns(a))
            allc = cols(a) if gen_here else []
            E = Echelon(K)
            for k in gen_here:
                E.add({c: x for c, x in allc[k].items() if c in lower_gen})
            ranks[i] = E.rank
        for i in range(i_max + 1):
            hd[i][a] = sizes[i] - ranks[i] - ranks[i + 1]
    return _finish(hd, vdims, window, i_max, "complex")


def resolve_t(V, i_max: int = 2, window: int | None = None, method: str = "pushforward",
              ctx: Context | None = None, cap: int = DEFAULT_CAP) -> InvariantReport:
    """Compute ``t_0..t_{i_max}``, the degree and the regularity within ``window``.

    ``V`` is a ``PresentedEvaluation`` or a ``Presentation`` (then ``ctx`` is
    required) for the pushforward method, or any ``GradedEvaluation`` for the
    complex method.
    """
    if not 0 <= i_max <= 3:
        raise DomainError("i_max must lie in 0..3")
    if isinstance(V, Presentation):
        if ctx is None:
            raise DomainError("a bare presentation needs a context")
        pres = V
        base_window = ctx.window
    else:
        ctx = V.ctx
        pres = getattr(V, "pres", None)
        base_window = V.window
    window = base_window if window is None else window
    if window > base_window:
        raise TruncationError(f"window {window} exceeds the evaluation window {base_window}")
    if window < 0:
        raise TruncationError("window must be non-negative")
    if method == "pushforward":
        if pres is None:
            raise DomainError("the pushforward method needs a presented module")
        return _homology_pushforward(ctx.with_window(window), pres, window, i_max, cap)
    if method == "complex":
        if isinstance(V, Presentation):
            V = PresentedEvaluation(ctx, pres, window)
        return _homology_complex(V, window, i_max, cap)
    raise DomainError(f"unknown method {method!r}")
