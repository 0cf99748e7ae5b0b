"""Free and finitely presented VI^m-modules evaluated inside a degree window.

A module is known only at multidegrees of total degree at most ``window``.
Every evaluation exposes ``dim(a)`` and ``act(f, v)``, where ``v`` is a sparse
coordinate vector (a dict) in the chosen basis of ``V_a`` and ``f`` is a
morphism of VI^m leaving ``a``.

Bases:

* free modules use ``{j} x VI^m(gens[j], a)`` in canonical order, generator
  blocks concatenated;
* presented modules ``P/U`` use the basis vectors of ``P_a`` that are not
  pivots of the echelonized relation span, in increasing order;
* generic subquotients keep the first spanning vectors independent modulo the
  submodule being divided out.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import linalg
from .errors import ArityError, DomainError, TruncationError, ValidationError
from .ffield import injective_count
from .linalg import Echelon, PrimeField, Rationals, coefficient_field
from .vicat import (VICategory, VImMorphism, VIMorphism, category, degrees_up_to, leq,
                    total)

MAX_M = 3


# ---------------------------------------------------------------------------
# context and generator data
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Context:
    """Global parameters: field order, arity, coefficient field, window."""

    q: int
    m: int = 1
    coeff: object = field(default_factory=Rationals)
    window: int = 4

    def __post_init__(self):
        from .ffield import _PRIME_POWERS

        if self.q not in _PRIME_POWERS:
            raise DomainError(f"q={self.q} is not a supported prime power (2..9)")
        if not 1 <= self.m <= MAX_M:
            raise DomainError(f"arity m={self.m} outside 1..{MAX_M}")
        if self.window < 0:
            raise DomainError("window must be non-negative")
        K = coefficient_field(self.coeff)
        object.__setattr__(self, "coeff", K)
        if isinstance(K, PrimeField) and self.q % K.p == 0:
            raise DomainError(f"q={self.q} is not invertible in F_{K.p}")

    @property
    def K(self):
        return self.coeff

    @property
    def cat(self) -> VICategory:
        return category(self.q)

    def degrees(self, window: int | None = None):
        return degrees_up_to(self.m, self.window if window is None else window)

    def with_window(self, window: int) -> "Context":
        return Context(self.q, self.m, self.coeff, window)

    def with_m(self, m: int) -> "Context":
        return Context(self.q, m, self.coeff, self.window)


@dataclass(frozen=True)
class FreeSpec:
    """Generator multidegrees of a free module, with multiplicity."""

    gens: tuple

    def __post_init__(self):
        gens = tuple(tuple(int(x) for x in g) for g in self.gens)
        object.__setattr__(self, "gens", gens)
        if gens and len({len(g) for g in gens}) != 1:
            raise ArityError("generators have different arities")
        if any(x < 0 for g in gens for x in g):
            raise DomainError("generator degrees must be non-negative")


@dataclass(frozen=True)
class Term:
    gen: int
    morphism: VImMorphism
    scalar: object


@dataclass(frozen=True)
class Relation:
    """A relation element of ``P`` at ``degree``: ``sum scalar * (gen, morphism)``."""

    degree: tuple
    terms: tuple

    def __post_init__(self):
        object.__setattr__(self, "degree", tuple(int(x) for x in self.degree))
        object.__setattr__(self, "terms", tuple(self.terms))


@dataclass(frozen=True)
class Presentation:
    """``V = P / U`` with ``P`` free on ``free.gens`` and ``U`` generated by ``relations``."""

    free: FreeSpec
    relations: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "relations", tuple(self.relations))

    @property
    def gens(self):
        return self.free.gens

    def generator_degree(self) -> int:
        """Largest total generator degree, ``-1`` without generators."""
        return max((total(g) for g in self.gens), default=-1)

    def relation_degree(self) -> int:
        return max((total(r.degree) for r in self.relations), default=-1)

    def validate(self, ctx: Context):
        F = ctx.cat.F
        for g in self.gens:
            if len(g) != ctx.m:
                raise ArityError(f"generator {g} does not have arity {ctx.m}")
        for idx, rel in enumerate(self.relations):
            if len(rel.degree) != ctx.m:
                raise ValidationError(f"relation {idx}: degree has wrong arity")
            for term in rel.terms:
                if not 0 <= term.gen < len(self.gens):
                    raise ValidationError(f"relation {idx}: generator index {term.gen} out of range")
                f = term.morphism
                if f.m != ctx.m or f.source != self.gens[term.gen] or f.target != rel.degree:
                    raise ValidationError(f"relation {idx}: morphism shape does not match "
                                          f"{self.gens[term.gen]} -> {rel.degree}")
                if not all(p.is_injective(F) for p in f.parts):
                    raise ValidationError(f"relation {idx}: morphism is not injective")
        return self


# ---------------------------------------------------------------------------
# dimension tables and the evaluation interface
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DimTable:
    """Dimensions at every multidegree of total degree at most ``window``."""

    window: int
    dims: dict

    def __getitem__(self, a):
        return self.dims[tuple(a)]

    def keys(self):
        return self.dims.keys()

    def items(self):
        return self.dims.items()

    def as_list(self):
        """For arity 1: the dimensions in degree order."""
        return [self.dims[(a,)] for a in range(self.window + 1)]

    def to_json(self):
        return {",".join(map(str, a)): d for a, d in sorted(self.dims.items(), key=lambda kv: (sum(kv[0]), kv[0]))}

    def support_degree(self) -> int:
        """Largest total degree with a nonzero entry, ``-1`` if none."""
        return max((sum(a) for a, d in self.dims.items() if d), default=-1)


class GradedEvaluation:
    """Interface of a module evaluated on the window ``|a| <= window``."""

    ctx: Context
    window: int
    m: int

    def check(self, a):
        a = tuple(a)
        if len(a) != self.m:
            raise ArityError(f"degree {a} does not have arity {self.m}")
        if any(x < 0 for x in a):
            raise DomainError(f"negative degree {a}")
        if total(a) > self.window:
            raise TruncationError(f"degree {a} lies outside the window {self.window}")
        return a

    @property
    def K(self):
        return self.ctx.K

    @property
    def cat(self):
        return self.ctx.cat

    def dim(self, a) -> int:
        raise NotImplementedError

    def act(self, f: VImMorphism, v: dict) -> dict:
        raise NotImplementedError

    def degrees(self):
        return degrees_up_to(self.m, self.window)

    def dims(self) -> DimTable:
        return DimTable(self.window, {a: self.dim(a) for a in self.degrees()})

    def basis_vector(self, k: int) -> dict:
        return {k: self.K.convert(1)}

    def action_columns(self, f: VImMorphism):
        """Images of the basis vectors of ``V_source`` as sparse vectors."""
        return [self.act(f, self.basis_vector(k)) for k in range(self.dim(f.source))]

    def action_matrix(self, f: VImMorphism):
        """Dense matrix of ``f_*``: rows index the target basis."""
        cols = self.action_columns(f)
        rows = self.dim(f.target)
        zero = self.K.convert(0)
        M = [[zero] * len(cols) for _ in range(rows)]
        for j, c in enumerate(cols):
            for i, x in c.items():
                M[i][j] = x
        return M


# ---------------------------------------------------------------------------
# free modules
# ---------------------------------------------------------------------------

class FreeEvaluation(GradedEvaluation):
    """``P = (+)_j M(gens[j])`` with basis ``{j} x VI^m(gens[j], a)``."""

    def __init__(self, ctx: Context, spec: FreeSpec, window: int | None = None):
        if spec.gens and len(spec.gens[0]) != ctx.m:
            raise ArityError("generator arity differs from the context")
        self.ctx = ctx
        self.m = ctx.m
        self.spec = spec
        self.window = ctx.window if window is None else window
        self._blocks = {}
        self._push = {}

    @property
    def gens(self):
        return self.spec.gens

    def blocks(self, a):
        """List of ``(j, offset, size)`` for the generator blocks of ``P_a``."""
        a = tuple(a)
        out = self._blocks.get(a)
        if out is None:
            self.check(a)
            out = []
            off = 0
            for j, n in enumerate(self.gens):
                size = self.cat.hom_count(n, a)
                out.append((j, off, size))
                off += size
            self._blocks[a] = out
        return out

    def dim(self, a) -> int:
        b = self.blocks(a)
        return b[-1][1] + b[-1][2] if b else 0

    def basis(self, a):
        """Basis of ``P_a`` as ``(gen_index, morphism)`` pairs."""
        out = []
        for j, _, size in self.blocks(a):
            if size:
                out.extend((j, f) for f in self.cat.product_homs(self.gens[j], a))
        return out

    def index(self, j: int, f: VImMorphism) -> int:
        a = f.target
        _, off, _ = self.blocks(a)[j]
        return off + self.cat.product_homs(self.gens[j], a).index_of(f)

    def label(self, a, k: int):
        for j, off, size in self.blocks(a):
            if off <= k < off + size:
                return j, self.cat.product_homs(self.gens[j], a).morphism(k - off)
        raise DomainError(f"basis index {k} out of range at degree {a}")

    def gen_columns(self, a):
        """Indices of basis elements at generator degree ``a`` (invertible morphisms)."""
        a = tuple(a)
        out = []
        for j, off, size in self.blocks(a):
            if self.gens[j] == a:
                out.extend(range(off, off + size))
        return out

    def pushmap(self, f: VImMorphism) -> np.ndarray:
        """Global index map ``P_source -> P_target`` of ``f_*``."""
        out = self._push.get(f)
        if out is None:
            src = self.blocks(f.source)
            dst = self.blocks(f.target)
            parts = [self.cat.compose_index(f, self.gens[j]) + dst[j][1]
                     for j, _, size in src if size]
            out = np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)
            out.setflags(write=False)
            self._push[f] = out
        return out

    def push(self, f: VImMorphism, v: dict) -> dict:
        mp = self.pushmap(f)
        return {int(mp[k]): x for k, x in v.items()}

    def act(self, f: VImMorphism, v: dict) -> dict:
        self.check(f.source)
        self.check(f.target)
        return self.push(f, v)

    def element(self, terms, a) -> dict:
        """Sparse vector of ``sum scalar * (gen, morphism)`` in ``P_a``."""
        K = self.K
        v = {}
        for j, f, s in terms:
            k = self.index(j, f)
            v[k] = K.convert(v.get(k, 0) + K.convert(s))
            if not v[k]:
                del v[k]
        return v


def eval_free(ctx: Context, spec: FreeSpec, n):
    """Basis of the free module at ``n`` as ``(gen_index, morphism)`` pairs."""
    return FreeEvaluation(ctx, spec).basis(n)


def free_action(ctx: Context, spec: FreeSpec, f: VImMorphism):
    """0/1 action matrix of ``f_*`` on a free module, rows = target basis."""
    return FreeEvaluation(ctx, spec).action_matrix(f)


# ---------------------------------------------------------------------------
# presented modules
# ---------------------------------------------------------------------------

class FreeMap:
    """A homomorphism of free modules fixed by the images of the generators.

    ``images[j]`` is a sparse vector of ``target`` at degree ``source.gens[j]``.
    The image of the basis element ``(j, g)`` is ``g_*(images[j])``, computed
    for all ``g`` at once through pre-composition index maps.
    """

    def __init__(self, source: FreeEvaluation, target: FreeEvaluation, images):
        self.source = source
        self.target = target
        self.images = [dict(v) for v in images]
        self._terms = {}
        self._maps = {}

    def _image_terms(self, j):
        out = self._terms.get(j)
        if out is None:
            n = self.source.gens[j]
            out = []
            for c, s in sorted(self.images[j].items()):
                jj, h = self.target.label(n, c)
                out.append((jj, h, s))
            self._terms[j] = out
        return out

    def _block_maps(self, j, a):
        key = (j, a)
        out = self._maps.get(key)
        if out is None:
            blocks = self.target.blocks(a)
            cat = self.target.cat
            out = [((cat.precompose_index(h, a) + blocks[jj][1]).tolist(), s)
                   for jj, h, s in self._image_terms(j)]
            self._maps[key] = out
        return out

    def column_block(self, j, a) -> list[dict]:
        """Images of ``(j, g)`` for every ``g in VI^m(gens[j], a)``."""
        a = tuple(a)
        n = self.source.gens[j]
        if not leq(n, a):
            return []
        count = self.source.cat.hom_count(n, a)
        maps = self._block_maps(j, a)
        p = self.source.K.p
        out = []
        for k in range(count):
            v = {}
            for idx, s in maps:
                c = idx[k]
                x = v.get(c, 0) + s
                if p is not None:
                    x %= p
                if x:
                    v[c] = x
                else:
                    v.pop(c, None)
            out.append(v)
        return out

    def columns(self, a) -> list[dict]:
        out = []
        for j in range(len(self.source.gens)):
            out.extend(self.column_block(j, a))
        return out


class PresentedEvaluation(GradedEvaluation):
    """``V = P/U`` evaluated in the window.

    ``U_a`` is the span of ``f_*(rel)`` over all relations and all
    ``f in VI^m(rel.degree, a)``; this is the image of the free module on the
    relations, hence already closed under every morphism action.
    """

    def __init__(self, ctx: Context, pres: Presentation, window: int | None = None):
        pres.validate(ctx)
        self.ctx = ctx
        self.m = ctx.m
        self.pres = pres
        self.window = ctx.window if window is None else window
        self.free = FreeEvaluation(ctx, pres.free, self.window)
        self.relations_free = FreeEvaluation(ctx, FreeSpec(tuple(r.degree for r in pres.relations)),
                                             self.window)
        images = []
        for rel in pres.relations:
            if total(rel.degree) <= self.window:
                images.append(self.free.element([(t.gen, t.morphism, t.scalar) for t in rel.terms],
                                                rel.degree))
            else:
                images.append({})
        self.boundary = FreeMap(self.relations_free, self.free, images)
        self._U = {}
        self._cols = {}

    def relation_image(self, r: int, a) -> list[dict]:
        """``f_*(rel_r)`` for every ``f in VI^m(rel_r.degree, a)``, canonical order."""
        return self.boundary.column_block(r, self.check(a))

    def boundary_columns(self, a) -> list[dict]:
        """Images of the basis of ``Q_a`` (free on the relations) in ``P_a``."""
        return self.boundary.columns(self.check(a))

    def relation_space(self, a) -> Echelon:
        a = self.check(a)
        E = self._U.get(a)
        if E is None:
            E = Echelon(self.K)
            for v in self.boundary_columns(a):
                E.add(v)
            self._U[a] = E
        return E

    def basis_columns(self, a):
        a = tuple(a)
        cols = self._cols.get(a)
        if cols is None:
            E = self.relation_space(a)
            cols = linalg.complement_columns(E, self.free.dim(a))
            self._cols[a] = cols
        return cols

    def dim(self, a) -> int:
        return len(self.basis_columns(a))

    def lift(self, a, v: dict) -> dict:
        cols = self.basis_columns(a)
        return {cols[k]: x for k, x in v.items()}

    def project(self, a, w: dict) -> dict:
        """Coordinates of the class of ``w in P_a``."""
        E = self.relation_space(a)
        r = E.reduce(w, full=True)
        index = {c: i for i, c in enumerate(self.basis_columns(a))}
        return {index[c]: x for c, x in r.items()}

    def act(self, f: VImMorphism, v: dict) -> dict:
        a = self.check(f.source)
        b = self.check(f.target)
        return self.project(b, self.free.push(f, self.lift(a, v)))

    def projection_matrix(self, a):
        """Dense ``dim V_a x dim P_a`` matrix of the quotient map."""
        n = self.free.dim(a)
        d = self.dim(a)
        zero = self.K.convert(0)
        M = [[zero] * n for _ in range(d)]
        for c in range(n):
            for i, x in self.project(a, {c: self.K.convert(1)}).items():
                M[i][c] = x
        return M


def eval_presentation(ctx: Context, pres: Presentation, n=None):
    """Evaluate ``pres``; with ``n`` given, return ``(dim, basis_columns, projection)`` there."""
    V = PresentedEvaluation(ctx, pres)
    if n is None:
        return V
    n = tuple(n)
    return V.dim(n), V.basis_columns(n), V.projection_matrix(n)


# ---------------------------------------------------------------------------
# generic subquotients
# ---------------------------------------------------------------------------

class SubquotientEvaluation(GradedEvaluation):
    """``S_a / T_a`` inside a parent evaluation, degree by degree.

    ``degree_map(a)`` gives the parent degree serving degree ``a`` and
    ``morphism_map(f)`` the parent morphism inducing ``f``; both default to the
    identity.  ``span_S(a)`` returns spanning parent vectors of ``S_a`` (``None``
    for the whole space) and ``span_T(a)`` spanning vectors of ``T_a``.
    Coordinates are computed by tracked elimination; a vector of ``f_*(S_a)``
    outside ``S_b`` raises, so ill-defined actions cannot pass silently.
    """

    def __init__(self, parent: GradedEvaluation, span_T, span_S=None, *, window=None, m=None,
                 degree_map=None, morphism_map=None, name="subquotient"):
        self.parent = parent
        self.ctx = parent.ctx if m is None else parent.ctx.with_m(m)
        self.m = parent.m if m is None else m
        self.window = parent.window if window is None else window
        self.span_T = span_T
        self.span_S = span_S
        self.degree_map = degree_map or (lambda a: a)
        self.morphism_map = morphism_map or (lambda f: f)
        self.name = name
        self._data = {}

    def _build(self, a):
        a = self.check(a)
        data = self._data.get(a)
        if data is None:
            pa = self.degree_map(a)
            E = Echelon(self.K, track=True)
            for t in self.span_T(a):
                E.add(t, {})
            basis = []
            S = self.span_S(a) if self.span_S is not None else None
            if S is None:
                S = ({c: self.K.convert(1)} for c in range(self.parent.dim(pa)))
            for s in S:
                if E.add(s, {len(basis): self.K.convert(1)}) is None:
                    basis.append(s)
            data = (E, basis)
            self._data[a] = data
        return data

    def dim(self, a) -> int:
        return len(self._build(a)[1])

    def lift(self, a, v: dict) -> dict:
        _, basis = self._build(a)
        out = {}
        for k, x in v.items():
            linalg.axpy(out, x, basis[k], self.K.p)
        return out

    def express(self, a, w: dict) -> dict:
        """Coordinates of the class of parent vector ``w`` (which must lie in ``S_a``)."""
        E, _ = self._build(a)
        rem, combo = E.express(w)
        if rem:
            raise AssertionError(f"{self.name}: vector outside the subspace at degree {a}")
        return combo

    def act(self, f: VImMorphism, v: dict) -> dict:
        a = self.check(f.source)
        b = self.check(f.target)
        w = self.parent.act(self.morphism_map(f), self.lift(a, v))
        return self.express(b, w)


class RestrictedEvaluation(GradedEvaluation):
    """``V`` with axis ``axis`` frozen at ``value``: a module of arity ``m - 1``."""

    def __init__(self, V: GradedEvaluation, axis: int, value: int):
        if V.m < 2:
            raise ArityError("restriction needs arity at least 2")
        if not 0 <= axis < V.m:
            raise ArityError(f"axis {axis} out of range")
        if value < 0 or value > V.window:
            raise TruncationError(f"value {value} outside the window {V.window}")
        self.V = V
        self.axis = axis
        self.value = value
        self.m = V.m - 1
        self.ctx = V.ctx.with_m(self.m)
        self.window = V.window - value
        self._ident = V.cat.identity(value)

    def full_degree(self, a):
        a = tuple(a)
        return a[:self.axis] + (self.value,) + a[self.axis:]

    def full_morphism(self, f: VImMorphism) -> VImMorphism:
        parts = f.parts[:self.axis] + (self._ident,) + f.parts[self.axis:]
        return VImMorphism(parts)

    def dim(self, a) -> int:
        return self.V.dim(self.full_degree(self.check(a)))

    def act(self, f: VImMorphism, v: dict) -> dict:
        self.check(f.source)
        return self.V.act(self.full_morphism(f), v)


def restrict_axis(V: GradedEvaluation, axis: int, value: int) -> RestrictedEvaluation:
    """Restriction ``V_(..., value, ...)`` along ``axis`` (0-based)."""
    return RestrictedEvaluation(V, axis, value)


def restrict_presentation(pres: Presentation, axis: int, value: int, q: int) -> Presentation:
    """Presentation of the restriction of ``P/U`` along ``axis`` at ``value``.

    A generator of degree ``n`` becomes one generator of degree ``n`` without
    axis ``axis`` per morphism ``g in VI(n_axis, value)``, and likewise for
    relations; a relation term ``(j, h)`` pushed by ``(id, g)`` lands on the
    generator copy indexed by ``g h_axis``.
    """
    cat = category(q)
    m = len(pres.gens[0]) if pres.gens else None
    if m is not None and m < 2:
        raise ArityError("restriction needs arity at least 2")

    def drop(t):
        return tuple(t[:axis]) + tuple(t[axis + 1:])

    gens = []
    gen_index = {}
    for j, n in enumerate(pres.gens):
        hs = cat.homs(n[axis], value)
        for k in range(len(hs)):
            gen_index[(j, k)] = len(gens)
            gens.append(drop(n))
    rels = []
    for rel in pres.relations:
        hs = cat.homs(rel.degree[axis], value)
        for k in range(len(hs)):
            g = hs.morphism(k)
            terms = []
            for t in rel.terms:
                h = t.morphism.parts[axis]
                gh = cat.compose(g, h)
                idx = int(cat.homs(h.source, value).index_of(gh.mat[None])[0])
                parts = drop(t.morphism.parts)
                terms.append(Term(gen_index[(t.gen, idx)], VImMorphism(parts), t.scalar))
            rels.append(Relation(drop(rel.degree), tuple(terms)))
    return Presentation(FreeSpec(tuple(gens)), tuple(rels))


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

PRESENTATION_SCHEMA = {
    "type": "object",
    "required": ["q", "m", "coeff", "window", "generators", "relations"],
    "additionalProperties": False,
    "properties": {
        "q": {"type": "integer", "minimum": 2, "maximum": 9},
        "m": {"type": "integer", "minimum": 1, "maximum": MAX_M},
        "coeff": {"oneOf": [
            {"const": "Q"},
            {"type": "object", "required": ["Fp"], "additionalProperties": False,
             "properties": {"Fp": {"type": "integer", "minimum": 2}}},
        ]},
        "window": {"type": "integer", "minimum": 0},
        "generators": {"type": "array", "items": {"type": "array", "items": {"type": "integer", "minimum": 0}}},
        "relations": {"type": "array", "items": {
            "type": "object",
            "required": ["degree", "terms"],
            "additionalProperties": False,
            "properties": {
                "degree": {"type": "array", "items": {"type": "integer", "minimum": 0}},
                "terms": {"type": "array", "items": {
                    "type": "object",
                    "required": ["gen", "morphism", "scalar"],
                    "additionalProperties": False,
                    "properties": {
                        "gen": {"type": "integer", "minimum": 0},
                        "morphism": {"type": "array", "items": {
                            "type": "array", "items": {"type": "array", "items": {"type": "integer", "minimum": 0}}}},
                        "scalar": {"type": ["string", "integer"]},
                    },
                }},
            },
        }},
    },
}


def format_scalar(K, x) -> str:
    num, den = K.to_pair(x)
    return f"{num}/{den}"


def parse_scalar(K, s):
    if isinstance(s, int):
        return K.convert(s)
    try:
        if "/" in s:
            num, den = s.split("/")
            return K.from_fraction(int(num), int(den))
        return K.convert(int(s))
    except ValueError as exc:
        raise ValidationError(f"malformed scalar {s!r}") from exc


def presentation_to_dict(ctx: Context, pres: Presentation) -> dict:
    K = ctx.K
    return {
        "q": ctx.q,
        "m": ctx.m,
        "coeff": K.json_tag(),
        "window": ctx.window,
        "generators": [list(g) for g in pres.gens],
        "relations": [
            {"degree": list(rel.degree),
             "terms": [{"gen": t.gen, "morphism": t.morphism.to_json(),
                        "scalar": format_scalar(K, K.convert(t.scalar))} for t in rel.terms]}
            for rel in pres.relations
        ],
    }


def dumps_presentation(ctx: Context, pres: Presentation) -> str:
    """Canonical JSON text (fixed key order, two-space indent, trailing newline)."""
    return json.dumps(presentation_to_dict(ctx, pres), indent=2) + "\n"


def _matrix_from_json(rows, target: int, source: int):
    if target == 0:
        if rows not in ([], [[]]):
            raise ValidationError("a matrix with no rows must be written as []")
        return np.zeros((0, source), dtype=np.uint8)
    if len(rows) != target or any(len(r) != source for r in rows):
        raise ValidationError(f"expected a {target}x{source} matrix")
    return np.array(rows, dtype=np.uint8).reshape(target, source)


def presentation_from_dict(data: dict):
    """Validate and decode; returns ``(ctx, pres)``."""
    import jsonschema

    try:
        jsonschema.validate(data, PRESENTATION_SCHEMA)
    except jsonschema.ValidationError as exc:
        loc = "/".join(str(x) for x in exc.absolute_path) or "<root>"
        raise ValidationError(f"schema violation at {loc}: {exc.message}") from exc
    try:
        ctx = Context(data["q"], data["m"], coefficient_field(data["coeff"]), data["window"])
    except DomainError as exc:
        raise ValidationError(str(exc)) from exc
    K = ctx.K
    gens = tuple(tuple(g) for g in data["generators"])
    for g in gens:
        if len(g) != ctx.m:
            raise ValidationError(f"generator {list(g)} does not have arity {ctx.m}")
    rels = []
    for idx, rel in enumerate(data["relations"]):
        deg = tuple(rel["degree"])
        if len(deg) != ctx.m:
            raise ValidationError(f"relation {idx}: degree has wrong arity")
        if total(deg) > ctx.window:
            raise ValidationError(f"relation {idx}: degree {list(deg)} lies outside the window")
        terms = []
        for t in rel["terms"]:
            j = t["gen"]
            if j >= len(gens):
                raise ValidationError(f"relation {idx}: generator index {j} out of range")
            mats = t["morphism"]
            if len(mats) != ctx.m:
                raise ValidationError(f"relation {idx}: morphism needs {ctx.m} parts")
            parts = []
            for axis, rows in enumerate(mats):
                try:
                    M = _matrix_from_json(rows, deg[axis], gens[j][axis])
                except ValidationError as exc:
                    raise ValidationError(f"relation {idx}: {exc}") from exc
                if M.size and M.max() >= ctx.q:
                    raise ValidationError(f"relation {idx}: entry outside F_{ctx.q}")
                f = VIMorphism.from_matrix(M)
                if not f.is_injective(ctx.cat.F):
                    raise ValidationError(f"relation {idx}: morphism is not injective")
                parts.append(f)
            terms.append(Term(j, VImMorphism(tuple(parts)), parse_scalar(K, t["scalar"])))
        rels.append(Relation(deg, tuple(terms)))
    pres = Presentation(FreeSpec(gens), tuple(rels))
    pres.validate(ctx)
    return ctx, pres


def loads_presentation(text: str):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return presentation_from_dict(data)


def load_presentation(path):
    with open(path, encoding="utf-8") as fh:
        return loads_presentation(fh.read())


def save_presentation(path, ctx: Context, pres: Presentation):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_presentation(ctx, pres))


# ---------------------------------------------------------------------------
# standard examples and random sampling
# ---------------------------------------------------------------------------

def free_presentation(gens) -> Presentation:
    return Presentation(FreeSpec(tuple(tuple(g) for g in gens)), ())


def point_module(q: int, m: int = 1) -> Presentation:
    """``k_0``: one generator at degree 0 killed by every ``varpi_i``.

    With ``m = 1`` this is the cokernel of ``M(1) -> M(0)`` sending the
    generator to the unique basis element of ``M(0)_1``.
    """
    cat = category(q)
    zero = (0,) * m
    rels = []
    for i in range(m):
        f = cat.varpi(zero, i)
        rels.append(Relation(f.target, (Term(0, f, 1),)))
    return Presentation(FreeSpec((zero,)), tuple(rels))


def zero_presentation(n) -> Presentation:
    """One generator at ``n`` related by itself: the zero module."""
    n = tuple(n)
    ident = VImMorphism(tuple(VIMorphism.from_matrix(np.eye(x, dtype=np.uint8)) for x in n))
    return Presentation(FreeSpec((n,)), (Relation(n, (Term(0, ident, 1),)),))


def _random_scalar(K, rng: random.Random):
    if K.p is None:
        return rng.choice([Fraction(1), Fraction(-1), Fraction(2), Fraction(1, 2), Fraction(-3)])
    return rng.randrange(1, K.p)


def random_presentation(ctx: Context, rng: random.Random, d_max: int = 2, r_max: int = 2,
                        max_gens: int = 2, max_rels: int = 2, max_terms: int = 3) -> Presentation:
    """A random presentation with generator degrees ``<= d_max`` and relation degrees ``<= r_max``."""
    cat = ctx.cat
    degs_d = degrees_up_to(ctx.m, d_max)
    gens = tuple(rng.choice(degs_d) for _ in range(rng.randint(1, max_gens)))
    rels = []
    candidates = [r for r in degrees_up_to(ctx.m, min(r_max, ctx.window))
                  if any(leq(g, r) for g in gens)]
    if candidates:
        for _ in range(rng.randint(0, max_rels)):
            deg = rng.choice(candidates)
            usable = [j for j, g in enumerate(gens) if leq(g, deg)]
            terms = []
            for _ in range(rng.randint(1, max_terms)):
                j = rng.choice(usable)
                parts = []
                for x, y in zip(gens[j], deg):
                    hs = cat.homs(x, y)
                    parts.append(hs.morphism(rng.randrange(len(hs))))
                terms.append(Term(j, VImMorphism(tuple(parts)), _random_scalar(ctx.K, rng)))
            rels.append(Relation(deg, tuple(terms)))
    return Presentation(FreeSpec(gens), tuple(rels))


def free_dim(q: int, n, a) -> int:
    """``dim M(n)_a`` from the product formula."""
    out = 1
    for x, y in zip(n, a):
        out *= injective_count(q, x, y)
    return out
