"""The categories VI and VI^m over a finite field.

Objects of VI are natural numbers; a morphism ``a -> b`` is an injective
``b x a`` matrix over F_q.  VI^m is the m-fold product, with objects
multidegrees (tuples of naturals) and morphisms tuples of VI morphisms.

Hom-sets are enumerated once, sorted lexicographically by row-major entries,
and cached together with their integer codes so that composing a morphism
with a whole hom-set and locating the results is a handful of numpy calls.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product as iproduct

import numpy as np

from . import ffield
from .errors import ArityError, DomainError, SizeCapError
from .ffield import GF, encode, enumerate_injective, injective_count, matmul


def total(n) -> int:
    """Total degree ``|n|`` of a multidegree."""
    return sum(n)


def unit(m: int, i: int) -> tuple:
    """The multidegree ``e_i`` (axes are numbered from 0)."""
    return tuple(1 if k == i else 0 for k in range(m))


def add_deg(a, b) -> tuple:
    return tuple(x + y for x, y in zip(a, b))


def sub_deg(a, b) -> tuple:
    return tuple(x - y for x, y in zip(a, b))


def leq(a, b) -> bool:
    return all(x <= y for x, y in zip(a, b))


def degrees_up_to(m: int, window: int):
    """All multidegrees of arity ``m`` with total degree at most ``window``.

    Sorted by total degree, then lexicographically.
    """
    out = [d for d in iproduct(range(window + 1), repeat=m) if sum(d) <= window]
    return sorted(out, key=lambda d: (sum(d), d))


# ---------------------------------------------------------------------------
# morphisms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VIMorphism:
    """An injective linear map ``F^source -> F^target`` as a ``target x source`` matrix."""

    target: int
    source: int
    entries: tuple

    def __post_init__(self):
        if len(self.entries) != self.target * self.source:
            raise DomainError("entry count does not match the declared shape")

    @classmethod
    def from_matrix(cls, M) -> "VIMorphism":
        M = np.asarray(M, dtype=np.uint8)
        if M.ndim != 2:
            raise DomainError("a morphism matrix must be 2-dimensional")
        return cls(int(M.shape[0]), int(M.shape[1]), tuple(int(x) for x in M.ravel()))

    @property
    def mat(self):
        return np.array(self.entries, dtype=np.uint8).reshape(self.target, self.source)

    def rows(self):
        M = self.mat
        return [list(map(int, r)) for r in M]

    def is_injective(self, F: GF) -> bool:
        return ffield.rank(F, self.mat) == self.source if self.source else True

    def split(self) -> "FirstRowSplit":
        if self.target < 1:
            raise DomainError("the first-row split needs target >= 1")
        M = self.mat
        return FirstRowSplit(tuple(int(x) for x in M[0]), VIMorphism.from_matrix(M[1:]))


@dataclass(frozen=True)
class FirstRowSplit:
    """``beta`` is the first row of a morphism, ``gamma`` the remaining rows."""

    beta: tuple
    gamma: VIMorphism

    def join(self) -> VIMorphism:
        g = self.gamma.mat
        M = np.vstack([np.array(self.beta, dtype=np.uint8).reshape(1, -1), g])
        return VIMorphism.from_matrix(M)


@dataclass(frozen=True)
class VImMorphism:
    """A morphism of VI^m: one VI morphism per axis."""

    parts: tuple

    @property
    def m(self):
        return len(self.parts)

    @property
    def source(self) -> tuple:
        return tuple(p.source for p in self.parts)

    @property
    def target(self) -> tuple:
        return tuple(p.target for p in self.parts)

    @classmethod
    def from_matrices(cls, mats) -> "VImMorphism":
        return cls(tuple(VIMorphism.from_matrix(M) for M in mats))

    def to_json(self):
        return [p.rows() if p.target else [] for p in self.parts]


# ---------------------------------------------------------------------------
# hom-sets
# ---------------------------------------------------------------------------

class HomSet:
    """The sorted hom-set VI(source, target) with code lookup."""

    def __init__(self, F: GF, source: int, target: int, count_cap: int):
        self.F = F
        self.source = source
        self.target = target
        self.mats = enumerate_injective(F, source, target, count_cap=count_cap)
        self.codes = encode(F, self.mats)
        self.mats.setflags(write=False)

    def __len__(self):
        return len(self.mats)

    def index_of(self, mats) -> np.ndarray:
        """Positions of a batch of matrices; every matrix must be present."""
        codes = encode(self.F, mats)
        idx = np.searchsorted(self.codes, codes)
        idx = np.minimum(idx, max(len(self.codes) - 1, 0))
        if len(self.codes) == 0 or not np.array_equal(self.codes[idx], codes):
            raise DomainError("matrix is not an element of this hom-set")
        return idx

    def morphism(self, k: int) -> VIMorphism:
        return VIMorphism.from_matrix(self.mats[k])


class ProductHomSet:
    """VI^m(n, a) ordered lexicographically on tuples (axis 0 most significant)."""

    def __init__(self, parts):
        self.parts = tuple(parts)
        sizes = [len(p) for p in self.parts]
        self.size = int(np.prod(sizes, dtype=object)) if sizes else 1
        strides = []
        s = 1
        for n in reversed(sizes):
            strides.append(s)
            s *= n
        self.strides = tuple(reversed(strides))

    def __len__(self):
        return self.size

    def split_index(self, k: int) -> tuple:
        out = []
        for st, p in zip(self.strides, self.parts):
            out.append(k // st)
            k %= st
        return tuple(out)

    def join_index(self, ks) -> int:
        return sum(k * st for k, st in zip(ks, self.strides))

    def morphism(self, k: int) -> VImMorphism:
        ks = self.split_index(k)
        return VImMorphism(tuple(p.morphism(j) for p, j in zip(self.parts, ks)))

    def index_of(self, f: VImMorphism) -> int:
        ks = [int(p.index_of(part.mat[None])[0]) for p, part in zip(self.parts, f.parts)]
        return self.join_index(ks)

    def __iter__(self):
        for k in range(self.size):
            yield self.morphism(k)


def combine_indices(per_axis, strides) -> np.ndarray:
    """Mixed-radix outer combination of per-axis index arrays (C order)."""
    out = np.zeros(1, dtype=np.int64)
    for idx, st in zip(per_axis, strides):
        out = (out[:, None] + np.asarray(idx, dtype=np.int64)[None, :] * st).ravel()
    return out


class VICategory:
    """VI over F_q with cached hom-sets, compositions and structural maps."""

    def __init__(self, q: int, count_cap: int = ffield.DEFAULT_COUNT_CAP):
        self.F = ffield.field(q)
        self.q = q
        self.count_cap = count_cap
        self._homs = {}
        self._compose = {}
        self._hyper = {}

    def __repr__(self):
        return f"VICategory(q={self.q})"

    # -- counting and enumeration ------------------------------------------
    def hom_count(self, a, b) -> int:
        """``|VI^m(a, b)|`` by the product formula; ints are read as m = 1."""
        if isinstance(a, int):
            return injective_count(self.q, a, b)
        if len(a) != len(b):
            raise ArityError("source and target have different arity")
        out = 1
        for x, y in zip(a, b):
            out *= injective_count(self.q, x, y)
        return out

    def homs(self, source: int, target: int) -> HomSet:
        key = (source, target)
        hs = self._homs.get(key)
        if hs is None:
            if injective_count(self.q, source, target) > self.count_cap:
                raise SizeCapError(
                    f"hom-set VI({source},{target}) over F_{self.q} exceeds the size cap {self.count_cap}")
            hs = HomSet(self.F, source, target, self.count_cap)
            self._homs[key] = hs
        return hs

    def product_homs(self, n, a) -> ProductHomSet:
        if len(n) != len(a):
            raise ArityError("source and target have different arity")
        return ProductHomSet(self.homs(x, y) for x, y in zip(n, a))

    def enumerate(self, a, b):
        """Every morphism ``a -> b`` in canonical order."""
        if isinstance(a, int):
            return [self.homs(a, b).morphism(k) for k in range(len(self.homs(a, b)))]
        return list(self.product_homs(a, b))

    # -- composition ------------------------------------------------------
    def morphism(self, M) -> VIMorphism:
        f = VIMorphism.from_matrix(M)
        if not f.is_injective(self.F):
            raise DomainError("matrix is not injective")
        return f

    def morphism_m(self, mats) -> VImMorphism:
        return VImMorphism(tuple(self.morphism(M) for M in mats))

    def compose(self, g, f):
        """``g o f``; both VI or both VI^m morphisms."""
        if isinstance(g, VIMorphism) and isinstance(f, VIMorphism):
            if g.source != f.target:
                raise DomainError(f"cannot compose: target {f.target} != source {g.source}")
            return VIMorphism.from_matrix(matmul(self.F, g.mat, f.mat))
        if isinstance(g, VImMorphism) and isinstance(f, VImMorphism):
            if g.m != f.m:
                raise ArityError("morphisms have different arity")
            return VImMorphism(tuple(self.compose(x, y) for x, y in zip(g.parts, f.parts)))
        raise DomainError("compose needs two morphisms of the same kind")

    def identity(self, a):
        if isinstance(a, int):
            return VIMorphism.from_matrix(np.eye(a, dtype=np.uint8))
        return VImMorphism(tuple(self.identity(x) for x in a))

    def compose_index_1(self, f: VIMorphism, n: int) -> np.ndarray:
        """Index map VI(n, f.source) -> VI(n, f.target), ``h |-> f h``."""
        key = (f, n)
        out = self._compose.get(key)
        if out is None:
            src = self.homs(n, f.source)
            dst = self.homs(n, f.target)
            if len(src) == 0:
                out = np.zeros(0, dtype=np.int64)
            else:
                out = dst.index_of(matmul(self.F, f.mat, src.mats)).astype(np.int64)
            out.setflags(write=False)
            self._compose[key] = out
        return out

    def compose_index(self, f: VImMorphism, n) -> np.ndarray:
        """Index map VI^m(n, source) -> VI^m(n, target) for post-composition."""
        per_axis = [self.compose_index_1(p, x) for p, x in zip(f.parts, n)]
        strides = self.product_homs(n, f.target).strides
        return combine_indices(per_axis, strides)

    def precompose_index_1(self, h: VIMorphism, a: int) -> np.ndarray:
        """Index map VI(h.target, a) -> VI(h.source, a), ``f |-> f h``."""
        key = ("pre", h, a)
        out = self._compose.get(key)
        if out is None:
            src = self.homs(h.target, a)
            dst = self.homs(h.source, a)
            if len(src) == 0:
                out = np.zeros(0, dtype=np.int64)
            else:
                out = dst.index_of(matmul(self.F, src.mats, h.mat)).astype(np.int64)
            out.setflags(write=False)
            self._compose[key] = out
        return out

    def precompose_index(self, h: VImMorphism, a) -> np.ndarray:
        """Index map VI^m(h.target, a) -> VI^m(h.source, a) for pre-composition."""
        per_axis = [self.precompose_index_1(p, x) for p, x in zip(h.parts, a)]
        strides = self.product_homs(h.source, a).strides
        return combine_indices(per_axis, strides)

    # -- structural morphisms ---------------------------------------------
    def iota(self, f, i: int = 0):
        """``iota_i(f)``: the block sum ``1 (+) f`` on axis ``i``, identity-extended elsewhere."""
        if isinstance(f, VIMorphism):
            M = np.zeros((f.target + 1, f.source + 1), dtype=np.uint8)
            M[0, 0] = 1
            M[1:, 1:] = f.mat
            return VIMorphism.from_matrix(M)
        if not 0 <= i < f.m:
            raise ArityError(f"axis {i} out of range for arity {f.m}")
        parts = list(f.parts)
        parts[i] = self.iota(parts[i])
        return VImMorphism(tuple(parts))

    def varpi(self, a, i: int = 0):
        """``varpi_i(a)``: ``a -> a + e_i``, zero first row over the identity on axis ``i``."""
        if isinstance(a, int):
            M = np.zeros((a + 1, a), dtype=np.uint8)
            M[1:, :] = np.eye(a, dtype=np.uint8)
            return VIMorphism.from_matrix(M)
        if not 0 <= i < len(a):
            raise ArityError(f"axis {i} out of range for arity {len(a)}")
        return VImMorphism(tuple(self.varpi(x) if k == i else self.identity(x) for k, x in enumerate(a)))

    def sigma(self, c, a=None, i: int = 0):
        """``sigma_i(c)``: the automorphism ``[[1, 0], [c, I]]`` of ``a + e_i``.

        With ``a`` omitted the single VI automorphism of ``len(c) + 1`` is returned.
        """
        c = tuple(int(x) for x in c)
        if any(not 0 <= x < self.q for x in c):
            raise DomainError("entries of c must be field elements")
        n = len(c)
        M = np.eye(n + 1, dtype=np.uint8)
        if n:
            M[1:, 0] = c
        g = VIMorphism.from_matrix(M)
        if a is None:
            return g
        if len(c) != a[i]:
            raise DomainError(f"c must have length a_i = {a[i]}")
        return VImMorphism(tuple(g if k == i else self.identity(x) for k, x in enumerate(a)))

    def u_group(self, a: int):
        """All ``sigma(c)`` for ``c`` in F^a, in lexicographic order of ``c``."""
        return [self.sigma(c) for c in iproduct(range(self.q), repeat=a)]

    # -- reduced form -----------------------------------------------------
    def reduce_morphism(self, f: VIMorphism):
        """Return ``(fbar, c)`` with ``fbar = sigma(c) f`` the reduced form of ``f``.

        If the first row of ``f`` vanishes, ``fbar = f`` and ``c = 0``.  Otherwise
        ``j`` is the first nonzero position of the first row and ``c`` is the
        unique vector clearing column ``j`` below the first row.  A source of
        dimension 0 has an empty first row and reduces to itself.
        """
        if f.target < 1:
            raise DomainError("reduce_morphism needs target >= 1")
        a = f.target - 1
        M = f.mat
        beta = M[0]
        nz = np.nonzero(beta)[0]
        if len(nz) == 0:
            return f, (0,) * a
        j = int(nz[0])
        s = self.F.neg(self.F.inv(int(beta[j])))
        c = tuple(self.F.mul(s, int(x)) for x in M[1:, j])
        return self.compose(self.sigma(c), f), c

    def reduce_batch(self, mats):
        """Vectorized reduced forms of ``(N, a+1, n)`` matrices; returns ``(fbar, c)``."""
        F = self.F
        mats = np.asarray(mats, dtype=np.uint8)
        N, rows, n = mats.shape
        if n == 0:
            return mats.copy(), np.zeros((N, rows - 1), dtype=np.uint8)
        beta = mats[:, 0, :]
        nonzero = beta != 0
        has = nonzero.any(axis=1)
        j = np.argmax(nonzero, axis=1)
        bj = beta[np.arange(N), j]
        s = F.neg_table[F.inv_table[bj]]
        c = F.mul_table[s[:, None], mats[np.arange(N), 1:, j]]
        c[~has] = 0
        out = mats.copy()
        out[:, 1:, :] = F.add_table[mats[:, 1:, :], F.mul_table[c[:, :, None], beta[:, None, :]]]
        return out, c

    def u_orbit(self, f: VIMorphism) -> set:
        """``{sigma(c) f : c in F^a}`` for ``f`` with target ``a + 1``."""
        if f.target < 1:
            raise DomainError("u_orbit needs target >= 1")
        return {self.compose(g, f) for g in self.u_group(f.target - 1)}

    def pivot_column(self, f: VIMorphism):
        """First nonzero position of the first row, or ``None``."""
        nz = np.nonzero(f.mat[0])[0]
        return int(nz[0]) if len(nz) else None

    # -- factorization and hyperplanes -------------------------------------
    def factor_through_inclusion(self, f: VIMorphism):
        """Write ``f = g o j`` with ``g`` invertible and ``j = [I; 0]`` the standard inclusion."""
        M = f.mat
        b, a = M.shape
        cols = [M[:, k] for k in range(a)]
        for k in range(b):
            if len(cols) == b:
                break
            e = np.zeros(b, dtype=np.uint8)
            e[k] = 1
            trial = np.stack(cols + [e], axis=1)
            if ffield.rank(self.F, trial) == len(cols) + 1:
                cols.append(e)
        g = VIMorphism.from_matrix(np.stack(cols, axis=1) if cols else np.zeros((b, 0), np.uint8))
        j = np.zeros((b, a), dtype=np.uint8)
        j[:a, :a] = np.eye(a, dtype=np.uint8)
        return g, VIMorphism.from_matrix(j)

    def hyperplane_inclusions(self, a: int):
        """One injection ``a-1 -> a`` for each hyperplane of F^a.

        The hyperplane ``ker(phi)`` for ``phi`` with leading coefficient 1 is
        included via its reduced echelon null-space basis.
        """
        out = self._hyper.get(a)
        if out is None:
            out = []
            for phi in iproduct(range(self.q), repeat=a):
                nz = [x for x in phi if x]
                if not nz or nz[0] != 1:
                    continue
                _, _, ker = ffield.rank_profile(self.F, np.array([phi], dtype=np.uint8))
                out.append(VIMorphism.from_matrix(np.stack(ker, axis=1) if ker else np.zeros((a, 0), np.uint8)))
            self._hyper[a] = out
        return out

    def hyperplane_morphisms(self, a, i: int):
        """Hyperplane inclusions on axis ``i`` into multidegree ``a``, identity elsewhere."""
        if a[i] == 0:
            return []
        others = [self.identity(x) for x in a]
        out = []
        for h in self.hyperplane_inclusions(a[i]):
            parts = list(others)
            parts[i] = h
            out.append(VImMorphism(tuple(parts)))
        return out


@lru_cache(maxsize=None)
def category(q: int) -> VICategory:
    """Shared category instance for ``q``."""
    return VICategory(q)
