"""Arithmetic in small finite fields F_q and dense linear algebra over them.

Field elements are integers in ``range(q)``.  For a prime ``q`` the integer is
the residue itself.  For ``q = p**e`` the base-``p`` digits of the integer are
the coefficients of a polynomial in ``x`` (lowest degree first), reduced modulo
a fixed irreducible polynomial:

    q = 4 : x^2 + x + 1
    q = 8 : x^3 + x + 1
    q = 9 : x^2 + 1

Matrices are ``numpy.uint8`` arrays of element indices.  Batched products
accept leading broadcast axes, which is how whole hom-sets are composed at
once.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError, SizeCapError

_PRIME_POWERS = {2: (2, 1), 3: (3, 1), 4: (2, 2), 5: (5, 1), 7: (7, 1), 8: (2, 3), 9: (3, 2)}

# low-to-high coefficients of the monic irreducible, leading term omitted
_IRREDUCIBLE = {4: (1, 1), 8: (1, 1, 0), 9: (1, 0)}

# q**(rows*cols) must stay below this so that row-major codes fit in int64
DEFAULT_CODE_CAP = 2**62
DEFAULT_COUNT_CAP = 3_000_000


def is_prime_power(q: int) -> bool:
    if q < 2:
        return False
    p = 2
    while p * p <= q:
        if q % p == 0:
            while q % p == 0:
                q //= p
            return q == 1
        p += 1
    return True


def prime_factor(q: int) -> int:
    p = 2
    while q % p:
        p += 1
    return p


class GF:
    """The finite field with ``q`` elements, ``2 <= q <= 9``.

    All operations are table lookups.  ``add``, ``mul``, ``neg``, ``inv`` and
    ``sub`` act on Python ints; the ``*_table`` arrays serve vectorized code.
    """

    def __init__(self, q: int):
        if q not in _PRIME_POWERS:
            raise DomainError(f"unsupported field order q={q}; expected one of {sorted(_PRIME_POWERS)}")
        self.q = q
        self.p, self.e = _PRIME_POWERS[q]
        add = np.zeros((q, q), dtype=np.uint8)
        mul = np.zeros((q, q), dtype=np.uint8)
        for x in range(q):
            for y in range(q):
                add[x, y] = self._add_raw(x, y)
                mul[x, y] = self._mul_raw(x, y)
        self.add_table = add
        self.mul_table = mul
        self.neg_table = np.array([int(np.nonzero(add[x] == 0)[0][0]) for x in range(q)], dtype=np.uint8)
        inv = np.zeros(q, dtype=np.uint8)
        for x in range(1, q):
            inv[x] = int(np.nonzero(mul[x] == 1)[0][0])
        self.inv_table = inv
        self.sub_table = add[:, self.neg_table]
        self.primitive = self._find_primitive()
        self.exp = [0] * (q - 1)
        self.log = [0] * q
        g = 1
        for k in range(q - 1):
            self.exp[k] = g
            self.log[g] = k
            g = int(mul[g, self.primitive])
        self._add = add.tolist()
        self._mul = mul.tolist()

    def __repr__(self):
        return f"GF({self.q})"

    def __eq__(self, other):
        return isinstance(other, GF) and other.q == self.q

    def __hash__(self):
        return hash(("GF", self.q))

    def _digits(self, x):
        out = []
        for _ in range(self.e):
            out.append(x % self.p)
            x //= self.p
        return out

    def _undigits(self, ds):
        x = 0
        for d in reversed(ds):
            x = x * self.p + d
        return x

    def _add_raw(self, x, y):
        if self.e == 1:
            return (x + y) % self.p
        return self._undigits([(a + b) % self.p for a, b in zip(self._digits(x), self._digits(y))])

    def _mul_raw(self, x, y):
        if self.e == 1:
            return (x * y) % self.p
        p, e = self.p, self.e
        a, b = self._digits(x), self._digits(y)
        prod = [0] * (2 * e - 1)
        for i, ai in enumerate(a):
            for j, bj in enumerate(b):
                prod[i + j] = (prod[i + j] + ai * bj) % p
        low = _IRREDUCIBLE[self.q]
        # x^e = -(low coefficients)
        for k in range(2 * e - 2, e - 1, -1):
            c = prod[k]
            if c:
                prod[k] = 0
                for t, lt in enumerate(low):
                    prod[k - e + t] = (prod[k - e + t] - c * lt) % p
        return self._undigits(prod[:e])

    def _find_primitive(self):
        if self.q == 2:
            return 1
        for g in range(2, self.q) if self.q > 2 else ():
            x, order = g, 1
            while x != 1:
                x = int(self.mul_table[x, g])
                order += 1
            if order == self.q - 1:
                return g
        raise AssertionError("no primitive element")  # pragma: no cover

    # scalar operations
    def add(self, x: int, y: int) -> int:
        return self._add[x][y]

    def mul(self, x: int, y: int) -> int:
        return self._mul[x][y]

    def neg(self, x: int) -> int:
        return int(self.neg_table[x])

    def sub(self, x: int, y: int) -> int:
        return int(self.sub_table[x, y])

    def inv(self, x: int) -> int:
        if x % self.q == 0:
            raise DomainError("zero has no multiplicative inverse")
        return int(self.inv_table[x])

    @property
    def elements(self):
        return range(self.q)


@lru_cache(maxsize=None)
def field(q: int) -> GF:
    """Shared field instance for order ``q``."""
    return GF(q)


# ---------------------------------------------------------------------------
# matrices
# ---------------------------------------------------------------------------

def matmul(F: GF, A, B):
    """Matrix product over F_q with numpy broadcasting on leading axes."""
    A = np.asarray(A, dtype=np.uint8)
    B = np.asarray(B, dtype=np.uint8)
    if F.e == 1:
        out = np.matmul(A.astype(np.int64), B.astype(np.int64)) % F.p
        return out.astype(np.uint8)
    s = A.shape[-1]
    shape = np.broadcast_shapes(A.shape[:-2], B.shape[:-2]) + (A.shape[-2], B.shape[-1])
    out = np.zeros(shape, dtype=np.uint8)
    for k in range(s):
        term = F.mul_table[A[..., :, k][..., :, None], B[..., k, :][..., None, :]]
        out = F.add_table[out, term]
    return out


def matadd(F: GF, A, B):
    return F.add_table[np.asarray(A, dtype=np.uint8), np.asarray(B, dtype=np.uint8)]


def identity(n: int):
    return np.eye(n, dtype=np.uint8)


def code_weights(F: GF, rows: int, cols: int):
    """Place values making the row-major entry sequence a base-q integer."""
    n = rows * cols
    return np.array([F.q ** (n - 1 - k) for k in range(n)], dtype=np.int64)


def encode(F: GF, M):
    """Row-major base-q code(s) of matrices; batched over leading axes."""
    M = np.asarray(M)
    rows, cols = M.shape[-2], M.shape[-1]
    flat = M.reshape(M.shape[:-2] + (rows * cols,)).astype(np.int64)
    if rows * cols == 0:
        return np.zeros(M.shape[:-2], dtype=np.int64)
    return flat @ code_weights(F, rows, cols)


def gf2_rank(rows) -> int:
    """Rank over GF(2) of rows packed into Python ints (bit i = column i)."""
    pivots = {}
    rank = 0
    for r in rows:
        while r:
            top = r.bit_length() - 1
            if top in pivots:
                r ^= pivots[top]
            else:
                pivots[top] = r
                rank += 1
                break
    return rank


def _pack_gf2(M) -> list[int]:
    out = []
    for row in np.asarray(M, dtype=np.uint8):
        v = 0
        for j, x in enumerate(row):
            if x:
                v |= 1 << j
        out.append(v)
    return out


def rank(F: GF, M) -> int:
    M = np.asarray(M, dtype=np.uint8)
    if M.size == 0:
        return 0
    if F.q == 2:
        return gf2_rank(_pack_gf2(M))
    return rank_profile(F, M)[0]


def _rref_gf2(M):
    nrows, ncols = M.shape
    rows = _pack_gf2(M)
    pivots = []
    r = 0
    for c in range(ncols):
        bit = 1 << c
        piv = next((i for i in range(r, nrows) if rows[i] & bit), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        for i in range(nrows):
            if i != r and rows[i] & bit:
                rows[i] ^= rows[r]
        pivots.append(c)
        r += 1
    R = np.zeros((nrows, ncols), dtype=np.uint8)
    for i, v in enumerate(rows):
        for c in range(ncols):
            if v >> c & 1:
                R[i, c] = 1
    return R, pivots


def _rref_generic(F: GF, M):
    R = [list(map(int, row)) for row in M]
    nrows = len(R)
    ncols = M.shape[1]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, nrows) if R[i][c]), None)
        if piv is None:
            continue
        R[r], R[piv] = R[piv], R[r]
        s = F.inv(R[r][c])
        R[r] = [F.mul(s, x) for x in R[r]]
        for i in range(nrows):
            if i != r and R[i][c]:
                f = R[i][c]
                R[i] = [F.sub(x, F.mul(f, y)) for x, y in zip(R[i], R[r])]
        pivots.append(c)
        r += 1
    return np.array(R, dtype=np.uint8).reshape(M.shape), pivots


def rank_profile(F: GF, M):
    """Return ``(rank, rref, kernel_basis)`` of a matrix over F_q.

    ``kernel_basis`` is a list of column vectors spanning ``{v : M v = 0}``,
    one per non-pivot column of the reduced row echelon form.
    """
    M = np.asarray(M, dtype=np.uint8)
    if M.ndim != 2:
        raise DomainError("rank_profile expects a 2-d matrix")
    nrows, ncols = M.shape
    if nrows == 0 or ncols == 0:
        R, pivots = M.copy(), []
    elif F.q == 2:
        R, pivots = _rref_gf2(M)
    else:
        R, pivots = _rref_generic(F, M)
    kernel = []
    pivset = set(pivots)
    for f in range(ncols):
        if f in pivset:
            continue
        v = np.zeros(ncols, dtype=np.uint8)
        v[f] = 1
        for r, c in enumerate(pivots):
            v[c] = F.neg(int(R[r, f]))
        kernel.append(v)
    return len(pivots), R, kernel


def injective_count(q: int, a: int, b: int) -> int:
    """Number of injective linear maps F_q^a -> F_q^b."""
    if a > b:
        return 0
    out = 1
    for i in range(a):
        out *= q**b - q**i
    return out


def _all_vectors(F: GF, b: int):
    """Every vector of F^b, in lexicographic order, as rows of an array."""
    if b == 0:
        return np.zeros((1, 0), dtype=np.uint8)
    grids = np.indices((F.q,) * b).reshape(b, -1).T
    return grids.astype(np.uint8)


def _extend(F: GF, partial, span_vecs, vecs, last: bool):
    """Append one column outside the current span to every partial matrix.

    Partial matrices are stored column by column, shape ``(N, k, b)``.
    """
    b = vecs.shape[1]
    vweights = code_weights(F, 1, b)
    span = span_vecs.astype(np.int64) @ vweights
    allowed = np.ones((len(partial), len(vecs)), dtype=bool)
    allowed[np.arange(len(partial))[:, None], span] = False
    rows, cols = np.nonzero(allowed)
    k = partial.shape[1]
    out = np.empty((len(rows), k + 1, b), dtype=np.uint8)
    # rows come out sorted, so repeating each partial matrix is a cheap gather
    out[:, :k] = np.repeat(partial, allowed.sum(axis=1), axis=0)
    out[:, k] = vecs[cols]
    if last:
        return out, None
    base = span_vecs[rows]
    new = vecs[cols]
    layers = [F.add_table[base, F.mul_table[lam, new][:, None, :]] for lam in range(F.q)]
    return out, np.concatenate(layers, axis=1)


def iter_injective(F: GF, a: int, b: int, chunk: int = 20000):
    """Yield every injective ``b x a`` matrix exactly once, in blocks.

    Blocks come in column-extension order, not canonical order; memory stays
    bounded by ``chunk`` partial matrices times ``q**b``.
    """
    if a < 0 or b < 0:
        raise DomainError("dimensions must be non-negative")
    if a > b:
        return
    if a == 0:
        yield np.zeros((1, b, 0), dtype=np.uint8)
        return
    vecs = _all_vectors(F, b)
    partial = np.zeros((1, 0, b), dtype=np.uint8)
    span_vecs = np.zeros((1, 1, b), dtype=np.uint8)
    for _ in range(a - 1):
        partial, span_vecs = _extend(F, partial, span_vecs, vecs, last=False)
    for s in range(0, len(partial), chunk):
        out, _ = _extend(F, partial[s:s + chunk], span_vecs[s:s + chunk], vecs, last=True)
        yield out.transpose(0, 2, 1)


def enumerate_injective(F: GF, a: int, b: int, *, code_cap: int = DEFAULT_CODE_CAP,
                        count_cap: int = DEFAULT_COUNT_CAP):
    """All ``b x a`` matrices of rank ``a``, lexicographic in row-major entries.

    Returns an array of shape ``(N, b, a)``.  Columns are chosen one at a time
    outside the span of the previous ones, then the result is sorted.
    """
    if a < 0 or b < 0:
        raise DomainError("dimensions must be non-negative")
    if a > b:
        return np.zeros((0, b, a), dtype=np.uint8)
    if F.q ** (a * b) > code_cap:
        raise SizeCapError(f"q^(ab) = {F.q}^{a * b} exceeds the enumeration cap")
    count = injective_count(F.q, a, b)
    if count > count_cap:
        raise SizeCapError(f"|VI({a},{b})| = {count} exceeds the enumeration cap {count_cap}")
    blocks = list(iter_injective(F, a, b))
    mats = blocks[0] if len(blocks) == 1 else np.concatenate(blocks)
    order = np.argsort(encode(F, mats), kind="stable")
    return np.ascontiguousarray(mats[order])


def count_injective_enumerated(F: GF, a: int, b: int) -> int:
    """Count injective matrices by generating them, without the count cap."""
    return sum(len(block) for block in iter_injective(F, a, b))


# ---------------------------------------------------------------------------
# elementary factorization
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Elementary:
    """An elementary matrix.

    kind ``"transvection"``: identity plus ``scalar`` at ``(i, j)``, i != j;
    kind ``"swap"``: rows ``i`` and ``j`` exchanged;
    kind ``"scale"``: entry ``(i, i)`` replaced by nonzero ``scalar``.
    """

    kind: str
    i: int
    j: int = 0
    scalar: int = 1

    def matrix(self, F: GF, n: int):
        E = identity(n)
        if self.kind == "transvection":
            E[self.i, self.j] = self.scalar
        elif self.kind == "swap":
            E[[self.i, self.j]] = E[[self.j, self.i]]
        elif self.kind == "scale":
            E[self.i, self.i] = self.scalar
        else:
            raise DomainError(f"unknown elementary kind {self.kind!r}")
        return E

    def inverse(self, F: GF) -> "Elementary":
        if self.kind == "transvection":
            return Elementary("transvection", self.i, self.j, F.neg(self.scalar))
        if self.kind == "scale":
            return Elementary("scale", self.i, 0, F.inv(self.scalar))
        return self


def factor_invertible(F: GF, g) -> list[Elementary]:
    """Write an invertible matrix as an ordered product of elementary matrices.

    ``word_product(F, n, factor_invertible(F, g))`` equals ``g``.  The word has
    at most ``n*n + n`` letters.
    """
    g = np.asarray(g, dtype=np.uint8)
    n = g.shape[0]
    if g.ndim != 2 or g.shape[1] != n:
        raise DomainError("factor_invertible needs a square matrix")
    M = [list(map(int, row)) for row in g]
    ops = []
    for c in range(n):
        piv = next((r for r in range(c, n) if M[r][c]), None)
        if piv is None:
            raise DomainError("matrix is singular")
        if piv != c:
            M[c], M[piv] = M[piv], M[c]
            ops.append(Elementary("swap", c, piv))
        if M[c][c] != 1:
            s = F.inv(M[c][c])
            M[c] = [F.mul(s, x) for x in M[c]]
            ops.append(Elementary("scale", c, 0, s))
        for r in range(n):
            if r != c and M[r][c]:
                lam = F.neg(M[r][c])
                M[r] = [F.add(x, F.mul(lam, y)) for x, y in zip(M[r], M[c])]
                ops.append(Elementary("transvection", r, c, lam))
    # ops[-1] ... ops[0] g = I
    return [op.inverse(F) for op in ops]


def word_product(F: GF, n: int, word) -> np.ndarray:
    out = identity(n)
    for op in word:
        out = matmul(F, out, op.matrix(F, n))
    return out
