"""Sparse exact linear algebra over the coefficient field k.

Vectors are ``dict`` objects mapping a column index to a nonzero scalar.  The
coefficient field is either the rationals (``fractions.Fraction``) or a prime
field ``F_p`` (plain ints reduced mod ``p``).  Module bases reach several
thousand elements while pushforward vectors have a handful of entries, so
dictionary rows beat dense arrays here.
"""

from __future__ import annotations

import heapq
from fractions import Fraction

from .errors import DomainError


class Rationals:
    """The field Q with exact ``Fraction`` scalars."""

    p = None
    tag = "Q"

    def __repr__(self):
        return "Rationals()"

    def __eq__(self, other):
        return isinstance(other, Rationals)

    def __hash__(self):
        return hash("Q")

    def convert(self, x):
        return Fraction(x)

    def from_fraction(self, num: int, den: int):
        if den == 0:
            raise DomainError("zero denominator")
        return Fraction(num, den)

    def to_pair(self, x):
        x = Fraction(x)
        return x.numerator, x.denominator

    def inv(self, x):
        if x == 0:
            raise DomainError("zero has no inverse")
        return 1 / Fraction(x)

    def json_tag(self):
        return "Q"


class PrimeField:
    """The field F_p; scalars are ints in ``range(p)``."""

    tag = "Fp"

    def __init__(self, p: int):
        if p < 2 or any(p % d == 0 for d in range(2, int(p**0.5) + 1)):
            raise DomainError(f"{p} is not prime")
        self.p = p

    def __repr__(self):
        return f"PrimeField({self.p})"

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("Fp", self.p))

    def convert(self, x):
        if isinstance(x, Fraction):
            return self.from_fraction(x.numerator, x.denominator)
        return int(x) % self.p

    def from_fraction(self, num: int, den: int):
        if den % self.p == 0:
            raise DomainError(f"denominator {den} is not invertible mod {self.p}")
        return num * pow(den, -1, self.p) % self.p

    def to_pair(self, x):
        return int(x) % self.p, 1

    def inv(self, x):
        if x % self.p == 0:
            raise DomainError("zero has no inverse")
        return pow(x, -1, self.p)

    def json_tag(self):
        return {"Fp": self.p}


def coefficient_field(spec):
    """Build a coefficient field from ``"Q"``, ``{"Fp": p}``, ``"Fp:p"`` or an int."""
    if isinstance(spec, (Rationals, PrimeField)):
        return spec
    if spec is None or spec == "Q":
        return Rationals()
    if isinstance(spec, dict) and set(spec) == {"Fp"}:
        return PrimeField(int(spec["Fp"]))
    if isinstance(spec, int):
        return PrimeField(spec)
    if isinstance(spec, str):
        s = spec.strip()
        for prefix in ("Fp:", "F", "GF"):
            if s.startswith(prefix) and s[len(prefix):].isdigit():
                return PrimeField(int(s[len(prefix):]))
    raise DomainError(f"unrecognised coefficient field {spec!r}")


# ---------------------------------------------------------------------------
# sparse vectors
# ---------------------------------------------------------------------------

def axpy(y: dict, a, x: dict, p):
    """``y += a*x`` in place, dropping zeros."""
    if p is None:
        for c, v in x.items():
            nv = y.get(c, 0) + a * v
            if nv:
                y[c] = nv
            else:
                y.pop(c, None)
    else:
        for c, v in x.items():
            nv = (y.get(c, 0) + a * v) % p
            if nv:
                y[c] = nv
            else:
                y.pop(c, None)


def scale(x: dict, a, p) -> dict:
    if p is None:
        return {c: a * v for c, v in x.items()}
    return {c: a * v % p for c, v in x.items()}


def normalize(K, v: dict) -> dict:
    """Convert scalars into ``K`` and drop zeros."""
    out = {}
    for c, x in v.items():
        x = K.convert(x)
        if x:
            out[c] = x
    return out


class Echelon:
    """Incremental row space in semi-echelon form.

    Every stored row has pivot 1 at its smallest column.  With ``track=True``
    each row remembers which combination of inserted vectors produced it, so
    vectors that reduce to zero yield kernel relations.
    """

    def __init__(self, K, track: bool = False):
        self.K = K
        self.p = K.p
        self.rows: dict[int, dict] = {}
        self.track = track
        self.combos: dict[int, dict] = {}

    def __len__(self):
        return len(self.rows)

    @property
    def rank(self):
        return len(self.rows)

    def _neg(self, x):
        return -x if self.p is None else (-x) % self.p

    def _reduce(self, v: dict, combo, full: bool):
        """Eliminate pivot columns from ``v`` in ascending order.

        Without ``full`` it stops at the first column that is not a pivot;
        entries beyond it may still sit on pivot columns.
        """
        rows = self.rows
        p = self.p
        heap = list(v)
        heapq.heapify(heap)
        seen = set()
        lead = None
        while heap:
            c = heapq.heappop(heap)
            if c in seen:
                continue
            seen.add(c)
            coef = v.get(c)
            if not coef:
                continue
            row = rows.get(c)
            if row is None:
                if lead is None:
                    lead = c
                    if not full:
                        break
                continue
            a = self._neg(coef)
            for col in row:
                if col not in v:
                    heapq.heappush(heap, col)
            axpy(v, a, row, p)
            if combo is not None:
                axpy(combo, a, self.combos[c], p)
        return lead

    def reduce(self, v: dict, full: bool = True) -> dict:
        """Return a copy of ``v`` reduced against the stored rows."""
        w = dict(v)
        self._reduce(w, None, full)
        return w

    def express(self, v: dict):
        """Fully reduce ``v``; return ``(remainder, combo)`` with ``v = sum combo + remainder``.

        ``combo`` is taken over the tracked labels, so with tracking enabled a
        zero remainder means ``v`` lies in the span and ``combo`` gives its
        coordinates.
        """
        w = dict(v)
        cb = {}
        self._reduce(w, cb if self.track else None, True)
        return w, scale(cb, -1, self.p)

    def contains(self, v: dict) -> bool:
        w = dict(v)
        return self._reduce(w, None, False) is None

    def add(self, v: dict, combo: dict | None = None):
        """Insert ``v``.  Returns ``None`` if it was new, else the kernel combo.

        Without tracking, a dependent vector returns an empty dict.
        """
        w = dict(v)
        cb = dict(combo) if (self.track and combo is not None) else ({} if self.track else None)
        lead = self._reduce(w, cb, False)
        if lead is None:
            return cb if cb is not None else {}
        # entries right of the lead may still sit on pivot columns (semi-echelon)
        piv = w[lead]
        if piv != 1:
            inv = self.K.inv(piv)
            w = scale(w, inv, self.p)
            if cb is not None:
                cb = scale(cb, inv, self.p)
        self.rows[lead] = w
        if self.track:
            self.combos[lead] = cb
        return None

    def add_many(self, vectors, target: int | None = None) -> int:
        """Insert vectors until exhausted or the rank reaches ``target``."""
        for v in vectors:
            if target is not None and len(self.rows) >= target:
                break
            self.add(v)
        return len(self.rows)

    def pivots(self):
        return sorted(self.rows)


def rank_of(K, vectors) -> int:
    E = Echelon(K)
    for v in vectors:
        E.add(v)
    return E.rank


def kernel(K, images) -> list[dict]:
    """Basis of ``{x : sum_j x_j images[j] = 0}`` as sparse combos over ``j``."""
    E = Echelon(K, track=True)
    out = []
    for j, v in enumerate(images):
        combo = E.add(v, {j: 1})
        if combo is not None and combo:
            out.append(combo)
    return out


def image_and_kernel(K, images):
    """Return ``(echelon_of_image, kernel_combos)`` in one elimination pass."""
    E = Echelon(K, track=True)
    ker = []
    for j, v in enumerate(images):
        combo = E.add(v, {j: 1})
        if combo is not None and combo:
            ker.append(combo)
    return E, ker


def project(v: dict, keep) -> dict:
    """Restriction of ``v`` to the columns in ``keep`` (a set or a predicate)."""
    if callable(keep):
        return {c: x for c, x in v.items() if keep(c)}
    return {c: x for c, x in v.items() if c in keep}


def complement_columns(E: Echelon, n: int) -> list[int]:
    """Standard basis columns not used as pivots: a basis of ``k^n / rowspace``."""
    piv = E.rows
    return [c for c in range(n) if c not in piv]


def quotient_coordinates(E: Echelon, v: dict, basis_cols: list[int]) -> list:
    """Coordinates of ``v + rowspace`` in the basis of non-pivot columns.

    The semi-echelon rows are fully reduced first, so a vector reduced against
    them has support on non-pivot columns only.
    """
    w = E.reduce(v, full=True)
    index = {c: i for i, c in enumerate(basis_cols)}
    out = [0] * len(basis_cols)
    for c, x in w.items():
        out[index[c]] = x
    return out


def dense_rank(K, rows: list[list]) -> int:
    return rank_of(K, [{j: x for j, x in enumerate(r) if x} for r in rows])
