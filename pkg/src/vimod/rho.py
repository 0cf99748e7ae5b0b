"""The recursive regularity bound rho_m(d, r) and its auxiliaries.

For ``m = 1``, ``rho_1(d, r) = max(d, d + r - 1)``.  For ``m >= 2``,
``rho_m(-1, r) = -1`` and for ``d >= 0``::

    rho'_m(d, r)  = max(2 + rho_m(d-1, r), r)
    rho''_m(d, r) = max(3 + rho_m(d-1, r), 4 + rho_1(d, r) + rho_{m-1}(d, r))
    rho_m(d, r)   = max(rho_{m-1}(rho'_m(d, r), rho''_m(d, r)), 1 + rho_m(d-1, r))

The values explode with ``m``: ``rho_2`` is exponential in ``d`` and
``rho_3(2, r)`` already has more than ``10**19`` binary digits.  Evaluation
therefore carries a flag: a :class:`RhoValue` is either exact or a certified
lower bound.  Bounds only use two facts that follow from the definition
itself, ``rho_m(d, r) >= d`` and ``rho_{m-1}(x, y) >= x``, plus the explicit
monotonicity of ``rho_1``.  Whenever a loop over ``d`` would exceed
``LOOP_LIMIT`` iterations, or an argument is already a bound, the value is
replaced by such a bound.
"""

from __future__ import annotations

import csv
import io
import json
import threading
from dataclasses import dataclass, field
from typing import NamedTuple

from .errors import DomainError, SizeCapError

MAX_M = 6
MAX_D = 64
MAX_R = 64
LOOP_LIMIT = 100_000


class RhoValue(NamedTuple):
    value: int
    exact: bool = True

    def __str__(self):
        return str(self.value) if self.exact else f">={self.value}"


def _plus(x: RhoValue, c: int) -> RhoValue:
    return RhoValue(x.value + c, x.exact)


def _max(*xs: RhoValue) -> RhoValue:
    return RhoValue(max(x.value for x in xs), all(x.exact for x in xs))


def _check(m, d, r, caps=True):
    for name, x in (("m", m), ("d", d), ("r", r)):
        if not isinstance(x, int) or isinstance(x, bool):
            raise DomainError(f"{name} must be an integer")
    if m < 1:
        raise DomainError("m must be at least 1")
    if d < -1 or r < -1:
        raise DomainError("d and r must be at least -1")
    if caps and (m > MAX_M or d > MAX_D or r > MAX_R):
        raise SizeCapError(f"(m, d, r) = ({m}, {d}, {r}) exceeds the caps m<={MAX_M}, d<={MAX_D}, r<={MAX_R}")


def rho1(d: int, r: int) -> int:
    return max(d, d + r - 1)


def _rho1v(d: RhoValue, r: RhoValue) -> RhoValue:
    # rho_1 is increasing in both arguments, so bounds pass straight through
    return RhoValue(rho1(d.value, r.value), d.exact and r.exact)


class _Memo:
    """Memo table keyed by ``(m, d, r)`` with exact ``d, r``, filled in increasing ``d``."""

    def __init__(self):
        self.table: dict = {}
        self.lock = threading.Lock()

    def value(self, m: int, d: RhoValue, r: RhoValue) -> RhoValue:
        if m == 1:
            return _rho1v(d, r)
        if d.value == -1 and d.exact:
            return RhoValue(-1)
        if not (d.exact and r.exact) or d.value > LOOP_LIMIT:
            return RhoValue(d.value, False)
        dv, rv = d.value, r.value
        table = self.table
        hit = table.get((m, dv, rv))
        if hit is not None:
            return hit
        start = dv
        while start > 0 and (m, start - 1, rv) not in table:
            start -= 1
        prev = table.get((m, start - 1, rv), RhoValue(-1))
        for dd in range(start, dv + 1):
            ddv = RhoValue(dd)
            p1 = _max(_plus(prev, 2), r)
            p2 = _max(_plus(prev, 3), _plus(self.value(m - 1, ddv, r), 4 + rho1(dd, rv)))
            inner = self.value(m - 1, p1, p2)
            prev = _max(inner, _plus(prev, 1))
            table[(m, dd, rv)] = prev
        return prev


_MEMO = _Memo()


def rho_value(m: int, d: int, r: int) -> RhoValue:
    """``rho_m(d, r)`` as an exact value or a certified lower bound (memoized)."""
    _check(m, d, r)
    with _MEMO.lock:
        return _MEMO.value(m, RhoValue(d), RhoValue(r))


def _exact(x: RhoValue, what: str) -> int:
    if not x.exact:
        raise SizeCapError(f"{what} is too large to represent exactly; it is at least {x.value}")
    return x.value


def rho(m: int, d: int, r: int) -> int:
    """``rho_m(d, r)`` as an int; :class:`SizeCapError` if it cannot be represented."""
    return _exact(rho_value(m, d, r), f"rho_{m}({d}, {r})")


def rho_prime_value(m: int, d: int, r: int) -> RhoValue:
    _check(m, d, r)
    if m < 2 or d < 0:
        raise DomainError("rho' is defined for m >= 2 and d >= 0")
    return _max(_plus(rho_value(m, d - 1, r), 2), RhoValue(r))


def rho_dprime_value(m: int, d: int, r: int) -> RhoValue:
    _check(m, d, r)
    if m < 2 or d < 0:
        raise DomainError("rho'' is defined for m >= 2 and d >= 0")
    return _max(_plus(rho_value(m, d - 1, r), 3), _plus(rho_value(m - 1, d, r), 4 + rho1(d, r)))


def rho_prime(m: int, d: int, r: int) -> int:
    """``rho'_m(d, r)`` for ``m >= 2`` and ``d >= 0``."""
    return _exact(rho_prime_value(m, d, r), f"rho'_{m}({d}, {r})")


def rho_dprime(m: int, d: int, r: int) -> int:
    """``rho''_m(d, r)`` for ``m >= 2`` and ``d >= 0``."""
    return _exact(rho_dprime_value(m, d, r), f"rho''_{m}({d}, {r})")


def rho_unmemoized(m: int, d: int, r: int) -> RhoValue:
    """Independent evaluator: plain recursion on tuples, no table, everything recomputed."""
    _check(m, d, r, caps=False)

    def big(*pairs):
        return max(p[0] for p in pairs), all(p[1] for p in pairs)

    def ev(m, d, r):
        # d and r are (value, exact) pairs
        if m == 1:
            return max(d[0], d[0] + r[0] - 1), d[1] and r[1]
        if d == (-1, True):
            return -1, True
        if not (d[1] and r[1]) or d[0] > LOOP_LIMIT:
            return d[0], False
        val = (-1, True)
        for dd in range(0, d[0] + 1):
            sub = ev(m - 1, (dd, True), r)
            first = big((val[0] + 2, val[1]), r)
            second = big((val[0] + 3, val[1]), (4 + max(dd, dd + r[0] - 1) + sub[0], sub[1]))
            val = big(ev(m - 1, first, second), (val[0] + 1, val[1]))
        return val

    v, x = ev(m, (d, True), (r, True))
    return RhoValue(v, x)


# ---------------------------------------------------------------------------
# scans and tables
# ---------------------------------------------------------------------------

@dataclass
class ScanReport:
    m_max: int
    d_max: int
    r_max: int
    checked: int = 0
    exact: int = 0
    bounded: int = 0
    violations: list = field(default_factory=list)
    monotone_d: bool = True
    monotone_r: bool = True
    memo_agrees: bool = True

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self):
        return {
            "grid": {"m_max": self.m_max, "d_max": self.d_max, "r_max": self.r_max},
            "checked": self.checked,
            "exact_values": self.exact,
            "lower_bounds": self.bounded,
            "violations": self.violations,
            "observed_monotone_in_d": self.monotone_d,
            "observed_monotone_in_r": self.monotone_r,
            "memoized_matches_unmemoized": self.memo_agrees,
        }


def _certainly_greater(x: RhoValue, y: int) -> bool:
    # x.value is exact or a lower bound, so x.value > y settles it either way
    return x.value > y


def rho_inequality_scan(m_max: int, d_max: int, r_max: int, compare_unmemoized: bool = True) -> ScanReport:
    """Check ``rho' > d``, ``rho'' > r`` and ``rho >= d`` over a grid.

    A check passes only if it is decided, which for a lower bound means the
    bound already satisfies it.  Monotonicity is recorded where both values
    are exact, as an observation only.
    """
    _check(m_max, d_max, r_max)
    rep = ScanReport(m_max, d_max, r_max)
    for m in range(1, m_max + 1):
        for d in range(-1, d_max + 1):
            for r in range(-1, r_max + 1):
                v = rho_value(m, d, r)
                rep.checked += 1
                if v.exact:
                    rep.exact += 1
                else:
                    rep.bounded += 1
                if not _certainly_greater(v, d - 1):
                    rep.violations.append({"m": m, "d": d, "r": r, "check": "rho >= d", "rho": str(v)})
                if m >= 2 and d >= 0:
                    p1, p2 = rho_prime_value(m, d, r), rho_dprime_value(m, d, r)
                    if not _certainly_greater(p1, d):
                        rep.violations.append({"m": m, "d": d, "r": r, "check": "rho' > d", "value": str(p1)})
                    if not _certainly_greater(p2, r):
                        rep.violations.append({"m": m, "d": d, "r": r, "check": "rho'' > r", "value": str(p2)})
                for prev, flag in ((rho_value(m, d - 1, r) if d > -1 else None, "monotone_d"),
                                   (rho_value(m, d, r - 1) if r > -1 else None, "monotone_r")):
                    if prev is not None and v.exact and prev.exact and v.value < prev.value:
                        setattr(rep, flag, False)
                if compare_unmemoized and v != rho_unmemoized(m, d, r):
                    rep.memo_agrees = False
                    rep.violations.append({"m": m, "d": d, "r": r, "check": "memo == plain", "rho": str(v)})
    return rep


def rho_rows(m_max: int, d_max: int, r_max: int):
    """Rows ``(m, d, r, rho, rho', rho'')`` of :class:`RhoValue`; auxiliaries are ``None`` where undefined."""
    _check(m_max, d_max, r_max)
    rows = []
    for m in range(1, m_max + 1):
        for d in range(-1, d_max + 1):
            for r in range(-1, r_max + 1):
                aux = m >= 2 and d >= 0
                rows.append((m, d, r, rho_value(m, d, r),
                             rho_prime_value(m, d, r) if aux else None,
                             rho_dprime_value(m, d, r) if aux else None))
    return rows


HEADER = ("m", "d", "r", "rho", "rho_prime", "rho_dprime")


def _cell(x):
    if x is None:
        return ""
    if isinstance(x, RhoValue):
        return str(x)
    return x


def rho_table_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(HEADER)
    for row in rows:
        w.writerow([_cell(x) for x in row])
    return buf.getvalue()


def _json_cell(x):
    if isinstance(x, RhoValue):
        return x.value if x.exact else {"at_least": x.value}
    return x


def rho_table_json(rows) -> str:
    return json.dumps([{k: _json_cell(v) for k, v in zip(HEADER, row)} for row in rows], indent=2) + "\n"
