"""Verification suites behind ``vimod verify``.

Every suite returns a :class:`SuiteReport`.  A suite passes when all of its
checks hold and its negative control (a deliberately perturbed identity,
evaluated on a fixed witness) fails.  Randomized suites draw from
``random.Random(seed)`` (Mersenne Twister) and record the seed.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field

from .errors import DomainError, SizeCapError
from .functors import (ShiftedEvaluation, cokernel_D, d_presentation, free_coinvariant_dim, h0_hor,
                       iterate_modified_presentation, orbit_count, reduced_count, shift_modified,
                       shift_modified_presentation, shift_natural_presentation, split_shift_free)
from .ffield import injective_count
from .homology import resolve_t
from .linalg import coefficient_field
from .rho import rho_value
from .vicat import VImMorphism, category, degrees_up_to, sub_deg, total, unit
from .vmod import (Context, FreeEvaluation, FreeSpec, PresentedEvaluation, free_dim, free_presentation,
                   point_module, random_presentation, restrict_presentation)

PRNG = "MT19937"
SUITES = ("shift-free", "modified-shift-free", "d-of-free", "euler", "commute", "reduce",
          "shift-theorem", "main-bound")
DEFAULT_CAP = 2_000_000
# evaluation-route linear algebra is only attempted on spaces up to this size
SMALL = 3000


@dataclass
class Params:
    q: int = 2
    m: int = 1
    coeff: object = "Q"
    window: int | None = None
    seed: int = 0
    n: tuple | None = None
    d: int | None = None
    r: int | None = None
    imax: int = 2
    cap: int = DEFAULT_CAP
    count: int | None = None

    def to_dict(self):
        K = coefficient_field(self.coeff)
        return {"q": self.q, "m": self.m, "coeff": K.json_tag(), "window": self.window,
                "n": list(self.n) if self.n is not None else None, "d": self.d, "r": self.r,
                "imax": self.imax, "cap": self.cap, "count": self.count}


@dataclass
class SuiteReport:
    suite: str
    params: dict
    seed: int
    checks: int = 0
    instances: int = 0
    counterexamples: list = field(default_factory=list)
    control: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.counterexamples and bool(self.control.get("failed_as_designed"))

    def fail(self, **info):
        self.counterexamples.append(info)

    def to_dict(self):
        return {
            "suite": self.suite,
            "prng": PRNG,
            "seed": self.seed,
            "params": self.params,
            "status": "PASS" if self.passed else "FAIL",
            "checks": self.checks,
            "instances": self.instances,
            "counterexamples": self.counterexamples,
            "negative_control": self.control,
            "details": self.details,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        ctl = "fails as designed" if self.control.get("failed_as_designed") else "DID NOT FAIL"
        return (f"{self.suite}: {status}, {self.checks} checks on {self.instances} instance(s), "
                f"{len(self.counterexamples)} counterexample(s); negative control {ctl}")


def _control(report: SuiteReport, description: str, witness, failures: list):
    report.control = {"description": description, "witness": witness,
                      "failed_as_designed": bool(failures), "failures": failures[:5]}


def _n_vec(p: Params, default: int):
    n = p.n if p.n is not None else (default,)
    if len(n) == 1 and p.m > 1:
        n = n * p.m
    if len(n) != p.m:
        raise DomainError(f"--n has {len(n)} entries but m = {p.m}")
    if any(x < 0 for x in n):
        raise DomainError("--n entries must be non-negative")
    return tuple(n)


def _ctx(p: Params, window: int) -> Context:
    return Context(p.q, p.m, coefficient_field(p.coeff), window)


def _cap_free(p: Params, n, window):
    biggest = max(free_dim(p.q, n, a) for a in degrees_up_to(p.m, window))
    if biggest > p.cap:
        raise SizeCapError(f"instance M({list(n)}) reaches dimension {biggest} within window {window}, "
                           f"above the cap {p.cap}")


def _lower(n, i):
    return sub_deg(n, unit(len(n), i)) if n[i] > 0 else None


def _free_dim_or_zero(q, n, a):
    return 0 if n is None else free_dim(q, n, a)


def _gen_dims(q, pres, a):
    return sum(free_dim(q, g, a) for g in pres.gens)


# ---------------------------------------------------------------------------

def suite_shift_free(p: Params) -> SuiteReport:
    W = 5 if p.window is None else p.window
    n = _n_vec(p, 2)
    _cap_free(p, n, W + 1)
    rep = SuiteReport("shift-free", p.to_dict() | {"window": W, "n": list(n)}, p.seed, instances=1)
    ctx = _ctx(p, W + 1)
    K = ctx.K
    V = FreeEvaluation(ctx, FreeSpec((n,)), W + 1)

    def formula(q, n, i, a, ell_shift=0):
        ni = n[i]
        ell = (q**ni - 1) * q ** (ni - 1) if ni else 0
        return q**ni * free_dim(q, n, a) + (ell + ell_shift) * _free_dim_or_zero(q, _lower(n, i), a)

    for i in range(p.m):
        S = ShiftedEvaluation(V, i)
        pres = shift_natural_presentation(free_presentation([n]), i, p.q, K)
        for a in degrees_up_to(p.m, W):
            rep.checks += 1
            got, want, route2 = S.dim(a), formula(p.q, n, i, a), _gen_dims(p.q, pres, a)
            if not got == want == route2:
                rep.fail(axis=i, degree=list(a), evaluated=got, formula=want, presentation=route2)
    if p.m == 1 and n[0] >= 1:
        classified = 0
        for a in range(W + 1):
            classified += 1
            if not split_shift_free(p.q, n[0], a).ok:
                rep.fail(check="classification counts", degree=a)
        rep.details["classification_checks"] = classified
    # control: shrink the multiplicity of the lower summand by one
    wn = (1,) + (0,) * (p.m - 1)
    Vw = FreeEvaluation(_ctx(p, 3), FreeSpec((wn,)), 3)
    bad = []
    for a in degrees_up_to(p.m, 2):
        got, want = ShiftedEvaluation(Vw, 0).dim(a), formula(p.q, wn, 0, a, ell_shift=-1)
        if got != want:
            bad.append({"degree": list(a), "evaluated": got, "perturbed": want})
    _control(rep, "lower multiplicity (q^n-1)q^(n-1) replaced by one less", {"n": list(wn)}, bad)
    return rep


def _coinvariant_dim(p: Params, ctx, V, n, i, a):
    """Coinvariant dimension of ``M(n)_{a+e_i}`` under ``U_i(a)``."""
    b = list(a)
    b[i] += 1
    if free_dim(p.q, n, b) <= SMALL:
        return shift_modified(V, i).module.dim(a)
    rest = 1
    for j, (x, y) in enumerate(zip(n, a)):
        if j != i:
            rest *= injective_count(p.q, x, y)
    return free_coinvariant_dim(p.q, n[i], a[i]) * rest


def suite_modified_shift_free(p: Params) -> SuiteReport:
    W = 5 if p.window is None else p.window
    n = _n_vec(p, 2)
    _cap_free(p, n, W + 1)
    rep = SuiteReport("modified-shift-free", p.to_dict() | {"window": W, "n": list(n)}, p.seed, instances=1)
    ctx = _ctx(p, W + 1)
    V = FreeEvaluation(ctx, FreeSpec((n,)), W + 1)

    def formula(q, n, i, a, extra=0):
        return free_dim(q, n, a) + (q ** n[i] - 1 + extra) * _free_dim_or_zero(q, _lower(n, i), a)

    for i in range(p.m):
        pres = shift_modified_presentation(free_presentation([n]), i, p.q, ctx.K)
        for a in degrees_up_to(p.m, W):
            rep.checks += 1
            got = _coinvariant_dim(p, ctx, V, n, i, a)
            want, route2 = formula(p.q, n, i, a), _gen_dims(p.q, pres, a)
            if not got == want == route2:
                rep.fail(axis=i, degree=list(a), coinvariants=got, formula=want, presentation=route2)
    if p.m == 1:
        for a in range(W + 1):
            rep.checks += 1
            c, o, r = free_coinvariant_dim(p.q, n[0], a), orbit_count(p.q, n[0], a), reduced_count(p.q, n[0], a)
            if not c == o == r:
                rep.fail(check="coinvariants = orbits = reduced forms", degree=a,
                         coinvariants=c, orbits=o, reduced=r)
    wn = (1,) + (0,) * (p.m - 1)
    Vw = FreeEvaluation(_ctx(p, 3), FreeSpec((wn,)), 3)
    bad = []
    for a in degrees_up_to(p.m, 2):
        got, want = shift_modified(Vw, 0).module.dim(a), formula(p.q, wn, 0, a, extra=1)
        if got != want:
            bad.append({"degree": list(a), "coinvariants": got, "perturbed": want})
    _control(rep, "lower multiplicity q^n-1 replaced by q^n", {"n": list(wn)}, bad)
    return rep


def suite_d_of_free(p: Params) -> SuiteReport:
    W = 4 if p.window is None else p.window
    n = _n_vec(p, 2)
    _cap_free(p, n, W + 1)
    rep = SuiteReport("d-of-free", p.to_dict() | {"window": W, "n": list(n)}, p.seed, instances=1)
    ctx = _ctx(p, W + 1)
    V = FreeEvaluation(ctx, FreeSpec((n,)), W + 1)
    small = all(free_dim(p.q, n, a) <= SMALL for a in degrees_up_to(p.m, W + 1))
    rep.details["evaluation_route"] = small

    def formula(q, n, i, a, extra=0):
        return (q ** n[i] - 1 + extra) * _free_dim_or_zero(q, _lower(n, i), a)

    for i in range(p.m):
        pres = d_presentation(free_presentation([n]), i, p.q, ctx.K)
        E = PresentedEvaluation(ctx.with_window(W), pres, W)
        data = cokernel_D(V, i) if small else None
        for a in degrees_up_to(p.m, W):
            rep.checks += 1
            want, route2 = formula(p.q, n, i, a), E.dim(a)
            got = data.D.dim(a) if data else route2
            kdim = data.K.dim(a) if data else 0
            if not (got == want == route2 and kdim == 0):
                rep.fail(axis=i, degree=list(a), evaluated=got, formula=want, presentation=route2, K=kdim)
    wn = (1,) + (0,) * (p.m - 1)
    data = cokernel_D(FreeEvaluation(_ctx(p, 3), FreeSpec((wn,)), 3), 0)
    bad = []
    for a in degrees_up_to(p.m, 2):
        got, want = data.D.dim(a), formula(p.q, wn, 0, a, extra=1)
        if got != want:
            bad.append({"degree": list(a), "evaluated": got, "perturbed": want})
    _control(rep, "multiplicity q^n-1 replaced by q^n", {"n": list(wn)}, bad)
    return rep


def suite_euler(p: Params) -> SuiteReport:
    W = (4 if p.m == 1 else 3) if p.window is None else p.window
    count = 20 if p.count is None else p.count
    rep = SuiteReport("euler", p.to_dict() | {"window": W, "count": count}, p.seed)
    ctx = _ctx(p, W)
    rng = random.Random(p.seed)
    for k in range(count):
        pres = random_presentation(ctx, rng)
        V = PresentedEvaluation(ctx, pres, W)
        rep.instances += 1
        for i in range(p.m):
            data = cokernel_D(V, i, check_lemma=True)
            for a, (kd, vd, sd, dd) in data.table.items():
                rep.checks += 1
                if kd - vd + sd - dd != 0:
                    rep.fail(instance=k, axis=i, degree=list(a), K=kd, V=vd, Sbar=sd, D=dd)
    # control: drop K and D, i.e. claim dim V = dim bar Sigma V, on the point module
    V0 = PresentedEvaluation(_ctx(p, 3), point_module(p.q, p.m), 3)
    bad = []
    for a, (kd, vd, sd, dd) in cokernel_D(V0, 0).table.items():
        if vd != sd:
            bad.append({"degree": list(a), "V": vd, "Sbar": sd})
    _control(rep, "dim V = dim bar Sigma V (K and D dropped)", "point module", bad)
    return rep


def _random_morphism(cat, a, b, rng):
    parts = []
    for x, y in zip(a, b):
        hs = cat.homs(x, y)
        parts.append(hs.morphism(rng.randrange(len(hs))))
    return VImMorphism(tuple(parts))


def suite_commute(p: Params) -> SuiteReport:
    if p.m < 2:
        raise DomainError("the commute suite needs m >= 2")
    W = 4 if p.window is None else p.window
    count = 3 if p.count is None else p.count
    rep = SuiteReport("commute", p.to_dict() | {"window": W, "count": count}, p.seed)
    ctx = _ctx(p, W)
    cat = ctx.cat
    rng = random.Random(p.seed)
    instances = [random_presentation(ctx, rng, d_max=1, r_max=2) for _ in range(count)]
    instances.append(free_presentation([(1,) * p.m]))
    for k, pres in enumerate(instances):
        V = PresentedEvaluation(ctx, pres, W)
        rep.instances += 1
        for i in range(p.m):
            for j in range(i + 1, p.m):
                A = ShiftedEvaluation(ShiftedEvaluation(V, i), j)
                B = ShiftedEvaluation(ShiftedEvaluation(V, j), i)
                for a in degrees_up_to(p.m, W - 2):
                    b = tuple(x + 1 for x in a)
                    if total(b) > W - 2:
                        b = a
                    f = _random_morphism(cat, a, b, rng)
                    rep.checks += 1
                    if A.dim(a) != B.dim(a) or A.action_matrix(f) != B.action_matrix(f):
                        rep.fail(instance=k, check="natural shifts commute", axes=[i, j], degree=list(a))
                SA = shift_modified(shift_modified(V, i).module, j).module
                SB = shift_modified(shift_modified(V, j).module, i).module
                for a in degrees_up_to(p.m, W - 2):
                    rep.checks += 1
                    if SA.dim(a) != SB.dim(a):
                        rep.fail(instance=k, check="modified shifts commute", axes=[i, j], degree=list(a),
                                 left=SA.dim(a), right=SB.dim(a))
        H = h0_hor(V)
        for i in range(1, p.m):
            pairs = (("natural", h0_hor(ShiftedEvaluation(V, i)), ShiftedEvaluation(H, i)),
                     ("modified", h0_hor(shift_modified(V, i).module), shift_modified(H, i).module))
            for kind, X, Y in pairs:
                for a in degrees_up_to(p.m, W - 1):
                    rep.checks += 1
                    if X.dim(a) != Y.dim(a):
                        rep.fail(instance=k, check=f"horizontal H0 commutes with {kind} shift", axis=i,
                                 degree=list(a), left=X.dim(a), right=Y.dim(a))
    # control: the same commutation along axis 0, which is excluded
    wn = (1,) + (0,) * (p.m - 1)
    Vw = FreeEvaluation(_ctx(p, 3), FreeSpec((wn,)), 3)
    X, Y = h0_hor(shift_modified(Vw, 0).module), shift_modified(h0_hor(Vw), 0).module
    bad = [{"degree": list(a), "left": X.dim(a), "right": Y.dim(a)}
           for a in degrees_up_to(p.m, 2) if X.dim(a) != Y.dim(a)]
    _control(rep, "horizontal H0 commutes with the modified shift on axis 0", {"n": list(wn)}, bad)
    return rep


def suite_reduce(p: Params) -> SuiteReport:
    W = 3 if p.window is None else p.window
    n_max = 2 if p.n is None else max(p.n)
    rep = SuiteReport("reduce", p.to_dict() | {"window": W, "n": [n_max]}, p.seed)
    cat = category(p.q)
    total_homs = sum(injective_count(p.q, n, a + 1) for n in range(n_max + 1) for a in range(W + 1))
    if total_homs * p.q ** W > p.cap:
        raise SizeCapError(f"exhaustive reduction over {total_homs} morphisms with orbits of size "
                           f"up to {p.q ** W} exceeds the cap {p.cap}")
    for n in range(n_max + 1):
        for a in range(W + 1):
            hs = cat.homs(n, a + 1)
            rep.instances += 1
            for k in range(len(hs)):
                f = hs.morphism(k)
                fbar, _ = cat.reduce_morphism(f)
                rep.checks += 1
                if cat.reduce_morphism(fbar)[0] != fbar:
                    rep.fail(check="idempotent", n=n, a=a, index=k)
                orbit = cat.u_orbit(f)
                if fbar not in orbit or any(cat.reduce_morphism(g)[0] != fbar for g in orbit):
                    rep.fail(check="constant on orbits", n=n, a=a, index=k)
                j = cat.pivot_column(f)
                if j is not None:
                    zeroed = [g for g in orbit if not g.mat[1:, j].any()]
                    if zeroed != [fbar]:
                        rep.fail(check="unique zeroed column", n=n, a=a, index=k, count=len(zeroed))
    # control: the identity map f -> f in place of the reduced form
    bad = []
    for f in cat.homs(1, 2).mats:
        f = cat.morphism(f)
        if any(g != f for g in cat.u_orbit(f)):
            bad.append({"n": 1, "a": 1, "morphism": f.mat.tolist()})
    _control(rep, "f itself used as the orbit representative", {"n": 1, "a": 1}, bad)
    return rep


def _bounds(pres):
    d = max((total(g) for g in pres.gens), default=-1)
    r = max((total(rel.degree) for rel in pres.relations), default=-1)
    return d, r


def suite_shift_theorem(p: Params) -> SuiteReport:
    W = 6 if p.window is None else p.window
    d = 0 if p.d is None else p.d
    r = 1 if p.r is None else p.r
    count = 2 if p.count is None else p.count
    rep = SuiteReport("shift-theorem", p.to_dict() | {"window": W, "d": d, "r": r, "count": count}, p.seed)
    ctx = _ctx(p, W)
    rng = random.Random(p.seed)
    samples = [("point module", point_module(p.q, p.m))] if d >= 0 and r >= 1 else []
    samples += [(f"random {k}", random_presentation(ctx, rng, d_max=max(d, 0), r_max=max(r, 0), max_gens=1))
                for k in range(count)]
    rows = []
    for name, pres in samples:
        pd, pr = _bounds(pres)
        if pd > d or pr > r:
            continue
        rep.instances += 1
        s0 = max(d + r, 0)
        for s in (s0, s0 + 1):
            shifted = iterate_modified_presentation(pres, s, p.q, ctx.K)
            t1 = resolve_t(shifted, i_max=1, ctx=ctx, cap=p.cap).t[1]
            rep.checks += 1
            rows.append({"instance": name, "s": s, "t1": t1})
            if t1 != -1:
                rep.fail(instance=name, s=s, t1=t1)
    rep.details["observations"] = rows
    t1 = resolve_t(point_module(p.q, p.m), i_max=1, ctx=ctx, cap=p.cap).t[1]
    bad = [{"s": 0, "t1": t1}] if t1 != -1 else []
    _control(rep, "H_1 vanishes already at s = 0", "point module", bad)
    return rep


def suite_main_bound(p: Params) -> SuiteReport:
    W = 6 if p.window is None else p.window
    d = 2 if p.d is None else p.d
    r = 2 if p.r is None else p.r
    count = 20 if p.count is None else p.count
    rep = SuiteReport("main-bound", p.to_dict() | {"window": W, "d": d, "r": r, "count": count}, p.seed)
    ctx = _ctx(p, W)
    rng = random.Random(p.seed)
    rows = []
    bad = []
    skipped = 0
    k = -1
    # zero modules satisfy every bound trivially, so they are redrawn
    while rep.instances < count and skipped <= 4 * count:
        k += 1
        pres = random_presentation(ctx, rng, d_max=d, r_max=r)
        pd, pr = _bounds(pres)
        report = resolve_t(pres, i_max=p.imax, ctx=ctx, cap=p.cap)
        if report.degree == -1:
            skipped += 1
            continue
        bound = rho_value(p.m, pd, pr)
        rep.instances += 1
        rows.append({"instance": k, "d": pd, "r": pr, "t": {str(i): t for i, t in report.t.items()},
                     "reg": report.reg, "rho": str(bound), "truncated": report.truncated})
        for i, t in report.t.items():
            rep.checks += 1
            # a lower bound at or above t - i settles the check as well
            if t - i > bound.value:
                rep.fail(instance=k, i=i, t=t, d=pd, r=pr, rho=str(bound))
        if report.t[0] > pd - 1:
            bad.append({"instance": k, "t0": report.t[0], "d": pd})
    rep.details["observations"] = rows
    rep.details["zero_modules_redrawn"] = skipped
    _control(rep, "t_0 <= d - 1 in place of t_i - i <= rho_m(d, r)", "the sampled presentations", bad)
    return rep


def restriction_regularity(pres, ctx: Context, axis: int) -> int:
    """Largest regularity over the restrictions freezing ``axis`` (m = 2), within the window.

    The restriction at value ``v`` is a VI-module seen up to degree
    ``window - v``, so the result is a lower estimate of the true supremum.
    """
    if ctx.m != 2:
        raise DomainError("restriction regularities are computed for m = 2")
    best = -1
    for v in range(ctx.window + 1):
        sub = restrict_presentation(pres, axis, v, ctx.q)
        sub_ctx = Context(ctx.q, 1, ctx.K, ctx.window - v)
        if not sub.gens:
            continue
        best = max(best, resolve_t(sub, i_max=2, ctx=sub_ctx).reg)
    return best


def two_axis_bound(pres, ctx: Context, i_max: int = 2) -> dict:
    """Compare ``t_i(V)`` with ``max(-1, 2i + alpha + beta)``.

    ``alpha`` comes from restrictions freezing the second coordinate and
    ``beta`` from restrictions freezing the first.
    """
    alpha = restriction_regularity(pres, ctx, 1)
    beta = restriction_regularity(pres, ctx, 0)
    report = resolve_t(pres, i_max=i_max, ctx=ctx)
    rows = []
    for i, t in report.t.items():
        bound = max(-1, 2 * i + alpha + beta)
        rows.append({"i": i, "t": t, "bound": bound, "ok": t <= bound})
    return {"alpha": alpha, "beta": beta, "rows": rows, "ok": all(r["ok"] for r in rows),
            "truncated": report.truncated}


RUNNERS = {
    "shift-free": suite_shift_free,
    "modified-shift-free": suite_modified_shift_free,
    "d-of-free": suite_d_of_free,
    "euler": suite_euler,
    "commute": suite_commute,
    "reduce": suite_reduce,
    "shift-theorem": suite_shift_theorem,
    "main-bound": suite_main_bound,
}


def run_suite(name: str, params: Params) -> SuiteReport:
    if name not in RUNNERS:
        raise DomainError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    return RUNNERS[name](params)
