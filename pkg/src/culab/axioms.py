"""Checkers for the Cu-axioms and related regularity properties on finite fragments.

Universal quantifiers range over the fragment.  Existential witnesses are
searched in the fragment closed under one more addition step plus all
pairwise infima.  Witnesses are always bounded above by a given element, so
when the handle can enumerate that element's complete lower set the search
is exhaustive and a failure is definitive; otherwise an unsuccessful search
is reported as ``inconclusive``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

from .catalog import FiniteSpace, LscFinite, nbar
from .errors import EmptyFragment, EmptyFunctionalFamily, InvalidElement
from .order import (
    NO_INFIMUM,
    Compact,
    Constant,
    Element,
    ExtValue,
    FunctionTable,
    GroupCompact,
    SemigroupHandle,
    SequenceDescriptor,
    approximants,
    sup,
    terms,
)

AXIOMS = ("O1", "O2", "O3", "O4", "O5", "O6", "O6plus", "WC", "Riesz", "AlmostDiv")


@dataclass
class Fragment:
    """All sums of at most ``closure_depth`` generators, deduplicated and sorted."""

    S: SemigroupHandle
    generators: tuple
    closure_depth: int = 2
    include_zero: bool = True
    elements: tuple = field(init=False)

    def __post_init__(self):
        self.generators = tuple(self.generators)
        if not self.generators:
            raise EmptyFragment("a fragment needs at least one generator")
        self.S._own(*self.generators)
        layer = {g for g in self.generators}
        seen = set(layer)
        for _ in range(self.closure_depth - 1):
            layer = {self.S.add(a, g) for a in layer for g in self.generators} - seen
            seen |= layer
        if self.include_zero:
            seen.add(self.S.zero())
        self.elements = tuple(sorted(seen, key=self.S.sort_key))

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)


def fragment(S: SemigroupHandle, generators: Sequence[Element], depth: int = 2, include_zero: bool = True) -> Fragment:
    return Fragment(S, tuple(generators), depth, include_zero)


def sample_fragment(S: SemigroupHandle, bound: int = 2) -> Fragment:
    """The handle's own sample, taken as a depth-1 fragment."""
    return Fragment(S, tuple(S.sample(bound)), 1)


def default_fragment(S: SemigroupHandle) -> Fragment:
    """A small fragment mixing compact and soft generators, per catalog kind."""
    from fractions import Fraction

    from .catalog import ExtRational, LscInterval, ZStableModel

    half = Fraction(1, 2)
    if isinstance(S, ExtRational) and S.kind == "nbar":
        return fragment(S, [S.n(1), S.n("inf")], 3)
    if isinstance(S, ExtRational):
        return fragment(S, [S.c(Fraction(1, max(S.m, 1))), S.s(half)], 3)
    if isinstance(S, LscInterval):
        T = S.target
        bump = S.indicator(Fraction(1, 3), Fraction(2, 3), T.c(Fraction(1, T.m)))
        return fragment(S, [S.constant(T.c(1)), S.constant(T.s(half)), bump], 2)
    if isinstance(S, ZStableModel):
        gens = [S.compact(*([1] * S.d))]
        for i in range(S.k):
            gens.append(S.function(*[1 if j == i else half for j in range(S.k)]))
        return fragment(S, gens, 2)
    return sample_fragment(S)


@dataclass
class AxiomReport:
    axiom: str
    verdict: str
    witness: tuple = ()
    examined: int = 0
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def format(self, S: SemigroupHandle) -> str:
        line = f"{self.axiom}: {self.verdict} ({self.examined} tuples)"
        if self.witness:
            line += " witness " + _format_witness(S, self.witness)
        if self.detail:
            line += f" [{self.detail}]"
        return line

    def to_dict(self, S: SemigroupHandle) -> dict:
        return {
            "axiom": self.axiom,
            "verdict": self.verdict,
            "witness": [_format_item(S, w) for w in self.witness],
            "examined": self.examined,
            "detail": self.detail,
        }


def _format_item(S, w) -> str:
    return S.format(w) if isinstance(w, Element) else str(w)


def _format_witness(S, witness) -> str:
    return "(" + ", ".join(_format_item(S, w) for w in witness) + ")"


# -- witness search space -----------------------------------------------------


class _Search:
    """Bounded candidate sets for existential witnesses."""

    def __init__(self, S: SemigroupHandle, elements: Sequence[Element]):
        self.S = S
        self.F = list(elements)
        self._pool = None
        self._cache: dict = {}

    @property
    def pool(self) -> list[Element]:
        if self._pool is None:
            S, F = self.S, self.F
            pool = set(F)
            for a, b in itertools.combinations_with_replacement(F, 2):
                pool.add(S.add(a, b))
                w = S.wedge(a, b)
                if w is not NO_INFIMUM:
                    pool.add(w)
            self._pool = sorted(pool, key=S.sort_key)
        return self._pool

    def below(self, *bounds: Element) -> tuple[list[Element], bool]:
        """Candidates below every bound, and whether the list is complete."""
        key = bounds
        if key in self._cache:
            return self._cache[key]
        S = self.S
        complete = False
        base = None
        for b in bounds:
            low = S.lower_set(b)
            if low is not None:
                base, complete = low, True
                break
        if base is None:
            base = self.pool
        out = [c for c in base if all(S.leq(c, b) for b in bounds)]
        self._cache[key] = (out, complete)
        return out, complete


# -- axiom bodies ---------------------------------------------------------------
# Each instance function returns True (holds), False (violated) or None
# (no witness found in a truncated search space).


def _o5(S, srch, x, z, y, xp, zp):
    cands, complete = srch.below(y)
    res = S.residual(xp, y)
    for w in ([res] if res is not None else []) + cands:
        if S.leq(zp, w) and S.leq(y, S.add(x, w)) and S.leq(S.add(xp, w), y):
            return True
    return False if complete else None


def _o6(S, srch, xp, x, y, z):
    ss, c1 = srch.below(x, y)
    ts, c2 = srch.below(x, z)
    for s in ss:
        for t in ts:
            if S.leq(xp, S.add(s, t)):
                return True
    return False if (c1 and c2) else None


def _o6plus(S, srch, x, y, z, up, u):
    ss, complete = srch.below(x, y)
    for s in ss:
        if S.way_below(up, s) and S.leq(x, S.add(s, z)):
            return True
    return False if complete else None


def _riesz(S, srch, x, y, z, t):
    ws, complete = srch.below(z, t)
    for w in ws:
        if S.leq(x, w) and S.leq(y, w):
            return True
    return False if complete else None


def _almost_div(S, srch, xp, x, n):
    ys, complete = srch.below(x)
    for y in ys:
        if S.leq(S.multiple(n, y), x) and S.leq(xp, S.multiple(n + 1, y)):
            return True
    return False if complete else None


def _wc(S, x, y, z):
    return not S.way_below(S.add(x, z), S.add(y, z)) or S.way_below(x, y)


def _o3(S, a, b, ap, bp):
    return not (S.way_below(a, b) and S.way_below(ap, bp)) or S.way_below(S.add(a, ap), S.add(b, bp))


def _o1(S, a, b):
    if not S.leq(a, b):
        return True
    if sup(S, approximants(S, a)) != a:
        return False
    return sup(S, SequenceDescriptor((a, b), Constant())) == b


def _o2(S, a, horizon):
    d = approximants(S, a)
    if sup(S, d) != a:
        return False
    ts = list(terms(S, d, horizon))
    if S.is_compact(a):
        return S.way_below(a, a)
    return all(S.way_below(s, t) for s, t in zip(ts, ts[1:])) and all(S.leq(t, a) for t in ts)


def _o4(S, F, a, b, horizon, cache=None):
    cache = {} if cache is None else cache
    for e in (a, b):
        if e not in cache:
            cache[e] = list(terms(S, approximants(S, e), horizon))
    t1, t2 = cache[a], cache[b]
    sums = [S.add(x, y) for x, y in zip(t1, t2)]
    cand = S.add(a, b)
    if not all(S.leq(s, cand) for s in sums):
        return False
    for c in F:
        if S.way_below(c, cand) and not any(S.leq(c, s) for s in sums):
            return False
    return True


def replay(S: SemigroupHandle, report: AxiomReport, frag: Fragment | None = None) -> bool:
    """Re-evaluate the axiom body on a fail witness; True if the violation reproduces."""
    if report.verdict != "fail":
        return False
    w = report.witness
    srch = _Search(S, frag.elements if frag else list(w))
    ax = report.axiom
    if ax == "WC":
        return not _wc(S, *w)
    if ax == "O3":
        return not _o3(S, *w)
    if ax == "O1":
        return not _o1(S, *w)
    if ax == "O2":
        return not _o2(S, w[0], 16)
    if ax == "O4":
        return not _o4(S, frag.elements if frag else list(w), *w, 32)
    if ax == "O5":
        x, z, y, xp, zp = w
        return S.leq(S.add(x, z), y) and S.way_below(xp, x) and S.way_below(zp, z) and _o5(S, srch, *w) is False
    if ax == "O6":
        xp, x, y, z = w
        return S.way_below(xp, x) and S.leq(x, S.add(y, z)) and _o6(S, srch, *w) is False
    if ax == "O6plus":
        x, y, z, up, u = w
        ok = S.leq(x, S.add(y, z)) and S.way_below(up, u) and S.leq(u, x) and S.leq(u, y)
        return ok and _o6plus(S, srch, *w) is False
    if ax == "Riesz":
        x, y, z, t = w
        ok = all(S.leq(a, b) for a in (x, y) for b in (z, t))
        return ok and _riesz(S, srch, *w) is False
    if ax == "AlmostDiv":
        xp, x, n = w
        return S.way_below(xp, x) and _almost_div(S, srch, *w) is False
    if ax == "AlmostUnperforation":
        n, s, t = w
        return S.leq(S.multiple(n + 1, s), S.multiple(n, t)) and not S.leq(s, t)
    if ax == "StrictComparison":
        s, t = w[:2]
        return not S.leq(s, t)
    raise ValueError(f"unknown axiom {ax}")


def _elements(frag) -> list[Element]:
    els = list(frag.elements if isinstance(frag, Fragment) else frag)
    if not els:
        raise EmptyFragment("empty fragment")
    return els


def check_axiom(S: SemigroupHandle, axiom: str, frag, horizon: int = 32, n_max: int = 3) -> AxiomReport:
    """Search ``frag`` for a counterexample to ``axiom``."""
    if axiom not in AXIOMS:
        raise ValueError(f"unknown axiom {axiom!r}; expected one of {', '.join(AXIOMS)}")
    F = _elements(frag)
    S._own(*F)
    srch = _Search(S, F)
    count = 0
    truncated = False

    def verdict(result, witness):
        nonlocal truncated
        if result is False:
            return AxiomReport(axiom, "fail", tuple(witness), count)
        if result is None:
            truncated = True
        return None

    wb = {(a, b): S.way_below(a, b) for a in F for b in F} if axiom in ("O3", "O5", "O6", "O6plus", "WC", "AlmostDiv") else {}
    if axiom == "O1":
        for a, b in itertools.product(F, repeat=2):
            count += 1
            if (r := verdict(_o1(S, a, b), (a, b))):
                return r
    elif axiom == "O2":
        for a in F:
            count += 1
            if (r := verdict(_o2(S, a, min(horizon, 16)), (a,))):
                return r
    elif axiom == "O3":
        pairs = [p for p, v in wb.items() if v]
        for (a, b), (ap, bp) in itertools.product(pairs, repeat=2):
            count += 1
            if (r := verdict(_o3(S, a, b, ap, bp), (a, b, ap, bp))):
                return r
    elif axiom == "O4":
        cache: dict = {}
        for a, b in itertools.combinations_with_replacement(F, 2):
            count += 1
            if (r := verdict(_o4(S, F, a, b, horizon, cache), (a, b))):
                return r
    elif axiom == "O5":
        for x, z in itertools.product(F, repeat=2):
            xz = S.add(x, z)
            xps = [c for c in F if wb[(c, x)]]
            zps = [c for c in F if wb[(c, z)]]
            for y in F:
                if not S.leq(xz, y):
                    continue
                for xp, zp in itertools.product(xps, zps):
                    count += 1
                    if (r := verdict(_o5(S, srch, x, z, y, xp, zp), (x, z, y, xp, zp))):
                        return r
    elif axiom == "O6":
        for x, y, z in itertools.product(F, repeat=3):
            if not S.leq(x, S.add(y, z)):
                continue
            for xp in F:
                if not wb[(xp, x)]:
                    continue
                count += 1
                if (r := verdict(_o6(S, srch, xp, x, y, z), (xp, x, y, z))):
                    return r
    elif axiom == "O6plus":
        for x, y, z in itertools.product(F, repeat=3):
            if not S.leq(x, S.add(y, z)):
                continue
            for u in F:
                if not (S.leq(u, x) and S.leq(u, y)):
                    continue
                for up in F:
                    if not wb[(up, u)]:
                        continue
                    count += 1
                    if (r := verdict(_o6plus(S, srch, x, y, z, up, u), (x, y, z, up, u))):
                        return r
    elif axiom == "WC":
        for x, y, z in itertools.product(F, repeat=3):
            count += 1
            if (r := verdict(_wc(S, x, y, z), (x, y, z))):
                return r
    elif axiom == "Riesz":
        for z, t in itertools.combinations_with_replacement(F, 2):
            lows = [a for a in F if S.leq(a, z) and S.leq(a, t)]
            for x, y in itertools.combinations_with_replacement(lows, 2):
                count += 1
                if (r := verdict(_riesz(S, srch, x, y, z, t), (x, y, z, t))):
                    return r
    elif axiom == "AlmostDiv":
        for x in F:
            for xp in F:
                if not wb[(xp, x)]:
                    continue
                for n in range(1, n_max + 1):
                    count += 1
                    if (r := verdict(_almost_div(S, srch, xp, x, n), (xp, x, n))):
                        return r
    if truncated:
        return AxiomReport(axiom, "inconclusive", (), count, "witness search space was truncated")
    return AxiomReport(axiom, "pass", (), count)


def check_all(S: SemigroupHandle, frag, axioms: Sequence[str] = ("O1", "O2", "O3", "O4", "O5", "O6", "Riesz")) -> list[AxiomReport]:
    return [check_axiom(S, ax, frag) for ax in axioms]


def check_almost_unperforation(S: SemigroupHandle, frag, n_max: int = 12) -> AxiomReport:
    """Search for (n, s, t) with (n+1)s ≤ nt but s ≰ t."""
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    F = _elements(frag)
    count = 0
    for s in F:
        multiples_s = [S.multiple(n + 1, s) for n in range(1, n_max + 1)]
        for t in F:
            if S.leq(s, t):
                count += n_max
                continue
            for n in range(1, n_max + 1):
                count += 1
                if S.leq(multiples_s[n - 1], S.multiple(n, t)):
                    return AxiomReport("AlmostUnperforation", "fail", (n, s, t), count)
    return AxiomReport("AlmostUnperforation", "pass", (), count)


def check_strict_comparison(S: SemigroupHandle, frag, functionals: Sequence) -> AxiomReport:
    """Pairs with λ(s) < λ(t) for every supplied λ must satisfy s ≤ t."""
    from .functionals import evaluate

    if not functionals:
        raise EmptyFunctionalFamily("no functionals supplied")
    F = _elements(frag)
    count = 0
    for s, t in itertools.product(F, repeat=2):
        count += 1
        if all(evaluate(lam, s) < evaluate(lam, t) for lam in functionals) and not S.leq(s, t):
            return AxiomReport("StrictComparison", "fail", (s, t), count)
    return AxiomReport("StrictComparison", "pass", (), count)


def is_simple(S: SemigroupHandle, frag) -> bool:
    return simplicity_witness(S, frag) is None


def simplicity_witness(S: SemigroupHandle, frag):
    """A pair (a, b) of nonzero elements with a ≰ ∞_b, or None."""
    from .constructions import infinity_of

    F = _elements(frag)
    zero = S.zero()
    nonzero = [a for a in F if a != zero]
    if not nonzero:
        raise EmptyFragment("the fragment has no nonzero elements")
    for a, b in itertools.product(nonzero, repeat=2):
        if not S.leq(a, infinity_of(S, b)):
            return a, b
    return None


# -- the glued object over a connected three-point space ----------------------


class _Glued(SemigroupHandle):
    """(N_{>0} × Z) ⊔ Lsc(X, N̄)_nc over the chain space X = {p, q, r}.

    Lsc(X, N̄)_nc is every lsc function except n·1_X for n ≥ 1; it contains 0
    and ∞·1_X.  A pair (n, m) behaves like n·1_X towards functions:
    (n,m) + f = n·1_X + f, (n,m) ≤ f iff n·1_X ≤ f, f ≤ (n,m) iff f ≤ n·1_X.
    Pairs compare among themselves by "equal, or n < n'".
    """

    kind = "glued"

    def __init__(self):
        X = FiniteSpace(("p", "q", "r"), frozenset({frozenset(), frozenset("p"), frozenset("pq"), frozenset("pqr")}))
        self.space = X
        self.lsc = LscFinite(X, nbar())
        self.N = self.lsc.target
        super().__init__("glued(p<q<r)", {})

    def pair(self, n: int, m: int) -> Element:
        return self.element(GroupCompact((int(m),), Compact(ExtValue(n))))

    def function(self, values: dict) -> Element:
        return self.element(self.lsc.function({k: self.N.n(v) for k, v in values.items()}).payload)

    def indicator(self, subset, n=1) -> Element:
        return self.function({x: n for x in subset})

    def _const(self, n) -> FunctionTable:
        return self.lsc._make([Compact(ExtValue(n))] * len(self.space.points))

    def _as_fn(self, p):
        return self._const(p.x.value) if isinstance(p, GroupCompact) else p

    def _is_const_multiple(self, p) -> bool:
        vals = self.lsc._vals(p)
        return all(v == vals[0] for v in vals) and isinstance(vals[0], Compact) and vals[0].value != ExtValue(0)

    def _check(self, p) -> None:
        if isinstance(p, GroupCompact):
            v = p.x.value
            if v.is_inf or v.fraction.denominator != 1 or v.fraction < 1 or len(p.g) != 1:
                raise InvalidElement("pairs are (n, m) with n ≥ 1")
            return
        self.lsc._check(p)
        if self._is_const_multiple(p):
            raise InvalidElement("n·1_X with n ≥ 1 is represented by the pairs (n, m)")

    def _zero(self):
        return self.lsc._zero()

    def _leq(self, p, q) -> bool:
        if isinstance(p, GroupCompact) and isinstance(q, GroupCompact):
            return p == q or p.x.value < q.x.value
        return self.lsc._leq(self._as_fn(p), self._as_fn(q))

    def _add(self, p, q):
        if isinstance(p, GroupCompact) and isinstance(q, GroupCompact):
            return GroupCompact((p.g[0] + q.g[0],), Compact(p.x.value + q.x.value))
        zero = self._zero()
        if p == zero:
            return q
        if q == zero:
            return p
        return self.lsc._add(self._as_fn(p), self._as_fn(q))

    def _way_below(self, p, q) -> bool:
        if isinstance(p, GroupCompact):
            return self._leq(p, q)
        return self.lsc._way_below(p, self._as_fn(q))

    def _wedge(self, p, q):
        return NO_INFIMUM

    def _ascent_term(self, limit, k: int):
        if isinstance(limit, GroupCompact):
            return limit
        t = self.lsc._ascent_term(limit, k)
        return self._const(0) if self._is_const_multiple(t) else t

    def _infinity_of(self, p):
        return self.lsc._infinity_of(self._as_fn(p))

    def _lower_set(self, p):
        fn = self._as_fn(p)
        low = self.lsc._lower_set(fn)
        if low is None:
            return None
        out = [f for f in low if not self._is_const_multiple(f)]
        vals = [v.value for v in self.lsc._vals(fn)]
        top = min(vals)
        if isinstance(p, GroupCompact):
            if p.x.value > ExtValue(1):
                return None  # infinitely many pairs (n', m') with n' < n
            out.append(p)
        elif top >= ExtValue(1):
            return None  # infinitely many pairs (n, m) lie below
        return out

    def _sample(self, bound: int) -> list:
        out = [self._zero()]
        for n in range(1, bound + 1):
            out += [GroupCompact((m,), Compact(ExtValue(n))) for m in range(-1, 2)]
        vals = [self.N.n(i) for i in range(bound + 1)] + [self.N.top()]
        for f in self.lsc.functions_with_values(vals):
            if not self._is_const_multiple(f.payload):
                out.append(f.payload)
        return out

    def _format(self, p) -> str:
        if isinstance(p, GroupCompact):
            return f"({p.x.value},{p.g[0]})"
        fn = p
        zero = self.N._zero()
        support = [x for x, v in fn.entries if v != zero]
        vals = {v for x, v in fn.entries if v != zero}
        if not support:
            return "0"
        if len(vals) == 1:
            (v,) = vals
            name = "1_{" + ",".join(support) + "}"
            return name if v == Compact(ExtValue(1)) else f"{self.N._format(v)}·{name}"
        return self.lsc._format(fn)

    def _sort_key(self, p):
        if isinstance(p, GroupCompact):
            return (1, p.x.value.fraction, p.g[0])
        if p == self._zero():
            return (0,)
        return (2, tuple(sorted(self.lsc._sort_key(p))), self.lsc._sort_key(p))


def glued_three_point() -> tuple[_Glued, Fragment]:
    """The glued object and a fragment on which one-sided O6+ fails."""
    G = _Glued()
    U = G.indicator("p")
    gens = (G.pair(1, 0), G.pair(1, 1), U, G.indicator("pq"))
    return G, Fragment(G, gens, 2)


def glued_o6plus_witness():
    G = _Glued()
    U = G.indicator("p")
    return G, (G.pair(1, 0), G.pair(1, 1), U, U, U)
