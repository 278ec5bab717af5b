"""Constructors for the catalog of Cu-semigroups.

Covered kinds: N̄, the softened semigroups D ⊔ (0,∞] with D = N[1/m], finite
tables, lower semicontinuous functions on finite spaces and step functions on
[0,1], the Z-stable model V ⊔ LAff(simplex)_{++}, the group adjunction S_G and
the gap fragment used as an almost-unperforation counterexample.
"""
from __future__ import annotations

import bisect
import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Sequence

from .errors import (
    BadConstraint,
    BadPairing,
    BadParam,
    InvalidElement,
    InvalidTable,
    NotAbsorbing,
)
from .order import (
    INF,
    NO_INFIMUM,
    ZERO,
    Compact,
    Element,
    ExtValue,
    FunctionTable,
    GroupCompact,
    SemigroupHandle,
    Soft,
    TableIndex,
    TupleValue,
    ext,
    format_payload,
)


def in_base(q: Fraction, m: int) -> bool:
    """True when q lies in N[1/m], i.e. every prime of its denominator divides m."""
    if q < 0:
        return False
    d = Fraction(q).denominator
    while d > 1:
        g = gcd(d, m)
        if g == 1:
            return False
        d //= g
    return True


def _memo(fn):
    """Cache a binary payload operation on the handle instance."""
    name = fn.__name__

    def wrapped(self, p, q):
        cache = self.__dict__.setdefault("_cache_" + name, {})
        key = (p, q)
        if key not in cache:
            if len(cache) > 200_000:
                cache.clear()
            cache[key] = fn(self, p, q)
        return cache[key]

    wrapped.__name__ = name
    wrapped.__doc__ = fn.__doc__
    return wrapped


def _val_key(v: ExtValue):
    return (1, Fraction(0)) if v.is_inf else (0, v.fraction)


# -- N̄ and the softened semigroups ------------------------------------------


class ExtRational(SemigroupHandle):
    """N̄ (kind ``nbar``) or D ⊔ (0,∞] with D = N[1/m] (kind ``softened``).

    Compact elements c_x have x in D; soft elements s_x have x in (0,∞].
    In N̄ the only soft element is s_∞, printed as ``inf``.
    """

    def __init__(self, kind: str, m: int = 1):
        if kind not in ("nbar", "softened"):
            raise BadParam(f"unknown kind {kind!r}")
        if not isinstance(m, int) or m < 1:
            raise BadParam(f"denominator base must be a positive integer, got {m!r}")
        if kind == "nbar" and m != 1:
            raise BadParam("nbar takes m = 1")
        self.kind = kind
        self.m = m
        sid = "nbar" if kind == "nbar" else f"softened({m})"
        super().__init__(sid, {"m": m})

    @property
    def _grid_base(self) -> int:
        return self.m

    def _in_d(self, q: Fraction) -> bool:
        return in_base(q, self.m)

    # element constructors
    def c(self, x) -> Element:
        return self.element(Compact(ext(x)))

    def s(self, x) -> Element:
        return self.element(Soft(ext(x)))

    def n(self, x) -> Element:
        """N̄ shorthand: integers are compact, ``"inf"`` is s_∞."""
        x = ext(x)
        return self.s(x) if x.is_inf else self.c(x)

    def _check(self, p) -> None:
        if isinstance(p, Compact):
            if p.value.is_inf or not self._in_d(p.value.fraction):
                raise InvalidElement(f"{p.value} is not a compact value of {self.sid}")
        elif isinstance(p, Soft):
            if self.kind == "nbar" and not p.value.is_inf:
                raise InvalidElement("the only soft element of N̄ is ∞")
        else:
            raise InvalidElement(f"{format_payload(p)} is not an element of {self.sid}")

    def _zero(self):
        return Compact(ZERO)

    def _leq(self, p, q) -> bool:
        x, y = p.value, q.value
        if isinstance(p, Compact) and isinstance(q, Soft):
            return x == ZERO or x < y
        return x <= y

    def _add(self, p, q):
        v = p.value + q.value
        if isinstance(p, Compact) and isinstance(q, Compact):
            return Compact(v)
        return Soft(v)

    def _way_below(self, p, q) -> bool:
        if not self._leq(p, q):
            return False
        if isinstance(p, Compact) or isinstance(q, Compact):
            return True
        return p.value < q.value

    def _wedge(self, p, q):
        return p if self._leq(p, q) else q

    def _limit(self, limit):
        if isinstance(limit, Element):
            return limit.payload
        limit = ext(limit)
        if limit == ZERO:
            return Compact(ZERO)
        if self.kind == "nbar" and not limit.is_inf:
            raise InvalidElement("in N̄ strictly increasing sequences only converge to ∞")
        return Soft(limit)

    def _grid_below(self, v: ExtValue, k: int, strict: bool) -> Fraction:
        """Largest q ≤ k with q·m^k integral and q ≤ v (q < v when strict)."""
        scale = self._grid_base ** k
        cap = Fraction(k) if v.is_inf else min(Fraction(k), v.fraction)
        num = (cap * scale).__floor__()
        q = Fraction(num, scale)
        if strict and not v.is_inf and q >= v.fraction:
            q = Fraction(num - 1, scale) if num > 0 else Fraction(0)
        return max(q, Fraction(0))

    def _ascent_term(self, limit, k: int):
        """k-th term of the canonical approximating sequence of ``limit``.

        The term map is monotone in ``limit``, which keeps pointwise
        applications to lower semicontinuous functions lower semicontinuous.
        """
        v = limit.value
        g = Compact(ExtValue(self._grid_below(v, k, strict=isinstance(limit, Soft))))
        if self.kind == "nbar" or v.is_inf or v == ZERO:
            return g
        soft = Soft(v * ExtValue(1 - Fraction(1, 2**k)))
        return g if self._leq(soft, g) else soft

    def _infinity_of(self, p):
        return p if p.value == ZERO else Soft(INF)

    def _sample(self, bound: int) -> list:
        out = [Compact(ZERO), Soft(INF)]
        for d in range(1, bound + 1):
            for num in range(1, bound * d + 1):
                q = Fraction(num, d)
                if q.denominator != d:
                    continue
                if self._in_d(q):
                    out.append(Compact(ExtValue(q)))
                if self.kind == "softened":
                    out.append(Soft(ExtValue(q)))
        return out

    def _residual(self, p, q):
        """Largest w with p + w ≤ q, assuming p ≤ q."""
        if isinstance(q, Soft) and q.value.is_inf:
            return q
        gap = q.value - p.value
        if gap == ZERO:
            return Compact(ZERO)
        if isinstance(p, Compact) and isinstance(q, Soft):
            return Soft(gap)
        return Compact(gap) if self._in_d(gap.fraction) else Soft(gap)

    def _round_down(self, v):
        """Largest element of this semigroup below a target value v."""
        try:
            self._check(v)
            return v
        except InvalidElement:
            if v.value == ZERO:
                return Compact(ZERO)
            return Soft(v.value) if self.kind == "softened" else Compact(ExtValue(int(v.value.fraction)))

    def _lower_set(self, p):
        if self.kind != "nbar" or p.value.is_inf:
            return None
        return [Compact(ExtValue(i)) for i in range(int(p.value.fraction) + 1)]

    def _format(self, p) -> str:
        if self.kind == "nbar":
            return str(p.value)
        return format_payload(p)

    def _sort_key(self, p):
        return (*_val_key(p.value), 1 if isinstance(p, Compact) else 0)

    def top(self) -> Element:
        return self.s(INF)

    def value(self, a: Element) -> ExtValue:
        return a.payload.value


def make_catalog(kind: str, m: int = 1) -> ExtRational:
    """``make_catalog("nbar", 1)`` or ``make_catalog("softened", m)``."""
    if not isinstance(m, int) or m < 1:
        raise BadParam(f"m must be a positive integer, got {m!r}")
    return ExtRational(kind, m)


def nbar() -> ExtRational:
    return ExtRational("nbar", 1)


def softened(m: int) -> ExtRational:
    return make_catalog("softened", m)


# -- finite tables ------------------------------------------------------------


@dataclass(frozen=True)
class FiniteTable:
    elements: tuple
    add: tuple
    leq: tuple


def finite_table(names: Sequence[str], add, leq) -> FiniteTable:
    """Build a table; ``add`` and ``leq`` may be matrices or callables on indices."""
    n = len(names)
    if callable(add):
        add = [[add(i, j) for j in range(n)] for i in range(n)]
    if callable(leq):
        leq = [[bool(leq(i, j)) for j in range(n)] for i in range(n)]
    return FiniteTable(tuple(names), tuple(tuple(r) for r in add), tuple(tuple(r) for r in leq))


def validate_table(t: FiniteTable) -> int:
    """Check the table axioms and return the index of the neutral element."""
    n = len(t.elements)
    if n == 0:
        raise InvalidTable("nonempty", "no elements")
    if len(set(t.elements)) != n:
        raise InvalidTable("names", "duplicate element names")
    if len(t.add) != n or any(len(r) != n for r in t.add):
        raise InvalidTable("totality", "addition table has the wrong shape")
    if len(t.leq) != n or any(len(r) != n for r in t.leq):
        raise InvalidTable("totality", "order table has the wrong shape")
    A, L = t.add, t.leq
    for i in range(n):
        for j in range(n):
            if not (isinstance(A[i][j], int) and 0 <= A[i][j] < n):
                raise InvalidTable("totality", f"{t.elements[i]}+{t.elements[j]} is undefined")
    for i, j in itertools.product(range(n), repeat=2):
        if A[i][j] != A[j][i]:
            raise InvalidTable("commutativity", f"{t.elements[i]}, {t.elements[j]}")
    for i, j, k in itertools.product(range(n), repeat=3):
        if A[A[i][j]][k] != A[i][A[j][k]]:
            raise InvalidTable("associativity", f"{t.elements[i]}, {t.elements[j]}, {t.elements[k]}")
    zeros = [z for z in range(n) if all(A[z][i] == i for i in range(n))]
    if not zeros:
        raise InvalidTable("zero", "no neutral element")
    z = zeros[0]
    for i in range(n):
        if not L[i][i]:
            raise InvalidTable("reflexivity", t.elements[i])
    for i, j in itertools.product(range(n), repeat=2):
        if i != j and L[i][j] and L[j][i]:
            raise InvalidTable("antisymmetry", f"{t.elements[i]}, {t.elements[j]}")
    for i, j, k in itertools.product(range(n), repeat=3):
        if L[i][j] and L[j][k] and not L[i][k]:
            raise InvalidTable("transitivity", f"{t.elements[i]}, {t.elements[j]}, {t.elements[k]}")
    for i, j, k in itertools.product(range(n), repeat=3):
        if L[i][j] and not L[A[i][k]][A[j][k]]:
            raise InvalidTable("compatibility", f"{t.elements[i]}, {t.elements[j]}, {t.elements[k]}")
    for i in range(n):
        if not L[z][i]:
            raise InvalidTable("positivity", f"zero is not below {t.elements[i]}")
    return z


class TableHandle(SemigroupHandle):
    """A finite positively ordered monoid; every element is compact."""

    kind = "table"

    def __init__(self, t: FiniteTable, name: str | None = None):
        self.table = t
        self.z = validate_table(t)
        super().__init__(name or "table(" + ",".join(t.elements) + ")", {"elements": t.elements})

    def named(self, name: str) -> Element:
        return self.element(TableIndex(self.table.elements.index(name)))

    def _check(self, p) -> None:
        if not isinstance(p, TableIndex) or not 0 <= p.index < len(self.table.elements):
            raise InvalidElement(f"{p!r} is not an element of {self.sid}")

    def _zero(self):
        return TableIndex(self.z)

    def _leq(self, p, q) -> bool:
        return self.table.leq[p.index][q.index]

    def _add(self, p, q):
        return TableIndex(self.table.add[p.index][q.index])

    def _way_below(self, p, q) -> bool:
        # increasing sequences in a finite poset stabilize
        return self._leq(p, q)

    def _wedge(self, p, q):
        n = len(self.table.elements)
        lower = [i for i in range(n) if self.table.leq[i][p.index] and self.table.leq[i][q.index]]
        tops = [i for i in lower if all(self.table.leq[j][i] for j in lower)]
        return TableIndex(tops[0]) if tops else NO_INFIMUM

    def _limit(self, limit):
        if isinstance(limit, Element):
            return limit.payload
        raise InvalidElement("finite tables have no soft ascents")

    def _ascent_term(self, limit, k: int):
        return limit

    def _infinity_of(self, p):
        acc = p
        while True:
            nxt = self._add(acc, p)
            if nxt == acc:
                return acc
            acc = nxt

    def _sample(self, bound: int) -> list:
        return [TableIndex(i) for i in range(len(self.table.elements))]

    def _lower_set(self, p):
        return [TableIndex(i) for i in range(len(self.table.elements)) if self.table.leq[i][p.index]]

    def _format(self, p) -> str:
        return self.table.elements[p.index]

    def _sort_key(self, p):
        return (p.index,)

    def top(self) -> Element:
        n = len(self.table.elements)
        tops = [i for i in range(n) if all(self.table.leq[j][i] for j in range(n))]
        if not tops:
            raise InvalidElement("table has no largest element")
        return self.element(TableIndex(tops[0]))


def make_finite_table(t: FiniteTable, name: str | None = None) -> TableHandle:
    return TableHandle(t, name)


def bosa_petzka_table() -> TableHandle:
    """{0, 1, ∞} with 1 + 1 = ∞ and the usual order."""
    names = ("0", "1", "inf")
    return TableHandle(finite_table(names, lambda i, j: min(i + j, 2) if i and j else i + j, lambda i, j: i <= j),
                       "table(0,1,inf)")


def zero_infinity_table() -> TableHandle:
    """{0, ∞}: the smallest table with an absorbing element."""
    return TableHandle(finite_table(("0", "inf"), lambda i, j: max(i, j), lambda i, j: i <= j), "table(0,inf)")


def zero_table() -> TableHandle:
    return TableHandle(finite_table(("0",), [[0]], [[True]]), "zero")


# -- finite spaces ------------------------------------------------------------


@dataclass(frozen=True)
class FiniteSpace:
    points: tuple
    opens: frozenset

    def __post_init__(self):
        pts = frozenset(self.points)
        opens = frozenset(frozenset(u) for u in self.opens)
        object.__setattr__(self, "opens", opens)
        if len(pts) != len(self.points):
            raise BadParam("duplicate points")
        if frozenset() not in opens or pts not in opens:
            raise BadParam("opens must contain the empty set and the whole space")
        for u in opens:
            if not u <= pts:
                raise BadParam(f"{set(u)} is not a subset of the points")
        for u, v in itertools.combinations(opens, 2):
            if u | v not in opens or u & v not in opens:
                raise BadParam("opens are not closed under union and intersection")

    def is_open(self, subset) -> bool:
        return frozenset(subset) in self.opens

    def minimal_open(self, x) -> frozenset:
        return frozenset.intersection(*[u for u in self.opens if x in u])

    def closure(self, subset) -> frozenset:
        subset = frozenset(subset)
        return frozenset(x for x in self.points if self.minimal_open(x) & subset)

    @property
    def connected(self) -> bool:
        pts = frozenset(self.points)
        return not any(u and u != pts and (pts - u) in self.opens for u in self.opens)


def chain_space(n: int) -> FiniteSpace:
    """Points p0..p{n-1}; the opens are the initial segments."""
    pts = tuple(f"p{i}" for i in range(n))
    return FiniteSpace(pts, frozenset(frozenset(pts[:i]) for i in range(n + 1)))


def discrete_space(n: int) -> FiniteSpace:
    pts = tuple(f"p{i}" for i in range(n))
    subsets = itertools.chain.from_iterable(itertools.combinations(pts, r) for r in range(n + 1))
    return FiniteSpace(pts, frozenset(frozenset(s) for s in subsets))


# -- lower semicontinuous functions -----------------------------------------


class LscFinite(SemigroupHandle):
    """Lsc(X, T) for a finite space X and a totally ordered catalog target T.

    Order and addition are pointwise; way-below is pointwise, because an
    increasing sequence of functions on finitely many points is dominated
    as soon as it is dominated at each point.
    """

    kind = "lsc_finite"

    def __init__(self, space: FiniteSpace, target: ExtRational, sid: str | None = None):
        if not isinstance(target, ExtRational):
            raise BadParam("the target must be N̄ or a softened semigroup")
        self.space = space
        self.target = target
        super().__init__(sid or f"lsc({','.join(space.points)};{target.sid})", {})

    def function(self, values: dict) -> Element:
        """Values keyed by point; target elements or payloads."""
        entries = []
        for x in self.space.points:
            v = values.get(x, self.target.zero())
            entries.append((x, v.payload if isinstance(v, Element) else v))
        return self.element(FunctionTable(tuple(entries)))

    def indicator(self, subset, value=None) -> Element:
        v = value if value is not None else self.target.n(1) if self.target.kind == "nbar" else self.target.c(1)
        return self.function({x: v for x in subset})

    def constant(self, value) -> Element:
        return self.function({x: value for x in self.space.points})

    def _vals(self, p) -> list:
        return [v for _, v in p.entries]

    def _make(self, vals) -> FunctionTable:
        return FunctionTable(tuple(zip(self.space.points, vals)))

    def _check(self, p) -> None:
        if not isinstance(p, FunctionTable) or tuple(k for k, _ in p.entries) != self.space.points:
            raise InvalidElement("function table must list every point in order")
        T = self.target
        for v in self._vals(p):
            T._check(v)
        for _, t in p.entries:
            up = {x for x, v in p.entries if T._leq(t, v)}
            if not self.space.is_open(up):
                raise InvalidElement(f"not lower semicontinuous at level {T._format(t)}")

    def _zero(self):
        return self._make([self.target._zero()] * len(self.space.points))

    def _leq(self, p, q) -> bool:
        return all(self.target._leq(a, b) for a, b in zip(self._vals(p), self._vals(q)))

    def _add(self, p, q):
        return self._make([self.target._add(a, b) for a, b in zip(self._vals(p), self._vals(q))])

    def _way_below(self, p, q) -> bool:
        return all(self.target._way_below(a, b) for a, b in zip(self._vals(p), self._vals(q)))

    def _wedge(self, p, q):
        return self._make([self.target._wedge(a, b) for a, b in zip(self._vals(p), self._vals(q))])

    def _ascent_term(self, limit, k: int):
        return self._make([self.target._ascent_term(v, k) for v in self._vals(limit)])

    def _infinity_of(self, p):
        return self._make([self.target._infinity_of(v) for v in self._vals(p)])

    def functions_with_values(self, values: Sequence[Element]) -> list[Element]:
        """Every lsc function whose values are drawn from ``values``."""
        out = []
        pays = [v.payload for v in values]
        for combo in itertools.product(pays, repeat=len(self.space.points)):
            p = self._make(list(combo))
            try:
                self._check(p)
            except InvalidElement:
                continue
            out.append(Element(self.sid, p))
        return out

    def _sample(self, bound: int) -> list:
        T = self.target
        vals = [T.zero(), T.n(1) if T.kind == "nbar" else T.c(1)]
        if bound >= 2:
            vals.append(T.top())
        return [e.payload for e in self.functions_with_values(vals)]

    def _residual(self, p, q):
        T = self.target
        raw = dict(zip(self.space.points, (T._residual(a, b) for a, b in zip(self._vals(p), self._vals(q)))))
        env = []
        for x in self.space.points:
            best = raw[x]
            for y in self.space.minimal_open(x):
                best = T._wedge(best, raw[y])
            env.append(best)
        return self._make(env)

    def _lower_set(self, p):
        lows = [self.target._lower_set(v) for v in self._vals(p)]
        if any(low is None for low in lows):
            return None
        out = []
        for combo in itertools.product(*lows):
            q = self._make(list(combo))
            try:
                self._check(q)
            except InvalidElement:
                continue
            out.append(q)
        return out

    def _format(self, p) -> str:
        return "{" + ", ".join(f"{x}: {self.target._format(v)}" for x, v in p.entries) + "}"

    def _sort_key(self, p):
        return tuple(self.target._sort_key(v) for v in self._vals(p))

    def top(self) -> Element:
        return self.constant(self.target.top())


class LscInterval(SemigroupHandle):
    """Lower semicontinuous step functions on [0,1] with rational breakpoints.

    A payload lists the value at each breakpoint (key ``("pt", x)``) and on each
    open interval between consecutive breakpoints (key ``("iv", a, b)``).
    Optional endpoint constraints restrict f(0) and f(1) to sub-semigroups of
    the target, as in the dimension-drop semigroup.
    """

    kind = "lsc_interval"

    def __init__(self, target: ExtRational, endpoint_constraints: dict | None = None, sid: str | None = None):
        if not isinstance(target, ExtRational):
            raise BadParam("the target must be N̄ or a softened semigroup")
        cons = dict(endpoint_constraints or {})
        for point, sub in cons.items():
            if point not in (0, 1):
                raise BadConstraint(f"constraints apply at 0 and 1, not {point}")
            if not isinstance(sub, ExtRational):
                raise BadConstraint("endpoint constraints must be catalog semigroups")
            # sub must sit inside the target with the same soft part
            if target.kind == "nbar" and sub.kind != "nbar":
                raise BadConstraint(f"{sub.sid} is not contained in {target.sid}")
            if target.kind == "softened" and sub.kind == "nbar":
                raise BadConstraint("N̄ is not a hereditary sub-semigroup of a softened target")
            if not in_base(Fraction(1, sub.m), target.m):
                raise BadConstraint(f"N[1/{sub.m}] is not contained in N[1/{target.m}]")
        self.target = target
        self.constraints = cons
        label = sid or "lsc([0,1];" + target.sid + "".join(f";f({k})∈{v.sid}" for k, v in sorted(cons.items())) + ")"
        super().__init__(label, {})

    # construction helpers
    def step(self, breakpoints: Sequence, point_values: Sequence, interval_values: Sequence) -> Element:
        B = [Fraction(b) for b in breakpoints]
        P = [v.payload if isinstance(v, Element) else v for v in point_values]
        I = [v.payload if isinstance(v, Element) else v for v in interval_values]
        return self.element(self._build(B, P, I))

    def constant(self, value) -> Element:
        v = value.payload if isinstance(value, Element) else value
        return self.element(self._build([Fraction(0), Fraction(1)], [v, v], [v]))

    def indicator(self, a, b, value=None, left_closed: bool = False, right_closed: bool = False) -> Element:
        """value · 1_U for U = (a,b), closed at 0 or 1 when requested there."""
        T = self.target
        v = value if value is not None else (T.n(1) if T.kind == "nbar" else T.c(1))
        v = v.payload if isinstance(v, Element) else v
        z = T._zero()
        a, b = Fraction(a), Fraction(b)
        B = sorted({Fraction(0), a, b, Fraction(1)})
        P, I = [], []
        for x in B:
            inside = a < x < b or (x == a == 0 and left_closed) or (x == b == 1 and right_closed)
            P.append(v if inside else z)
        for lo, hi in zip(B, B[1:]):
            I.append(v if a <= lo and hi <= b else z)
        return self.element(self._build(B, P, I))

    # representation
    @staticmethod
    def pieces(p):
        B, P, I = [], [], []
        for key, v in p.entries:
            if key[0] == "pt":
                B.append(key[1])
                P.append(v)
            else:
                I.append(v)
        return B, P, I

    def _build(self, B, P, I) -> FunctionTable:
        B, P, I = list(B), list(P), list(I)
        i = 1
        while i < len(B) - 1:
            if I[i - 1] == P[i] == I[i]:
                del B[i], P[i], I[i]
            else:
                i += 1
        entries = []
        for j, x in enumerate(B):
            entries.append((("pt", x), P[j]))
            if j < len(I):
                entries.append((("iv", x, B[j + 1]), I[j]))
        return FunctionTable(tuple(entries))

    def _check(self, p) -> None:
        if not isinstance(p, FunctionTable):
            raise InvalidElement("expected a step-function table")
        B, P, I = self.pieces(p)
        if len(B) < 2 or B[0] != 0 or B[-1] != 1 or len(I) != len(B) - 1:
            raise InvalidElement("breakpoints must run from 0 to 1")
        if any(x >= y for x, y in zip(B, B[1:])):
            raise InvalidElement("breakpoints must increase")
        T = self.target
        for v in P + I:
            T._check(v)
        for j, v in enumerate(P):
            for side in (j - 1, j):
                if 0 <= side < len(I) and not T._leq(v, I[side]):
                    raise InvalidElement(f"not lower semicontinuous at {B[j]}")
        for point, sub in self.constraints.items():
            v = P[0] if point == 0 else P[-1]
            try:
                sub._check(v)
            except InvalidElement as exc:
                raise InvalidElement(f"f({point}) = {T._format(v)} violates the constraint {sub.sid}") from exc

    def _zero(self):
        z = self.target._zero()
        return FunctionTable(((("pt", Fraction(0)), z), (("iv", Fraction(0), Fraction(1)), z), (("pt", Fraction(1)), z)))

    @staticmethod
    def _value_at(B, P, I, x: Fraction):
        j = bisect.bisect_left(B, x)
        if j < len(B) and B[j] == x:
            return P[j]
        return I[j - 1]

    def _refine(self, p, q):
        B1, P1, I1 = self.pieces(p)
        B2, P2, I2 = self.pieces(q)
        B = sorted(set(B1) | set(B2))
        mids = [(a + b) / 2 for a, b in zip(B, B[1:])]
        fp = ([self._value_at(B1, P1, I1, x) for x in B], [self._value_at(B1, P1, I1, x) for x in mids])
        fq = ([self._value_at(B2, P2, I2, x) for x in B], [self._value_at(B2, P2, I2, x) for x in mids])
        return B, fp, fq

    def _pointwise(self, p, q, op):
        B, (P1, I1), (P2, I2) = self._refine(p, q)
        return self._build(B, [op(a, b) for a, b in zip(P1, P2)], [op(a, b) for a, b in zip(I1, I2)])

    @_memo
    def _leq(self, p, q) -> bool:
        B, (P1, I1), (P2, I2) = self._refine(p, q)
        T = self.target
        return all(T._leq(a, b) for a, b in zip(P1 + I1, P2 + I2))

    @_memo
    def _add(self, p, q):
        return self._pointwise(p, q, self.target._add)

    @_memo
    def _wedge(self, p, q):
        return self._pointwise(p, q, self.target._wedge)

    @_memo
    def _way_below(self, p, q) -> bool:
        # for each level t of f: closure{f ≥ t} ⊆ {x : t ≪ g(x)}
        T = self.target
        B, (P1, I1), (P2, I2) = self._refine(p, q)
        levels = {v for v in P1 + I1 if v != T._zero()}
        for t in levels:
            need_pt = [T._leq(t, v) for v in P1]
            for j, v in enumerate(I1):
                if T._leq(t, v):
                    need_pt[j] = need_pt[j + 1] = True
                    if not T._way_below(t, I2[j]):
                        return False
            for j, needed in enumerate(need_pt):
                if needed and not T._way_below(t, P2[j]):
                    return False
        return True

    def _residual(self, p, q):
        """Pointwise residual, lowered to the largest lsc function below it."""
        T = self.target
        B, (P1, I1), (P2, I2) = self._refine(p, q)
        I = [T._residual(a, b) for a, b in zip(I1, I2)]
        P = [T._residual(a, b) for a, b in zip(P1, P2)]
        for j in range(len(P)):
            for side in (j - 1, j):
                if 0 <= side < len(I):
                    P[j] = T._wedge(P[j], I[side])
        for point, sub in self.constraints.items():
            j = 0 if point == 0 else -1
            P[j] = sub._round_down(P[j])
        return self._build(B, P, I)

    def _infinity_of(self, p):
        B, P, I = self.pieces(p)
        T = self.target
        return self._build(B, [T._infinity_of(v) for v in P], [T._infinity_of(v) for v in I])

    def _ascent_term(self, limit, k: int):
        """Erode the pointwise approximant by δ = 2^-k: f_k(x) = min of ψ_k∘f on [x-δ, x+δ]."""
        T = self.target
        B, P, I = self.pieces(limit)
        P = [T._ascent_term(v, k) for v in P]
        I = [T._ascent_term(v, k) for v in I]
        delta = Fraction(1, 2**k)
        cands = {Fraction(0), Fraction(1)}
        for b in B:
            for c in (b - delta, b + delta):
                if 0 < c < 1:
                    cands.add(c)
        C = sorted(cands)

        def window_min(x):
            lo, hi = max(x - delta, Fraction(0)), min(x + delta, Fraction(1))
            vals = [P[j] for j, b in enumerate(B) if lo <= b <= hi]
            vals += [I[j] for j in range(len(I)) if B[j] < hi and B[j + 1] > lo]
            best = vals[0]
            for v in vals[1:]:
                best = T._wedge(best, v)
            return best

        newP = [window_min(x) for x in C]
        newI = [window_min((a + b) / 2) for a, b in zip(C, C[1:])]
        # near a constrained endpoint, cap by the endpoint sub-semigroup's own
        # approximant on the closed window [0, δ] (resp. [1-δ, 1])
        for point, sub in self.constraints.items():
            a = sub._ascent_term(newP[0] if point == 0 else newP[-1], k)
            near = (lambda x: x <= delta) if point == 0 else (lambda x: x >= 1 - delta)
            for j, c in enumerate(C):
                if near(c):
                    newP[j] = T._wedge(newP[j], a)
            for j in range(len(newI)):
                if near(C[j]) and near(C[j + 1]):
                    newI[j] = T._wedge(newI[j], a)
        return self._build(C, newP, newI)

    def _sample(self, bound: int) -> list:
        T = self.target
        one = T.n(1) if T.kind == "nbar" else T.c(1)
        vals = [one, T.top()]
        if T.kind == "softened":
            vals.append(T.s(1))
        grid = [Fraction(i, 4) for i in range(5)]
        out = [self._zero()]
        for v in vals:
            out.append(self.constant(v).payload)
            for a, b in itertools.combinations(grid, 2):
                for el in (self.indicator(a, b, v),):
                    out.append(el.payload)
        valid = []
        for p in out:
            try:
                self._check(p)
                valid.append(p)
            except InvalidElement:
                pass
        return valid

    def _format(self, p) -> str:
        T = self.target
        parts = []
        for key, v in p.entries:
            if key[0] == "pt":
                parts.append(f"{key[1]}: {T._format(v)}")
            else:
                parts.append(f"({key[1]},{key[2]}): {T._format(v)}")
        return "{" + ", ".join(parts) + "}"

    def _sort_key(self, p):
        T = self.target
        B, P, I = self.pieces(p)
        return tuple((T._sort_key(v)) for v in P + I) + tuple((1, b) for b in B)

    def top(self) -> Element:
        return self.constant(self.target.top())

    def is_constant(self, a: Element):
        B, P, I = self.pieces(a.payload)
        return len(B) == 2 and P[0] == P[1] == I[0]

    def integral(self, a: Element) -> ExtValue:
        """Exact Riemann sum of the values over the open pieces."""
        B, P, I = self.pieces(a.payload)
        total = ZERO
        for j, v in enumerate(I):
            total = total + v.value * ExtValue(B[j + 1] - B[j])
        return total


def make_lsc(X, target: ExtRational, endpoint_constraints: dict | None = None) -> SemigroupHandle:
    """Lsc over a finite space, or over [0,1] when ``X == "interval"``."""
    if isinstance(X, FiniteSpace):
        if endpoint_constraints:
            raise BadConstraint("endpoint constraints only apply to the interval")
        return LscFinite(X, target)
    if X in ("interval", "[0,1]"):
        return LscInterval(target, endpoint_constraints)
    raise BadParam(f"unknown carrier {X!r}")


def dimension_drop() -> LscInterval:
    """Step functions into N[1/6] ⊔ (0,∞] with f(0) in N[1/2] ⊔ (0,∞], f(1) in N[1/3] ⊔ (0,∞]."""
    return LscInterval(softened(6), {0: softened(2), 1: softened(3)}, sid="dimension_drop(2,3)")


# -- the Z-stable model -------------------------------------------------------


class ZStableModel(SemigroupHandle):
    """V ⊔ LAff(Δ_k)_{++} with V = N^d and a strictly positive pairing.

    Soft elements are affine functions on the k-simplex, stored by their
    vertex values in (0,∞]^k.  Mixed comparisons use the vertex rules:
    x ≤ f iff x̂ < f at every vertex, f ≤ x iff f ≤ x̂ at every vertex.
    """

    kind = "zstable"

    def __init__(self, d: int, k: int, pairing: Sequence[Sequence]):
        if k < 1 or d < 1:
            raise BadParam("need d ≥ 1 and k ≥ 1")
        rows = [[Fraction(v) for v in row] for row in pairing]
        if len(rows) != d or any(len(r) != k for r in rows):
            raise BadPairing("pairing must be a d×k table")
        if any(v <= 0 for r in rows for v in r):
            raise BadPairing("pairing values must be strictly positive")
        self.d, self.k, self.pairing = d, k, rows
        label = "N" if d == 1 else f"N^{d}"
        super().__init__(f"zstable({label},{k};" + ";".join(",".join(str(v) for v in r) for r in rows) + ")", {})

    def compact(self, *xs) -> Element:
        if self.d == 1:
            return self.element(Compact(ext(xs[0])))
        return self.element(TupleValue(tuple(Compact(ext(x)) for x in xs)))

    def function(self, *vals) -> Element:
        return self.element(FunctionTable(tuple((i, Soft(ext(v))) for i, v in enumerate(vals))))

    def _coords(self, p) -> list[Fraction]:
        if isinstance(p, Compact):
            return [p.value.fraction]
        return [c.value.fraction for c in p.items]

    def _make_compact(self, xs):
        if self.d == 1:
            return Compact(ExtValue(xs[0]))
        return TupleValue(tuple(Compact(ExtValue(x)) for x in xs))

    @staticmethod
    def _is_soft(p) -> bool:
        return isinstance(p, FunctionTable)

    def hat(self, p) -> list[ExtValue]:
        xs = self._coords(p)
        return [ExtValue(sum(xs[l] * self.pairing[l][i] for l in range(self.d))) for i in range(self.k)]

    def _fvals(self, p) -> list[ExtValue]:
        return [v.value for _, v in p.entries]

    def _soft(self, vals) -> FunctionTable:
        return FunctionTable(tuple((i, Soft(v)) for i, v in enumerate(vals)))

    def _check(self, p) -> None:
        if self._is_soft(p):
            if len(p.entries) != self.k or [i for i, _ in p.entries] != list(range(self.k)):
                raise InvalidElement("a soft element lists one value per vertex")
            if not all(isinstance(v, Soft) for _, v in p.entries):
                raise InvalidElement("vertex values must be strictly positive")
            return
        if self.d == 1 and not isinstance(p, Compact):
            raise InvalidElement("expected a compact value")
        if self.d > 1 and (not isinstance(p, TupleValue) or len(p.items) != self.d):
            raise InvalidElement(f"expected {self.d} compact coordinates")
        for x in self._coords(p) if not isinstance(p, Compact) or not p.value.is_inf else [None]:
            if x is None or x.denominator != 1 or x < 0:
                raise InvalidElement("compact coordinates are natural numbers")

    def _zero(self):
        return self._make_compact([0] * self.d)

    def _is_zero(self, p) -> bool:
        return not self._is_soft(p) and all(x == 0 for x in self._coords(p))

    def _leq(self, p, q) -> bool:
        if self._is_soft(p) and self._is_soft(q):
            return all(a <= b for a, b in zip(self._fvals(p), self._fvals(q)))
        if self._is_soft(p):
            return all(a <= b for a, b in zip(self._fvals(p), self.hat(q)))
        if self._is_soft(q):
            return self._is_zero(p) or all(a < b for a, b in zip(self.hat(p), self._fvals(q)))
        return all(a <= b for a, b in zip(self._coords(p), self._coords(q)))

    def _add(self, p, q):
        if not self._is_soft(p) and not self._is_soft(q):
            return self._make_compact([a + b for a, b in zip(self._coords(p), self._coords(q))])
        fp = self._fvals(p) if self._is_soft(p) else self.hat(p)
        fq = self._fvals(q) if self._is_soft(q) else self.hat(q)
        return self._soft([a + b for a, b in zip(fp, fq)])

    def _way_below(self, p, q) -> bool:
        if not self._leq(p, q):
            return False
        if not self._is_soft(p) or not self._is_soft(q):
            return True
        return all(a < b for a, b in zip(self._fvals(p), self._fvals(q)))

    def _wedge(self, p, q):
        if self._leq(p, q):
            return p
        if self._leq(q, p):
            return q
        if self._is_soft(p) and self._is_soft(q):
            return self._soft([min(a, b) for a, b in zip(self._fvals(p), self._fvals(q))])
        if self.d > 1:
            return NO_INFIMUM
        if self._is_soft(p):
            p, q = q, p
        # p compact, q soft, p not below q: the vertexwise minimum of q and p̂
        return self._soft([min(a, b) for a, b in zip(self.hat(p), self._fvals(q))])

    def _limit(self, limit):
        if isinstance(limit, Element):
            return limit.payload
        limit = ext(limit)
        return self._soft([limit] * self.k) if limit != ZERO else self._zero()

    def _ascent_term(self, limit, k: int):
        if not self._is_soft(limit):
            return limit
        vals = []
        for v in self._fvals(limit):
            vals.append(ExtValue(k) if v.is_inf else v * ExtValue(1 - Fraction(1, 2**k)))
        return self._soft(vals)

    def _infinity_of(self, p):
        return p if self._is_zero(p) else self._soft([INF] * self.k)

    def _sample(self, bound: int) -> list:
        out = []
        for xs in itertools.product(range(bound + 1), repeat=self.d):
            out.append(self._make_compact(list(xs)))
        grid = [ExtValue(Fraction(i, 2)) for i in range(1, 2 * bound + 1)] + [INF]
        for vals in itertools.product(grid, repeat=self.k):
            out.append(self._soft(list(vals)))
        return out

    def _format(self, p) -> str:
        if self._is_soft(p):
            return "f(" + ", ".join(str(v) for v in self._fvals(p)) + ")"
        xs = self._coords(p)
        return str(xs[0]) if self.d == 1 else "(" + ", ".join(str(x) for x in xs) + ")"

    def _sort_key(self, p):
        if self._is_soft(p):
            return (1, tuple(_val_key(v) for v in self._fvals(p)))
        return (0, tuple(self._coords(p)))

    def top(self) -> Element:
        return self.element(self._soft([INF] * self.k))


def make_zstable_model(V="N", k: int = 1, pairing: Sequence | None = None) -> ZStableModel:
    """``V`` is ``"N"`` or ``("N", d)``; ``pairing`` gives the vertex vector of each generator."""
    d = 1 if V == "N" else int(V[1])
    if pairing is None:
        pairing = [[1] * k for _ in range(d)]
    elif d == 1 and pairing and not isinstance(pairing[0], (list, tuple)):
        pairing = [list(pairing)]
    return ZStableModel(d, k, pairing)


# -- the group adjunction S_G -------------------------------------------------


@dataclass(frozen=True)
class GroupTag:
    """A finitely generated abelian group by invariant factors; 0 stands for Z."""

    factors: tuple

    def reduce(self, g) -> tuple:
        g = tuple(int(x) for x in g)
        if len(g) != len(self.factors):
            raise BadParam(f"group element {g} has the wrong length")
        return tuple(x % n if n else x for x, n in zip(g, self.factors))

    def add(self, g, h) -> tuple:
        return self.reduce(tuple(a + b for a, b in zip(g, h)))

    def zero(self) -> tuple:
        return tuple(0 for _ in self.factors)

    def elements(self, bound: int = 1) -> list[tuple]:
        ranges = [range(n) if n else range(-bound, bound + 1) for n in self.factors]
        return [tuple(g) for g in itertools.product(*ranges)]

    def __str__(self) -> str:
        if not self.factors:
            return "0"
        return "+".join("Z" if n == 0 else f"Z/{n}" for n in self.factors)


class AdjoinGroup(SemigroupHandle):
    """S_G = {0} ⊔ (G × S_c^*) ⊔ S_nc.

    (g,x) + (h,y) = (g+h, x+y); (g,x) + y = x + y for soft y.
    (g,x) ≤ (h,y) iff (x = y and g = h) or x < y.
    """

    kind = "adjoin_group"

    def __init__(self, base: SemigroupHandle, group: GroupTag):
        self.base = base
        self.group = group
        super().__init__(f"{base.sid}_G[{group}]", {})
        zero = base.zero()
        for a in base.sample(2):
            if base.is_compact(a):
                continue
            for b in base.sample(2):
                if base.is_compact(base.add(a, b)):
                    raise NotAbsorbing(f"{base.format(a)} + {base.format(b)} is compact")
        self._base_zero = zero.payload

    def pair(self, g, x: Element) -> Element:
        return self.element(GroupCompact(self.group.reduce(g), x.payload))

    def lift(self, x: Element) -> Element:
        """A soft base element, or zero."""
        return self.element(x.payload)

    def _bc(self, p) -> bool:
        return self.base._way_below(p, p)

    def _under(self, p):
        return p.x if isinstance(p, GroupCompact) else p

    def _check(self, p) -> None:
        if isinstance(p, GroupCompact):
            self.base._check(p.x)
            if p.x == self._base_zero or not self._bc(p.x):
                raise InvalidElement("group-decorated elements must be nonzero compacts")
            if self.group.reduce(p.g) != p.g:
                raise InvalidElement("group coordinate is not reduced")
            return
        self.base._check(p)
        if p != self._base_zero and self._bc(p):
            raise InvalidElement("nonzero compacts must carry a group coordinate")

    def _canon(self, p):
        return p

    def _zero(self):
        return self._base_zero

    def _leq(self, p, q) -> bool:
        x, y = self._under(p), self._under(q)
        if isinstance(p, GroupCompact) and isinstance(q, GroupCompact):
            if x == y:
                return p.g == q.g
            return self.base._leq(x, y)
        return self.base._leq(x, y)

    def _add(self, p, q):
        if isinstance(p, GroupCompact) and isinstance(q, GroupCompact):
            return GroupCompact(self.group.add(p.g, q.g), self.base._add(p.x, q.x))
        if p == self._base_zero:
            return q
        if q == self._base_zero:
            return p
        return self.base._add(self._under(p), self._under(q))

    def _way_below(self, p, q) -> bool:
        if isinstance(p, GroupCompact):
            return self._leq(p, q)
        return self.base._way_below(p, self._under(q))

    def _limit(self, limit):
        return self.base._limit(limit) if not isinstance(limit, Element) else limit.payload

    def _ascent_term(self, limit, k: int):
        t = self.base._ascent_term(self._under(limit), k)
        if isinstance(limit, GroupCompact) and t == limit.x:
            return limit
        if t != self._base_zero and self._bc(t):
            # compact approximants of a soft element: decorate with the neutral tag
            return GroupCompact(self.group.zero(), t)
        return t

    def _infinity_of(self, p):
        return self.base._infinity_of(self._under(p))

    def _sample(self, bound: int) -> list:
        out = []
        for a in self.base.sample(bound):
            p = a.payload
            if p != self._base_zero and self._bc(p):
                out.extend(GroupCompact(g, p) for g in self.group.elements(1))
            else:
                out.append(p)
        return out

    def _format(self, p) -> str:
        if isinstance(p, GroupCompact):
            return "(" + ",".join(str(x) for x in p.g) + "; " + self.base._format(p.x) + ")"
        return self.base._format(p)

    def _sort_key(self, p):
        return (self.base._sort_key(self._under(p)), p.g if isinstance(p, GroupCompact) else ())

    def forget(self, a: Element) -> Element:
        """The generalized Cu-morphism S_G → S dropping the group coordinate."""
        self._own(a)
        return Element(self.base.sid, self._under(a.payload))

    def top(self) -> Element:
        return self.element(self.base.top().payload)


def adjoin_group(S: SemigroupHandle, G: GroupTag) -> AdjoinGroup:
    return AdjoinGroup(S, G)


# -- the gap fragment ---------------------------------------------------------


class GapFragment(SemigroupHandle):
    """Pairs (r, e) in N × Z, added componentwise, with (r,e) ≤ (r',e') iff equal or r' ≥ r + 2.

    It is an ordered monoid but not positively ordered: 0 is not below (1,0).
    It models a rank/obstruction pair whose comparison needs a rank gap of 2.
    """

    kind = "gap"

    def __init__(self, gap: int = 2):
        self.gap = gap
        super().__init__(f"gap({gap})", {"gap": gap})

    def pair(self, r: int, e: int) -> Element:
        return self.element(GroupCompact((int(e),), Compact(ExtValue(int(r)))))

    def coords(self, a) -> tuple[int, int]:
        p = a.payload if isinstance(a, Element) else a
        return int(p.x.value.fraction), p.g[0]

    def _check(self, p) -> None:
        if not isinstance(p, GroupCompact) or len(p.g) != 1 or not isinstance(p.x, Compact):
            raise InvalidElement("expected a pair (r, e)")
        if p.x.value.is_inf or p.x.value.fraction.denominator != 1:
            raise InvalidElement("rank must be a natural number")

    def _zero(self):
        return GroupCompact((0,), Compact(ZERO))

    def _leq(self, p, q) -> bool:
        (r, e), (r2, e2) = self.coords(p), self.coords(q)
        return (r, e) == (r2, e2) or r2 >= r + self.gap

    def _add(self, p, q):
        (r, e), (r2, e2) = self.coords(p), self.coords(q)
        return GroupCompact((e + e2,), Compact(ExtValue(r + r2)))

    def _way_below(self, p, q) -> bool:
        return self._leq(p, q)

    def _infinity_of(self, p):
        raise InvalidElement("the gap fragment has no suprema of unbounded sequences")

    def _sample(self, bound: int) -> list:
        return [self.pair(r, e).payload for r in range(bound + 1) for e in range(-bound, bound + 1)]

    def _format(self, p) -> str:
        r, e = self.coords(p)
        return f"({r},{e})"

    def _sort_key(self, p):
        return self.coords(p)


def gap_fragment() -> GapFragment:
    return GapFragment(2)
