"""Ideals, quotients, completions, limits, products and Grothendieck groups."""
from __future__ import annotations

import bisect
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .axioms import AxiomReport
from .catalog import (
    ExtRational,
    GapFragment,
    LscInterval,
    TableHandle,
    in_base,
    softened,
    zero_table,
)
from .errors import (
    BadDescriptor,
    MorphismMismatch,
    NotAuxiliary,
    NotCancellative,
    NotIdeal,
    NotIncreasing,
    NotUltrafilter,
    UnrecognizedClass,
    UnsupportedOperation,
)
from .order import (
    INF,
    NO_INFIMUM,
    ZERO,
    AffineIndex,
    Compact,
    Constant,
    Element,
    ExtValue,
    SemigroupHandle,
    SequenceDescriptor,
    Soft,
    SoftAscent,
    TupleValue,
    ext,
    format_payload,
    sup,
    terms,
)


def infinity_of(S: SemigroupHandle, a: Element) -> Element:
    """∞_a, the supremum of a, 2a, 3a, ..."""
    return sup(S, SequenceDescriptor((a,), AffineIndex(a)))


# -- products -------------------------------------------------------------------


class ProductHandle(SemigroupHandle):
    """Finite Cu-product; all structure is coordinatewise.

    For finitely many factors the τ-completion of the pointwise product with
    the pointwise way-below relation is the plain product, because a path is
    determined up to equivalence by its coordinate endpoints.
    """

    kind = "product"

    def __init__(self, factors: Sequence[SemigroupHandle]):
        self.factors = tuple(factors)
        super().__init__("product(" + ",".join(f.sid for f in self.factors) + ")", {})

    def tuple(self, *items) -> Element:
        if len(items) != len(self.factors):
            raise BadDescriptor(f"expected {len(self.factors)} coordinates")
        pays = []
        for f, x in zip(self.factors, items):
            if not isinstance(x, Element):
                x = f.n(x) if isinstance(f, ExtRational) and f.kind == "nbar" else f.element(x)
            f._own(x)
            pays.append(x.payload)
        return self.element(TupleValue(tuple(pays)))

    def project(self, i: int, a: Element) -> Element:
        self._own(a)
        return Element(self.factors[i].sid, a.payload.items[i])

    def _zip(self, p, q):
        return zip(self.factors, p.items, q.items)

    def _check(self, p) -> None:
        from .errors import InvalidElement

        if not isinstance(p, TupleValue) or len(p.items) != len(self.factors):
            raise InvalidElement(f"expected a {len(self.factors)}-tuple")
        for f, x in zip(self.factors, p.items):
            f._check(x)

    def _zero(self):
        return TupleValue(tuple(f._zero() for f in self.factors))

    def _leq(self, p, q) -> bool:
        return all(f._leq(a, b) for f, a, b in self._zip(p, q))

    def _add(self, p, q):
        return TupleValue(tuple(f._add(a, b) for f, a, b in self._zip(p, q)))

    def _way_below(self, p, q) -> bool:
        return all(f._way_below(a, b) for f, a, b in self._zip(p, q))

    def _wedge(self, p, q):
        out = []
        for f, a, b in self._zip(p, q):
            w = f._wedge(a, b)
            if w is NO_INFIMUM:
                return NO_INFIMUM
            out.append(w)
        return TupleValue(tuple(out))

    def _residual(self, p, q):
        out = []
        for f, a, b in self._zip(p, q):
            w = f._residual(a, b)
            if w is None:
                return None
            out.append(w)
        return TupleValue(tuple(out))

    def _limit(self, limit):
        if isinstance(limit, Element):
            return limit.payload
        return TupleValue(tuple(f._limit(limit) for f in self.factors))

    def _ascent_term(self, limit, k: int):
        items = []
        for f, x in zip(self.factors, limit.items):
            # compact coordinates stay put; others follow their own ascent
            items.append(x if f._way_below(x, x) else f._ascent_term(x, k))
        return TupleValue(tuple(items))

    def _infinity_of(self, p):
        return TupleValue(tuple(f._infinity_of(x) for f, x in zip(self.factors, p.items)))

    def _sample(self, bound: int) -> list:
        per = [[e.payload for e in f.sample(bound)] for f in self.factors]
        return [TupleValue(tuple(c)) for c in itertools.product(*per)]

    def _lower_set(self, p):
        lows = [f._lower_set(x) for f, x in zip(self.factors, p.items)]
        if any(low is None for low in lows):
            return None
        return [TupleValue(tuple(c)) for c in itertools.product(*lows)]

    def _format(self, p) -> str:
        return "(" + ", ".join(f._format(x) for f, x in zip(self.factors, p.items)) + ")"

    def _sort_key(self, p):
        return tuple(f._sort_key(x) for f, x in zip(self.factors, p.items))

    def top(self) -> Element:
        return Element(self.sid, TupleValue(tuple(f.top().payload for f in self.factors)))


def cu_product(*factors: SemigroupHandle) -> SemigroupHandle:
    if len(factors) == 1 and isinstance(factors[0], (list, tuple)):
        factors = tuple(factors[0])
    return ProductHandle(factors)


# -- ideals and quotients ---------------------------------------------------------


@dataclass
class Ideal:
    ambient: SemigroupHandle
    member: Callable[[Element], bool]
    generator: Element | None = None
    top: Element | None = None

    def __contains__(self, x: Element) -> bool:
        return self.member(x)


def ideal_generated(S: SemigroupHandle, a: Element) -> Ideal:
    """{x : x ≤ ∞_a}."""
    t = infinity_of(S, a)
    return Ideal(S, lambda x: S.leq(x, t), a, t)


def zero_ideal(S: SemigroupHandle) -> Ideal:
    z = S.zero()
    return Ideal(S, lambda x: x == z, z, z)


def whole_ideal(S: SemigroupHandle) -> Ideal:
    return Ideal(S, lambda x: True, None, S.top())


def check_ideal(I: Ideal, probes: Sequence[Element]) -> None:
    S = I.ambient
    if not I.member(S.zero()):
        raise NotIdeal("0 is not in the ideal")
    for x, y in itertools.product(probes, repeat=2):
        if I.member(y) and S.leq(x, y) and not I.member(x):
            raise NotIdeal(f"{S.format(x)} ≤ {S.format(y)} but is not in the ideal")
        if I.member(x) and I.member(y) and not I.member(S.add(x, y)):
            raise NotIdeal(f"{S.format(x)} + {S.format(y)} leaves the ideal")


class QuotientHandle(SemigroupHandle):
    """S/I for an ideal with a largest element t.

    a ≤_I b iff a ≤ b + c for some c in I iff a ≤ b + t, so each class has
    the canonical representative a + t and the order on representatives is
    the order of S.
    """

    kind = "quotient"

    def __init__(self, S: SemigroupHandle, I: Ideal):
        if I.top is None:
            raise UnsupportedOperation("quotients need an ideal with a largest element")
        self.S = S
        self.ideal = I
        self.t = I.top.payload
        self._wb = self._way_below_mode()
        label = I.generator and S.format(I.generator)
        super().__init__(f"{S.sid}/<{label if label is not None else S.format(I.top)}>", {})

    def _way_below_mode(self):
        S, t = self.S, self.t
        if t == S._zero():
            return "ambient"
        try:
            if t == S.top().payload:
                return "trivial"
        except Exception:
            pass
        if isinstance(S, ProductHandle):
            coords = []
            for f, x in zip(S.factors, t.items):
                if x == f._zero():
                    coords.append(True)
                elif x == f.top().payload:
                    coords.append(False)
                else:
                    return None
            return tuple(coords)
        return None

    def project(self, a: Element) -> Element:
        self.S._own(a)
        return self.element(a.payload)

    def representative(self, a: Element) -> Element:
        self._own(a)
        return Element(self.S.sid, a.payload)

    def _canon(self, p):
        return self.S._add(p, self.t)

    def _check(self, p) -> None:
        self.S._check(p)

    def _zero(self):
        return self.t

    def _leq(self, p, q) -> bool:
        return self.S._leq(self._canon(p), self._canon(q))

    def _add(self, p, q):
        return self.S._add(p, q)

    def _way_below(self, p, q) -> bool:
        mode = self._wb
        if mode is None:
            raise UnsupportedOperation("way-below in this quotient is not decidable here")
        if mode == "trivial":
            return True
        if mode == "ambient":
            return self.S._way_below(p, q)
        return all(f._way_below(a, b) for keep, f, a, b in zip(mode, self.S.factors, p.items, q.items) if keep)

    def _wedge(self, p, q):
        return self.S._wedge(p, q)

    def _limit(self, limit):
        return self.S._limit(limit)

    def _ascent_term(self, limit, k: int):
        return self.S._ascent_term(limit, k)

    def _infinity_of(self, p):
        return self.S._infinity_of(p)

    def _sample(self, bound: int) -> list:
        return [e.payload for e in self.S.sample(bound)]

    def _format(self, p) -> str:
        return "[" + self.S._format(p) + "]"

    def _sort_key(self, p):
        return self.S._sort_key(p)

    def top(self) -> Element:
        return self.element(self.S.top().payload)


def quotient(S: SemigroupHandle, I: Ideal, probe_bound: int = 2) -> QuotientHandle:
    check_ideal(I, S.sample(probe_bound))
    return QuotientHandle(S, I)


def leq_mod_ideal(S: SemigroupHandle, a: Element, b: Element, ideal_elements: Sequence[Element]) -> bool:
    """Brute-force ≤_I: some c among ``ideal_elements`` has a ≤ b + c."""
    return any(S.leq(a, S.add(b, c)) for c in ideal_elements)


# -- ultraproducts -------------------------------------------------------------------


def check_ultrafilter(n: int, U) -> int:
    """Validate an ultrafilter on {0, ..., n-1}; return the index it is principal at."""
    family = {frozenset(A) for A in U}
    everything = frozenset(range(n))
    if n == 0 or everything not in family:
        raise NotUltrafilter("the whole index set must belong to U")
    if frozenset() in family:
        raise NotUltrafilter("U contains the empty set")
    for A in family:
        if not A <= everything:
            raise NotUltrafilter(f"{sorted(A)} is not a set of indices")
    for A, B in itertools.product(family, repeat=2):
        if A & B not in family:
            raise NotUltrafilter("U is not closed under intersections")
    for r in range(n + 1):
        for A in map(frozenset, itertools.combinations(range(n), r)):
            if (A in family) == ((everything - A) in family):
                raise NotUltrafilter(f"exactly one of {sorted(A)} and its complement must lie in U")
            if A in family:
                for B in family:
                    pass
    for A in family:
        for r in range(n + 1):
            for B in map(frozenset, itertools.combinations(range(n), r)):
                if A <= B and B not in family:
                    raise NotUltrafilter("U is not upward closed")
    core = frozenset.intersection(*family)
    if len(core) != 1:
        raise NotUltrafilter("U is not principal")
    (j0,) = core
    return j0


def principal_ultrafilter(n: int, j0: int) -> list[frozenset]:
    return [frozenset(A) for r in range(n + 1) for A in itertools.combinations(range(n), r) if j0 in A]


def c_U_ideal(P: ProductHandle, j0: int) -> Ideal:
    """{x : supp(x) ∉ U} = {x : x_{j0} = 0} for the ultrafilter principal at j0."""
    top = TupleValue(tuple(f._zero() if i == j0 else f.top().payload for i, f in enumerate(P.factors)))
    zero_j0 = P.factors[j0]._zero()
    return Ideal(P, lambda x: x.payload.items[j0] == zero_j0, None, Element(P.sid, top))


@dataclass
class Ultraproduct:
    handle: QuotientHandle
    product: ProductHandle
    index: int

    def to_factor(self, a: Element) -> Element:
        """The isomorphism onto the selected factor."""
        self.handle._own(a)
        return Element(self.product.factors[self.index].sid, a.payload.items[self.index])

    def from_factor(self, x: Element) -> Element:
        P = self.product
        items = [f._zero() for f in P.factors]
        items[self.index] = x.payload
        return self.handle.element(TupleValue(tuple(items)))


def ultraproduct(factors: Sequence[SemigroupHandle], U) -> Ultraproduct:
    j0 = check_ultrafilter(len(factors), U)
    P = ProductHandle(factors)
    return Ultraproduct(QuotientHandle(P, c_U_ideal(P, j0)), P, j0)


# -- the sequence product of countably many copies of N̄ ------------------------------


@dataclass(frozen=True)
class AffineSeq:
    """j ↦ prefix[j] for j < len(prefix), else a·j + b."""

    prefix: tuple = ()
    a: int = 0
    b: int = 0

    def __post_init__(self):
        prefix = tuple(int(v) for v in self.prefix)
        if any(v < 0 for v in prefix) or self.a < 0 or self.b < 0:
            raise BadDescriptor("sequence values must be natural numbers")
        while prefix and prefix[-1] == self.a * (len(prefix) - 1) + self.b:
            prefix = prefix[:-1]
        object.__setattr__(self, "prefix", prefix)

    def __call__(self, j: int) -> int:
        return self.prefix[j] if j < len(self.prefix) else self.a * j + self.b

    def __add__(self, other: "AffineSeq") -> "AffineSeq":
        n = max(len(self.prefix), len(other.prefix))
        return AffineSeq(tuple(self(j) + other(j) for j in range(n)), self.a + other.a, self.b + other.b)

    def __str__(self) -> str:
        tail = f"{self.a}j+{self.b}" if self.a else f"{self.b}"
        return "[" + ",".join(map(str, self.prefix)) + ("; " if self.prefix else "") + tail + "]"


class SeqProductNbar(SemigroupHandle):
    """Described elements x + ∞_f of the Cu-product of countably many N̄.

    x and f are eventually affine sequences of natural numbers; x + ∞_f is the
    supremum of x + n·f.  The order is x + ∞_f ≤ y + ∞_g iff for every n
    there is m with x + n·f ≤ y + m·g pointwise, which is decided exactly from
    the affine tails.  Compact elements are exactly those with f = 0.
    """

    kind = "seq_product"

    def __init__(self):
        super().__init__("prod_N(nbar)", {})

    def seq(self, values=(), a: int = 0, b: int = 0, inf_values=(), inf_a: int = 0, inf_b: int = 0) -> Element:
        return self.element(TupleValue((AffineSeq(tuple(values), a, b), AffineSeq(tuple(inf_values), inf_a, inf_b))))

    def ones(self) -> Element:
        return self.seq(b=1)

    def identity_sequence(self) -> Element:
        return self.seq(a=1)

    def _canon(self, p):
        x, f = p.items
        n = max(len(x.prefix), len(f.prefix))
        # f only matters through its support and whether its tail grows
        tail_a, tail_b = (1, 1) if f.a else (0, 1 if f.b else 0)
        fpre = tuple((tail_a * j + tail_b if tail_a * j + tail_b else 1) if f(j) else 0 for j in range(n))
        f2 = AffineSeq(fpre, tail_a, tail_b)
        xpre = tuple(0 if f2(j) else x(j) for j in range(n))
        if tail_a:
            xa, xb = 0, 0
        elif tail_b:
            xa, xb = x.a, 0
        else:
            xa, xb = x.a, x.b
        return TupleValue((AffineSeq(xpre, xa, xb), f2))

    def _check(self, p) -> None:
        from .errors import InvalidElement

        if not isinstance(p, TupleValue) or len(p.items) != 2 or not all(isinstance(s, AffineSeq) for s in p.items):
            raise InvalidElement("expected (x, f) affine descriptors")

    def _zero(self):
        return TupleValue((AffineSeq(), AffineSeq()))

    @staticmethod
    def _leq_pair(x, f, y, g, uniform_n: bool) -> bool:
        """∀n ∃m (or, without ``uniform_n``, just ∃m with n = 0): x + n f ≤ y + m g."""
        L = max(len(x.prefix), len(f.prefix), len(y.prefix), len(g.prefix), 1)
        for j in range(L):
            if g(j) == 0 and ((uniform_n and f(j) > 0) or x(j) > y(j)):
                return False
        fa, fb = (f.a, f.b) if uniform_n else (0, 0)
        if g.a > 0:
            return True
        if g.b > 0:
            return fa == 0 and x.a <= y.a
        if fa or fb:
            return False
        return y.a >= x.a and (y.a - x.a) * L + y.b - x.b >= 0

    def _leq(self, p, q) -> bool:
        (x, f), (y, g) = p.items, q.items
        return self._leq_pair(x, f, y, g, True)

    def _add(self, p, q):
        (x, f), (y, g) = p.items, q.items
        return TupleValue((x + y, f + g))

    def _way_below(self, p, q) -> bool:
        (x, f), (y, g) = p.items, q.items
        if f != AffineSeq():
            return False
        return self._leq_pair(x, f, y, g, False)

    def _infinity_of(self, p):
        x, f = p.items
        return TupleValue((AffineSeq(), x + f))

    def _ascent_term(self, limit, k: int):
        x, f = limit.items
        return TupleValue((x + AffineSeq(tuple(k * f(j) for j in range(len(f.prefix))), k * f.a, k * f.b), AffineSeq()))

    def _sample(self, bound: int) -> list:
        seqs = [AffineSeq((), a, b) for a in range(2) for b in range(bound)] + [AffineSeq((1,), 0, 0)]
        return [TupleValue((x, f)) for x in seqs for f in (AffineSeq(), AffineSeq((), 0, 1), AffineSeq((), 1, 0))]

    def _format(self, p) -> str:
        x, f = p.items
        if f == AffineSeq():
            return str(x)
        return f"{x} + inf*{f}"

    def _sort_key(self, p):
        x, f = p.items
        return (f.a, f.b, f.prefix, x.a, x.b, x.prefix)

    def in_scale(self, a: Element, scale_generator: Element | None = None) -> bool:
        """Membership in Σ = {x : x ≤ ∞_u} for the unit u (default: ones)."""
        u = scale_generator if scale_generator is not None else self.ones()
        return self.leq(a, infinity_of(self, u))


def seq_product_nbar() -> SeqProductNbar:
    return SeqProductNbar()


# -- morphisms ------------------------------------------------------------------------


@dataclass
class MorphismDescriptor:
    """One of: ``scale`` (multiply values by a rational), ``coordinate``
    (project a product onto a factor), ``integration`` (step function ↦ constant
    with the integral as value) or ``table`` (finite map on table elements)."""

    kind: str
    domain: SemigroupHandle
    codomain: SemigroupHandle
    param: object = None

    def __post_init__(self):
        if self.kind not in ("scale", "coordinate", "integration", "table", "identity"):
            raise BadDescriptor(f"unknown morphism kind {self.kind!r}")
        if self.kind == "scale":
            r = Fraction(self.param)
            if r <= 0:
                raise BadDescriptor("scale factors are positive")
            self.param = r
        if self.kind == "integration" and not isinstance(self.domain, LscInterval):
            raise MorphismMismatch("integration acts on step functions on [0,1]")

    def __call__(self, a: Element) -> Element:
        self.domain._own(a)
        k = self.kind
        if k == "identity":
            return Element(self.codomain.sid, a.payload)
        if k == "scale":
            p = a.payload
            return self.codomain.element(type(p)(p.value * ExtValue(self.param)))
        if k == "coordinate":
            return Element(self.codomain.sid, a.payload.items[self.param])
        if k == "table":
            return self.codomain.element(self.param[a.payload])
        D = self.domain
        v = D.integral(a)
        if D.is_compact(a):
            return self.codomain.element(D.constant(Compact(v)).payload)
        return self.codomain.element(D.constant(Soft(v) if v != ZERO else Compact(ZERO)).payload)


def integration_morphism(D: LscInterval) -> MorphismDescriptor:
    return MorphismDescriptor("integration", D, D)


def scale_morphism(S: SemigroupHandle, T: SemigroupHandle, r) -> MorphismDescriptor:
    return MorphismDescriptor("scale", S, T, r)


def check_morphism(phi: MorphismDescriptor, probes: Sequence[Element]):
    """Return a failing probe pair with a message, or None if 0, +, ≤ and ≪ are preserved."""
    S, T = phi.domain, phi.codomain
    if phi(S.zero()) != T.zero():
        return (S.zero(),), "zero is not preserved"
    for a, b in itertools.product(probes, repeat=2):
        if phi(S.add(a, b)) != T.add(phi(a), phi(b)):
            return (a, b), "addition is not preserved"
        if S.leq(a, b) and not T.leq(phi(a), phi(b)):
            return (a, b), "order is not preserved"
        if S.way_below(a, b) and not T.way_below(phi(a), phi(b)):
            return (a, b), "way-below is not preserved"
    return None


# -- W-semigroups and the γ-completion ---------------------------------------------------


class RationalCarrier(SemigroupHandle):
    """N[1/m] with the usual order, as a W-semigroup carrier."""

    kind = "rational_carrier"

    def __init__(self, m: int):
        if m < 1:
            raise UnsupportedOperation("m must be positive")
        self.m = m
        super().__init__("N" if m == 1 else f"N[1/{m}]", {"m": m})

    def q(self, x) -> Element:
        return self.element(Compact(ext(x)))

    def _check(self, p) -> None:
        from .errors import InvalidElement

        if not isinstance(p, Compact) or p.value.is_inf or not in_base(p.value.fraction, self.m):
            raise InvalidElement(f"{format_payload(p)} is not in {self.sid}")

    def _zero(self):
        return Compact(ZERO)

    def _leq(self, p, q) -> bool:
        return p.value <= q.value

    def _add(self, p, q):
        return Compact(p.value + q.value)

    def _way_below(self, p, q) -> bool:
        return p.value <= q.value

    def _limit(self, limit):
        return Soft(ext(limit)) if not isinstance(limit, Element) else limit.payload

    def _ascent_term(self, limit, k: int):
        """k-th term of a strictly increasing sequence in N[1/m] converging to the limit."""
        v = limit.value
        if v.is_inf:
            return Compact(ExtValue(k))
        if self.m == 1:
            raise UnrecognizedClass("strictly increasing sequences in N are unbounded")
        scale = self.m ** k
        num = (v.fraction * scale).__ceil__() - 1
        return Compact(ExtValue(Fraction(max(num, 0), scale)))

    def _sample(self, bound: int) -> list:
        out = []
        for j in range(0, bound + 1):
            d = self.m ** j
            if d > 16 * bound:
                break
            out += [Compact(ExtValue(Fraction(i, d))) for i in range(bound * d + 1)]
        return out

    def _sort_key(self, p):
        return (p.value.fraction,)

    def _format(self, p) -> str:
        return str(p.value)


@dataclass
class WSemigroupDescriptor:
    carrier: SemigroupHandle
    aux: Callable[[Element, Element], bool] | None = None  # None means ≺ = ≤

    def prec(self, a: Element, b: Element) -> bool:
        return self.carrier.leq(a, b) if self.aux is None else self.aux(a, b)


def check_auxiliary(W: WSemigroupDescriptor, probes: Sequence[Element]) -> None:
    C = W.carrier
    for a in probes:
        if not W.prec(C.zero(), a):
            raise NotAuxiliary(f"0 ⊀ {C.format(a)}")
    for a, b in itertools.product(probes, repeat=2):
        if W.prec(a, b) and not C.leq(a, b):
            raise NotAuxiliary(f"{C.format(a)} ≺ {C.format(b)} without ≤")
    for a, b, c in itertools.product(probes, repeat=3):
        if C.leq(a, b) and W.prec(b, c) and not W.prec(a, c):
            raise NotAuxiliary("≺ is not compatible with ≤ on the left")
        if W.prec(a, b) and C.leq(b, c) and not W.prec(a, c):
            raise NotAuxiliary("≺ is not compatible with ≤ on the right")
    for a, b, c, d in itertools.product(probes[:8], repeat=4):
        if W.prec(a, b) and W.prec(c, d) and not W.prec(C.add(a, c), C.add(b, d)):
            raise NotAuxiliary("≺ is not additive")


class GammaCompletion(ExtRational):
    """γ(N[1/m], ≤): classes of increasing sequences.

    A class is recognized by its limit L and whether the sequence is
    eventually constant (compact c_L) or strictly increasing (s_L).  With
    ≺ = ≤, "for every k there is n with a_k ≺ b_n" reduces to comparing
    limits: a constant L is below a strictly increasing L' iff L < L', and
    every other case compares the limits with ≤.  The way-below rule "there
    is k with a_n ≺ b_k for all n" reduces the same way.
    """

    def __init__(self, W: WSemigroupDescriptor):
        C = W.carrier
        super().__init__("nbar" if C.m == 1 else "softened", 1 if C.m == 1 else C.m)
        self.W = W
        self.carrier = C
        self.sid = f"gamma({C.sid})"

    def alpha(self, x: Element) -> Element:
        """The W-morphism x ↦ class of the constant sequence x."""
        self.carrier._own(x)
        return self.element(Compact(x.payload.value))

    def from_descriptor(self, d: SequenceDescriptor) -> Element:
        C, W = self.carrier, self.W
        C._own(*d.prefix)
        for a, b in zip(d.prefix, d.prefix[1:]):
            if not W.prec(a, b):
                raise NotIncreasing(f"{C.format(a)} ⊀ {C.format(b)}")
        base = d.prefix[-1] if d.prefix else C.zero()
        tail = d.tail
        if isinstance(tail, Constant):
            return self.element(Compact(base.payload.value))
        if isinstance(tail, AffineIndex):
            step = tail.step
            C._own(step)
            if step.payload.value == ZERO:
                return self.element(Compact(base.payload.value))
            return self.element(Soft(INF))
        limit = ext(tail.limit) if not isinstance(tail.limit, Element) else tail.limit.payload.value
        if limit <= base.payload.value:
            raise NotIncreasing("the limit must exceed the prefix")
        if not limit.is_inf and C.m == 1:
            raise UnrecognizedClass("strictly increasing sequences in N are unbounded")
        return self.element(Soft(limit))

    def representative(self, a: Element) -> SequenceDescriptor:
        """A sequence descriptor over the carrier in the class of a."""
        self._own(a)
        p = a.payload
        if isinstance(p, Compact):
            return SequenceDescriptor((self.carrier.q(p.value),), Constant())
        if p.value.is_inf:
            return SequenceDescriptor((), AffineIndex(self.carrier.q(1)))
        return SequenceDescriptor((), SoftAscent(p.value))


def rational_w_semigroup(m: int) -> WSemigroupDescriptor:
    return WSemigroupDescriptor(RationalCarrier(m))


def sequence_precsim(W: WSemigroupDescriptor, d1: SequenceDescriptor, d2: SequenceDescriptor,
                     horizon: int = 40, reach: int = 200) -> bool:
    """Finite-horizon check of "for every k there is n with a_k ≺ b_n"."""
    C = W.carrier
    bs = list(terms(C, d2, reach))
    return all(any(W.prec(a, b) for b in bs) for a in terms(C, d1, horizon))


def sequence_way_below(W: WSemigroupDescriptor, d1: SequenceDescriptor, d2: SequenceDescriptor,
                       horizon: int = 200, reach: int = 40) -> bool:
    """Finite-horizon check of "there is k with a_n ≺ b_k for all n"."""
    C = W.carrier
    as_ = list(terms(C, d1, horizon))
    return any(all(W.prec(a, b) for a in as_) for b in terms(C, d2, reach))


def gamma_completion(W) -> SemigroupHandle:
    if isinstance(W, TableHandle):
        W = WSemigroupDescriptor(W)
    C = W.carrier
    if isinstance(C, TableHandle):
        if W.aux is not None:
            check_auxiliary(W, C.sample())
            raise UnsupportedOperation("finite carriers are supported with ≺ = ≤ only")
        return C
    if C is None or C == "zero":
        return zero_table()
    if not isinstance(C, RationalCarrier):
        raise UnsupportedOperation(f"no γ-completion for {C!r}")
    if W.aux is not None:
        check_auxiliary(W, C.sample(2))
        probes = C.sample(2)
        if any(W.prec(a, b) != C.leq(a, b) for a in probes for b in probes):
            raise UnsupportedOperation("rational carriers are supported with ≺ = ≤ only")
    return GammaCompletion(W)


# -- τ-completion ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PathDescriptor:
    """A path (-∞,0] → S given by samples (t, value) with t increasing to 0.

    ``approach`` is ``"flat"`` when the path is constant near 0 and ``"rising"``
    when it stays strictly below its endpoint f(0) for t < 0.
    """

    samples: tuple
    approach: str = "flat"

    @property
    def endpoint(self):
        return self.samples[-1][1]


class TauInterval(ExtRational):
    """τ([0,∞], ≺₁) = [0,∞) ⊔ (0,∞]: compacts c_a for finite a, soft s_a."""

    def __init__(self):
        SemigroupHandle.__init__(self, "tau([0,inf],<1)", {})
        self.kind = "softened"
        self.m = 0

    @property
    def _grid_base(self) -> int:
        return 2

    def _in_d(self, q: Fraction) -> bool:
        return q >= 0

    @staticmethod
    def prec1(a: ExtValue, b: ExtValue) -> bool:
        return not a.is_inf and a <= b

    def from_path(self, path: PathDescriptor) -> Element:
        vals = [ext(v) for _, v in path.samples]
        times = [Fraction(t) for t, _ in path.samples]
        if not times or times[-1] != 0 or any(s >= t for s, t in zip(times, times[1:])):
            raise BadDescriptor("sample times must increase to 0")
        for i, j in itertools.combinations(range(len(vals)), 2):
            if not self.prec1(vals[i], vals[j]) and not (path.approach == "rising" and j == len(vals) - 1 and vals[i] < vals[j]):
                raise NotAuxiliary(f"f({times[i]}) ⊀₁ f({times[j]})")
        e = vals[-1]
        if path.approach == "flat":
            if not self.prec1(e, e):
                raise NotAuxiliary("a path cannot rest at ∞")
            return self.element(Compact(e))
        if path.approach != "rising":
            raise BadDescriptor(f"unknown approach {path.approach!r}")
        if any(v >= e for v in vals[:-1]):
            raise BadDescriptor("a rising path stays below its endpoint")
        return self.element(Soft(e) if e != ZERO else Compact(ZERO))

    def endpoint(self, a: Element) -> ExtValue:
        return a.payload.value


def canonical_path_value(a: Element, t: Fraction) -> ExtValue:
    """A concrete path in the class of a τ element, evaluated at t ≤ 0."""
    p = a.payload
    e = p.value
    if isinstance(p, Compact) or t == 0:
        return e
    if e.is_inf:
        return ExtValue(Fraction(-1) / t) if t < 0 else INF
    return e * ExtValue(max(Fraction(0), 1 + t))


def path_precsim(f: Element, g: Element, steps: int = 24) -> bool:
    """"For every t < 0 there is t' < 0 with f(t) ≺₁ g(t')", on dyadic sample times."""
    ts = [-Fraction(1, 2**i) for i in range(steps)]
    tps = [-Fraction(1, 2**i) for i in range(4 * steps)]
    return all(any(TauInterval.prec1(canonical_path_value(f, t), canonical_path_value(g, tp)) for tp in tps) for t in ts)


class TauOfCu(SemigroupHandle):
    """τ(S, ≪) for a Cu-semigroup S, identified with S through the endpoint map."""

    kind = "tau"

    def __init__(self, S: SemigroupHandle):
        self.S = S
        super().__init__(f"tau({S.sid})", {})
        for hook in ("_check", "_zero", "_leq", "_add", "_way_below", "_wedge", "_limit", "_ascent_term",
                     "_infinity_of", "_sample", "_lower_set", "_format", "_sort_key", "_residual"):
            setattr(self, hook, getattr(S, hook))

    def from_path(self, path: PathDescriptor) -> Element:
        vals = [v for _, v in path.samples]
        self.S._own(*vals)
        for a, b in zip(vals, vals[1:]):
            if not self.S.way_below(a, b) and not (path.approach == "rising" and b is vals[-1]):
                raise NotAuxiliary("consecutive path values must be way-below each other")
        return Element(self.sid, path.endpoint.payload)

    def endpoint(self, a: Element) -> Element:
        self._own(a)
        return Element(self.S.sid, a.payload)

    def top(self) -> Element:
        return Element(self.sid, self.S.top().payload)


def tau_completion(Q) -> SemigroupHandle:
    """``"P1"`` for ([0,∞], ≺₁); a catalog handle for (S, ≪); ``"zero"`` for {0}."""
    if Q in ("P1", "[0,inf]"):
        return TauInterval()
    if Q in ("zero", None):
        return zero_table()
    if isinstance(Q, SemigroupHandle):
        return TauOfCu(Q)
    raise UnsupportedOperation(f"no τ-completion for {Q!r}")


# -- direct limits ----------------------------------------------------------------------------


class StationaryImage(SemigroupHandle):
    """The limit of S → S → ... along an idempotent endomorphism φ, realized as φ(S)."""

    kind = "stationary_limit"

    def __init__(self, phi: MorphismDescriptor):
        S = phi.domain
        self.S = S
        self.phi = phi
        super().__init__(f"lim({S.sid},{phi.kind})", {})
        for hook in ("_zero", "_leq", "_add", "_way_below", "_wedge", "_limit", "_ascent_term",
                     "_infinity_of", "_format", "_sort_key"):
            setattr(self, hook, getattr(S, hook))

    def _check(self, p) -> None:
        self.S._check(p)
        if self.phi(Element(self.S.sid, p)).payload != p:
            from .errors import InvalidElement

            raise InvalidElement("not in the image of the connecting map")

    def _sample(self, bound: int) -> list:
        return list({self.phi(e).payload for e in self.S.sample(bound)})

    def embed(self, a: Element) -> Element:
        """The canonical map from the stage into the limit."""
        return Element(self.sid, self.phi(a).payload)

    def to_softened(self, a: Element) -> Element:
        """For the integration limit: the constant value, read in softened(1)."""
        self._own(a)
        B, P, I = LscInterval.pieces(a.payload)
        return softened(1).element(P[0])

    def from_softened(self, x: Element) -> Element:
        return self.element(self.S.constant(x.payload).payload)

    def top(self) -> Element:
        return self.embed(self.S.top())


def direct_limit(stages: Sequence[SemigroupHandle], maps: Sequence[MorphismDescriptor], probe_bound: int = 2):
    """Direct limit of a chain of catalog semigroups.

    Supported: chains of N̄ with scaling maps by positive integers (the limit
    is the γ-completion of the algebraic limit N[1/r]), and a stationary chain
    given by one handle and an idempotent endomorphism.
    """
    stages = list(stages)
    maps = list(maps)
    if not stages:
        raise MorphismMismatch("no stages")
    stationary = len(stages) == 1 and len(maps) == 1
    if not stationary and len(maps) != len(stages) - 1:
        raise MorphismMismatch("need one map between consecutive stages")
    for i, phi in enumerate(maps):
        dom, cod = (stages[0], stages[0]) if stationary else (stages[i], stages[i + 1])
        if phi.domain.sid != dom.sid or phi.codomain.sid != cod.sid:
            raise MorphismMismatch(f"map {i} goes {phi.domain.sid} → {phi.codomain.sid}")
    if all(isinstance(S, ExtRational) and S.kind == "nbar" for S in stages) and all(
        phi.kind in ("scale", "identity") for phi in maps
    ):
        factors = {Fraction(phi.param) if phi.kind == "scale" else Fraction(1) for phi in maps}
        if any(r.denominator != 1 for r in factors):
            raise UnsupportedOperation("scaling maps on N̄ must be by positive integers")
        m = 1
        for r in factors:
            m *= int(r)
        G = gamma_completion(rational_w_semigroup(m))
        scales = [Fraction(1)]
        for phi in (maps * 64 if stationary else maps):
            scales.append(scales[-1] * (phi.param if phi.kind == "scale" else 1))

        def embed(i: int, x: Element):
            p = x.payload
            if isinstance(p, Soft):
                return G.element(Soft(INF))
            return G.element(Compact(p.value / ExtValue(scales[i])))

        G.embed = embed
        return G
    if stationary:
        phi = maps[0]
        for a in stages[0].sample(probe_bound):
            if phi(phi(a)) != phi(a):
                raise UnsupportedOperation("stationary limits need an idempotent connecting map")
        return StationaryImage(phi)
    raise UnsupportedOperation("this chain of stages is not supported")


# -- Grothendieck groups and interpolation ---------------------------------------------------------


@dataclass
class GroupDescriptor:
    """A partially ordered abelian group Z^d (scaled by 1/scale) with a positive cone."""

    name: str
    dim: int
    scale: int
    positive: Callable[[tuple], bool]
    box: tuple = field(default=())

    def leq(self, a: tuple, b: tuple) -> bool:
        return self.positive(tuple(y - x for x, y in zip(a, b)))

    def format(self, g: tuple) -> str:
        vals = [Fraction(v, self.scale) for v in g]
        return str(vals[0]) if self.dim == 1 else "(" + ",".join(str(v) for v in vals) + ")"


def _check_cancellation(S: SemigroupHandle, elems: Sequence[Element]) -> None:
    for x, y, z in itertools.product(elems, repeat=3):
        if x != y and S.add(x, z) == S.add(y, z):
            raise NotCancellative(f"{S.format(x)} + {S.format(z)} = {S.format(y)} + {S.format(z)}")


def interpolates(G: GroupDescriptor, x1, x2, y1, y2, candidates=None) -> tuple | None:
    """An interpolant z with x1, x2 ≤ z ≤ y1, y2 among the candidates, or None."""
    for z in candidates if candidates is not None else G.box:
        if G.leq(x1, z) and G.leq(x2, z) and G.leq(z, y1) and G.leq(z, y2):
            return z
    return None


def grothendieck_interpolation(M, radius: int = 8, denominator: int = 8):
    """Build G(M) and check Riesz interpolation on a bounded box.

    ``M`` is ``("rational", m)`` for N[1/m], ``"N"``, a gap fragment handle, or
    a catalog handle (which is probed for cancellation first).  By translation
    invariance x1 = 0 is fixed.
    """
    if M == "N":
        M = ("rational", 1)
    if isinstance(M, tuple) and M[0] == "rational":
        m = M[1]
        scale = 1
        while scale * m <= denominator and m > 1:
            scale *= m
        G = GroupDescriptor("Z" if m == 1 else f"Z[1/{m}]", 1, scale, lambda g: g[0] >= 0)
        box = list(range(-radius * scale, radius * scale + 1))
        count = 0
        # totally ordered: the interpolant must lie in [max(x), min(y)]
        for x2 in box:
            lo = max(0, x2)
            for y1 in box:
                if y1 < lo:
                    continue
                for y2 in box:
                    if y2 < lo:
                        continue
                    count += 1
                    i = bisect.bisect_left(box, lo)
                    if i == len(box) or box[i] > min(y1, y2):
                        report = AxiomReport("Interpolation", "fail", ((0,), (x2,), (y1,), (y2,)), count)
                        return G, report
        G.box = tuple((v,) for v in box)
        return G, AxiomReport("Interpolation", "pass", (), count)
    if isinstance(M, GapFragment):
        _check_cancellation(M, M.sample(2))
        gap = M.gap
        G = GroupDescriptor("Z^2 (rank, obstruction)", 2, 1, lambda g: g == (0, 0) or g[0] >= gap)
        r = min(radius, 4)
        box = sorted(((a, b) for a in range(-r, r + 1) for b in range(-r, r + 1)),
                     key=lambda g: (abs(g[0]) + abs(g[1]), g))
        G.box = tuple(box)
        zero = (0, 0)
        pos = [y for y in box if G.positive(y)]
        count = 0
        for x2 in box:
            ups = [y for y in pos if G.leq(x2, y)]
            if not ups:
                continue
            zs = [z for z in box if G.leq(zero, z) and G.leq(x2, z)]
            for y1, y2 in itertools.product(ups, repeat=2):
                count += 1
                if interpolates(G, zero, x2, y1, y2, zs) is None:
                    return G, AxiomReport("Interpolation", "fail", (zero, x2, y1, y2), count)
        return G, AxiomReport("Interpolation", "pass", (), count)
    if isinstance(M, SemigroupHandle):
        elems = [e for e in M.sample(2)]
        _check_cancellation(M, elems)
        raise UnsupportedOperation(f"no Grothendieck group construction for {M.sid}")
    raise UnsupportedOperation(f"unknown monoid {M!r}")


def verify_isomorphism(S: SemigroupHandle, T: SemigroupHandle, phi: Callable, elements: Sequence[Element],
                       check_way_below: bool = True):
    """Check that phi is injective and preserves ≤, + and ≪ on ``elements``.

    Returns None on success, else (a, b, reason)."""
    images = {}
    for a in elements:
        b = phi(a)
        if b in images and images[b] != a:
            return a, images[b], "not injective"
        images[b] = a
    for a, b in itertools.product(elements, repeat=2):
        pa, pb = phi(a), phi(b)
        if S.leq(a, b) != T.leq(pa, pb):
            return a, b, "order differs"
        if phi(S.add(a, b)) != T.add(pa, pb):
            return a, b, "addition differs"
        if check_way_below and S.way_below(a, b) != T.way_below(pa, pb):
            return a, b, "way-below differs"
    return None
