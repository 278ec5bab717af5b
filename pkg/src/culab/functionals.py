"""Functionals, rank functions, realization and elementary-ideal detection."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Sequence

from .catalog import ExtRational, GapFragment, TableHandle, ZStableModel
from .constructions import (
    Ideal,
    ProductHandle,
    check_ideal,
    ideal_generated,
)
from .errors import (
    MixedSemigroup,
    NotIdeal,
    NotMonotone,
    NotRealizable,
    UnknownFunctionalSpace,
    UnsupportedOperation,
)
from .order import INF, ZERO, Element, ExtValue, SemigroupHandle, Soft, TupleValue, ext


# -- forms -------------------------------------------------------------------


@dataclass(frozen=True)
class Scaling:
    t: ExtValue

    def __post_init__(self):
        object.__setattr__(self, "t", ext(self.t))


@dataclass(frozen=True)
class VertexWeights:
    w: tuple

    def __post_init__(self):
        object.__setattr__(self, "w", tuple(ext(x) for x in self.w))


@dataclass(frozen=True, eq=False)
class IdealExtended:
    inner: "Functional"
    ideal: Ideal


@dataclass(frozen=True)
class Zero:
    pass


@dataclass(frozen=True)
class InfinityOnNonzero:
    pass


@dataclass(frozen=True, eq=False)
class Functional:
    S: SemigroupHandle
    form: object

    def __call__(self, a: Element) -> ExtValue:
        return evaluate(self, a)

    def __eq__(self, other) -> bool:
        return isinstance(other, Functional) and other.S.sid == self.S.sid and other.form == self.form

    def __hash__(self) -> int:
        return hash((self.S.sid, repr(self.form)))

    def describe(self) -> str:
        return describe_form(self.form)


def describe_form(form) -> str:
    if isinstance(form, Scaling):
        return f"scaling({form.t})"
    if isinstance(form, VertexWeights):
        return "weights(" + ", ".join(str(x) for x in form.w) + ")"
    if isinstance(form, IdealExtended):
        g = form.ideal.generator
        label = form.ideal.ambient.format(g) if g is not None else "?"
        return f"extend({describe_form(form.inner.form)}, <{label}>)"
    if isinstance(form, Zero):
        return "zero"
    return "infinity-on-nonzero"


def _scalar(S: SemigroupHandle, p) -> ExtValue:
    """The one-dimensional value read by scaling functionals."""
    if isinstance(S, ExtRational):
        return p.value
    if isinstance(S, GapFragment):
        return ExtValue(p.items[0]) if isinstance(p, TupleValue) else ExtValue(S.coords(Element(S.sid, p))[0])
    raise UnsupportedOperation(f"no scaling functionals on {S.sid}")


def _weighted(S: SemigroupHandle, p, w: tuple) -> ExtValue:
    if isinstance(S, ZStableModel):
        vals = S._fvals(p) if S._is_soft(p) else S.hat(p)
    elif isinstance(S, ProductHandle):
        vals = [_scalar(f, x) for f, x in zip(S.factors, p.items)]
    else:
        raise UnsupportedOperation(f"no vertex-weight functionals on {S.sid}")
    if len(vals) != len(w):
        raise UnsupportedOperation(f"expected {len(vals)} weights")
    total = ZERO
    for wi, v in zip(w, vals):
        total = total + wi * v
    return total


def evaluate(lam: Functional, a: Element) -> ExtValue:
    S = lam.S
    if a.sid != S.sid:
        raise MixedSemigroup(f"functional on {S.sid} applied to an element of {a.sid}")
    form = lam.form
    if isinstance(form, Zero):
        return ZERO
    if isinstance(form, InfinityOnNonzero):
        return ZERO if a == S.zero() else INF
    if isinstance(form, IdealExtended):
        return evaluate(form.inner, a) if form.ideal.member(a) else INF
    if isinstance(form, Scaling):
        return form.t * _scalar(S, a.payload)
    if isinstance(form, VertexWeights):
        return _weighted(S, a.payload, form.w)
    raise UnsupportedOperation(f"unknown functional form {form!r}")


def check_functional(lam: Functional, probes: Sequence[Element]):
    """A violated law with its witness, or None: zero, additivity, order."""
    S = lam.S
    if evaluate(lam, S.zero()) != ZERO:
        return "zero", (S.zero(),)
    for a, b in itertools.product(probes, repeat=2):
        if evaluate(lam, S.add(a, b)) != evaluate(lam, a) + evaluate(lam, b):
            return "additivity", (a, b)
        if S.leq(a, b) and not evaluate(lam, a) <= evaluate(lam, b):
            return "order", (a, b)
    return None


# -- families ----------------------------------------------------------------


@dataclass
class FunctionalFamily:
    """F(S) as a cone: nonnegative combinations of ``rays`` (parameters in
    [0,∞]) together with the {0,∞}-valued ``extended`` functionals."""

    S: SemigroupHandle
    rays: list
    extended: list

    @property
    def generators(self) -> list:
        return self.rays + self.extended

    def scaled(self, params: Sequence) -> Functional:
        """The combination Σ params[i]·rays[i]."""
        params = [ext(p) for p in params]
        if len(params) != len(self.rays):
            raise UnsupportedOperation(f"expected {len(self.rays)} parameters")
        if len(params) == 1:
            ray = self.rays[0].form
            if isinstance(ray, Scaling):
                return Functional(self.S, Scaling(params[0] * ray.t))
        w = [ZERO] * len(self.rays)
        for p, ray in zip(params, self.rays):
            for i, x in enumerate(ray.form.w):
                w[i] = w[i] + p * x
        return Functional(self.S, VertexWeights(tuple(w)))


def _table_ideals(S: TableHandle) -> list[Ideal]:
    elems = S.sample()
    out = []
    z = S.zero()
    for r in range(len(elems) + 1):
        for combo in itertools.combinations(elems, r):
            members = set(combo)
            if z not in members:
                continue
            down = all(x in members for y in members for x in elems if S.leq(x, y))
            closed = all(S.add(x, y) in members for x in members for y in members)
            if down and closed:
                tops = [y for y in members if all(S.leq(x, y) for x in members)]
                out.append(Ideal(S, members.__contains__, tops[0] if tops else None, tops[0] if tops else None))
    return out


def functional_space(S: SemigroupHandle, normalized_at: Element | None = None) -> FunctionalFamily:
    """A generating family for F(S); with ``normalized_at`` only functionals
    taking the value 1 there (the extreme points of that slice)."""
    if isinstance(S, (ExtRational, GapFragment)):
        fam = FunctionalFamily(S, [Functional(S, Scaling(1))], [Functional(S, InfinityOnNonzero())])
    elif isinstance(S, ZStableModel):
        rays = [Functional(S, VertexWeights(tuple(1 if j == i else 0 for j in range(S.k)))) for i in range(S.k)]
        fam = FunctionalFamily(S, rays, [Functional(S, InfinityOnNonzero())])
    elif isinstance(S, ProductHandle) and all(isinstance(f, ExtRational) for f in S.factors):
        n = len(S.factors)
        rays = [Functional(S, VertexWeights(tuple(1 if j == i else 0 for j in range(n)))) for i in range(n)]
        extended = []
        for i in range(n):
            unit = S.tuple(*[f.c(1) if j == i else f.zero() for j, f in enumerate(S.factors)])
            extended.append(Functional(S, IdealExtended(Functional(S, Zero()), ideal_generated(S, unit))))
        extended.append(Functional(S, InfinityOnNonzero()))
        fam = FunctionalFamily(S, rays, extended)
    elif isinstance(S, TableHandle):
        extended = [Functional(S, IdealExtended(Functional(S, Zero()), I)) for I in _table_ideals(S)]
        fam = FunctionalFamily(S, [], extended)
    else:
        raise UnknownFunctionalSpace(f"no parameterization of F({S.sid})")
    if normalized_at is None:
        return fam
    S._own(normalized_at)
    rays = []
    for ray in fam.rays:
        v = evaluate(ray, normalized_at)
        if v != ZERO and not v.is_inf:
            inv = ExtValue(1 / v.fraction)
            rays.append(fam.scaled([inv if r is ray else 0 for r in fam.rays]))
    return FunctionalFamily(S, rays, [])


# -- rank functions and realization ---------------------------------------------


@dataclass(frozen=True)
class RankFunction:
    """λ ↦ λ(a) on F(S), by its values on the family's rays (``coeffs``) and
    the ideal-extended generators (``extended``)."""

    sid: str
    coeffs: tuple
    extended: tuple = ()

    def __call__(self, params) -> ExtValue:
        if not isinstance(params, (tuple, list)):
            params = (params,)
        total = ZERO
        for p, c in zip(params, self.coeffs):
            total = total + ext(p) * c
        return total

    def __add__(self, other: "RankFunction") -> "RankFunction":
        if other.sid != self.sid:
            raise MixedSemigroup("rank functions on different semigroups")
        return RankFunction(
            self.sid,
            tuple(a + b for a, b in zip(self.coeffs, other.coeffs)),
            tuple(a + b for a, b in zip(self.extended, other.extended)),
        )

    def __str__(self) -> str:
        if len(self.coeffs) == 1:
            return f"t -> {self.coeffs[0]}*t"
        return "w -> " + " + ".join(f"{c}*w{i + 1}" for i, c in enumerate(self.coeffs))


def rank_of(S: SemigroupHandle, a: Element) -> RankFunction:
    fam = functional_space(S)
    S._own(a)
    return RankFunction(
        S.sid,
        tuple(evaluate(r, a) for r in fam.rays),
        tuple(evaluate(e, a) for e in fam.extended),
    )


def scaling_target(S: SemigroupHandle, slope) -> RankFunction:
    """The rank-function shape t ↦ slope·t on a one-ray family."""
    return RankFunction(S.sid, (ext(slope),), (ZERO if ext(slope) == ZERO else INF,))


def alpha(S: SemigroupHandle, f: RankFunction) -> Element:
    """sup{x : x̂ ≪ f}, in closed form on softened and Z-stable models.

    Compact x has x̂ ≪ f only when x̂ sits strictly below f, so the supremum
    is the soft element with rank f, never a compact one.
    """
    if not isinstance(f, RankFunction) or f.sid != S.sid:
        raise NotRealizable("the target is not a rank function on this semigroup")
    if all(c == ZERO for c in f.coeffs):
        return S.zero()
    if isinstance(S, ExtRational) and S.kind == "softened":
        return S.element(Soft(f.coeffs[0]))
    if isinstance(S, ZStableModel):
        if any(c == ZERO for c in f.coeffs):
            raise NotRealizable("targets must be strictly positive at every vertex")
        return S.function(*f.coeffs)
    raise NotRealizable(f"no realization map on {S.sid}")


# -- ideal extension and regularization ---------------------------------------------


def extend_from_ideal(lam: Functional, I: Ideal, probe_bound: int = 2) -> Functional:
    """λ̃ = λ on I and ∞ off I."""
    S = I.ambient
    probes = S.sample(probe_bound)
    check_ideal(I, probes)
    if all(I.member(x) for x in probes) and I.member(S.top()):
        return lam
    if isinstance(lam.form, Zero) and all(x == S.zero() for x in probes if I.member(x)):
        return Functional(S, InfinityOnNonzero())
    out = Functional(S, IdealExtended(lam, I))
    bad = check_functional(out, [x for x in probes])
    if bad is not None:
        raise NotIdeal(f"the extension breaks {bad[0]}")
    return out


@dataclass
class AdditiveMap:
    """An additive, order-preserving map S → [0,∞] that may fail to preserve suprema."""

    S: SemigroupHandle
    fn: Callable[[Element], object]

    def __call__(self, a: Element) -> ExtValue:
        return ext(self.fn(a))


def _compact_probes(S: SemigroupHandle, bound: int) -> list:
    return [a for a in S.sample(bound) if S.is_compact(a)]


def regularize(lt: AdditiveMap, probe_bound: int = 4) -> Functional:
    """λ(a) = sup{λ̃(a') : a' ≪ a}.

    On the supported kinds this is the unique functional agreeing with λ̃ on
    compact elements, so it is read off from λ̃ on compacts after checking
    that λ̃ is additive and order-preserving there.
    """
    S = lt.S
    compacts = _compact_probes(S, probe_bound)
    for a, b in itertools.product(compacts, repeat=2):
        if S.leq(a, b) and not lt(a) <= lt(b):
            raise NotMonotone(f"{S.format(a)} ≤ {S.format(b)} but the values decrease")
        if lt(S.add(a, b)) != lt(a) + lt(b):
            raise NotMonotone(f"not additive at {S.format(a)}, {S.format(b)}")
    if isinstance(S, ExtRational):
        return Functional(S, Scaling(lt(S.c(1))))
    if isinstance(S, ProductHandle) and all(isinstance(f, ExtRational) for f in S.factors):
        n = len(S.factors)
        w = []
        for i in range(n):
            unit = S.tuple(*[f.c(1) if j == i else f.zero() for j, f in enumerate(S.factors)])
            w.append(lt(unit))
        return Functional(S, VertexWeights(tuple(w)))
    if isinstance(S, TableHandle):
        zeros = {a for a in S.sample() if lt(a) == ZERO}
        for a in S.sample():
            if lt(a) not in (ZERO, INF):
                raise NotMonotone("functionals on finite tables take only the values 0 and ∞")
        if zeros == set(S.sample()):
            return Functional(S, Zero())
        return Functional(S, IdealExtended(Functional(S, Zero()), Ideal(S, zeros.__contains__)))
    raise UnsupportedOperation(f"regularization is not available on {S.sid}")


# -- elementary ideals ----------------------------------------------------------------


@dataclass
class ElementaryWitness:
    functional: Functional
    ideal: Ideal
    unit: Element
    values: list


def _normalize(lam: Functional, F: Sequence[Element]) -> Functional | None:
    """Rescale so the least positive finite value on F becomes 1."""
    vals = [evaluate(lam, a) for a in F]
    finite = [v.fraction for v in vals if not v.is_inf and v != ZERO]
    if not finite:
        return None
    m = min(finite)
    if m == 1:
        return lam
    form = lam.form
    if isinstance(form, Scaling):
        return Functional(lam.S, Scaling(form.t * ExtValue(1 / m)))
    if isinstance(form, VertexWeights):
        return Functional(lam.S, VertexWeights(tuple(x * ExtValue(1 / m) for x in form.w)))
    if isinstance(form, IdealExtended):
        inner = _normalize(form.inner, [a for a in F if form.ideal.member(a)])
        return inner and Functional(lam.S, IdealExtended(inner, form.ideal))
    return None


def _is_nbar_valued(vals: Sequence[ExtValue]) -> bool:
    finite = set()
    for v in vals:
        if v.is_inf:
            continue
        if v.fraction.denominator != 1:
            return False
        finite.add(int(v.fraction))
    return INF in vals and 1 in finite and finite == set(range(max(finite) + 1))


def _candidates(S: SemigroupHandle) -> list:
    fam = functional_space(S)
    out = []
    if isinstance(S, ProductHandle):
        # λ on the ideal of one coordinate, ∞ off it
        for i, ray in enumerate(fam.rays):
            unit = S.tuple(*[f.c(1) if j == i else f.zero() for j, f in enumerate(S.factors)])
            out.append(Functional(S, IdealExtended(ray, ideal_generated(S, unit))))
    return out + fam.rays


def detect_elementary(S: SemigroupHandle, bound: int = 16) -> ElementaryWitness | None:
    """A functional with value set {0,1,2,...,∞} on the sample of size
    ``bound``, with the ideal generated by an element of value 1."""
    F = S.sample(bound)
    for lam in _candidates(S):
        lam = _normalize(lam, F)
        if lam is None:
            continue
        vals = [evaluate(lam, a) for a in F]
        if not _is_nbar_valued(vals):
            continue
        units = [a for a, v in zip(F, vals) if v == ExtValue(1)]
        unit = min(units, key=S.sort_key)
        I = ideal_generated(S, unit)
        inside = [(a, v) for a, v in zip(F, vals) if I.member(a)]
        if not _is_nbar_valued([v for _, v in inside]):
            continue
        # λ restricted to I must be an order-isomorphism onto its values
        if any((S.leq(a, b)) != (va <= vb) for (a, va), (b, vb) in itertools.product(inside, repeat=2)):
            continue
        return ElementaryWitness(lam, I, unit, sorted({v for _, v in inside}))
    return None
