"""Exact values, elements, semigroup handles and the generic order operations.

Every catalog semigroup is a subclass of :class:`SemigroupHandle` that decides
``leq``, ``add``, ``way_below``, ``sup`` and ``wedge`` on canonical payloads.
The module-level functions check that both arguments live in the same handle
and then delegate.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence, Union

from .errors import BadDescriptor, InvalidElement, MixedSemigroup, NotIncreasing


@functools.total_ordering
class ExtValue:
    """A value in [0, ∞]: an exact nonnegative rational or the symbol ∞.

    Multiplication follows the measure-theory convention 0·∞ = 0.
    """

    __slots__ = ("_q", "_h")

    def __init__(self, value: Union["ExtValue", int, Fraction, str] = 0):
        if isinstance(value, ExtValue):
            q = value._q
        elif isinstance(value, str) and value.strip() in ("inf", "∞"):
            q = None
        else:
            q = Fraction(value)
            if q < 0:
                raise ValueError(f"negative value {value!r}")
        object.__setattr__(self, "_q", q)
        object.__setattr__(self, "_h", None)

    @classmethod
    def _raw(cls, q) -> "ExtValue":
        # q is already a nonnegative Fraction (or None for ∞)
        v = object.__new__(cls)
        object.__setattr__(v, "_q", q)
        object.__setattr__(v, "_h", None)
        return v

    def __setattr__(self, name, value):
        raise AttributeError("ExtValue is immutable")

    @property
    def is_inf(self) -> bool:
        return self._q is None

    @property
    def fraction(self) -> Fraction:
        if self._q is None:
            raise ValueError("∞ has no rational value")
        return self._q

    def __add__(self, other) -> "ExtValue":
        other = _ext(other)
        if self._q is None or other._q is None:
            return INF
        return ExtValue._raw(self._q + other._q)

    __radd__ = __add__

    def __mul__(self, other) -> "ExtValue":
        other = _ext(other)
        if self._q == 0 or other._q == 0:
            return ZERO
        if self._q is None or other._q is None:
            return INF
        return ExtValue._raw(self._q * other._q)

    __rmul__ = __mul__

    def __sub__(self, other) -> "ExtValue":
        # truncated subtraction; only used on finite operands
        other = _ext(other)
        if other._q is None:
            raise ValueError("cannot subtract ∞")
        if self._q is None:
            return INF
        return ExtValue(max(self._q - other._q, Fraction(0)))

    def __truediv__(self, other) -> "ExtValue":
        other = _ext(other)
        if other._q is None or other._q == 0:
            raise ZeroDivisionError("division by 0 or ∞")
        if self._q is None:
            return INF
        return ExtValue(self._q / other._q)

    def __eq__(self, other) -> bool:
        if other.__class__ is ExtValue:
            return self._q == other._q
        try:
            other = _ext(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self._q == other._q

    def __lt__(self, other) -> bool:
        if other.__class__ is not ExtValue:
            other = _ext(other)
        if self._q is None:
            return False
        if other._q is None:
            return True
        return self._q < other._q

    def __le__(self, other) -> bool:
        if other.__class__ is not ExtValue:
            other = _ext(other)
        if other._q is None:
            return True
        if self._q is None:
            return False
        return self._q <= other._q

    def __hash__(self) -> int:
        if self._h is None:
            object.__setattr__(self, "_h", hash(("ext", self._q)))
        return self._h

    def __str__(self) -> str:
        if self._q is None:
            return "inf"
        return str(self._q)

    def __repr__(self) -> str:
        return f"ExtValue('{self}')"


def _ext(value) -> ExtValue:
    if value.__class__ is ExtValue:
        return value
    if isinstance(value, (int, Fraction, str)):
        return ExtValue(value)
    raise TypeError(f"not an extended value: {value!r}")


ZERO = ExtValue(0)
INF = ExtValue("inf")


def ext(value) -> ExtValue:
    """Coerce ints, Fractions and strings like ``"3/4"`` or ``"inf"``."""
    return _ext(value)


# -- payloads ---------------------------------------------------------------


@dataclass(frozen=True)
class Compact:
    value: ExtValue

    def __post_init__(self):
        object.__setattr__(self, "value", _ext(self.value))


@dataclass(frozen=True)
class Soft:
    value: ExtValue

    def __post_init__(self):
        object.__setattr__(self, "value", _ext(self.value))
        if self.value == ZERO:
            raise InvalidElement("soft values must be strictly positive; use Compact(0)")


@dataclass(frozen=True)
class FunctionTable:
    """A function given by its values; ``entries`` is ((key, payload), ...)."""

    entries: tuple

    def __hash__(self) -> int:
        h = self.__dict__.get("_h")
        if h is None:
            h = hash(self.entries)
            object.__setattr__(self, "_h", h)
        return h

    def value_at(self, key):
        for k, v in self.entries:
            if k == key:
                return v
        raise KeyError(key)


@dataclass(frozen=True)
class TupleValue:
    items: tuple


@dataclass(frozen=True)
class GroupCompact:
    g: tuple
    x: object


@dataclass(frozen=True)
class TableIndex:
    index: int


Payload = Union[Compact, Soft, FunctionTable, TupleValue, GroupCompact, TableIndex]


@dataclass(frozen=True)
class Element:
    sid: str
    payload: object

    def __str__(self) -> str:
        return format_payload(self.payload)


def format_payload(p) -> str:
    if isinstance(p, Compact):
        return f"c_{p.value}"
    if isinstance(p, Soft):
        return f"s_{p.value}"
    if isinstance(p, TupleValue):
        return "(" + ", ".join(format_payload(x) for x in p.items) + ")"
    if isinstance(p, FunctionTable):
        return "{" + ", ".join(f"{k}: {format_payload(v)}" for k, v in p.entries) + "}"
    if isinstance(p, GroupCompact):
        return "(" + ",".join(str(g) for g in p.g) + "; " + format_payload(p.x) + ")"
    if isinstance(p, TableIndex):
        return f"#{p.index}"
    return str(p)


class NoInfimum:
    """Returned by ``wedge`` when the catalog kind does not guarantee an infimum."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "NoInfimum"

    def __bool__(self) -> bool:
        return False


NO_INFIMUM = NoInfimum()


# -- sequence descriptors ---------------------------------------------------


@dataclass(frozen=True)
class Constant:
    """The sequence stays at the last prefix element."""


@dataclass(frozen=True)
class SoftAscent:
    """Strictly increasing canonical terms converging to ``limit``.

    ``limit`` is an ExtValue (read in the handle's soft component) or an
    Element of the handle.
    """

    limit: object


@dataclass(frozen=True)
class AffineIndex:
    """Terms ``base + k * step`` for k = 1, 2, ...; base is the last prefix element."""

    step: Element


@dataclass(frozen=True)
class SequenceDescriptor:
    prefix: tuple
    tail: object = Constant()

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(self.prefix))
        if not isinstance(self.tail, (Constant, SoftAscent, AffineIndex)):
            raise BadDescriptor(f"unsupported tail rule {self.tail!r}")


# -- handles ----------------------------------------------------------------


class SemigroupHandle:
    """Decision procedures for one catalog semigroup.

    Subclasses implement the underscore hooks on canonical payloads.
    """

    kind = "abstract"

    def __init__(self, sid: str, params: dict | None = None):
        self.sid = sid
        self.params = dict(params or {})

    # hooks
    def _canon(self, p):
        return p

    def _check(self, p) -> None:
        raise NotImplementedError

    def _zero(self):
        raise NotImplementedError

    def _leq(self, p, q) -> bool:
        raise NotImplementedError

    def _add(self, p, q):
        raise NotImplementedError

    def _way_below(self, p, q) -> bool:
        raise NotImplementedError

    def _wedge(self, p, q):
        return NO_INFIMUM

    def _limit(self, limit):
        if isinstance(limit, Element):
            return limit.payload
        raise BadDescriptor(f"{self.sid} has no soft ascent to {limit}")

    def _ascent_term(self, limit, k: int):
        raise BadDescriptor(f"{self.sid} has no soft ascents")

    def _infinity_of(self, p):
        raise NotImplementedError

    def _sample(self, bound: int) -> list:
        return [self._zero()]

    def _lower_set(self, p):
        return None

    def _residual(self, p, q):
        return None

    def _format(self, p) -> str:
        return format_payload(p)

    def _sort_key(self, p):
        return (str(type(p).__name__), format_payload(p))

    # public API on Elements
    def element(self, payload) -> Element:
        payload = self._canon(payload)
        self._check(payload)
        return Element(self.sid, payload)

    def zero(self) -> Element:
        return Element(self.sid, self._zero())

    def owns(self, a: Element) -> bool:
        return isinstance(a, Element) and a.sid == self.sid

    def _own(self, *xs: Element) -> None:
        for x in xs:
            if not isinstance(x, Element):
                raise TypeError(f"expected an Element, got {x!r}")
            if x.sid != self.sid:
                raise MixedSemigroup(f"{x.sid} is not {self.sid}")

    def leq(self, a: Element, b: Element) -> bool:
        self._own(a, b)
        return self._leq(a.payload, b.payload)

    def add(self, a: Element, b: Element) -> Element:
        self._own(a, b)
        return Element(self.sid, self._canon(self._add(a.payload, b.payload)))

    def way_below(self, a: Element, b: Element) -> bool:
        self._own(a, b)
        return self._way_below(a.payload, b.payload)

    def is_compact(self, a: Element) -> bool:
        return self.way_below(a, a)

    def wedge(self, a: Element, b: Element):
        self._own(a, b)
        w = self._wedge(a.payload, b.payload)
        if w is NO_INFIMUM:
            return NO_INFIMUM
        return Element(self.sid, self._canon(w))

    def multiple(self, n: int, a: Element) -> Element:
        self._own(a)
        acc = self._zero()
        for _ in range(n):
            acc = self._canon(self._add(acc, a.payload))
        return Element(self.sid, acc)

    def sum(self, xs: Sequence[Element]) -> Element:
        acc = self.zero()
        for x in xs:
            acc = self.add(acc, x)
        return acc

    def infinity_of(self, a: Element) -> Element:
        self._own(a)
        return Element(self.sid, self._canon(self._infinity_of(a.payload)))

    def sample(self, bound: int = 4) -> list[Element]:
        out = []
        seen = set()
        for p in self._sample(bound):
            p = self._canon(p)
            if p not in seen:
                seen.add(p)
                out.append(Element(self.sid, p))
        return sorted(out, key=self.sort_key)

    def lower_set(self, a: Element):
        """All elements below ``a`` when that set is finite, else None."""
        self._own(a)
        low = self._lower_set(a.payload)
        if low is None:
            return None
        return sorted({Element(self.sid, self._canon(p)) for p in low}, key=self.sort_key)

    def residual(self, a: Element, b: Element):
        """Largest w with a + w ≤ b (for a ≤ b) when the handle can compute it, else None."""
        self._own(a, b)
        if not self._leq(a.payload, b.payload):
            return None
        w = self._residual(a.payload, b.payload)
        if w is None:
            return None
        try:
            return self.element(w)
        except InvalidElement:
            return None

    def format(self, a: Element) -> str:
        self._own(a)
        return self._format(a.payload)

    def sort_key(self, a: Element):
        return self._sort_key(a.payload)

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.sid}>"


# -- generic operations -------------------------------------------------------


def _same(S: SemigroupHandle, *xs: Element) -> None:
    S._own(*xs)


def leq(S: SemigroupHandle, a: Element, b: Element) -> bool:
    return S.leq(a, b)


def add(S: SemigroupHandle, a: Element, b: Element) -> Element:
    return S.add(a, b)


def way_below(S: SemigroupHandle, a: Element, b: Element) -> bool:
    return S.way_below(a, b)


def wedge(S: SemigroupHandle, a: Element, b: Element):
    return S.wedge(a, b)


def _check_prefix(S: SemigroupHandle, d: SequenceDescriptor) -> None:
    _same(S, *d.prefix)
    for x, y in zip(d.prefix, d.prefix[1:]):
        if not S.leq(x, y):
            raise NotIncreasing(f"{S.format(x)} is not below {S.format(y)}")


def _base(S: SemigroupHandle, d: SequenceDescriptor) -> Element:
    return d.prefix[-1] if d.prefix else S.zero()


def sup(S: SemigroupHandle, d: SequenceDescriptor) -> Element:
    """Supremum of a described increasing sequence, in closed form."""
    _check_prefix(S, d)
    base = _base(S, d)
    if isinstance(d.tail, Constant):
        return base
    if isinstance(d.tail, SoftAscent):
        limit = S.element(S._limit(d.tail.limit))
        if not S.way_below(base, limit):
            raise NotIncreasing(f"{S.format(base)} is not way below the limit {S.format(limit)}")
        return limit
    step = d.tail.step
    _same(S, step)
    return S.add(base, S.infinity_of(step))


def terms(S: SemigroupHandle, d: SequenceDescriptor, count: int) -> Iterator[Element]:
    """The first ``count`` terms of the described sequence."""
    _check_prefix(S, d)
    emitted = 0
    for x in d.prefix:
        if emitted == count:
            return
        yield x
        emitted += 1
    base = _base(S, d)
    k = 0
    while emitted < count:
        k += 1
        if isinstance(d.tail, Constant):
            yield base
        elif isinstance(d.tail, SoftAscent):
            limit = S._limit(d.tail.limit)
            t = Element(S.sid, S._canon(S._ascent_term(limit, k)))
            if not S.leq(base, t):
                if k > 4096:
                    raise NotIncreasing("tail never rises above the prefix")
                continue
            yield t
        else:
            yield S.add(base, S.multiple(k, d.tail.step))
        emitted += 1


def approximants(S: SemigroupHandle, a: Element) -> SequenceDescriptor:
    """A ≪-increasing descriptor with supremum ``a``."""
    _same(S, a)
    if S.is_compact(a):
        return SequenceDescriptor((a,), Constant())
    return SequenceDescriptor((), SoftAscent(a))


def way_below_oracle(
    S: SemigroupHandle,
    a: Element,
    b: Element,
    probes: Sequence[SequenceDescriptor] = (),
    horizon: int = 64,
) -> bool:
    """Test a ≪ b against descriptors whose supremum dominates b.

    The approximants of b are always among the probes, which makes the test
    exact up to the horizon: a ≪ b iff a is below some approximant of b.
    """
    probes = [approximants(S, b), *probes]
    for d in probes:
        if not S.leq(b, sup(S, d)):
            continue
        if not any(S.leq(a, t) for t in terms(S, d, horizon)):
            return False
    return True
