"""Positive elements of matrix algebras (by spectra) and of C[0,1] (piecewise linear).

Cuntz comparison is rank comparison for spectra and open-support containment
for functions; everything here is exact rational arithmetic.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .catalog import LscInterval, nbar
from .errors import BadDescriptor, NotNormalized, NotSubequivalent
from .order import ZERO, Compact, Element, ExtValue

# -- matrices -----------------------------------------------------------------


@dataclass(frozen=True)
class SpectralElement:
    """A positive n×n matrix up to unitary equivalence, by its eigenvalues."""

    dim: int
    eigenvalues: tuple

    def __post_init__(self):
        eig = tuple(sorted((Fraction(v) for v in self.eigenvalues), reverse=True))
        if self.dim < 1 or len(eig) != self.dim:
            raise BadDescriptor(f"need exactly {self.dim} eigenvalues")
        if any(v < 0 for v in eig):
            raise BadDescriptor("eigenvalues of a positive element are nonnegative")
        object.__setattr__(self, "eigenvalues", eig)

    @property
    def rank(self) -> int:
        return sum(1 for v in self.eigenvalues if v > 0)

    @property
    def trace(self) -> Fraction:
        return sum(self.eigenvalues, Fraction(0))

    def __str__(self) -> str:
        return "{" + ", ".join(str(v) for v in self.eigenvalues) + "}"


def spectral(*eigenvalues) -> SpectralElement:
    return SpectralElement(len(eigenvalues), eigenvalues)


def direct_sum(a: SpectralElement, b: SpectralElement) -> SpectralElement:
    """a ⊕ b in orthogonal blocks."""
    return SpectralElement(a.dim + b.dim, a.eigenvalues + b.eigenvalues)


def spectral_cuntz_leq(a: SpectralElement, b: SpectralElement) -> bool:
    return a.rank <= b.rank


def spectral_cutdown(a: SpectralElement, eps) -> SpectralElement:
    """(a − ε)₊."""
    eps = Fraction(eps)
    if eps <= 0:
        raise BadDescriptor("ε must be positive")
    return SpectralElement(a.dim, tuple(max(v - eps, Fraction(0)) for v in a.eigenvalues))


def diagonal_distance(a: SpectralElement, b: SpectralElement) -> Fraction:
    """‖a − b‖ for simultaneously diagonal elements listed in decreasing order."""
    if a.dim != b.dim:
        raise BadDescriptor("dimensions differ")
    return max(abs(x - y) for x, y in zip(a.eigenvalues, b.eigenvalues))


def spectral_dtau(a: SpectralElement) -> Fraction:
    """d_τ for the normalized trace: rank / dim."""
    return Fraction(a.rank, a.dim)


def _is_normalized_scaling(lam, dim: int) -> bool:
    from .functionals import Scaling

    return (
        getattr(lam, "S", None) is not None
        and getattr(lam.S, "kind", None) == "nbar"
        and isinstance(lam.form, Scaling)
        and lam.form.t == ExtValue(Fraction(1, dim))
    )


def layer_cake_trace(a: SpectralElement, lam) -> Fraction:
    """∫₀^∞ λ([(a − t)₊]) dt for λ = Scaling(1/dim) on N̄.

    The integrand is constant between consecutive eigenvalues, so the
    midpoint of each gap gives its exact value there.
    """
    from .functionals import evaluate

    if not _is_normalized_scaling(lam, a.dim):
        raise NotNormalized(f"expected the scaling by 1/{a.dim} on N̄")
    N = lam.S
    levels = sorted({Fraction(0), *a.eigenvalues})
    total = Fraction(0)
    for lo, hi in zip(levels, levels[1:]):
        mid = (lo + hi) / 2
        r = sum(1 for v in a.eigenvalues if v > mid)
        total += (hi - lo) * evaluate(lam, N.n(r)).fraction
    return total


def normalized_trace(a: SpectralElement) -> Fraction:
    return a.trace / a.dim


# -- C[0,1] -----------------------------------------------------------------------


@dataclass(frozen=True)
class PLFunction:
    """Continuous piecewise-linear f ≥ 0 on [0,1], by breakpoint values."""

    breakpoints: tuple
    values: tuple

    def __post_init__(self):
        B = tuple(Fraction(b) for b in self.breakpoints)
        V = tuple(Fraction(v) for v in self.values)
        if len(B) < 2 or len(B) != len(V):
            raise BadDescriptor("need matching breakpoint and value lists of length ≥ 2")
        if B[0] != 0 or B[-1] != 1 or any(x >= y for x, y in zip(B, B[1:])):
            raise BadDescriptor("breakpoints must increase from 0 to 1")
        if any(v < 0 for v in V):
            raise BadDescriptor("values must be nonnegative")
        object.__setattr__(self, "breakpoints", B)
        object.__setattr__(self, "values", V)

    def __call__(self, x) -> Fraction:
        x = Fraction(x)
        B, V = self.breakpoints, self.values
        if not 0 <= x <= 1:
            raise BadDescriptor(f"{x} is outside [0,1]")
        for i in range(len(B) - 1):
            if B[i] <= x <= B[i + 1]:
                return V[i] + (V[i + 1] - V[i]) * (x - B[i]) / (B[i + 1] - B[i])
        return V[-1]

    @property
    def maximum(self) -> Fraction:
        return max(self.values)

    def __str__(self) -> str:
        return "pl(" + ", ".join(f"{b}:{v}" for b, v in zip(self.breakpoints, self.values)) + ")"


def pl(points: Sequence) -> PLFunction:
    """From (x, f(x)) pairs."""
    return PLFunction(tuple(p[0] for p in points), tuple(p[1] for p in points))


def tent(a, b, height=1) -> PLFunction:
    """Zero outside (a,b), peak ``height`` at the midpoint."""
    a, b = Fraction(a), Fraction(b)
    mid = (a + b) / 2
    pts = {Fraction(0): Fraction(0), a: Fraction(0), mid: Fraction(height), b: Fraction(0), Fraction(1): Fraction(0)}
    return pl(sorted(pts.items()))


def pl_zero() -> PLFunction:
    return PLFunction((0, 1), (0, 0))


def _common(fs: Sequence[PLFunction], extra=()) -> list[Fraction]:
    return sorted({b for f in fs for b in f.breakpoints} | set(extra))


def _cells(f: PLFunction, B: Sequence[Fraction]) -> tuple[list[bool], list[bool]]:
    """Positivity of f at each point of B and on each open gap between them."""
    vals = [f(x) for x in B]
    points = [v > 0 for v in vals]
    gaps = [vals[i] > 0 or vals[i + 1] > 0 for i in range(len(B) - 1)]
    return points, gaps


def open_support(f: PLFunction) -> list[tuple]:
    """supp_o(f) as disjoint intervals (a, b, a_included, b_included)."""
    B = list(f.breakpoints)
    points, gaps = _cells(f, B)
    out = []
    start = None
    for i, x in enumerate(B):
        if points[i]:
            if start is None:
                start = (x, True)
        if i < len(gaps):
            if gaps[i] and start is None:
                start = (x, False)
            if not gaps[i] and start is not None:
                out.append((start[0], x, start[1], points[i]))
                start = None
    if start is not None:
        out.append((start[0], B[-1], start[1], points[-1]))
    return out


def pl_cuntz_leq(f: PLFunction, g: PLFunction) -> bool:
    """supp_o(f) ⊆ supp_o(g)."""
    B = _common([f, g])
    fp, fg = _cells(f, B)
    gp, gg = _cells(g, B)
    return all(not a or b for a, b in zip(fp + fg, gp + gg))


def pl_way_below(f: PLFunction, g: PLFunction) -> bool:
    """The closure of supp_o(f) lies in supp_o(g)."""
    B = _common([f, g])
    fp, fg = _cells(f, B)
    gp, gg = _cells(g, B)
    closure = list(fp)
    for i, pos in enumerate(fg):
        if pos:
            closure[i] = closure[i + 1] = True
    return all(not a or b for a, b in zip(closure + fg, gp + gg))


def pl_cutdown(f: PLFunction, eps) -> PLFunction:
    """(f − ε)₊, with breakpoints added where f crosses ε."""
    eps = Fraction(eps)
    if eps <= 0:
        raise BadDescriptor("ε must be positive")
    B, V = f.breakpoints, f.values
    pts = []
    for i in range(len(B)):
        pts.append((B[i], max(V[i] - eps, Fraction(0))))
        if i + 1 < len(B) and (V[i] - eps) * (V[i + 1] - eps) < 0:
            x = B[i] + (eps - V[i]) * (B[i + 1] - B[i]) / (V[i + 1] - V[i])
            pts.append((x, Fraction(0)))
    return pl(pts)


def pl_sup_distance(f: PLFunction, g: PLFunction) -> Fraction:
    return max(abs(f(x) - g(x)) for x in _common([f, g]))


@dataclass(frozen=True)
class RationalMeasure:
    """c·Lebesgue + Σ w_i δ_{p_i} on [0,1]."""

    lebesgue_weight: Fraction = Fraction(0)
    atoms: tuple = ()

    def __post_init__(self):
        w = Fraction(self.lebesgue_weight)
        atoms = tuple((Fraction(p), Fraction(m)) for p, m in self.atoms)
        if w < 0 or any(m < 0 for _, m in atoms) or any(not 0 <= p <= 1 for p, _ in atoms):
            raise BadDescriptor("weights are nonnegative and atoms lie in [0,1]")
        object.__setattr__(self, "lebesgue_weight", w)
        object.__setattr__(self, "atoms", atoms)

    @property
    def mass(self) -> Fraction:
        return self.lebesgue_weight + sum((m for _, m in self.atoms), Fraction(0))

    @property
    def is_probability(self) -> bool:
        return self.mass == 1


def lebesgue() -> RationalMeasure:
    return RationalMeasure(Fraction(1))


def _measure_of_superlevel(f: PLFunction, mu: RationalMeasure, t: Fraction) -> Fraction:
    """μ{x : f(x) > t}."""
    length = Fraction(0)
    B, V = f.breakpoints, f.values
    for i in range(len(B) - 1):
        h = B[i + 1] - B[i]
        lo, hi = sorted((V[i], V[i + 1]))
        if t < lo:
            length += h
        elif t < hi:
            length += h * (hi - t) / (hi - lo)
    return mu.lebesgue_weight * length + sum((m for p, m in mu.atoms if f(p) > t), Fraction(0))


def pl_dtau(f: PLFunction, mu: RationalMeasure) -> Fraction:
    """μ(supp_o f)."""
    length = sum((b - a for a, b, _, _ in open_support(f)), Fraction(0))
    return mu.lebesgue_weight * length + sum((m for p, m in mu.atoms if f(p) > 0), Fraction(0))


def pl_layer_cake(f: PLFunction, mu: RationalMeasure) -> Fraction:
    """∫₀^∞ μ{f > t} dt.

    Between consecutive breakpoint and atom values t ↦ μ{f > t} is affine,
    so the midpoint rule is exact on each gap.
    """
    levels = sorted({Fraction(0), *f.values, *(f(p) for p, _ in mu.atoms)})
    total = Fraction(0)
    for lo, hi in zip(levels, levels[1:]):
        total += (hi - lo) * _measure_of_superlevel(f, mu, (lo + hi) / 2)
    return total


def pl_integral(f: PLFunction, mu: RationalMeasure) -> Fraction:
    """∫ f dμ directly: trapezoids for the Lebesgue part, point values for atoms."""
    B, V = f.breakpoints, f.values
    area = sum(((B[i + 1] - B[i]) * (V[i] + V[i + 1]) / 2 for i in range(len(B) - 1)), Fraction(0))
    return mu.lebesgue_weight * area + sum((m * f(p) for p, m in mu.atoms), Fraction(0))


def _superlevel_set(f: PLFunction, eps: Fraction) -> list[tuple[Fraction, Fraction]]:
    """{f ≥ ε} as closed intervals (possibly degenerate), one per linear piece."""
    B, V = f.breakpoints, f.values
    out = []
    for i in range(len(B) - 1):
        x0, x1, v0, v1 = B[i], B[i + 1], V[i], V[i + 1]
        if v0 >= eps and v1 >= eps:
            out.append((x0, x1))
        elif v0 >= eps or v1 >= eps:
            cross = x0 + (eps - v0) * (x1 - x0) / (v1 - v0)
            out.append((x0, cross) if v0 >= eps else (cross, x1))
    return out


def rordam_witness(f: PLFunction, g: PLFunction, eps) -> Fraction:
    """A δ > 0 with (f − ε)₊ ≼ (g − δ)₊: half the minimum of g on {f ≥ ε}."""
    eps = Fraction(eps)
    if eps <= 0:
        raise BadDescriptor("ε must be positive")
    if not pl_cuntz_leq(f, g):
        raise NotSubequivalent("f is not Cuntz below g")
    if eps >= f.maximum:
        return Fraction(1)
    K = _superlevel_set(f, eps)
    candidates = []
    for a, b in K:
        candidates += [a, b] + [x for x in g.breakpoints if a < x < b]
    return min(g(x) for x in candidates) / 2


# -- classes ------------------------------------------------------------------------

_NBAR = nbar()
_LSC = LscInterval(_NBAR)


def interval_handle() -> LscInterval:
    """Lsc step functions [0,1] → N̄, the target of classes of PL functions."""
    return _LSC


def to_cuntz_class(x) -> Element:
    """Rank in N̄ for spectra; the indicator of the open support for PL functions."""
    if isinstance(x, SpectralElement):
        return _NBAR.n(x.rank)
    if isinstance(x, PLFunction):
        B = list(x.breakpoints)
        points, gaps = _cells(x, B)
        one, zero = Compact(ExtValue(1)), Compact(ZERO)
        return _LSC.step(B, [one if p else zero for p in points], [one if g else zero for g in gaps])
    raise BadDescriptor(f"no Cuntz class for {x!r}")


def class_leq(x, y) -> bool:
    a, b = to_cuntz_class(x), to_cuntz_class(y)
    S = _NBAR if isinstance(x, SpectralElement) else _LSC
    return S.leq(a, b)
