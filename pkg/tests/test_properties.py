from fractions import Fraction as F

from hypothesis import given, settings
from hypothesis import strategies as st

from culab.catalog import make_zstable_model, nbar, softened
from culab.concrete import (
    RationalMeasure,
    interval_handle,
    pl,
    pl_cuntz_leq,
    pl_cutdown,
    pl_integral,
    pl_layer_cake,
    spectral,
    spectral_cuntz_leq,
    to_cuntz_class,
)
from culab.constructions import cu_product, ideal_generated, quotient
from culab.functionals import rank_of
from culab.order import INF, ExtValue, add, approximants, leq, sup, way_below, way_below_oracle

small = st.fractions(min_value=0, max_value=6, max_denominator=8)
positive = st.fractions(min_value=F(1, 8), max_value=6, max_denominator=8)
extvalues = st.one_of(small.map(ExtValue), st.just(INF))

S2 = softened(2)
Z = make_zstable_model("N", 2, [[1, 1]])
N = nbar()


@st.composite
def softened_elements(draw, S=S2):
    q = draw(st.fractions(min_value=0, max_value=6, max_denominator=16))
    m = S.m
    q = F(int(q * m), m)
    if draw(st.booleans()) and q > 0:
        return S.s(q if draw(st.booleans()) else draw(positive))
    return S.c(q)


@st.composite
def nbar_elements(draw):
    return N.n(draw(st.one_of(st.integers(0, 20), st.just("inf"))))


@st.composite
def zstable_elements(draw):
    if draw(st.booleans()):
        return Z.compact(draw(st.integers(0, 5)))
    return Z.function(draw(positive), draw(positive))


def elements_of(S):
    return {S2: softened_elements(), N: nbar_elements(), Z: zstable_elements()}[S]


@given(extvalues, extvalues, extvalues)
def test_extvalue_semiring_laws(x, y, z):
    assert x + y == y + x
    assert (x + y) + z == x + (y + z)
    assert x * y == y * x
    assert x <= x + y
    assert ExtValue(0) * x == ExtValue(0)


def monoid_laws(S, a, b, c):
    assert add(S, a, b) == add(S, b, a)
    assert add(S, add(S, a, b), c) == add(S, a, add(S, b, c))
    if leq(S, a, b):
        assert leq(S, add(S, a, c), add(S, b, c))
    assert leq(S, a, add(S, a, b))


@given(softened_elements(), softened_elements(), softened_elements())
def test_softened_monoid_laws(a, b, c):
    monoid_laws(S2, a, b, c)


@given(nbar_elements(), nbar_elements(), nbar_elements())
def test_nbar_monoid_laws(a, b, c):
    monoid_laws(N, a, b, c)


@given(zstable_elements(), zstable_elements(), zstable_elements())
def test_zstable_monoid_laws(a, b, c):
    monoid_laws(Z, a, b, c)


@given(softened_elements(), softened_elements())
def test_way_below_implies_leq(a, b):
    if way_below(S2, a, b):
        assert leq(S2, a, b)


@settings(max_examples=60)
@given(softened_elements(), softened_elements())
def test_way_below_matches_oracle(a, b):
    assert way_below(S2, a, b) == way_below_oracle(S2, a, b)


@given(softened_elements())
def test_approximants_recover_element(a):
    assert sup(S2, approximants(S2, a)) == a


@given(softened_elements(), softened_elements())
def test_rank_is_additive(a, b):
    assert rank_of(S2, add(S2, a, b)) == rank_of(S2, a) + rank_of(S2, b)


P = cu_product(N, N)
Q = quotient(P, ideal_generated(P, P.tuple(1, 0)))


@given(nbar_elements(), nbar_elements(), nbar_elements(), nbar_elements())
def test_quotient_is_sound(a1, a2, b1, b2):
    a, b = P.tuple(a1, a2), P.tuple(b1, b2)
    if leq(P, a, b):
        assert Q.leq(Q.project(a), Q.project(b))
    assert Q.leq(Q.project(a), Q.project(b)) == leq(N, a2, b2)


@st.composite
def pl_functions(draw):
    n = draw(st.integers(1, 5))
    xs = sorted(set(draw(st.lists(st.fractions(min_value=F(1, 16), max_value=F(15, 16), max_denominator=16),
                                  min_size=n - 1, max_size=n - 1))))
    xs = [F(0)] + xs + [F(1)]
    ys = [draw(st.sampled_from([0, 0, F(1, 3), F(1, 2), 1, 2])) for _ in xs]
    return pl(list(zip(xs, ys)))


@st.composite
def measures(draw):
    atoms = draw(st.lists(st.tuples(st.fractions(min_value=0, max_value=1, max_denominator=8),
                                    st.fractions(min_value=F(1, 8), max_value=2, max_denominator=8)),
                          max_size=3, unique_by=lambda t: t[0]))
    return RationalMeasure(draw(st.fractions(min_value=0, max_value=2, max_denominator=4)), tuple(atoms))


@settings(max_examples=60)
@given(pl_functions(), measures())
def test_layer_cake_equals_integral(f, mu):
    assert pl_layer_cake(f, mu) == pl_integral(f, mu)


@given(pl_functions(), positive)
def test_cutdown_is_below(f, eps):
    assert pl_cuntz_leq(pl_cutdown(f, eps), f)


@given(pl_functions(), pl_functions())
def test_pl_classes_reflect_order(f, g):
    assert pl_cuntz_leq(f, g) == leq(interval_handle(), to_cuntz_class(f), to_cuntz_class(g))


eigen = st.lists(st.fractions(min_value=0, max_value=3, max_denominator=6), min_size=1, max_size=5)


@given(eigen, eigen)
def test_spectral_classes_reflect_order(x, y):
    a, b = spectral(*x), spectral(*y)
    assert spectral_cuntz_leq(a, b) == leq(N, to_cuntz_class(a), to_cuntz_class(b))
