from fractions import Fraction as F

import pytest

from culab.catalog import dimension_drop, nbar, softened, zero_table
from culab.constructions import (
    Ideal,
    MorphismDescriptor,
    RationalCarrier,
    TauOfCu,
    WSemigroupDescriptor,
    c_U_ideal,
    check_auxiliary,
    check_ideal,
    check_ultrafilter,
    cu_product,
    direct_limit,
    gamma_completion,
    grothendieck_interpolation,
    ideal_generated,
    infinity_of,
    integration_morphism,
    principal_ultrafilter,
    quotient,
    rational_w_semigroup,
    scale_morphism,
    seq_product_nbar,
    tau_completion,
    ultraproduct,
    verify_isomorphism,
    whole_ideal,
    zero_ideal,
)
from culab.errors import MorphismMismatch, NotAuxiliary, NotIdeal, NotUltrafilter
from culab.order import add, leq, way_below


def test_infinity_of_examples():
    S = softened(1)
    assert infinity_of(S, S.c(1)) == S.s("inf")
    assert infinity_of(S, S.c(0)) == S.c(0)
    P = cu_product(nbar(), nbar())
    assert P.format(infinity_of(P, P.tuple(1, 0))) == "(inf, 0)"


def test_ideal_generated_examples():
    P = cu_product(nbar(), nbar())
    I = ideal_generated(P, P.tuple(1, 0))
    assert I.member(P.tuple(5, 0)) and I.member(P.tuple("inf", 0))
    assert not I.member(P.tuple(0, 1))
    Z = ideal_generated(P, P.tuple(0, 0))
    assert [x for x in P.sample(2) if Z.member(x)] == [P.tuple(0, 0)]
    S = softened(1)
    everything = ideal_generated(S, S.s(1))
    assert all(everything.member(x) for x in S.sample(3))


def test_check_ideal_rejects_non_hereditary_set():
    P = cu_product(nbar(), nbar())
    bad = Ideal(P, lambda x: x == P.tuple(1, 0), None, None)
    with pytest.raises(NotIdeal):
        check_ideal(bad, P.sample(1))


def test_quotient_by_coordinate_ideal_is_second_factor():
    N = nbar()
    P = cu_product(N, N)
    Q = quotient(P, ideal_generated(P, P.tuple(1, 0)))
    elems = P.sample(3)
    for a in elems:
        for b in elems:
            assert Q.leq(Q.project(a), Q.project(b)) == N.leq(P.project(1, a), P.project(1, b))


def test_trivial_quotients():
    P = cu_product(nbar(), nbar())
    assert len(quotient(P, whole_ideal(P)).sample(2)) == 1
    Q = quotient(P, zero_ideal(P))
    elems = P.sample(2)
    for a in elems:
        for b in elems:
            assert Q.leq(Q.project(a), Q.project(b)) == P.leq(a, b)


def test_gamma_completion_of_n_is_nbar():
    N = nbar()
    G = gamma_completion(rational_w_semigroup(1))
    assert verify_isomorphism(N, G, lambda a: G.element(a.payload), N.sample(4)) is None


def test_gamma_completion_of_zero():
    assert gamma_completion(WSemigroupDescriptor("zero")).sid == zero_table().sid


def test_gamma_rejects_bad_auxiliary():
    C = RationalCarrier(2)
    with pytest.raises(NotAuxiliary):
        check_auxiliary(WSemigroupDescriptor(C, lambda a, b: True), C.sample(1))


def test_direct_limit_doubling_is_softened_two():
    N = nbar()
    L = direct_limit([N, N], [scale_morphism(N, N, 2)])
    S = softened(2)
    assert verify_isomorphism(S, L, lambda a: L.element(a.payload), S.sample(3)) is None
    assert L.embed(1, N.n(1)) == L.c(F(1, 2))


def test_direct_limit_identity_chain():
    N = nbar()
    L = direct_limit([N, N, N], [MorphismDescriptor("identity", N, N, None)] * 2)
    assert verify_isomorphism(N, L, lambda a: L.element(a.payload), N.sample(3)) is None


def test_direct_limit_integration_is_cu_of_z():
    D = dimension_drop()
    L = direct_limit([D], [integration_morphism(D)])
    S = softened(1)
    elems = [L.from_softened(x) for x in S.sample(3)]
    assert verify_isomorphism(L, S, L.to_softened, elems) is None


def test_direct_limit_mismatch():
    N = nbar()
    with pytest.raises(MorphismMismatch):
        direct_limit([N, softened(1)], [scale_morphism(N, N, 2)])


def test_tau_interval():
    T = tau_completion("P1")
    assert way_below(T, T.c(F(1, 2)), T.c(F(1, 2)))
    assert not way_below(T, T.s(1), T.s(1))
    assert leq(T, T.s(1), T.c(1))


def test_tau_of_catalog_and_zero():
    S = softened(1)
    T = tau_completion(S)
    assert isinstance(T, TauOfCu)
    assert verify_isomorphism(S, T, lambda a: T.element(a.payload), S.sample(2)) is None
    assert tau_completion("zero").sid == zero_table().sid


def test_products():
    assert len(cu_product().sample()) == 1
    S, N = softened(1), nbar()
    P = cu_product(S, N)
    assert leq(P, P.tuple(S.s(1), 2), P.tuple(S.c(1), 2))
    assert not leq(P, P.tuple(S.c(1), 2), P.tuple(S.s(1), 2))


def test_sequence_product():
    Q = seq_product_nbar()
    g, ones = Q.identity_sequence(), Q.ones()
    assert not any(leq(Q, g, Q.seq(b=n)) for n in range(65))
    assert leq(Q, ones, add(Q, g, ones))
    assert not Q.in_scale(g)
    assert Q.in_scale(ones)


def test_ultraproducts():
    N, S = nbar(), softened(1)
    U = ultraproduct([N, S], principal_ultrafilter(2, 1))
    assert U.index == 1
    assert U.to_factor(U.from_factor(S.s(1))) == S.s(1)
    assert c_U_ideal(U.product, 1).member(U.product.tuple(N.n(3), S.c(0)))
    single = ultraproduct([N], principal_ultrafilter(1, 0))
    assert single.to_factor(single.from_factor(N.n(4))) == N.n(4)


def test_ultrafilter_validation():
    assert check_ultrafilter(3, principal_ultrafilter(3, 2)) == 2
    with pytest.raises(NotUltrafilter):
        check_ultrafilter(2, [frozenset({0})])


def test_grothendieck_groups():
    G, rep = grothendieck_interpolation(("rational", 2))
    assert rep.verdict == "pass"
    G, rep = grothendieck_interpolation("N")
    assert rep.verdict == "pass"
