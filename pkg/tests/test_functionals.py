from fractions import Fraction as F

import pytest

from culab.catalog import make_lsc, make_zstable_model, nbar, softened
from culab.constructions import cu_product, ideal_generated, whole_ideal, zero_ideal
from culab.errors import MixedSemigroup, NotRealizable, UnknownFunctionalSpace
from culab.functionals import (
    AdditiveMap,
    Functional,
    InfinityOnNonzero,
    Scaling,
    VertexWeights,
    Zero,
    alpha,
    check_functional,
    detect_elementary,
    evaluate,
    extend_from_ideal,
    functional_space,
    rank_of,
    regularize,
)
from culab.order import INF, ExtValue, Soft


def test_unique_normalized_functional_on_cu_of_z():
    S = softened(1)
    fam = functional_space(S, normalized_at=S.c(1))
    assert len(fam.generators) == 1
    lam = fam.generators[0]
    assert evaluate(lam, S.c(3)) == ExtValue(3)
    assert evaluate(lam, S.s(F(1, 2))) == ExtValue(F(1, 2))


def test_nbar_functionals_are_scalings():
    N = nbar()
    descs = [lam.describe() for lam in functional_space(N).generators]
    assert descs == ["scaling(1)", "infinity-on-nonzero"]


def test_infinity_on_nonzero_is_a_functional():
    S = softened(2)
    lam = Functional(S, InfinityOnNonzero())
    check_functional(lam, S.sample(2))
    assert evaluate(lam, S.s(F(1, 3))) == INF
    assert evaluate(lam, S.c(0)) == ExtValue(0)


def test_evaluate_examples():
    S = softened(1)
    assert evaluate(Functional(S, Scaling(ExtValue(1))), S.s(F(5, 2))) == ExtValue(F(5, 2))
    assert evaluate(Functional(S, Zero()), S.c(3)) == ExtValue(0)
    with pytest.raises(MixedSemigroup):
        evaluate(Functional(S, Zero()), nbar().n(1))


def test_extension_from_ideal():
    N = nbar()
    P = cu_product(N, N)
    first = Functional(P, VertexWeights((ExtValue(1), ExtValue(0))))
    ext = extend_from_ideal(first, ideal_generated(P, P.tuple(1, 0)))
    assert evaluate(ext, P.tuple(0, 1)) == INF
    assert evaluate(ext, P.tuple(3, 0)) == ExtValue(3)
    same = extend_from_ideal(first, whole_ideal(P))
    for x in P.sample(2):
        assert evaluate(same, x) == evaluate(first, x)
    inf = extend_from_ideal(Functional(P, Zero()), zero_ideal(P))
    for x in P.sample(2):
        assert evaluate(inf, x) == evaluate(Functional(P, InfinityOnNonzero()), x)


def test_rank_examples():
    S = softened(1)
    assert str(rank_of(S, S.s(2))) == "t -> 2*t"
    assert rank_of(S, S.c(0))(ExtValue(7)) == ExtValue(0)
    Z = make_zstable_model("N", 2, [[1, 1]])
    assert str(rank_of(Z, Z.compact(1))) == "w -> 1*w1 + 1*w2"


def test_rank_is_additive():
    S = softened(2)
    elems = S.sample(2)
    for a in elems:
        for b in elems:
            assert rank_of(S, S.add(a, b)) == rank_of(S, a) + rank_of(S, b)


def test_alpha_realizes_ranks():
    S = softened(1)
    f = rank_of(S, S.s(2))
    assert alpha(S, f) == S.s(2)
    assert rank_of(S, alpha(S, f)) == f
    assert alpha(S, rank_of(S, S.c(1))) == S.s(1)
    assert rank_of(S, S.s(1)) == rank_of(S, S.c(1))
    assert alpha(S, rank_of(S, S.c(0))) == S.c(0)
    with pytest.raises(NotRealizable):
        alpha(S, "not a rank")


def test_regularize_drops_value_at_infinity():
    N = nbar()
    lt = AdditiveMap(N, lambda a: ExtValue(5) if a == N.top() else ExtValue(0))
    assert evaluate(regularize(lt), N.top()) == ExtValue(0)


def test_regularize_keeps_a_functional():
    N = nbar()
    lt = AdditiveMap(N, lambda a: a.payload.value)
    lam = regularize(lt)
    for x in N.sample(4):
        assert evaluate(lam, x) == x.payload.value


def test_regularize_deflates_soft_values():
    S = softened(1)
    bump = lambda a: a.payload.value + (ExtValue(1) if isinstance(a.payload, Soft) else ExtValue(0))
    lam = regularize(AdditiveMap(S, bump))
    assert lam.describe() == "scaling(1)"
    assert evaluate(lam, S.s(2)) == ExtValue(2)


def test_detect_elementary():
    N = nbar()
    w = detect_elementary(N)
    assert w is not None and w.functional.describe() == "scaling(1)"
    assert detect_elementary(softened(1)) is None
    P = cu_product(N, N)
    w = detect_elementary(P)
    assert w.functional.describe() == "extend(weights(1, 0), <(1, 0)>)"
    assert w.ideal.member(P.tuple(4, 0)) and not w.ideal.member(P.tuple(0, 1))


def test_unknown_functional_space():
    with pytest.raises(UnknownFunctionalSpace):
        functional_space(make_lsc("interval", nbar()))
