from fractions import Fraction as F

import pytest

from culab.catalog import nbar
from culab.concrete import (
    RationalMeasure,
    class_leq,
    direct_sum,
    interval_handle,
    layer_cake_trace,
    lebesgue,
    normalized_trace,
    pl,
    pl_cuntz_leq,
    pl_cutdown,
    pl_dtau,
    pl_integral,
    pl_layer_cake,
    pl_way_below,
    pl_zero,
    rordam_witness,
    spectral,
    spectral_cuntz_leq,
    spectral_cutdown,
    spectral_dtau,
    tent,
    to_cuntz_class,
)
from culab.errors import NotNormalized, NotSubequivalent
from culab.functionals import Functional, Scaling
from culab.order import ExtValue, add


def test_spectral_comparison():
    assert not spectral_cuntz_leq(spectral(1, F(1, 2)), spectral(3, 0))
    assert spectral_cuntz_leq(spectral(0, 0), spectral(1))
    a, b = spectral(1, 0), spectral(F(1, 7), 0)
    assert spectral_cuntz_leq(a, b) and spectral_cuntz_leq(b, a)


def test_spectral_cutdown():
    assert spectral_cutdown(spectral(1, F(1, 2), 0), F(1, 2)) == spectral(F(1, 2), 0, 0)
    assert spectral_cutdown(spectral(1, F(1, 2)), 2).rank == 0
    cut = spectral_cutdown(spectral(1, F(1, 2)), F(1, 4) + F(1, 100))
    assert spectral_cuntz_leq(cut, spectral(F(3, 4), F(1, 4)))


def test_spectral_dtau():
    assert spectral_dtau(spectral(F(1, 2), F(1, 3), 0)) == F(2, 3)
    assert spectral_dtau(spectral(0)) == 0
    assert spectral_dtau(spectral(1, 1, 0, 0)) == F(1, 2)


def test_layer_cake_trace():
    N = nbar()
    a = spectral(F(1, 2), F(1, 3), 0)
    lam = Functional(N, Scaling(ExtValue(F(1, 3))))
    assert layer_cake_trace(a, lam) == F(5, 18) == normalized_trace(a)
    p = spectral(1, 1, 0, 0, 0)
    assert layer_cake_trace(p, Functional(N, Scaling(ExtValue(F(1, 5))))) == F(2, 5)
    assert layer_cake_trace(spectral(0, 0), Functional(N, Scaling(ExtValue(F(1, 2))))) == 0
    with pytest.raises(NotNormalized):
        layer_cake_trace(a, Functional(N, Scaling(ExtValue(1))))


def test_orthogonal_sum_adds_classes():
    a, b = spectral(1, F(1, 2)), spectral(0, F(1, 3), 0)
    N = nbar()
    assert to_cuntz_class(direct_sum(a, b)) == add(N, to_cuntz_class(a), to_cuntz_class(b))


def test_pl_comparison():
    f, g = tent(0, F(1, 2)), tent(0, F(3, 4))
    assert pl_cuntz_leq(f, g)
    assert not pl_way_below(f, g)
    assert pl_way_below(tent(F(1, 8), F(1, 2)), g)
    assert pl_cuntz_leq(pl_zero(), g)


def test_pl_dtau():
    assert pl_dtau(tent(F(1, 4), F(1, 2)), lebesgue()) == F(1, 4)
    atom = RationalMeasure(0, ((F(1, 2), 1),))
    assert pl_dtau(tent(F(1, 4), F(3, 4)), atom) == 1
    assert pl_dtau(pl_zero(), lebesgue()) == 0
    assert pl_layer_cake(pl_zero(), lebesgue()) == 0


def test_layer_cake_equals_integral():
    f = pl([(0, 0), (F(1, 3), 2), (F(1, 2), F(1, 2)), (1, 1)])
    mu = RationalMeasure(F(1, 2), ((F(1, 3), F(1, 4)), (F(3, 4), 1)))
    assert pl_layer_cake(f, mu) == pl_integral(f, mu)
    assert pl_layer_cake(tent(0, 1), lebesgue()) == F(1, 2)


def test_cutdown_is_below():
    f = pl([(0, 0), (F(1, 3), 2), (F(1, 2), F(1, 2)), (1, 1)])
    for eps in (F(1, 4), F(1, 2), F(3, 2), 3):
        assert pl_cuntz_leq(pl_cutdown(f, eps), f)


def test_rordam_witness():
    h = tent(0, 1)
    assert rordam_witness(h, h, F(1, 2)) == F(1, 4)
    assert rordam_witness(h, h, 2) == 1
    with pytest.raises(NotSubequivalent):
        rordam_witness(tent(0, F(3, 4)), tent(0, F(1, 2)), F(1, 4))


def test_to_cuntz_class():
    N = nbar()
    assert to_cuntz_class(spectral(1, F(1, 2), 0)) == N.n(2)
    L = interval_handle()
    assert to_cuntz_class(tent(F(1, 4), F(1, 2))) == L.indicator(F(1, 4), F(1, 2))
    assert to_cuntz_class(pl_zero()) == L.constant(L.target.n(0))
    assert class_leq(tent(0, F(1, 2)), tent(0, F(3, 4)))
