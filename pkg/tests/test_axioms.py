import pytest

from culab.axioms import (
    check_almost_unperforation,
    check_axiom,
    check_strict_comparison,
    default_fragment,
    fragment,
    glued_o6plus_witness,
    glued_three_point,
    is_simple,
    replay,
    sample_fragment,
    simplicity_witness,
)
from culab.catalog import bosa_petzka_table, gap_fragment, nbar, softened, zero_infinity_table, zero_table
from culab.constructions import cu_product
from culab.errors import EmptyFragment
from culab.functionals import Functional, Scaling, evaluate, functional_space
from culab.order import ExtValue


def test_weak_cancellation_fails_on_zero_infinity():
    T = zero_infinity_table()
    frag = sample_fragment(T)
    r = check_axiom(T, "WC", frag)
    assert r.verdict == "fail"
    inf, zero = T.named("inf"), T.named("0")
    assert r.witness == (inf, zero, inf)
    assert replay(T, r, frag)


def test_o5_on_softened():
    S = softened(2)
    assert check_axiom(S, "O5", default_fragment(S)).verdict == "pass"


def test_glued_semigroup_fails_o6plus():
    G, frag = glued_three_point()
    r = check_axiom(G, "O6plus", frag)
    assert r.verdict == "fail"
    expected = glued_o6plus_witness()[1]
    assert r.witness[:3] == expected[:3]
    assert replay(G, r, frag)


def test_almost_unperforation_on_nbar_and_softened():
    N = nbar()
    assert check_almost_unperforation(N, sample_fragment(N)).verdict == "pass"
    S = softened(2)
    assert check_almost_unperforation(S, sample_fragment(S, 2), n_max=4).verdict == "pass"


def test_gap_fragment_is_perforated():
    G = gap_fragment()
    frag = fragment(G, [G.pair(1, 1), G.pair(2, 0)], 3, include_zero=False)
    r = check_almost_unperforation(G, frag, 12)
    assert r.verdict == "fail"
    assert r.witness == (3, G.pair(1, 1), G.pair(2, 0))
    assert replay(G, r, frag)


def test_strict_comparison_examples():
    S = softened(1)
    lam = Functional(S, Scaling(ExtValue(1)))
    assert evaluate(lam, S.s(1)) < evaluate(lam, S.c(2))
    frag = fragment(S, [S.s(1), S.c(2)], 1)
    assert check_strict_comparison(S, frag, [lam]).verdict == "pass"
    Z = zero_table()
    lams = functional_space(Z).generators
    assert check_strict_comparison(Z, sample_fragment(Z), lams).verdict == "pass"


def test_strict_comparison_fails_on_gap():
    G = gap_fragment()
    frag = fragment(G, [G.pair(1, 1), G.pair(2, 0)], 3, include_zero=False)
    rank = Functional(G, Scaling(ExtValue(1)))
    assert check_strict_comparison(G, frag, [rank]).verdict == "fail"


def test_simplicity():
    S = softened(1)
    assert is_simple(S, default_fragment(S))
    P = cu_product(nbar(), nbar())
    assert not is_simple(P, sample_fragment(P))
    a, b = simplicity_witness(P, sample_fragment(P))
    assert {P.format(a), P.format(b)} == {"(1, 0)", "(0, 1)"}
    T = bosa_petzka_table()
    assert is_simple(T, sample_fragment(T))


def test_empty_fragment_rejected():
    S = softened(1)
    with pytest.raises(EmptyFragment):
        check_axiom(S, "O5", [])
