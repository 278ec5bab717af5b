from fractions import Fraction as F

import pytest

from culab.catalog import (
    GroupTag,
    adjoin_group,
    bosa_petzka_table,
    chain_space,
    dimension_drop,
    finite_table,
    make_catalog,
    make_finite_table,
    make_zstable_model,
    softened,
)
from culab.errors import BadPairing, BadParam, InvalidElement, InvalidTable
from culab.order import add, leq


def test_catalog_rejects_zero_parameter():
    with pytest.raises(BadParam):
        make_catalog("softened", 0)


def test_noncommutative_table_rejected():
    t = finite_table(["0", "a", "b"],
                     [[0, 1, 2], [1, 2, 2], [2, 1, 2]],
                     lambda i, j: i == j or i == 0)
    with pytest.raises(InvalidTable) as exc:
        make_finite_table(t)
    assert exc.value.axiom == "commutativity"


def test_table_without_positivity_rejected():
    t = finite_table(["0", "a"], [[0, 1], [1, 1]], lambda i, j: i == j or (i, j) == (1, 0))
    with pytest.raises(InvalidTable) as exc:
        make_finite_table(t)
    assert exc.value.axiom == "positivity"


def test_fixture_table_loads():
    T = bosa_petzka_table()
    assert len(T.sample()) == 3


def test_chain_space_opens():
    X = chain_space(3)
    assert len(X.points) == 3
    assert len(X.opens) == 4


def test_dimension_drop_endpoint_constraint():
    D = dimension_drop()
    with pytest.raises(InvalidElement):
        D.constant(D.target.c(F(1, 2)))
    D.constant(D.target.c(1))


def test_adjoin_group_absorbs_into_soft_part():
    S = softened(1)
    G = adjoin_group(S, GroupTag((2,)))
    a = G.pair((1,), S.c(1))
    assert G.add(a, G.lift(S.s(1))) == G.lift(S.s(2))
    assert not G.leq(G.pair((0,), S.c(1)), a)
    assert not G.leq(a, G.pair((0,), S.c(1)))


def test_zstable_examples():
    Z = make_zstable_model("N", 2, [[1, 1]])
    assert add(Z, Z.compact(1), Z.function(F(1, 2), F(3, 2))) == Z.function(F(3, 2), F(5, 2))
    assert leq(Z, Z.compact(1), Z.function(F(3, 2), 2))
    assert leq(Z, Z.function(1, 1), Z.compact(1))
    assert not leq(Z, Z.compact(1), Z.function(1, 2))


def test_zstable_bad_pairing():
    with pytest.raises(BadPairing):
        make_zstable_model("N", 2, [[1, 0]])
