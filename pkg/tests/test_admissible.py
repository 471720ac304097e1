from fractions import Fraction
from itertools import product
from math import comb

import pytest

from ospchar.admissible import (
    AdmissibleLevel,
    InvalidLevel,
    Kind,
    WeightSet,
    decomposition_table,
    enumerate_weights,
    satisfies_definition,
    transport_b_to_check,
    verify_bijections,
)
from ospchar.rootdata import Convention, RootType, Weight

H = Fraction(1, 2)


def coords(ws):
    return [tuple(w.coords) for w in ws]


def test_pc_example():
    assert coords(enumerate_weights(WeightSet.P_C, 4, 1, 2)) == [(0, 0), (1, 0), (1, 1)]


@pytest.mark.parametrize("n", [1, 2, 3])
def test_pc_at_dual_coxeter_is_trivial(n):
    assert coords(enumerate_weights(WeightSet.P_C, n + 1, 1, n)) == [(0,) * n]


@pytest.mark.parametrize("n", [1, 2, 3, 4])
@pytest.mark.parametrize("p", [5, 7, 9])
def test_pc_cardinality_is_binomial(n, p):
    if p >= n + 1:
        assert len(enumerate_weights(WeightSet.P_C, p, 1, n)) == comb(p - 1, n)


def test_pbq_and_spinors():
    assert coords(enumerate_weights(WeightSet.P_B_Q, 7, 8, 2)) == [(0, 0), (1, 0), (1, 1)]
    pb = set(coords(enumerate_weights(WeightSet.P_B, 7, 8, 2)))
    assert pb - {(0, 0), (1, 0), (1, 1)} == {(H, H), (3 * H, H), (3 * H, 3 * H)}


def test_check_set_example():
    got = coords(enumerate_weights(WeightSet.P_CHECK, 4, 7, 2))
    assert set(got) == {(0, 0), (1, 1), (2, 0), (2, 2), (3, 1), (3, 3)}


@pytest.mark.parametrize("which,p,q,n", [
    (WeightSet.P_C, 6, 1, 2),
    (WeightSet.P_C, 7, 2, 2),
    (WeightSet.P_C, 7, 3, 3),
    (WeightSet.P_B, 9, 10, 2),
    (WeightSet.P_B_Q, 9, 10, 2),
    (WeightSet.P_B, 5, 7, 2),
    (WeightSet.P_CHECK, 4, 9, 2),
])
def test_enumeration_matches_definition_filter(which, p, q, n):
    # brute force over a box of dominant candidates, integral and half-integral
    b_side = which in (WeightSet.P_B, WeightSet.P_B_Q)
    conv = Convention.B_SIDE if b_side else Convention.C_SIDE
    grid = [Fraction(i, 2) for i in range(0, 2 * max(p, q) + 1)]
    found = set()
    for c in product(grid, repeat=n):
        if list(c) != sorted(c, reverse=True):
            continue
        if len({x.denominator for x in c}) > 1:
            continue
        w = Weight(c, conv)
        if satisfies_definition(which, w, p, q):
            found.add(tuple(w.coords))
    assert found == set(coords(enumerate_weights(which, p, q, n)))


def test_level_classification():
    assert AdmissibleLevel(RootType.C, 2, 4, 7).kind is Kind.PRINCIPAL
    assert AdmissibleLevel(RootType.C, 2, 5, 2).kind is Kind.COPRINCIPAL
    # principal q is odd while h = 2n is even, so only coprincipal levels can be coboundary
    assert AdmissibleLevel(RootType.C, 2, 5, 6).coboundary
    assert not AdmissibleLevel(RootType.C, 2, 4, 7).coboundary
    assert not AdmissibleLevel(RootType.C, 2, 4, 3).nondegenerate


def test_invalid_parameters_rejected():
    with pytest.raises(InvalidLevel):
        enumerate_weights(WeightSet.P_C, 4, 2, 2)  # gcd(p, q) != 1
    with pytest.raises((InvalidLevel, ValueError)):
        enumerate_weights(WeightSet.P_C, 0, 1, 2)


def test_transport_doubles_coordinates():
    t = transport_b_to_check(Weight((3 * H, H), Convention.B_SIDE))
    assert t.coords == (3, 1) and t.convention is Convention.C_SIDE


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_bijections_and_chain(n):
    for p in range(n + 1, 13):
        rep = verify_bijections(n, p)
        assert rep.ok, rep.to_json_obj()


def test_specific_bijections():
    assert coords(enumerate_weights(WeightSet.P_C, 5, 2, 2)) == coords(enumerate_weights(WeightSet.P_B_Q, 4, 5, 2))
    check = set(coords(enumerate_weights(WeightSet.P_CHECK, 5, 7, 3)))
    top = set(coords(enumerate_weights(WeightSet.P_C, 7, 1, 3)))
    assert check <= top


def test_decomposition_table_241():
    t = decomposition_table(2, 4, 1)
    assert t["k"] == "1" and t["ell"] == "-17/7"
    vacuum = [r for r in t["rows"] if r["mu"] == ["0", "0"]]
    assert len(vacuum) == 1 and len(vacuum[0]["summands"]) == len(t["P_C"]) == 3
    assert len(t["P_B_Q"]) == 3
    assert t["mechanism"] == "bijection"
    assert {tuple(r) for r in t["ramond"]} == {("1/2", "1/2"), ("3/2", "1/2"), ("3/2", "3/2")}


def test_decomposition_table_231():
    t = decomposition_table(2, 3, 1)
    assert t["k"] == "0"
    vacuum = [r for r in t["rows"] if r["mu"] == ["0", "0"]][0]
    assert vacuum["summands"] == [[["0", "0"], [["0", "0"], ["0", "0"]]]]


@pytest.mark.parametrize("n,u,v", [(1, 3, 1), (2, 5, 1), (2, 5, 2), (3, 7, 2)])
def test_decomposition_cardinalities(n, u, v):
    t = decomposition_table(n, u, v)
    assert len(t["P_B_Q"]) == len(t["P_C"])


def test_decomposition_general_v_mechanism():
    t = decomposition_table(2, 5, 3)
    assert t["mechanism"] == "fusion-generation"


def test_decomposition_rejects_non_admissible():
    with pytest.raises(InvalidLevel):
        decomposition_table(2, 2, 1)
