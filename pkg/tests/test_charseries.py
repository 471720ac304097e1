import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _oracles import pbw_rank1, rank1_depth, weyl_character_c
from ospchar import _dense, charseries
from ospchar.charseries import (
    AlgebraType,
    FormalCharacter,
    QSeries,
    apply_factors,
    colored_partitions,
    denominator,
    denominator_factors,
    denominator_inverse,
    eta_inverse,
    expand_factors,
    principal_depth,
    theta_sum,
    verify_triple_product,
    verify_triple_product_univariate,
    verma_character,
    weyl_module_character,
)
from ospchar.rootdata import Convention, RootType, Weight, dominant_weights_in_box, weyl_dimension


# -- oracles -----------------------------------------------------------------


@pytest.mark.parametrize("atype", [AlgebraType.SP, AlgebraType.OSP])
@pytest.mark.parametrize("lam", [0, 1, 2, -3])
def test_verma_matches_pbw_counting(atype, lam):
    depth = 20
    ref = pbw_rank1(lam, atype is AlgebraType.OSP, 4, depth)
    ch = verma_character(atype, Weight((lam,)), 4, depth=depth)
    got = {k: v for k, v in ch.terms.items() if rank1_depth(k[0][0] - lam, k[1]) <= depth}
    assert got == dict(ref)


@pytest.mark.parametrize("lam", [(0, 0), (1, 0), (1, 1), (2, 1), (3, 0)])
def test_sp_weyl_module_grade_zero_is_finite_character(lam):
    ch = weyl_module_character(AlgebraType.SP, Weight(lam), 1)
    assert ch.grade_slice(0) == dict(weyl_character_c(lam, 2))


@pytest.mark.parametrize("n,bound", [(1, 4), (2, 2), (3, 1)])
def test_osp_grade_zero_dimension_equals_odd_orthogonal(n, bound):
    # finite osp(1|2n) modules have the dimensions of so_2n+1 modules with equal labels
    for mu in dominant_weights_in_box(n, bound):
        ch = weyl_module_character(AlgebraType.OSP, Weight(mu), 0)
        assert sum(ch.grade_slice(0).values()) == weyl_dimension(RootType.B, Weight(mu, Convention.B_SIDE))


@pytest.mark.parametrize("atype", [AlgebraType.SP, AlgebraType.OSP])
@pytest.mark.parametrize("mu", [(0, 0), (1, 0), (1, 1)])
def test_weyl_module_coefficients_nonnegative(atype, mu):
    ch = weyl_module_character(atype, Weight(mu), 4)
    assert ch.is_nonnegative()
    assert ch.coefficient(mu, 0) == 1


def test_sp2_vacuum_grade_one():
    # level-generic vacuum module: grade 1 is the adjoint, weights 2, 0, -2
    ch = weyl_module_character(AlgebraType.SP, Weight((0,)), 2)
    assert ch.grade_slice(1) == {(2,): 1, (0,): 1, (-2,): 1}


# -- engines -----------------------------------------------------------------


@pytest.mark.parametrize("invert", [True, False])
@pytest.mark.parametrize("atype", [AlgebraType.SP, AlgebraType.OSP])
@pytest.mark.parametrize("n,trunc", [(1, 4), (2, 2)])
def test_dense_and_sparse_engines_agree(atype, n, trunc, invert):
    depth = charseries.default_depth(n, trunc)
    one = FormalCharacter(n, {((0,) * n, 0): 1}, 0, trunc, depth)
    sparse = apply_factors(one, denominator_factors(atype, n, trunc), invert=invert)
    dense = expand_factors(n, trunc, depth, [(f, invert) for f in denominator_factors(atype, n, trunc)])
    assert sparse == dense


def test_overflow_falls_back_to_exact_engine(monkeypatch):
    n, trunc = 1, 3
    depth = charseries.default_depth(n, trunc)
    factors = [(f, True) for f in denominator_factors(AlgebraType.OSP, n, trunc)]
    expected = expand_factors(n, trunc, depth, factors)

    def boom(*args, **kwargs):
        raise _dense.Overflow("forced")

    monkeypatch.setattr(_dense, "cone_product", boom)
    assert expand_factors(n, trunc, depth, factors) == expected


def test_cone_box_covers_generators():
    for n in (1, 2, 3):
        box = _dense.cone_box(n, 2, 12)
        for f in denominator_factors(AlgebraType.OSP, n, 2):
            if principal_depth(f.coords, f.grade) <= 12:
                assert all(lo <= c <= hi for c, (lo, hi) in zip(f.coords, box))


@pytest.mark.parametrize("atype", [AlgebraType.SP, AlgebraType.OSP])
@pytest.mark.parametrize("n", [1, 2])
def test_denominator_times_inverse_is_one(atype, n):
    trunc, depth = 3, 16
    prod = denominator(atype, n, trunc, depth) * denominator_inverse(atype, n, trunc, depth)
    assert prod.terms == {((0,) * n, 0): 1}


def test_every_factor_has_positive_depth():
    for n in (1, 2, 3):
        for f in denominator_factors(AlgebraType.OSP, n, 3):
            assert principal_depth(f.coords, f.grade) > 0


def test_binomial_round_trip():
    s = FormalCharacter(2, {((1, 0), 0): 3, ((0, -1), 1): -2}, 0, 4, 30)
    back = s.mul_binomial((0, -1), 0, -1).div_binomial((0, -1), 0)
    assert back.terms == s.terms


# -- ring laws ---------------------------------------------------------------


def _series(n):
    term = st.tuples(st.tuples(*[st.integers(-3, 3)] * n), st.integers(0, 6))
    return st.dictionaries(term, st.integers(-5, 5), max_size=6).map(lambda t: FormalCharacter(n, t, 0, 6, None))


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_ring_laws(data):
    n = data.draw(st.integers(1, 2))
    a, b, c = (data.draw(_series(n)) for _ in range(3))
    assert a + b == b + a
    assert (a + b) + c == a + (b + c)
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert (a - a).terms == {}


@settings(max_examples=30, deadline=None)
@given(st.data())
def test_json_round_trip(data):
    n = data.draw(st.integers(1, 2))
    s = data.draw(_series(n)).with_offset(Fraction(data.draw(st.integers(-9, 9)), 7))
    assert FormalCharacter.from_json(s.to_json()) == s
    assert isinstance(json.loads(s.to_json())["q_offset"], str)


def test_coefficient_beyond_truncation_raises():
    s = FormalCharacter(1, {((0,), 0): 1}, 0, 2, None)
    with pytest.raises(ValueError):
        s.coefficient((0,), 3)


# -- theta and the triple product --------------------------------------------


def test_theta_rank_one_low_terms():
    # exponents m(m+1)/2 vanish at m = 0, -1 and equal 1 at m = 1, -2
    th = theta_sum(1, 1)
    assert th.terms == {((0,), 0): 1, ((-1,), 0): 1, ((1,), 1): 1, ((-2,), 1): 1}


def test_theta_rank_two_counts():
    th = theta_sum(2, 3)
    # number of pairs with m1(m1+1)/2 + m2(m2+1)/2 <= 3
    tri = [0, 0, 1, 1, 3, 3]
    expected = sum(1 for a in tri for b in tri if a + b <= 3)
    assert len(th) == expected


@pytest.mark.parametrize("n,trunc", [(1, 8), (2, 5), (3, 2)])
def test_triple_product_small(n, trunc):
    assert verify_triple_product(n, trunc).ok


def test_triple_product_univariate():
    assert verify_triple_product_univariate(20).ok


def test_triple_product_respects_cap():
    with pytest.raises(ValueError):
        verify_triple_product(1, 25)


# -- q-series ----------------------------------------------------------------


def test_partition_numbers():
    assert colored_partitions(1, 10) == (1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42)
    assert eta_inverse(1, Fraction(1, 3), Fraction(13, 3)).terms == {
        Fraction(1, 3): 1, Fraction(4, 3): 1, Fraction(7, 3): 2, Fraction(10, 3): 3, Fraction(13, 3): 5
    }


def test_colored_partitions_is_power_of_generating_function():
    one = QSeries({i: c for i, c in enumerate(colored_partitions(1, 8))}, 8)
    three = one * one * one
    assert [three.coefficient(i) for i in range(9)] == list(colored_partitions(3, 8))


def test_qseries_product_truncation():
    a = QSeries({0: 1, 1: 1}, 3)
    b = QSeries({Fraction(1, 2): 1}, Fraction(5, 2))
    prod = a * b
    assert prod.trunc == Fraction(5, 2)
    assert prod.terms == {Fraction(1, 2): 1, Fraction(3, 2): 1}
