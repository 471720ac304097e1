import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ospchar.branching import (
    CriticalLevel,
    LevelParam,
    b_coefficient,
    b_exponent,
    branching_function,
    conformal_weight,
    contributing_weights,
    delta_exponent,
    delta_via_dual_level,
    random_level,
    singular_shift_candidates,
    verify_branching_identity,
    verify_delta_lemma,
    verify_delta_lemma_random,
    verify_main_theorem,
    verify_main_theorem_random,
    verify_singular_vanishing,
    w_module_character,
)
from ospchar.charseries import AlgebraType, colored_partitions
from ospchar.rootdata import Regularity, Weight, WeylElement, act, classify, dominant_weights_in_box, rho_vectors, weyl_group


def test_level_duality_formulas_agree():
    rng = random.Random(3)
    for n in (1, 2, 3):
        for _ in range(200):
            level = LevelParam(random_level(rng, n), n)
            assert level.check()


def test_worked_level():
    # k = 1, n = 1: ell + 2 = (k + 2)/(2k + 3)
    level = LevelParam(1, 1)
    assert level.ell + 2 == Fraction(3, 5)
    assert 1 / (level.k + 2) + 1 / (level.ell + 2) == 2


@pytest.mark.parametrize("k", [-2, Fraction(-3, 2)])
def test_bad_levels_raise(k):
    level = LevelParam(k, 1)
    assert level.bad
    with pytest.raises(CriticalLevel):
        level.ell


def test_conformal_weight_examples():
    assert conformal_weight(AlgebraType.SP, Weight((0, 0)), 5) == 0
    assert conformal_weight(AlgebraType.SP, Weight((2,)), 1) == Fraction(2, 3)
    with pytest.raises(CriticalLevel):
        conformal_weight(AlgebraType.SP, Weight((1,)), -2)


def test_conformal_weight_dot_invariance():
    rho = rho_vectors(2).rho_sp
    mu = Weight((3, 1))
    for w in weyl_group(2):
        other = act(w, mu + rho) - rho
        assert conformal_weight(AlgebraType.SP, other, Fraction(2, 7)) == conformal_weight(AlgebraType.SP, mu, Fraction(2, 7))


def test_b_coefficient_examples():
    same = b_coefficient(Weight((2,)), Weight((2,)), 6)
    assert [same.coefficient(i) for i in range(7)] == [1, 1, 2, 3, 5, 7, 11]
    assert b_coefficient(Weight((1,)), Weight((0,)), 4).valuation() == 1


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_b_coefficient_symmetries(data):
    n = data.draw(st.integers(1, 3))
    vec = st.lists(st.integers(-4, 4), min_size=n, max_size=n)
    lam, mu, nu = (Weight(data.draw(vec)) for _ in range(3))
    assert b_coefficient(lam + nu, mu + nu, 8) == b_coefficient(lam, mu, 8)
    w = data.draw(st.sampled_from(weyl_group(n)))
    rho_odd = rho_vectors(n).rho_odd
    twisted = act(w.inverse(), lam + rho_odd) - rho_odd
    assert b_coefficient(lam, act(w, mu), 8) == b_coefficient(twisted, mu, 8)


def test_b_exponent_nonnegative_integer():
    for coords in [(0,), (1,), (-1,), (-2,), (3, -2), (-1, -1)]:
        e = b_exponent(Weight(coords), Weight((0,) * len(coords)))
        assert e == sum(c * (c + 1) // 2 for c in coords)


def test_branching_vacuum_leading_coefficient():
    assert branching_function(Weight((0,)), Weight((0,)), 4).coefficient(0) == 1


def test_branching_functions_nonnegative():
    rng = random.Random(11)
    for _ in range(50):
        n = rng.choice((1, 2))
        boxes = list(dominant_weights_in_box(n, 4))
        lam, mu = Weight(rng.choice(boxes)), Weight(rng.choice(boxes))
        series = branching_function(lam, mu, 8)
        assert series.is_nonnegative()


def test_contributing_weights_are_dominant_and_bounded():
    mu = Weight((1, 0))
    lams = contributing_weights(2, mu, 6)
    assert Weight((1, 0)) in lams
    assert all(lam.coords[0] >= lam.coords[1] >= 0 for lam in lams)


@pytest.mark.parametrize("mu", [(0,), (1,), (2,)])
def test_branching_identity_rank_one(mu):
    assert verify_branching_identity(1, Weight(mu), 10).ok


@pytest.mark.parametrize("mu", [(0, 0), (1, 0), (1, 1), (2, 0), (2, 1), (2, 2)])
def test_branching_identity_rank_two(mu):
    assert verify_branching_identity(2, Weight(mu), 6).ok


def test_branching_identity_workers_agree():
    single = verify_branching_identity(1, Weight((1,)), 8)
    pooled = verify_branching_identity(1, Weight((1,)), 8, workers=2)
    assert single.to_json_obj() == pooled.to_json_obj()


def test_broken_identity_is_detected(monkeypatch):
    # dropping one contributing lambda must produce a mismatch report
    from ospchar import branching

    original = branching.contributing_weights
    monkeypatch.setattr(branching, "contributing_weights", lambda n, mu, trunc: original(n, mu, trunc)[:-1])
    rep = verify_branching_identity(1, Weight((0,)), 6)
    assert not rep.ok and rep.first_mismatch is not None


def test_singular_candidates_are_singular():
    rho = rho_vectors(2).rho_sp
    cands = singular_shift_candidates(2, 4)
    assert cands
    for lam in cands:
        assert classify(lam + rho) is Regularity.SINGULAR


def test_singular_vanishing_small():
    assert verify_singular_vanishing(2, 4, 2, 6).ok
    assert verify_singular_vanishing(1, 6, 3, 8).ok


def test_delta_examples():
    zero = Weight((0,))
    flip = WeylElement((0,), (-1,))
    assert delta_exponent(zero, zero, WeylElement.identity(1), Fraction(5, 3)) == 0
    assert delta_exponent(zero, zero, flip, 1) == 1
    assert delta_via_dual_level(zero, zero, flip, 1) == 1


def test_delta_spot_case():
    lam, mu = Weight((2, 1)), Weight((1, 0))
    for w in weyl_group(2):
        assert verify_delta_lemma(lam, mu, w, Fraction(1, 3)).ok


@pytest.mark.parametrize("n", [1, 2, 3])
def test_delta_lemma_random(n):
    assert verify_delta_lemma_random(n, 300, seed=n).ok


def test_w_module_vacuum_leading_term():
    res = w_module_character(Weight((0,)), Weight((0,)), Fraction(1, 2), 4)
    assert res.via_delta.valuation() == 0
    assert res.via_delta.coefficient(0) == 1


def test_main_theorem_spot_and_random():
    assert verify_main_theorem(Weight((1, 0)), Weight((1, 1)), Fraction(-7, 3), 6).ok
    assert verify_main_theorem_random(1, 10, 5, 6).ok
    assert verify_main_theorem_random(2, 10, 6, 6).ok


def test_partition_coefficients_match_colored_counts():
    # B with lam == mu is the colored partition series itself
    series = b_coefficient(Weight((0, 0)), Weight((0, 0)), 6)
    assert tuple(series.coefficient(i) for i in range(7)) == colored_partitions(2, 6)
