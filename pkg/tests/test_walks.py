import itertools
import json
import math
from fractions import Fraction

import numpy as np
import pytest

from rispaces import (
    EXACT_MAX_STEPS,
    IntegerDistribution,
    signed_indicator_sum_expectation,
    signed_indicator_sum_log_tails,
    signed_indicator_sum_tail,
    signed_indicator_sum_tail_leading,
    walk_abs_layers,
    walk_abs_tail,
    walk_distribution,
)

LN2 = math.log(2.0)


def enumerated_abs_tails(n, u):
    """Brute force over all 3^n outcomes of n signed indicators."""
    atom = [(1, u / 2), (-1, u / 2), (0, 1 - u)]
    law = {}
    for outcome in itertools.product(atom, repeat=n):
        s = abs(sum(v for v, _ in outcome))
        p = math.prod((q for _, q in outcome), start=Fraction(1))
        law[s] = law.get(s, Fraction(0)) + p
    return {
        s: sum((p for v, p in law.items() if v >= s), Fraction(0))
        for s in range(1, n + 1)
    }


@pytest.mark.parametrize("u", [Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)])
@pytest.mark.parametrize("n", [1, 2, 3, 5, 8])
def test_signed_sum_tails_match_enumeration(n, u):
    oracle = enumerated_abs_tails(n, u)
    for s in range(1, n + 1):
        got = signed_indicator_sum_tail(n, u, s)
        assert isinstance(got, Fraction)
        assert got == oracle[s]


def test_walk_distribution_matches_sign_enumeration():
    for k in (1, 2, 3, 6, 9):
        law = {}
        for signs in itertools.product((-1, 1), repeat=k):
            law[sum(signs)] = law.get(sum(signs), Fraction(0)) + Fraction(1, 2**k)
        dist = walk_distribution(k)
        assert dist.is_exact
        for v, p in law.items():
            assert dist.prob(v) == p
        assert sum(dist.prob(v) for v in dist.support()) == 1


def test_walk_tail_anchors():
    assert walk_abs_tail(4, 2) == Fraction(5, 8)
    assert walk_abs_tail(5, 5) == Fraction(1, 16)
    assert walk_abs_tail(2, 1) == Fraction(1, 2)
    assert walk_abs_tail(3, 1) == 1


def test_signed_sum_tail_anchors():
    assert signed_indicator_sum_tail(2, Fraction(1, 2), 1) == Fraction(5, 8)
    assert signed_indicator_sum_tail(2, Fraction(1, 2), 2) == Fraction(1, 8)


def test_extreme_tail_identity():
    # P(|S_n| >= n) = 2^(1-n) u^n: all variables active with aligned signs
    for n in range(1, 21):
        for u in (Fraction(1, 3), Fraction(1, 2), Fraction(9, 10)):
            expect = Fraction(2, 2**n) * u**n
            assert signed_indicator_sum_tail(n, u, n) == expect
            assert signed_indicator_sum_tail_leading(n, u, n) == expect


def test_u_equal_one_reduces_to_walk():
    for s in range(1, 7):
        assert signed_indicator_sum_tail(6, Fraction(1), s) == walk_abs_tail(6, s)


def test_exact_vs_float_paths_agree():
    for n in (8, 33, 64):
        for u in (Fraction(1, 4), Fraction(2, 3)):
            for s in (1, n // 2 or 1, n):
                exact = float(signed_indicator_sum_tail(n, u, s, exact=True))
                approx = signed_indicator_sum_tail(n, float(u), s)
                assert approx == pytest.approx(exact, rel=1e-10, abs=1e-300)


def test_float_path_required_beyond_cap():
    with pytest.raises(ValueError):
        walk_distribution(EXACT_MAX_STEPS + 1, exact=True)
    dist = walk_distribution(80)
    assert not dist.is_exact
    assert sum(dist.prob(v) for v in dist.support()) == pytest.approx(1.0, abs=1e-12)


def test_log_tails_match_closed_form_at_edge():
    # the big-n route must keep the 2^(1-n) u^n corner in log space
    lt = signed_indicator_sum_log_tails(2100, 0.5)
    assert lt.shape == (2100,)
    assert lt[-1] == pytest.approx((1 - 2100) * LN2 + 2100 * math.log(0.5), rel=1e-12)
    assert np.all(lt <= 0.0)
    assert np.all(np.diff(lt) <= 1e-12)
    # spot-check against the scalar route, which accumulates independently
    for s in (1, 7, 800):
        assert lt[s - 1] == pytest.approx(
            math.log(signed_indicator_sum_tail(2100, 0.5, s)), rel=1e-10
        )


def test_walk_layers_consistent_with_tails():
    values, log_tails = walk_abs_layers(12)
    assert np.all(np.diff(values) < 0)
    assert np.all(log_tails <= 0.0)
    for v, lt in zip(values, log_tails):
        assert lt == pytest.approx(math.log(float(walk_abs_tail(12, int(v)))), rel=1e-12)


def test_walk_layers_deep_tail():
    values, log_tails = walk_abs_layers(2**14)
    assert values[0] == 2**14
    assert log_tails[0] == pytest.approx((1 - 2**14) * LN2, rel=1e-12)


def test_expectation_strictly_below_mean_of_absolute_sum():
    rng = np.random.default_rng(21)
    for _ in range(20):
        n = int(rng.integers(2, 40))
        u = float(rng.uniform(0.05, 1.0))
        e = signed_indicator_sum_expectation(n, u)
        assert 0.0 < e < n * u


def test_expectation_exact_small():
    # n=1: E|S| = u; n=2: E|S| = 2u(1-u) + u^2/2 + 2 * u^2/4... enumerate
    for n in (1, 2, 3):
        u = Fraction(1, 3)
        law = enumerated_abs_tails(n, u)
        expect = sum(law.values())  # sum_{s>=1} P(|S| >= s) = E|S|
        got = signed_indicator_sum_expectation(n, u)
        assert got == pytest.approx(float(expect), rel=1e-12)


def test_validation():
    with pytest.raises(ValueError):
        signed_indicator_sum_tail(0, Fraction(1, 2), 1)
    with pytest.raises(ValueError):
        signed_indicator_sum_tail(4, Fraction(3, 2), 1)
    with pytest.raises(ValueError):
        signed_indicator_sum_tail(4, Fraction(1, 2), 0)
    with pytest.raises(ValueError):
        signed_indicator_sum_tail(4, Fraction(1, 2), 5)
    with pytest.raises(ValueError):
        walk_abs_tail(-1, 1)


def test_distribution_to_step_function():
    f = walk_distribution(2).to_step_function()
    assert f.is_exact
    assert list(f.breakpoints) == [0, Fraction(1, 2), 1]
    assert list(f.values) == [2, 0]
    g = walk_distribution(3).to_step_function()
    assert list(g.breakpoints) == [0, Fraction(1, 4), 1]
    assert list(g.values) == [3, 1]


def test_distribution_json_round_trip():
    dist = walk_distribution(7)
    back = IntegerDistribution.from_json_dict(json.loads(json.dumps(dist.to_json_dict())))
    assert back == dist
    assert back.is_exact
    fdist = walk_distribution(70)
    fback = IntegerDistribution.from_json_dict(json.loads(json.dumps(fdist.to_json_dict())))
    assert fback == fdist


def test_distribution_mass_validation():
    with pytest.raises(ValueError):
        IntegerDistribution({0: Fraction(1, 2), 1: Fraction(1, 3)})
    with pytest.raises(ValueError):
        IntegerDistribution({0: 0.5, 1: 0.6})
