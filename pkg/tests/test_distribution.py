from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from curvepoisson.census import (
    run_census,
    weighted_distribution,
    empirical_falling_moments,
    empirical_raw_moments,
    predict_higher_counts,
)
from curvepoisson.census.curves import candidate_block, count_points, smooth_mask
from curvepoisson.census.distribution import WeightedDistribution, hasse_weil_ok
from curvepoisson.census.fields import GF
from curvepoisson.census.groups import group_order

from oracles import newton_from_polynomial


@pytest.fixture(scope="module")
def genus2_q2():
    return run_census("genus2", GF(2))


@pytest.mark.parametrize("pk", [(2, 1), (3, 1), (2, 2), (5, 1)])
def test_genus1_total_mass_is_q(pk):
    F = GF(*pk)
    assert weighted_distribution("genus1", F).total_mass == F.q


def test_genus2_total_masses():
    assert weighted_distribution("genus2", GF(2)).total_mass == 8
    assert weighted_distribution("genus2", GF(3)).total_mass == 27


def test_known_genus2_moments(genus2_q2):
    m = empirical_falling_moments(genus2_q2.distribution, 2)
    assert m[1] == 3
    assert m[2] == Fraction(63, 8)
    m3 = empirical_falling_moments(weighted_distribution("genus2", GF(3)), 2)
    assert m3[1] == 4 and m3[2] == Fraction(404, 27)


def test_genus1_moments_q2():
    m = empirical_falling_moments(weighted_distribution("genus1", GF(2)), 2)
    assert m[1] == 3 and m[2] == Fraction(15, 2)


def test_dual_moment_paths_agree(genus2_q2):
    assert genus2_q2.direct_falling_moments(4) == empirical_falling_moments(genus2_q2.distribution, 4)


def test_raw_and_falling_consistent(genus2_q2):
    d = genus2_q2.distribution
    raw = empirical_raw_moments(d, 2)
    fall = empirical_falling_moments(d, 2)
    assert raw[2] == fall[2] + fall[1]
    assert raw[1] == fall[1]


def test_zero_order_moment_is_one(genus2_q2):
    d = genus2_q2.distribution
    total = sum(d.masses.values()) / d.total_mass
    assert total == 1


def test_checks_recorded(genus2_q2):
    r = genus2_q2
    assert r.candidates == 2048
    assert r.zeta_checks == r.distribution.num_equations > 0
    assert r.zeta_failures == 0 and r.hasse_weil_failures == 0
    assert r.consistent and r.distribution.within_weil()
    lo, hi = 3 - 4 * np.sqrt(2), 3 + 4 * np.sqrt(2)
    assert lo <= empirical_falling_moments(r.distribution, 1)[1] <= hi


def test_zeta_against_power_series_oracle():
    F = GF(3)
    rows = candidate_block("genus2", F)
    rows = rows[smooth_mask("genus2", F, rows)][::37]
    N = [count_points("genus2", F, rows, k) for k in range(1, 5)]
    q = F.q
    for n1, n2, n3, n4 in zip(*(x.tolist() for x in N)):
        s1, s2 = q + 1 - n1, q * q + 1 - n2
        c1, c2 = -s1, (s1 * s1 - s2) // 2
        s = newton_from_polynomial([1, c1, c2, q * c1, q * q], 4)
        assert [q**k + 1 - s[k - 1] for k in (3, 4)] == [n3, n4]
        assert predict_higher_counts(n1, n2, q) == (n3, n4)


def test_prediction_rejects_impossible_pair():
    with pytest.raises(ValueError):
        predict_higher_counts(3, 4, 2)  # s1^2 - s2 odd


def test_workers_do_not_change_result():
    a = run_census("genus2", GF(3), workers=1)
    b = run_census("genus2", GF(3), workers=3)
    assert a.distribution.counts == b.distribution.counts
    assert a.direct_falling_sums == b.direct_falling_sums


def test_zero_mass_raises():
    d = WeightedDistribution("genus1", 2, 1, group_order("genus1", GF(2)), {})
    with pytest.raises(ValueError):
        empirical_falling_moments(d, 2)
    with pytest.raises(ValueError):
        empirical_raw_moments(d, 2)


def test_argument_validation():
    with pytest.raises(ValueError):
        run_census("quartic", GF(2))
    with pytest.raises(ValueError):
        run_census("genus1", GF(2), max_k=5)
    with pytest.raises(ValueError):
        run_census("genus1", GF(2), workers=0)


@given(st.integers(0, 40), st.sampled_from([2, 3, 4, 5, 7]), st.integers(1, 4))
def test_hasse_weil_matches_float_bound(n, q, k):
    ok = bool(hasse_weil_ok(np.array([n]), q, 2, k)[0])
    # avoid float ties: squared form is exact, float only where the margin is clear
    gap = abs(n - q**k - 1) - 4 * q ** (k / 2)
    if abs(gap) > 1e-9:
        assert ok == (gap < 0)
