from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conftest import matchings
from wheelperc.dynamics import asm_count, stationary
from wheelperc.matchings import enumerate_matchings, minimal, parse_matching
from wheelperc.probabilities import (
    EventProbability, RationalEventFunction, anti_cluster_brute, anti_cluster_prob,
    anti_cluster_r, anticluster_limit, calibrate_nested_arcs, halfplane_12_45,
    halfplane_anticluster, halfplane_prob, inclusion_exclusion_checks, interpolate_Q,
    nested_arcs_prob, pairs_12_45, pairs_event_brute, prob_submatching_brute,
    prob_submatching_ct,
)

ARC = parse_matching("[[1,2]]")
TWO = parse_matching("[[1,2],[3,4]]")
NESTED2 = parse_matching("[[1,4],[2,3]]")
THREE = parse_matching("[[1,2],[3,4],[5,6]]")


def single_arc(n):
    return Fraction(3, 2) * Fraction(n * n + 1, 4 * n * n - 1)


def two_arcs(n):
    m = n * n
    return Fraction(97 * m ** 3 + 82 * m ** 2 - 107 * m - 792, 8 * (4 * m - 1) ** 2 * (4 * m - 9))


def nested_two(n):
    m = n * n
    return Fraction(59 * m ** 3 + 299 * m ** 2 + 866 * m + 576, 16 * (4 * m - 1) ** 2 * (4 * m - 9))


def three_arcs(n):
    m = n * n
    num = (214093 * m ** 6 - 980692 * m ** 5 - 584436 * m ** 4 - 1887916 * m ** 3
           + 1361443 * m ** 2 - 17432892 * m - 316353600)
    return Fraction(num, 512 * (4 * m - 1) ** 3 * (4 * m - 9) ** 2 * (4 * m - 25))


def test_brute_examples():
    assert prob_submatching_brute(ARC, 2).value == Fraction(1, 2)
    assert prob_submatching_brute(ARC, 3).value == Fraction(3, 7)
    assert prob_submatching_brute(TWO, 2).value == Fraction(1, 2)


@pytest.mark.parametrize("n", range(2, 8))
def test_single_arc_relation(n):
    assert prob_submatching_ct(ARC, n).value == single_arc(n)
    if n <= 7:
        assert prob_submatching_brute(ARC, n).value == single_arc(n)


@pytest.mark.parametrize("n", range(3, 7))
def test_two_arc_relations(n):
    assert prob_submatching_ct(TWO, n).value == two_arcs(n)
    assert prob_submatching_ct(NESTED2, n).value == nested_two(n)


@pytest.mark.parametrize("n", range(4, 7))
def test_six_point_relation(n):
    assert prob_submatching_ct(THREE, n).value == three_arcs(n)


@pytest.mark.parametrize("k", range(0, 4))
def test_routes_agree(k):
    for pi0 in enumerate_matchings(k):
        for n in range(k + 1, 7):
            assert prob_submatching_ct(pi0, n) .value == prob_submatching_brute(pi0, n).value


@given(matchings(max_n=2), st.integers(3, 5), st.data())
def test_offset_independence(pi0, n, data):
    offset = data.draw(st.integers(1, 2 * n - 2 * pi0.n + 1))
    assert prob_submatching_brute(pi0, n, offset).value == prob_submatching_brute(pi0, n, 1).value


def test_ct_route_domain():
    with pytest.raises(ValueError):
        prob_submatching_ct(TWO, 2)


def test_event_probability_range():
    with pytest.raises(ValueError):
        EventProbability(Fraction(3, 2), "x")


@pytest.mark.parametrize("n", range(2, 8))
def test_anticluster_two(n):
    want = Fraction(5, 2) * Fraction(n * n - 1, 4 * n * n - 1)
    assert anti_cluster_prob(2, n).value == want
    assert anti_cluster_prob(2, n).value == 1 - prob_submatching_brute(ARC, n).value


@pytest.mark.parametrize("n", range(4, 8))
def test_anticluster_four_closed_form(n):
    m = n * n
    want = Fraction(33, 8) * Fraction((m - 1) * (m - 4) * (m - 9), (4 * m - 1) ** 2 * (4 * m - 9))
    assert anti_cluster_prob(4, n).value == want


@pytest.mark.parametrize("k", [2, 3, 4])
def test_anticluster_against_brute(k):
    for n in range(k, 7):
        assert anti_cluster_prob(k, n).value == anti_cluster_brute(k, n)


def test_anticluster_five_against_brute():
    for n in (5, 6, 7):
        assert anti_cluster_prob(5, n).value == anti_cluster_brute(5, n)


def test_anticluster_five_with_four_point_factors_is_wrong():
    # reusing the four-point factors gives a different and wrong value at n = 5
    m = 25
    variant = Fraction(11, 16) * Fraction((m - 1) * (m - 4) * (m - 9), (4 * m - 1) ** 2 * (4 * m - 9))
    assert variant != anti_cluster_brute(5, 5)
    assert anti_cluster_prob(5, 5).value == anti_cluster_brute(5, 5) == Fraction(1, 429)


def test_halfplane_anticluster_values():
    got = [halfplane_anticluster(k).value for k in range(2, 9)]
    assert got == [Fraction(5, 8), Fraction(1, 4), Fraction(33, 512), Fraction(11, 1024),
                   Fraction(2431, 2 ** 21), Fraction(85, 2 ** 20), Fraction(126293, 2 ** 35)]


@pytest.mark.parametrize("k", range(2, 9))
def test_halfplane_anticluster_is_limit(k):
    assert anticluster_limit(k) == halfplane_anticluster(k).value
    big = anti_cluster_prob(k, 4000).value
    assert abs(float(big) - float(halfplane_anticluster(k).value)) < 1e-4


def test_anti_cluster_r_three():
    n = 7
    assert anti_cluster_r(3, n) == Fraction(n * n - 4, 4 * n * n - 1)


def test_nested_arcs_calibration():
    rep = calibrate_nested_arcs()
    assert rep.ok
    assert "j+k-1" in rep.convention


@pytest.mark.parametrize("k,n,want", [
    (1, 2, Fraction(1, 2)), (1, 3, Fraction(3, 7)), (2, 3, Fraction(1, 7)), (2, 4, Fraction(2, 21)),
    (1, 4, Fraction(17, 42)), (3, 4, Fraction(1, 42)), (3, 5, Fraction(5, 429)),
    (2, 5, Fraction(34, 429)), (1, 5, Fraction(13, 33)),
])
def test_nested_arcs_values(k, n, want):
    # frozen from the brute-force law
    assert nested_arcs_prob(k, n).value == want
    assert prob_submatching_brute(minimal(k), n).value == want


@pytest.mark.parametrize("n", range(2, 7))
def test_nested_arcs_order_n_minus_one(n):
    k = n - 1
    assert nested_arcs_prob(k, n).value == prob_submatching_brute(minimal(k), n).value


def test_interpolation_examples():
    assert interpolate_Q(ARC).function.coefficients == (Fraction(3, 2), Fraction(3, 2))
    fit = interpolate_Q(TWO)
    assert fit.witness_ok
    assert all(fit.function(n) == two_arcs(n) for n in range(3, 12))
    fit = interpolate_Q(NESTED2)
    assert all(fit.function(n) == nested_two(n) for n in range(3, 12))
    assert interpolate_Q(parse_matching("[]")).function.coefficients == (1,)


@pytest.mark.parametrize("pi0", [p for k in (1, 2) for p in enumerate_matchings(k)], ids=str)
def test_interpolation_shape(pi0):
    fit = interpolate_Q(pi0)
    f = fit.function
    assert fit.witness_ok
    assert f.is_dyadic()
    assert f.degree() == pi0.n * (pi0.n + 1)
    assert fit.nodes[0] == pi0.n + 1
    assert len(fit.nodes) == pi0.n * (pi0.n + 1) // 2 + 1


def test_rational_event_function_text():
    f = RationalEventFunction(1, (Fraction(3, 2), Fraction(3, 2)))
    assert f.numerator_str() == "(3/2)n^2+(3/2)"
    assert f(2) == Fraction(1, 2)
    assert f.limit() == Fraction(3, 8)
    assert f.to_dict()["denominator"] == {"4n^2-1": 1}


def test_halfplane_values():
    assert halfplane_prob(ARC).value == Fraction(3, 8)
    assert halfplane_prob(TWO).value == Fraction(97, 512)
    assert halfplane_prob(NESTED2).value == Fraction(59, 1024)
    assert halfplane_12_45().value == Fraction(135, 1024)


@pytest.mark.parametrize("n", range(2, 7))
def test_inclusion_exclusion(n):
    rep = inclusion_exclusion_checks(n)
    assert rep.ok, rep.mismatches


def test_pairs_12_45_form():
    for n in range(3, 8):
        assert pairs_12_45(n) == pairs_event_brute([(1, 2), (4, 5)], n)


def test_12_45_variant_from_wrong_five_point_value():
    def variant(n):
        m = n * n
        return Fraction(15, 16) * Fraction((m - 4) * (9 * m * m + 38 * m - 63), (4 * m - 1) ** 2 * (4 * m - 9))
    assert variant(3) == pairs_event_brute([(1, 2), (4, 5)], 3)
    assert all(variant(n) != pairs_event_brute([(1, 2), (4, 5)], n) for n in (4, 5, 6))
    # both versions share the same limit
    assert abs(float(variant(10 ** 4)) - 135 / 1024) < 1e-6


def test_stationary_sums_to_one():
    for n in range(1, 7):
        assert sum(stationary(n).values) == 1
