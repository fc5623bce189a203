import math
from fractions import Fraction

import numpy as np
import pytest

from wheelperc.dynamics import stationary
from wheelperc.matchings import apply_e, enumerate_matchings, is_noncrossing, parse_matching
from wheelperc.simulator import (
    AntiClusterEvent, FrontierState, PairsEvent, SampleStats, SamplerStuck, SubmatchingEvent,
    chi_square_pvalue, clopper_pearson, estimate_event, histogram, parse_event,
    sample_matching, sample_partners,
)

ARC = SubmatchingEvent(parse_matching("[[1,2]]"))


def law(n):
    return dict(stationary(n).items())


@pytest.mark.parametrize("backend", ["stack", "plaquette"])
def test_samples_are_noncrossing(backend):
    rng = np.random.default_rng(5)
    for n in (1, 2, 3, 6, 9):
        for _ in range(20):
            pi = sample_matching(n, rng, backend)
            assert pi.n == n
            assert is_noncrossing([p - 1 for p in pi.pairing])


def test_single_pair_is_forced():
    rng = np.random.default_rng(0)
    assert all(sample_matching(1, rng) == parse_matching("[[1,2]]") for _ in range(50))


def test_fixed_seed_is_deterministic():
    a = estimate_event(3, ARC, 3000, seed=11)
    b = estimate_event(3, ARC, 3000, seed=11)
    assert a.hits == b.hits


def test_threads_do_not_change_result():
    a = estimate_event(3, ARC, 25_000, seed=4, threads=1)
    b = estimate_event(3, ARC, 25_000, seed=4, threads=3)
    assert a.hits == b.hits and a.samples == b.samples == 25_000


def test_two_strand_estimate():
    N = 20_000
    st = estimate_event(2, ARC, N, seed=2)
    assert abs(st.estimate - 0.5) < 3 * math.sqrt(0.25 / N)


@pytest.mark.parametrize("backend", ["stack", "plaquette"])
def test_histogram_fits_law(backend):
    st = histogram(3, 20_000, seed=8, backend=backend)
    assert chi_square_pvalue(st.histogram, law(3)) > 1e-3


def test_law_is_preserved_by_one_more_step():
    # one extra uniformly chosen e_k applied to stationary draws stays stationary
    rng = np.random.default_rng(9)
    counts = {}
    for _ in range(12_000):
        pi = sample_matching(3, rng)
        pi = apply_e(int(rng.integers(1, 7)), pi)
        counts[pi] = counts.get(pi, 0) + 1
    assert chi_square_pvalue(counts, law(3)) > 1e-3


def test_early_stop_matches_full_draw_law():
    st = estimate_event(4, PairsEvent(((1, 2),)), 20_000, seed=3)
    lo, hi = st.ci99()
    assert lo <= float(Fraction(17, 42)) <= hi


def test_anticluster_estimate():
    st = estimate_event(4, AntiClusterEvent(2), 20_000, seed=6)
    lo, hi = st.ci99()
    assert lo <= 25 / 42 <= hi


def test_clopper_pearson_edges():
    assert clopper_pearson(0, 10)[0] == 0.0
    assert clopper_pearson(10, 10)[1] == 1.0
    lo, hi = clopper_pearson(50, 100)
    assert lo < 0.5 < hi
    assert abs((0.5 - lo) - (hi - 0.5)) < 1e-9


def test_clopper_pearson_known_value():
    lo, hi = clopper_pearson(5, 20, 0.95)
    # reference interval for 5 of 20 at 95%
    assert abs(lo - 0.0865) < 1e-3 and abs(hi - 0.4910) < 1e-3


def test_stats_merge_and_dict():
    a = SampleStats(3, 10, 4, 0)
    b = SampleStats(3, 30, 6, 0)
    m = a.merge(b)
    assert (m.samples, m.hits, m.estimate) == (40, 10, 0.25)
    assert m.to_dict()["ci99"][0] < 0.25


def test_histogram_count_checked():
    with pytest.raises(ValueError):
        SampleStats(2, 5, 0, 0, histogram={parse_matching("[[1,2],[3,4]]"): 3})


def test_step_cap():
    with pytest.raises(SamplerStuck, match="no complete matching"):
        sample_partners(6, np.random.default_rng(0), max_steps=2)


def test_bad_arguments():
    rng = np.random.default_rng(0)
    with pytest.raises(ValueError):
        sample_partners(0, rng)
    with pytest.raises(ValueError):
        sample_partners(2, rng, backend="wheel")
    with pytest.raises(ValueError):
        estimate_event(2, ARC, 0)


def test_parse_event():
    assert parse_event("submatching:[[1,2],[3,4]]") == SubmatchingEvent(parse_matching("[[1,2],[3,4]]"))
    assert parse_event("anticluster:3") == AntiClusterEvent(3)
    assert parse_event("pairs:[[1,2],[4,5]]") == PairsEvent(((1, 2), (4, 5)))
    assert parse_event("pairs:[[1,2],[4,5]]").points == (1, 2, 4, 5)
    with pytest.raises(ValueError):
        parse_event("ring:2")


def test_events_on_full_matchings():
    pi = parse_matching("[[1,2],[3,6],[4,5]]")
    assert ARC(pi)
    assert SubmatchingEvent(parse_matching("[[1,2]]"), 4)(pi)
    assert AntiClusterEvent(2)(pi) is False
    assert AntiClusterEvent(2)(parse_matching("[[1,6],[2,3],[4,5]]")) is True
    assert AntiClusterEvent(3)(parse_matching("[[1,6],[2,3],[4,5]]")) is False


def test_frontier_closed_loop_is_dropped():
    s = FrontierState(1)
    s.apply_e(0)  # joins the two boundary strands
    assert s.partner == {1: 2, 2: 1}
    s.apply_e(0)  # cup from before, cap now: closes a loop
    assert s.partner == {1: 2, 2: 1} and s.alive() == 0


def test_chi_square_rejects_foreign_states():
    with pytest.raises(ValueError):
        chi_square_pvalue({parse_matching("[[1,4],[2,3]]"): 1}, {parse_matching("[[1,2],[3,4]]"): 1})


@pytest.mark.slow
def test_large_n_arc_probe():
    st = estimate_event(40, ARC, 40_000, seed=1, threads=4)
    lo, hi = st.ci99()
    assert hi - lo < 0.02
    assert lo - 0.01 <= 3 / 8 <= hi + 0.01


def test_histogram_keys_cover_catalan():
    st = histogram(2, 2000, seed=1)
    assert set(st.histogram) <= set(enumerate_matchings(2))
