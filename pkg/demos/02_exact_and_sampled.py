"""
Exact event probabilities next to Monte Carlo estimates
=======================================================

Two independent routes to the chance that points 1 and 2 are joined.
"""

from fractions import Fraction

from wheelperc.matchings import parse_matching
from wheelperc.probabilities import prob_submatching_brute, prob_submatching_ct
from wheelperc.simulator import SubmatchingEvent, estimate_event

arc = parse_matching("[[1,2]]")

for n in range(2, 7):
    exact = prob_submatching_ct(arc, n).value
    assert exact == prob_submatching_brute(arc, n).value
    st = estimate_event(n, SubmatchingEvent(arc), 20_000, seed=n)
    lo, hi = st.ci99()
    print(f"n={n}  exact={str(exact):8s} ~{float(exact):.4f}  sampled={st.estimate:.4f}  99% [{lo:.4f}, {hi:.4f}]")

# the sampler also runs far past the exact routes; the arc formula covers every n
n = 30
st = estimate_event(n, SubmatchingEvent(arc), 20_000, seed=0)
print(f"n={n}  formula={float(Fraction(3, 2) * Fraction(n * n + 1, 4 * n * n - 1)):.4f}  sampled={st.estimate:.4f}")
