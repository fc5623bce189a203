"""
Half-plane limits from rational fits
====================================

Fit each finite-n probability to a rational function of n and read off
the limit. A spare node checks every fit.
"""

from wheelperc.matchings import enumerate_matchings
from wheelperc.probabilities import halfplane_anticluster, interpolate_Q

for k in (1, 2):
    for pi0 in enumerate_matchings(k):
        fit = interpolate_Q(pi0)
        f = fit.function
        print(f"{str(pi0):16s} Q(n) = {f.numerator_str()}")
        print(f"{'':16s} limit {f.limit()}  witness ok: {fit.witness_ok}")

# no points among 1..k joined to each other
for k in range(2, 9):
    print(f"k={k}  {halfplane_anticluster(k).value}")
