"""
The stationary law on noncrossing matchings
===========================================

Exact weights for small circumference, and the largest and smallest states.
"""

from wheelperc.dynamics import asm_count, stationary
from wheelperc.matchings import enumerate_matchings

for n in range(1, 6):
    alphas = stationary(n).alphas()
    print(f"n={n}  ASM={asm_count(n)}  weights={alphas}")

# the heaviest state carries ASM(n-1), the fully nested one carries 1
n = 4
for pi, a in zip(enumerate_matchings(n), stationary(n).alphas()):
    print(f"{str(pi):28s} {a}")
