"""
Probabilities of connectivity events for the random boundary matching.

Finite-n submatching probabilities come by two independent routes. One sums
the exact stationary law over matchings, and the other extracts a single
coefficient built from the ``F`` polynomial. The module also has the closed
forms for the anti-cluster and nested-arc events, rational interpolation in
``n**2``, and the resulting half-plane limits.

>>> from wheelperc.matchings import parse_matching
>>> arc = parse_matching("[[1,2]]")
>>> prob_submatching_ct(arc, 3).value
Fraction(3, 7)
>>> halfplane_prob(arc).value
Fraction(3, 8)
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Callable, Sequence

from .ctengine import rational_denominator, submatching_coefficient
from .dynamics import asm_count, stationary
from .exact import determinant, frac_str, lagrange_interpolate, poly_eval
from .matchings import NoncrossingMatching, is_submatching, minimal, parse_matching
from .qkz import Report, f_polynomial

__all__ = [
    "EventProbability", "RationalEventFunction", "prob_event_brute",
    "prob_submatching_brute", "prob_submatching_ct", "anti_cluster_brute",
    "anti_cluster_r", "anti_cluster_prob", "nested_arcs_prob", "NestedArcsReport",
    "calibrate_nested_arcs", "interpolate_Q", "halfplane_prob",
    "halfplane_anticluster", "anticluster_limit", "pairs_event_brute",
    "inclusion_exclusion_checks", "halfplane_12_45", "pairs_12_45", "BRUTE_MAX_N", "CT_MAX_N",
]

BRUTE_MAX_N = 7
CT_MAX_N = 11


@dataclass(frozen=True)
class EventProbability:
    value: Fraction
    route: str

    def __post_init__(self):
        if not 0 <= self.value <= 1:
            raise ValueError(f"probability {self.value} outside [0, 1]")

    def to_dict(self) -> dict:
        return {"value": frac_str(self.value), "route": self.route}


@dataclass(frozen=True)
class RationalEventFunction:
    """``G(n**2) / prod_{j=1}^k (4n^2 - (2j-1)^2)^(k+1-j)``.

    ``coefficients`` are those of ``G`` in ``m = n**2``, constant first, so the
    numerator is even in ``n`` by construction.
    """

    k: int
    coefficients: tuple

    def numerator(self, n) -> Fraction:
        return poly_eval(self.coefficients, Fraction(n) ** 2)

    def denominator_exponents(self) -> dict:
        """Exponent of ``4n^2 - c`` keyed by ``c``."""
        return {(2 * j - 1) ** 2: self.k + 1 - j for j in range(1, self.k + 1)}

    def __call__(self, n) -> Fraction:
        return self.numerator(n) / rational_denominator(self.k, n)

    def degree(self) -> int:
        """Degree of the numerator in n."""
        d = len(self.coefficients) - 1
        while d > 0 and self.coefficients[d] == 0:
            d -= 1
        return 2 * d

    def leading(self) -> Fraction:
        return self.coefficients[self.degree() // 2]

    def limit(self) -> Fraction:
        """Value as n grows, when the degrees match."""
        if self.degree() < self.k * (self.k + 1):
            return Fraction(0)
        return self.leading() / 2 ** (self.k * (self.k + 1))

    def is_dyadic(self) -> bool:
        return all((c.denominator & (c.denominator - 1)) == 0 for c in self.coefficients)

    def numerator_str(self) -> str:
        parts = []
        for d in range(len(self.coefficients) - 1, -1, -1):
            c = self.coefficients[d]
            if c == 0:
                continue
            cs = f"({frac_str(c)})" if c.denominator != 1 else frac_str(c)
            parts.append(cs if d == 0 else f"{cs}n^{2 * d}")
        return "+".join(parts).replace("+-", "-") or "0"

    def to_dict(self) -> dict:
        return {"k": self.k, "Q": self.numerator_str(),
                "coefficients_in_n2": [frac_str(c) for c in self.coefficients],
                "denominator": {f"4n^2-{c}": e for c, e in self.denominator_exponents().items()}}


# -- brute force over the stationary law ---------------------------------------

def prob_event_brute(n: int, predicate: Callable[[NoncrossingMatching], bool]) -> Fraction:
    if n > BRUTE_MAX_N:
        raise ValueError(f"exact stationary law capped at n <= {BRUTE_MAX_N}")
    return sum((v for pi, v in stationary(n).items() if predicate(pi)), Fraction(0))


def prob_submatching_brute(pi0: NoncrossingMatching, n: int, offset: int = 1) -> EventProbability:
    if pi0.n > n:
        raise ValueError("submatching larger than the matching")
    value = prob_event_brute(n, lambda pi: is_submatching(pi0, pi, offset))
    return EventProbability(value, "brute")


def pairs_event_brute(pairs: Sequence[tuple], n: int) -> Fraction:
    """Probability that every listed pair of boundary points is matched."""
    return prob_event_brute(n, lambda pi: all(pi.partner(i) == j for i, j in pairs))


def anti_cluster_brute(k: int, n: int) -> Fraction:
    """No two of the points 1..k matched to each other."""
    return prob_event_brute(n, lambda pi: all(not (1 <= pi.partner(i) <= k) for i in range(1, k + 1)))


# -- coefficient route -------------------------------------------------------------

def prob_submatching_ct(pi0: NoncrossingMatching, n: int) -> EventProbability:
    k = pi0.n
    if n < k + 1:
        raise ValueError(f"coefficient formula needs n >= k+1 (k={k}, n={n})")
    if n > CT_MAX_N:
        raise ValueError(f"coefficient route capped at n <= {CT_MAX_N}")
    if k == 0:
        return EventProbability(Fraction(1), "ct")
    c = submatching_coefficient(f_polynomial(pi0), n)
    return EventProbability(Fraction(c, asm_count(n)), "ct")


# -- closed forms ------------------------------------------------------------------

def anti_cluster_r(k: int, n) -> Fraction:
    """The parity-split product ratio that drives the anti-cluster law."""
    n2 = Fraction(n) ** 2
    num = den = Fraction(1)
    if k % 2:
        for j in range(1, (k + 1) // 2 + 1):
            for m in range(j, 2 * j - 1):
                num *= n2 - m * m
        for j in range(0, (k - 3) // 2 + 1):
            den *= (4 * n2 - (2 * j + 1) ** 2) ** ((k - 1) // 2 - j)
    else:
        for j in range(1, k // 2 + 1):
            for m in range(j, 2 * j):
                num *= n2 - m * m
        for j in range(0, k // 2):
            den *= (4 * n2 - (2 * j + 1) ** 2) ** (k // 2 - j)
    return num / den


def anti_cluster_prob(k: int, n: int) -> EventProbability:
    if not 1 <= k <= n:
        raise ValueError("need 1 <= k <= n")
    value = anti_cluster_r(k, n) / (asm_count(k) * anti_cluster_r(k, k))
    return EventProbability(value, "closed-form")


def halfplane_anticluster(k: int) -> EventProbability:
    if k < 1:
        raise ValueError("need k >= 1")
    h = k // 2
    value = Fraction(1) / (2 ** (h * (h + 1)) * asm_count(k) * anti_cluster_r(k, k))
    return EventProbability(value, "closed-form")


def anticluster_limit(k: int) -> Fraction:
    """Leading-order limit of the finite-n anti-cluster law, read off the
    product directly (each ``n^2 - m^2`` tends to ``n^2`` and each
    ``4n^2 - c`` to ``4n^2``)."""
    if k % 2:
        num_deg = sum(max(0, j - 1) for j in range(1, (k + 1) // 2 + 1))
        den_pairs = [((k - 1) // 2 - j) for j in range(0, (k - 3) // 2 + 1)]
    else:
        num_deg = sum(j for j in range(1, k // 2 + 1))
        den_pairs = [(k // 2 - j) for j in range(0, k // 2)]
    den_deg = sum(den_pairs)
    if num_deg != den_deg:
        raise ArithmeticError("degrees differ; the limit is not a positive constant")
    return Fraction(1, 4 ** den_deg) / (asm_count(k) * anti_cluster_r(k, k))


@dataclass
class NestedArcsReport:
    convention: str
    validated: list
    mismatches: list

    @property
    def ok(self) -> bool:
        return not self.mismatches


# The determinant sum, written as det(binom(j + k + upper, a_i - j + k))
# over 1 <= a_1 < ... ; the offset below is the one that agrees with brute force.
NESTED_UPPER_OFFSET = -1


def _nested_sum(k: int, n: int, upper: int) -> int:
    m = n - k
    if m == 0:
        return 1
    top = 2 * m + 2
    total = Fraction(0)
    for a in itertools.combinations(range(1, top + 1), m):
        rows = []
        for ai in a:
            row = []
            for j in range(1, m + 1):
                t, b = j + k + upper, ai - j + k
                row.append(comb(t, b) if 0 <= b <= t else 0)
            rows.append(row)
        total += determinant(rows)
    if total.denominator != 1:
        raise ArithmeticError("non-integral determinant sum")
    return int(total)


def calibrate_nested_arcs(points=((1, 2), (1, 3), (2, 3), (2, 4)), offsets=range(-2, 3)) -> NestedArcsReport:
    """Try upper-index offsets of the binomial and keep the ones matching brute force."""
    brute = {(k, n): prob_submatching_brute(minimal(k), n).value for k, n in points}
    good = [u for u in offsets
            if all(Fraction(_nested_sum(k, n, u), asm_count(n)) == brute[(k, n)] for k, n in points)]
    mism = [] if good == [NESTED_UPPER_OFFSET] else [("offsets", good)]
    conv = "det(binom(j+k-1, a_i-j+k)), 1 <= a_1 < ... < a_(n-k)"
    return NestedArcsReport(conv, list(points), mism)


def nested_arcs_prob(k: int, n: int, validate: bool = True) -> EventProbability:
    """Probability that 1..2k carry k nested arcs, as a determinant sum.

    With ``validate`` the value is also compared with the brute-force law
    whenever that is affordable, and a disagreement raises.
    """
    if not 1 <= k < n:
        raise ValueError("need 1 <= k < n")
    value = Fraction(_nested_sum(k, n, NESTED_UPPER_OFFSET), asm_count(n))
    if validate and n <= 6:
        b = prob_submatching_brute(minimal(k), n).value
        if b != value:
            raise ArithmeticError(f"nested-arc sum {value} disagrees with brute {b} at k={k}, n={n}")
    return EventProbability(value, "closed-form")


# -- interpolation and half-plane limits -------------------------------------

_Q_CACHE: dict = {}


@dataclass(frozen=True)
class InterpolationResult:
    function: RationalEventFunction
    nodes: tuple
    witness: int
    witness_ok: bool
    values: dict


def interpolate_Q(pi0: NoncrossingMatching, extra_witnesses: int = 1) -> InterpolationResult:
    """Fit the rational shape in n from coefficient-route values.

    Nodes are n = k+1 .. k(k+3)/2 + 1, one more than the polynomial degree in
    n**2 requires. The next ``extra_witnesses`` values of n are held out.
    """
    k = pi0.n
    key = (pi0, extra_witnesses)
    if key in _Q_CACHE:
        return _Q_CACHE[key]
    if k == 0:
        res = InterpolationResult(RationalEventFunction(0, (Fraction(1),)), (), 0, True, {})
        _Q_CACHE[key] = res
        return res
    deg = k * (k + 1) // 2
    nodes = tuple(range(k + 1, k + 1 + deg + 1))
    witnesses = tuple(range(nodes[-1] + 1, nodes[-1] + 1 + extra_witnesses))
    values = {}
    for n in nodes + witnesses:
        p = prob_submatching_ct(pi0, n).value
        values[n] = p * rational_denominator(k, n)
    coeffs = lagrange_interpolate([(n * n, values[n]) for n in nodes])
    fn = RationalEventFunction(k, tuple(coeffs))
    ok = all(fn.numerator(n) == values[n] for n in witnesses)
    res = InterpolationResult(fn, nodes, witnesses[-1] if witnesses else 0, ok, values)
    _Q_CACHE[key] = res
    return res


def halfplane_prob(pi0: NoncrossingMatching) -> EventProbability:
    fit = interpolate_Q(pi0)
    if not fit.witness_ok:
        raise ArithmeticError(f"held-out value disagrees with the fit for {pi0}")
    return EventProbability(fit.function.limit(), "interpolated")


def halfplane_12_45() -> EventProbability:
    """Limit of P(1-2 and 4-5 both matched) from the five-point anti-cluster
    law by inclusion-exclusion over adjacent pairs."""
    arc = parse_matching("[[1,2]]")
    two = parse_matching("[[1,2],[3,4]]")
    value = (halfplane_anticluster(5).value - 1 + 4 * halfplane_prob(arc).value
             - 2 * halfplane_prob(two).value)
    return EventProbability(value, "inclusion-exclusion")


def inclusion_exclusion_checks(n: int) -> Report:
    """Relations among anti-cluster, single-arc and two-arc events at order n.

    Complement of the anti-cluster event on 1..k is a union of the events
    ``i ~ i+1`` (an innermost arc always exists), so inclusion-exclusion runs
    over sets of non-adjacent indices.
    """
    rep = Report(f"inclusion-exclusion n={n}")
    arc = pairs_event_brute([(1, 2)], n)
    two = pairs_event_brute([(1, 2), (3, 4)], n)
    rep.record("AC2 complement", anti_cluster_brute(2, n), 1 - arc)
    rep.record("AC2 closed form", anti_cluster_prob(2, n).value if n >= 2 else None, 1 - arc)
    rep.record("single arc formula", arc, Fraction(3, 2) * (n * n + 1) / (4 * n * n - 1))
    if n >= 3:
        rep.record("AC4 expansion", anti_cluster_brute(4, n), 1 - 3 * arc + two)
        if n >= 4:
            rep.record("AC4 closed form", anti_cluster_prob(4, n).value, 1 - 3 * arc + two)
        n2 = Fraction(n * n)
        rep.record("two-arc formula", two,
                   Fraction(1, 8) * (97 * n2 ** 3 + 82 * n2 ** 2 - 107 * n2 - 792)
                   / ((4 * n2 - 1) ** 2 * (4 * n2 - 9)))
        x = pairs_event_brute([(1, 2), (4, 5)], n)
        rep.record("AC5 expansion", anti_cluster_brute(5, n), 1 - 4 * arc + 2 * two + x)
        if n >= 5:
            rep.record("AC5 closed form", anti_cluster_prob(5, n).value, 1 - 4 * arc + 2 * two + x)
        rep.record("1-2,4-5 formula", x, pairs_12_45(n))
    return rep


def pairs_12_45(n) -> Fraction:
    """P(1-2 and 4-5 both matched) at order n, from the anti-cluster closed form."""
    n2 = Fraction(n) ** 2
    return (Fraction(135, 16) * (n2 - 4) * (n2 ** 2 + 3 * n2 + 4)
            / ((4 * n2 - 1) ** 2 * (4 * n2 - 9)))
