"""
Change of basis between the two families of wheel polynomials, evaluated
numerically.

``C[pi, sigma]`` is the value of the integral-basis polynomial of ``pi`` at
the evaluation point of ``sigma``. It has a closed product form over the arcs
of ``sigma`` and also a recursion that deletes little arcs. The two agree,
and both are implemented so that each checks the other. ``C_tilde`` is the
inverse matrix. Its rows give the submatching polynomials ``F``.

Everything here works at the level of point evaluations (integers). The one
exception is :func:`build_psi_symbolic`, a small-n auditor that builds the
qKZ polynomials themselves over the Eisenstein rationals.

>>> c_matrix(2)
[[1, 0], [0, 1]]
>>> f_polynomial(NoncrossingMatching.from_arcs([(1, 4), (2, 3)])).terms
{(1, 2): 1}
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import lcm
from typing import Sequence

from .ctengine import SparseMultiPoly, phi_eval1
from .dynamics import asm_count, stationary
from .exact import EisensteinRational, Q_UNIT, Report, invert_unitriangular
from .matchings import (
    NoncrossingMatching, apply_e, check_weak, covers_at, delete_little_arc,
    enumerate_matchings, from_openers, index_map, little_arcs, minimal, nest,
    precedes, rotate, to_dyck, to_openers,
)

__all__ = [
    "chi", "chi_eisenstein", "c_entry", "c_entry_recursive", "c_matrix", "c_tilde",
    "f_polynomial", "psi_vector", "phi_vector", "phi_vector_ct",
    "Report", "verify_product_expansion", "verify_submatching_expansion",
    "verify_nesting", "verify_ev1_expansion", "product_sequences",
    "submatching_window_set", "EPoly", "build_psi_symbolic", "psi_symbolic_all",
    "evaluate_at_matching", "audit_symbolic",
]


def chi(p: int) -> int:
    """The mod-3 character: 0, 1, -1 for p = 0, 1, 2 (mod 3)."""
    return (0, 1, -1)[p % 3]


def chi_eisenstein(p: int) -> EisensteinRational:
    """``(q^p - q^-p) / (q - q^-1)`` computed with cube roots of unity."""
    q = Q_UNIT
    return (q ** p - q ** (-p)) / (q - q ** (-1))


def c_entry(a: Sequence[int], sigma: NoncrossingMatching) -> int:
    """Product over arcs (j, k) of sigma of chi(#{m : j <= a_m < k} - (k-j-1)/2)."""
    a = tuple(a)
    if len(a) != sigma.n:
        raise ValueError("sequence length differs from matching order")
    out = 1
    for j, k in sigma.arcs():
        inside = sum(1 for x in a if j <= x < k)
        out *= chi(inside - (k - j - 1) // 2)
        if not out:
            return 0
    return out


@lru_cache(maxsize=None)
def _c_rec(a: tuple, p0: tuple) -> int:
    if not a:
        return 1
    sigma = NoncrossingMatching._raw(p0)
    j = little_arcs(sigma)[0]
    mult = a.count(j)
    if mult == 0:
        return 0
    # drop one copy of j; the other copies drop to j-1 and larger entries by 2,
    # which is what removing the points j, j+1 does to each contour's range
    rest = list(a)
    rest.remove(j)
    hat = tuple(x if x < j else (x - 1 if x == j else x - 2) for x in rest)
    if hat and hat[0] < 1:
        return 0
    return chi(mult) * _c_rec(hat, delete_little_arc(sigma, j)._p)


def c_entry_recursive(a: Sequence[int], sigma: NoncrossingMatching) -> int:
    """Same quantity via the little-arc deletion recursion; ``a`` may be weak."""
    a = tuple(a)
    check_weak(a)
    if len(a) != sigma.n:
        raise ValueError("sequence length differs from matching order")
    return _c_rec(a, sigma._p)


@lru_cache(maxsize=None)
def _c_matrix(n: int) -> tuple:
    states = enumerate_matchings(n)
    return tuple(tuple(c_entry(to_openers(pi), s) for s in states) for pi in states)


def c_matrix(n: int) -> list:
    """Rows and columns in canonical order."""
    return [list(r) for r in _c_matrix(n)]


@lru_cache(maxsize=None)
def _c_tilde(n: int) -> tuple:
    return tuple(tuple(r) for r in invert_unitriangular(_c_matrix(n)))


def c_tilde(n: int) -> list:
    return [list(r) for r in _c_tilde(n)]


def f_polynomial(pi0: NoncrossingMatching) -> SparseMultiPoly:
    """Row ``pi0`` of C_tilde written as ``sum c_a prod w_j^(2j - a_j)``."""
    k = pi0.n
    if k == 0:
        return SparseMultiPoly.constant(0)
    row = _c_tilde(k)[index_map(k)[pi0]]
    terms = {}
    for coeff, sigma in zip(row, enumerate_matchings(k)):
        if coeff:
            a = to_openers(sigma)
            terms[tuple(2 * (j + 1) - x for j, x in enumerate(a))] = coeff
    return SparseMultiPoly(k, terms)


def psi_vector(n: int) -> list:
    """Stationary law scaled by ASM(n); integers."""
    return stationary(n).alphas()


def phi_vector(n: int) -> list:
    """``C psi``: the all-ones evaluations of the integral basis, matrix route."""
    C = _c_matrix(n)
    psi = psi_vector(n)
    return [sum(c * x for c, x in zip(row, psi)) for row in C]


def phi_vector_ct(n: int) -> list:
    """The same numbers, each computed as a single coefficient."""
    return [phi_eval1(to_openers(pi)) for pi in enumerate_matchings(n)]


# -- executable expansion identities -------------------------------------------

def product_sequences(n: int) -> list:
    """The 2^(n-1) sequences with a_1 = 1 and a_j in {2j-2, 2j-1}."""
    choices = [(1,)] + [(2 * j - 2, 2 * j - 1) for j in range(2, n + 1)]
    return [tuple(c) for c in itertools.product(*choices)]


def _parity_class(n: int, a: Sequence[int]) -> list:
    # matchings whose step at 2j-1 is an up-step exactly when a_j = 2j-1
    out = []
    for pi in enumerate_matchings(n):
        d = to_dyck(pi)
        if all((d[2 * j - 2] == 1) == (a[j - 1] == 2 * j - 1) for j in range(1, n + 1)):
            out.append(pi)
    return out


def verify_product_expansion(n: int) -> Report:
    """phi_a equals the psi-sum over its parity class, for every product sequence."""
    rep = Report(f"product expansion n={n}")
    psi = psi_vector(n)
    idx = index_map(n)
    for a in product_sequences(n):
        rhs = sum(psi[idx[pi]] for pi in _parity_class(n, a))
        rep.record(a, phi_eval1(a), rhs)
    return rep


def submatching_window_set(pi0: NoncrossingMatching, n: int, b: Sequence[int] | None = None) -> list:
    """Matchings of order n that contain ``pi0`` on positions 2..2k+1 and,
    if ``b`` is given, have an up-step at 2j-1 exactly when b_j = 2j-1
    (j = k+2..n)."""
    from .matchings import is_submatching
    k = pi0.n
    out = []
    for pi in enumerate_matchings(n):
        if not is_submatching(pi0, pi, offset=2):
            continue
        if b is not None:
            d = to_dyck(pi)
            if not all((d[2 * j - 2] == 1) == (bj == 2 * j - 1)
                       for j, bj in zip(range(k + 2, n + 1), b)):
                continue
        out.append(pi)
    return out


def verify_submatching_expansion(pi0: NoncrossingMatching, n: int) -> Report:
    """Both the refined and the summed window expansions, at the all-ones point."""
    k = pi0.n
    if not k < n:
        raise ValueError("need order(pi0) < n")
    rep = Report(f"submatching expansion {pi0} n={n}")
    psi = psi_vector(n)
    idx = index_map(n)
    row = _c_tilde(k)[index_map(k)[pi0]] if k else (1,)
    small = enumerate_matchings(k)
    total_lhs = total_rhs = 0
    tails = itertools.product(*[(2 * j - 2, 2 * j - 1) for j in range(k + 2, n + 1)])
    for b in tails:
        lhs = sum(psi[idx[pi]] for pi in submatching_window_set(pi0, n, b))
        rhs = 0
        for coeff, sigma in zip(row, small):
            if coeff:
                a = to_openers(sigma) if k else ()
                rhs += coeff * phi_eval1((1,) + tuple(1 + x for x in a) + tuple(b))
        rep.record(("b", tuple(b)), lhs, rhs)
        total_lhs += lhs
        total_rhs += rhs
    rep.record("summed", total_lhs, total_rhs)
    rep.record("window set", total_lhs, sum(psi[idx[pi]] for pi in submatching_window_set(pi0, n)))
    return rep


def verify_nesting(n: int, p: int) -> Report:
    """C and C_tilde entries at p-nested rows vanish off the nested columns
    and reproduce the order-n entries on them."""
    rep = Report(f"nesting n={n} p={p}")
    big = n + p
    bidx = index_map(big)
    C, Ct = _c_matrix(big), _c_tilde(big)
    sC, sCt = _c_matrix(n), _c_tilde(n)
    small = enumerate_matchings(n)
    nested = {nest(s, p): i for i, s in enumerate(small)}
    for i, s in enumerate(small):
        r = bidx[nest(s, p)]
        for col, mu in enumerate(enumerate_matchings(big)):
            j = nested.get(mu)
            want_c = sC[i][j] if j is not None else 0
            want_t = sCt[i][j] if j is not None else 0
            rep.record(("C", s, mu), C[r][col], want_c)
            rep.record(("C~", s, mu), Ct[r][col], want_t)
    return rep


def verify_ev1_expansion(n: int) -> Report:
    """phi_a (single coefficient) equals ASM(n) * sum_pi mu_pi C[a, pi]."""
    rep = Report(f"all-ones expansion n={n}")
    mu = stationary(n).values
    A = asm_count(n)
    states = enumerate_matchings(n)
    for pi in states:
        a = to_openers(pi)
        rhs = A * sum(m * c_entry(a, s) for m, s in zip(mu, states))
        rep.record(a, Fraction(phi_eval1(a)), rhs)
    return rep


# -- symbolic qKZ polynomials (small n) -----------------------------------------

class EPoly:
    """Polynomial in ``m`` variables with Eisenstein-rational coefficients."""

    __slots__ = ("m", "terms")

    def __init__(self, m: int, terms=None):
        self.m = m
        self.terms = {e: c for e, c in (terms or {}).items() if c}

    @classmethod
    def const(cls, m, c) -> "EPoly":
        return cls(m, {(0,) * m: EisensteinRational.coerce(c)})

    @classmethod
    def linear(cls, m, coeffs: dict) -> "EPoly":
        terms = {}
        for v, c in coeffs.items():
            e = [0] * m
            e[v] = 1
            terms[tuple(e)] = EisensteinRational.coerce(c)
        return cls(m, terms)

    def __add__(self, other: "EPoly") -> "EPoly":
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out[e] + c if e in out else c
        return EPoly(self.m, out)

    def __neg__(self):
        return EPoly(self.m, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, EPoly):
            c = EisensteinRational.coerce(other)
            return EPoly(self.m, {e: x * c for e, x in self.terms.items()})
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = c1 * c2
                out[e] = out[e] + v if e in out else v
        return EPoly(self.m, out)

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, EPoly) and self.terms == other.terms

    def degrees(self) -> set:
        return {sum(e) for e in self.terms}

    def divided_difference(self, j: int) -> "EPoly":
        """``(p(.., z_{j+1}, z_j, ..) - p) / (z_{j+1} - z_j)`` for 0-based j."""
        out: dict = {}

        def add(e, c):
            out[e] = out[e] + c if e in out else c

        for e, c in self.terms.items():
            a, b = e[j], e[j + 1]
            if a == b:
                continue
            lo, d = min(a, b), abs(a - b)
            sign = c if a > b else -c
            # z_j^lo z_{j+1}^lo * sum_i z_{j+1}^i z_j^(d-1-i)
            for i in range(d):
                f = list(e)
                f[j], f[j + 1] = lo + d - 1 - i, lo + i
                add(tuple(f), sign)
        return EPoly(self.m, out)

    def shift_variables(self) -> "EPoly":
        """``p(z_2, ..., z_m, z_1)``."""
        return EPoly(self.m, {e[-1:] + e[:-1]: c for e, c in self.terms.items()})

    def evaluate(self, point: Sequence) -> EisensteinRational:
        # integer pairs (a, b) for a + b q, everything over one common denominator
        pts = [EisensteinRational.coerce(x) for x in point]
        if not self.terms:
            return EisensteinRational(0)
        D = 1
        for x in pts:
            D = lcm(D, x.a.denominator, x.b.denominator)
        E = 1
        for c in self.terms.values():
            E = lcm(E, c.a.denominator, c.b.denominator)
        ipts = [(int(x.a * D), int(x.b * D)) for x in pts]
        top = max(sum(e) for e in self.terms)
        cache = [{0: (1, 0)} for _ in ipts]

        def power(v, k):
            got = cache[v].get(k)
            if got is None:
                a, b = power(v, k - 1)
                c, d = ipts[v]
                got = cache[v][k] = (a * c - b * d, a * d + b * c - b * d)
            return got

        ta = tb = 0
        for e, coef in self.terms.items():
            a, b = int(coef.a * E), int(coef.b * E)
            for v, k in enumerate(e):
                if k:
                    c, d = power(v, k)
                    a, b = a * c - b * d, a * d + b * c - b * d
            scale = D ** (top - sum(e))
            ta += a * scale
            tb += b * scale
        den = E * D ** top
        return EisensteinRational(Fraction(ta, den), Fraction(tb, den))


def _qlin(m: int, i: int, j: int) -> EPoly:
    # q z_i - q^-1 z_j
    return EPoly.linear(m, {i: Q_UNIT, j: -(Q_UNIT ** -1)})


def _psi_min(n: int) -> EPoly:
    m = 2 * n
    out = EPoly.const(m, Fraction(1, (-3) ** (n * (n - 1) // 2)) if n > 1 else 1)
    for half in (range(n), range(n, m)):
        for i, j in itertools.combinations(half, 2):
            out = out * _qlin(m, i, j)
    return out


@lru_cache(maxsize=None)
def psi_symbolic_all(n: int) -> tuple:
    """Every qKZ polynomial of order ``n <= 4`` plus a consistency log.

    Matchings are processed by diagram size. Each one is built from every
    available (predecessor, box) pair, and the results must coincide; the log
    lists how many routes were compared for each matching.
    """
    if n > 4:
        raise ValueError("symbolic construction is limited to n <= 4")
    m = 2 * n
    states = enumerate_matchings(n)
    preimages: dict = {}
    for nu in states:
        for j in range(1, m):
            preimages.setdefault((apply_e(j, nu), j), []).append(nu)
    size = {pi: sum(to_openers(pi)) for pi in states}
    polys: dict = {minimal(n): _psi_min(n)}
    routes: dict = {minimal(n): 1}
    for pi in sorted(states, key=lambda s: size[s]):
        if pi in polys:
            continue
        built = []
        for sigma in states:
            j = covers_at(sigma, pi)
            if j is None:
                continue
            base = polys[sigma]
            val = _qlin(m, j - 1, j) * base.divided_difference(j - 1)
            for nu in preimages.get((sigma, j), []):
                if nu != pi and nu != sigma:
                    val = val - polys[nu]
            built.append(val)
        if not built:
            raise ArithmeticError(f"no predecessor for {pi}")
        if any(b != built[0] for b in built[1:]):
            raise ArithmeticError(f"box-addition order changes the polynomial of {pi}")
        polys[pi] = built[0]
        routes[pi] = len(built)
    return tuple(polys[s] for s in states), tuple(routes[s] for s in states)


def build_psi_symbolic(pi: NoncrossingMatching) -> EPoly:
    polys, _ = psi_symbolic_all(pi.n)
    return polys[index_map(pi.n)[pi]]


def evaluation_point(sigma: NoncrossingMatching) -> list:
    """``z_k = q^(-step_k)`` with steps of the Dyck word."""
    return [Q_UNIT ** (-s) for s in to_dyck(sigma)]


def evaluate_at_matching(poly: EPoly, sigma: NoncrossingMatching) -> EisensteinRational:
    return poly.evaluate(evaluation_point(sigma))


def audit_symbolic(n: int, seed: int = 0, wheel_points: int = 5, sample_pairs: int | None = None) -> Report:
    """Duality at matching points, homogeneity, wheel zeros, all-ones values
    and rotation covariance of the qKZ polynomials of order ``n``."""
    rng = random.Random(seed)
    rep = Report(f"symbolic audit n={n}")
    polys, _ = psi_symbolic_all(n)
    states = enumerate_matchings(n)
    m = 2 * n
    pairs = [(i, j) for i in range(len(states)) for j in range(len(states))]
    if sample_pairs is not None and sample_pairs < len(pairs):
        pairs = rng.sample(pairs, sample_pairs)
    for i, j in pairs:
        want = EisensteinRational(1 if i == j else 0)
        rep.record(("delta", states[i], states[j]), evaluate_at_matching(polys[i], states[j]), want)
    psi = psi_vector(n)
    idx = index_map(n)
    for i, (pi, poly) in enumerate(zip(states, polys)):
        degs = poly.degrees()
        rep.record(("degree", pi), degs, {n * (n - 1)} if n > 1 else {0})
        rep.record(("ones", pi), poly.evaluate([1] * m), EisensteinRational(psi[i]))
        rep.record(("rotation", pi), polys[idx[rotate(pi)]], poly.shift_variables())
        for a, b, c in itertools.combinations(range(m), 3):
            for _ in range(wheel_points if m >= 3 else 0):
                pt = [Fraction(rng.randint(-9, 9), rng.randint(1, 9)) for _ in range(m)]
                zi = Fraction(rng.randint(1, 9), rng.randint(1, 9))
                pt = [EisensteinRational(x) for x in pt]
                pt[a] = EisensteinRational(zi)
                pt[b] = Q_UNIT ** 2 * zi
                pt[c] = Q_UNIT * zi
                rep.record(("wheel", pi, (a, b, c)), poly.evaluate(pt), EisensteinRational(0))
    return rep
