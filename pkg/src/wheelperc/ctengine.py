"""
Sparse multivariate polynomials over the integers and coefficient extraction
from large products.

The products of interest look like

    prod_{i<j} (z_j - z_i)(1 + z_j + z_i z_j)  *  prod_j (1 + z_j)  *  F(z)

and we only ever want one coefficient of them. Expanding fully is hopeless
beyond n = 6, so :func:`extract_coefficient` eliminates variables from the
top down. It multiplies in only the factors whose highest variable is the
current one, keeps the monomials with the target exponent in that variable,
and drops that variable. Monomials that can no longer reach the target
(too large already, or too small even if every remaining factor contributed
its maximal degree) are pruned as soon as they appear.

>>> asm_via_ct(4)
42
>>> phi_eval1((1, 3))
1
"""

from __future__ import annotations

import sys
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .dynamics import asm_count
from .exact import lagrange_interpolate, poly_eval
from .matchings import check_openers, check_weak

__all__ = [
    "SparseMultiPoly", "truncated_multiply", "extract_coefficient",
    "naive_coefficient", "omega_factors", "asm_via_ct", "phi_eval1",
    "submatching_coefficient", "conjecture_probe", "ProbeReport",
    "rational_denominator",
]


class SparseMultiPoly:
    """Polynomial in ``nvars`` variables with integer coefficients.

    ``terms`` maps exponent tuples to nonzero integers. An optional
    ``truncation`` tuple caps each exponent; monomials above a cap are dropped
    on construction and in products.
    """

    __slots__ = ("nvars", "terms", "truncation")

    def __init__(self, nvars: int, terms=None, truncation: Sequence[int] | None = None):
        self.nvars = nvars
        self.truncation = None if truncation is None else tuple(truncation)
        clean = {}
        for e, c in (terms or {}).items():
            e = tuple(e)
            if len(e) != nvars:
                raise ValueError(f"exponent {e} has wrong length")
            if c and self._fits(e):
                clean[e] = clean.get(e, 0) + c
        self.terms = {e: c for e, c in clean.items() if c}

    def _fits(self, e) -> bool:
        t = self.truncation
        return t is None or all(x <= b for x, b in zip(e, t))

    @classmethod
    def constant(cls, nvars: int, c: int = 1) -> "SparseMultiPoly":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def variable(cls, nvars: int, i: int) -> "SparseMultiPoly":
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, {tuple(e): 1})

    @classmethod
    def monomial(cls, exps: Sequence[int], c: int = 1) -> "SparseMultiPoly":
        return cls(len(exps), {tuple(exps): c})

    def _coerce(self, other) -> "SparseMultiPoly":
        if isinstance(other, SparseMultiPoly):
            if other.nvars != self.nvars:
                raise ValueError("mismatched variable counts")
            return other
        return SparseMultiPoly.constant(self.nvars, int(other))

    def __add__(self, other):
        o = self._coerce(other)
        out = dict(self.terms)
        for e, c in o.terms.items():
            out[e] = out.get(e, 0) + c
        return SparseMultiPoly(self.nvars, out, self.truncation)

    __radd__ = __add__

    def __neg__(self):
        return SparseMultiPoly(self.nvars, {e: -c for e, c in self.terms.items()}, self.truncation)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        return truncated_multiply(self, self._coerce(other), self.truncation)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, SparseMultiPoly):
            return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    def __repr__(self):
        return f"SparseMultiPoly({self.nvars}, {self.terms!r})"

    def coefficient(self, exps: Sequence[int]) -> int:
        return self.terms.get(tuple(exps), 0)

    def max_degree(self, v: int) -> int:
        return max((e[v] for e in self.terms), default=0)

    def min_degree(self, v: int) -> int:
        return min((e[v] for e in self.terms), default=0)

    def variables(self) -> list:
        return [v for v in range(self.nvars) if any(e[v] for e in self.terms)]

    def top_variable(self) -> int:
        vs = self.variables()
        return vs[-1] if vs else -1

    def total_degrees(self) -> set:
        return {sum(e) for e in self.terms}

    def embed(self, nvars: int, offset: int) -> "SparseMultiPoly":
        """Same polynomial with variable ``i`` renamed to ``i + offset``."""
        out = {}
        for e, c in self.terms.items():
            f = [0] * nvars
            f[offset:offset + self.nvars] = e
            out[tuple(f)] = c
        return SparseMultiPoly(nvars, out)

    def evaluate(self, point: Sequence):
        total = 0
        for e, c in self.terms.items():
            t = c
            for x, k in zip(point, e):
                if k:
                    t = t * x ** k
            total += t
        return total

    def emit(self, stream=None) -> None:
        stream = stream or sys.stdout
        for e in sorted(self.terms):
            print(" ".join(map(str, e)) + ": " + str(self.terms[e]), file=stream)


def truncated_multiply(P: SparseMultiPoly, Q: SparseMultiPoly, truncation=None) -> SparseMultiPoly:
    if P.nvars != Q.nvars:
        raise ValueError("mismatched variable counts")
    t = None if truncation is None else tuple(truncation)
    out: dict = defaultdict(int)
    for e1, c1 in P.terms.items():
        for e2, c2 in Q.terms.items():
            e = tuple(a + b for a, b in zip(e1, e2))
            if t is not None and any(x > b for x, b in zip(e, t)):
                continue
            out[e] += c1 * c2
    return SparseMultiPoly(P.nvars, out, t)


# -- the elimination engine ---------------------------------------------------

@dataclass
class _Stats:
    max_support: int = 0
    supports: list = field(default_factory=list)


def extract_coefficient(factors: Iterable[SparseMultiPoly], targets: Sequence[int],
                        stats: _Stats | None = None, trace=None, dump: bool = False) -> int:
    """Coefficient of ``prod z_v**targets[v]`` in the product of ``factors``.

    With a ``trace`` stream the support size after each variable is written
    there. ``dump`` also writes the surviving terms as ``exponents: coefficient``.
    """
    factors = list(factors)
    nv = len(targets)
    targets = tuple(targets)
    if any(t < 0 for t in targets):
        return 0
    scalar = 1
    groups: list = [[] for _ in range(nv)]
    for f in factors:
        if f.nvars != nv:
            raise ValueError("factor has wrong number of variables")
        if not f.terms:
            return 0
        top = f.top_variable()
        if top < 0:
            scalar *= f.terms[(0,) * nv]
        else:
            groups[top].append(f)

    # packed monomials: variable v lives in bits [v*B, (v+1)*B)
    maxdeg = max([t for t in targets] + [f.max_degree(v) for f in factors for v in range(nv)] + [1])
    B = (2 * maxdeg + 2).bit_length()
    mask = (1 << B) - 1

    # remaining max/min degree per variable over factors not yet multiplied in
    rem_max = [0] * nv
    rem_min = [0] * nv
    for f in factors:
        for v in f.variables():
            rem_max[v] += f.max_degree(v)
            rem_min[v] += f.min_degree(v)

    P = {0: scalar}
    for top in range(nv - 1, -1, -1):
        for f in groups[top]:
            fvars = f.variables()
            for v in fvars:
                rem_max[v] -= f.max_degree(v)
                rem_min[v] -= f.min_degree(v)
            # bounds on the exponent of each touched variable after this factor
            bounds = [(v * B, targets[v] - rem_max[v], targets[v] - rem_min[v]) for v in fvars]
            fterms = []
            for e, c in f.terms.items():
                key = 0
                for v in fvars:
                    key |= e[v] << (v * B)
                fterms.append((key, c, tuple(e[v] for v in fvars)))
            Q: dict = defaultdict(int)
            for key, c in P.items():
                cur = tuple((key >> sh) & mask for sh, _, _ in bounds)
                for fkey, fc, de in fterms:
                    ok = True
                    for (sh, lo, hi), x, d in zip(bounds, cur, de):
                        y = x + d
                        if y < lo or y > hi:
                            ok = False
                            break
                    if ok:
                        Q[key + fkey] += c * fc
            P = {k: c for k, c in Q.items() if c}
            if stats is not None:
                stats.max_support = max(stats.max_support, len(P))
            if not P:
                return 0
        sh = top * B
        want = targets[top]
        strip = want << sh
        P = {k - strip: c for k, c in P.items() if (k >> sh) & mask == want}
        if stats is not None:
            stats.supports.append(len(P))
        if trace is not None:
            print(f"variable {top + 1}: support {len(P)}", file=trace)
            if dump:
                for key in sorted(P):
                    exps = " ".join(str((key >> (v * B)) & mask) for v in range(top))
                    print(f"{exps}: {P[key]}", file=trace)
        if not P:
            return 0
    return P.get(0, 0)


def naive_coefficient(factors: Iterable[SparseMultiPoly], targets: Sequence[int]) -> int:
    """Reference route: full expansion, then a lookup."""
    factors = list(factors)
    nv = len(targets)
    acc = SparseMultiPoly.constant(nv)
    for f in factors:
        acc = truncated_multiply(acc, f)
    return acc.coefficient(targets)


def _pair_factor(nv: int, i: int, j: int) -> SparseMultiPoly:
    # (z_j - z_i)(1 + z_j + z_i z_j), 0-based i < j
    def mono(di, dj):
        e = [0] * nv
        e[i] += di
        e[j] += dj
        return tuple(e)
    return SparseMultiPoly(nv, {
        mono(0, 2): 1, mono(1, 2): 1, mono(0, 1): 1,
        mono(1, 1): -1, mono(2, 1): -1, mono(1, 0): -1,
    })


def _one_plus(nv: int, j: int) -> SparseMultiPoly:
    e = [0] * nv
    e[j] = 1
    return SparseMultiPoly(nv, {(0,) * nv: 1, tuple(e): 1})


def omega_factors(n: int, plus_from: int | None = 2) -> list:
    """Pair factors for ``1 <= i < j <= n`` and ``(1 + z_j)`` for
    ``j >= plus_from`` (1-based; ``None`` for none)."""
    out = [_pair_factor(n, i, j) for j in range(n) for i in range(j)]
    if plus_from is not None:
        out += [_one_plus(n, j - 1) for j in range(plus_from, n + 1)]
    return out


def _staircase(n: int) -> tuple:
    return tuple(2 * j for j in range(n))


def asm_via_ct(n: int, stats: _Stats | None = None, trace=None, dump: bool = False) -> int:
    """The ASM count obtained as a single coefficient of a product."""
    if n < 1:
        raise ValueError("n must be positive")
    return extract_coefficient(omega_factors(n, 2), _staircase(n), stats, trace, dump)


def phi_eval1(a: Sequence[int]) -> int:
    """Coefficient of ``prod u_j**(a_j - 1)`` in the pair product (no ``1+u`` factors)."""
    a = tuple(a)
    check_weak(a)
    n = len(a)
    return extract_coefficient(omega_factors(n, None), tuple(x - 1 for x in a))


def submatching_coefficient(F: SparseMultiPoly, n: int, check_linearity: bool = False,
                            stats: _Stats | None = None, trace=None, dump: bool = False) -> int:
    """Staircase coefficient of ``F(z_2..z_{k+1})`` times the pair product times
    ``prod_{j=k+2}^n (1+z_j)``. Dividing by ASM(n) gives an event probability
    when ``F`` comes from :func:`wheelperc.qkz.f_polynomial`."""
    k = F.nvars
    if n < k + 1:
        raise ValueError(f"need n >= k+1 (k={k}, n={n})")
    factors = omega_factors(n, k + 2)
    full = extract_coefficient(factors + [F.embed(n, 1)], _staircase(n), stats, trace, dump)
    if check_linearity and len(F.terms) > 1:
        # the coefficient is linear in F: summing monomial by monomial must agree
        parts = sum(c * extract_coefficient(factors + [SparseMultiPoly.monomial(e).embed(n, 1)],
                                            _staircase(n))
                    for e, c in F.terms.items())
        if parts != full:
            raise ArithmeticError(f"linearity check failed: {parts} != {full}")
    return full


# -- conjecture probe -----------------------------------------------------------

def rational_denominator(k: int, n) -> Fraction:
    """``prod_{j=1}^k (4n^2 - (2j-1)^2)^(k+1-j)``.

    The factors run over odd squares. With ``j**2`` in place of ``(2j-1)**2``
    the two-arc law already fails to have a polynomial numerator.
    """
    out = Fraction(1)
    for j in range(1, k + 1):
        out *= (4 * Fraction(n) ** 2 - (2 * j - 1) ** 2) ** (k + 1 - j)
    return out


@dataclass
class ProbeReport:
    openers: tuple
    degree_in_n2: int
    fit_nodes: list
    held_out: list
    coefficients: list  # of the fitted polynomial in m = n^2, constant first
    values: dict        # n -> scaled value
    consistent: bool
    dyadic: bool

    def numerator(self, n) -> Fraction:
        return poly_eval(self.coefficients, Fraction(n) ** 2)


def conjecture_probe(a: Sequence[int], n_values: Sequence[int] | None = None) -> ProbeReport:
    """Fit the perturbed-staircase coefficient to the conjectured rational shape.

    For the monomial ``prod z_{j+1}**(2j - a_j)`` the coefficient is divided by
    ASM(n) and multiplied by the structured denominator. The result should be
    a polynomial in ``n**2`` of degree ``k(k+1)/2``. The first
    ``k(k+1)/2 + 1`` values of ``n`` determine the fit and the rest are
    held out as checks.
    """
    a = tuple(a)
    k = len(a)
    if k:
        check_openers(a)
    deg = k * (k + 1) // 2
    if n_values is None:
        n_values = list(range(k + 1, k + 1 + deg + 2))
    n_values = sorted(n_values)
    if len(n_values) < deg + 1:
        raise ValueError(f"need at least {deg + 1} values of n for degree {deg}")
    if n_values[0] < k + 1:
        raise ValueError("values of n must be at least k + 1")
    F = SparseMultiPoly.monomial([2 * (j + 1) - x for j, x in enumerate(a)]) if k else None
    values = {}
    for n in n_values:
        if k:
            c = submatching_coefficient(F, n)
        else:
            c = asm_via_ct(n)
        values[n] = Fraction(c, asm_count(n)) * rational_denominator(k, n)
    fit = n_values[:deg + 1]
    held = n_values[deg + 1:]
    coeffs = lagrange_interpolate([(n * n, values[n]) for n in fit])
    ok = all(poly_eval(coeffs, n * n) == values[n] for n in held)
    dyadic = all((c.denominator & (c.denominator - 1)) == 0 for c in coeffs)
    return ProbeReport(a, deg, fit, held, coeffs, values, ok, dyadic)
