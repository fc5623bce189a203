"""
Markov dynamics on noncrossing matchings.

Two generators share the same stationary law. One applies a uniformly random
Temperley-Lieb operator. The other glues a row of ``2n`` random plaquettes
below the cylinder boundary.

Plaquette convention. A plaquette joins its four edge midpoints in one of two
ways. Type 0 joins top to right and bottom to left, so a row of type-0 tiles
shifts every strand one step forward, which is :func:`rotate`. Type 1 joins
top to left and bottom to right. Bit ``k`` of a row (1-based) controls the
tile below boundary point ``k + 1`` (cyclically). With this labelling a row
whose only 1 is bit ``k`` acts as ``rotate(apply_e(k, .))``.

>>> stationary(3).alphas()
[2, 1, 1, 2, 1]
>>> asm_count(5)
429
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Sequence

from .exact import Report, matmul, nullspace_1d
from .matchings import (
    NoncrossingMatching, _e0, _rot0, apply_e, enumerate_matchings, index_map,
    maximal, minimal, rotate, rotate_inverse,
)

__all__ = [
    "asm_count", "s_matrix", "hamiltonian", "stationary", "CatalanVector",
    "row_diagram", "apply_row", "transfer_matrix", "transfer_at",
    "rotation_permutation", "TransferMatrix", "verify_dynamics",
]


def asm_count(n: int) -> int:
    """Number of n x n alternating sign matrices."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    num = den = 1
    for j in range(n):
        num *= factorial(3 * j + 1)
        den *= factorial(n + j)
    return num // den


def s_matrix(n: int) -> list:
    """Sparse rows ``{column: count}`` of ``S[pi, sigma] = #{k : e_k(pi) = sigma}``."""
    states = enumerate_matchings(n)
    idx = index_map(n)
    rows = []
    for pi in states:
        row: dict = {}
        for k0 in range(2 * n):
            j = idx[NoncrossingMatching._raw(_e0(pi._p, k0))]
            row[j] = row.get(j, 0) + 1
        rows.append(row)
    return rows


def hamiltonian(n: int) -> list:
    """Sparse rows of ``2n I - S``."""
    rows = []
    for i, srow in enumerate(s_matrix(n)):
        row = {j: -v for j, v in srow.items()}
        row[i] = row.get(i, 0) + 2 * n
        rows.append({j: v for j, v in row.items() if v})
    return rows


def dense(rows: Sequence[dict], size: int | None = None) -> list:
    size = len(rows) if size is None else size
    out = [[0] * size for _ in rows]
    for i, r in enumerate(rows):
        for j, v in r.items():
            out[i][j] = v
    return out


@dataclass(frozen=True)
class CatalanVector:
    """Exact values indexed by NC_n in canonical order."""

    n: int
    values: tuple

    def __getitem__(self, pi: NoncrossingMatching):
        return self.values[index_map(self.n)[pi]]

    def items(self):
        return zip(enumerate_matchings(self.n), self.values)

    def alphas(self) -> list:
        """Entries rescaled by ASM(n); integers for the stationary law."""
        a = asm_count(self.n)
        out = []
        for v in self.values:
            x = Fraction(v) * a
            if x.denominator != 1:
                raise ArithmeticError(f"entry {v} is not a multiple of 1/{a}")
            out.append(int(x))
        return out


_STATIONARY: dict = {}


def stationary(n: int) -> CatalanVector:
    """The stationary law: the probability vector killed by the Hamiltonian."""
    if n not in _STATIONARY:
        if n == 0:
            vec = [Fraction(1)]
        else:
            vec = nullspace_1d(hamiltonian(n))
        _STATIONARY[n] = CatalanVector(n, tuple(vec))
    return _STATIONARY[n]


# -- plaquette rows ----------------------------------------------------------

TOP, RIGHT, BOTTOM, LEFT = range(4)
# side reached from each entry side, per tile type
_TILE = (
    {TOP: RIGHT, RIGHT: TOP, BOTTOM: LEFT, LEFT: BOTTOM},
    {TOP: LEFT, LEFT: TOP, BOTTOM: RIGHT, RIGHT: BOTTOM},
)


def _tile_types(bits: Sequence[int]) -> list:
    """Tile type under each boundary point (0-based), from 1-based row bits."""
    m = len(bits)
    types = [0] * m
    for k in range(m):  # bit k+1 sits under point k+2, i.e. 0-based (k+1) % m
        types[(k + 1) % m] = bits[k]
    return types


def _compose0(p: tuple, bits: Sequence[int]) -> tuple:
    m = len(p)
    if len(bits) != m:
        raise ValueError("row length must equal 2n")
    types = _tile_types(bits)
    out = [-1] * m
    for start in range(m):
        if out[start] >= 0:
            continue
        col, side = start, BOTTOM
        while True:
            exit_side = _TILE[types[col]][side]
            if exit_side == BOTTOM:
                break
            if exit_side == RIGHT:
                col, side = (col + 1) % m, LEFT
            elif exit_side == LEFT:
                col, side = (col - 1) % m, RIGHT
            else:  # up into the existing matching and back down
                col, side = p[col], TOP
        out[start], out[col] = col, start
    return tuple(out)


def row_diagram(bits: Sequence[int]) -> list:
    """Connectivity of one plaquette row as a pairing of its ``4n`` ends.

    Ends ``1..2n`` are the top points and ``2n+1..4n`` the bottom points.
    Strands may also close into loops, which are dropped.
    """
    m = len(bits)
    types = _tile_types(bits)
    partner = [0] * (2 * m)
    for end in range(2 * m):
        col, side = (end, TOP) if end < m else (end - m, BOTTOM)
        while True:
            exit_side = _TILE[types[col]][side]
            if exit_side == TOP:
                partner[end] = col + 1
                break
            if exit_side == BOTTOM:
                partner[end] = m + col + 1
                break
            if exit_side == RIGHT:
                col, side = (col + 1) % m, LEFT
            else:
                col, side = (col - 1) % m, RIGHT
    return partner


def apply_row(bits: Sequence[int], pi: NoncrossingMatching) -> NoncrossingMatching:
    """New boundary matching after gluing one plaquette row below ``pi``."""
    return NoncrossingMatching._raw(_compose0(pi._p, tuple(bits)))


def rotation_permutation(n: int) -> list:
    """``perm[i]`` is the canonical index of ``rotate`` of state ``i``."""
    idx = index_map(n)
    return [idx[NoncrossingMatching._raw(_rot0(pi._p, 1))] for pi in enumerate_matchings(n)]


@dataclass(frozen=True)
class TransferMatrix:
    """Entries as counts per row weight.

    ``counts[i][j][w]`` is the number of rows with ``w`` type-1 tiles that
    send state ``i`` to state ``j``, so the entry is the polynomial
    ``sum_w counts[w] p**w (1-p)**(2n-w)``.
    """

    n: int
    counts: tuple

    def at(self, p) -> list:
        p = Fraction(p)
        m = 2 * self.n
        weights = [p ** w * (1 - p) ** (m - w) for w in range(m + 1)]
        return [[sum(c * weights[w] for w, c in enumerate(cell)) for cell in row] for row in self.counts]

    def coefficients(self, i: int, j: int) -> list:
        """Power-basis coefficients in p of entry (i, j)."""
        m = 2 * self.n
        coeffs = [0] * (m + 1)
        for w, c in enumerate(self.counts[i][j]):
            if not c:
                continue
            # p^w (1-p)^(m-w) = sum_t C(m-w, t) (-1)^t p^(w+t)
            b = 1
            for t in range(m - w + 1):
                coeffs[w + t] += c * b * (-1) ** t
                b = b * (m - w - t) // (t + 1)
        return coeffs

    def derivative_at_zero(self) -> list:
        N = len(self.counts)
        return [[self.coefficients(i, j)[1] for j in range(N)] for i in range(N)]


_TRANSFER: dict = {}


def transfer_matrix(n: int) -> TransferMatrix:
    """Enumerate all ``2**(2n)`` rows; meant as an oracle for n <= 6."""
    if n > 6:
        raise ValueError("transfer_matrix enumerates 4**n rows; n <= 6 supported")
    if n in _TRANSFER:
        return _TRANSFER[n]
    states = enumerate_matchings(n)
    idx = index_map(n)
    N, m = len(states), 2 * n
    counts = [[[0] * (m + 1) for _ in range(N)] for _ in range(N)]
    for bits in itertools.product((0, 1), repeat=m):
        w = sum(bits)
        for i, pi in enumerate(states):
            j = idx[NoncrossingMatching._raw(_compose0(pi._p, bits))]
            counts[i][j][w] += 1
    tm = TransferMatrix(n, tuple(tuple(tuple(c) for c in row) for row in counts))
    _TRANSFER[n] = tm
    return tm


def transfer_at(n: int, p) -> list:
    return transfer_matrix(n).at(p)


def verify_dynamics(n: int, ps=(Fraction(1, 4), Fraction(1, 2), Fraction(3, 4))) -> Report:
    """Stationarity, normalization and symmetry of the exact law at order n.

    The transfer-matrix checks run for n <= 5 and the plaquette labelling and
    commutation checks for n <= 4, where full enumeration is cheap.
    """
    rep = Report(f"dynamics n={n}")
    mu = stationary(n)
    states = enumerate_matchings(n)
    N = len(states)
    alphas = mu.alphas()
    asm = asm_count(n)
    rep.record("sum of weights", sum(alphas), asm)
    rep.record("min weight", min(alphas), 1)
    rep.record("weight of nested", mu[minimal(n)] * asm, 1)
    rep.record("max weight", max(alphas), asm_count(n - 1))
    rep.record("weight of staircase", mu[maximal(n)] * asm, asm_count(n - 1))
    perm = rotation_permutation(n)
    rep.record("rotation invariance", [alphas[perm[i]] for i in range(N)], alphas)
    killed = [0] * N
    for i, row in enumerate(hamiltonian(n)):
        for j, v in row.items():
            killed[j] += mu.values[i] * v
    rep.record("H annihilates", killed, [0] * N)
    if n <= 5:
        tm = transfer_matrix(n)
        vec = [list(mu.values)]
        for p in ps:
            T = tm.at(p)
            rep.record(f"T({p}) stochastic", [sum(r) for r in T], [1] * N)
            rep.record(f"T({p}) stationary", matmul(vec, T)[0], list(mu.values))
    if n <= 4:
        a, b = tm.at(Fraction(1, 3)), tm.at(Fraction(1, 5))
        rep.record("T(1/3), T(1/5) commute", matmul(a, b), matmul(b, a))
        # H = -R^{-1} T'(0) with R the rotation permutation matrix
        r_inv = [[1 if perm[j] == i else 0 for j in range(N)] for i in range(N)]
        minus_h = [[-x for x in row] for row in dense(hamiltonian(n), N)]
        rep.record("H from T'(0)", matmul(r_inv, tm.derivative_at_zero()), minus_h)
        m = 2 * n
        for pi in states:
            rep.record("zero row rotates", apply_row((0,) * m, pi), rotate(pi))
            rep.record("full row rotates back", apply_row((1,) * m, pi), rotate_inverse(pi))
            for k in range(1, m + 1):
                bits = tuple(1 if i == k - 1 else 0 for i in range(m))
                rep.record(f"row with bit {k}", apply_row(bits, pi), rotate(apply_e(k, pi)))
    return rep
