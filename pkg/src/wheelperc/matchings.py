"""
Noncrossing matchings of [1, 2n] and the elementary operators acting on them.

A matching is stored as a tuple of 0-based partners, but every public
function speaks 1-based positions. Three encodings are supported:

* the involution itself (``pairing``),
* the Dyck word, ``+1`` where a point opens an arc and ``-1`` where it closes,
* the opener sequence ``(a_1, ..., a_n)`` of positions where the Dyck word
  steps up (strictly increasing, ``a_j <= 2j - 1``).

The Young diagram of a matching is the region between its Dyck path and the
mountain ``+^n -^n``; its parts are ``a_r - r`` read from the largest ``r``.
Containment of diagrams is the partial order used for the C matrices.

>>> pi = NoncrossingMatching.from_arcs([(1, 4), (2, 3)])
>>> to_openers(pi)
(1, 2)
>>> apply_e(1, pi).arcs()
[(1, 2), (3, 4)]
"""

from __future__ import annotations

import json
from functools import lru_cache
from math import comb
from typing import Iterable, Sequence

__all__ = [
    "NoncrossingMatching", "catalan", "enumerate_matchings", "index_map",
    "minimal", "maximal", "is_noncrossing", "to_dyck", "to_openers",
    "from_openers", "from_dyck", "check_openers", "check_weak",
    "apply_e", "rotate", "rotate_inverse", "delete_little_arc",
    "nest", "nest_openers", "is_submatching", "young", "precedes",
    "covers_at", "little_arcs", "parse_matching", "weak_sequences",
]


def catalan(n: int) -> int:
    return comb(2 * n, n) // (n + 1)


def is_noncrossing(p0: Sequence[int]) -> bool:
    """Check a 0-based partner sequence: fixed-point-free involution, no crossings."""
    m = len(p0)
    if m % 2:
        return False
    for i, j in enumerate(p0):
        if not 0 <= j < m or j == i or p0[j] != i:
            return False
    # stack check: arcs must close in LIFO order
    stack = []
    for i, j in enumerate(p0):
        if j > i:
            stack.append(i)
        else:
            if not stack or stack.pop() != j:
                return False
    return True


class NoncrossingMatching:
    """Immutable noncrossing perfect matching of [1, 2n]."""

    __slots__ = ("_p",)

    def __init__(self, pairing: Iterable[int]):
        p0 = tuple(int(x) - 1 for x in pairing)
        if not is_noncrossing(p0):
            raise ValueError(f"not a noncrossing matching: {tuple(pairing)}")
        object.__setattr__(self, "_p", p0)

    @classmethod
    def _raw(cls, p0: tuple) -> "NoncrossingMatching":
        # trusted constructor for hot loops: p0 is 0-based and already valid
        obj = object.__new__(cls)
        object.__setattr__(obj, "_p", p0)
        return obj

    @classmethod
    def from_arcs(cls, arcs: Iterable[Sequence[int]]) -> "NoncrossingMatching":
        arcs = [tuple(a) for a in arcs]
        m = 2 * len(arcs)
        p = [0] * m
        seen = set()
        for a, b in arcs:
            if not (1 <= a <= m and 1 <= b <= m) or a in seen or b in seen or a == b:
                raise ValueError(f"bad arc list {arcs}")
            seen.update((a, b))
            p[a - 1], p[b - 1] = b, a
        return cls(p)

    def __setattr__(self, key, value):
        raise AttributeError("NoncrossingMatching is immutable")

    def __reduce__(self):
        return (NoncrossingMatching, (self.pairing,))

    @property
    def n(self) -> int:
        return len(self._p) // 2

    @property
    def pairing(self) -> tuple:
        """1-based partners: ``pairing[i-1]`` is the point matched to ``i``."""
        return tuple(j + 1 for j in self._p)

    def partner(self, i: int) -> int:
        return self._p[i - 1] + 1

    def arcs(self) -> list:
        return [(i + 1, j + 1) for i, j in enumerate(self._p) if i < j]

    def to_json(self) -> str:
        return json.dumps([list(a) for a in self.arcs()])

    def __eq__(self, other):
        return isinstance(other, NoncrossingMatching) and self._p == other._p

    def __hash__(self):
        return hash(self._p)

    def __repr__(self):
        body = ",".join(f"{a}-{b}" for a, b in self.arcs())
        return f"NC({body})"


def parse_matching(text: str) -> NoncrossingMatching:
    """Accept a JSON arc list ``[[1,4],[2,3]]`` or an opener sequence ``1,2``."""
    text = text.strip()
    if text.startswith("["):
        arcs = json.loads(text)
        if not arcs:
            return NoncrossingMatching(())
        return NoncrossingMatching.from_arcs(arcs)
    if not text:
        return NoncrossingMatching(())
    return from_openers(tuple(int(x) for x in text.split(",")))


# -- encodings ---------------------------------------------------------------

def to_dyck(pi: NoncrossingMatching) -> tuple:
    return tuple(1 if j > i else -1 for i, j in enumerate(pi._p))


def to_openers(pi: NoncrossingMatching) -> tuple:
    return tuple(i + 1 for i, j in enumerate(pi._p) if j > i)


def check_openers(a: Sequence[int]) -> None:
    for j, x in enumerate(a, start=1):
        if not 1 <= x <= 2 * j - 1:
            raise ValueError(f"opener sequence {tuple(a)}: a_{j}={x} outside [1, {2*j-1}]")
        if j > 1 and x <= a[j - 2]:
            raise ValueError(f"opener sequence {tuple(a)} is not strictly increasing")


def check_weak(a: Sequence[int]) -> None:
    for j, x in enumerate(a, start=1):
        if not 1 <= x <= 2 * j - 1:
            raise ValueError(f"sequence {tuple(a)}: a_{j}={x} outside [1, {2*j-1}]")
        if j > 1 and x < a[j - 2]:
            raise ValueError(f"sequence {tuple(a)} is not weakly increasing")


def from_dyck(steps: Sequence[int]) -> NoncrossingMatching:
    p = [0] * len(steps)
    stack = []
    for i, s in enumerate(steps):
        if s == 1:
            stack.append(i)
        elif s == -1:
            if not stack:
                raise ValueError("Dyck word goes below zero")
            j = stack.pop()
            p[i], p[j] = j, i
        else:
            raise ValueError("Dyck steps must be +1 or -1")
    if stack:
        raise ValueError("Dyck word does not return to zero")
    return NoncrossingMatching._raw(tuple(p))


def from_openers(a: Sequence[int]) -> NoncrossingMatching:
    check_openers(a)
    n = len(a)
    steps = [-1] * (2 * n)
    for x in a:
        steps[x - 1] = 1
    return from_dyck(steps)


# -- enumeration and the Young-diagram order ---------------------------------

def young(pi: NoncrossingMatching) -> tuple:
    """Young diagram parts (weakly decreasing, length n-1, zero padded)."""
    a = to_openers(pi)
    n = len(a)
    parts = tuple(a[r] - (r + 1) for r in range(n - 1, 0, -1))
    return parts


def _gen_openers(n: int):
    def rec(prefix, j):
        if j > n:
            yield tuple(prefix)
            return
        lo = prefix[-1] + 1 if prefix else 1
        for x in range(lo, 2 * j):
            prefix.append(x)
            yield from rec(prefix, j + 1)
            prefix.pop()
    yield from rec([], 1)


@lru_cache(maxsize=None)
def enumerate_matchings(n: int) -> tuple:
    """All of NC_n in canonical order.

    Matchings are sorted by their 1-based partner tuple, ascending. This puts
    the full staircase first and the nested matching last, refines the
    reverse of the containment order, and reproduces the published C_4 and
    inverse matrices entry for entry.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        return (NoncrossingMatching._raw(()),)
    out = [from_openers(a) for a in _gen_openers(n)]
    out.sort(key=lambda m: m._p)
    return tuple(out)


@lru_cache(maxsize=None)
def index_map(n: int) -> dict:
    return {pi: i for i, pi in enumerate(enumerate_matchings(n))}


def weak_sequences(n: int):
    """Iterate over the weakly increasing sequences with a_j <= 2j - 1."""
    def rec(prefix, j):
        if j > n:
            yield tuple(prefix)
            return
        lo = prefix[-1] if prefix else 1
        for x in range(lo, 2 * j):
            prefix.append(x)
            yield from rec(prefix, j + 1)
            prefix.pop()
    yield from rec([], 1)


def minimal(n: int) -> NoncrossingMatching:
    """n nested arcs; empty Young diagram."""
    return NoncrossingMatching._raw(tuple(2 * n - 1 - i for i in range(2 * n)))


def maximal(n: int) -> NoncrossingMatching:
    """n nearest-neighbour arcs; full staircase."""
    return NoncrossingMatching._raw(tuple(i + 1 if i % 2 == 0 else i - 1 for i in range(2 * n)))


def precedes(pi: NoncrossingMatching, sigma: NoncrossingMatching) -> bool:
    """True iff the Young diagram of ``pi`` is contained in that of ``sigma``."""
    if pi.n != sigma.n:
        raise ValueError("matchings of different order")
    return all(x <= y for x, y in zip(to_openers(pi), to_openers(sigma)))


def covers_at(pi: NoncrossingMatching, sigma: NoncrossingMatching):
    """Return j if sigma's diagram is pi's plus one box above positions j, j+1."""
    if pi.n != sigma.n:
        raise ValueError("matchings of different order")
    dp, ds = to_dyck(pi), to_dyck(sigma)
    diff = [i for i in range(len(dp)) if dp[i] != ds[i]]
    if len(diff) != 2 or diff[1] != diff[0] + 1:
        return None
    j = diff[0]
    if dp[j] == 1 and dp[j + 1] == -1:
        return j + 1
    return None


# -- operators ---------------------------------------------------------------

def _e0(p: tuple, k0: int) -> tuple:
    # Temperley-Lieb e on 0-based partner tuple, k0 in [0, 2n), cyclic
    m = len(p)
    k1 = k0 + 1 if k0 + 1 < m else 0
    a = p[k0]
    if a == k1:
        return p
    b = p[k1]
    q = list(p)
    q[k0], q[k1], q[a], q[b] = k1, k0, b, a
    return tuple(q)


def apply_e(k: int, pi: NoncrossingMatching) -> NoncrossingMatching:
    """Match k with k+1 (k+1 read as 1 when k = 2n) and join their old partners."""
    m = len(pi._p)
    if not 1 <= k <= m:
        raise ValueError(f"e_{k} undefined for order {pi.n}")
    q = _e0(pi._p, k - 1)
    return pi if q is pi._p else NoncrossingMatching._raw(q)


def _rot0(p: tuple, shift: int = 1) -> tuple:
    m = len(p)
    q = [0] * m
    for i, j in enumerate(p):
        q[(i + shift) % m] = (j + shift) % m
    return tuple(q)


def rotate(pi: NoncrossingMatching) -> NoncrossingMatching:
    """Label shift i -> i+1 (mod 2n): every arc moves one step forward."""
    if pi.n == 0:
        return pi
    return NoncrossingMatching._raw(_rot0(pi._p, 1))


def rotate_inverse(pi: NoncrossingMatching) -> NoncrossingMatching:
    if pi.n == 0:
        return pi
    return NoncrossingMatching._raw(_rot0(pi._p, -1))


def little_arcs(pi: NoncrossingMatching) -> list:
    """Positions j (1-based, j <= 2n-1) with j matched to j+1."""
    return [i + 1 for i, j in enumerate(pi._p) if j == i + 1]


def delete_little_arc(pi: NoncrossingMatching, j: int) -> NoncrossingMatching:
    p = pi._p
    if not (1 <= j < len(p)) or p[j - 1] != j:
        raise ValueError(f"{j} and {j + 1} are not matched in {pi}")
    lo = j - 1

    def relabel(x):
        return x if x < lo else x - 2

    q = tuple(relabel(p[i]) for i in range(len(p)) if i not in (lo, lo + 1))
    return NoncrossingMatching._raw(q)


def nest(pi: NoncrossingMatching, p: int = 1) -> NoncrossingMatching:
    """Wrap ``pi`` in ``p`` large arcs (order grows by p)."""
    if p < 0:
        raise ValueError("nesting depth must be nonnegative")
    m = len(pi._p)
    total = m + 2 * p
    q = [0] * total
    for i in range(p):
        q[i], q[total - 1 - i] = total - 1 - i, i
    for i, j in enumerate(pi._p):
        q[i + p] = j + p
    return NoncrossingMatching._raw(tuple(q))


def nest_openers(a: Sequence[int], p: int) -> tuple:
    return tuple(range(1, p + 1)) + tuple(p + x for x in a)


def is_submatching(pi0: NoncrossingMatching, pi: NoncrossingMatching, offset: int = 1) -> bool:
    """Does ``pi`` restricted to [offset, offset + 2k - 1] equal ``pi0`` shifted?"""
    w = len(pi0._p)
    if offset < 1 or offset + w - 1 > len(pi._p):
        raise ValueError("submatching window out of range")
    base = offset - 1
    p = pi._p
    return all(p[base + i] == base + j for i, j in enumerate(pi0._p))
