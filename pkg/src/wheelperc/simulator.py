"""
Monte Carlo sampler for the boundary connectivity of the cylinder.

Diagrams are drawn i.i.d. and stacked outward from the boundary. Only the
current frontier is kept. Each of its ``2n`` slots holds an open strand end,
and ``mate`` sends an end to the other end of its strand, or to the boundary
point the strand started from. The boundary matching is complete once every
boundary strand has closed. Because the stack is stationary, the result is
an exact draw from the stationary law.

>>> import numpy as np
>>> sample_matching(1, np.random.default_rng(0))
NC(1-2)
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

import numpy as np
from scipy import stats

from .dynamics import row_diagram
from .matchings import NoncrossingMatching, parse_matching

__all__ = [
    "FrontierState", "SamplerStuck", "sample_partners", "sample_matching",
    "SampleStats", "estimate_event", "clopper_pearson", "SubmatchingEvent",
    "AntiClusterEvent", "PairsEvent", "parse_event", "histogram",
    "chi_square_pvalue", "BACKENDS",
]

BACKENDS = ("stack", "plaquette")
CHUNK = 10_000
_BATCH = 4096


class SamplerStuck(RuntimeError):
    pass


class FrontierState:
    """Open strand ends along the frontier and the matches found so far."""

    def __init__(self, n: int):
        self.n = n
        self.slots = list(range(2 * n))
        # boundary point i (1-based) is encoded as -i
        self.mate = {e: -(e + 1) for e in range(2 * n)}
        self.next_end = 2 * n
        self.partner: dict = {}

    def alive(self) -> int:
        return 2 * self.n - len(self.partner)

    def join(self, e1: int, e2: int) -> None:
        """Connect two frontier ends (a cap)."""
        m1, m2 = self.mate.pop(e1), self.mate.pop(e2)
        if m1 == e2:
            return  # closed loop, dropped
        if m1 < 0 and m2 < 0:
            i, j = -m1, -m2
            self.partner[i], self.partner[j] = j, i
        else:
            if m1 >= 0:
                self.mate[m1] = m2
            if m2 >= 0:
                self.mate[m2] = m1

    def new_pair(self) -> tuple:
        """Two fresh ends of one strand (a cup)."""
        x, y = self.next_end, self.next_end + 1
        self.next_end += 2
        self.mate[x], self.mate[y] = y, x
        return x, y

    def apply_e(self, k0: int) -> None:
        m = 2 * self.n
        a, b = k0, (k0 + 1) % m
        self.join(self.slots[a], self.slots[b])
        self.slots[a], self.slots[b] = self.new_pair()

    def apply_row(self, diagram: list) -> None:
        m = 2 * self.n
        old = self.slots
        new = [None] * m
        for end in range(2 * m):
            other = diagram[end] - 1
            if end >= other:
                continue
            if other < m:  # both on top
                self.join(old[end], old[other])
            elif end < m:  # through line
                new[other - m] = old[end]
            else:  # both on the bottom
                new[end - m], new[other - m] = self.new_pair()
        self.slots = new

    def resolved(self, points: Optional[Iterable[int]]) -> bool:
        if points is None:
            return len(self.partner) == 2 * self.n
        return all(i in self.partner for i in points)


class _Uniform:
    """Batched uniform integers from a numpy Generator."""

    def __init__(self, rng: np.random.Generator, high: int):
        self.rng, self.high = rng, high
        self.buf, self.pos = [], 0

    def __call__(self) -> int:
        if self.pos == len(self.buf):
            self.buf = self.rng.integers(0, self.high, _BATCH).tolist()
            self.pos = 0
        self.pos += 1
        return self.buf[self.pos - 1]


def sample_partners(n: int, rng: np.random.Generator, points=None,
                    backend: str = "stack", max_steps: Optional[int] = None) -> dict:
    """Partners of boundary points, sampled until ``points`` are all resolved.

    With ``points=None`` the full matching is sampled.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if backend not in BACKENDS:
        raise ValueError(f"unknown backend {backend!r}")
    cap = 10 ** 6 * n if max_steps is None else max_steps
    state = FrontierState(n)
    steps = 0
    if backend == "stack":
        draw = _Uniform(rng, 2 * n)
        while not state.resolved(points):
            if steps >= cap:
                raise SamplerStuck(_dump(state, steps))
            state.apply_e(draw())
            steps += 1
    else:
        m = 2 * n
        while not state.resolved(points):
            if steps >= cap:
                raise SamplerStuck(_dump(state, steps))
            bits = tuple(rng.integers(0, 2, m).tolist())
            state.apply_row(_row_cached(bits))
            steps += 1
    return state.partner


def _dump(state: FrontierState, steps: int) -> str:
    return (f"no complete matching after {steps} steps at n={state.n}: "
            f"{len(state.partner)} points matched, slots={state.slots}, mate={state.mate}")


_ROWS: dict = {}


def _row_cached(bits: tuple) -> list:
    d = _ROWS.get(bits)
    if d is None:
        d = row_diagram(bits)
        if len(_ROWS) < 1 << 16:
            _ROWS[bits] = d
    return d


def sample_matching(n: int, rng: np.random.Generator, backend: str = "stack",
                    max_steps: Optional[int] = None) -> NoncrossingMatching:
    partner = sample_partners(n, rng, None, backend, max_steps)
    return NoncrossingMatching([partner[i] for i in range(1, 2 * n + 1)])


# -- events -------------------------------------------------------------------

class _Partial:
    def __init__(self, partner: dict):
        self._partner = partner

    def partner(self, i: int) -> int:
        return self._partner[i]


@dataclass(frozen=True)
class SubmatchingEvent:
    pattern: NoncrossingMatching
    offset: int = 1

    @property
    def points(self) -> tuple:
        return tuple(range(self.offset, self.offset + 2 * self.pattern.n))

    def __call__(self, pi) -> bool:
        return all(pi.partner(i + self.offset - 1) == j + self.offset - 1 for i, j in self.pattern.arcs())


@dataclass(frozen=True)
class AntiClusterEvent:
    k: int

    @property
    def points(self) -> tuple:
        return tuple(range(1, self.k + 1))

    def __call__(self, pi) -> bool:
        return all(not 1 <= pi.partner(i) <= self.k for i in self.points)


@dataclass(frozen=True)
class PairsEvent:
    pairs: tuple

    @property
    def points(self) -> tuple:
        return tuple(sorted({p for pr in self.pairs for p in pr}))

    def __call__(self, pi) -> bool:
        return all(pi.partner(i) == j for i, j in self.pairs)


def parse_event(text: str):
    """``submatching:[[1,2]]``, ``anticluster:3`` or ``pairs:[[1,2],[4,5]]``."""
    kind, _, arg = text.partition(":")
    kind = kind.strip().lower()
    if kind == "submatching":
        return SubmatchingEvent(parse_matching(arg))
    if kind == "anticluster":
        return AntiClusterEvent(int(arg))
    if kind == "pairs":
        return PairsEvent(tuple(tuple(int(x) for x in p) for p in json.loads(arg)))
    raise ValueError(f"unknown event kind {kind!r}")


# -- estimation ---------------------------------------------------------------

def clopper_pearson(successes: int, trials: int, level: float = 0.99) -> tuple:
    """Exact binomial interval."""
    alpha = 1 - level
    lo = 0.0 if successes == 0 else float(stats.beta.ppf(alpha / 2, successes, trials - successes + 1))
    hi = 1.0 if successes == trials else float(stats.beta.ppf(1 - alpha / 2, successes + 1, trials - successes))
    return lo, hi


@dataclass
class SampleStats:
    n: int
    samples: int
    hits: int
    seed: int
    backend: str = "stack"
    histogram: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.histogram and sum(self.histogram.values()) != self.samples:
            raise ValueError("histogram counts must sum to the sample count")

    @property
    def estimate(self) -> float:
        return self.hits / self.samples

    def ci99(self) -> tuple:
        return clopper_pearson(self.hits, self.samples, 0.99)

    def merge(self, other: "SampleStats") -> "SampleStats":
        hist = dict(self.histogram)
        for key, c in other.histogram.items():
            hist[key] = hist.get(key, 0) + c
        return SampleStats(self.n, self.samples + other.samples, self.hits + other.hits,
                           self.seed, self.backend, hist)

    def to_dict(self) -> dict:
        lo, hi = self.ci99()
        return {"n": self.n, "samples": self.samples, "hits": self.hits,
                "estimate": self.estimate, "ci99": [lo, hi], "seed": self.seed,
                "backend": self.backend}


HISTOGRAM_MAX_N = 6


def _run_chunk(args) -> SampleStats:
    n, event, count, seed, index, backend, keep_hist = args
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(index,))))
    points = None if keep_hist else getattr(event, "points", None)
    hits = 0
    hist: dict = {}
    for _ in range(count):
        partner = sample_partners(n, rng, points, backend)
        if keep_hist:
            pi = NoncrossingMatching([partner[i] for i in range(1, 2 * n + 1)])
            hist[pi] = hist.get(pi, 0) + 1
            hits += bool(event(pi)) if event is not None else 0
        else:
            hits += bool(event(_Partial(partner)))
    return SampleStats(n, count, hits, seed, backend, hist)


def estimate_event(n: int, event: Optional[Callable], samples: int, seed: int = 0,
                   backend: str = "stack", threads: int = 1,
                   keep_histogram: Optional[bool] = None) -> SampleStats:
    """Estimate ``P(event)`` from ``samples`` independent draws.

    Work is cut into fixed chunks, each with its own stream spawned from
    ``seed`` by chunk index, so the result does not depend on ``threads``.
    Events that expose ``points`` stop each draw once those are matched.
    """
    if samples < 1:
        raise ValueError("need at least one sample")
    keep = (n <= HISTOGRAM_MAX_N and event is None) if keep_histogram is None else keep_histogram
    if event is None and not keep:
        raise ValueError("nothing to record: no event and no histogram")
    jobs = []
    done = 0
    for index in range(math.ceil(samples / CHUNK)):
        count = min(CHUNK, samples - done)
        done += count
        jobs.append((n, event, count, seed, index, backend, keep))
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(_run_chunk, jobs))
    else:
        parts = [_run_chunk(j) for j in jobs]
    total = SampleStats(n, 0, 0, seed, backend, {})
    for part in parts:
        total = total.merge(part)
    return total


def histogram(n: int, samples: int, seed: int = 0, backend: str = "stack", threads: int = 1) -> SampleStats:
    return estimate_event(n, None, samples, seed, backend, threads, keep_histogram=True)


def chi_square_pvalue(hist: dict, law: dict) -> float:
    """Goodness of fit of sampled counts to an exact law over matchings."""
    keys = list(law)
    extra = set(hist) - set(keys)
    if extra:
        raise ValueError(f"sampled states outside the law: {sorted(map(str, extra))}")
    total = sum(hist.values())
    observed = np.array([hist.get(k, 0) for k in keys], dtype=float)
    expected = np.array([float(law[k]) * total for k in keys])
    return float(stats.chisquare(observed, expected).pvalue)
