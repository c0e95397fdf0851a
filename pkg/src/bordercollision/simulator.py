"""Brute-force iteration of the map, used as an oracle for the classifier.

Nothing here consults the closed-form branch formulas: attractors are
recognised purely by comparing the tail of a trajectory with itself
shifted by ``k`` steps.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numba
import numpy as np

from .model import PwlMap

DIVERGENCE_NORM = 1e12

_FOUND, _DIVERGED, _UNDECIDED = 0, 1, 2


class Outcome(str, enum.Enum):
    FIXED_POINT = "FIXED_POINT"
    PERIOD_K = "PERIOD_K"
    DIVERGED = "DIVERGED"
    UNDECIDED = "UNDECIDED"


@dataclass(frozen=True)
class Orbit:
    initial: tuple
    mu: float
    max_iters: int
    tail: tuple
    outcome: Outcome
    #: detected period (1 for a fixed point, 0 if nothing was found)
    period: int = 0
    #: cycle points, rotated so the point with the smallest first coordinate leads
    points: tuple = ()
    iterations: int = 0

    @property
    def label(self) -> str:
        if self.outcome is Outcome.PERIOD_K:
            return f"PERIOD_{self.period}"
        return self.outcome.value


def step(m: PwlMap, x: Sequence[float], mu: float) -> tuple:
    """One application of the map; on the switching manifold both pieces must agree."""
    s = x[0]
    if s < 0:
        return m.half_map("L", x, mu)
    if s > 0:
        return m.half_map("R", x, mu)
    left = m.half_map("L", x, mu)
    right = m.half_map("R", x, mu)
    assert left == right, "pieces disagree on the switching manifold"
    return left


@numba.njit(cache=True)
def _window_matches(ring, depth, it, k, n, tol, scale):
    for lag in range(k):
        cur = ring[(it - lag) % depth]
        old = ring[(it - lag - k) % depth]
        for i in range(n):
            if abs(cur[i] - old[i]) > tol * scale:
                return False
    return True


@numba.njit(cache=True)
def _advance(a_l, a_r, bmu, x, y, n):
    a = a_l if x[0] <= 0.0 else a_r
    big = 0.0
    for i in range(n):
        acc = bmu[i]
        for j in range(n):
            acc += a[i, j] * x[j]
        y[i] = acc
        if abs(acc) > big:
            big = abs(acc)
    x[:] = y
    return big


@numba.njit(cache=True)
def _iterate(al, ar, bmu, x0, max_iters, period_cap, tol):
    n = x0.shape[0]
    depth = 2 * period_cap + 1
    ring = np.zeros((depth, n))
    ring[0] = x0
    x = x0.copy()
    y = np.empty(n)
    status = _UNDECIDED
    period = 0
    it = 0
    while it < max_iters:
        big = _advance(al, ar, bmu, x, y, n)
        it += 1
        ring[it % depth] = x
        if big > DIVERGENCE_NORM:
            status = _DIVERGED
            break
        if it < 2 * period_cap:
            continue
        scale = max(1.0, big)
        k = 0
        for cand in range(1, period_cap + 1):
            if _window_matches(ring, depth, it, cand, n, tol, scale):
                k = cand
                break
        if k == 0:
            continue
        # keep contracting onto the cycle while it still helps
        best = np.inf
        stall = 0
        while it < max_iters and stall < 50:
            for _ in range(k):
                big = _advance(al, ar, bmu, x, y, n)
                it += 1
                ring[it % depth] = x
            if big > DIVERGENCE_NORM:
                break
            res = 0.0
            for i in range(n):
                d = abs(ring[it % depth][i] - ring[(it - k) % depth][i])
                if d > res:
                    res = d
            if res < best * 0.999:
                best = res
                stall = 0
            else:
                stall += 1
            if res <= 1e-15 * max(1.0, np.abs(x).max()):
                break
        if big > DIVERGENCE_NORM:
            status = _DIVERGED
            break
        scale = max(1.0, np.abs(x).max())
        # a transient sliding past a saddle can match for a while and then leave
        if not _window_matches(ring, depth, it, k, n, tol, scale):
            continue
        # oscillating convergence can pass the lag-2k test before lag-k; reduce to the minimal period
        period = k
        for d in range(1, k):
            if k % d == 0 and _window_matches(ring, depth, it, d, n, tol, scale):
                period = d
                break
        status = _FOUND
        break
    tail = np.empty((min(it + 1, depth - 1), n))
    for lag in range(tail.shape[0]):
        tail[tail.shape[0] - 1 - lag] = ring[(it - lag) % depth]
    return status, period, it, tail


def _rotate(points: list[tuple]) -> tuple:
    lead = min(range(len(points)), key=lambda i: points[i][0])
    return tuple(points[lead:] + points[:lead])


def default_seeds(n: int) -> list[tuple]:
    """Points on both sides of the switching manifold, at several scales.

    ``±0.1``, ``±1``, ``±10`` along each axis, the origin and
    ``±0.5·(1, ..., 1)``: at least nine seeds for any ``n``.
    """
    seeds = []
    for i in range(n):
        for scale in (0.1, 1.0, 10.0):
            for sgn in (1.0, -1.0):
                v = [0.0] * n
                v[i] = sgn * scale
                seeds.append(tuple(v))
    seeds.append((0.0,) * n)
    seeds.append((0.5,) * n)
    seeds.append((-0.5,) * n)
    return seeds


def detect_attractor(
    m: PwlMap,
    mu: float,
    seeds: Sequence[Sequence[float]] | None = None,
    period_cap: int = 8,
    max_iters: int = 100_000,
    tol: float = 1e-9,
) -> list[Orbit]:
    """Iterate from every seed and classify where each trajectory ends up."""
    fm = m.with_backend("float")
    al = fm.a_left.to_numpy()
    ar = fm.a_right.to_numpy()
    bmu = np.array(fm.b, dtype=float) * float(mu)
    seeds = default_seeds(m.n) if seeds is None else seeds
    out = []
    for seed in seeds:
        x0 = np.array(seed, dtype=float)
        status, period, iters, tail = _iterate(al, ar, bmu, x0, int(max_iters), int(period_cap), float(tol))
        tail_t = tuple(tuple(float(v) for v in row) for row in tail)
        if status == _FOUND:
            pts = _rotate(list(tail_t[-period:]))
            outcome = Outcome.FIXED_POINT if period == 1 else Outcome.PERIOD_K
        else:
            pts = ()
            outcome = Outcome.DIVERGED if status == _DIVERGED else Outcome.UNDECIDED
            period = 0
        out.append(Orbit(tuple(float(v) for v in seed), float(mu), int(max_iters), tail_t,
                         outcome, period, pts, int(iters)))
    return out
