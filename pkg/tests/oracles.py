"""Independent reference computations used to freeze expected values.

None of these import the code paths they check.
"""

from __future__ import annotations

import math
from collections import deque

import numpy as np
from scipy.optimize import linprog

C = 299_792_458.0
SAMPLE_POINTS = 1000
INFLATE = 1e-6


def friis_closed_form(d, f):
    d = np.asarray(d, dtype=float)
    f = np.asarray(f, dtype=float)
    return 20.0 * np.log10(4.0 * np.pi * d * f / C)


def sampled_hits(a, b, lo, hi, n=SAMPLE_POINTS, eps=INFLATE):
    """Vectorised point-sampling test: arrays of shape (N, 3) -> bool (N,).

    ``n`` evenly spaced points on each segment (endpoints included) are
    checked for containment in the box inflated by ``eps``.
    """
    a, b, lo, hi = (np.asarray(v, dtype=float) for v in (a, b, lo, hi))
    t = np.linspace(0.0, 1.0, n)
    out = np.empty(len(a), dtype=bool)
    for s in range(0, len(a), 500):
        sl = slice(s, s + 500)
        pts = a[sl, None, :] + t[None, :, None] * (b[sl] - a[sl])[:, None, :]
        inside = (pts >= lo[sl, None, :] - eps) & (pts <= hi[sl, None, :] + eps)
        out[sl] = inside.all(axis=2).any(axis=1)
    return out


def max_penetration_depth(a, b, lo, hi) -> float:
    """max over t in [0, 1] of the distance from a + t (b - a) to the outside of the box.

    Negative when the segment misses. Solved as a 2-variable LP; this is the
    arbiter for cases the sampling test cannot resolve (chords shorter than
    the sample spacing).
    """
    a, b, lo, hi = (np.asarray(v, dtype=float) for v in (a, b, lo, hi))
    d = b - a
    A, ub = [], []
    for i in range(3):
        A.append([-d[i], 1.0])  # s <= a_i + d_i t - lo_i
        ub.append(a[i] - lo[i])
        A.append([d[i], 1.0])  # s <= hi_i - a_i - d_i t
        ub.append(hi[i] - a[i])
    res = linprog([0.0, -1.0], A_ub=A, b_ub=ub, bounds=[(0.0, 1.0), (None, None)], method="highs")
    assert res.status == 0, res.message
    return -res.fun


def replay_fifo(arrivals_ns, service_ns, capacity):
    """Deterministic single-server FIFO with drop-tail on the waiting line.

    Returns a list of (start_ns or None) per arrival. Raises if an arrival
    coincides with a service completion, where tie order would matter.
    """
    free_at = 0
    waiting_starts = deque()
    starts = []
    for t in arrivals_ns:
        if starts and (t == free_at or t in waiting_starts):
            raise AssertionError("arrival coincides with a completion; pick other parameters")
        while waiting_starts and waiting_starts[0] <= t:
            waiting_starts.popleft()
        if free_at <= t:
            start = t
        elif len(waiting_starts) >= capacity:
            starts.append(None)
            continue
        else:
            start = free_at
            waiting_starts.append(start)
        free_at = start + service_ns
        starts.append(start)
    return starts


def brute_force_placement(ue, buildings, xs, ys, zs, freq_hz, wall_loss_db, walls_per_building,
                          los_fn):
    """Exhaustive argmin of expected loss over a grid, clear points first.

    ``los_fn(ue, xyz, buildings)`` returns the blocker count; the geometry
    predicate is verified on its own elsewhere.
    """
    X, Y, Z = np.meshgrid(np.asarray(xs), np.asarray(ys), np.asarray(zs), indexing="ij")
    P = np.stack([X.ravel(), Y.ravel(), Z.ravel()], axis=1)
    u = np.asarray(ue, dtype=float)
    dist = np.sqrt(((P - u) ** 2).sum(axis=1))
    keep = dist > 0
    P, dist = P[keep], dist[keep]
    blockers = np.array([los_fn(ue, tuple(p), buildings) for p in P])
    loss = 20.0 * np.log10(4.0 * math.pi * dist * freq_hz / C) + blockers * walls_per_building * wall_loss_db
    clear = blockers == 0
    pool = np.nonzero(clear)[0] if clear.any() else np.arange(len(P))
    # lexsort: last key is primary.
    order = np.lexsort((P[pool, 2], P[pool, 1], P[pool, 0], loss[pool]))
    k = pool[order[0]]
    return tuple(P[k]), float(loss[k]), bool(clear[k]), len(P)
