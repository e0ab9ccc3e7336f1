"""Pure-Python event loop. Reference for, and fallback to, ``_engine``.

Both implementations take the same arguments and must consume the uniform
stream in the same order, so their outputs are identical for a given input.
All times are integer nanoseconds.
"""

from __future__ import annotations

import heapq
from collections import deque

import numpy as np

UDP, TCP_LITE = 0, 1
GEN, TX_DONE, ACK, RETX = 0, 1, 2, 3
REASON_NONE, REASON_OVERFLOW, REASON_RETRY = 0, 1, 2


def simulate(mode, interval_ns, w0_ns, w1_ns, air_ns, prop_ns, per, max_retries,
             queue_cap, window, rto_ns, max_retx, refill, forced=()):
    """Run one link until every generated packet is delivered or dropped.

    The CBR grid is anchored at ``w0_ns`` and generation stops with the last
    packet whose inter-arrival slot ends by ``w1_ns``. Returns per-packet
    arrays ``(created, first_dequeue, delivered, attempts, reason)`` over all
    generated packets, warmup included; ``delivered`` is -1 for lost packets.
    """
    n_max = w1_ns // interval_ns + 2
    created = [0] * n_max
    dequeued = [-1] * n_max
    delivered = [-1] * n_max
    attempts = [0] * n_max
    reason = [REASON_NONE] * n_max
    retx = [0] * n_max
    forced = set(int(p) for p in forced)

    heap = []
    seq = 0
    queue = deque()
    buf = refill()
    pos = 0
    busy = False
    in_service_ok = False
    in_flight = 0
    blocked = False
    n = 0

    def push(t, kind, p):
        nonlocal seq
        heapq.heappush(heap, (t, seq, kind, p))
        seq += 1

    def start(t, p):
        nonlocal busy, in_service_ok, buf, pos
        busy = True
        if dequeued[p] < 0:
            dequeued[p] = t
        if p in forced and attempts[p] == 0:
            k = max_retries + 1
            ok = False
        else:
            k = 0
            ok = False
            while k <= max_retries:
                k += 1
                if pos == len(buf):
                    buf = refill()
                    pos = 0
                u = buf[pos]
                pos += 1
                if u >= per:
                    ok = True
                    break
        attempts[p] += k
        in_service_ok = ok
        push(t + k * air_ns, TX_DONE, p)

    def lose(t, p, why):
        nonlocal in_flight, blocked
        if mode == UDP:
            reason[p] = why
        elif retx[p] < max_retx:
            retx[p] += 1
            push(t + rto_ns, RETX, p)
        else:
            reason[p] = why
            in_flight -= 1
            if blocked:
                blocked = False
                create(t)

    def enqueue(t, p):
        if not busy:
            start(t, p)
        elif len(queue) >= queue_cap:
            lose(t, p, REASON_OVERFLOW)
        else:
            queue.append(p)

    def create(t):
        # Emits one packet at t and schedules the next CBR tick.
        nonlocal n, in_flight
        if t + interval_ns > w1_ns:
            return
        p = n
        n += 1
        created[p] = t
        if mode == TCP_LITE:
            in_flight += 1
        nxt = t + interval_ns
        if nxt + interval_ns <= w1_ns:
            push(nxt, GEN, -1)
        enqueue(t, p)

    push(w0_ns % interval_ns, GEN, -1)
    while heap:
        t, _, kind, p = heapq.heappop(heap)
        if kind == GEN:
            if mode == TCP_LITE and in_flight >= window:
                blocked = True
            else:
                create(t)
        elif kind == TX_DONE:
            ok = in_service_ok
            busy = False
            if queue:
                start(t, queue.popleft())
            if ok:
                delivered[p] = t + prop_ns
                if mode == TCP_LITE:
                    push(t + 2 * prop_ns, ACK, p)
            else:
                lose(t, p, REASON_RETRY)
        elif kind == ACK:
            in_flight -= 1
            if blocked:
                blocked = False
                create(t)
        else:
            enqueue(t, p)

    return (
        np.array(created[:n], dtype=np.int64),
        np.array(dequeued[:n], dtype=np.int64),
        np.array(delivered[:n], dtype=np.int64),
        np.array(attempts[:n], dtype=np.int64),
        np.array(reason[:n], dtype=np.int8),
    )
