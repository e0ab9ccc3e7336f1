# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled event loop; same contract and stream consumption as ``_engine_py``."""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport int64_t
from libc.stdlib cimport malloc, realloc, free

cnp.import_array()

cdef enum:
    UDP = 0
    TCP_LITE = 1

cdef enum:
    GEN = 0
    TX_DONE = 1
    ACK = 2
    RETX = 3

cdef enum:
    REASON_OVERFLOW = 1
    REASON_RETRY = 2


cdef struct Event:
    int64_t t
    int64_t seq
    int kind
    int64_t p


cdef inline bint _before(Event* a, Event* b) nogil:
    return a.t < b.t or (a.t == b.t and a.seq < b.seq)


cdef class _Sim:
    cdef int mode
    cdef int64_t interval_ns, w1_ns, air_ns, prop_ns, rto_ns
    cdef double per
    cdef int max_retries, max_retx
    cdef int64_t queue_cap, window

    cdef Event* heap
    cdef Py_ssize_t heap_n, heap_cap
    cdef int64_t seq

    cdef int64_t* q
    cdef Py_ssize_t q_cap, q_head, q_len

    cdef object refill
    cdef cnp.ndarray buf_arr
    cdef double* buf
    cdef Py_ssize_t buf_n, pos

    cdef int64_t[::1] created, dequeued, delivered, attempts
    cdef signed char[::1] reason
    cdef int[::1] retx
    cdef unsigned char[::1] forced

    cdef bint busy, in_service_ok, blocked
    cdef int64_t in_flight, n

    def __cinit__(self):
        self.heap = NULL
        self.q = NULL

    def __dealloc__(self):
        if self.heap != NULL:
            free(self.heap)
        if self.q != NULL:
            free(self.q)

    cdef int push(self, int64_t t, int kind, int64_t p) except -1:
        cdef Py_ssize_t i, parent
        cdef Event e
        cdef Event* grown
        if self.heap_n == self.heap_cap:
            grown = <Event*> realloc(self.heap, 2 * self.heap_cap * sizeof(Event))
            if grown == NULL:
                raise MemoryError()
            self.heap = grown
            self.heap_cap *= 2
        e.t = t
        e.seq = self.seq
        e.kind = kind
        e.p = p
        self.seq += 1
        i = self.heap_n
        self.heap_n += 1
        while i > 0:
            parent = (i - 1) >> 1
            if _before(&e, &self.heap[parent]):
                self.heap[i] = self.heap[parent]
                i = parent
            else:
                break
        self.heap[i] = e
        return 0

    cdef Event pop(self):
        cdef Event top = self.heap[0]
        cdef Event last
        cdef Py_ssize_t i = 0, c, n
        self.heap_n -= 1
        n = self.heap_n
        if n > 0:
            last = self.heap[n]
            while True:
                c = 2 * i + 1
                if c >= n:
                    break
                if c + 1 < n and _before(&self.heap[c + 1], &self.heap[c]):
                    c += 1
                if _before(&self.heap[c], &last):
                    self.heap[i] = self.heap[c]
                    i = c
                else:
                    break
            self.heap[i] = last
        return top

    cdef int q_push(self, int64_t p) except -1:
        cdef int64_t* grown
        cdef Py_ssize_t k
        if self.q_len == self.q_cap:
            grown = <int64_t*> malloc(2 * self.q_cap * sizeof(int64_t))
            if grown == NULL:
                raise MemoryError()
            for k in range(self.q_len):
                grown[k] = self.q[(self.q_head + k) % self.q_cap]
            free(self.q)
            self.q = grown
            self.q_head = 0
            self.q_cap *= 2
        self.q[(self.q_head + self.q_len) % self.q_cap] = p
        self.q_len += 1
        return 0

    cdef int64_t q_pop(self):
        cdef int64_t p = self.q[self.q_head]
        self.q_head = (self.q_head + 1) % self.q_cap
        self.q_len -= 1
        return p

    cdef double next_uniform(self) except? -1.0:
        if self.pos == self.buf_n:
            self.buf_arr = np.ascontiguousarray(self.refill(), dtype=np.float64)
            self.buf = <double*> cnp.PyArray_DATA(self.buf_arr)
            self.buf_n = self.buf_arr.shape[0]
            self.pos = 0
        self.pos += 1
        return self.buf[self.pos - 1]

    cdef int start(self, int64_t t, int64_t p) except -1:
        cdef int k = 0
        cdef bint ok = False
        self.busy = True
        if self.dequeued[p] < 0:
            self.dequeued[p] = t
        if self.forced[p] and self.attempts[p] == 0:
            k = self.max_retries + 1
        else:
            while k <= self.max_retries:
                k += 1
                if self.next_uniform() >= self.per:
                    ok = True
                    break
        self.attempts[p] += k
        self.in_service_ok = ok
        self.push(t + k * self.air_ns, TX_DONE, p)
        return 0

    cdef int lose(self, int64_t t, int64_t p, int why) except -1:
        if self.mode == UDP:
            self.reason[p] = why
        elif self.retx[p] < self.max_retx:
            self.retx[p] += 1
            self.push(t + self.rto_ns, RETX, p)
        else:
            self.reason[p] = why
            self.in_flight -= 1
            if self.blocked:
                self.blocked = False
                self.create(t)
        return 0

    cdef int enqueue(self, int64_t t, int64_t p) except -1:
        if not self.busy:
            self.start(t, p)
        elif self.q_len >= self.queue_cap:
            self.lose(t, p, REASON_OVERFLOW)
        else:
            self.q_push(p)
        return 0

    cdef int create(self, int64_t t) except -1:
        cdef int64_t p, nxt
        if t + self.interval_ns > self.w1_ns:
            return 0
        p = self.n
        self.n += 1
        self.created[p] = t
        if self.mode == TCP_LITE:
            self.in_flight += 1
        nxt = t + self.interval_ns
        if nxt + self.interval_ns <= self.w1_ns:
            self.push(nxt, GEN, -1)
        self.enqueue(t, p)
        return 0

    cdef int run(self, int64_t first) except -1:
        cdef Event e
        cdef bint ok
        self.push(first, GEN, -1)
        while self.heap_n > 0:
            e = self.pop()
            if e.kind == GEN:
                if self.mode == TCP_LITE and self.in_flight >= self.window:
                    self.blocked = True
                else:
                    self.create(e.t)
            elif e.kind == TX_DONE:
                ok = self.in_service_ok
                self.busy = False
                if self.q_len > 0:
                    self.start(e.t, self.q_pop())
                if ok:
                    self.delivered[e.p] = e.t + self.prop_ns
                    if self.mode == TCP_LITE:
                        self.push(e.t + 2 * self.prop_ns, ACK, e.p)
                else:
                    self.lose(e.t, e.p, REASON_RETRY)
            elif e.kind == ACK:
                self.in_flight -= 1
                if self.blocked:
                    self.blocked = False
                    self.create(e.t)
            else:
                self.enqueue(e.t, e.p)
        return 0


def simulate(int mode, int64_t interval_ns, int64_t w0_ns, int64_t w1_ns, int64_t air_ns,
             int64_t prop_ns, double per, int max_retries, int64_t queue_cap, int64_t window,
             int64_t rto_ns, int max_retx, refill, forced=()):
    cdef int64_t n_max = w1_ns // interval_ns + 2
    cdef _Sim s = _Sim()
    s.mode = mode
    s.interval_ns = interval_ns
    s.w1_ns = w1_ns
    s.air_ns = air_ns
    s.prop_ns = prop_ns
    s.rto_ns = rto_ns
    s.per = per
    s.max_retries = max_retries
    s.max_retx = max_retx
    s.queue_cap = queue_cap
    s.window = window

    s.heap_cap = 64
    s.heap = <Event*> malloc(s.heap_cap * sizeof(Event))
    s.q_cap = 64
    s.q = <int64_t*> malloc(s.q_cap * sizeof(int64_t))
    if s.heap == NULL or s.q == NULL:
        raise MemoryError()

    created = np.zeros(n_max, dtype=np.int64)
    dequeued = np.full(n_max, -1, dtype=np.int64)
    delivered = np.full(n_max, -1, dtype=np.int64)
    attempts = np.zeros(n_max, dtype=np.int64)
    reason = np.zeros(n_max, dtype=np.int8)
    forced_mask = np.zeros(n_max, dtype=np.uint8)
    for p in forced:
        if 0 <= p < n_max:
            forced_mask[p] = 1
    s.created = created
    s.dequeued = dequeued
    s.delivered = delivered
    s.attempts = attempts
    s.reason = reason
    s.retx = np.zeros(n_max, dtype=np.intc)
    s.forced = forced_mask

    s.refill = refill
    s.buf_n = 0
    s.pos = 0

    s.run(w0_ns % interval_ns)
    n = s.n
    return created[:n], dequeued[:n], delivered[:n], attempts[:n], reason[:n]
