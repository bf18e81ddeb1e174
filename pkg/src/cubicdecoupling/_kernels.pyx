# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled sparse convolution kernels over packed lattice keys.

Keys are non-negative integers below 2**64 - 1 (the all-ones word marks an
empty slot). Counts are uint64 with overflow detection; on overflow the
caller falls back to the arbitrary-precision pure-Python kernels.
"""

import numpy as np

from libc.stdint cimport uint64_t
from libc.stdlib cimport free, malloc, qsort
from libc.string cimport memset

cdef extern from *:
    """
    #include <stdint.h>
    static inline int cd_mul_ovf(uint64_t a, uint64_t b, uint64_t *r) {
        return __builtin_mul_overflow(a, b, r);
    }
    static inline int cd_add_ovf(uint64_t a, uint64_t b, uint64_t *r) {
        return __builtin_add_overflow(a, b, r);
    }
    static inline int cd_acc_square(uint64_t c, uint64_t *lo, uint64_t *hi) {
        unsigned __int128 sq = (unsigned __int128)c * c;
        unsigned __int128 acc = ((unsigned __int128)(*hi) << 64) | *lo;
        unsigned __int128 out = acc + sq;
        *lo = (uint64_t)out;
        *hi = (uint64_t)(out >> 64);
        return out < acc;
    }
    """
    int cd_mul_ovf(uint64_t a, uint64_t b, uint64_t *r) nogil
    int cd_add_ovf(uint64_t a, uint64_t b, uint64_t *r) nogil
    int cd_acc_square(uint64_t c, uint64_t *lo, uint64_t *hi) nogil
    const uint64_t EMPTY "UINT64_MAX"

cdef enum:
    OK = 0
    OVERFLOW = 1
    NOMEM = 2


cdef struct Table:
    uint64_t* keys
    uint64_t* vals
    size_t cap
    size_t size


cdef struct Entry:
    uint64_t key
    uint64_t val


cdef inline uint64_t mix64(uint64_t x) noexcept nogil:
    x ^= x >> 30
    x *= <uint64_t>0xbf58476d1ce4e5b9
    x ^= x >> 27
    x *= <uint64_t>0x94d049bb133111eb
    x ^= x >> 31
    return x


cpdef unsigned long long shard_of(unsigned long long key, unsigned long long nshards):
    """Shard owning ``key``; shared with the pure-Python kernels."""
    return (mix64(key) >> 32) % nshards


cdef int table_init(Table* t, size_t expected) noexcept nogil:
    cdef size_t cap = 16
    while cap * 3 < expected * 4:
        cap <<= 1
    t.keys = <uint64_t*>malloc(cap * sizeof(uint64_t))
    t.vals = <uint64_t*>malloc(cap * sizeof(uint64_t))
    if t.keys == NULL or t.vals == NULL:
        free(t.keys)
        free(t.vals)
        t.keys = NULL
        t.vals = NULL
        return NOMEM
    memset(t.keys, 0xFF, cap * sizeof(uint64_t))
    t.cap = cap
    t.size = 0
    return OK


cdef void table_free(Table* t) noexcept nogil:
    free(t.keys)
    free(t.vals)
    t.keys = NULL
    t.vals = NULL


cdef int table_grow(Table* t) noexcept nogil:
    cdef Table bigger
    cdef size_t i, slot, mask
    cdef uint64_t k
    bigger.cap = t.cap << 1
    bigger.size = t.size
    bigger.keys = <uint64_t*>malloc(bigger.cap * sizeof(uint64_t))
    bigger.vals = <uint64_t*>malloc(bigger.cap * sizeof(uint64_t))
    if bigger.keys == NULL or bigger.vals == NULL:
        free(bigger.keys)
        free(bigger.vals)
        return NOMEM
    memset(bigger.keys, 0xFF, bigger.cap * sizeof(uint64_t))
    mask = bigger.cap - 1
    for i in range(t.cap):
        k = t.keys[i]
        if k != EMPTY:
            slot = mix64(k) & mask
            while bigger.keys[slot] != EMPTY:
                slot = (slot + 1) & mask
            bigger.keys[slot] = k
            bigger.vals[slot] = t.vals[i]
    table_free(t)
    t[0] = bigger
    return OK


cdef inline int table_add(Table* t, uint64_t key, uint64_t val) noexcept nogil:
    cdef size_t mask, slot
    cdef uint64_t k
    if (t.size + 1) * 4 > t.cap * 3:
        if table_grow(t) != OK:
            return NOMEM
    mask = t.cap - 1
    slot = mix64(key) & mask
    while True:
        k = t.keys[slot]
        if k == key:
            if cd_add_ovf(t.vals[slot], val, &t.vals[slot]):
                return OVERFLOW
            return OK
        if k == EMPTY:
            t.keys[slot] = key
            t.vals[slot] = val
            t.size += 1
            return OK
        slot = (slot + 1) & mask


cdef int entry_cmp(const void* a, const void* b) noexcept nogil:
    cdef uint64_t ka = (<Entry*>a).key
    cdef uint64_t kb = (<Entry*>b).key
    return (ka > kb) - (ka < kb)


cdef int fill_shard(Table* t,
                    const uint64_t[::1] ka, const uint64_t[::1] ca,
                    const uint64_t[::1] kb, const uint64_t[::1] cb,
                    uint64_t shard, uint64_t nshards) noexcept nogil:
    cdef Py_ssize_t i, j, na = ka.shape[0], nb = kb.shape[0]
    cdef uint64_t key, prod, a_key, a_cnt
    cdef int status
    for i in range(na):
        a_key = ka[i]
        a_cnt = ca[i]
        for j in range(nb):
            key = a_key + kb[j]
            if nshards > 1 and (mix64(key) >> 32) % nshards != shard:
                continue
            if cd_mul_ovf(a_cnt, cb[j], &prod):
                return OVERFLOW
            status = table_add(t, key, prod)
            if status != OK:
                return status
    return OK


def _raise_status(int status):
    if status == OVERFLOW:
        raise OverflowError("count exceeded 64 bits")
    if status == NOMEM:
        raise MemoryError("hash table allocation failed")


def convolve_shard(const uint64_t[::1] ka, const uint64_t[::1] ca,
                   const uint64_t[::1] kb, const uint64_t[::1] cb,
                   unsigned long long shard=0, unsigned long long nshards=1,
                   size_t expected=0):
    """Convolve two packed tables, keeping only keys owned by ``shard``.

    Returns ``(keys, counts)`` as uint64 arrays sorted by key.
    """
    cdef Table t
    cdef Entry* entries = NULL
    cdef size_t i, n = 0
    cdef int status
    cdef uint64_t[::1] ko, co
    with nogil:
        status = table_init(&t, expected)
        if status == OK:
            status = fill_shard(&t, ka, ca, kb, cb, shard, nshards)
        if status == OK:
            entries = <Entry*>malloc((t.size + 1) * sizeof(Entry))
            if entries == NULL:
                status = NOMEM
            else:
                for i in range(t.cap):
                    if t.keys[i] != EMPTY:
                        entries[n].key = t.keys[i]
                        entries[n].val = t.vals[i]
                        n += 1
        table_free(&t)
        if status == OK:
            qsort(entries, n, sizeof(Entry), entry_cmp)
    if status != OK:
        free(entries)
        _raise_status(status)
    keys = np.empty(n, dtype=np.uint64)
    counts = np.empty(n, dtype=np.uint64)
    ko = keys
    co = counts
    with nogil:
        for i in range(n):
            ko[i] = entries[i].key
            co[i] = entries[i].val
        free(entries)
    return keys, counts


def convolve_shard_sumsq(const uint64_t[::1] ka, const uint64_t[::1] ca,
                         const uint64_t[::1] kb, const uint64_t[::1] cb,
                         unsigned long long shard=0, unsigned long long nshards=1,
                         size_t expected=0):
    """Sum of squared counts of the shard's part of the convolution, without sorting."""
    cdef Table t
    cdef size_t i
    cdef int status
    cdef uint64_t lo = 0, hi = 0
    with nogil:
        status = table_init(&t, expected)
        if status == OK:
            status = fill_shard(&t, ka, ca, kb, cb, shard, nshards)
        if status == OK:
            for i in range(t.cap):
                if t.keys[i] != EMPTY:
                    if cd_acc_square(t.vals[i], &lo, &hi):
                        status = OVERFLOW
                        break
        table_free(&t)
    _raise_status(status)
    return (int(hi) << 64) | int(lo)


def aggregate(const uint64_t[::1] keys, const uint64_t[::1] counts):
    """Merge duplicate keys of an unsorted (key, count) list; returns sorted arrays."""
    cdef Table t
    cdef Entry* entries = NULL
    cdef size_t i, n = 0
    cdef Py_ssize_t j
    cdef int status
    cdef uint64_t[::1] ko, co
    with nogil:
        status = table_init(&t, keys.shape[0])
        if status == OK:
            for j in range(keys.shape[0]):
                status = table_add(&t, keys[j], counts[j])
                if status != OK:
                    break
        if status == OK:
            entries = <Entry*>malloc((t.size + 1) * sizeof(Entry))
            if entries == NULL:
                status = NOMEM
            else:
                for i in range(t.cap):
                    if t.keys[i] != EMPTY:
                        entries[n].key = t.keys[i]
                        entries[n].val = t.vals[i]
                        n += 1
        table_free(&t)
        if status == OK:
            qsort(entries, n, sizeof(Entry), entry_cmp)
    if status != OK:
        free(entries)
        _raise_status(status)
    out_keys = np.empty(n, dtype=np.uint64)
    out_counts = np.empty(n, dtype=np.uint64)
    ko = out_keys
    co = out_counts
    with nogil:
        for i in range(n):
            ko[i] = entries[i].key
            co[i] = entries[i].val
        free(entries)
    return out_keys, out_counts


def sum_of_squares(const uint64_t[::1] counts):
    cdef Py_ssize_t i
    cdef uint64_t lo = 0, hi = 0
    cdef int overflow = 0
    with nogil:
        for i in range(counts.shape[0]):
            if cd_acc_square(counts[i], &lo, &hi):
                overflow = 1
                break
    if overflow:
        raise OverflowError("sum of squares exceeded 128 bits")
    return (int(hi) << 64) | int(lo)
