"""Pure-Python twins of the compiled kernels.

Same signatures and results as ``_kernels``, with arbitrary-precision keys
and counts. Sequences may be lists or numpy arrays; results are lists.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1


def _mix64(x: int) -> int:
    x ^= x >> 30
    x = (x * 0xBF58476D1CE4E5B9) & MASK64
    x ^= x >> 27
    x = (x * 0x94D049BB133111EB) & MASK64
    x ^= x >> 31
    return x


def shard_of(key: int, nshards: int) -> int:
    # keys wider than 64 bits are folded first; compiled keys never are
    k = int(key)
    while k > MASK64:
        k = (k & MASK64) ^ (k >> 64)
    return (_mix64(k) >> 32) % nshards


def _fill(ka, ca, kb, cb, shard, nshards) -> dict[int, int]:
    ka = [int(k) for k in ka]
    ca = [int(c) for c in ca]
    kb = [int(k) for k in kb]
    cb = [int(c) for c in cb]
    table: dict[int, int] = {}
    get = table.get
    if nshards <= 1:
        for a_key, a_cnt in zip(ka, ca):
            for b_key, b_cnt in zip(kb, cb):
                key = a_key + b_key
                table[key] = get(key, 0) + a_cnt * b_cnt
        return table
    for a_key, a_cnt in zip(ka, ca):
        for b_key, b_cnt in zip(kb, cb):
            key = a_key + b_key
            if shard_of(key, nshards) != shard:
                continue
            table[key] = get(key, 0) + a_cnt * b_cnt
    return table


def convolve_shard(ka, ca, kb, cb, shard=0, nshards=1, expected=0):
    table = _fill(ka, ca, kb, cb, shard, nshards)
    keys = sorted(table)
    return keys, [table[k] for k in keys]


def convolve_shard_sumsq(ka, ca, kb, cb, shard=0, nshards=1, expected=0):
    table = _fill(ka, ca, kb, cb, shard, nshards)
    return sum(c * c for c in table.values())


def aggregate(keys, counts):
    table: dict[int, int] = {}
    for k, c in zip(keys, counts):
        k = int(k)
        table[k] = table.get(k, 0) + int(c)
    out = sorted(table)
    return out, [table[k] for k in out]


def sum_of_squares(counts) -> int:
    return sum(int(c) * int(c) for c in counts)
