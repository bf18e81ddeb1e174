"""Exact solution counts J_r(N) via sparse convolution of representation tables.

Lattice points are packed into single integers with a mixed radix whose digit
widths are sized for the largest fold count the table will reach. Packing is
additive (``pack(u) + pack(v) == pack(u + v)`` with fold counts adding), so the
5- or 6-dimensional convolution becomes a 1-dimensional one over keys, and the
packed order equals lexicographic order of the signed coordinate tuples.
"""

from __future__ import annotations

import itertools
import struct
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import cached_property
from math import comb, prod
from typing import BinaryIO, Iterator, Sequence

import numpy as np

from . import _backend
from .errors import DomainError, EnumerationBudgetError, MemoryBudgetError
from .forms import CubicForm, normalize_variant, psi, variant_map

DEFAULT_MEM_CAP = 8 * 2**30
BRUTE_FORCE_BUDGET = 10**7
UINT64_KEY_LIMIT = 2**64 - 1  # largest usable span; the all-ones key is the empty marker

# rough bytes per live table entry (hash slots at <=0.75 load plus sorted output)
BYTES_PER_ENTRY = {"compiled": 48, "python": 160}


@dataclass(frozen=True)
class Packing:
    """Mixed-radix encoding of lattice points, most significant coordinate first.

    ``lo``/``hi`` bound each coordinate of a single (fold 1) point. A point that
    is a sum of ``fold`` such points is stored as
    ``sum((p[i] - fold * lo[i]) * strides[i])``.
    """

    lo: tuple[int, ...]
    hi: tuple[int, ...]
    max_fold: int

    @classmethod
    def from_points(cls, points: Sequence[Sequence[int]], max_fold: int) -> Packing:
        cols = list(zip(*points))
        return cls(tuple(min(c) for c in cols), tuple(max(c) for c in cols), max_fold)

    def with_max_fold(self, max_fold: int) -> Packing:
        return Packing(self.lo, self.hi, max_fold)

    @property
    def dim(self) -> int:
        return len(self.lo)

    @cached_property
    def widths(self) -> tuple[int, ...]:
        return tuple(self.max_fold * (h - l) + 1 for l, h in zip(self.lo, self.hi))

    @cached_property
    def strides(self) -> tuple[int, ...]:
        out = [1] * self.dim
        for i in range(self.dim - 2, -1, -1):
            out[i] = out[i + 1] * self.widths[i + 1]
        return tuple(out)

    @cached_property
    def span(self) -> int:
        return prod(self.widths)

    @property
    def fits_uint64(self) -> bool:
        return self.span <= UINT64_KEY_LIMIT

    def pack(self, point: Sequence[int], fold: int = 1) -> int:
        if fold > self.max_fold:
            raise DomainError(f"fold {fold} exceeds packing capacity {self.max_fold}")
        key = 0
        for p, l, w, st in zip(point, self.lo, self.widths, self.strides):
            digit = p - fold * l
            if not 0 <= digit < w:
                raise DomainError(f"coordinate {p} outside the packed range for fold {fold}")
            key += digit * st
        return key

    def unpack(self, key: int, fold: int) -> tuple[int, ...]:
        out = []
        for l, st, w in zip(self.lo, self.strides, self.widths):
            out.append((key // st) % w + fold * l)
        return tuple(out)

    def unpack_array(self, keys: np.ndarray, fold: int) -> np.ndarray:
        keys = np.asarray(keys, dtype=np.uint64)
        out = np.empty((keys.shape[0], self.dim), dtype=np.int64)
        for i, (l, st, w) in enumerate(zip(self.lo, self.strides, self.widths)):
            digits = (keys // np.uint64(st)) % np.uint64(w)
            out[:, i] = digits.astype(np.int64) + fold * l
        return out


def _as_u64(seq) -> np.ndarray:
    if isinstance(seq, np.ndarray) and seq.dtype == np.uint64:
        return np.ascontiguousarray(seq)
    if len(seq) and max(int(x) for x in seq) > UINT64_KEY_LIMIT:
        raise OverflowError("value exceeds 64 bits")
    return np.asarray(seq, dtype=np.uint64)


class RepTable:
    """Sparse representation function of r-fold sums of surface lattice points.

    ``keys`` are packed points in ascending order, ``counts`` the matching
    multiplicities (all positive). Storage is a pair of uint64 arrays when the
    compiled kernels produced the table, otherwise lists of Python ints.
    """

    def __init__(self, form: CubicForm, N: int, variant: str, r: int, packing: Packing, keys, counts):
        self.form = form
        self.N = N
        self.variant = variant
        self.r = r
        self.packing = packing
        self.keys = keys
        self.counts = counts

    @classmethod
    def identity(cls, like: RepTable) -> RepTable:
        """The one-point table {origin: 1} at fold 0 (neutral for convolution)."""
        return cls(like.form, like.N, like.variant, 0, like.packing, [0], [1])

    @property
    def dim(self) -> int:
        return self.packing.dim

    def __len__(self) -> int:
        return len(self.keys)

    def mass(self) -> int:
        if isinstance(self.counts, np.ndarray):
            return sum(self.counts.tolist())
        return sum(self.counts)

    def sum_of_squares(self) -> int:
        if isinstance(self.counts, np.ndarray) and _backend._compiled is not None:
            return _backend._compiled.sum_of_squares(np.ascontiguousarray(self.counts))
        return _backend._pykernels.sum_of_squares(self.counts)

    def points(self) -> Iterator[tuple[tuple[int, ...], int]]:
        """Yield ``(lattice point, count)`` in lexicographic order."""
        if isinstance(self.keys, np.ndarray) and self.packing.fits_uint64:
            coords = self.packing.unpack_array(self.keys, self.r)
            for row, c in zip(coords.tolist(), self.counts.tolist()):
                yield tuple(row), c
        else:
            for k, c in zip(self.keys, self.counts):
                yield self.packing.unpack(int(k), self.r), int(c)

    def as_dict(self) -> dict[tuple[int, ...], int]:
        return dict(self.points())

    def same_source(self, other: RepTable) -> bool:
        return (self.form, self.N, self.variant) == (other.form, other.N, other.variant)

    def __repr__(self):
        return f"RepTable(form={self.form}, N={self.N}, variant={self.variant}, r={self.r}, entries={len(self)})"


def _kernel_name(backend: str | None, packing: Packing) -> str:
    name = backend or _backend.DEFAULT
    if name == "compiled" and not packing.fits_uint64:
        return "python"
    return name


def rep_table_base(phi: CubicForm, N: int, variant: str = "S", max_fold: int = 1, backend: str | None = None) -> RepTable:
    """The r = 1 table: one count per grid point (x, y) in [0, N]^2."""
    phi.check_counting_bounds(N)
    variant = normalize_variant(variant)
    fmap, _ = variant_map(variant)
    points = [fmap(phi, x, y) for x in range(N + 1) for y in range(N + 1)]
    packing = Packing.from_points(points, max(1, max_fold))
    keys = [packing.pack(p, 1) for p in points]
    name = _kernel_name(backend, packing)
    kern = _backend.get(name)
    if name == "compiled":
        k, c = kern.aggregate(_as_u64(keys), np.ones(len(keys), dtype=np.uint64))
    else:
        k, c = kern.aggregate(keys, [1] * len(keys))
    return RepTable(phi, N, variant, 1, packing, k, c)


def _repack(table: RepTable, packing: Packing) -> RepTable:
    if table.packing == packing:
        return table
    keys = [packing.pack(p, table.r) for p, _ in table.points()]
    counts = [int(c) for c in table.counts]
    return RepTable(table.form, table.N, table.variant, table.r, packing, keys, counts)


def _aligned(A: RepTable, B: RepTable) -> tuple[RepTable, RepTable, Packing]:
    if not A.same_source(B):
        raise DomainError("tables were built from different forms, ranges or variants")
    fold = A.r + B.r
    if A.packing == B.packing and A.packing.max_fold >= fold:
        return A, B, A.packing
    if (A.packing.lo, A.packing.hi) != (B.packing.lo, B.packing.hi):
        raise DomainError("tables have incompatible coordinate ranges")
    packing = A.packing.with_max_fold(max(fold, A.packing.max_fold, B.packing.max_fold))
    return _repack(A, packing), _repack(B, packing), packing


def _hint(A: RepTable, B: RepTable, packing: Packing, shards: int) -> int:
    bound = min(len(A) * len(B), packing.span, multiset_bound(A.N, A.r + B.r))
    return max(16, bound // shards)


def _run_shards(A: RepTable, B: RepTable, packing: Packing, threads: int, backend: str | None, sumsq: bool):
    """Run the sharded convolution; returns (kernel name, result)."""
    shards = max(1, int(threads))
    name = _kernel_name(backend, packing)
    if name == "compiled":
        try:
            args = (_as_u64(A.keys), _as_u64(A.counts), _as_u64(B.keys), _as_u64(B.counts))
        except OverflowError:
            name = "python"
    if name == "python":
        args = (A.keys, A.counts, B.keys, B.counts)
    kern = _backend.get(name)
    fn = kern.convolve_shard_sumsq if sumsq else kern.convolve_shard
    hint = _hint(A, B, packing, shards)

    def one(shard):
        return fn(*args, shard, shards, hint)

    try:
        if shards == 1:
            parts = [one(0)]
        else:
            with ThreadPoolExecutor(max_workers=shards) as pool:
                parts = list(pool.map(one, range(shards)))
    except OverflowError:
        if name == "python":
            raise
        return _run_shards(A, B, packing, threads, "python", sumsq)
    return name, parts


def _merge_sorted(parts, name):
    """Canonical reduction: shards own disjoint keys, so sorting the union is enough."""
    if len(parts) == 1:
        return parts[0]
    if name == "compiled":
        keys = np.concatenate([p[0] for p in parts])
        counts = np.concatenate([p[1] for p in parts])
        order = np.argsort(keys, kind="stable")
        return keys[order], counts[order]
    merged = sorted(itertools.chain.from_iterable(zip(*p) for p in parts))
    return [k for k, _ in merged], [c for _, c in merged]


def convolve(A: RepTable, B: RepTable, threads: int = 1, backend: str | None = None) -> RepTable:
    """C(v) = sum_u A(u) B(v - u); fold counts add and total mass multiplies."""
    A, B, packing = _aligned(A, B)
    name, parts = _run_shards(A, B, packing, threads, backend, sumsq=False)
    keys, counts = _merge_sorted(parts, name)
    return RepTable(A.form, A.N, A.variant, A.r + B.r, packing, keys, counts)


def convolve_sum_of_squares(A: RepTable, B: RepTable, threads: int = 1, backend: str | None = None) -> int:
    """sum_v (A * B)(v)^2 without materialising or sorting the product table."""
    A, B, packing = _aligned(A, B)
    _, parts = _run_shards(A, B, packing, threads, backend, sumsq=True)
    return sum(parts)


def multiset_bound(N: int, r: int) -> int:
    """Number of size-r multisets of grid points: an upper bound on distinct r-fold sums."""
    m = (N + 1) ** 2
    return comb(m + r - 1, r)


def estimate_entries(phi: CubicForm, N: int, r: int, variant: str = "S") -> int:
    """Pre-flight bound on the largest table: min(ordered tuples, multisets, key span)."""
    fmap, _ = variant_map(variant)
    bounds = [(N + 1) ** (2 * r), multiset_bound(N, r)]
    if N <= 200:
        points = [fmap(phi, x, y) for x in range(N + 1) for y in range(N + 1)]
        bounds.append(Packing.from_points(points, r).span)
    return min(bounds)


def check_memory(phi: CubicForm, N: int, r: int, variant: str, mem_cap: int, backend: str | None = None) -> int:
    entries = estimate_entries(phi, N, r, variant)
    name = backend or _backend.DEFAULT
    need = entries * BYTES_PER_ENTRY.get(name, BYTES_PER_ENTRY["python"])
    if need > mem_cap:
        raise MemoryBudgetError(
            f"estimated {entries} table entries (~{need / 2**30:.2f} GiB) exceed the memory cap "
            f"of {mem_cap / 2**30:.2f} GiB"
        )
    return need


def rep_table(phi: CubicForm, r: int, N: int, variant: str = "S", threads: int = 1,
              mem_cap: int = DEFAULT_MEM_CAP, backend: str | None = None) -> RepTable:
    """The full r-fold table R_r, built as R_{k+1} = R_k * R_1."""
    if r < 1:
        raise DomainError("r must be at least 1")
    phi.check_counting_bounds(N)
    check_memory(phi, N, r, variant, mem_cap, backend)
    base = rep_table_base(phi, N, variant, max_fold=r, backend=backend)
    table = base
    for _ in range(r - 1):
        table = convolve(table, base, threads=threads, backend=backend)
    return table


def count_J(phi: CubicForm, r: int, N: int, variant: str = "S", threads: int = 1,
            mem_cap: int = DEFAULT_MEM_CAP, backend: str | None = None) -> int:
    """Number of solutions of the 2r-variable system with all x_i, y_i in [0, N]."""
    if r < 1:
        raise DomainError("r must be at least 1")
    phi.check_counting_bounds(N)
    check_memory(phi, N, r, variant, mem_cap, backend)
    base = rep_table_base(phi, N, variant, max_fold=r, backend=backend)
    if r == 1:
        return base.sum_of_squares()
    table = base
    for _ in range(r - 2):
        table = convolve(table, base, threads=threads, backend=backend)
    return convolve_sum_of_squares(table, base, threads=threads, backend=backend)


def brute_force_J(phi: CubicForm, r: int, N: int, variant: str = "S", budget: int = BRUTE_FORCE_BUDGET) -> int:
    """Independent oracle: group every left-half r-tuple by its coordinate sum."""
    if r < 1:
        raise DomainError("r must be at least 1")
    if N < 0:
        raise DomainError("N must be non-negative")
    if (N + 1) ** (2 * r) > budget:
        raise EnumerationBudgetError(f"(N+1)^(2r) = {(N + 1) ** (2 * r)} exceeds the budget {budget}")
    fmap, dim = variant_map(variant)
    points = [fmap(phi, x, y) for x in range(N + 1) for y in range(N + 1)]
    groups: Counter = Counter()
    for combo in itertools.product(points, repeat=r):
        groups[tuple(sum(c[i] for c in combo) for i in range(dim))] += 1
    return sum(v * v for v in groups.values())


@dataclass(frozen=True)
class CrossCheck:
    form: str
    r: int
    N: int
    J_S: int
    J_Sprime: int

    @property
    def equal(self) -> bool:
        return self.J_S == self.J_Sprime

    def as_dict(self) -> dict:
        return {"form": self.form, "r": self.r, "N": self.N, "J_S": self.J_S,
                "J_Sprime": self.J_Sprime, "equal": self.equal}


def cross_check_S_prime(phi: CubicForm, r: int, N: int, threads: int = 1,
                        mem_cap: int = DEFAULT_MEM_CAP, backend: str | None = None) -> CrossCheck:
    """Count with both surface parametrisations; they agree for non-degenerate forms."""
    if not phi.is_nondegenerate:
        raise DomainError(f"form {phi} is degenerate; the S/S' equivalence needs rank two")
    js = count_J(phi, r, N, "S", threads, mem_cap, backend)
    jp = count_J(phi, r, N, "Sprime", threads, mem_cap, backend)
    return CrossCheck(str(phi), r, N, js, jp)


# -- binary export -----------------------------------------------------------
#
# header: b"REPT", version u32, r u32, N u32, dim u8 (little-endian)
# record: dim x i64 key coordinates, then count u64; counts are never zero,
#         so a zero u64 escapes to a big integer: u32 byte length + LE magnitude.

MAGIC = b"REPT"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sIIIB")


def dump_rep_table(table: RepTable, fh: BinaryIO) -> None:
    fh.write(_HEADER.pack(MAGIC, FORMAT_VERSION, table.r, table.N, table.dim))
    if isinstance(table.keys, np.ndarray) and table.packing.fits_uint64:
        rec = np.empty(len(table), dtype=[("key", "<i8", (table.dim,)), ("count", "<u8")])
        rec["key"] = table.packing.unpack_array(table.keys, table.r)
        rec["count"] = table.counts
        fh.write(rec.tobytes())
        return
    row = struct.Struct(f"<{table.dim}q")
    for point, count in table.points():
        fh.write(row.pack(*point))
        if 0 < count < 2**64:
            fh.write(struct.pack("<Q", count))
        else:
            raw = count.to_bytes((count.bit_length() + 7) // 8, "little")
            fh.write(struct.pack("<QI", 0, len(raw)))
            fh.write(raw)


def read_records(fh: BinaryIO) -> tuple[dict, list[tuple[tuple[int, ...], int]]]:
    """Parse an exported table into its header and ``(point, count)`` records."""
    head = fh.read(_HEADER.size)
    if len(head) != _HEADER.size:
        raise DomainError("truncated RepTable header")
    magic, version, r, N, dim = _HEADER.unpack(head)
    if magic != MAGIC:
        raise DomainError(f"bad magic {magic!r}")
    if version != FORMAT_VERSION:
        raise DomainError(f"unsupported RepTable version {version}")
    row = struct.Struct(f"<{dim}q")
    records = []
    while True:
        chunk = fh.read(row.size)
        if not chunk:
            break
        if len(chunk) != row.size:
            raise DomainError("truncated RepTable record")
        point = row.unpack(chunk)
        (count,) = struct.unpack("<Q", fh.read(8))
        if count == 0:
            (length,) = struct.unpack("<I", fh.read(4))
            count = int.from_bytes(fh.read(length), "little")
        records.append((point, count))
    return {"version": version, "r": r, "N": N, "dim": dim}, records


def load_rep_table(fh: BinaryIO, phi: CubicForm, variant: str = "S") -> RepTable:
    """Rebuild a RepTable from an export, given the form and variant it came from."""
    header, records = read_records(fh)
    variant = normalize_variant(variant)
    _, dim = variant_map(variant)
    if header["dim"] != dim:
        raise DomainError(f"file has dim {header['dim']}, variant {variant} needs {dim}")
    base = rep_table_base(phi, header["N"], variant, backend="python")
    packing = base.packing.with_max_fold(max(1, header["r"]))
    keys = [packing.pack(p, header["r"]) for p, _ in records]
    counts = [c for _, c in records]
    return RepTable(phi, header["N"], variant, header["r"], packing, keys, counts)


__all__ = [
    "CrossCheck", "DEFAULT_MEM_CAP", "Packing", "RepTable", "brute_force_J", "check_memory",
    "convolve", "convolve_sum_of_squares", "count_J", "cross_check_S_prime", "dump_rep_table",
    "estimate_entries", "load_rep_table", "multiset_bound", "psi", "read_records", "rep_table",
    "rep_table_base",
]
