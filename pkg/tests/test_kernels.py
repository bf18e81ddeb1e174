import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cubicdecoupling import _backend, _pykernels

compiled = pytest.mark.skipif(_backend._compiled is None, reason="compiled kernels not built")

keys = st.lists(st.integers(0, 2**40), min_size=0, max_size=40)


def _u64(xs):
    return np.asarray(xs, dtype=np.uint64)


def oracle(ka, ca, kb, cb):
    out = {}
    for a, x in zip(ka, ca):
        for b, y in zip(kb, cb):
            out[a + b] = out.get(a + b, 0) + x * y
    return out


@settings(max_examples=60, deadline=None)
@given(keys, keys, st.integers(1, 5))
def test_python_kernel_matches_oracle(ka, kb, nshards):
    ka, kb = sorted(set(ka)), sorted(set(kb))
    ca, cb = [k % 7 + 1 for k in ka], [k % 5 + 1 for k in kb]
    merged = {}
    for shard in range(nshards):
        k, c = _pykernels.convolve_shard(ka, ca, kb, cb, shard, nshards)
        assert list(k) == sorted(k)
        for key, val in zip(k, c):
            assert _pykernels.shard_of(key, nshards) == shard
            merged[key] = val
    assert merged == oracle(ka, ca, kb, cb)


@compiled
@settings(max_examples=60, deadline=None)
@given(keys, keys, st.integers(1, 5))
def test_compiled_kernel_matches_python(ka, kb, nshards):
    ka, kb = sorted(set(ka)), sorted(set(kb))
    ca, cb = [k % 7 + 1 for k in ka], [k % 5 + 1 for k in kb]
    kern = _backend._compiled
    for shard in range(nshards):
        k1, c1 = kern.convolve_shard(_u64(ka), _u64(ca), _u64(kb), _u64(cb), shard, nshards)
        k2, c2 = _pykernels.convolve_shard(ka, ca, kb, cb, shard, nshards)
        assert k1.tolist() == list(k2) and c1.tolist() == list(c2)
        s1 = kern.convolve_shard_sumsq(_u64(ka), _u64(ca), _u64(kb), _u64(cb), shard, nshards)
        assert s1 == _pykernels.convolve_shard_sumsq(ka, ca, kb, cb, shard, nshards)


@compiled
def test_shard_function_agrees():
    for key in [0, 1, 12345, 2**63 + 5, 2**64 - 2]:
        for n in (1, 3, 8):
            assert _backend._compiled.shard_of(key, n) == _pykernels.shard_of(key, n)


@compiled
def test_aggregate_and_sum_of_squares():
    k, c = _backend._compiled.aggregate(_u64([5, 3, 5, 9, 3, 5]), _u64([1, 1, 1, 1, 1, 1]))
    assert k.tolist() == [3, 5, 9] and c.tolist() == [2, 3, 1]
    assert _backend._compiled.sum_of_squares(_u64([2**40, 2**40])) == 2 * 2**80


@compiled
def test_count_overflow_raises():
    big = _u64([2**40])
    with pytest.raises(OverflowError):
        _backend._compiled.convolve_shard(_u64([1]), big, _u64([2]), big)


def test_python_kernel_handles_big_ints():
    k, c = _pykernels.convolve_shard([1], [2**40], [2**70], [2**40])
    assert list(k) == [2**70 + 1] and list(c) == [2**80]


def test_backend_selection():
    assert _backend.DEFAULT in ("compiled", "python")
    assert _backend.get("python") is _pykernels
    with pytest.raises(ValueError):
        _backend.get("fortran")


def test_env_var_forces_fallback():
    env = dict(os.environ, CUBICDECOUPLING_PURE_PYTHON="1")
    code = (
        "from cubicdecoupling import _backend, count_J, CubicForm;"
        "print(_backend.DEFAULT, count_J(CubicForm(1,0,0,1), 2, 4))"
    )
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.split() == ["python", "2025"]
