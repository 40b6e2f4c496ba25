import numpy as np
import pytest
from hypothesis import given, strategies as st

from hiddenmeasure import _kernels, _rng
from hiddenmeasure.core import EpsilonMeasurement, MachineState, Outcome, UnitVector3, measure

keys = st.integers(0, (1 << 64) - 1)


def test_mix64_reference_value():
    # SplitMix64 seeded with 0: first output 0xE220A8397B1DCDAF
    assert _rng.mix64(_rng.GOLDEN) == 0xE220A8397B1DCDAF


@given(keys, st.integers(0, 1 << 40), st.integers(1, 50))
def test_numpy_matches_reference(key, start, n):
    ref = [_rng.uniform(key, start + i) for i in range(n)]
    assert _kernels.uniforms_numpy(key, start, n).tolist() == ref


@given(keys, st.integers(0, 1 << 40), st.integers(1, 50))
def test_numba_matches_numpy(key, start, n):
    assert np.array_equal(_kernels.uniforms_numba(key, start, n), _kernels.uniforms_numpy(key, start, n))


@given(keys, st.floats(0, 1), st.floats(-1, 1), st.integers(1, 3000))
def test_count_paths_agree(key, eps, c, n):
    assert _kernels.count_below_numba(key, 0, n, eps, c) == _kernels.count_below_numpy(key, 0, n, eps, c)


def test_count_crosses_chunk_boundary():
    key = _rng.stream_key(5)
    n = (1 << 20) + 12345
    assert _kernels.count_below_numba(key, 0, n, 1.0, 0.1) == _kernels.count_below_numpy(key, 0, n, 1.0, 0.1)


@pytest.mark.parametrize("eps, c", [(1.0, 0.3), (0.4, -0.1), (0.0, 0.0), (0.25, 0.25)])
def test_count_matches_core_measure(eps, c):
    key = _rng.stream_key(99, 3)
    n = 4000
    m = EpsilonMeasurement(UnitVector3(0.0, 0.0, 1.0), eps)
    p = MachineState(UnitVector3.of(np.sqrt(1 - c * c), 0.0, c))
    ref = sum(measure(m, p, _rng.uniform(key, i))[0] is Outcome.O1 for i in range(n))
    assert _kernels.count_below_numba(key, 0, n, eps, p.direction.z) == ref
    assert _kernels.count_below_numpy(key, 0, n, eps, p.direction.z) == ref


def test_uniform_range_and_moments():
    d = _kernels.uniforms(_rng.stream_key(1), 0, 200_000)
    assert d.min() >= 0.0 and d.max() < 1.0
    assert abs(d.mean() - 0.5) < 4 * np.sqrt(1 / 12 / d.size)


def test_streams_differ():
    a = _kernels.uniforms(_rng.stream_key(1, 0), 0, 100)
    b = _kernels.uniforms(_rng.stream_key(1, 1), 0, 100)
    c = _kernels.uniforms(_rng.stream_key(2, 0), 0, 100)
    assert not np.array_equal(a, b) and not np.array_equal(a, c)


def test_env_flag_selects_numpy(monkeypatch):
    monkeypatch.setenv("HIDDENMEASURE_DISABLE_NUMBA", "1")
    assert _kernels.backend() == "numpy"
    monkeypatch.setenv("HIDDENMEASURE_DISABLE_NUMBA", "0")
    assert _kernels.backend() == ("numba" if _kernels.HAVE_NUMBA else "numpy")


def test_negative_seed_is_masked():
    assert _rng.stream_key(-1) == _rng.stream_key((1 << 64) - 1)
