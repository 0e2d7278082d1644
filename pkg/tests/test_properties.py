"""Cross-module invariants under random inputs."""
import numpy as np
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from medianosc.grid import CubeFamily, SampledFunction
from medianosc.median import best_constant_oscillation, maximal_median
from medianosc.sharp import local_sharp_maximal

dyadic = st.integers(-32, 32).map(lambda k: k / 4)
fields_1d = arrays(np.float64, st.sampled_from([8, 16, 32]), elements=dyadic)
s_low = st.sampled_from([1 / 8, 1 / 4, 3 / 8, 1 / 2])
scalars = st.integers(-16, 16).map(lambda k: k / 2)


@given(fields_1d, st.integers(1, 63), st.integers(1, 63))
def test_median_monotone_in_s(v, a, b):
    lo, hi = sorted((a / 64, b / 64))
    assert maximal_median(v, lo) <= maximal_median(v, hi)


@given(fields_1d, st.integers(1, 63), scalars, st.integers(1, 4))
def test_median_equivariance(v, k, c, lam):
    s = k / 64
    assert maximal_median(v + c, s) == maximal_median(v, s) + c
    assert maximal_median(lam * v, s) == lam * maximal_median(v, s)


@given(fields_1d, s_low, scalars)
def test_oscillation_ignores_constants(v, s, c):
    assert best_constant_oscillation(v + c, s).omega == best_constant_oscillation(v, s).omega
    assert best_constant_oscillation(-v, s).omega == best_constant_oscillation(v, s).omega


@given(fields_1d, s_low)
def test_oscillation_bounded_by_half_range(v, s):
    assert best_constant_oscillation(v, s).omega <= (v.max() - v.min()) / 2


@given(fields_1d, s_low, scalars, st.integers(1, 3))
def test_sharp_invariance(v, s, c, lam):
    f = SampledFunction.from_values(v)
    base = local_sharp_maximal(f, s=s, family=CubeFamily.ALL).values
    moved = local_sharp_maximal(f.with_values(lam * v + c), s=s, family=CubeFamily.ALL).values
    assert np.array_equal(moved, lam * base)
    assert np.all(base >= 0)


@given(fields_1d, st.sampled_from([1 / 8, 1 / 4]))
def test_sharp_nonincreasing_in_s(v, s):
    # a larger s admits a narrower window, so the oscillation can only drop
    f = SampledFunction.from_values(v)
    a = local_sharp_maximal(f, s=s, family=CubeFamily.ALL).values
    b = local_sharp_maximal(f, s=2 * s, family=CubeFamily.ALL).values
    assert np.all(b <= a)
