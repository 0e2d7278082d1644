import numpy as np
import pytest

from medianosc.corpus import NAMES, CorpusSpec, generate, pair_counterexample
from medianosc.errors import InvalidParameter
from medianosc.median import maximal_median


@pytest.mark.parametrize("name", NAMES)
@pytest.mark.parametrize("dim,n", [(1, 64), (2, 16)])
def test_shapes_and_determinism(name, dim, n):
    a = generate(CorpusSpec(name, dim=dim, n=n, seed=5))
    b = generate(CorpusSpec(name, dim=dim, n=n, seed=5))
    assert a.values.shape == (n,) * dim
    assert np.array_equal(a.values, b.values) and np.all(np.isfinite(a.values))


def test_members():
    assert set(np.unique(generate(CorpusSpec("two-level-step", n=8)).values)) == {-2.0, 1.0}
    assert generate(CorpusSpec("step", n=8)).values.tolist() == [0.0] * 4 + [1.0] * 4
    assert generate(CorpusSpec("spike", n=8)).values.tolist() == [0, 0, 0, 0, 1, 0, 0, 0]
    assert generate(CorpusSpec("spike-block", n=8)).values.tolist() == [0, 0, 0, 1, 1, 0, 0, 0]
    pw = generate(CorpusSpec("piecewise", n=64)).values
    assert set(np.unique(pw)) <= {0.0, 1.0, 2.0, 3.0}
    cb = generate(CorpusSpec("checkerboard", dim=2, n=16)).values
    assert cb[0, 0] == -1 and cb[0, 2] == 1 and cb.sum() == 0


def test_lipschitz_constant():
    f = generate(CorpusSpec("lipschitz", n=1024, params={"L": 3.0}))
    slope = np.abs(np.diff(f.values)).max() / f.frame.cell_width
    assert 2.99 < slope <= 3.0


def test_bad_specs():
    with pytest.raises(InvalidParameter):
        CorpusSpec("nope")
    with pytest.raises(InvalidParameter):
        generate(CorpusSpec("piecewise", n=10, params={"blocks": 3}))
    with pytest.raises(InvalidParameter):
        generate(CorpusSpec("spike", n=8, params={"width": 9}))


@pytest.mark.parametrize("s,s1", [(0.75, 0.5), (0.6, 0.6), (0.9, 0.2), (0.5, 0.875)])
def test_pair_counterexample(s, s1):
    pc = pair_counterexample(s, s1, n=256)
    f, g = pc.f.values, pc.g.values
    assert maximal_median(f, s) == 0 and maximal_median(g, s1) == 0
    assert np.count_nonzero(f == 0) > s * 256 and np.count_nonzero(g == 0) > s1 * 256
    assert maximal_median(f + g, pc.t_boundary) == 1
    assert pc.t_boundary > s + s1 - 1
    assert maximal_median(f + g, s + s1 - 1) == 0


def test_pair_counterexample_range():
    with pytest.raises(InvalidParameter):
        pair_counterexample(0.3, 0.4)


def test_alias_name():
    assert CorpusSpec("paper-step").name == "two-level-step"
