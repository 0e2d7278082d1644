import numpy as np
import pytest

from medianosc.errors import FamilyTooLarge, IndivisibleCube, InvalidParameter
from medianosc.grid import (CubeFamily, CubeRegion, DyadicCube, GridFrame, SampledFunction,
                            dyadic_tower, enumerate_cubes, family_size, measure, subdivide)


def unit(dim, n):
    return GridFrame(dim, (0.0,) * dim, 1.0, n)


@pytest.mark.parametrize("dim,n,length,expected", [(1, 8, 8, 1.0), (1, 8, 2, 0.25), (2, 8, 2, 0.0625)])
def test_measure_examples(dim, n, length, expected):
    assert measure(CubeRegion(unit(dim, n), (0,) * dim, length)) == expected


def test_sampled_function_validation():
    with pytest.raises(InvalidParameter):
        SampledFunction.from_values([1.0, np.nan])
    with pytest.raises(InvalidParameter):
        SampledFunction.from_values(np.zeros((2, 3)))
    with pytest.raises(InvalidParameter):
        SampledFunction(unit(1, 4), np.zeros(5))
    f = SampledFunction.from_values(np.arange(4.0))
    with pytest.raises(ValueError):
        f.values[0] = 7.0


def test_from_callable_samples_cell_centers():
    f = SampledFunction.from_callable(lambda x: x, 1, 4, origin=(1.0,), side=2.0)
    assert f.values.tolist() == [1.25, 1.75, 2.25, 2.75]
    g = SampledFunction.from_callable(lambda x, y: 10 * x + y, 2, 2)
    assert g.values.tolist() == [[2.75, 3.25], [7.75, 8.25]]


def test_region_bounds():
    fr = unit(2, 4)
    with pytest.raises(InvalidParameter):
        CubeRegion(fr, (3, 0), 2)
    with pytest.raises(InvalidParameter):
        CubeRegion(fr, (0,), 2)
    q = CubeRegion(fr, (1, 2), 2)
    assert q.hi == (3, 4) and q.n_cells == 4
    assert q.contains_cell((2, 3)) and not q.contains_cell((0, 3))
    assert fr.whole().contains(q) and not q.contains(fr.whole())


def test_subdivide_examples():
    q = DyadicCube.root(unit(1, 8))
    kids = subdivide(q)
    assert [k.length for k in kids] == [4, 4]
    q2 = DyadicCube.root(unit(2, 4))
    assert [k.length for k in subdivide(q2)] == [2, 2, 2, 2]
    with pytest.raises(IndivisibleCube):
        subdivide(DyadicCube(unit(1, 8), 3, (5,)))


@pytest.mark.parametrize("dim,n", [(1, 8), (1, 16), (2, 8), (2, 4)])
def test_children_partition_parent(dim, n):
    fr = unit(dim, n)
    stack = [DyadicCube.root(fr)]
    while stack:
        q = stack.pop()
        if q.length == 1:
            continue
        kids = subdivide(q)
        cover = np.zeros(fr.shape, dtype=int)
        for k in kids:
            cover[k.region.slices] += 1
            assert k.measure == q.measure / 2**dim
        assert np.array_equal(cover.astype(bool), q.region.mask())
        assert cover.max() == 1
        assert sum(k.region.n_cells for k in kids) == q.region.n_cells
        stack.extend(kids)


@pytest.mark.parametrize("dim,n,family,count", [
    (1, 4, CubeFamily.ALL, 10), (1, 4, CubeFamily.DYADIC, 7), (2, 2, CubeFamily.ALL, 5)])
def test_enumeration_counts(dim, n, family, count):
    cubes = list(enumerate_cubes(unit(dim, n), family))
    assert len(cubes) == count == family_size(unit(dim, n).whole(), family)


def test_enumeration_order_and_uniqueness():
    fr = unit(2, 5)
    cubes = list(enumerate_cubes(fr, CubeFamily.ALL))
    keys = [(q.length, q.lo) for q in cubes]
    assert keys == sorted(keys)
    assert len(set(keys)) == len(keys)
    assert keys == [(q.length, q.lo) for q in enumerate_cubes(fr, CubeFamily.ALL)]


def test_family_nesting():
    fr = unit(1, 16)
    sets = {fam: {(q.length, q.lo) for q in enumerate_cubes(fr, fam)} for fam in CubeFamily}
    assert sets[CubeFamily.DYADIC] <= sets[CubeFamily.DYADIC_SHIFTED] <= sets[CubeFamily.ALL]


def test_family_cap():
    with pytest.raises(FamilyTooLarge):
        list(enumerate_cubes(unit(2, 64), CubeFamily.ALL, cap=1000))
    with pytest.raises(InvalidParameter):
        list(enumerate_cubes(unit(1, 6), CubeFamily.DYADIC))


def test_dyadic_tower():
    tower = dyadic_tower(unit(2, 8), (5, 2))
    assert [q.length for q in tower] == [8, 4, 2, 1]
    assert all(q.region.contains_cell((5, 2)) for q in tower)
