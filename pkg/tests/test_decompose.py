import numpy as np
import pytest

from medianosc.corpus import CorpusSpec, generate
from medianosc.decompose import (DecompositionParams, jn_cascade, postconditions_hold,
                                 stromberg_decompose, two_threshold_decompose)
from medianosc.errors import BetaTooSmall, HypothesisViolated, InvalidParameter
from medianosc.grid import CubeFamily, DyadicCube, SampledFunction
from medianosc.median import maximal_median
from medianosc.sharp import local_sharp_maximal
from medianosc.bmo import normalize


def _decompose(values, s, t, delta, beta, family=CubeFamily.ALL):
    f = SampledFunction.from_values(np.asarray(values, float))
    q = DyadicCube.root(f.frame)
    sh = local_sharp_maximal(f, s=s, family=family)
    return f, stromberg_decompose(f, q, DecompositionParams(s, t, delta, beta), sh)


class TestParams:
    @pytest.mark.parametrize("kw", [dict(s=0.6), dict(t=0.4), dict(t=0.9), dict(delta=0), dict(beta=-1)])
    def test_rejects(self, kw):
        base = dict(s=0.25, t=0.5, delta=1.0, beta=1.0) | kw
        with pytest.raises(InvalidParameter):
            DecompositionParams(**base)


class TestStromberg:
    def test_constant_field_selects_nothing(self):
        _, fo = _decompose(np.zeros(16), 0.25, 0.5, 0.5, 1.0)
        assert fo.selected == [] and fo.packing() == 0
        assert postconditions_hold(fo)

    def test_spike(self):
        f, fo = _decompose([0, 0, 0, 1, 0, 0, 0, 0], 0.25, 0.5, 0.5, 1.0)
        # the t=1/2 median of {0, 1} is 1, so the length-2 dyadic cube is taken
        assert [(q.region.lo, q.length, m) for q, m in fo.selected] == [((2,), 2, 1.0)]
        assert fo.packing() == 0.25
        assert postconditions_hold(fo)

    def test_uncentred_step_violates_hypothesis(self):
        with pytest.raises(HypothesisViolated):
            _decompose([-1.0] * 4 + [1.0] * 4, 0.25, 0.5, 0.1, 1.0)

    def test_centred_step(self):
        f, fo = _decompose([-1.0] * 4 + [0.0] * 4, 0.25, 0.5, 0.1, 1.0)
        assert fo.report["root_median"] == 0.0
        # left half has median -1 and is taken at level 1
        assert [(q.level, q.index, m) for q, m in fo.selected] == [(1, (0,), -1.0)]
        assert sorted(fo.floor_cells) == [(i,) for i in range(4, 8)]
        assert postconditions_hold(fo)

    def test_discard_when_beta_small(self, rng):
        f, fo = _decompose(rng.normal(size=32), 0.25, 0.5, 10.0, 1e-6)
        assert fo.discarded == [fo.root] and fo.selected == []

    def test_labels_and_dict(self):
        f, fo = _decompose([0, 0, 0, 1, 0, 0, 0, 0], 0.25, 0.5, 0.5, 1.0)
        assert fo.label_field().tolist() == [0, 0, 1, 1, 0, 0, 0, 0]
        d = fo.to_dict()
        assert d["selected"][0]["median"] == 1.0 and d["report"]["depth"] == 2

    def test_sharp_mismatch(self):
        f = SampledFunction.from_values(np.zeros(8))
        sh = local_sharp_maximal(f, s=0.5)
        with pytest.raises(InvalidParameter):
            stromberg_decompose(f, DyadicCube.root(f.frame), DecompositionParams(0.25, 0.5, 1, 1), sh)

    @pytest.mark.parametrize("seed", range(5))
    def test_random_postconditions(self, seed):
        rng = np.random.default_rng(seed)
        v = np.kron(rng.integers(-2, 3, 16), np.ones(4)).astype(float)
        v -= maximal_median(v, 0.5)
        sh_sup = local_sharp_maximal(SampledFunction.from_values(v), s=0.25).sup
        f, fo = _decompose(v, 0.25, 0.5, 1.0, max(sh_sup, 0.5), family=None)
        r = fo.report
        assert r["condition1"] and r["condition2_lower"] and r["condition3"] and r["nonoverlapping"]


class TestTwoThreshold:
    @pytest.mark.parametrize("name", ["step", "piecewise", "spike-block"])
    def test_designated_corpus(self, name):
        res = two_threshold_decompose(generate(CorpusSpec(name, n=128)), s=0.25)
        assert all(res.checks.values()), res.checks
        assert res.packing <= 0.25

    def test_thresholds(self):
        res = two_threshold_decompose(generate(CorpusSpec("step", n=64)), s=0.25)
        assert res.delta1 == 4 * res.beta + 2 * res.eta
        assert res.delta2 == 2 * res.delta1 + 10 * res.beta

    def test_beta_too_small(self):
        with pytest.raises(BetaTooSmall):
            two_threshold_decompose(generate(CorpusSpec("step", n=64)), s=0.25, beta=0.1)

    def test_constant_field(self):
        res = two_threshold_decompose(generate(CorpusSpec("constant", n=32)), s=0.25)
        assert res.packing == 0 and all(res.checks.values())


class TestCascade:
    def test_requires_normalized_input(self):
        with pytest.raises(HypothesisViolated):
            jn_cascade(generate(CorpusSpec("step", n=64)), s=0.25)

    def test_constant_note(self):
        rep = jn_cascade(SampledFunction.from_values(np.zeros(16)), s=0.25)
        assert rep.notes and rep.generations[0]["within_s_power"]

    def test_normalized_log_field(self):
        g, norm, _ = normalize(generate(CorpusSpec("log-singularity", n=1024)), s=0.25)
        rep = jn_cascade(g, s=0.25)
        gens = rep.generations
        assert gens[0]["measure"] == 1.0
        assert all(g["within_s_power"] for g in gens)
        assert rep.to_dict()["generations"][0]["n_cubes"] == 1
