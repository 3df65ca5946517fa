import json
import math

import numpy as np
import pytest
from scipy import stats

from heavytail import harness
from heavytail.dist import DomainError, TailBalancedLaw
from heavytail.gfp import CoeffSeries, FarimaSpec
from heavytail.harness import ExperimentSpec, SummaryTable
from heavytail.kernels import LimitKernel, StepKernel


def test_empirical_cdf():
    assert harness.empirical_cdf([1, 2, 3, 4], 2.5) == 0.5
    np.testing.assert_array_equal(harness.empirical_cdf([3, 1, 2], [0, 1, 2, 3]), [0, 1 / 3, 2 / 3, 1])
    with pytest.raises(DomainError):
        harness.empirical_cdf([], 0.0)


def test_ks_two_sample_examples():
    assert harness.ks_two_sample([1, 2, 3], [1, 2, 3]) == 0.0
    assert harness.ks_two_sample([0, 0], [1, 1]) == 1.0
    assert harness.ks_two_sample([1, 2, 3, 4], [3, 4, 5, 6]) == 0.5


def test_ks_two_sample_matches_scipy():
    rng = np.random.default_rng(0)
    for _ in range(20):
        a = rng.integers(0, 10, size=rng.integers(1, 60)).astype(float)
        b = rng.normal(3, 2, size=rng.integers(1, 60)).round(1)
        assert harness.ks_two_sample(a, b) == pytest.approx(stats.ks_2samp(a, b).statistic, abs=1e-12)


def test_ks_vs_normal_matches_scipy():
    x = np.random.default_rng(1).normal(0, 2, 300)
    assert harness.ks_vs_normal(x, 2.0) == pytest.approx(stats.kstest(x, "norm", args=(0, 2)).statistic,
                                                         abs=1e-12)
    with pytest.raises(DomainError):
        harness.ks_vs_normal(x, 0.0)


def test_stderr():
    assert harness.stderr([1.0, 3.0]) == pytest.approx(math.sqrt(2) / math.sqrt(2))
    assert math.isnan(harness.stderr([1.0]))


def test_first_jump_mean_quadrature():
    from scipy import integrate
    ref, _ = integrate.quad(lambda w: w ** (-1 / 1.5) * math.exp(-w), 0, 1)
    assert harness.first_jump_mean(1.5) == pytest.approx(ref, rel=1e-8)


def test_spec_validation():
    with pytest.raises(DomainError, match="unknown experiment kind"):
        ExperimentSpec("x", "nonsense")
    with pytest.raises(DomainError):
        ExperimentSpec("x", "gamma-ratio", reps=0)
    with pytest.raises(DomainError):
        ExperimentSpec("x", "gamma-ratio", n_values=(10, 5))
    with pytest.raises(DomainError):
        ExperimentSpec("x", "gamma-ratio", seed=-1)
    with pytest.raises(DomainError):
        harness.run_experiment(ExperimentSpec("x", "decomposition"))


def test_build_kernel():
    k = harness.build_kernel(FarimaSpec(1.5), 100)
    assert k.values.sum() == pytest.approx(100 + k.values[100])
    raw = harness.build_kernel(FarimaSpec(0.5), 10)
    assert raw.values[0] == 1.0 and raw.values[1] == 0.5
    short = harness.build_kernel(CoeffSeries([1.0, 0.5]), 4)
    np.testing.assert_array_equal(short.values, [1.0, 0.5, 0, 0, 0])
    np.testing.assert_array_equal(harness.build_kernel(LimitKernel.constant(2.0), 3).values, [2.0] * 4)
    with pytest.raises(DomainError):
        harness.build_kernel(StepKernel([1.0, 2.0]), 3)
    with pytest.raises(DomainError):
        harness.build_kernel("farima", 3)


def _square(seed):
    return int(np.random.default_rng(seed).integers(1000)) ** 2


def test_run_replicates_order_and_workers(monkeypatch):
    monkeypatch.setenv(harness.THREADS_ENV, "2")
    assert harness.resolve_workers(2) == 2
    seeds = list(range(12))
    base = harness.run_replicates(_square, seeds)
    assert harness.run_replicates(_square, seeds, order=list(reversed(seeds))) == base
    assert harness.run_replicates(_square, seeds, workers=2) == base
    with pytest.raises(DomainError):
        harness.run_replicates(_square, seeds, order=[0, 0])


def test_resolve_workers(monkeypatch):
    monkeypatch.setenv(harness.THREADS_ENV, "1")
    assert harness.resolve_workers(8) == 1
    monkeypatch.setenv(harness.THREADS_ENV, "x")
    with pytest.raises(DomainError):
        harness.resolve_workers(2)
    monkeypatch.delenv(harness.THREADS_ENV)
    assert harness.resolve_workers(0) == 1


def small_spec(seed=3):
    return ExperimentSpec("walk", "gaussianity", TailBalancedLaw(1.5, 0.5), FarimaSpec(1.5),
                          (64, 128), 30, seed)


def test_experiment_is_deterministic(monkeypatch):
    monkeypatch.setenv(harness.THREADS_ENV, "2")
    a = harness.run_experiment(small_spec())
    assert a == harness.run_experiment(small_spec())
    assert a == harness.run_experiment(small_spec(), workers=2)
    assert a != harness.run_experiment(small_spec(4))


def test_table_outputs():
    t = SummaryTable()
    t.add("a", 10, 5, "stat", 0.1, 0.2)
    t.add("b", 10, 5, "stat", 0.3, 0.2)
    assert not t.all_pass and not SummaryTable().all_pass
    lines = t.to_csv().splitlines()
    assert lines[0] == "name,n,reps,statistic,value,threshold,pass"
    assert lines[1] == "a,10,5,stat,0.1,0.2,true"
    assert lines[2].endswith(",false")
    data = json.loads(t.to_json())
    assert data[0]["pass"] is True and data[1]["value"] == 0.3


def test_every_kind_runs_small():
    law = TailBalancedLaw(1.5, 0.5)
    specs = [
        ExperimentSpec("d", "decomposition", law, FarimaSpec(1.5), (50,), 3),
        ExperimentSpec("s", "stable-limit", law, LimitKernel.constant(1.0), (50,), 20, 1,
                       {"depth": 100}),
        ExperimentSpec("ss", "self-similarity", law, None, (1,), 20, 1,
                       {"depth": 100, "mean_alphas": (1.5,), "mean_reps": 20}),
        ExperimentSpec("e", "extremes", law, FarimaSpec(0.5), (100,), 20),
        ExperimentSpec("pl", "point-counts", law, CoeffSeries(0.5 ** np.arange(5)), (100,), 20, 1,
                       {"source": "limit", "floor": 0.2}),
        ExperimentSpec("pp", "point-counts", law, CoeffSeries(0.5 ** np.arange(5)), (100,), 5, 1,
                       {"source": "path", "floor": 0.2}),
        ExperimentSpec("x", "expansion", None, FarimaSpec(1.5), (64,), 1),
        ExperimentSpec("k", "karamata-series", None, FarimaSpec(1.5), (100,), 1),
        ExperimentSpec("t", "truncated-moments", law, None, (1,), 1),
        ExperimentSpec("g", "gamma-ratio", None, None, (1,), 1, 1, {"d": 1.5}),
    ]
    for spec in specs:
        table = harness.run_experiment(spec)
        assert table.rows and all(r.name == spec.name for r in table.rows)
        assert all(np.isfinite(r.value) for r in table.rows)
    with pytest.raises(DomainError):
        harness.run_experiment(ExperimentSpec("bad", "point-counts", law, CoeffSeries([1.0]), (10,),
                                              2, 1, {"source": "both"}))
    with pytest.raises(DomainError):
        harness.run_experiment(ExperimentSpec("bad", "truncated-moments", TailBalancedLaw(1.5, 0.7)))


def test_acceptance_suite_shape():
    suite = harness.acceptance_suite(42)
    assert sorted(suite) == list(range(1, 11)) == sorted(harness.CRITERIA)
    assert all(spec.seed == 42 for specs in suite.values() for spec in specs)
    with pytest.raises(DomainError):
        harness.run_acceptance(42, only=[11])


def test_fast_criteria_pass():
    out = harness.run_acceptance(42, only=[2, 9, 10])
    assert all(t.all_pass for t in out.values())
