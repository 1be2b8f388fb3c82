import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mrfjunta.experiment import ExperimentConfig, run_experiment
from mrfjunta.instances import ising_chain
from mrfjunta.junta import Junta, label_samples
from mrfjunta.learner import (
    LearnerConfig,
    ThresholdTooLowError,
    baseline_product_statistic,
    default_threshold,
    disagreement,
    empirical_statistic,
    erm_truth_table,
    find_relevant_variables,
    learn_junta,
    learn_with_report,
    relevance_scan,
    select_relevant,
)
from mrfjunta.mrf import DependencyGraph
from mrfjunta.polynomial import cube
from mrfjunta.sampling import Restriction, SampleSet, enumerate_distribution, sample_exact


def four_examples():
    return SampleSet(np.array([[0, 0], [0, 1], [1, 0], [1, 1]]), np.array([0, 0, 1, 1]))


class TestStatistic:
    def test_all_zero_labels(self, chain6):
        s = sample_exact(enumerate_distribution(chain6), 2000, 0)
        assert all(r.value == 0 for r in relevance_scan(s, chain6.graph))

    def test_empty_subsample(self):
        s = SampleSet(np.array([[0, 0], [0, 1]]), np.array([1, 0]))
        rec = empirical_statistic(s, 1, Restriction.parse("1*"))
        assert rec.value == 0.0
        assert rec.support_count == 0

    def test_hand_example(self):
        assert empirical_statistic(four_examples(), 0, Restriction.free(2)).value == pytest.approx(0.25)

    def test_range(self, chain6):
        f = Junta.from_function(6, (1, 4), lambda a, b: a | b)
        s = label_samples(f, sample_exact(enumerate_distribution(chain6), 3000, 1))
        vals = [r.value for r in relevance_scan(s, chain6.graph)]
        assert min(vals) >= 0 and max(vals) <= 0.25

    def test_support_must_match_neighborhood(self):
        g = DependencyGraph.path(3)
        s = four_examples()
        with pytest.raises(ValueError):
            empirical_statistic(SampleSet(cube(3)), 1, Restriction.parse("1**"), g)
        with pytest.raises(ValueError):
            empirical_statistic(s, 0, Restriction.parse("1*"))

    def test_baseline_uniform_dictator(self):
        s = label_samples(Junta.dictator(3, 0), sample_exact(
            enumerate_distribution(ising_chain(3, 0.0, None, 0)), 40000, 2))
        # population value 1/4; sd of the estimate is well under 0.005
        assert baseline_product_statistic(s, 0) == pytest.approx(0.25, abs=0.01)
        assert baseline_product_statistic(SampleSet(cube(3)), 1) == 0.0


class TestSelection:
    def test_constant_junta(self, chain6):
        s = label_samples(Junta.constant(6, 1), sample_exact(enumerate_distribution(chain6), 1000, 0))
        assert find_relevant_variables(s, chain6.graph, 1e-12) == ()

    def test_strict_threshold(self):
        recs = relevance_scan(four_examples(), DependencyGraph.empty(2))
        assert select_relevant(recs, 0.25) == ()
        assert select_relevant(recs, 0.25 - 1e-12) == (0,)

    def test_tau_must_be_positive(self):
        with pytest.raises(ValueError):
            find_relevant_variables(four_examples(), DependencyGraph.empty(2), 0.0)

    def test_rel_cap(self, chain6):
        s = label_samples(Junta.from_function(6, (0, 5), lambda a, b: a ^ b),
                          sample_exact(enumerate_distribution(chain6), 500, 0))
        with pytest.raises(ThresholdTooLowError):
            learn_with_report(s, chain6.graph, LearnerConfig(1e-9, k_bound=1))

    @given(st.permutations(range(5)))
    @settings(max_examples=15, deadline=None)
    def test_permutation_invariance(self, perm):
        # relabel variables (and the graph) consistently; selected sets correspond
        model = ising_chain(5, 0.8, 0.3, 3)
        f = Junta.from_function(5, (1, 3), lambda a, b: a & b)
        s = label_samples(f, sample_exact(enumerate_distribution(model), 4000, 0))
        g = model.graph
        perm = list(perm)
        inv = np.argsort(perm)
        s2 = SampleSet(s.x[:, perm], s.y)
        g2 = DependencyGraph.from_edges(5, [(int(inv[a]), int(inv[b])) for a, b in g.edges()])
        rel = find_relevant_variables(s, g, 0.01)
        rel2 = find_relevant_variables(s2, g2, 0.01)
        assert sorted(perm[i] for i in rel2) == list(rel)


class TestErm:
    def test_constant_labels(self):
        s = SampleSet(cube(3), np.ones(8))
        assert erm_truth_table(s, ()).hypothesis == Junta.constant(3, 1)

    def test_majority_and_default(self):
        x = np.array([[0, 0], [0, 0], [0, 0], [1, 0], [1, 0]])
        y = np.array([1, 1, 0, 1, 0])
        res = erm_truth_table(SampleSet(x, y), (0,), default_label=0)
        # row 0: majority 1; row 1: tie -> default 0
        np.testing.assert_array_equal(res.hypothesis.table, [1, 0])
        assert res.inconsistent == 2
        res1 = erm_truth_table(SampleSet(x, y), (0,), default_label=1)
        assert res1.hypothesis == Junta.constant(2, 1)

    def test_unseen_reported(self):
        res = erm_truth_table(SampleSet(np.array([[0, 0]]), np.array([1])), (0, 1))
        assert res.unseen == 3

    def test_exact_rel_gives_zero_disagreement(self, chain6):
        f = Junta.from_function(6, (1, 4), lambda a, b: a | b)
        s = label_samples(f, sample_exact(enumerate_distribution(chain6), 5000, 0))
        h = erm_truth_table(s, f.relevant).hypothesis
        assert disagreement(h, f) == 0.0

    def test_dictator_on_chain(self, chain6):
        f = Junta.dictator(6, 2)
        dist = enumerate_distribution(chain6)
        s = label_samples(f, sample_exact(dist, 20000, 7))
        h = learn_junta(s, chain6.graph, tau=0.02)
        assert h == f
        np.testing.assert_array_equal(h.table, [0, 1])
        assert disagreement(h, f, dist.probabilities) == 0.0


class TestDefaultThreshold:
    def test_formal_plug_in(self):
        assert default_threshold(1, 1, 0, 16, 0) == pytest.approx(0.5)

    def test_worked_value(self):
        expected = 0.5 * (0.1 / 4) ** 2 * (0.3 * math.exp(-0.5) / 16) ** 4
        got = default_threshold(0.1, 2, 1, 0.3, 0.5)
        assert got == pytest.approx(expected, rel=1e-14)
        # independent evaluation via logs
        log_tau = math.log(0.5) + 2 * (math.log(0.1) - math.log(2) - math.log(2)) + 4 * (
            math.log(0.3) - 0.5 - math.log(16))
        assert got == pytest.approx(math.exp(log_tau), rel=1e-12)

    def test_monotone(self):
        base = dict(delta=0.1, k=2, d=1, sigma=0.3, lam=0.5)
        t0 = default_threshold(**base)
        for key, bump, direction in [("k", 1, -1), ("d", 1, -1), ("lam", 0.1, -1), ("sigma", 0.05, 1), ("delta", 0.05, 1)]:
            t1 = default_threshold(**{**base, key: base[key] + bump})
            assert (t1 - t0) * direction > 0, key

    def test_config_validation(self):
        with pytest.raises(ValueError):
            LearnerConfig(0.0)
        with pytest.raises(ValueError):
            LearnerConfig(0.1, delta=1.0)


class TestEndToEnd:
    def test_report_json(self, chain6):
        f = Junta.dictator(6, 2)
        s = label_samples(f, sample_exact(enumerate_distribution(chain6), 5000, 0))
        d = learn_with_report(s, chain6.graph, LearnerConfig(0.02)).to_dict()
        assert d["rel"] == [2]
        assert all(r["value"] > 0.01 for r in d["records"])

    def test_n8_recovery_rate(self):
        cfg = ExperimentConfig(n=8, k=2, d=2, sigma=0.3, lam=0.5, N=50_000, trials=100, seed=0, threshold_mode="calibrated")
        assert run_experiment(cfg).recovery_rate >= 0.9
