"""Recover a 2-junta from samples of a smoothed MRF."""
import numpy as np

from mrfjunta.experiment import ExperimentConfig, generate_instance
from mrfjunta.junta import label_samples
from mrfjunta.learner import LearnerConfig, default_threshold, disagreement, learn_with_report
from mrfjunta.oracle import calibrated_threshold
from mrfjunta.sampling import enumerate_distribution, sample_exact

cfg = ExperimentConfig(n=10, k=2, d=2, sigma=0.3, lam=0.5, N=50_000)
model, target = generate_instance(cfg, seed=4)
dist = enumerate_distribution(model)
print("target:", target)

samples = label_samples(target, sample_exact(dist, cfg.N, seed=5))

# the worst-case threshold is tiny next to sampling noise
print(f"theoretical tau: {default_threshold(cfg.delta, cfg.k, cfg.d, cfg.sigma, cfg.lam):.3e}")
tau = calibrated_threshold(dist, target, model.graph)
print(f"calibrated tau:  {tau:.4f}")

report = learn_with_report(samples, model.graph, LearnerConfig(tau, k_bound=cfg.k))
top = sorted(report.records, key=lambda r: -r.value)[:6]
for r in top:
    print(f"  I({r.i}, {r.rho}) = {r.value:.4f}  (|S_rho| = {r.support_count})")
print("Rel:", report.rel, "hypothesis:", report.hypothesis)
print("error under the model:", disagreement(report.hypothesis, target, dist.probabilities))
