"""Recovery rate as the sample budget grows."""
from mrfjunta.experiment import ExperimentConfig, run_experiment

for N in (500, 2_000, 8_000, 32_000):
    cfg = ExperimentConfig(n=8, k=2, d=2, sigma=0.3, lam=0.5, N=N, trials=40, seed=0, threshold_mode="calibrated")
    res = run_experiment(cfg)
    print(f"N = {N:6d}: recovery {res.recovery_rate:.3f}, mean error {res.mean_test_error:.4f}")
