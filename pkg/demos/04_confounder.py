"""Why the learner conditions on the neighborhood.

x0 is strongly coupled to the relevant x1, so its unconditional covariance
with the label is large. Conditioning on x0's one neighbor removes it.
"""
from mrfjunta.instances import CONFOUNDER, chain_confounder
from mrfjunta.junta import label_samples
from mrfjunta.learner import baseline_product_statistic, find_relevant_variables
from mrfjunta.oracle import best_restriction_statistic, calibrated_threshold, exact_baseline_statistic
from mrfjunta.sampling import enumerate_distribution, sample_exact

model, f = chain_confounder(sigma=0.3, seed=0)
dist = enumerate_distribution(model)
samples = label_samples(f, sample_exact(dist, 50_000, seed=1))

print(" i  relevant  baseline(exact)  baseline(sample)  best conditional(exact)")
for i in range(model.n):
    print(f"{i:2d}  {str(i in f.relevant):8s}  {exact_baseline_statistic(dist, f, i):15.4f}"
          f"  {baseline_product_statistic(samples, i):16.4f}  {best_restriction_statistic(dist, f, i, model.graph):22.4f}")

tau = calibrated_threshold(dist, f, model.graph)
rel = find_relevant_variables(samples, model.graph, tau)
print(f"tau = {tau:.4f}; selected {rel}; confounder x{CONFOUNDER} excluded: {CONFOUNDER not in rel}")
