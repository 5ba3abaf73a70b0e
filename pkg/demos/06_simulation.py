"""
Case-control simulation.

Disease risk follows a logistic model in two causal SNPs, their product and
their interaction with a binary exposure. Subjects are drawn in batches and
kept until the case and control quotas are met.
"""
# %%
import numpy as np

from mossgwas import SimConfig, simulate_dataset
from mossgwas.simulate import disease_probability

cfg = SimConfig(n_cases=1000, n_controls=1000, p=100, causal=(0, 1), seed=42)
print("baseline risk   :", round(float(disease_probability(0, 0, 0, cfg)), 4))
print("highest risk    :", round(float(disease_probability(2, 2, 1, cfg)), 4))

d = simulate_dataset(cfg)
print(d.n, "subjects,", len(d.predictors), "SNPs,", int(d.response.sum()), "cases")

# %%
# allele frequencies: causal SNPs are enriched among cases
y = d.response.astype(bool)
for j in (0, 1, 50):
    g = d.rows[:, j]
    print(d.names[j], "cases", round(g[y].mean() / 2, 3), "controls", round(g[~y].mean() / 2, 3))
